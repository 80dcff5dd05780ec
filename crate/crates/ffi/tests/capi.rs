use std::ffi::{CStr, CString};
use std::ptr;

use tailsim_ffi::*;

fn last_error() -> String {
    let p = tailsim_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn config(toml: &str) -> *mut TailsimConfig {
    let text = CString::new(toml).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { tailsim_config_from_toml(text.as_ptr(), &mut cfg) }, TailsimStatus::Ok);
    assert!(!cfg.is_null());
    cfg
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(tailsim_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn bad_config_reports_config_status_and_message() {
    let text = CString::new("[vehicle]\nmass = -1.0\n").unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { tailsim_config_from_toml(text.as_ptr(), &mut cfg) }, TailsimStatus::Config);
    assert!(cfg.is_null());
    assert!(last_error().contains("mass"), "{}", last_error());

    let text = CString::new("[vehicel]\n").unwrap();
    assert_eq!(unsafe { tailsim_config_from_toml(text.as_ptr(), &mut cfg) }, TailsimStatus::Config);
}

#[test]
fn null_arguments_are_rejected() {
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { tailsim_config_from_toml(ptr::null(), &mut cfg) }, TailsimStatus::NullPointer);
    assert_eq!(unsafe { tailsim_config_default(ptr::null_mut()) }, TailsimStatus::NullPointer);
    let w = TailsimWrench::default();
    let mut cmd = TailsimCommand::default();
    assert_eq!(
        unsafe { tailsim_mix(ptr::null(), TailsimVariant::Sea, &w, &mut cmd, ptr::null_mut()) },
        TailsimStatus::NullPointer
    );
    assert!(last_error().contains("cfg"));
    unsafe {
        tailsim_config_free(ptr::null_mut());
        tailsim_report_free(ptr::null_mut());
        assert_eq!(tailsim_report_trace_len(ptr::null()), 0);
        assert!(tailsim_report_duty_any(ptr::null()).is_nan());
    }
}

#[test]
fn mix_then_forward_map_recovers_the_wrench() {
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { tailsim_config_default(&mut cfg) }, TailsimStatus::Ok);
    let desired = TailsimWrench {
        thrust: 20.0,
        tau: [0.05, -0.1, 0.02],
    };
    for variant in [TailsimVariant::Sea, TailsimVariant::Cea] {
        let mut cmd = TailsimCommand::default();
        let mut sat = u32::MAX;
        assert_eq!(unsafe { tailsim_mix(cfg, variant, &desired, &mut cmd, &mut sat) }, TailsimStatus::Ok);
        assert_eq!(sat, 0);
        let mut back = TailsimWrench::default();
        assert_eq!(unsafe { tailsim_forward_map(cfg, &cmd, &mut back) }, TailsimStatus::Ok);
        assert!((back.thrust - desired.thrust).abs() < 1e-9);
        for i in 0..3 {
            assert!((back.tau[i] - desired.tau[i]).abs() < 1e-9, "{variant:?} axis {i}");
        }
        match variant {
            TailsimVariant::Sea => assert_eq!(cmd.servo[0], cmd.servo[1]),
            TailsimVariant::Cea => assert_eq!(cmd.amplitude, [0.0, 0.0]),
        }
    }
    unsafe { tailsim_config_free(cfg) };
}

#[test]
fn mix_reports_saturation_bits() {
    let cfg = config("");
    let desired = TailsimWrench {
        thrust: 20.0,
        tau: [0.0, 0.0, 50.0],
    };
    let mut cmd = TailsimCommand::default();
    let mut sat = 0;
    assert_eq!(
        unsafe { tailsim_mix(cfg, TailsimVariant::Cea, &desired, &mut cmd, &mut sat) },
        TailsimStatus::Ok
    );
    assert_eq!(sat & (TAILSIM_SAT_SERVO_1 | TAILSIM_SAT_SERVO_2), TAILSIM_SAT_SERVO_1 | TAILSIM_SAT_SERVO_2);

    let nan = TailsimWrench {
        thrust: f64::NAN,
        tau: [0.0; 3],
    };
    assert_eq!(
        unsafe { tailsim_mix(cfg, TailsimVariant::Sea, &nan, &mut cmd, ptr::null_mut()) },
        TailsimStatus::InvalidArgument
    );
    unsafe { tailsim_config_free(cfg) };
}

#[test]
fn cyclic_throttle_matches_the_sinusoid() {
    let mut u = 0.0;
    assert_eq!(unsafe { tailsim_cyclic_throttle(0.5, 0.2, 0.0, 0.0, 1, 0.0, &mut u) }, TailsimStatus::Ok);
    assert!((u - 0.7).abs() < 1e-12);
    assert_eq!(
        unsafe { tailsim_cyclic_throttle(0.5, 0.2, 0.0, std::f64::consts::PI, 2, 0.0, &mut u) },
        TailsimStatus::Ok
    );
    assert!((u - 0.3).abs() < 1e-12);
    assert_eq!(
        unsafe { tailsim_cyclic_throttle(0.5, 0.2, 0.0, 0.0, 3, 0.0, &mut u) },
        TailsimStatus::InvalidArgument
    );
}

#[test]
fn scenario_run_exposes_metrics_and_trace() {
    let cfg = config("[scenario]\nname = \"transition\"\n");
    let mut report = ptr::null_mut();
    assert_eq!(
        unsafe { tailsim_run_scenario(cfg, TailsimVariant::Sea, &mut report) },
        TailsimStatus::Ok
    );
    let key = CString::new("final_airspeed_m_s").unwrap();
    let mut v = 0.0;
    assert_eq!(unsafe { tailsim_report_metric(report, key.as_ptr(), &mut v) }, TailsimStatus::Ok);
    assert!(v > 5.0, "{v}");
    let missing = CString::new("no_such_metric").unwrap();
    assert_eq!(
        unsafe { tailsim_report_metric(report, missing.as_ptr(), &mut v) },
        TailsimStatus::InvalidArgument
    );
    let n = unsafe { tailsim_report_trace_len(report) };
    assert!(n > 1000);
    let duty = unsafe { tailsim_report_duty_any(report) };
    assert!((0.0..=1.0).contains(&duty));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { tailsim_report_write_csv(report, cpath.as_ptr(), 100) }, TailsimStatus::Ok);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + n.div_ceil(100));

    let bad = CString::new(dir.path().join("missing/trace.csv").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { tailsim_report_write_csv(report, bad.as_ptr(), 1) }, TailsimStatus::Io);
    unsafe {
        tailsim_report_free(report);
        tailsim_config_free(cfg);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/tailsim.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 12);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}
