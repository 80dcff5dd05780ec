//! C ABI over the `tailsim` library.
//!
//! Every fallible entry point returns a [`TailsimStatus`]. On failure the
//! message is kept in a thread-local slot readable with
//! [`tailsim_last_error`]. Configurations and reports are opaque handles
//! owned by the caller and released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use tailsim::allocation::{forward_map, mix, ActuatorCommand, SaturationFlags, Variant, Wrench};
use tailsim::config::Config;
use tailsim::nalgebra::Vector3;
use tailsim::propulsion::{cyclic_throttle, CyclicCommand, MotorIndex};
use tailsim::scenarios::{self, trace, ScenarioReport};
use tailsim::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Configuration text did not parse or failed validation.
    Config = 3,
    Infeasible = 4,
    /// Non-finite state while stepping.
    SimulationFault = 5,
    Io = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailsimVariant {
    Sea = 0,
    Cea = 1,
}

impl From<TailsimVariant> for Variant {
    fn from(v: TailsimVariant) -> Variant {
        match v {
            TailsimVariant::Sea => Variant::Sea,
            TailsimVariant::Cea => Variant::Cea,
        }
    }
}

/// Collective thrust (N) and body moment (N·m).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TailsimWrench {
    pub thrust: f64,
    pub tau: [f64; 3],
}

/// Per-motor nominal throttle, amplitude and phase (rad), servo angles (rad).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TailsimCommand {
    pub c_nominal: [f64; 2],
    pub amplitude: [f64; 2],
    pub phi: [f64; 2],
    pub servo: [f64; 2],
}

pub const TAILSIM_SAT_THROTTLE_1: u32 = 1 << 0;
pub const TAILSIM_SAT_THROTTLE_2: u32 = 1 << 1;
pub const TAILSIM_SAT_AMPLITUDE_1: u32 = 1 << 2;
pub const TAILSIM_SAT_AMPLITUDE_2: u32 = 1 << 3;
pub const TAILSIM_SAT_SERVO_1: u32 = 1 << 4;
pub const TAILSIM_SAT_SERVO_2: u32 = 1 << 5;

/// Opaque configuration handle.
pub struct TailsimConfig {
    inner: Config,
}

/// Opaque scenario result handle.
pub struct TailsimReport {
    inner: ScenarioReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(status: TailsimStatus, msg: impl Into<String>) -> TailsimStatus {
    set_error(msg.into());
    status
}

fn status_of(e: &Error) -> TailsimStatus {
    match e {
        Error::Parse(_) | Error::Validation { .. } | Error::Config(_) => TailsimStatus::Config,
        Error::Infeasible(_) | Error::DegenerateThrust(_) => TailsimStatus::Infeasible,
        Error::SimulationFault { .. } => TailsimStatus::SimulationFault,
        Error::Io(_) => TailsimStatus::Io,
        Error::StepSize { .. } | Error::InsufficientData(_) | Error::EmptyTrace => TailsimStatus::InvalidArgument,
    }
}

/// Runs `f` with panics converted to `Internal` and errors recorded.
fn guard(f: impl FnOnce() -> Result<(), TailsimStatus>) -> TailsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TailsimStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(TailsimStatus::Internal, "panic in tailsim"),
    }
}

fn lift(e: Error) -> TailsimStatus {
    fail(status_of(&e), e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, TailsimStatus> {
    if p.is_null() {
        return Err(fail(TailsimStatus::NullPointer, format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(TailsimStatus::InvalidArgument, format!("`{name}` is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, TailsimStatus> {
    p.as_ref().ok_or_else(|| fail(TailsimStatus::NullPointer, format!("`{name}` is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, TailsimStatus> {
    p.as_mut().ok_or_else(|| fail(TailsimStatus::NullPointer, format!("`{name}` is null")))
}

fn to_command(c: &TailsimCommand) -> ActuatorCommand {
    ActuatorCommand {
        cyclic: [
            CyclicCommand::new(c.c_nominal[0], c.amplitude[0], c.phi[0]),
            CyclicCommand::new(c.c_nominal[1], c.amplitude[1], c.phi[1]),
        ],
        servo: c.servo,
    }
}

fn from_command(c: &ActuatorCommand) -> TailsimCommand {
    TailsimCommand {
        c_nominal: [c.cyclic[0].c_nominal, c.cyclic[1].c_nominal],
        amplitude: [c.cyclic[0].amplitude, c.cyclic[1].amplitude],
        phi: [c.cyclic[0].phi, c.cyclic[1].phi],
        servo: c.servo,
    }
}

fn flag_bits(f: &SaturationFlags) -> u32 {
    let bits = [
        (f.throttle[0], TAILSIM_SAT_THROTTLE_1),
        (f.throttle[1], TAILSIM_SAT_THROTTLE_2),
        (f.amplitude[0], TAILSIM_SAT_AMPLITUDE_1),
        (f.amplitude[1], TAILSIM_SAT_AMPLITUDE_2),
        (f.servo[0], TAILSIM_SAT_SERVO_1),
        (f.servo[1], TAILSIM_SAT_SERVO_2),
    ];
    bits.iter().filter(|(on, _)| *on).fold(0, |acc, (_, b)| acc | b)
}

/// Message for the last failed call on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tailsim_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tailsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default configuration.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn tailsim_config_default(out: *mut *mut TailsimConfig) -> TailsimStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(TailsimConfig { inner: Config::default() }));
        Ok(())
    })
}

/// Parse and validate a TOML configuration.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tailsim_config_from_toml(toml: *const c_char, out: *mut *mut TailsimConfig) -> TailsimStatus {
    guard(|| {
        let text = str_arg(toml, "toml")?;
        let out = out_arg(out, "out")?;
        let inner = Config::from_toml_str(text).map_err(lift)?;
        *out = Box::into_raw(Box::new(TailsimConfig { inner }));
        Ok(())
    })
}

/// # Safety
/// `cfg` must be null or a handle from a `tailsim_config_*` constructor,
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tailsim_config_free(cfg: *mut TailsimConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Map a desired wrench to actuator commands. `saturation` receives the
/// `TAILSIM_SAT_*` bits and may be null.
///
/// # Safety
/// Pointers must be valid; `saturation` may be null.
#[no_mangle]
pub unsafe extern "C" fn tailsim_mix(
    cfg: *const TailsimConfig,
    variant: TailsimVariant,
    desired: *const TailsimWrench,
    out: *mut TailsimCommand,
    saturation: *mut u32,
) -> TailsimStatus {
    guard(|| {
        let cfg = &ref_arg(cfg, "cfg")?.inner;
        let d = ref_arg(desired, "desired")?;
        let out = out_arg(out, "out")?;
        let w = Wrench::new(d.thrust, Vector3::from(d.tau));
        if !w.is_finite() {
            return Err(fail(TailsimStatus::InvalidArgument, "desired wrench is not finite"));
        }
        let (cmd, report) = mix(variant.into(), &w, &cfg.vehicle, &cfg.allocation);
        *out = from_command(&cmd);
        if let Some(s) = saturation.as_mut() {
            *s = flag_bits(&report.flags);
        }
        Ok(())
    })
}

/// Wrench produced by an actuator command at the hover operating point.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tailsim_forward_map(
    cfg: *const TailsimConfig,
    cmd: *const TailsimCommand,
    out: *mut TailsimWrench,
) -> TailsimStatus {
    guard(|| {
        let cfg = &ref_arg(cfg, "cfg")?.inner;
        let cmd = to_command(ref_arg(cmd, "cmd")?);
        let out = out_arg(out, "out")?;
        let w = forward_map(&cmd, &cfg.vehicle, &cfg.allocation);
        *out = TailsimWrench {
            thrust: w.f_t,
            tau: [w.tau.x, w.tau.y, w.tau.z],
        };
        Ok(())
    })
}

/// Throttle of motor `motor` (1 or 2) at rotor angle `theta`, clamped to [0, 1].
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tailsim_cyclic_throttle(
    c_nominal: f64,
    amplitude: f64,
    phi: f64,
    theta: f64,
    motor: u32,
    gamma0: f64,
    out: *mut f64,
) -> TailsimStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let motor = match motor {
            1 => MotorIndex::One,
            2 => MotorIndex::Two,
            m => return Err(fail(TailsimStatus::InvalidArgument, format!("motor must be 1 or 2, got {m}"))),
        };
        *out = cyclic_throttle(&CyclicCommand::new(c_nominal, amplitude, phi), theta, motor, gamma0);
        Ok(())
    })
}

/// Run the scenario selected in the configuration's `[scenario]` table.
///
/// # Safety
/// `cfg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tailsim_run_scenario(
    cfg: *const TailsimConfig,
    variant: TailsimVariant,
    out: *mut *mut TailsimReport,
) -> TailsimStatus {
    guard(|| {
        let cfg = &ref_arg(cfg, "cfg")?.inner;
        let out = out_arg(out, "out")?;
        let inner = scenarios::run(variant.into(), cfg).map_err(lift)?;
        *out = Box::into_raw(Box::new(TailsimReport { inner }));
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle from [`tailsim_run_scenario`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tailsim_report_free(report: *mut TailsimReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Headline metric by key, e.g. `pitch_err_max_deg`.
///
/// # Safety
/// Pointers must be valid and `key` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tailsim_report_metric(
    report: *const TailsimReport,
    key: *const c_char,
    out: *mut f64,
) -> TailsimStatus {
    guard(|| {
        let r = &ref_arg(report, "report")?.inner;
        let key = str_arg(key, "key")?;
        let out = out_arg(out, "out")?;
        *out = r.metric(key).map_err(|e| fail(TailsimStatus::InvalidArgument, e.to_string()))?;
        Ok(())
    })
}

/// Number of recorded control ticks, or 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tailsim_report_trace_len(report: *const TailsimReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.trace.len())
}

/// Fraction of ticks with any actuator saturated, or NaN for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tailsim_report_duty_any(report: *const TailsimReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.duty.any_duty())
}

/// Write the trace to `path` as CSV, keeping every `stride`-th row.
///
/// # Safety
/// `report` must be a live handle and `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tailsim_report_write_csv(
    report: *const TailsimReport,
    path: *const c_char,
    stride: usize,
) -> TailsimStatus {
    guard(|| {
        let r = &ref_arg(report, "report")?.inner;
        let path = Path::new(str_arg(path, "path")?);
        let io = |e: std::io::Error| fail(TailsimStatus::Io, format!("{}: {e}", path.display()));
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        trace::write_csv(&mut w, &r.trace, stride).map_err(io)?;
        Ok(())
    })
}
