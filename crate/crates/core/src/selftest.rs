//! Built-in property checks run by `tailsim selftest`.

use std::f64::consts::TAU;
use std::time::Instant;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::allocation::{forward_map, mix, pitch_yaw_achievable, pitch_yaw_limits, Variant, Wrench};
use crate::config::Config;
use crate::dynamics::{integrate_step, SimState};
use crate::propulsion::{
    averaged_rotor_wrench, bench_trace, calibrate_gamma0, cyclic_throttle, hub_moment, max_cyclic_dt,
    revolution_averaged_wrench, CyclicCommand, MotorIndex,
};
use crate::scenarios::{self, trace::write_csv, ScenarioName};
use crate::vehicle::frames::wrap_angle;
use crate::GRAVITY;

/// Round-trip tolerance of the mixers, per wrench component.
pub const MIXER_TOL: f64 = 1e-9;
/// Cycle-mean and first-harmonic tolerance.
pub const CYCLE_TOL: f64 = 1e-9;
/// Cross-fidelity magnitude tolerance (relative) and direction tolerance (deg).
pub const CROSS_MAG_TOL: f64 = 0.02;
pub const CROSS_DIR_TOL_DEG: f64 = 2.0;
/// Phase calibration tolerance, rad.
pub const CALIBRATION_TOL: f64 = 0.01;
/// Free-body relative energy drift over 10 s.
pub const ENERGY_TOL: f64 = 1e-6;
/// Quaternion norm error per step.
pub const QUAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn timed(name: &'static str, f: impl FnOnce() -> (bool, String)) -> PropertyResult {
    let start = Instant::now();
    let (passed, detail) = f();
    PropertyResult {
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Random wrench that neither mixer clamps.
pub fn random_unsaturated_wrench(rng: &mut impl Rng, cfg: &Config) -> Wrench {
    let vp = &cfg.vehicle;
    let c = rng.gen_range(0.3..0.6);
    let f_t = 2.0 * vp.k_thrust * c;
    let roll = rng.gen_range(-0.05..0.05) * 2.0 * vp.arm_l * vp.k_thrust;
    let (_, yaw_max) = pitch_yaw_limits(Variant::Sea, c, vp, &cfg.allocation);
    let (pitch_cea, _) = pitch_yaw_limits(Variant::Cea, c, vp, &cfg.allocation);
    // Inside the CEA diamond (and so inside the SEA box) with margin.
    let u: f64 = rng.gen_range(-0.45..0.45);
    let v: f64 = rng.gen_range(-0.45..0.45);
    let c_low = c - 0.05;
    let pitch_sea = 2.0 * vp.k_swash * c_low.min(1.0 - c - 0.05);
    let pitch_max = pitch_cea.min(pitch_sea);
    Wrench::new(f_t, Vector3::new(roll, u * pitch_max, v * yaw_max))
}

/// Largest component-wise round-trip error over `n` random wrenches, both mixers.
pub fn mixer_round_trip_error(cfg: &Config, n: usize, seed: u64) -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut saturated = 0;
    for _ in 0..n {
        let w = random_unsaturated_wrench(&mut rng, cfg);
        for variant in [Variant::Sea, Variant::Cea] {
            let (cmd, rep) = mix(variant, &w, &cfg.vehicle, &cfg.allocation);
            saturated += rep.flags.any() as usize;
            let back = forward_map(&cmd, &cfg.vehicle, &cfg.allocation);
            worst = worst.max((back.f_t - w.f_t).abs()).max((back.tau - w.tau).abs().max());
        }
    }
    (worst, saturated)
}

/// Cycle mean and first-harmonic amplitude of the throttle law on a uniform grid.
pub fn cycle_moments(cmd: &CyclicCommand, motor: MotorIndex, gamma0: f64, n: usize) -> (f64, f64) {
    let mut mean = 0.0;
    let (mut a, mut b) = (0.0, 0.0);
    let ref_phase = cmd.phi - motor.phase_sign() * gamma0;
    for k in 0..n {
        let theta = TAU * k as f64 / n as f64;
        let u = cyclic_throttle(cmd, theta, motor, gamma0);
        mean += u;
        a += u * (theta - ref_phase).cos();
        b += u * (theta - ref_phase).sin();
    }
    let n = n as f64;
    (mean / n, 2.0 * (a * a + b * b).sqrt() / n)
}

/// Worst relative magnitude error and direction error (deg) between the
/// revolution-averaged cyclic model and the averaged model.
pub fn cross_fidelity_error(cfg: &Config, commands: &[CyclicCommand]) -> crate::Result<(f64, f64)> {
    let dt = max_cyclic_dt(&cfg.propulsion).min(1e-4);
    let mut mag = 0.0f64;
    let mut dir = 0.0f64;
    for cmd in commands {
        for motor in MotorIndex::BOTH {
            let avg = averaged_rotor_wrench(cmd, motor, &cfg.vehicle);
            let cyc = revolution_averaged_wrench(cmd, motor, 20.0, dt, &cfg.vehicle, &cfg.propulsion)?;
            mag = mag.max((cyc.f_t - avg.f_t).abs() / avg.f_t.abs().max(1e-9));
            let (ma, mc) = (hub_moment(&avg, motor, &cfg.vehicle), hub_moment(&cyc, motor, &cfg.vehicle));
            if ma.norm() > 0.0 {
                mag = mag.max((mc.norm() - ma.norm()).abs() / ma.norm());
                let d = wrap_angle(mc.y.atan2(mc.x) - ma.y.atan2(ma.x)).abs().to_degrees();
                dir = dir.max(d);
            }
        }
    }
    Ok((mag, dir))
}

pub fn cross_fidelity_commands() -> Vec<CyclicCommand> {
    vec![
        CyclicCommand::new(0.4, 0.1, 0.0),
        CyclicCommand::new(0.4, 0.2, std::f64::consts::PI),
        CyclicCommand::new(0.5, 0.3, 1.0),
        CyclicCommand::new(0.35, 0.15, -2.2),
    ]
}

/// Misclassified points when grid-sampling the reachable (τy, τz) set
/// against the box (SEA) and diamond (CEA) shapes.
pub fn reachable_set_misclassified(cfg: &Config, n_side: usize) -> usize {
    let vp = &cfg.vehicle;
    let f_t = vp.weight();
    let c = f_t / vp.max_thrust();
    let mut bad = 0;
    for variant in [Variant::Sea, Variant::Cea] {
        let (ty_max, tz_max) = pitch_yaw_limits(variant, c, vp, &cfg.allocation);
        for i in 0..n_side {
            for j in 0..n_side {
                // Offset grid so no sample lands exactly on the boundary.
                let u = -1.5 + 3.0 * (i as f64 + 0.37) / n_side as f64;
                let v = -1.5 + 3.0 * (j as f64 + 0.61) / n_side as f64;
                let inside = match variant {
                    Variant::Sea => u.abs() <= 1.0 && v.abs() <= 1.0,
                    Variant::Cea => u.abs() + v.abs() <= 1.0,
                };
                let ok = pitch_yaw_achievable(variant, f_t, u * ty_max, v * tz_max, vp, &cfg.allocation);
                bad += (ok != inside) as usize;
            }
        }
    }
    bad
}

fn energy(s: &SimState, cfg: &Config) -> f64 {
    let vp = &cfg.vehicle;
    0.5 * vp.mass * s.velocity.norm_squared()
        + vp.mass * GRAVITY * s.position.z
        + 0.5 * s.omega.dot(&vp.inertia().component_mul(&s.omega))
}

/// Relative energy drift and worst quaternion norm error of a free body
/// under gravity for `seconds` at 1 ms.
pub fn free_body_drift(cfg: &Config, seconds: f64) -> crate::Result<(f64, f64)> {
    let airframe = cfg.airframe();
    let mut s = SimState::at_rest(Vector3::new(0.0, 0.0, 100.0), 0.3, 0.4, &airframe);
    s.velocity = Vector3::new(1.0, -0.5, 3.0);
    s.omega = Vector3::new(0.8, -1.5, 2.0);
    let e0 = energy(&s, cfg);
    let gravity = Vector3::new(0.0, 0.0, -cfg.vehicle.mass * GRAVITY);
    let mut worst_q = 0.0f64;
    for _ in 0..(seconds * 1000.0).round() as usize {
        s = integrate_step(&s, &gravity, &Vector3::zeros(), 1e-3, &cfg.vehicle)?;
        worst_q = worst_q.max((s.attitude.coords.norm() - 1.0).abs());
    }
    Ok(((energy(&s, cfg) - e0).abs() / e0.abs(), worst_q))
}

/// Trace CSV bytes of a short run.
pub fn trace_bytes(cfg: &Config, variant: Variant) -> crate::Result<Vec<u8>> {
    let report = scenarios::run(variant, cfg)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, &report.trace, 1)?;
    Ok(buf)
}

fn fmt_err<T>(r: crate::Result<T>, f: impl FnOnce(T) -> (bool, String)) -> (bool, String) {
    match r {
        Ok(v) => f(v),
        Err(e) => (false, e.to_string()),
    }
}

/// Run every property against `cfg`.
pub fn run_all(cfg: &Config) -> Vec<PropertyResult> {
    let mut out = Vec::new();
    out.push(timed("mixer_round_trip", || {
        let (err, sat) = mixer_round_trip_error(cfg, 1000, 1);
        (err <= MIXER_TOL && sat == 0, format!("max error {err:.3e}, {sat} saturated"))
    }));
    out.push(timed("cycle_identities", || {
        let mut worst = 0.0f64;
        for cmd in cross_fidelity_commands() {
            for motor in MotorIndex::BOTH {
                let (mean, amp) = cycle_moments(&cmd, motor, cfg.vehicle.gamma0, 4096);
                worst = worst.max((mean - cmd.c_nominal).abs()).max((amp - cmd.amplitude).abs());
            }
        }
        (worst <= CYCLE_TOL, format!("max error {worst:.3e}"))
    }));
    out.push(timed("cross_fidelity", || {
        fmt_err(cross_fidelity_error(cfg, &cross_fidelity_commands()), |(mag, dir)| {
            (
                mag <= CROSS_MAG_TOL && dir <= CROSS_DIR_TOL_DEG,
                format!("magnitude {:.3}%, direction {dir:.3} deg", mag * 100.0),
            )
        })
    }));
    out.push(timed("gamma0_calibration", || {
        let mut p = cfg.propulsion.clone();
        p.gamma_phys = cfg.propulsion.gamma_phys + 0.1;
        let cmd = CyclicCommand::new(0.4, 0.2, 0.0);
        let dt = max_cyclic_dt(&p).min(1e-4);
        let r = bench_trace(&cmd, MotorIndex::One, 8.0, dt, &cfg.vehicle, &p)
            .and_then(|t| calibrate_gamma0(&t, &cmd, MotorIndex::One, cfg.vehicle.gamma0));
        fmt_err(r, |g| {
            let err = wrap_angle(g - p.gamma_phys).abs();
            (err <= CALIBRATION_TOL, format!("estimate {g:.4} rad, true {:.4} rad", p.gamma_phys))
        })
    }));
    out.push(timed("reachable_set", || {
        let bad = reachable_set_misclassified(cfg, 100);
        (bad == 0, format!("{bad} of 20000 samples misclassified"))
    }));
    out.push(timed("energy_drift", || {
        fmt_err(free_body_drift(cfg, 10.0), |(drift, q)| {
            (
                drift < ENERGY_TOL && q < QUAT_TOL,
                format!("relative drift {drift:.3e}, quaternion norm error {q:.3e}"),
            )
        })
    }));
    out.push(timed("determinism", || {
        let mut c = cfg.clone();
        c.scenario.name = ScenarioName::HoverGust;
        c.sim.duration_s = Some(3.0);
        let a = trace_bytes(&c, Variant::Sea);
        let b = trace_bytes(&c, Variant::Sea);
        match (a, b) {
            (Ok(a), Ok(b)) => (a == b, format!("{} bytes, identical: {}", a.len(), a == b)),
            (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
        }
    }));
    out
}
