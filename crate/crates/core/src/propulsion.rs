//! Motor and swashplateless hub models.
//!
//! Two fidelity levels share the same commands:
//!
//! - the **cyclic** model resolves every revolution. The throttle is the
//!   nominal value plus a once-per-revolution cosine locked to the rotor
//!   angle, and the passive hub turns the throttle ripple into a lateral
//!   moment whose direction rotates with the blade and trails it by the
//!   hinge lag `gamma_phys`;
//! - the **averaged** model is the revolution mean of the cyclic one and is
//!   linear in the commands (thrust `k_thrust·C`, moment `k_swash·A` at
//!   angle `φ`).
//!
//! Moment direction angles are measured in the body x-y plane such that
//! `φ = 0` is a positive pitch moment (+y) and increasing `φ` rotates the
//! moment counter-clockwise about +z.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::allocation::Wrench;
use crate::error::{Error, Result};
use crate::vehicle::{frames::wrap_angle, VehicleParams};

/// Longest step accepted in cyclic fidelity, s.
pub const MAX_CYCLIC_DT: f64 = 2.0e-4;
/// Minimum samples per revolution at `omega_max` in cyclic fidelity.
pub const MIN_SAMPLES_PER_REV: f64 = 50.0;
/// Revolutions a test-stand trace must cover before calibration.
pub const MIN_CALIBRATION_REVS: f64 = 5.0;

/// `[propulsion]` config section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropulsionParams {
    /// True hinge lag of the swashplateless hub, rad. `gamma0` is its calibrated estimate.
    pub gamma_phys: f64,
    /// Within-revolution moment gain, N·m per unit throttle ripple. Defaults to `2·k_swash`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_lat: Option<f64>,
    /// rad/s
    pub omega_max: f64,
    /// Spin rate at hover throttle, rad/s.
    pub omega_hover: f64,
    pub encoder_rate_hz: f64,
}

impl Default for PropulsionParams {
    fn default() -> Self {
        PropulsionParams {
            gamma_phys: 0.35,
            k_lat: None,
            omega_max: 1200.0,
            omega_hover: 600.0,
            encoder_rate_hz: 910.0,
        }
    }
}

impl PropulsionParams {
    pub fn validate(&self, vehicle: &VehicleParams) -> Result<()> {
        if !(self.gamma_phys.is_finite() && self.gamma_phys > -PI && self.gamma_phys <= PI) {
            return Err(Error::validation("gamma_phys", "must lie in (-pi, pi]"));
        }
        if let Some(k) = self.k_lat {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::validation("k_lat", "must be finite and > 0"));
            }
        }
        for (name, v) in [
            ("omega_max", self.omega_max),
            ("omega_hover", self.omega_hover),
            ("encoder_rate_hz", self.encoder_rate_hz),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(name, "must be finite and > 0"));
            }
        }
        if self.omega_hover > self.omega_max {
            return Err(Error::validation("omega_hover", "must not exceed omega_max"));
        }
        let _ = vehicle;
        Ok(())
    }

    pub fn k_lat(&self, vehicle: &VehicleParams) -> f64 {
        self.k_lat.unwrap_or(2.0 * vehicle.k_swash)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MotorIndex {
    One,
    Two,
}

impl MotorIndex {
    pub const BOTH: [MotorIndex; 2] = [MotorIndex::One, MotorIndex::Two];

    pub fn index(self) -> usize {
        match self {
            MotorIndex::One => 0,
            MotorIndex::Two => 1,
        }
    }

    /// Sign applied to the phase compensation: +1 for motor 1, −1 for motor 2.
    pub fn phase_sign(self) -> f64 {
        match self {
            MotorIndex::One => 1.0,
            MotorIndex::Two => -1.0,
        }
    }

    /// +1 counter-clockwise, −1 clockwise, viewed from the thrust side.
    pub fn spin_dir(self) -> f64 {
        self.phase_sign()
    }

    /// Body-frame position of the rotor hub (motor 1 on +y).
    pub fn position(self, vehicle: &VehicleParams) -> Vector3<f64> {
        Vector3::new(0.0, self.phase_sign() * vehicle.arm_l, 0.0)
    }
}

/// Nominal throttle, sinusoid amplitude and moment direction for one motor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CyclicCommand {
    pub c_nominal: f64,
    pub amplitude: f64,
    pub phi: f64,
}

impl CyclicCommand {
    pub fn new(c_nominal: f64, amplitude: f64, phi: f64) -> Self {
        CyclicCommand { c_nominal, amplitude, phi }
    }

    /// Whether the throttle stays inside [0, 1] for every rotor angle.
    pub fn is_valid(&self) -> bool {
        (0.0..=1.0).contains(&self.c_nominal)
            && self.amplitude >= 0.0
            && self.amplitude <= self.c_nominal.min(1.0 - self.c_nominal) + 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorState {
    /// Angle from body x to the positive blade, in [0, 2π).
    pub theta: f64,
    /// Signed spin rate, rad/s.
    pub omega: f64,
    /// Lagged thrust, N.
    pub thrust_actual: f64,
    pub motor: MotorIndex,
}

impl RotorState {
    /// Spinning steadily at nominal throttle `c`.
    pub fn steady(motor: MotorIndex, c: f64, vehicle: &VehicleParams, prop: &PropulsionParams) -> Self {
        RotorState {
            theta: 0.0,
            omega: spin_rate(c, vehicle, prop) * motor.spin_dir(),
            thrust_actual: vehicle.k_thrust * c,
            motor,
        }
    }
}

/// Total motor throttle for a cyclic command at rotor angle `theta`.
pub fn cyclic_throttle(cmd: &CyclicCommand, theta: f64, motor: MotorIndex, gamma0: f64) -> f64 {
    let u = cmd.c_nominal + cmd.amplitude * (theta - cmd.phi + motor.phase_sign() * gamma0).cos();
    u.clamp(0.0, 1.0)
}

/// Affine speed map `ω = ω_hover·(0.35 + 0.65·U/U_hover)`, clamped to `[0, omega_max]`.
pub fn spin_rate(throttle: f64, vehicle: &VehicleParams, prop: &PropulsionParams) -> f64 {
    let u_hover = vehicle.weight() / vehicle.max_thrust();
    (prop.omega_hover * (0.35 + 0.65 * throttle / u_hover)).clamp(0.0, prop.omega_max)
}

/// Direction of the instantaneous hub moment at rotor angle `theta`.
fn hub_moment_angle(theta: f64, motor: MotorIndex, gamma_phys: f64) -> f64 {
    theta + FRAC_PI_2 + motor.phase_sign() * gamma_phys
}

/// Instantaneous rotor wrench at the current rotor angle.
///
/// `theta_meas` is the angle the throttle modulation is locked to (the
/// encoder reading). Returns the wrench and the throttle applied.
pub fn cyclic_rotor_wrench(
    state: &RotorState,
    cmd: &CyclicCommand,
    theta_meas: f64,
    vehicle: &VehicleParams,
    prop: &PropulsionParams,
) -> (Wrench, f64) {
    let u = cyclic_throttle(cmd, theta_meas, state.motor, vehicle.gamma0);
    let ripple = prop.k_lat(vehicle) * (u - cmd.c_nominal);
    let angle = hub_moment_angle(state.theta, state.motor, prop.gamma_phys);
    let y = state.motor.position(vehicle).y;
    let tau = Vector3::new(
        -y * state.thrust_actual + ripple * angle.cos(),
        ripple * angle.sin(),
        0.0,
    );
    (Wrench::new(state.thrust_actual, tau), u)
}

/// Advance rotor angle, thrust lag and spin rate under throttle `u` for `dt`.
///
/// The spin rate follows the speed map of the lagged throttle, so the
/// within-revolution speed ripple is filtered by the motor time constant.
pub fn advance_rotor(
    state: &RotorState,
    u: f64,
    dt: f64,
    vehicle: &VehicleParams,
    prop: &PropulsionParams,
) -> RotorState {
    let alpha = 1.0 - (-dt / vehicle.motor_tau_s).exp();
    let thrust = state.thrust_actual + (vehicle.k_thrust * u - state.thrust_actual) * alpha;
    let omega = state.motor.spin_dir() * spin_rate(thrust / vehicle.k_thrust, vehicle, prop);
    let theta = (state.theta + 0.5 * (state.omega + omega) * dt).rem_euclid(TAU);
    RotorState {
        theta,
        omega,
        thrust_actual: thrust,
        motor: state.motor,
    }
}

/// Largest step the cyclic model accepts.
pub fn max_cyclic_dt(prop: &PropulsionParams) -> f64 {
    MAX_CYCLIC_DT.min(TAU / (MIN_SAMPLES_PER_REV * prop.omega_max))
}

/// One cyclic-fidelity step with an ideal encoder.
///
/// The returned wrench is the instantaneous value at the start of the step.
pub fn rotor_step(
    state: &RotorState,
    cmd: &CyclicCommand,
    dt: f64,
    vehicle: &VehicleParams,
    prop: &PropulsionParams,
) -> Result<(RotorState, Wrench)> {
    rotor_step_measured(state, cmd, state.theta, dt, vehicle, prop)
}

/// As [`rotor_step`], with the modulation locked to a measured angle.
pub fn rotor_step_measured(
    state: &RotorState,
    cmd: &CyclicCommand,
    theta_meas: f64,
    dt: f64,
    vehicle: &VehicleParams,
    prop: &PropulsionParams,
) -> Result<(RotorState, Wrench)> {
    let limit = max_cyclic_dt(prop);
    if !(dt > 0.0 && dt <= limit) {
        return Err(Error::StepSize { dt, limit });
    }
    let (wrench, u) = cyclic_rotor_wrench(state, cmd, theta_meas, vehicle, prop);
    Ok((advance_rotor(state, u, dt, vehicle, prop), wrench))
}

/// Revolution-mean wrench of one rotor, linear in the command.
pub fn averaged_rotor_wrench(cmd: &CyclicCommand, motor: MotorIndex, vehicle: &VehicleParams) -> Wrench {
    averaged_rotor_wrench_with_thrust(vehicle.k_thrust * cmd.c_nominal, cmd, motor, vehicle)
}

/// Averaged wrench with an externally supplied (lagged) thrust.
pub fn averaged_rotor_wrench_with_thrust(
    thrust: f64,
    cmd: &CyclicCommand,
    motor: MotorIndex,
    vehicle: &VehicleParams,
) -> Wrench {
    let y = motor.position(vehicle).y;
    let m = vehicle.k_swash * cmd.amplitude;
    Wrench::new(
        thrust,
        Vector3::new(-y * thrust - m * cmd.phi.sin(), m * cmd.phi.cos(), 0.0),
    )
}

/// Lateral hub moment of an averaged or cyclic rotor wrench, with the
/// differential-thrust roll contribution removed.
pub fn hub_moment(w: &Wrench, motor: MotorIndex, vehicle: &VehicleParams) -> Vector2<f64> {
    let y = motor.position(vehicle).y;
    Vector2::new(w.tau.x + y * w.f_t, w.tau.y)
}

/// Time-average of the cyclic rotor wrench over `revs` full revolutions,
/// starting from steady thrust at the nominal throttle.
pub fn revolution_averaged_wrench(
    cmd: &CyclicCommand,
    motor: MotorIndex,
    revs: f64,
    dt: f64,
    vehicle: &VehicleParams,
    prop: &PropulsionParams,
) -> Result<Wrench> {
    let mut state = RotorState::steady(motor, cmd.c_nominal, vehicle, prop);
    // Settle the thrust lag and speed ripple before averaging.
    let settle = (10.0 * vehicle.motor_tau_s / dt).ceil() as usize;
    for _ in 0..settle {
        state = rotor_step(&state, cmd, dt, vehicle, prop)?.0;
    }
    let target = revs * TAU;
    let mut travelled = 0.0;
    let mut elapsed = 0.0;
    let mut f_sum = 0.0;
    let mut tau_sum = Vector3::zeros();
    while travelled < target {
        let (next, w) = rotor_step(&state, cmd, dt, vehicle, prop)?;
        let step_angle = angle_step(state.theta, next.theta).abs();
        if step_angle == 0.0 {
            return Err(Error::InsufficientData("rotor is not turning".into()));
        }
        let weight = ((target - travelled) / step_angle).min(1.0) * dt;
        f_sum += w.f_t * weight;
        tau_sum += w.tau * weight;
        elapsed += weight;
        travelled += step_angle;
        state = next;
    }
    Ok(Wrench::new(f_sum / elapsed, tau_sum / elapsed))
}

/// Signed shortest angular step from `a` to `b`.
fn angle_step(a: f64, b: f64) -> f64 {
    wrap_angle(b - a)
}

/// One test-stand sample: rotor angle and measured hub moment (body x, y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchSample {
    pub theta: f64,
    pub moment: Vector2<f64>,
}

/// Record a test-stand trace of the cyclic model.
pub fn bench_trace(
    cmd: &CyclicCommand,
    motor: MotorIndex,
    revs: f64,
    dt: f64,
    vehicle: &VehicleParams,
    prop: &PropulsionParams,
) -> Result<Vec<BenchSample>> {
    let mut state = RotorState::steady(motor, cmd.c_nominal, vehicle, prop);
    let steps = (revs * TAU / (state.omega.abs().max(1e-9) * dt)).ceil() as usize + 1;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let (next, w) = rotor_step(&state, cmd, dt, vehicle, prop)?;
        out.push(BenchSample {
            theta: state.theta,
            moment: hub_moment(&w, motor, vehicle),
        });
        state = next;
    }
    Ok(out)
}

/// Estimate the hinge lag from a test-stand trace.
///
/// The trace is trimmed to whole revolutions and projected onto the zeroth
/// rotor-angle harmonic (samples weighted by the angle they span), which is
/// the revolution-mean moment. Its direction relative to the commanded `φ`
/// gives the lag that the `gamma0_used` compensation left uncorrected.
pub fn calibrate_gamma0(
    trace: &[BenchSample],
    cmd: &CyclicCommand,
    motor: MotorIndex,
    gamma0_used: f64,
) -> Result<f64> {
    if trace.len() < 2 {
        return Err(Error::InsufficientData("trace has fewer than two samples".into()));
    }
    let total: f64 = trace.windows(2).map(|w| angle_step(w[0].theta, w[1].theta).abs()).sum();
    let revs = (total / TAU).floor();
    if revs < MIN_CALIBRATION_REVS {
        return Err(Error::InsufficientData(format!(
            "trace covers {:.2} revolutions, need {MIN_CALIBRATION_REVS}",
            total / TAU
        )));
    }
    let budget = revs * TAU;
    let mut used = 0.0;
    let mut acc = Vector2::zeros();
    let mut energy = 0.0;
    for w in trace.windows(2) {
        if used >= budget {
            break;
        }
        let span = angle_step(w[0].theta, w[1].theta).abs().min(budget - used);
        acc += w[0].moment * span;
        energy += w[0].moment.norm_squared() * span;
        used += span;
    }
    let mean = acc / used;
    let rms = (energy / used).sqrt();
    if rms < 1e-12 || mean.norm() < 1e-6 * rms {
        return Err(Error::InsufficientData("no first-harmonic moment in trace".into()));
    }
    let direction = mean.y.atan2(mean.x);
    let residual = wrap_angle(direction - cmd.phi - FRAC_PI_2);
    Ok(wrap_angle(gamma0_used + motor.phase_sign() * residual))
}

/// Encoder with sample-and-hold at a fixed rate.
///
/// Between samples the consumer extrapolates the held angle with the held
/// spin rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Encoder {
    period: f64,
    next_sample: f64,
    sample_time: f64,
    theta: f64,
    omega: f64,
}

impl Encoder {
    pub fn new(rate_hz: f64) -> Self {
        Encoder {
            period: 1.0 / rate_hz,
            next_sample: f64::NEG_INFINITY,
            sample_time: 0.0,
            theta: 0.0,
            omega: 0.0,
        }
    }

    /// Latch a new reading if a sample instant has passed. The first call
    /// always samples and anchors the sample grid.
    pub fn update(&mut self, t: f64, rotor: &RotorState) {
        if t + 1e-12 >= self.next_sample {
            self.sample_time = t;
            self.theta = rotor.theta;
            self.omega = rotor.omega;
            if self.next_sample.is_finite() {
                while self.next_sample <= t + 1e-12 {
                    self.next_sample += self.period;
                }
            } else {
                self.next_sample = t + self.period;
            }
        }
    }

    pub fn held(&self) -> f64 {
        self.theta
    }

    pub fn estimate(&self, t: f64) -> f64 {
        (self.theta + self.omega * (t - self.sample_time)).rem_euclid(TAU)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn vp() -> VehicleParams {
        VehicleParams::default()
    }

    #[test]
    fn zero_amplitude_is_nominal() {
        let cmd = CyclicCommand::new(0.37, 0.0, 1.0);
        for i in 0..50 {
            let th = i as f64 * 0.13;
            assert_eq!(cyclic_throttle(&cmd, th, MotorIndex::One, 0.3), 0.37);
        }
    }

    #[test]
    fn peak_when_argument_vanishes() {
        let cmd = CyclicCommand::new(0.4, 0.1, 0.8);
        let g = 0.3;
        let u = cyclic_throttle(&cmd, cmd.phi - g, MotorIndex::One, g);
        assert_relative_eq!(u, 0.5, epsilon = 1e-15);
        let u = cyclic_throttle(&cmd, cmd.phi + g, MotorIndex::Two, g);
        assert_relative_eq!(u, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn motor_two_phase_sign() {
        // 0.4 + 0.1*cos(-0.3)
        let cmd = CyclicCommand::new(0.4, 0.1, 0.0);
        let u = cyclic_throttle(&cmd, 0.0, MotorIndex::Two, 0.3);
        assert_relative_eq!(u, 0.495_533_648_912_560_6, epsilon = 1e-12);
        assert!((u - 0.4955).abs() < 5e-5);
    }

    #[test]
    fn averaged_wrench_examples() {
        let p = vp();
        let w = averaged_rotor_wrench(&CyclicCommand::new(0.4, 0.0, 0.0), MotorIndex::One, &p);
        assert_relative_eq!(w.f_t, 11.03625, epsilon = 1e-12);
        assert_relative_eq!(w.tau.x, -p.arm_l * 11.03625, epsilon = 1e-12);

        let w = averaged_rotor_wrench(&CyclicCommand::new(0.4, 0.1, 0.0), MotorIndex::One, &p);
        assert_relative_eq!(w.tau.y, 0.09, epsilon = 1e-12);
        let w = averaged_rotor_wrench(&CyclicCommand::new(0.4, 0.1, PI), MotorIndex::Two, &p);
        assert_relative_eq!(w.tau.y, -0.09, epsilon = 1e-12);
    }

    #[test]
    fn step_size_rejected() {
        let p = vp();
        let prop = PropulsionParams::default();
        let s = RotorState::steady(MotorIndex::One, 0.4, &p, &prop);
        let err = rotor_step(&s, &CyclicCommand::new(0.4, 0.1, 0.0), 1e-3, &p, &prop).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. }));
        assert!(max_cyclic_dt(&prop) <= MAX_CYCLIC_DT);
    }

    #[test]
    fn no_modulation_no_mean_moment() {
        let p = vp();
        let prop = PropulsionParams::default();
        let cmd = CyclicCommand::new(0.4, 0.0, 0.0);
        let w = revolution_averaged_wrench(&cmd, MotorIndex::One, 10.0, 5e-5, &p, &prop).unwrap();
        let m = hub_moment(&w, MotorIndex::One, &p);
        assert!(m.norm() < 1e-12);
    }

    #[test]
    fn pitch_command_yields_positive_y_moment() {
        // Frozen from the quadrature oracle in tests/propulsion_oracle.rs: 0.09 N·m.
        let p = vp();
        let prop = PropulsionParams::default();
        let cmd = CyclicCommand::new(0.4, 0.1, 0.0);
        for motor in MotorIndex::BOTH {
            let w = revolution_averaged_wrench(&cmd, motor, 20.0, 5e-5, &p, &prop).unwrap();
            let m = hub_moment(&w, motor, &p);
            assert!((m.y - 0.09).abs() < 0.09 * 0.02, "{m:?}");
            assert!(m.x.abs() < 0.09 * 0.035, "{m:?}");
        }
    }

    #[test]
    fn miscalibration_by_pi_flips_moment() {
        let mut p = vp();
        let prop = PropulsionParams::default();
        p.gamma0 = wrap_angle(prop.gamma_phys + PI);
        let cmd = CyclicCommand::new(0.4, 0.1, 0.0);
        let w = revolution_averaged_wrench(&cmd, MotorIndex::One, 20.0, 5e-5, &p, &prop).unwrap();
        let m = hub_moment(&w, MotorIndex::One, &p);
        assert!(m.y < -0.085, "{m:?}");
    }

    #[test]
    fn calibration_recovers_lag() {
        let mut p = vp();
        p.gamma0 = 0.0;
        let prop = PropulsionParams { gamma_phys: 0.35, ..Default::default() };
        let cmd = CyclicCommand::new(0.4, 0.1, 0.0);
        for motor in MotorIndex::BOTH {
            let trace = bench_trace(&cmd, motor, 8.0, 5e-5, &p, &prop).unwrap();
            let g = calibrate_gamma0(&trace, &cmd, motor, p.gamma0).unwrap();
            assert!((g - 0.35).abs() < 0.01, "{motor:?} {g}");
        }
    }

    #[test]
    fn calibration_without_lag() {
        let mut p = vp();
        p.gamma0 = 0.0;
        let prop = PropulsionParams { gamma_phys: 0.0, ..Default::default() };
        let cmd = CyclicCommand::new(0.5, 0.2, 1.0);
        let trace = bench_trace(&cmd, MotorIndex::Two, 8.0, 5e-5, &p, &prop).unwrap();
        let g = calibrate_gamma0(&trace, &cmd, MotorIndex::Two, 0.0).unwrap();
        assert!(g.abs() < 0.01, "{g}");
    }

    #[test]
    fn calibration_needs_signal_and_length() {
        let p = vp();
        let prop = PropulsionParams::default();
        let flat = CyclicCommand::new(0.4, 0.0, 0.0);
        let trace = bench_trace(&flat, MotorIndex::One, 8.0, 5e-5, &p, &prop).unwrap();
        assert!(matches!(
            calibrate_gamma0(&trace, &flat, MotorIndex::One, 0.0),
            Err(Error::InsufficientData(_))
        ));
        let cmd = CyclicCommand::new(0.4, 0.1, 0.0);
        let short = bench_trace(&cmd, MotorIndex::One, 3.0, 5e-5, &p, &prop).unwrap();
        assert!(matches!(
            calibrate_gamma0(&short, &cmd, MotorIndex::One, 0.0),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn encoder_holds_between_samples() {
        let p = vp();
        let prop = PropulsionParams::default();
        let mut rotor = RotorState::steady(MotorIndex::One, 0.4, &p, &prop);
        let mut enc = Encoder::new(910.0);
        enc.update(0.0, &rotor);
        rotor.theta = 1.0;
        enc.update(0.5e-3, &rotor);
        assert_eq!(enc.held(), 0.0);
        enc.update(1.2e-3, &rotor);
        assert_eq!(enc.held(), 1.0);
        assert_relative_eq!(enc.estimate(1.2e-3 + 1e-4), (1.0 + rotor.omega * 1e-4) % TAU, epsilon = 1e-12);
    }

    #[test]
    fn encoder_samples_from_negative_start() {
        let p = vp();
        let prop = PropulsionParams::default();
        let mut rotor = RotorState::steady(MotorIndex::One, 0.4, &p, &prop);
        rotor.theta = 2.0;
        let mut enc = Encoder::new(910.0);
        enc.update(-3.0, &rotor);
        assert_eq!(enc.held(), 2.0);
        rotor.theta = 3.0;
        enc.update(-3.0 + 1.2e-3, &rotor);
        assert_eq!(enc.held(), 3.0);
    }
}
