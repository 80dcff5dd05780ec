use std::f64::consts::{FRAC_PI_2, PI, TAU};

use approx::assert_abs_diff_eq;
use nalgebra::Vector3;
use tailsim::allocation::{cea_mix, sea_mix, AllocationParams, Wrench};
use tailsim::propulsion::{averaged_rotor_wrench, cyclic_rotor_wrench, hub_moment, CyclicCommand, MotorIndex, PropulsionParams, RotorState};
use tailsim::VehicleParams;

/// Mean of the instantaneous cyclic wrench over one revolution at constant
/// thrust, by the rectangle rule on a uniform grid (exact for the
/// trigonometric polynomials involved once n exceeds their degree).
fn quadrature_mean(cmd: &CyclicCommand, motor: MotorIndex, vp: &VehicleParams, prop: &PropulsionParams, n: usize) -> Wrench {
    let mut sum = Wrench::default();
    for k in 0..n {
        let theta = TAU * k as f64 / n as f64;
        let state = RotorState {
            theta,
            omega: 0.0,
            thrust_actual: vp.k_thrust * cmd.c_nominal,
            motor,
        };
        let (w, _) = cyclic_rotor_wrench(&state, cmd, theta, vp, prop);
        sum = sum + w;
    }
    Wrench::new(sum.f_t / n as f64, sum.tau / n as f64)
}

fn commands() -> Vec<CyclicCommand> {
    vec![
        CyclicCommand::new(0.4, 0.0, 0.0),
        CyclicCommand::new(0.4, 0.2, 0.0),
        CyclicCommand::new(0.5, 0.35, PI),
        CyclicCommand::new(0.3, 0.1, 1.3),
        CyclicCommand::new(0.7, 0.25, -2.0),
    ]
}

#[test]
fn averaged_wrench_is_the_revolution_mean() {
    let vp = VehicleParams::default();
    let prop = PropulsionParams::default();
    assert_eq!(vp.gamma0, prop.gamma_phys);
    for cmd in commands() {
        for motor in MotorIndex::BOTH {
            let q = quadrature_mean(&cmd, motor, &vp, &prop, 720);
            let a = averaged_rotor_wrench(&cmd, motor, &vp);
            assert_abs_diff_eq!(q.f_t, a.f_t, epsilon = 1e-12);
            assert_abs_diff_eq!(q.tau, a.tau, epsilon = 1e-12);
        }
    }
}

#[test]
fn phase_error_rotates_the_mean_moment() {
    let vp = VehicleParams::default();
    let mut prop = PropulsionParams::default();
    let delta = 0.2;
    prop.gamma_phys = vp.gamma0 + delta;
    for cmd in commands() {
        for motor in MotorIndex::BOTH {
            let q = quadrature_mean(&cmd, motor, &vp, &prop, 720);
            let m = hub_moment(&q, motor, &vp);
            // k_lat = 2·K_a, so the mean is K_a·A along φ + s·Δ, measured from body y.
            let dir = cmd.phi + motor.phase_sign() * delta;
            let expected = vp.k_swash * cmd.amplitude * Vector3::new(-dir.sin(), dir.cos(), 0.0);
            assert_abs_diff_eq!(m.x, expected.x, epsilon = 1e-12);
            assert_abs_diff_eq!(m.y, expected.y, epsilon = 1e-12);
        }
    }
}

#[test]
fn moment_lags_blade_by_quarter_turn_plus_hinge_lag() {
    let vp = VehicleParams::default();
    let prop = PropulsionParams::default();
    let cmd = CyclicCommand::new(0.5, 0.3, 0.0);
    let motor = MotorIndex::One;
    // Peak throttle where θ = φ − γ0; the moment there points at θ + π/2 + γ_phys.
    let theta = -vp.gamma0;
    let state = RotorState {
        theta,
        omega: 0.0,
        thrust_actual: vp.k_thrust * 0.5,
        motor,
    };
    let (w, u) = cyclic_rotor_wrench(&state, &cmd, theta, &vp, &prop);
    assert_abs_diff_eq!(u, 0.8, epsilon = 1e-12);
    let m = hub_moment(&w, motor, &vp);
    let angle = theta + FRAC_PI_2 + prop.gamma_phys;
    let mag = prop.k_lat(&vp) * 0.3;
    assert_abs_diff_eq!(m.x, mag * angle.cos(), epsilon = 1e-12);
    assert_abs_diff_eq!(m.y, mag * angle.sin(), epsilon = 1e-12);
}

fn hand_vehicle() -> (VehicleParams, AllocationParams) {
    let vp = VehicleParams {
        k_thrust: 20.0,
        arm_l: 0.25,
        k_swash: 0.9,
        k_elevon: 1.2,
        ..VehicleParams::default()
    };
    let alloc = AllocationParams {
        k_ep: Some(0.8),
        ..AllocationParams::default()
    };
    (vp, alloc)
}

// f = 20 N, τ = (0.5, −0.36, 0.24) N·m with K_t = 20, L = 0.25, K_a = 0.9,
// K_e = 1.2, K_ep = 0.8:
//   C = 20/40 ∓ 0.5/(2·0.25·20) = 0.45, 0.55
//   SEA: A = 0.36/1.8 = 0.2 at φ = π, δ = 0.24/2.4 = 0.1
//   CEA: δ = ∓0.36/1.6 + 0.1 = −0.125, 0.325
fn hand_wrench() -> Wrench {
    Wrench::new(20.0, Vector3::new(0.5, -0.36, 0.24))
}

#[test]
fn sea_mixer_hand_example() {
    let (vp, alloc) = hand_vehicle();
    let (cmd, rep) = sea_mix(&hand_wrench(), &vp, &alloc);
    assert!(!rep.flags.any());
    let [m1, m2] = cmd.cyclic;
    assert_abs_diff_eq!(m1.c_nominal, 0.45, epsilon = 1e-12);
    assert_abs_diff_eq!(m2.c_nominal, 0.55, epsilon = 1e-12);
    for m in [m1, m2] {
        assert_abs_diff_eq!(m.amplitude, 0.2, epsilon = 1e-12);
        assert_eq!(m.phi, PI);
    }
    assert_abs_diff_eq!(cmd.servo[0], 0.1, epsilon = 1e-12);
    assert_abs_diff_eq!(cmd.servo[1], 0.1, epsilon = 1e-12);
}

#[test]
fn cea_mixer_hand_example() {
    let (vp, alloc) = hand_vehicle();
    let (cmd, rep) = cea_mix(&hand_wrench(), &vp, &alloc);
    assert!(!rep.flags.any());
    assert_abs_diff_eq!(cmd.cyclic[0].c_nominal, 0.45, epsilon = 1e-12);
    assert_abs_diff_eq!(cmd.cyclic[1].c_nominal, 0.55, epsilon = 1e-12);
    assert_eq!(cmd.cyclic[0].amplitude, 0.0);
    assert_eq!(cmd.cyclic[1].amplitude, 0.0);
    assert_abs_diff_eq!(cmd.servo[0], -0.125, epsilon = 1e-12);
    assert_abs_diff_eq!(cmd.servo[1], 0.325, epsilon = 1e-12);
}
