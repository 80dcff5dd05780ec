//! Rigid-body state, wrench aggregation, integration and ground contact.

use nalgebra::{UnitQuaternion, Vector3};

use crate::aero::{
    elevon_wrench, ground_effect_factor, propwash_speed, strip_centers, wing_wrench, BodyWrench, SurfaceState,
};
use crate::allocation::{ActuatorCommand, Wrench};
use crate::config::Airframe;
use crate::environment::{wind_at, WindField};
use crate::error::{Error, Result};
use crate::propulsion::{averaged_rotor_wrench_with_thrust, cyclic_rotor_wrench, MotorIndex, RotorState};
use crate::vehicle::{frames, VehicleParams};
use crate::GRAVITY;

/// Longest rigid-body step, s.
pub const MAX_DT: f64 = 1.0e-3;
/// Natural frequency of the landing-gear stance spring, rad/s.
pub const GEAR_STANCE_OMEGA: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimState {
    /// World (ENU), m.
    pub position: Vector3<f64>,
    /// World, m/s.
    pub velocity: Vector3<f64>,
    /// Body to world.
    pub attitude: UnitQuaternion<f64>,
    /// Body, rad/s.
    pub omega: Vector3<f64>,
    pub rotors: [RotorState; 2],
    pub surfaces: [SurfaceState; 2],
    /// s
    pub time: f64,
}

impl SimState {
    /// At rest in hover attitude with both rotors spinning at throttle `c`.
    pub fn at_rest(position: Vector3<f64>, yaw: f64, c: f64, airframe: &Airframe) -> Self {
        SimState {
            position,
            velocity: Vector3::zeros(),
            attitude: frames::hover_attitude(yaw),
            omega: Vector3::zeros(),
            rotors: MotorIndex::BOTH.map(|m| RotorState::steady(m, c, &airframe.vehicle, &airframe.propulsion)),
            surfaces: [SurfaceState::default(); 2],
            time: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().all(|v| v.is_finite())
            && self.velocity.iter().all(|v| v.is_finite())
            && self.attitude.coords.iter().all(|v| v.is_finite())
            && self.omega.iter().all(|v| v.is_finite())
            && self.rotors.iter().all(|r| r.thrust_actual.is_finite() && r.theta.is_finite())
            && self.surfaces.iter().all(|s| s.delta.is_finite())
    }
}

/// How rotor wrenches are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RotorModel {
    /// Revolution-mean wrench with the lagged thrust.
    Averaged,
    /// Instantaneous wrench with the modulation locked to these measured angles.
    Cyclic { theta_meas: [f64; 2] },
}

/// External conditions for one wrench evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Environment<'a> {
    pub wind: &'a WindField,
    /// When false the elevons keep full authority at any height.
    pub ground_effect: bool,
    /// When false the wing produces no force.
    pub wing: bool,
    /// Constant body pitch moment from the trim imbalance, N·m.
    pub trim_tau_y: f64,
    /// Height of the ground plane used for elevon ground effect, m.
    pub floor: f64,
}

/// Net loads on the body and their main parts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Loads {
    /// World frame, gravity included, N.
    pub force_world: Vector3<f64>,
    /// Body frame, N·m.
    pub torque_body: Vector3<f64>,
    pub rotors: Wrench,
    pub elevons: BodyWrench,
    pub wing: BodyWrench,
    /// Wind at the center of mass, world frame.
    pub wind: Vector3<f64>,
    /// Throttle applied to each motor (cyclic model) or its nominal value.
    pub throttle: [f64; 2],
}

/// Sum rotor, elevon, wing, trim and gravity loads.
pub fn total_wrench(
    state: &SimState,
    cmd: &ActuatorCommand,
    env: &Environment,
    model: RotorModel,
    airframe: &Airframe,
) -> Loads {
    let vp = &airframe.vehicle;
    let mut rotors = Wrench::default();
    let mut throttle = [0.0; 2];
    for m in MotorIndex::BOTH {
        let i = m.index();
        let (w, u) = match model {
            RotorModel::Averaged => (
                averaged_rotor_wrench_with_thrust(state.rotors[i].thrust_actual, &cmd.cyclic[i], m, vp),
                cmd.cyclic[i].c_nominal,
            ),
            RotorModel::Cyclic { theta_meas } => {
                cyclic_rotor_wrench(&state.rotors[i], &cmd.cyclic[i], theta_meas[i], vp, &airframe.propulsion)
            }
        };
        rotors = rotors + w;
        throttle[i] = u;
    }

    let wind = wind_at(&state.position, state.time, env.wind);
    let v_air_body = state.attitude.inverse_transform_vector(&(state.velocity - wind));
    // Airspeed along the nose (body −z) adds to the slipstream over the elevons.
    let forward = (-v_air_body.z).max(0.0);
    let local_flow = MotorIndex::BOTH.map(|m| {
        let wash = propwash_speed(state.rotors[m.index()].thrust_actual, vp);
        (wash * wash + forward * forward).sqrt()
    });
    let eta = if env.ground_effect {
        ground_effect_factor(state.position.z - env.floor, vp, &airframe.aero)
    } else {
        1.0
    };
    let k_ep = airframe.allocation.k_ep(vp);
    let elevons = elevon_wrench(&state.surfaces, local_flow, eta, k_ep, vp, &airframe.aero);

    let wing = if env.wing {
        let strip_wind: Vec<Vector3<f64>> = strip_centers(vp, &airframe.aero)
            .iter()
            .map(|r| wind_at(&(state.position + state.attitude * r), state.time, env.wind))
            .collect();
        wing_wrench(&state.velocity, &state.omega, &state.attitude, &strip_wind, vp, &airframe.aero)
    } else {
        BodyWrench::zero()
    };

    let body_force = frames::thrust_axis() * rotors.f_t + elevons.force + wing.force;
    let force_world = state.attitude * body_force - Vector3::new(0.0, 0.0, vp.mass * GRAVITY);
    let torque_body = rotors.tau + elevons.torque + wing.torque + Vector3::new(0.0, env.trim_tau_y, 0.0);
    Loads {
        force_world,
        torque_body,
        rotors,
        elevons,
        wing,
        wind,
        throttle,
    }
}

fn angular_accel(omega: &Vector3<f64>, torque: &Vector3<f64>, inertia: &Vector3<f64>) -> Vector3<f64> {
    let h = inertia.component_mul(omega);
    (torque - omega.cross(&h)).component_div(inertia)
}

/// Inverse of the right-trivialized exponential differential, to third order.
fn dexp_inv(u: &Vector3<f64>, omega: &Vector3<f64>) -> Vector3<f64> {
    let uw = u.cross(omega);
    omega + 0.5 * uw + u.cross(&uw) / 12.0
}

/// Advance the rigid body and the elevon servos by `dt`.
///
/// World force and body torque are held over the step. Translation and body
/// rate use classical RK4; attitude uses the Lie-group (Munthe-Kaas) form of
/// RK4 on the body rotation vector followed by renormalization.
pub fn integrate_step(state: &SimState, force_world: &Vector3<f64>, torque_body: &Vector3<f64>, dt: f64, vehicle: &VehicleParams) -> Result<SimState> {
    if !(dt > 0.0 && dt <= MAX_DT + 1e-15) {
        return Err(Error::StepSize { dt, limit: MAX_DT });
    }
    let inertia = vehicle.inertia();
    let accel = force_world / vehicle.mass;

    let w0 = state.omega;
    let a1 = angular_accel(&w0, torque_body, &inertia);
    let u1 = w0;
    let w2 = w0 + 0.5 * dt * a1;
    let a2 = angular_accel(&w2, torque_body, &inertia);
    let u2 = dexp_inv(&(0.5 * dt * u1), &w2);
    let w3 = w0 + 0.5 * dt * a2;
    let a3 = angular_accel(&w3, torque_body, &inertia);
    let u3 = dexp_inv(&(0.5 * dt * u2), &w3);
    let w4 = w0 + dt * a3;
    let a4 = angular_accel(&w4, torque_body, &inertia);
    let u4 = dexp_inv(&(dt * u3), &w4);

    let omega = w0 + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    let u = dt / 6.0 * (u1 + 2.0 * u2 + 2.0 * u3 + u4);
    let q = state.attitude * UnitQuaternion::from_scaled_axis(u);
    let attitude = UnitQuaternion::new_normalize(q.into_inner());

    // RK4 with a constant acceleration reduces to the exact update.
    let velocity = state.velocity + accel * dt;
    let position = state.position + state.velocity * dt + 0.5 * accel * dt * dt;

    let max_step = vehicle.servo_rate_limit() * dt;
    let surfaces = state.surfaces.map(|s| SurfaceState {
        delta: s.delta + (s.delta_cmd - s.delta).clamp(-max_step, max_step),
        delta_cmd: s.delta_cmd,
    });

    Ok(SimState {
        position,
        velocity,
        attitude,
        omega,
        rotors: state.rotors,
        surfaces,
        time: state.time + dt,
    })
}

/// Resting height of the center of mass on a surface at `contact_height`.
pub fn rest_height(contact_height: f64, gear_height: f64) -> f64 {
    contact_height + gear_height
}

/// Whether the gear is on the surface and the net force pushes into it.
pub fn is_grounded(state: &SimState, force_world: &Vector3<f64>, rest_z: f64) -> bool {
    state.position.z <= rest_z + 1e-9 && force_world.z <= 0.0
}

/// Stance torque of the landing gear: a critically damped spring pulling
/// roll and pitch back to upright, yaw kept.
pub fn stance_torque(state: &SimState, vehicle: &VehicleParams) -> Vector3<f64> {
    let (_, _, yaw) = frames::euler_from_attitude(&state.attitude);
    let level = frames::hover_attitude(yaw);
    let q_e = state.attitude.inverse() * level;
    let s = if q_e.w < 0.0 { -1.0 } else { 1.0 };
    let err = 2.0 * s * q_e.imag();
    let i = vehicle.inertia();
    let k = GEAR_STANCE_OMEGA * GEAR_STANCE_OMEGA;
    let c = 2.0 * GEAR_STANCE_OMEGA;
    Vector3::new(
        i.x * (k * err.x - c * state.omega.x),
        i.y * (k * err.y - c * state.omega.y),
        0.0,
    )
}

/// Apply the ground constraint after a step.
///
/// While the vehicle rests on the surface the center of mass stays at
/// `rest_z`, vertical and horizontal motion stop and the yaw rate is held by
/// friction. Airborne states pass through unchanged.
pub fn ground_contact(state: &SimState, rest_z: f64) -> SimState {
    if state.position.z > rest_z {
        return *state;
    }
    let mut s = *state;
    s.position.z = rest_z;
    s.velocity = Vector3::zeros();
    s.omega.z = 0.0;
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::{mix, Variant};
    use crate::environment::Fan;
    use approx::assert_relative_eq;

    fn airframe() -> Airframe {
        Airframe::default()
    }

    fn env(wind: &WindField) -> Environment<'_> {
        Environment {
            wind,
            ground_effect: true,
            wing: true,
            trim_tau_y: 0.0,
            floor: 0.0,
        }
    }

    fn hover_state(z: f64) -> SimState {
        let a = airframe();
        let c = a.vehicle.weight() / a.vehicle.max_thrust();
        SimState::at_rest(Vector3::new(0.0, 0.0, z), 0.0, c, &a)
    }

    #[test]
    fn hover_equilibrium() {
        let a = airframe();
        let w = WindField::None;
        for z in [5.0, 0.0] {
            let s = hover_state(z);
            let (cmd, _) = mix(Variant::Sea, &Wrench::new(a.vehicle.weight(), Vector3::zeros()), &a.vehicle, &a.allocation);
            let l = total_wrench(&s, &cmd, &env(&w), RotorModel::Averaged, &a);
            assert!(l.force_world.norm() < 1e-12, "{:?}", l.force_world);
            assert!(l.torque_body.norm() < 1e-12);
        }
    }

    #[test]
    fn elevon_yaw_scales_with_ground_effect() {
        let a = airframe();
        let w = WindField::None;
        let mut low = hover_state(0.0);
        let mut high = hover_state(2.0);
        for s in [&mut low, &mut high] {
            s.surfaces = [SurfaceState { delta: 0.1, delta_cmd: 0.1 }; 2];
        }
        let cmd = ActuatorCommand::collective(0.4);
        let tl = total_wrench(&low, &cmd, &env(&w), RotorModel::Averaged, &a).torque_body.z;
        let th = total_wrench(&high, &cmd, &env(&w), RotorModel::Averaged, &a).torque_body.z;
        assert_relative_eq!(tl / th, 0.05, epsilon = 1e-12);
    }

    #[test]
    fn balanced_fans_give_no_yaw() {
        let a = airframe();
        let fans = WindField::Fans(vec![
            Fan { position: [-1.0, 0.27, 2.0], jet_radius: 0.27, ..Fan::default() },
            Fan { position: [-1.0, -0.27, 2.0], jet_radius: 0.27, ..Fan::default() },
        ]);
        let s = hover_state(2.0);
        let l = total_wrench(&s, &ActuatorCommand::collective(0.4), &env(&fans), RotorModel::Averaged, &a);
        assert!(l.wing.torque.z.abs() < 1e-12);
        assert!(l.wing.force.x > 0.0);
    }

    #[test]
    fn free_body_conserves_momentum() {
        let vp = VehicleParams::default();
        let mut s = hover_state(0.0);
        s.velocity = Vector3::new(0.3, -0.2, 0.1);
        s.omega = Vector3::new(0.5, 1.2, -0.7);
        let lin0 = s.velocity * vp.mass;
        let ang0 = s.attitude * vp.inertia().component_mul(&s.omega);
        for _ in 0..10_000 {
            s = integrate_step(&s, &Vector3::zeros(), &Vector3::zeros(), 1e-3, &vp).unwrap();
        }
        assert!((s.velocity * vp.mass - lin0).norm() < 1e-9);
        let ang = s.attitude * vp.inertia().component_mul(&s.omega);
        assert!((ang - ang0).norm() < 1e-9, "{}", (ang - ang0).norm());
    }

    #[test]
    fn constant_force_closed_form() {
        let vp = VehicleParams::default();
        let mut s = hover_state(0.0);
        let f = Vector3::new(0.0, 0.0, vp.mass * GRAVITY);
        for _ in 0..1000 {
            s = integrate_step(&s, &f, &Vector3::zeros(), 1e-3, &vp).unwrap();
        }
        assert_relative_eq!(s.velocity.z, 9.81, epsilon = 1e-9);
        assert_relative_eq!(s.position.z, 0.5 * 9.81, epsilon = 1e-9);
    }

    #[test]
    fn pure_pitch_torque() {
        let vp = VehicleParams::default();
        let mut s = hover_state(0.0);
        let tau = Vector3::new(0.0, vp.inertia_yy, 0.0);
        for _ in 0..1000 {
            s = integrate_step(&s, &Vector3::zeros(), &tau, 1e-3, &vp).unwrap();
        }
        assert_relative_eq!(s.omega.y, 1.0, epsilon = 1e-9);
        // Rotation about a fixed body axis: angle = t²/2.
        let expected = frames::hover_attitude(0.0) * UnitQuaternion::from_scaled_axis(Vector3::new(0.0, 0.5, 0.0));
        assert!(s.attitude.angle_to(&expected) < 1e-9);
    }

    #[test]
    fn quaternion_norm_kept() {
        let vp = VehicleParams::default();
        let mut s = hover_state(0.0);
        s.omega = Vector3::new(3.0, -2.0, 5.0);
        for _ in 0..5000 {
            s = integrate_step(&s, &Vector3::zeros(), &Vector3::new(0.1, 0.0, -0.05), 1e-3, &vp).unwrap();
            assert!((s.attitude.coords.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn step_size_rejected() {
        let vp = VehicleParams::default();
        let s = hover_state(0.0);
        assert!(matches!(
            integrate_step(&s, &Vector3::zeros(), &Vector3::zeros(), 2e-3, &vp),
            Err(Error::StepSize { .. })
        ));
    }

    #[test]
    fn servo_rate_limited() {
        let vp = VehicleParams::default();
        let mut s = hover_state(0.0);
        s.surfaces = [SurfaceState { delta: 0.0, delta_cmd: 0.4 }; 2];
        let s = integrate_step(&s, &Vector3::zeros(), &Vector3::zeros(), 1e-3, &vp).unwrap();
        assert_relative_eq!(s.surfaces[0].delta, vp.servo_rate_limit() * 1e-3, epsilon = 1e-15);
    }

    #[test]
    fn contact_holds_and_releases() {
        let rest = rest_height(0.0, 0.12);
        let mut s = hover_state(rest);
        s.velocity = Vector3::new(0.1, 0.0, -0.5);
        let held = ground_contact(&s, rest);
        assert_eq!(held.position.z, rest);
        assert_eq!(held.velocity, Vector3::zeros());
        let airborne = hover_state(1.0);
        assert_eq!(ground_contact(&airborne, rest), airborne);
        assert!(is_grounded(&hover_state(rest), &Vector3::new(0.0, 0.0, -1.0), rest));
        assert!(!is_grounded(&hover_state(rest), &Vector3::new(0.0, 0.0, 1.0), rest));
    }

    #[test]
    fn stance_torque_levels() {
        let vp = VehicleParams::default();
        let mut s = hover_state(0.12);
        s.attitude = frames::attitude_from_euler(0.0, 0.1, 0.4);
        let t = stance_torque(&s, &vp);
        assert!(t.y < 0.0);
        assert!(t.x.abs() < 1e-9 && t.z == 0.0);
    }
}
