//! Airframe parameters, frame conventions and hover trim.
//!
//! All defaults describe a 2.25 kg, 1.07 m span dual-rotor tail-sitter with a
//! thrust-to-weight ratio of 2.5. Inertia, the swashplateless gain
//! `k_swash`, the elevon gain `k_elevon` and the elevon geometry are
//! **unvalidated defaults**: they give realistic hover authority but were not
//! measured on hardware. Comparisons between actuation variants always run on
//! identical values, so conclusions drawn from them are orderings rather
//! than absolute magnitudes.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::GRAVITY;

/// Thrust-to-weight ratio the default `k_thrust` is derived from.
pub const THRUST_WEIGHT_RATIO: f64 = 2.5;

/// Physical parameters of the airframe (`[vehicle]` config section).
///
/// Field names match config keys. Angles that are entered in degrees keep
/// their degree representation here so that a serialize/parse round trip is
/// exact; use the accessor methods for SI values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleParams {
    /// kg
    pub mass: f64,
    /// kg·m², body x (roll)
    pub inertia_xx: f64,
    /// kg·m², body y (pitch)
    pub inertia_yy: f64,
    /// kg·m², body z (yaw)
    pub inertia_zz: f64,
    /// Body-y distance from the center of mass to each motor, m.
    pub arm_l: f64,
    /// Thrust per unit throttle, N.
    pub k_thrust: f64,
    /// Swashplateless moment per unit sinusoid amplitude, N·m.
    pub k_swash: f64,
    /// Elevon moment per radian of servo angle at hover propwash, N·m/rad.
    pub k_elevon: f64,
    /// Phase compensation applied to the throttle sinusoid, rad.
    pub gamma0: f64,
    pub servo_limit_deg: f64,
    pub servo_rate_deg_s: f64,
    /// Throttle to thrust first-order lag, s.
    pub motor_tau_s: f64,
    /// m²
    pub wing_area: f64,
    /// m
    pub wing_span: f64,
    /// m²
    pub elevon_area: f64,
    /// Body-z distance from the center of mass to the elevon center of pressure, m.
    pub elevon_arm: f64,
    /// m², per rotor
    pub rotor_disk_area: f64,
    /// Height above which elevons are free of ground effect, m.
    pub ground_effect_height: f64,
    /// kg/m³
    pub air_density: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        let mass = 2.25;
        VehicleParams {
            mass,
            inertia_xx: 0.055,
            inertia_yy: 0.020,
            inertia_zz: 0.065,
            arm_l: 0.25,
            k_thrust: THRUST_WEIGHT_RATIO * mass * GRAVITY / 2.0,
            k_swash: 0.9,
            k_elevon: 1.2,
            gamma0: 0.35,
            servo_limit_deg: 25.0,
            servo_rate_deg_s: 600.0,
            motor_tau_s: 0.005,
            wing_area: 0.25,
            wing_span: 1.07,
            elevon_area: 0.03,
            elevon_arm: 0.15,
            rotor_disk_area: 0.049,
            ground_effect_height: 0.35,
            air_density: 1.225,
        }
    }
}

impl VehicleParams {
    pub fn inertia(&self) -> Vector3<f64> {
        Vector3::new(self.inertia_xx, self.inertia_yy, self.inertia_zz)
    }

    /// Servo deflection limit, rad.
    pub fn servo_limit(&self) -> f64 {
        self.servo_limit_deg.to_radians()
    }

    /// Servo slew limit, rad/s.
    pub fn servo_rate_limit(&self) -> f64 {
        self.servo_rate_deg_s.to_radians()
    }

    pub fn weight(&self) -> f64 {
        self.mass * GRAVITY
    }

    /// Maximum collective thrust with both motors at full throttle, N.
    pub fn max_thrust(&self) -> f64 {
        2.0 * self.k_thrust
    }

    /// Check every invariant; the error names the first offending key.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("inertia_xx", self.inertia_xx),
            ("inertia_yy", self.inertia_yy),
            ("inertia_zz", self.inertia_zz),
            ("arm_l", self.arm_l),
            ("k_thrust", self.k_thrust),
            ("k_swash", self.k_swash),
            ("k_elevon", self.k_elevon),
            ("servo_limit_deg", self.servo_limit_deg),
            ("servo_rate_deg_s", self.servo_rate_deg_s),
            ("motor_tau_s", self.motor_tau_s),
            ("wing_area", self.wing_area),
            ("wing_span", self.wing_span),
            ("elevon_area", self.elevon_area),
            ("elevon_arm", self.elevon_arm),
            ("rotor_disk_area", self.rotor_disk_area),
            ("ground_effect_height", self.ground_effect_height),
            ("air_density", self.air_density),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::validation(name, format!("must be finite and > 0, got {value}")));
            }
        }
        if !(self.gamma0.is_finite()
            && self.gamma0 > -std::f64::consts::PI
            && self.gamma0 <= std::f64::consts::PI)
        {
            return Err(Error::validation("gamma0", "must lie in (-pi, pi]"));
        }
        if self.servo_limit_deg >= 90.0 {
            return Err(Error::validation("servo_limit_deg", "must be below 90 deg"));
        }
        if self.max_thrust() < self.weight() {
            return Err(Error::validation(
                "k_thrust",
                format!(
                    "2*k_thrust = {:.3} N cannot lift mass*g = {:.3} N",
                    self.max_thrust(),
                    self.weight()
                ),
            ));
        }
        Ok(())
    }

    /// Serialize as a `[vehicle]` config section.
    pub fn to_config_string(&self) -> String {
        #[derive(Serialize)]
        struct Section<'a> {
            vehicle: &'a VehicleParams,
        }
        toml::to_string(&Section { vehicle: self }).expect("vehicle params always serialize")
    }
}

/// Parse a config document and return its validated vehicle parameters.
///
/// The whole document is checked, so a typo in any section is reported.
pub fn load_params(config_text: &str) -> Result<VehicleParams> {
    Ok(crate::config::Config::from_toml_str(config_text)?.vehicle)
}

/// Collective thrust and per-motor throttle that hold a level hover.
pub fn hover_setpoint(params: &VehicleParams) -> Result<(f64, f64)> {
    let thrust = params.weight();
    let throttle = thrust / params.max_thrust();
    if throttle.is_nan() || throttle >= 1.0 {
        return Err(Error::Infeasible(format!(
            "hover needs throttle {throttle:.4} per motor"
        )));
    }
    Ok((thrust, throttle))
}

/// Frame conventions.
///
/// Body axes: x perpendicular to the main-wing plane, y along the wing, z
/// toward the tail. Thrust acts along body −z (toward the nose). Roll, pitch
/// and yaw are rotations about body x, y and z. In hover the body frame is a
/// forward-right-down frame.
///
/// World frame: East-North-Up, gravity along −z.
///
/// Euler angles are z-y-x (yaw, pitch, roll) angles of the body relative to
/// the east-south-down frame, which is ENU flipped about its x axis. Level
/// hover is therefore roll = pitch = yaw = 0 with the belly (body +x) facing
/// east, and yaw = −heading where heading is the ENU angle of body x
/// measured counter-clockwise from east.
pub mod frames {
    use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector3};
    use std::f64::consts::PI;

    /// Unit thrust direction in the body frame.
    pub fn thrust_axis() -> Vector3<f64> {
        -Vector3::z()
    }

    /// ENU → east-south-down flip (a rotation by π about x).
    pub fn flip() -> UnitQuaternion<f64> {
        UnitQuaternion::from_axis_angle(&Vector3::x_axis(), PI)
    }

    pub fn attitude_from_euler(roll: f64, pitch: f64, yaw: f64) -> UnitQuaternion<f64> {
        flip() * UnitQuaternion::from_euler_angles(roll, pitch, yaw)
    }

    /// (roll, pitch, yaw), rad.
    pub fn euler_from_attitude(q: &UnitQuaternion<f64>) -> (f64, f64, f64) {
        (flip().inverse() * q).euler_angles()
    }

    pub fn hover_attitude(yaw: f64) -> UnitQuaternion<f64> {
        attitude_from_euler(0.0, 0.0, yaw)
    }

    /// Yaw angle that points body x along an ENU heading.
    pub fn yaw_from_heading(heading: f64) -> f64 {
        wrap_angle(-heading)
    }

    /// Attitude from a body→world rotation matrix with orthonormal columns.
    pub fn attitude_from_axes(x: Vector3<f64>, y: Vector3<f64>, z: Vector3<f64>) -> UnitQuaternion<f64> {
        let m = Matrix3::from_columns(&[x, y, z]);
        UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(m))
    }

    /// Wrap to (−π, π].
    pub fn wrap_angle(a: f64) -> f64 {
        let mut w = a.rem_euclid(2.0 * PI);
        if w > PI {
            w -= 2.0 * PI;
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn defaults_are_valid() {
        let p = VehicleParams::default();
        p.validate().unwrap();
        assert_eq!(p.mass, 2.25);
        assert_eq!(p.wing_span, 1.07);
    }

    #[test]
    fn default_thrust_gain_from_thrust_weight_ratio() {
        // 2.5 * 2.25 * 9.81 / 2
        assert_relative_eq!(VehicleParams::default().k_thrust, 27.590625, epsilon = 1e-12);
        assert!((VehicleParams::default().k_thrust - 27.59).abs() < 0.005);
    }

    #[test]
    fn hover_trim_defaults() {
        let (thrust, throttle) = hover_setpoint(&VehicleParams::default()).unwrap();
        assert_relative_eq!(thrust, 22.0725, epsilon = 1e-12);
        assert_relative_eq!(throttle, 0.4, epsilon = 1e-12);
    }

    #[test]
    fn hover_trim_tiny_mass() {
        let p = VehicleParams { mass: 1e-9, ..Default::default() };
        let (_, throttle) = hover_setpoint(&p).unwrap();
        assert!(throttle < 1e-9);
    }

    #[test]
    fn hover_trim_infeasible() {
        let p = VehicleParams { k_thrust: 11.0, ..Default::default() };
        assert!(matches!(hover_setpoint(&p), Err(Error::Infeasible(_))));
    }

    #[test]
    fn negative_mass_names_field() {
        let err = load_params("[vehicle]\nmass = -1.0\n").unwrap_err();
        match err {
            Error::Validation { field, .. } => assert_eq!(field, "mass"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_config_gives_defaults() {
        assert_eq!(load_params("").unwrap(), VehicleParams::default());
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(matches!(load_params("[vehicle]\nmas = 2.0\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn malformed_text_rejected() {
        assert!(matches!(load_params("[vehicle\nmass = "), Err(Error::Parse(_))));
    }

    #[test]
    fn gamma0_range() {
        let p = VehicleParams { gamma0: -PI, ..Default::default() };
        assert!(p.validate().is_err());
        let p = VehicleParams { gamma0: PI, ..Default::default() };
        assert!(p.validate().is_ok());
    }

    #[test]
    fn hover_attitude_points_thrust_up() {
        for yaw in [0.0, 0.7, -2.0] {
            let q = frames::hover_attitude(yaw);
            let up = q * frames::thrust_axis();
            assert_relative_eq!(up, Vector3::z(), epsilon = 1e-12);
        }
    }

    #[test]
    fn euler_round_trip_and_heading() {
        let q = frames::attitude_from_euler(0.1, -0.3, 1.2);
        let (r, p, y) = frames::euler_from_attitude(&q);
        assert_relative_eq!(r, 0.1, epsilon = 1e-12);
        assert_relative_eq!(p, -0.3, epsilon = 1e-12);
        assert_relative_eq!(y, 1.2, epsilon = 1e-12);

        // Body x follows heading = -yaw in ENU.
        let q = frames::hover_attitude(frames::yaw_from_heading(0.5));
        let bx = q * Vector3::x();
        assert_relative_eq!(bx, Vector3::new(0.5f64.cos(), 0.5f64.sin(), 0.0), epsilon = 1e-12);
    }

    #[test]
    fn negative_pitch_tilts_nose_toward_belly_direction() {
        let q = frames::attitude_from_euler(0.0, (-65.0f64).to_radians(), 0.0);
        let nose = q * frames::thrust_axis();
        assert!(nose.x > 0.9 && nose.z > 0.4);
    }

    #[test]
    fn wrap() {
        assert_relative_eq!(frames::wrap_angle(359f64.to_radians()), -1f64.to_radians(), epsilon = 1e-12);
        assert_relative_eq!(frames::wrap_angle(-PI), PI, epsilon = 1e-12);
    }
}
