//! Elevon and wing aerodynamics.
//!
//! Elevon moments scale with the square of the local flow speed (propeller
//! slipstream plus the airspeed component along the nose) relative to the
//! hover slipstream, and with a ground-effect factor that collapses the
//! elevon authority close to the ground. The wing is a flat plate split into
//! spanwise strips so that a wind field covering only part of the span
//! produces roll and yaw moments.

use std::f64::consts::PI;

use nalgebra::{UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vehicle::VehicleParams;

/// `[aero]` config section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AeroParams {
    pub n_strips: usize,
    /// Zero-lift drag coefficient of the wing.
    pub c_d0: f64,
    /// Elevon effectiveness floor at zero height.
    pub eta_min: f64,
    /// Body-x elevon force per unit elevon pitch moment, 1/m. Defaults to `1/elevon_arm`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_efx: Option<f64>,
    /// Body-z offset of the wing quarter-chord line from the center of mass, m.
    pub wing_z_ac: f64,
}

impl Default for AeroParams {
    fn default() -> Self {
        AeroParams {
            n_strips: 8,
            c_d0: 0.02,
            eta_min: 0.05,
            k_efx: None,
            wing_z_ac: 0.0,
        }
    }
}

impl AeroParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_strips == 0 || !self.n_strips.is_multiple_of(2) {
            return Err(Error::validation("n_strips", "must be a positive even number"));
        }
        if !(self.c_d0.is_finite() && self.c_d0 >= 0.0) {
            return Err(Error::validation("c_d0", "must be finite and >= 0"));
        }
        if !(self.eta_min > 0.0 && self.eta_min <= 1.0) {
            return Err(Error::validation("eta_min", "must lie in (0, 1]"));
        }
        if let Some(k) = self.k_efx {
            if !(k.is_finite() && k >= 0.0) {
                return Err(Error::validation("k_efx", "must be finite and >= 0"));
            }
        }
        if !self.wing_z_ac.is_finite() {
            return Err(Error::validation("wing_z_ac", "must be finite"));
        }
        Ok(())
    }

    pub fn k_efx(&self, vehicle: &VehicleParams) -> f64 {
        self.k_efx.unwrap_or(1.0 / vehicle.elevon_arm)
    }
}

/// Force and torque on the body, both in body axes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyWrench {
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

impl BodyWrench {
    pub fn zero() -> Self {
        Self::default()
    }
}

impl std::ops::Add for BodyWrench {
    type Output = BodyWrench;
    fn add(self, rhs: BodyWrench) -> BodyWrench {
        BodyWrench {
            force: self.force + rhs.force,
            torque: self.torque + rhs.torque,
        }
    }
}

impl std::ops::Neg for BodyWrench {
    type Output = BodyWrench;
    fn neg(self) -> BodyWrench {
        BodyWrench {
            force: -self.force,
            torque: -self.torque,
        }
    }
}

/// Deflection state of one elevon.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SurfaceState {
    /// Actual deflection after servo dynamics, rad.
    pub delta: f64,
    /// Commanded deflection, rad.
    pub delta_cmd: f64,
}

/// Slipstream speed behind a rotor from momentum theory.
pub fn propwash_speed(rotor_thrust: f64, vehicle: &VehicleParams) -> f64 {
    (rotor_thrust.max(0.0) / (2.0 * vehicle.air_density * vehicle.rotor_disk_area)).sqrt()
}

/// Slipstream speed at the hover operating point (half the weight per rotor).
pub fn hover_propwash(vehicle: &VehicleParams) -> f64 {
    propwash_speed(0.5 * vehicle.weight(), vehicle)
}

/// Elevon effectiveness multiplier in [eta_min, 1].
pub fn ground_effect_factor(height: f64, vehicle: &VehicleParams, aero: &AeroParams) -> f64 {
    let frac = (height.max(0.0) / vehicle.ground_effect_height).min(1.0);
    aero.eta_min + (1.0 - aero.eta_min) * frac
}

/// Elevon wrench.
///
/// Common-mode deflection gives yaw (`k_elevon`); differential deflection
/// gives pitch (`k_ep`) together with the body-x force that accompanies it.
/// `local_flow` is the flow speed over each elevon and `eta` the
/// ground-effect factor.
pub fn elevon_wrench(
    surfaces: &[SurfaceState; 2],
    local_flow: [f64; 2],
    eta: f64,
    k_ep: f64,
    vehicle: &VehicleParams,
    aero: &AeroParams,
) -> BodyWrench {
    let v_ref = hover_propwash(vehicle);
    let mut yaw = 0.0;
    let mut pitch = 0.0;
    for (j, s) in surfaces.iter().enumerate() {
        let eff = (local_flow[j] / v_ref).powi(2) * eta;
        let sign = if j == 0 { 1.0 } else { -1.0 };
        yaw += vehicle.k_elevon * s.delta * eff;
        pitch += sign * k_ep * s.delta * eff;
    }
    BodyWrench {
        force: Vector3::new(aero.k_efx(vehicle) * pitch, 0.0, 0.0),
        torque: Vector3::new(0.0, pitch, yaw),
    }
}

/// Body-frame centers of the wing strips, ordered from −y to +y.
pub fn strip_centers(vehicle: &VehicleParams, aero: &AeroParams) -> Vec<Vector3<f64>> {
    let n = aero.n_strips;
    let width = vehicle.wing_span / n as f64;
    (0..n)
        .map(|i| {
            let y = -0.5 * vehicle.wing_span + (i as f64 + 0.5) * width;
            Vector3::new(0.0, y, aero.wing_z_ac)
        })
        .collect()
}

/// Flat-plate force on one strip.
///
/// `v_rel` is the strip velocity relative to the air, body axes. The plate
/// lies in the body y-z plane; the spanwise component is ignored. With the
/// angle of attack α measured from the chord (nose direction, −z), lift is
/// `2 sin α cos α` and drag `2 sin² α + c_d0`; together they form a force
/// normal to the plate plus the zero-lift drag.
pub fn strip_force(v_rel: &Vector3<f64>, area: f64, rho: f64, c_d0: f64) -> Vector3<f64> {
    let normal = v_rel.x;
    let chord = -v_rel.z;
    let speed2 = normal * normal + chord * chord;
    if speed2 < 1e-18 {
        return Vector3::zeros();
    }
    let speed = speed2.sqrt();
    let (sin_a, cos_a) = (normal / speed, chord / speed);
    let q = 0.5 * rho * speed2 * area;
    let x_hat = Vector3::x();
    let fwd = -Vector3::z();
    let drag_dir = -(sin_a * x_hat + cos_a * fwd);
    let lift_dir = -cos_a * x_hat + sin_a * fwd;
    let c_l = 2.0 * sin_a * cos_a;
    let c_d = 2.0 * sin_a * sin_a + c_d0;
    q * (c_l * lift_dir + c_d * drag_dir)
}

/// Aft shift of a strip's center of pressure from its quarter chord, m.
///
/// The center of pressure of a flat plate sits at the quarter chord at zero
/// angle of attack and moves to mid-chord broadside. With α folded into
/// [0, π] the shift is `chord·α/(2π)`, which returns to the trailing-edge
/// quarter chord in reversed flow.
pub fn center_of_pressure_shift(v_rel: &Vector3<f64>, chord: f64) -> f64 {
    let alpha = v_rel.x.abs().atan2(-v_rel.z);
    chord * alpha / (2.0 * PI)
}

/// Wing wrench from the strip model.
///
/// `velocity` is the world-frame velocity of the center of mass, `omega` the
/// body rate and `strip_wind` the world-frame wind at each strip center.
pub fn wing_wrench(
    velocity: &Vector3<f64>,
    omega: &Vector3<f64>,
    attitude: &UnitQuaternion<f64>,
    strip_wind: &[Vector3<f64>],
    vehicle: &VehicleParams,
    aero: &AeroParams,
) -> BodyWrench {
    let centers = strip_centers(vehicle, aero);
    debug_assert_eq!(centers.len(), strip_wind.len());
    let area = vehicle.wing_area / aero.n_strips as f64;
    let chord = vehicle.wing_area / vehicle.wing_span;
    let mut out = BodyWrench::zero();
    for (r, wind) in centers.iter().zip(strip_wind) {
        let v_rel = attitude.inverse_transform_vector(&(velocity - wind)) + omega.cross(r);
        let f = strip_force(&v_rel, area, vehicle.air_density, aero.c_d0);
        let cp = r + Vector3::new(0.0, 0.0, center_of_pressure_shift(&v_rel, chord));
        out.force += f;
        out.torque += cp.cross(&f);
    }
    out
}
