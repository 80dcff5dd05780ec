//! Wind fields: none, uniform, or a set of scheduled fan jets.
//!
//! A fan jet is a cylinder about the fan axis. Inside it the speed decays
//! with distance from the fan as `v_ref·(d_ref/max(d, d_ref))^decay_exp` and
//! is feathered to zero over the outer 20 % of the radius with a cosine
//! ramp. Behind the fan plane the jet is zero.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fan spin-up and spin-down time constant, s.
pub const FAN_RAMP_TAU: f64 = 0.3;
/// Fraction of the jet radius over which the speed is feathered to zero.
pub const FEATHER_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fan {
    /// World position of the fan outlet, m.
    pub position: [f64; 3],
    /// Blowing direction, world frame. Normalized on use.
    pub axis: [f64; 3],
    /// Speed at `d_ref` on the axis, m/s.
    pub v_ref: f64,
    /// m
    pub d_ref: f64,
    /// m
    pub jet_radius: f64,
    pub decay_exp: f64,
    /// `[t_on, t_off]` windows in seconds. Empty means always on.
    pub schedule: Vec<[f64; 2]>,
}

impl Default for Fan {
    fn default() -> Self {
        Fan {
            position: [0.0; 3],
            axis: [1.0, 0.0, 0.0],
            v_ref: 4.5,
            d_ref: 1.0,
            jet_radius: 0.4,
            decay_exp: 1.0,
            schedule: Vec::new(),
        }
    }
}

impl Fan {
    pub fn validate(&self) -> Result<()> {
        if !self.position.iter().all(|v| v.is_finite()) {
            return Err(Error::validation("fan.position", "must be finite"));
        }
        let axis = Vector3::from(self.axis);
        if !(axis.iter().all(|v| v.is_finite()) && axis.norm() > 1e-9) {
            return Err(Error::validation("fan.axis", "must be a finite nonzero vector"));
        }
        if !(self.v_ref.is_finite() && self.v_ref >= 0.0) {
            return Err(Error::validation("fan.v_ref", "must be finite and >= 0"));
        }
        if !(self.d_ref.is_finite() && self.d_ref > 0.0) {
            return Err(Error::validation("fan.d_ref", "must be finite and > 0"));
        }
        if !(self.jet_radius.is_finite() && self.jet_radius > 0.0) {
            return Err(Error::validation("fan.jet_radius", "must be finite and > 0"));
        }
        if !(self.decay_exp.is_finite() && self.decay_exp >= 0.0) {
            return Err(Error::validation("fan.decay_exp", "must be finite and >= 0"));
        }
        for w in &self.schedule {
            if !(w[0].is_finite() && w[1].is_finite() && w[0] < w[1]) {
                return Err(Error::validation("fan.schedule", "each window needs t_on < t_off"));
            }
        }
        Ok(())
    }

    pub fn axis_unit(&self) -> Vector3<f64> {
        Vector3::from(self.axis).normalize()
    }

    /// Fan output in [0, 1] at time `t`, including spin-up and spin-down.
    pub fn activity(&self, t: f64) -> f64 {
        if self.schedule.is_empty() {
            return 1.0;
        }
        self.schedule
            .iter()
            .map(|&[on, off]| {
                if t < on {
                    0.0
                } else if t < off {
                    1.0 - (-(t - on) / FAN_RAMP_TAU).exp()
                } else {
                    let at_off = 1.0 - (-(off - on) / FAN_RAMP_TAU).exp();
                    at_off * (-(t - off) / FAN_RAMP_TAU).exp()
                }
            })
            .fold(0.0, f64::max)
    }

    /// Jet velocity at `point` with the fan fully on.
    pub fn jet_at(&self, point: &Vector3<f64>) -> Vector3<f64> {
        let axis = self.axis_unit();
        let rel = point - Vector3::from(self.position);
        let d = rel.dot(&axis);
        if d <= 0.0 {
            return Vector3::zeros();
        }
        let r = (rel - axis * d).norm();
        let edge = self.jet_radius;
        if r >= edge {
            return Vector3::zeros();
        }
        let inner = (1.0 - FEATHER_FRACTION) * edge;
        let feather = if r <= inner {
            1.0
        } else {
            0.5 * (1.0 + (PI * (r - inner) / (edge - inner)).cos())
        };
        let speed = self.v_ref * (self.d_ref / d.max(self.d_ref)).powf(self.decay_exp);
        axis * speed * feather
    }
}

/// Runtime wind model.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum WindField {
    #[default]
    None,
    Uniform(Vector3<f64>),
    Fans(Vec<Fan>),
}

impl WindField {
    pub fn is_calm(&self) -> bool {
        match self {
            WindField::None => true,
            WindField::Uniform(v) => v.norm() == 0.0,
            WindField::Fans(f) => f.iter().all(|f| f.v_ref == 0.0),
        }
    }
}

/// Wind velocity (world frame) at `point` and time `t`.
pub fn wind_at(point: &Vector3<f64>, t: f64, field: &WindField) -> Vector3<f64> {
    match field {
        WindField::None => Vector3::zeros(),
        WindField::Uniform(v) => *v,
        WindField::Fans(fans) => fans
            .iter()
            .map(|f| {
                let a = f.activity(t);
                if a == 0.0 {
                    Vector3::zeros()
                } else {
                    f.jet_at(point) * a
                }
            })
            .sum(),
    }
}

/// Where a run's wind field comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WindSource {
    /// The scenario's own fan layout.
    #[default]
    Scenario,
    None,
    Uniform,
    Fan,
}

/// `[wind]` config section: an optional override of the scenario wind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct WindConfig {
    pub kind: WindSource,
    /// World wind for `kind = "uniform"`, m/s.
    pub uniform: [f64; 3],
    /// Fans for `kind = "fan"`.
    pub fans: Vec<Fan>,
}

impl WindConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.uniform.iter().all(|v| v.is_finite()) {
            return Err(Error::validation("wind.uniform", "must be finite"));
        }
        for f in &self.fans {
            f.validate()?;
        }
        if self.kind == WindSource::Fan && self.fans.is_empty() {
            return Err(Error::validation("wind.fans", "kind = \"fan\" needs at least one fan"));
        }
        Ok(())
    }

    /// The field to fly in, given the scenario's own layout.
    pub fn resolve(&self, scenario_field: WindField) -> WindField {
        match self.kind {
            WindSource::Scenario => scenario_field,
            WindSource::None => WindField::None,
            WindSource::Uniform => WindField::Uniform(Vector3::from(self.uniform)),
            WindSource::Fan => WindField::Fans(self.fans.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fan() -> Fan {
        Fan::default()
    }

    #[test]
    fn on_axis_at_reference_distance() {
        let f = WindField::Fans(vec![fan()]);
        let v = wind_at(&Vector3::new(1.0, 0.0, 0.0), 10.0, &f);
        assert_relative_eq!(v, Vector3::new(4.5, 0.0, 0.0), epsilon = 1e-12);
    }

    #[test]
    fn decay_with_distance() {
        let f = WindField::Fans(vec![fan()]);
        let v = wind_at(&Vector3::new(2.0, 0.0, 0.0), 0.0, &f);
        assert_relative_eq!(v.x, 2.25, epsilon = 1e-12);
        // Inside d_ref the speed is capped at v_ref.
        assert_relative_eq!(wind_at(&Vector3::new(0.3, 0.0, 0.0), 0.0, &f).x, 4.5, epsilon = 1e-12);
    }

    #[test]
    fn off_per_schedule() {
        let f = WindField::Fans(vec![Fan {
            schedule: vec![[2.0, 7.0]],
            ..fan()
        }]);
        let p = Vector3::new(1.0, 0.0, 0.0);
        assert_eq!(wind_at(&p, 1.0, &f), Vector3::zeros());
        assert_relative_eq!(wind_at(&p, 6.9, &f).x, 4.5, epsilon = 1e-6);
        assert!(wind_at(&p, 12.0, &f).x < 1e-6);
        let ramp = wind_at(&p, 2.3, &f).x;
        assert_relative_eq!(ramp, 4.5 * (1.0 - (-1.0f64).exp()), epsilon = 1e-12);
    }

    #[test]
    fn outside_cylinder_and_behind_fan() {
        let f = WindField::Fans(vec![fan()]);
        assert_eq!(wind_at(&Vector3::new(1.0, 0.41, 0.0), 0.0, &f), Vector3::zeros());
        assert_eq!(wind_at(&Vector3::new(-1.0, 0.0, 0.0), 0.0, &f), Vector3::zeros());
        let mid = wind_at(&Vector3::new(1.0, 0.36, 0.0), 0.0, &f).x;
        assert_relative_eq!(mid, 2.25, epsilon = 1e-12);
    }

    #[test]
    fn two_fans_sum() {
        let f = WindField::Fans(vec![
            Fan { position: [0.0, 0.3, 0.0], ..fan() },
            Fan { position: [0.0, -0.3, 0.0], ..fan() },
        ]);
        let v = wind_at(&Vector3::new(1.0, 0.0, 0.0), 0.0, &f);
        assert_relative_eq!(v.x, 9.0, epsilon = 1e-12);
    }

    #[test]
    fn override_resolution() {
        let cfg = WindConfig::default();
        assert_eq!(cfg.resolve(WindField::Uniform(Vector3::x())), WindField::Uniform(Vector3::x()));
        let none = WindConfig { kind: WindSource::None, ..Default::default() };
        assert_eq!(none.resolve(WindField::Uniform(Vector3::x())), WindField::None);
        let bad = WindConfig { kind: WindSource::Fan, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn invalid_fan_rejected() {
        assert!(Fan { d_ref: 0.0, ..fan() }.validate().is_err());
        assert!(Fan { jet_radius: -1.0, ..fan() }.validate().is_err());
        assert!(Fan { schedule: vec![[3.0, 2.0]], ..fan() }.validate().is_err());
    }
}
