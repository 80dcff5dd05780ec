//! Structured run configuration.
//!
//! The format is TOML with one table per subsystem. Every key has a default,
//! so an empty document is a complete configuration; unknown keys are
//! rejected so that typos surface instead of silently falling back.

use serde::{Deserialize, Serialize};

use crate::aero::AeroParams;
use crate::allocation::AllocationParams;
use crate::control::ControlGains;
use crate::environment::WindConfig;
use crate::error::{Error, Result};
use crate::propulsion::PropulsionParams;
use crate::scenarios::ScenarioParams;
use crate::sim::SimParams;
use crate::vehicle::VehicleParams;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub vehicle: VehicleParams,
    pub propulsion: PropulsionParams,
    pub aero: AeroParams,
    pub allocation: AllocationParams,
    pub control: ControlGains,
    pub sim: SimParams,
    pub scenario: ScenarioParams,
    pub wind: WindConfig,
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Config> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.vehicle.validate()?;
        self.propulsion.validate(&self.vehicle)?;
        self.aero.validate()?;
        self.allocation.validate()?;
        self.control.validate()?;
        self.sim.validate()?;
        self.scenario.validate()?;
        self.wind.validate()?;
        Ok(())
    }

    /// Fully resolved configuration as TOML.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    pub fn airframe(&self) -> Airframe {
        Airframe {
            vehicle: self.vehicle.clone(),
            propulsion: self.propulsion.clone(),
            aero: self.aero.clone(),
            allocation: self.allocation.clone(),
        }
    }
}

/// The physical model: everything the plant and mixers need.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Airframe {
    pub vehicle: VehicleParams,
    pub propulsion: PropulsionParams,
    pub aero: AeroParams,
    pub allocation: AllocationParams,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_default() {
        assert_eq!(Config::from_toml_str("").unwrap(), Config::default());
    }

    #[test]
    fn resolved_defaults_round_trip() {
        let cfg = Config::default();
        let text = cfg.to_toml_string();
        assert_eq!(Config::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_section_rejected() {
        assert!(matches!(Config::from_toml_str("[vehicel]\nmass = 2.0\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn unknown_key_in_any_section_rejected() {
        for text in [
            "[control]\nrate_p_q = 1.0\n",
            "[sim]\ndt = 0.001\n",
            "[aero]\nnstrips = 8\n",
        ] {
            assert!(matches!(Config::from_toml_str(text), Err(Error::Parse(_))), "{text}");
        }
    }
}
