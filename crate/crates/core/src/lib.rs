//! Deterministic 6-DOF flight simulation and control allocation for a
//! dual-rotor tail-sitter VTOL aircraft.
//!
//! Two actuation schemes share one airframe model:
//!
//! - **SEA** (swashplateless-elevon actuation): passive swashplateless rotor
//!   hubs produce the pitch moment from a once-per-revolution throttle
//!   sinusoid, and the elevons only carry yaw.
//! - **CEA** (conventional elevon actuation): the elevons carry pitch and
//!   yaw together, so the two axes compete for the same deflection budget.
//!
//! The crate is organized bottom-up: [`vehicle`] parameters and frames,
//! [`propulsion`] (cyclic and cycle-averaged rotor models), [`aero`],
//! [`allocation`] (the mixers), [`control`] (PX4-style cascade),
//! [`dynamics`] (rigid body, ground contact), [`environment`] (fan jets),
//! [`sim`] (the multi-rate scheduler) and [`scenarios`] (scripted flights
//! with error statistics). [`cli`] and [`selftest`] back the `tailsim`
//! binary.

pub mod aero;
pub mod allocation;
pub mod cli;
pub mod config;
pub mod control;
pub mod dynamics;
pub mod environment;
pub mod error;
pub mod propulsion;
pub mod scenarios;
pub mod selftest;
pub mod sim;
pub mod vehicle;

pub use nalgebra;

pub use allocation::{ActuatorCommand, SaturationReport, Variant, Wrench};
pub use config::Config;
pub use error::{Error, Result};
pub use vehicle::VehicleParams;

/// Standard gravity, m/s².
pub const GRAVITY: f64 = 9.81;

/// Tool version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
