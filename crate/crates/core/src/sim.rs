//! Multi-rate simulation loop.
//!
//! One call to [`Simulation::tick`] is one 1 kHz control tick: the cascade
//! runs, the mixer produces actuator commands, servo commands are latched at
//! 50 Hz, and the plant is advanced by one or more physics sub-steps (one in
//! averaged fidelity, several in cyclic fidelity).

use nalgebra::{UnitQuaternion, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::allocation::{mix, ActuatorCommand, SaturationDuty, SaturationReport, Variant, Wrench};
use crate::config::{Airframe, Config};
use crate::control::{Controller, Measurement, Setpoint, CONTROL_RATE_HZ};
use crate::dynamics::{
    ground_contact, integrate_step, is_grounded, stance_torque, total_wrench, Environment, Loads, RotorModel, SimState,
    MAX_DT,
};
use crate::environment::WindField;
use crate::error::{Error, Result};
use crate::propulsion::{advance_rotor, max_cyclic_dt, Encoder};

/// Servo command update rate, Hz.
pub const SERVO_RATE_HZ: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Fidelity {
    #[default]
    Averaged,
    Cyclic,
}

impl Fidelity {
    pub fn name(self) -> &'static str {
        match self {
            Fidelity::Averaged => "averaged",
            Fidelity::Cyclic => "cyclic",
        }
    }
}

impl std::str::FromStr for Fidelity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "averaged" => Ok(Fidelity::Averaged),
            "cyclic" => Ok(Fidelity::Cyclic),
            other => Err(Error::Config(format!("unknown fidelity `{other}` (expected averaged or cyclic)"))),
        }
    }
}

/// `[sim]` config section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    /// Physics step in averaged fidelity, s.
    pub dt_s: f64,
    /// Physics step in cyclic fidelity, s.
    pub cyclic_dt_s: f64,
    pub fidelity: Fidelity,
    pub variant: Variant,
    pub seed: u64,
    /// Overrides the scenario's own duration, s.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    /// Center-of-mass height above the contact surface at rest, m.
    pub gear_height: f64,
    /// Constant body pitch moment from the trim imbalance, N·m.
    pub trim_tau_y: f64,
    /// Trace output rate, Hz.
    pub trace_rate_hz: f64,
    /// Sensor noise standard deviations (zero disables noise).
    pub position_noise_m: f64,
    pub velocity_noise_m_s: f64,
    pub attitude_noise_rad: f64,
    pub gyro_noise_rad_s: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            dt_s: 1.0e-3,
            cyclic_dt_s: 1.0e-4,
            fidelity: Fidelity::Averaged,
            variant: Variant::Sea,
            seed: 0,
            duration_s: None,
            gear_height: 0.12,
            trim_tau_y: 0.15,
            trace_rate_hz: 100.0,
            position_noise_m: 0.0,
            velocity_noise_m_s: 0.0,
            attitude_noise_rad: 0.0,
            gyro_noise_rad_s: 0.0,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("dt_s", self.dt_s),
            ("cyclic_dt_s", self.cyclic_dt_s),
            ("gear_height", self.gear_height),
            ("trace_rate_hz", self.trace_rate_hz),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if let Some(d) = self.duration_s {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::validation("duration_s", "must be finite and > 0"));
            }
        }
        if !self.trim_tau_y.is_finite() {
            return Err(Error::validation("trim_tau_y", "must be finite"));
        }
        for (name, v) in [
            ("position_noise_m", self.position_noise_m),
            ("velocity_noise_m_s", self.velocity_noise_m_s),
            ("attitude_noise_rad", self.attitude_noise_rad),
            ("gyro_noise_rad_s", self.gyro_noise_rad_s),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::validation(name, "must be finite and >= 0"));
            }
        }
        if self.trace_rate_hz > CONTROL_RATE_HZ {
            return Err(Error::validation("trace_rate_hz", "must not exceed the 1000 Hz control rate"));
        }
        Ok(())
    }

    pub fn physics_dt(&self) -> f64 {
        match self.fidelity {
            Fidelity::Averaged => self.dt_s,
            Fidelity::Cyclic => self.cyclic_dt_s,
        }
    }
}

/// Everything needed to start a simulation.
#[derive(Debug, Clone)]
pub struct SimSetup {
    pub airframe: Airframe,
    pub controller: Controller,
    pub params: SimParams,
    pub variant: Variant,
    pub wind: WindField,
    pub ground_effect: bool,
    pub wing: bool,
    /// Height of the surface the gear rests on, m.
    pub contact_height: f64,
    pub initial: SimState,
}

impl SimSetup {
    /// Setup from a config with the vehicle resting in hover attitude at
    /// `position`, motors at hover throttle.
    pub fn from_config(cfg: &Config, position: Vector3<f64>, yaw: f64, wind: WindField) -> Self {
        let airframe = cfg.airframe();
        let c = airframe.vehicle.weight() / airframe.vehicle.max_thrust();
        SimSetup {
            initial: SimState::at_rest(position, yaw, c, &airframe),
            airframe,
            controller: Controller::new(cfg.control.clone()),
            params: cfg.sim.clone(),
            variant: cfg.sim.variant,
            wind,
            ground_effect: true,
            wing: true,
            contact_height: 0.0,
        }
    }
}

/// What happened during one control tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickInfo {
    pub desired: Wrench,
    pub command: ActuatorCommand,
    pub saturation: SaturationReport,
    /// Loads at the first physics sub-step of the tick.
    pub loads: Loads,
    pub grounded: bool,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    airframe: Airframe,
    controller: Controller,
    params: SimParams,
    variant: Variant,
    wind: WindField,
    ground_effect: bool,
    wing: bool,
    rest_z: f64,
    state: SimState,
    encoders: [Encoder; 2],
    command: ActuatorCommand,
    saturation: SaturationReport,
    duty: SaturationDuty,
    substeps: usize,
    dt: f64,
    tick: u64,
    rng: ChaCha8Rng,
}

impl Simulation {
    pub fn new(setup: SimSetup) -> Result<Self> {
        setup.params.validate()?;
        let dt = setup.params.physics_dt();
        let limit = match setup.params.fidelity {
            Fidelity::Averaged => MAX_DT,
            Fidelity::Cyclic => max_cyclic_dt(&setup.airframe.propulsion),
        };
        if dt > limit + 1e-15 {
            return Err(Error::StepSize { dt, limit });
        }
        let control_dt = 1.0 / CONTROL_RATE_HZ;
        let substeps = (control_dt / dt).round() as usize;
        if substeps == 0 || (substeps as f64 * dt - control_dt).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "physics step {dt} s must divide the {control_dt} s control period"
            )));
        }
        let rest_z = setup.contact_height + setup.params.gear_height;
        let mut state = setup.initial;
        if state.position.z < rest_z {
            state.position.z = rest_z;
        }
        let rate = setup.airframe.propulsion.encoder_rate_hz;
        let c = state.rotors.map(|r| r.thrust_actual / setup.airframe.vehicle.k_thrust);
        Ok(Simulation {
            command: ActuatorCommand {
                cyclic: [
                    crate::propulsion::CyclicCommand::new(c[0], 0.0, 0.0),
                    crate::propulsion::CyclicCommand::new(c[1], 0.0, 0.0),
                ],
                servo: [0.0; 2],
            },
            airframe: setup.airframe,
            controller: setup.controller,
            rng: ChaCha8Rng::seed_from_u64(setup.params.seed),
            params: setup.params,
            variant: setup.variant,
            wind: setup.wind,
            ground_effect: setup.ground_effect,
            wing: setup.wing,
            rest_z,
            state,
            encoders: [Encoder::new(rate), Encoder::new(rate)],
            saturation: SaturationReport::default(),
            duty: SaturationDuty::default(),
            substeps,
            dt,
            tick: 0,
        })
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    pub fn tick_count(&self) -> u64 {
        self.tick
    }

    pub fn duty(&self) -> &SaturationDuty {
        &self.duty
    }

    pub fn controller(&self) -> &Controller {
        &self.controller
    }

    pub fn airframe(&self) -> &Airframe {
        &self.airframe
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn wind(&self) -> &WindField {
        &self.wind
    }

    pub fn rest_height(&self) -> f64 {
        self.rest_z
    }

    fn environment(&self) -> Environment<'_> {
        Environment {
            wind: &self.wind,
            ground_effect: self.ground_effect,
            wing: self.wing,
            trim_tau_y: self.params.trim_tau_y,
            floor: 0.0,
        }
    }

    fn gaussian(&mut self, std: f64) -> Vector3<f64> {
        if std == 0.0 {
            return Vector3::zeros();
        }
        let n = Normal::new(0.0, std).expect("std validated finite and >= 0");
        Vector3::new(n.sample(&mut self.rng), n.sample(&mut self.rng), n.sample(&mut self.rng))
    }

    fn measure(&mut self) -> Measurement {
        let s = self.state;
        let p = self.params.clone();
        Measurement {
            position: s.position + self.gaussian(p.position_noise_m),
            velocity: s.velocity + self.gaussian(p.velocity_noise_m_s),
            attitude: s.attitude * UnitQuaternion::from_scaled_axis(self.gaussian(p.attitude_noise_rad)),
            omega: s.omega + self.gaussian(p.gyro_noise_rad_s),
        }
    }

    fn fault(&self, reason: impl Into<String>) -> Error {
        Error::SimulationFault {
            tick: self.tick,
            reason: reason.into(),
        }
    }

    /// Advance one control tick (1 ms).
    pub fn tick(&mut self, setpoint: &Setpoint) -> Result<TickInfo> {
        let meas = self.measure();
        let vp = self.airframe.vehicle.clone();
        let desired = self
            .controller
            .step(&meas, setpoint, &self.saturation.axes, &vp)
            .map_err(|e| match e {
                Error::DegenerateThrust(f) if !f.is_finite() => self.fault("non-finite thrust vector"),
                other => self.fault(other.to_string()),
            })?;
        if !desired.is_finite() {
            return Err(self.fault("non-finite wrench demand"));
        }
        let (command, saturation) = mix(self.variant, &desired, &vp, &self.airframe.allocation);
        self.command = command;
        self.saturation = saturation;
        self.duty.record(&saturation.flags);

        let servo_every = (CONTROL_RATE_HZ / SERVO_RATE_HZ).round() as u64;
        if self.tick.is_multiple_of(servo_every) {
            for j in 0..2 {
                self.state.surfaces[j].delta_cmd = command.servo[j];
            }
        }

        let mut first: Option<(Loads, bool)> = None;
        for _ in 0..self.substeps {
            let model = match self.params.fidelity {
                Fidelity::Averaged => RotorModel::Averaged,
                Fidelity::Cyclic => {
                    let t = self.state.time;
                    for (enc, rotor) in self.encoders.iter_mut().zip(&self.state.rotors) {
                        enc.update(t, rotor);
                    }
                    RotorModel::Cyclic {
                        theta_meas: [self.encoders[0].estimate(t), self.encoders[1].estimate(t)],
                    }
                }
            };
            let loads = total_wrench(&self.state, &self.command, &self.environment(), model, &self.airframe);
            let grounded = is_grounded(&self.state, &loads.force_world, self.rest_z);
            let (force, torque) = if grounded {
                (Vector3::zeros(), loads.torque_body + stance_torque(&self.state, &vp))
            } else {
                (loads.force_world, loads.torque_body)
            };
            let mut next = integrate_step(&self.state, &force, &torque, self.dt, &vp)?;
            for i in 0..2 {
                next.rotors[i] = advance_rotor(&self.state.rotors[i], loads.throttle[i], self.dt, &vp, &self.airframe.propulsion);
            }
            let next = ground_contact(&next, self.rest_z);
            if !next.is_finite() {
                return Err(self.fault("non-finite state"));
            }
            self.state = next;
            first.get_or_insert((loads, grounded));
        }
        self.tick += 1;
        let (loads, grounded) = first.expect("at least one sub-step");
        Ok(TickInfo {
            desired,
            command,
            saturation,
            loads,
            grounded,
        })
    }
}
