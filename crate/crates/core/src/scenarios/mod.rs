//! Scripted flights and their reports.
//!
//! Every runner takes the variant from its argument, not from the config, so
//! a paired comparison differs in exactly that one value.

pub mod metrics;
pub mod trace;

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::allocation::{SaturationDuty, Variant};
use crate::config::Config;
use crate::control::{Controller, Setpoint};
use crate::dynamics::SimState;
use crate::environment::{Fan, WindField};
use crate::error::{Error, Result};
use crate::sim::{Fidelity, SimSetup, Simulation};
use crate::vehicle::frames;
use crate::GRAVITY;

pub use metrics::{compute_metrics, Channel, ErrorStats};
pub use trace::TraceRow;

/// Horizontal speed below which the figure-of-eight yaw reference is held, m/s.
pub const YAW_HOLD_SPEED: f64 = 0.2;
/// Figure-of-eight cycle periods, s.
pub const FIG8_PERIODS: [f64; 4] = [7.5, 5.0, 5.0, 7.5];
/// Target pitch of the transition, rad.
pub const TRANSITION_PITCH_DEG: f64 = -65.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    Takeoff,
    #[default]
    Fig8,
    HoverGust,
    Step,
    Transition,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 5] = [
        ScenarioName::Takeoff,
        ScenarioName::Fig8,
        ScenarioName::HoverGust,
        ScenarioName::Step,
        ScenarioName::Transition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioName::Takeoff => "takeoff",
            ScenarioName::Fig8 => "fig8",
            ScenarioName::HoverGust => "hover_gust",
            ScenarioName::Step => "step",
            ScenarioName::Transition => "transition",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ScenarioName::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = ScenarioName::ALL.iter().map(|n| n.name()).collect();
                Error::Config(format!("unknown scenario `{s}` (known: {})", known.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Platform {
    #[default]
    Ground,
    Pedestal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ControlMode {
    #[default]
    Attitude,
    Position,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StepAxis {
    #[default]
    X,
    Y,
}

/// `[scenario]` config section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    pub name: ScenarioName,
    /// Take-off surface.
    pub platform: Platform,
    /// Take-off control mode.
    pub control: ControlMode,
    /// Step direction relative to the fan axis.
    pub axis: StepAxis,
    pub pedestal_height_m: f64,
    /// Elevon ground effect on or off.
    pub ground_effect: bool,
    /// Wing aerodynamics on or off.
    pub wing_model: bool,
    /// Fans on or off in the gust and step scenarios.
    pub wind_enabled: bool,
    /// Fan speed at the hover point, m/s.
    pub wind_v_ref: f64,
    /// Fan outlet to hover point distance, m.
    pub fan_distance_m: f64,
    /// Jet radius of each of the two balanced fans, m.
    pub jet_radius_m: f64,
    /// Jet radius of the single half-span fan, m.
    pub half_span_radius_m: f64,
    pub decay_exp: f64,
    /// Height of hover-start scenarios, m.
    pub hover_height_m: f64,
    /// Unrecorded hover before t = 0 in hover-start scenarios, s.
    pub settle_s: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            name: ScenarioName::Fig8,
            platform: Platform::Ground,
            control: ControlMode::Attitude,
            axis: StepAxis::X,
            pedestal_height_m: 1.0,
            ground_effect: true,
            wing_model: true,
            wind_enabled: true,
            wind_v_ref: 4.5,
            fan_distance_m: 1.0,
            jet_radius_m: 0.27,
            half_span_radius_m: 0.4,
            decay_exp: 1.0,
            hover_height_m: 1.5,
            settle_s: 3.0,
        }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("pedestal_height_m", self.pedestal_height_m),
            ("fan_distance_m", self.fan_distance_m),
            ("jet_radius_m", self.jet_radius_m),
            ("half_span_radius_m", self.half_span_radius_m),
            ("hover_height_m", self.hover_height_m),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(name, format!("must be finite and > 0, got {v}")));
            }
        }
        for (name, v) in [
            ("wind_v_ref", self.wind_v_ref),
            ("decay_exp", self.decay_exp),
            ("settle_s", self.settle_s),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::validation(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Result of one scripted flight.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: ScenarioName,
    pub variant: Variant,
    pub fidelity: Fidelity,
    /// One row per 1 ms control tick.
    pub trace: Vec<TraceRow>,
    /// Headline values, SI units except keys ending in `_deg`.
    /// `liftoff_time_s` is NaN when the vehicle never leaves the ground.
    pub metrics: BTreeMap<String, f64>,
    pub duty: SaturationDuty,
}

impl ScenarioReport {
    pub fn metric(&self, key: &str) -> Result<f64> {
        self.metrics
            .get(key)
            .copied()
            .ok_or_else(|| Error::Config(format!("report has no metric `{key}`")))
    }

    fn put(&mut self, key: impl Into<String>, v: f64) {
        self.metrics.insert(key.into(), v);
    }

    /// Insert q25/median/q75/max of a channel; angles are stored in degrees.
    fn put_stats(&mut self, prefix: &str, channel: Channel, window: Option<(f64, f64)>) -> Result<ErrorStats> {
        let s = compute_metrics(&self.trace, channel, window)?;
        let (s, unit) = if channel.is_angle() { (s.scaled(180.0 / PI), "deg") } else { (s, "m") };
        for (name, v) in [("q25", s.q25), ("median", s.median), ("q75", s.q75), ("max", s.max)] {
            self.put(format!("{prefix}_{name}_{unit}"), v);
        }
        Ok(s)
    }

    /// Flat key=value view: metadata plus every metric.
    pub fn stats(&self) -> BTreeMap<String, String> {
        let mut m: BTreeMap<String, String> = self.metrics.iter().map(|(k, v)| (k.clone(), format!("{v:.6}"))).collect();
        m.insert("scenario".into(), self.scenario.name().into());
        m.insert("variant".into(), self.variant.name().into());
        m.insert("fidelity".into(), self.fidelity.name().into());
        m.insert("ticks".into(), self.duty.ticks.to_string());
        m
    }
}

/// The reference a runner feeds the controller at each tick.
struct Reference {
    setpoint: Setpoint,
    /// Position the errors are measured against.
    position: Vector3<f64>,
}

struct Flight {
    sim: Simulation,
    trace: Vec<TraceRow>,
    duty: SaturationDuty,
    start_tick: u64,
}

impl Flight {
    fn new(setup: SimSetup) -> Result<Self> {
        Ok(Flight {
            sim: Simulation::new(setup)?,
            trace: Vec::new(),
            duty: SaturationDuty::default(),
            start_tick: 0,
        })
    }

    /// Start `seconds` before t = 0 and hold `setpoint` until then, so that
    /// integrators have absorbed steady loads when recording begins.
    fn settled(mut setup: SimSetup, seconds: f64, setpoint: Setpoint) -> Result<Self> {
        setup.initial.time = -seconds;
        let mut flight = Flight::new(setup)?;
        let n = (seconds * 1000.0).round() as u64;
        while flight.sim.tick_count() < n {
            flight.sim.tick(&setpoint)?;
        }
        flight.start_tick = n;
        Ok(flight)
    }

    fn fly(&mut self, until: f64, mut reference: impl FnMut(f64, &SimState) -> Reference) -> Result<()> {
        // Tick count from the start so that floating time never drifts.
        let end_tick = self.start_tick + (until * 1000.0).round() as u64;
        while self.sim.tick_count() < end_tick {
            let t = (self.sim.tick_count() - self.start_tick) as f64 * 1e-3;
            let r = reference(t, self.sim.state());
            let info = self.sim.tick(&r.setpoint)?;
            self.duty.record(&info.saturation.flags);
            let att_d = match r.setpoint {
                Setpoint::Attitude { attitude, .. } => attitude,
                _ => self.sim.controller().attitude_setpoint(),
            };
            self.trace.push(TraceRow::new(self.sim.state(), &info, r.position, &att_d));
        }
        Ok(())
    }

    fn report(self, scenario: ScenarioName, variant: Variant, fidelity: Fidelity) -> ScenarioReport {
        let mut r = ScenarioReport {
            scenario,
            variant,
            fidelity,
            trace: self.trace,
            metrics: BTreeMap::new(),
            duty: self.duty,
        };
        r.put("duty_any", r.duty.any_duty());
        r.put("duty_servo", r.duty.servo_duty());
        r.put("duty_amplitude", r.duty.amplitude_duty());
        r
    }
}

fn setup(cfg: &Config, variant: Variant, position: Vector3<f64>, yaw: f64, scenario_wind: WindField) -> SimSetup {
    let mut s = SimSetup::from_config(cfg, position, yaw, cfg.wind.resolve(scenario_wind));
    s.variant = variant;
    s.ground_effect = cfg.scenario.ground_effect;
    s.wing = cfg.scenario.wing_model;
    s.controller = Controller::new(cfg.control.clone());
    s
}

/// Run length: the configured override or the scenario default. Must
/// extend past `after`, where the scenario's last metric window opens.
fn duration(cfg: &Config, default: f64, after: f64) -> Result<f64> {
    let d = cfg.sim.duration_s.unwrap_or(default);
    if d <= after {
        return Err(Error::Config(format!(
            "{} needs duration_s > {after} s, got {d}",
            cfg.scenario.name
        )));
    }
    Ok(d)
}

/// Take-off from the ground or a pedestal.
///
/// Attitude mode ramps the collective linearly to 1.15 × weight over 3 s
/// with a level attitude command. Position mode commands a smooth 1 m climb.
pub fn run_takeoff(variant: Variant, platform: Platform, control: ControlMode, cfg: &Config) -> Result<ScenarioReport> {
    let contact = match platform {
        Platform::Ground => 0.0,
        Platform::Pedestal => cfg.scenario.pedestal_height_m,
    };
    let rest_z = contact + cfg.sim.gear_height;
    let start = Vector3::new(0.0, 0.0, rest_z);
    let mut s = setup(cfg, variant, start, 0.0, WindField::None);
    s.contact_height = contact;
    let airframe = s.airframe.clone();
    s.initial = SimState::at_rest(start, 0.0, 0.0, &airframe);
    let weight = airframe.vehicle.weight();
    let mut flight = Flight::new(s)?;
    let level = frames::hover_attitude(0.0);
    let (end, ramp, climb_start, climb_time) = (duration(cfg, 6.0, 0.0)?, 3.0, 0.5, 3.0);
    let mut liftoff: Option<f64> = None;
    flight.fly(end, |t, st| {
        if liftoff.is_none() && st.position.z > rest_z + 1e-6 {
            liftoff = Some(t);
        }
        match control {
            ControlMode::Attitude => Reference {
                setpoint: Setpoint::Attitude {
                    attitude: level,
                    thrust: 1.15 * weight * (t / ramp).min(1.0),
                },
                position: Vector3::new(start.x, start.y, st.position.z),
            },
            ControlMode::Position => {
                let (z, vz, az) = smoothstep((t - climb_start) / climb_time);
                let p = start + Vector3::new(0.0, 0.0, z);
                Reference {
                    setpoint: Setpoint::Position {
                        position: p,
                        velocity_ff: Vector3::new(0.0, 0.0, vz / climb_time),
                        accel_ff: Vector3::new(0.0, 0.0, az / (climb_time * climb_time)),
                        yaw: 0.0,
                        yaw_rate: 0.0,
                    },
                    position: p,
                }
            }
        }
    })?;
    let mut r = flight.report(ScenarioName::Takeoff, variant, cfg.sim.fidelity);
    r.put_stats("pitch_err", Channel::Pitch, None)?;
    r.put_stats("roll_err", Channel::Roll, None)?;
    r.put_stats("x_err", Channel::X, None)?;
    r.put("liftoff_time_s", liftoff.unwrap_or(f64::NAN));
    r.put("final_height_m", r.trace.last().map_or(0.0, |row| row.position.z - rest_z));
    Ok(r)
}

/// Quintic smoothstep on [0, 1]: value, first and second derivative.
fn smoothstep(s: f64) -> (f64, f64, f64) {
    if s <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if s >= 1.0 {
        (1.0, 0.0, 0.0)
    } else {
        let s2 = s * s;
        let s3 = s2 * s;
        (
            s3 * (10.0 - 15.0 * s + 6.0 * s2),
            30.0 * s2 * (1.0 - s) * (1.0 - s),
            60.0 * s * (1.0 - s) * (1.0 - 2.0 * s),
        )
    }
}

/// Figure-of-eight reference at time `t`: position, velocity and
/// acceleration offsets from the center.
pub fn fig8_reference(t: f64) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
    let mut start = 0.0;
    let mut phase = 0.0;
    let mut rate = 0.0;
    for (k, period) in FIG8_PERIODS.iter().enumerate() {
        let last = k == FIG8_PERIODS.len() - 1;
        if t < start + period || last {
            let local = (t - start).min(*period).max(0.0);
            phase = TAU * (k as f64 + local / period);
            rate = if t - start <= *period { TAU / period } else { 0.0 };
            break;
        }
        start += period;
    }
    let (s1, c1) = phase.sin_cos();
    let (s2, c2) = (2.0 * phase).sin_cos();
    let pos = Vector3::new(s1, 0.5 * s2, 0.0);
    let vel = Vector3::new(c1 * rate, c2 * rate, 0.0);
    let acc = Vector3::new(-s1 * rate * rate, -2.0 * s2 * rate * rate, 0.0);
    (pos, vel, acc)
}

/// Total duration of the four figure-of-eight cycles, s.
pub fn fig8_duration() -> f64 {
    FIG8_PERIODS.iter().sum()
}

/// Yaw that points body x along the horizontal velocity, holding `previous`
/// when the horizontal speed is below [`YAW_HOLD_SPEED`].
pub fn velocity_yaw(velocity: &Vector3<f64>, previous: f64) -> f64 {
    if velocity.xy().norm() < YAW_HOLD_SPEED {
        previous
    } else {
        frames::yaw_from_heading(velocity.y.atan2(velocity.x))
    }
}

/// Rate of [`velocity_yaw`] for a reference velocity and acceleration; zero
/// while the yaw is held.
pub fn velocity_yaw_rate(velocity: &Vector3<f64>, accel: &Vector3<f64>) -> f64 {
    let v2 = velocity.xy().norm_squared();
    if v2.sqrt() < YAW_HOLD_SPEED {
        return 0.0;
    }
    -(velocity.x * accel.y - velocity.y * accel.x) / v2
}

pub fn run_fig8(variant: Variant, cfg: &Config) -> Result<ScenarioReport> {
    let center = Vector3::new(0.0, 0.0, cfg.scenario.hover_height_m);
    let (_, v0, _) = fig8_reference(0.0);
    let yaw0 = velocity_yaw(&v0, 0.0);
    let hold = Setpoint::hold(center, yaw0);
    let mut flight = Flight::settled(setup(cfg, variant, center, yaw0, WindField::None), cfg.scenario.settle_s, hold)?;
    let mut yaw_d = yaw0;
    let end = duration(cfg, fig8_duration() + 1.0, 0.0)?;
    flight.fly(end, |t, _| {
        let (p, v, a) = fig8_reference(t);
        yaw_d = velocity_yaw(&v, yaw_d);
        Reference {
            setpoint: Setpoint::Position {
                position: center + p,
                velocity_ff: v,
                accel_ff: a,
                yaw: yaw_d,
                yaw_rate: velocity_yaw_rate(&v, &a),
            },
            position: center + p,
        }
    })?;
    let mut r = flight.report(ScenarioName::Fig8, variant, cfg.sim.fidelity);
    r.put_stats("pos_err", Channel::Position, None)?;
    r.put_stats("yaw_err", Channel::Yaw, None)?;
    r.put_stats("pitch_err", Channel::Pitch, None)?;
    r.put_stats("roll_err", Channel::Roll, None)?;
    Ok(r)
}

/// Fan blowing along world +x toward `target` from `distance` upwind,
/// offset laterally by `y_offset`.
fn fan_toward(target: Vector3<f64>, y_offset: f64, radius: f64, cfg: &Config, schedule: Vec<[f64; 2]>) -> Fan {
    let sp = &cfg.scenario;
    Fan {
        position: [target.x - sp.fan_distance_m, target.y + y_offset, target.z],
        axis: [1.0, 0.0, 0.0],
        v_ref: sp.wind_v_ref,
        d_ref: sp.fan_distance_m,
        jet_radius: radius,
        decay_exp: sp.decay_exp,
        schedule,
    }
}

/// Two side-by-side fans whose jets together cover the whole span.
pub fn balanced_fans(target: Vector3<f64>, cfg: &Config, schedule: Vec<[f64; 2]>) -> WindField {
    if !cfg.scenario.wind_enabled {
        return WindField::None;
    }
    let r = cfg.scenario.jet_radius_m;
    WindField::Fans(vec![
        fan_toward(target, r, r, cfg, schedule.clone()),
        fan_toward(target, -r, r, cfg, schedule),
    ])
}

/// One fan whose jet covers the −y half of the span at the hover point.
pub fn half_span_fan(target: Vector3<f64>, cfg: &Config) -> WindField {
    if !cfg.scenario.wind_enabled {
        return WindField::None;
    }
    let r = cfg.scenario.half_span_radius_m;
    WindField::Fans(vec![fan_toward(target, -r, r, cfg, Vec::new())])
}

/// Position hold while both fans blow on the full wing from 2 s to 7 s.
pub fn run_hover_gust(variant: Variant, cfg: &Config) -> Result<ScenarioReport> {
    let hover = Vector3::new(0.0, 0.0, cfg.scenario.hover_height_m);
    let wind = balanced_fans(hover, cfg, vec![[2.0, 7.0]]);
    let hold = Setpoint::hold(hover, 0.0);
    let mut flight = Flight::settled(setup(cfg, variant, hover, 0.0, wind), cfg.scenario.settle_s, hold)?;
    flight.fly(duration(cfg, 10.0, 0.0)?, |_, _| Reference {
        setpoint: Setpoint::hold(hover, 0.0),
        position: hover,
    })?;
    let mut r = flight.report(ScenarioName::HoverGust, variant, cfg.sim.fidelity);
    r.put_stats("x_err", Channel::X, None)?;
    r.put_stats("pitch_err", Channel::Pitch, None)?;
    r.put_stats("yaw_err", Channel::Yaw, None)?;
    Ok(r)
}

/// Start and step time, return time and end of the step scenario, s.
pub const STEP_TIMES: (f64, f64, f64) = (3.0, 8.0, 13.0);

/// 1 m step away from the hover point in the half-span jet and back.
pub fn run_step_disturbance(variant: Variant, axis: StepAxis, cfg: &Config) -> Result<ScenarioReport> {
    let hover = Vector3::new(0.0, 0.0, cfg.scenario.hover_height_m);
    let away = hover
        + match axis {
            StepAxis::X => Vector3::new(1.0, 0.0, 0.0),
            StepAxis::Y => Vector3::new(0.0, 1.0, 0.0),
        };
    let wind = half_span_fan(hover, cfg);
    let (t_step, t_back, t_end) = STEP_TIMES;
    let hold = Setpoint::hold(hover, 0.0);
    let mut flight = Flight::settled(setup(cfg, variant, hover, 0.0, wind), cfg.scenario.settle_s, hold)?;
    flight.fly(duration(cfg, t_end, t_back)?, |t, _| {
        let p = if t >= t_step && t < t_back { away } else { hover };
        Reference {
            setpoint: Setpoint::hold(p, 0.0),
            position: p,
        }
    })?;
    let mut r = flight.report(ScenarioName::Step, variant, cfg.sim.fidelity);
    r.put_stats("roll_err", Channel::Roll, None)?;
    r.put_stats("pitch_err", Channel::Pitch, None)?;
    r.put_stats("yaw_err", Channel::Yaw, None)?;
    r.put_stats("pos_err", Channel::Position, None)?;
    let back = compute_metrics(&r.trace, Channel::Yaw, Some((t_back, f64::INFINITY)))?;
    r.put("yaw_err_return_max_deg", back.max.to_degrees());
    let out = compute_metrics(&r.trace, Channel::Yaw, Some((t_step, t_back)))?;
    r.put("yaw_err_away_max_deg", out.max.to_degrees());
    Ok(r)
}

/// Pitch ramp from hover to the fixed-wing attitude, then hold.
///
/// The collective keeps altitude with a PD law on height divided by the
/// vertical component of the thrust axis, capped at the controller's thrust
/// ceiling.
pub fn run_transition(variant: Variant, cfg: &Config) -> Result<ScenarioReport> {
    let start = Vector3::new(0.0, 0.0, cfg.scenario.hover_height_m.max(20.0));
    let hold = Setpoint::hold(start, 0.0);
    let mut flight = Flight::settled(setup(cfg, variant, start, 0.0, WindField::None), cfg.scenario.settle_s, hold)?;
    let vp = cfg.vehicle.clone();
    let f_max = cfg.control.thrust_max_frac * vp.max_thrust();
    let target = TRANSITION_PITCH_DEG.to_radians();
    let (ramp, hold) = (2.0, 10.0);
    let end = duration(cfg, ramp + hold, ramp)?;
    let (kp, kd) = (2.0, 2.5);
    flight.fly(end, |t, st| {
        let pitch = target * (t / ramp).clamp(0.0, 1.0);
        let attitude = frames::attitude_from_euler(0.0, pitch, 0.0);
        let up = (st.attitude * frames::thrust_axis()).z.max(0.2);
        let a_z = GRAVITY + kp * (start.z - st.position.z) - kd * st.velocity.z;
        let thrust = (vp.mass * a_z / up).clamp(0.0, f_max);
        Reference {
            setpoint: Setpoint::Attitude { attitude, thrust },
            position: Vector3::new(st.position.x, st.position.y, start.z),
        }
    })?;
    let mut r = flight.report(ScenarioName::Transition, variant, cfg.sim.fidelity);
    let hold_rows: Vec<&TraceRow> = r.trace.iter().filter(|row| row.t >= ramp).collect();
    let overshoot = hold_rows
        .iter()
        .map(|row| target - row.euler[1])
        .fold(0.0f64, f64::max);
    r.put("pitch_overshoot_deg", overshoot.to_degrees());
    let steady = compute_metrics(&r.trace, Channel::Pitch, Some((end - 3.0, end)))?;
    r.put("pitch_err_steady_deg", steady.median.to_degrees());
    let last = *r.trace.last().ok_or(Error::EmptyTrace)?;
    r.put("final_airspeed_m_s", (last.velocity - last.wind).norm());
    r.put("final_pitch_deg", last.euler[1].to_degrees());
    let min_z = r.trace.iter().map(|row| row.position.z).fold(f64::INFINITY, f64::min);
    r.put("altitude_loss_m", (start.z - min_z).max(0.0));
    r.put_stats("roll_err", Channel::Roll, None)?;
    r.put_stats("yaw_err", Channel::Yaw, None)?;
    r.put_stats("pitch_err", Channel::Pitch, Some((ramp, end)))?;
    Ok(r)
}

/// Run the scenario named in `cfg.scenario` with the given variant.
pub fn run(variant: Variant, cfg: &Config) -> Result<ScenarioReport> {
    let sp = &cfg.scenario;
    match sp.name {
        ScenarioName::Takeoff => run_takeoff(variant, sp.platform, sp.control, cfg),
        ScenarioName::Fig8 => run_fig8(variant, cfg),
        ScenarioName::HoverGust => run_hover_gust(variant, cfg),
        ScenarioName::Step => run_step_disturbance(variant, sp.axis, cfg),
        ScenarioName::Transition => run_transition(variant, cfg),
    }
}
