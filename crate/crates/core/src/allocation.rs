//! Control allocation: desired collective thrust and body moment → actuator
//! commands, for both actuation variants.
//!
//! Both mixers put thrust and roll on the two motors. They differ in pitch:
//!
//! - `sea_mix` sends pitch to the swashplateless hubs as a sinusoid amplitude
//!   with the sign folded into the moment direction `φ ∈ {0, π}`, and the
//!   elevons carry yaw alone;
//! - `cea_mix` leaves the hubs unmodulated and blends pitch (differential
//!   component) with yaw (common-mode component) into the two servo angles.
//!
//! Saturation is applied after the linear inverse. The default priority
//! clamps throttle first, then the amplitude so the total throttle stays in
//! [0, 1], then the servos.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propulsion::CyclicCommand;
use crate::vehicle::VehicleParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Swashplateless pitch, elevon yaw.
    Sea,
    /// Elevon pitch and yaw.
    Cea,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Sea => "sea",
            Variant::Cea => "cea",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Variant> {
        match s.to_ascii_lowercase().as_str() {
            "sea" => Ok(Variant::Sea),
            "cea" => Ok(Variant::Cea),
            other => Err(Error::Config(format!("unknown variant `{other}` (expected sea|cea)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SaturationPriority {
    /// Clamp throttle, then amplitude inside the remaining throttle margin.
    #[default]
    ThrustFirst,
    /// Cap amplitude at 0.5, then clamp throttle to keep the sinusoid inside [0, 1].
    PitchFirst,
}

/// `[allocation]` config section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct AllocationParams {
    /// Elevon pitch gain for CEA, N·m/rad. Defaults to `k_elevon`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_ep: Option<f64>,
    pub saturation_priority: SaturationPriority,
}

impl AllocationParams {
    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.k_ep {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::validation("k_ep", "must be finite and > 0"));
            }
        }
        Ok(())
    }

    pub fn k_ep(&self, vehicle: &VehicleParams) -> f64 {
        self.k_ep.unwrap_or(vehicle.k_elevon)
    }
}

/// Collective thrust along body −z and body moment.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Wrench {
    /// N
    pub f_t: f64,
    /// N·m, body axes
    pub tau: Vector3<f64>,
}

impl Wrench {
    pub fn new(f_t: f64, tau: Vector3<f64>) -> Self {
        Wrench { f_t, tau }
    }

    pub fn is_finite(&self) -> bool {
        self.f_t.is_finite() && self.tau.iter().all(|v| v.is_finite())
    }
}

impl std::ops::Add for Wrench {
    type Output = Wrench;
    fn add(self, rhs: Wrench) -> Wrench {
        Wrench::new(self.f_t + rhs.f_t, self.tau + rhs.tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActuatorCommand {
    pub cyclic: [CyclicCommand; 2],
    /// Servo angles, rad.
    pub servo: [f64; 2],
}

impl ActuatorCommand {
    /// Both motors at `c`, no modulation, servos centered.
    pub fn collective(c: f64) -> Self {
        ActuatorCommand {
            cyclic: [CyclicCommand::new(c, 0.0, 0.0); 2],
            servo: [0.0; 2],
        }
    }
}

/// Which actuator limits were hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SaturationFlags {
    pub throttle: [bool; 2],
    pub amplitude: [bool; 2],
    pub servo: [bool; 2],
}

impl SaturationFlags {
    pub fn any(&self) -> bool {
        self.throttle.iter().chain(&self.amplitude).chain(&self.servo).any(|&f| f)
    }

    pub fn any_servo(&self) -> bool {
        self.servo[0] || self.servo[1]
    }
}

/// Per control axis: whether the actuator serving it saturated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AxisSaturation {
    pub thrust: bool,
    pub roll: bool,
    pub pitch: bool,
    pub yaw: bool,
}

impl AxisSaturation {
    pub fn moment_axes(&self) -> [bool; 3] {
        [self.roll, self.pitch, self.yaw]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SaturationReport {
    pub flags: SaturationFlags,
    pub axes: AxisSaturation,
    pub demanded: Wrench,
    pub achieved: Wrench,
}

/// Fraction of control ticks with saturation, accumulated over a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SaturationDuty {
    pub ticks: u64,
    pub any: u64,
    pub servo: u64,
    pub amplitude: u64,
    pub throttle: u64,
}

impl SaturationDuty {
    pub fn record(&mut self, flags: &SaturationFlags) {
        self.ticks += 1;
        self.any += flags.any() as u64;
        self.servo += flags.any_servo() as u64;
        self.amplitude += (flags.amplitude[0] || flags.amplitude[1]) as u64;
        self.throttle += (flags.throttle[0] || flags.throttle[1]) as u64;
    }

    fn frac(&self, n: u64) -> f64 {
        if self.ticks == 0 {
            0.0
        } else {
            n as f64 / self.ticks as f64
        }
    }

    pub fn any_duty(&self) -> f64 {
        self.frac(self.any)
    }

    pub fn servo_duty(&self) -> f64 {
        self.frac(self.servo)
    }

    pub fn amplitude_duty(&self) -> f64 {
        self.frac(self.amplitude)
    }
}

fn clamp_flag(v: f64, lo: f64, hi: f64, flag: &mut bool) -> f64 {
    let c = v.clamp(lo, hi);
    if c != v {
        *flag = true;
    }
    c
}

/// Nominal throttles from thrust and roll (shared by both mixers).
fn thrust_roll_rows(desired: &Wrench, vehicle: &VehicleParams) -> [f64; 2] {
    let base = desired.f_t / (2.0 * vehicle.k_thrust);
    let roll = desired.tau.x / (2.0 * vehicle.arm_l * vehicle.k_thrust);
    [base - roll, base + roll]
}

fn saturate(
    mut cmd: ActuatorCommand,
    variant: Variant,
    desired: &Wrench,
    vehicle: &VehicleParams,
    alloc: &AllocationParams,
) -> (ActuatorCommand, SaturationReport) {
    let mut flags = SaturationFlags::default();
    for i in 0..2 {
        let cy = &mut cmd.cyclic[i];
        match alloc.saturation_priority {
            SaturationPriority::ThrustFirst => {
                cy.c_nominal = clamp_flag(cy.c_nominal, 0.0, 1.0, &mut flags.throttle[i]);
                let room = cy.c_nominal.min(1.0 - cy.c_nominal);
                cy.amplitude = clamp_flag(cy.amplitude, 0.0, room, &mut flags.amplitude[i]);
            }
            SaturationPriority::PitchFirst => {
                cy.amplitude = clamp_flag(cy.amplitude, 0.0, 0.5, &mut flags.amplitude[i]);
                let a = cy.amplitude;
                cy.c_nominal = clamp_flag(cy.c_nominal, a, 1.0 - a, &mut flags.throttle[i]);
            }
        }
    }
    let limit = vehicle.servo_limit();
    for j in 0..2 {
        cmd.servo[j] = clamp_flag(cmd.servo[j], -limit, limit, &mut flags.servo[j]);
    }
    let thr = flags.throttle[0] || flags.throttle[1];
    let amp = flags.amplitude[0] || flags.amplitude[1];
    let srv = flags.any_servo();
    let axes = AxisSaturation {
        thrust: thr,
        roll: thr,
        pitch: amp || (variant == Variant::Cea && srv),
        yaw: srv,
    };
    let achieved = forward_map(&cmd, vehicle, alloc);
    (
        cmd,
        SaturationReport {
            flags,
            axes,
            demanded: *desired,
            achieved,
        },
    )
}

/// SEA mixer: pitch on the swashplateless hubs, yaw on the elevons.
pub fn sea_mix(desired: &Wrench, vehicle: &VehicleParams, alloc: &AllocationParams) -> (ActuatorCommand, SaturationReport) {
    let c = thrust_roll_rows(desired, vehicle);
    let a = desired.tau.y.abs() / (2.0 * vehicle.k_swash);
    let phi = if desired.tau.y >= 0.0 { 0.0 } else { PI };
    let delta = desired.tau.z / (2.0 * vehicle.k_elevon);
    let cmd = ActuatorCommand {
        cyclic: [CyclicCommand::new(c[0], a, phi), CyclicCommand::new(c[1], a, phi)],
        servo: [delta, delta],
    };
    saturate(cmd, Variant::Sea, desired, vehicle, alloc)
}

/// CEA mixer: pitch (differential) and yaw (common mode) blended on the elevons.
pub fn cea_mix(desired: &Wrench, vehicle: &VehicleParams, alloc: &AllocationParams) -> (ActuatorCommand, SaturationReport) {
    let c = thrust_roll_rows(desired, vehicle);
    let pitch = desired.tau.y / (2.0 * alloc.k_ep(vehicle));
    let yaw = desired.tau.z / (2.0 * vehicle.k_elevon);
    let cmd = ActuatorCommand {
        cyclic: [CyclicCommand::new(c[0], 0.0, 0.0), CyclicCommand::new(c[1], 0.0, 0.0)],
        servo: [pitch + yaw, -pitch + yaw],
    };
    saturate(cmd, Variant::Cea, desired, vehicle, alloc)
}

pub fn mix(
    variant: Variant,
    desired: &Wrench,
    vehicle: &VehicleParams,
    alloc: &AllocationParams,
) -> (ActuatorCommand, SaturationReport) {
    match variant {
        Variant::Sea => sea_mix(desired, vehicle, alloc),
        Variant::Cea => cea_mix(desired, vehicle, alloc),
    }
}

/// Linear actuator → wrench map at the hover operating point.
///
/// The same rows serve both variants: an SEA command has equal servo angles
/// (no differential pitch term) and a CEA command has zero amplitude.
pub fn forward_map(cmd: &ActuatorCommand, vehicle: &VehicleParams, alloc: &AllocationParams) -> Wrench {
    let [m1, m2] = &cmd.cyclic;
    let [d1, d2] = cmd.servo;
    let kt = vehicle.k_thrust;
    let ka = vehicle.k_swash;
    let f_t = kt * (m1.c_nominal + m2.c_nominal);
    let swash_x = -ka * (m1.amplitude * m1.phi.sin() + m2.amplitude * m2.phi.sin());
    let swash_y = ka * (m1.amplitude * m1.phi.cos() + m2.amplitude * m2.phi.cos());
    let tau = Vector3::new(
        vehicle.arm_l * kt * (m2.c_nominal - m1.c_nominal) + swash_x,
        swash_y + alloc.k_ep(vehicle) * (d1 - d2),
        vehicle.k_elevon * (d1 + d2),
    );
    Wrench::new(f_t, tau)
}

/// Largest simultaneously independent pitch and yaw moments at nominal
/// throttle `c_nominal` on both motors: the half-widths of the reachable
/// (τy, τz) box (SEA) or the half-diagonals of the reachable diamond (CEA).
pub fn pitch_yaw_limits(variant: Variant, c_nominal: f64, vehicle: &VehicleParams, alloc: &AllocationParams) -> (f64, f64) {
    let servo = vehicle.servo_limit();
    let yaw = 2.0 * vehicle.k_elevon * servo;
    match variant {
        Variant::Sea => (2.0 * vehicle.k_swash * c_nominal.min(1.0 - c_nominal), yaw),
        Variant::Cea => (2.0 * alloc.k_ep(vehicle) * servo, yaw),
    }
}

/// Vertices of the reachable (τy, τz) set, found by driving each actuator
/// that carries pitch or yaw to its limits.
pub fn moment_vertices(variant: Variant, c_nominal: f64, vehicle: &VehicleParams, alloc: &AllocationParams) -> Vec<(f64, f64)> {
    let servo = vehicle.servo_limit();
    let mut pts = Vec::new();
    match variant {
        Variant::Sea => {
            let a_max = c_nominal.min(1.0 - c_nominal);
            for phi in [0.0, PI] {
                for d in [-servo, servo] {
                    let cmd = ActuatorCommand {
                        cyclic: [CyclicCommand::new(c_nominal, a_max, phi); 2],
                        servo: [d, d],
                    };
                    let w = forward_map(&cmd, vehicle, alloc);
                    pts.push((w.tau.y, w.tau.z));
                }
            }
        }
        Variant::Cea => {
            for d1 in [-servo, servo] {
                for d2 in [-servo, servo] {
                    let cmd = ActuatorCommand {
                        cyclic: [CyclicCommand::new(c_nominal, 0.0, 0.0); 2],
                        servo: [d1, d2],
                    };
                    let w = forward_map(&cmd, vehicle, alloc);
                    pts.push((w.tau.y, w.tau.z));
                }
            }
        }
    }
    convex_hull(pts)
}

/// Counter-clockwise convex hull (monotone chain).
fn convex_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite vertices"));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Whether a point lies inside (or on) a counter-clockwise convex polygon.
pub fn polygon_contains(hull: &[(f64, f64)], p: (f64, f64)) -> bool {
    let n = hull.len();
    (0..n).all(|i| {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= -1e-12
    })
}

/// Whether the mixer can deliver (τy, τz) together with hover thrust and
/// zero roll without clamping a pitch or yaw actuator.
pub fn pitch_yaw_achievable(
    variant: Variant,
    f_t: f64,
    tau_y: f64,
    tau_z: f64,
    vehicle: &VehicleParams,
    alloc: &AllocationParams,
) -> bool {
    let desired = Wrench::new(f_t, Vector3::new(0.0, tau_y, tau_z));
    let (_, report) = mix(variant, &desired, vehicle, alloc);
    !(report.axes.pitch || report.axes.yaw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn setup() -> (VehicleParams, AllocationParams) {
        (VehicleParams::default(), AllocationParams::default())
    }

    fn hover(p: &VehicleParams) -> f64 {
        p.weight()
    }

    #[test]
    fn sea_hover() {
        let (p, a) = setup();
        let (cmd, rep) = sea_mix(&Wrench::new(hover(&p), Vector3::zeros()), &p, &a);
        for cy in cmd.cyclic {
            assert_relative_eq!(cy.c_nominal, 0.4, epsilon = 1e-12);
            assert_eq!(cy.amplitude, 0.0);
        }
        assert_eq!(cmd.servo, [0.0, 0.0]);
        assert!(!rep.flags.any());
    }

    #[test]
    fn sea_pitch_rows() {
        let (p, a) = setup();
        let (cmd, _) = sea_mix(&Wrench::new(hover(&p), Vector3::new(0.0, 0.18, 0.0)), &p, &a);
        for cy in cmd.cyclic {
            assert_relative_eq!(cy.amplitude, 0.1, epsilon = 1e-12);
            assert_eq!(cy.phi, 0.0);
        }
        let (cmd, _) = sea_mix(&Wrench::new(hover(&p), Vector3::new(0.0, -0.18, 0.0)), &p, &a);
        for cy in cmd.cyclic {
            assert_relative_eq!(cy.amplitude, 0.1, epsilon = 1e-12);
            assert_eq!(cy.phi, PI);
        }
    }

    #[test]
    fn sea_yaw_clamp() {
        let (p, a) = setup();
        let full = 2.0 * p.k_elevon * p.servo_limit();
        let (cmd, rep) = sea_mix(&Wrench::new(hover(&p), Vector3::new(0.0, 0.0, 1.5 * full)), &p, &a);
        assert_eq!(cmd.servo, [p.servo_limit(); 2]);
        assert!(rep.flags.servo[0] && rep.flags.servo[1]);
        assert!(rep.axes.yaw && !rep.axes.pitch);
        assert_relative_eq!(rep.achieved.tau.z, full, epsilon = 1e-12);
    }

    #[test]
    fn cea_yaw_only_matches_sea() {
        let (p, a) = setup();
        let w = Wrench::new(hover(&p), Vector3::new(0.0, 0.0, 0.3));
        assert_eq!(sea_mix(&w, &p, &a).0.servo, cea_mix(&w, &p, &a).0.servo);
    }

    #[test]
    fn cea_pitch_is_antisymmetric() {
        let (p, a) = setup();
        let (cmd, rep) = cea_mix(&Wrench::new(hover(&p), Vector3::new(0.0, 0.3, 0.0)), &p, &a);
        assert_relative_eq!(cmd.servo[0], -cmd.servo[1], epsilon = 1e-15);
        assert_relative_eq!(rep.achieved.tau.z, 0.0, epsilon = 1e-15);
        assert_eq!(cmd.cyclic[0].amplitude, 0.0);
    }

    #[test]
    fn cea_shared_budget_clamps() {
        let (p, a) = setup();
        let s = p.servo_limit();
        let ty = 0.6 * s * 2.0 * a.k_ep(&p);
        let tz = 0.6 * s * 2.0 * p.k_elevon;
        let (cmd, rep) = cea_mix(&Wrench::new(hover(&p), Vector3::new(0.0, ty, tz)), &p, &a);
        // delta1 would be 1.2 * limit
        assert_eq!(cmd.servo[0], s);
        assert_relative_eq!(cmd.servo[1], 0.0, epsilon = 1e-15);
        assert!(rep.axes.pitch && rep.axes.yaw);
        assert!(rep.achieved.tau.y < ty && rep.achieved.tau.z < tz);
    }

    #[test]
    fn forward_map_examples() {
        let (p, a) = setup();
        let w = forward_map(&ActuatorCommand::collective(0.4), &p, &a);
        assert_relative_eq!(w.f_t, 22.0725, epsilon = 1e-12);
        assert_eq!(w.tau.x, 0.0);
        let cmd = ActuatorCommand { servo: [0.1, -0.1], ..ActuatorCommand::collective(0.4) };
        let w = forward_map(&cmd, &p, &a);
        assert_relative_eq!(w.tau.y, 0.24, epsilon = 1e-12);
        assert_relative_eq!(w.tau.z, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn sea_decoupling() {
        let (p, a) = setup();
        let base = Wrench::new(hover(&p), Vector3::new(0.05, 0.1, 0.2));
        let (c0, _) = sea_mix(&base, &p, &a);
        let mut w = base;
        w.tau.y += 0.05;
        let (c1, _) = sea_mix(&w, &p, &a);
        assert_eq!(c0.servo, c1.servo);
        for i in 0..2 {
            assert_eq!(c0.cyclic[i].c_nominal, c1.cyclic[i].c_nominal);
        }
        let mut w = base;
        w.tau.z += 0.05;
        let (c2, _) = sea_mix(&w, &p, &a);
        assert_eq!(c0.cyclic, c2.cyclic);
    }

    #[test]
    fn thrust_first_preserves_throttle_range() {
        let (p, a) = setup();
        let (cmd, rep) = sea_mix(&Wrench::new(50.0, Vector3::new(0.0, 0.6, 0.0)), &p, &a);
        for cy in cmd.cyclic {
            assert!(cy.c_nominal + cy.amplitude <= 1.0 + 1e-12);
        }
        assert!(rep.axes.pitch);
    }

    #[test]
    fn pitch_first_keeps_amplitude() {
        let (p, _) = setup();
        let a = AllocationParams { saturation_priority: SaturationPriority::PitchFirst, ..Default::default() };
        let (cmd, rep) = sea_mix(&Wrench::new(50.0, Vector3::new(0.0, 0.6, 0.0)), &p, &a);
        for cy in cmd.cyclic {
            assert_relative_eq!(cy.amplitude, 0.6 / 1.8, epsilon = 1e-12);
            assert!(cy.c_nominal + cy.amplitude <= 1.0 + 1e-12);
        }
        assert!(rep.axes.thrust && !rep.axes.pitch);
    }

    #[test]
    fn vertices_shapes() {
        let (p, a) = setup();
        let sea = moment_vertices(Variant::Sea, 0.4, &p, &a);
        let cea = moment_vertices(Variant::Cea, 0.4, &p, &a);
        assert_eq!(sea.len(), 4);
        assert_eq!(cea.len(), 4);
        let (ty, tz) = pitch_yaw_limits(Variant::Sea, 0.4, &p, &a);
        assert!(sea.iter().all(|v| (v.0.abs() - ty).abs() < 1e-12 && (v.1.abs() - tz).abs() < 1e-12));
        // CEA vertices lie on the axes.
        assert!(cea.iter().all(|v| v.0.abs() < 1e-12 || v.1.abs() < 1e-12));
    }

    #[test]
    fn duty_fraction() {
        let mut d = SaturationDuty::default();
        assert_eq!(d.any_duty(), 0.0);
        d.record(&SaturationFlags::default());
        d.record(&SaturationFlags { servo: [true, false], ..Default::default() });
        assert_eq!(d.any_duty(), 0.5);
        assert_eq!(d.servo_duty(), 0.5);
    }

    #[test]
    fn variant_parse() {
        assert_eq!("SEA".parse::<Variant>().unwrap(), Variant::Sea);
        assert!("xyz".parse::<Variant>().is_err());
    }
}
