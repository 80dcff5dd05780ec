//! PX4-style control cascade: position → velocity → thrust vector and
//! attitude setpoint → body-rate setpoint → desired moment.
//!
//! Loop rates (in control ticks of 1 kHz): rate and attitude every tick,
//! velocity every 4th tick (250 Hz), position every 10th (100 Hz).

use nalgebra::{UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::allocation::{AxisSaturation, Wrench};
use crate::error::{Error, Result};
use crate::vehicle::{frames, VehicleParams};
use crate::GRAVITY;

pub const CONTROL_RATE_HZ: f64 = 1000.0;
pub const VELOCITY_DIVIDER: u64 = 4;
pub const POSITION_DIVIDER: u64 = 10;
/// Thrust vectors shorter than this cannot define an attitude, N.
pub const MIN_THRUST_VECTOR: f64 = 0.1;

/// `[control]` config section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlGains {
    pub pos_p_x: f64,
    pub pos_p_y: f64,
    pub pos_p_z: f64,
    /// Velocity setpoint norm limit, m/s.
    pub vel_max: f64,
    pub vel_p_x: f64,
    pub vel_p_y: f64,
    pub vel_p_z: f64,
    pub vel_i_x: f64,
    pub vel_i_y: f64,
    pub vel_i_z: f64,
    pub vel_d_x: f64,
    pub vel_d_y: f64,
    pub vel_d_z: f64,
    /// Velocity integrator limit, m/s² per axis.
    pub vel_i_limit: f64,
    pub att_p_x: f64,
    pub att_p_y: f64,
    pub att_p_z: f64,
    pub rate_p_x: f64,
    pub rate_p_y: f64,
    pub rate_p_z: f64,
    pub rate_i_x: f64,
    pub rate_i_y: f64,
    pub rate_i_z: f64,
    pub rate_d_x: f64,
    pub rate_d_y: f64,
    pub rate_d_z: f64,
    /// Rate integrator limit, N·m per axis.
    pub rate_i_limit: f64,
    pub max_tilt_deg: f64,
    pub max_rate_dps: f64,
    pub tau_limit_x: f64,
    pub tau_limit_y: f64,
    pub tau_limit_z: f64,
    /// Collective thrust ceiling as a fraction of `2·k_thrust`.
    pub thrust_max_frac: f64,
}

impl Default for ControlGains {
    fn default() -> Self {
        ControlGains {
            pos_p_x: 2.5,
            pos_p_y: 2.5,
            pos_p_z: 1.5,
            vel_max: 3.0,
            vel_p_x: 6.0,
            vel_p_y: 6.0,
            vel_p_z: 4.0,
            vel_i_x: 5.0,
            vel_i_y: 5.0,
            vel_i_z: 2.0,
            vel_d_x: 0.05,
            vel_d_y: 0.05,
            vel_d_z: 0.0,
            vel_i_limit: 4.0,
            att_p_x: 6.0,
            att_p_y: 12.0,
            att_p_z: 6.0,
            rate_p_x: 1.0,
            rate_p_y: 0.6,
            rate_p_z: 2.5,
            rate_i_x: 0.5,
            rate_i_y: 3.0,
            rate_i_z: 0.5,
            rate_d_x: 0.01,
            rate_d_y: 0.004,
            rate_d_z: 0.0,
            rate_i_limit: 0.5,
            max_tilt_deg: 35.0,
            max_rate_dps: 220.0,
            tau_limit_x: 3.0,
            tau_limit_y: 1.5,
            tau_limit_z: 1.5,
            thrust_max_frac: 0.9,
        }
    }
}

impl ControlGains {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pos_p_x", self.pos_p_x),
            ("pos_p_y", self.pos_p_y),
            ("pos_p_z", self.pos_p_z),
            ("vel_max", self.vel_max),
            ("vel_p_x", self.vel_p_x),
            ("vel_p_y", self.vel_p_y),
            ("vel_p_z", self.vel_p_z),
            ("vel_i_limit", self.vel_i_limit),
            ("att_p_x", self.att_p_x),
            ("att_p_y", self.att_p_y),
            ("att_p_z", self.att_p_z),
            ("rate_p_x", self.rate_p_x),
            ("rate_p_y", self.rate_p_y),
            ("rate_p_z", self.rate_p_z),
            ("rate_i_limit", self.rate_i_limit),
            ("max_tilt_deg", self.max_tilt_deg),
            ("max_rate_dps", self.max_rate_dps),
            ("tau_limit_x", self.tau_limit_x),
            ("tau_limit_y", self.tau_limit_y),
            ("tau_limit_z", self.tau_limit_z),
            ("thrust_max_frac", self.thrust_max_frac),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(name, format!("must be finite and > 0, got {v}")));
            }
        }
        let non_negative = [
            ("vel_i_x", self.vel_i_x),
            ("vel_i_y", self.vel_i_y),
            ("vel_i_z", self.vel_i_z),
            ("vel_d_x", self.vel_d_x),
            ("vel_d_y", self.vel_d_y),
            ("vel_d_z", self.vel_d_z),
            ("rate_i_x", self.rate_i_x),
            ("rate_i_y", self.rate_i_y),
            ("rate_i_z", self.rate_i_z),
            ("rate_d_x", self.rate_d_x),
            ("rate_d_y", self.rate_d_y),
            ("rate_d_z", self.rate_d_z),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::validation(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if self.max_tilt_deg >= 90.0 {
            return Err(Error::validation("max_tilt_deg", "must be below 90"));
        }
        if self.thrust_max_frac > 1.0 {
            return Err(Error::validation("thrust_max_frac", "must not exceed 1"));
        }
        Ok(())
    }

    pub fn pos_p(&self) -> Vector3<f64> {
        Vector3::new(self.pos_p_x, self.pos_p_y, self.pos_p_z)
    }
    pub fn vel_p(&self) -> Vector3<f64> {
        Vector3::new(self.vel_p_x, self.vel_p_y, self.vel_p_z)
    }
    pub fn vel_i(&self) -> Vector3<f64> {
        Vector3::new(self.vel_i_x, self.vel_i_y, self.vel_i_z)
    }
    pub fn vel_d(&self) -> Vector3<f64> {
        Vector3::new(self.vel_d_x, self.vel_d_y, self.vel_d_z)
    }
    pub fn att_p(&self) -> Vector3<f64> {
        Vector3::new(self.att_p_x, self.att_p_y, self.att_p_z)
    }
    pub fn rate_p(&self) -> Vector3<f64> {
        Vector3::new(self.rate_p_x, self.rate_p_y, self.rate_p_z)
    }
    pub fn rate_i(&self) -> Vector3<f64> {
        Vector3::new(self.rate_i_x, self.rate_i_y, self.rate_i_z)
    }
    pub fn rate_d(&self) -> Vector3<f64> {
        Vector3::new(self.rate_d_x, self.rate_d_y, self.rate_d_z)
    }
    pub fn tau_limit(&self) -> Vector3<f64> {
        Vector3::new(self.tau_limit_x, self.tau_limit_y, self.tau_limit_z)
    }
    pub fn max_rate(&self) -> f64 {
        self.max_rate_dps.to_radians()
    }
}

/// What the outer autonomy asks for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Setpoint {
    Position {
        position: Vector3<f64>,
        velocity_ff: Vector3<f64>,
        accel_ff: Vector3<f64>,
        yaw: f64,
        /// Heading rate feed-forward, rad/s.
        yaw_rate: f64,
    },
    Velocity {
        velocity: Vector3<f64>,
        accel_ff: Vector3<f64>,
        yaw: f64,
        yaw_rate: f64,
    },
    /// Position control off: direct attitude and collective thrust.
    Attitude {
        attitude: UnitQuaternion<f64>,
        thrust: f64,
    },
}

impl Setpoint {
    pub fn hold(position: Vector3<f64>, yaw: f64) -> Self {
        Setpoint::Position {
            position,
            velocity_ff: Vector3::zeros(),
            accel_ff: Vector3::zeros(),
            yaw,
            yaw_rate: 0.0,
        }
    }
}

fn clamp_norm(v: Vector3<f64>, max: f64) -> Vector3<f64> {
    let n = v.norm();
    if n > max {
        v * (max / n)
    } else {
        v
    }
}

fn clamp_each(v: Vector3<f64>, lim: &Vector3<f64>) -> Vector3<f64> {
    Vector3::new(v.x.clamp(-lim.x, lim.x), v.y.clamp(-lim.y, lim.y), v.z.clamp(-lim.z, lim.z))
}

/// P law on position error plus velocity feed-forward, norm-clamped to `vel_max`.
pub fn position_loop(
    position: &Vector3<f64>,
    position_d: &Vector3<f64>,
    velocity_ff: &Vector3<f64>,
    gains: &ControlGains,
) -> Vector3<f64> {
    let v = gains.pos_p().component_mul(&(position_d - position)) + velocity_ff;
    clamp_norm(v, gains.vel_max)
}

/// Desired attitude and collective thrust from a world thrust vector.
///
/// Body −z is aligned with `thrust_world`; the rotation about it is fixed by
/// `yaw`.
pub fn attitude_setpoint_from_thrust(thrust_world: &Vector3<f64>, yaw: f64) -> Result<(UnitQuaternion<f64>, f64)> {
    let f = thrust_world.norm();
    if f.is_nan() || f <= MIN_THRUST_VECTOR {
        return Err(Error::DegenerateThrust(f));
    }
    // Work in the east-south-down frame where hover is the identity.
    let f_esd = Vector3::new(thrust_world.x, -thrust_world.y, -thrust_world.z);
    let z_b = -f_esd / f;
    let y_c = Vector3::new(-yaw.sin(), yaw.cos(), 0.0);
    let mut x_b = y_c.cross(&z_b);
    if x_b.norm() < 1e-9 {
        // Thrust horizontal along the yaw direction: pick any consistent x.
        x_b = Vector3::new(0.0, 0.0, 1.0).cross(&z_b);
    }
    let x_b = x_b.normalize();
    let y_b = z_b.cross(&x_b);
    let r_esd = frames::attitude_from_axes(x_b, y_b, z_b);
    Ok((frames::flip() * r_esd, f))
}

/// Body rate that turns the thrust-derived attitude setpoint at `yaw_rate`
/// with the thrust vector held.
pub fn yaw_rate_feedforward(thrust_world: &Vector3<f64>, yaw: f64, yaw_rate: f64) -> Result<Vector3<f64>> {
    if yaw_rate == 0.0 {
        return Ok(Vector3::zeros());
    }
    const EPS: f64 = 1e-4;
    let (q0, _) = attitude_setpoint_from_thrust(thrust_world, yaw)?;
    let (q1, _) = attitude_setpoint_from_thrust(thrust_world, yaw + EPS)?;
    let dq = q0.inverse() * q1;
    let s = if dq.w < 0.0 { -1.0 } else { 1.0 };
    Ok(2.0 * s * dq.imag() * (yaw_rate / EPS))
}

/// Quaternion-error P law; invariant under the sign of either quaternion.
pub fn attitude_loop(q: &UnitQuaternion<f64>, q_d: &UnitQuaternion<f64>, gains: &ControlGains) -> Vector3<f64> {
    let q_e = q.inverse() * q_d;
    let s = if q_e.w < 0.0 { -1.0 } else { 1.0 };
    let rate = gains.att_p().component_mul(&(2.0 * s * q_e.imag()));
    let m = gains.max_rate();
    clamp_each(rate, &Vector3::repeat(m))
}

/// Mutable state of the cascade.
#[derive(Debug, Clone)]
pub struct Controller {
    gains: ControlGains,
    vel_integral: Vector3<f64>,
    rate_integral: Vector3<f64>,
    last_velocity: Option<Vector3<f64>>,
    last_omega: Option<Vector3<f64>>,
    velocity_sp: Vector3<f64>,
    thrust_vector: Vector3<f64>,
    thrust_limited: bool,
    tick: u64,
    last_attitude_sp: UnitQuaternion<f64>,
    last_rate_sp: Vector3<f64>,
}

/// Measured vehicle state the controller sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub attitude: UnitQuaternion<f64>,
    pub omega: Vector3<f64>,
}

impl Controller {
    pub fn new(gains: ControlGains) -> Self {
        Controller {
            gains,
            vel_integral: Vector3::zeros(),
            rate_integral: Vector3::zeros(),
            last_velocity: None,
            last_omega: None,
            velocity_sp: Vector3::zeros(),
            thrust_vector: Vector3::zeros(),
            thrust_limited: false,
            tick: 0,
            last_attitude_sp: frames::hover_attitude(0.0),
            last_rate_sp: Vector3::zeros(),
        }
    }

    pub fn gains(&self) -> &ControlGains {
        &self.gains
    }

    pub fn rate_integral(&self) -> Vector3<f64> {
        self.rate_integral
    }

    pub fn velocity_integral(&self) -> Vector3<f64> {
        self.vel_integral
    }

    pub fn attitude_setpoint(&self) -> UnitQuaternion<f64> {
        self.last_attitude_sp
    }

    pub fn rate_setpoint(&self) -> Vector3<f64> {
        self.last_rate_sp
    }

    /// Velocity PID with gravity and acceleration feed-forward; returns the
    /// world thrust vector after tilt and magnitude limits.
    ///
    /// The integrator is frozen while thrust is saturated, either downstream
    /// (`thrust_saturated`) or by this loop's own limits.
    pub fn velocity_loop(
        &mut self,
        velocity: &Vector3<f64>,
        velocity_d: &Vector3<f64>,
        accel_ff: &Vector3<f64>,
        dt: f64,
        thrust_saturated: bool,
        vehicle: &VehicleParams,
    ) -> Vector3<f64> {
        let g = &self.gains;
        let err = velocity_d - velocity;
        if !(thrust_saturated || self.thrust_limited) {
            self.vel_integral += g.vel_i().component_mul(&err) * dt;
            let lim = g.vel_i_limit;
            self.vel_integral = clamp_each(self.vel_integral, &Vector3::repeat(lim));
        }
        let deriv = match self.last_velocity {
            Some(prev) => -g.vel_d().component_mul(&((velocity - prev) / dt)),
            None => Vector3::zeros(),
        };
        self.last_velocity = Some(*velocity);
        let accel = g.vel_p().component_mul(&err) + self.vel_integral + deriv + accel_ff + Vector3::new(0.0, 0.0, GRAVITY);
        let mut f = accel * vehicle.mass;

        let mut limited = false;
        let f_min = 0.1 * vehicle.weight();
        if f.z < f_min {
            f.z = f_min;
            limited = true;
        }
        let horiz_max = f.z * g.max_tilt_deg.to_radians().tan();
        let h = f.xy().norm();
        if h > horiz_max {
            let s = horiz_max / h;
            f.x *= s;
            f.y *= s;
            limited = true;
        }
        let f_max = g.thrust_max_frac * vehicle.max_thrust();
        if f.norm() > f_max {
            limited = true;
            if f.z >= f_max {
                f = Vector3::new(0.0, 0.0, f_max);
            } else {
                let h_room = (f_max * f_max - f.z * f.z).sqrt();
                let h = f.xy().norm();
                let s = h_room / h;
                f.x *= s;
                f.y *= s;
            }
        }
        self.thrust_limited = limited;
        f
    }

    /// Rate PID with derivative on measurement.
    ///
    /// Conditional integration: an axis whose actuator saturated on the
    /// previous mix keeps its integrator unchanged.
    pub fn rate_loop(&mut self, omega: &Vector3<f64>, omega_d: &Vector3<f64>, dt: f64, saturated: [bool; 3]) -> Vector3<f64> {
        let g = &self.gains;
        let err = omega_d - omega;
        let ki = g.rate_i();
        for i in 0..3 {
            if !saturated[i] {
                self.rate_integral[i] = (self.rate_integral[i] + ki[i] * err[i] * dt).clamp(-g.rate_i_limit, g.rate_i_limit);
            }
        }
        let deriv = match self.last_omega {
            Some(prev) => -g.rate_d().component_mul(&((omega - prev) / dt)),
            None => Vector3::zeros(),
        };
        self.last_omega = Some(*omega);
        let tau = g.rate_p().component_mul(&err) + self.rate_integral + deriv;
        clamp_each(tau, &g.tau_limit())
    }

    /// One 1 kHz control tick through the cascade.
    pub fn step(
        &mut self,
        meas: &Measurement,
        setpoint: &Setpoint,
        saturation: &AxisSaturation,
        vehicle: &VehicleParams,
    ) -> Result<Wrench> {
        let dt = 1.0 / CONTROL_RATE_HZ;
        let tick = self.tick;
        self.tick += 1;
        let (q_d, f_t, rate_ff) = match setpoint {
            Setpoint::Attitude { attitude, thrust } => {
                // Outer loops are off; drop their memory so re-engaging starts clean.
                self.last_velocity = None;
                self.vel_integral = Vector3::zeros();
                (*attitude, *thrust, Vector3::zeros())
            }
            Setpoint::Position {
                position,
                velocity_ff,
                accel_ff,
                yaw,
                yaw_rate,
            } => {
                if tick.is_multiple_of(POSITION_DIVIDER) {
                    self.velocity_sp = position_loop(&meas.position, position, velocity_ff, &self.gains);
                }
                if tick.is_multiple_of(VELOCITY_DIVIDER) {
                    let v_sp = self.velocity_sp;
                    self.thrust_vector = self.velocity_loop(
                        &meas.velocity,
                        &v_sp,
                        accel_ff,
                        dt * VELOCITY_DIVIDER as f64,
                        saturation.thrust,
                        vehicle,
                    );
                }
                let (q, f) = attitude_setpoint_from_thrust(&self.thrust_vector, *yaw)?;
                (q, f, yaw_rate_feedforward(&self.thrust_vector, *yaw, *yaw_rate)?)
            }
            Setpoint::Velocity {
                velocity,
                accel_ff,
                yaw,
                yaw_rate,
            } => {
                if tick.is_multiple_of(VELOCITY_DIVIDER) {
                    self.thrust_vector = self.velocity_loop(
                        &meas.velocity,
                        velocity,
                        accel_ff,
                        dt * VELOCITY_DIVIDER as f64,
                        saturation.thrust,
                        vehicle,
                    );
                }
                let (q, f) = attitude_setpoint_from_thrust(&self.thrust_vector, *yaw)?;
                (q, f, yaw_rate_feedforward(&self.thrust_vector, *yaw, *yaw_rate)?)
            }
        };
        self.last_attitude_sp = q_d;
        let m = self.gains.max_rate();
        let rate_sp = clamp_each(attitude_loop(&meas.attitude, &q_d, &self.gains) + rate_ff, &Vector3::repeat(m));
        self.last_rate_sp = rate_sp;
        let tau = self.rate_loop(&meas.omega, &rate_sp, dt, saturation.moment_axes());
        Ok(Wrench::new(f_t, tau))
    }
}
