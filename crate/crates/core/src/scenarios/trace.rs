//! Trace rows, CSV output and the key=value stats format.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::{UnitQuaternion, Vector3};

use crate::dynamics::SimState;
use crate::sim::TickInfo;
use crate::vehicle::frames;

/// CSV column order.
pub const CSV_COLUMNS: [&str; 35] = [
    "t", "px", "py", "pz", "vx", "vy", "vz", "qw", "qx", "qy", "qz", "roll", "pitch", "yaw", "wx", "wy", "wz", "px_d",
    "py_d", "pz_d", "roll_d", "pitch_d", "yaw_d", "C1", "C2", "A1", "A2", "phi1", "phi2", "d1", "d2", "sat_any",
    "wind_x", "wind_y", "wind_z",
];

/// One sample of the closed loop, SI units, angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub attitude: UnitQuaternion<f64>,
    /// roll, pitch, yaw
    pub euler: [f64; 3],
    pub omega: Vector3<f64>,
    pub position_d: Vector3<f64>,
    pub euler_d: [f64; 3],
    pub c: [f64; 2],
    pub a: [f64; 2],
    pub phi: [f64; 2],
    /// Actual servo angles.
    pub delta: [f64; 2],
    pub sat_any: bool,
    pub wind: Vector3<f64>,
}

impl Default for TraceRow {
    fn default() -> Self {
        TraceRow {
            t: 0.0,
            position: Vector3::zeros(),
            velocity: Vector3::zeros(),
            attitude: UnitQuaternion::identity(),
            euler: [0.0; 3],
            omega: Vector3::zeros(),
            position_d: Vector3::zeros(),
            euler_d: [0.0; 3],
            c: [0.0; 2],
            a: [0.0; 2],
            phi: [0.0; 2],
            delta: [0.0; 2],
            sat_any: false,
            wind: Vector3::zeros(),
        }
    }
}

fn euler(q: &UnitQuaternion<f64>) -> [f64; 3] {
    let (r, p, y) = frames::euler_from_attitude(q);
    [r, p, y]
}

impl TraceRow {
    /// Row for the state after a tick, with the references in force during it.
    pub fn new(
        state: &SimState,
        info: &TickInfo,
        position_d: Vector3<f64>,
        attitude_d: &UnitQuaternion<f64>,
    ) -> TraceRow {
        TraceRow {
            t: state.time,
            position: state.position,
            velocity: state.velocity,
            attitude: state.attitude,
            euler: euler(&state.attitude),
            omega: state.omega,
            position_d,
            euler_d: euler(attitude_d),
            c: info.command.cyclic.map(|c| c.c_nominal),
            a: info.command.cyclic.map(|c| c.amplitude),
            phi: info.command.cyclic.map(|c| c.phi),
            delta: state.surfaces.map(|s| s.delta),
            sat_any: info.saturation.flags.any(),
            wind: info.loads.wind,
        }
    }

    fn values(&self) -> [f64; 35] {
        let q = self.attitude.quaternion();
        [
            self.t,
            self.position.x,
            self.position.y,
            self.position.z,
            self.velocity.x,
            self.velocity.y,
            self.velocity.z,
            q.w,
            q.i,
            q.j,
            q.k,
            self.euler[0],
            self.euler[1],
            self.euler[2],
            self.omega.x,
            self.omega.y,
            self.omega.z,
            self.position_d.x,
            self.position_d.y,
            self.position_d.z,
            self.euler_d[0],
            self.euler_d[1],
            self.euler_d[2],
            self.c[0],
            self.c[1],
            self.a[0],
            self.a[1],
            self.phi[0],
            self.phi[1],
            self.delta[0],
            self.delta[1],
            if self.sat_any { 1.0 } else { 0.0 },
            self.wind.x,
            self.wind.y,
            self.wind.z,
        ]
    }
}

/// Write the trace as CSV, keeping every `stride`-th row.
pub fn write_csv<W: Write>(out: &mut W, rows: &[TraceRow], stride: usize) -> std::io::Result<()> {
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    for row in rows.iter().step_by(stride.max(1)) {
        let line: Vec<String> = row
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| if i == 31 { format!("{}", *v as u8) } else { format!("{v:.9}") })
            .collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Flat `key=value` report, keys sorted.
pub fn write_stats<W: Write>(out: &mut W, stats: &BTreeMap<String, String>) -> std::io::Result<()> {
    for (k, v) in stats {
        writeln!(out, "{k}={v}")?;
    }
    Ok(())
}

/// Parse a `key=value` report back into a map. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_stats(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_matches_schema() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[TraceRow::default()], 1).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("t,px,py,pz,vx,vy,vz,qw,qx,qy,qz,roll,pitch,yaw,wx,wy,wz,"));
        assert!(header.ends_with("d1,d2,sat_any,wind_x,wind_y,wind_z"));
        assert_eq!(header.split(',').count(), 35);
        assert_eq!(lines.next().unwrap().split(',').count(), 35);
    }

    #[test]
    fn stride_downsamples() {
        let rows = vec![TraceRow::default(); 10];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows, 4).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 3);
    }

    #[test]
    fn stats_round_trip() {
        let mut m = BTreeMap::new();
        m.insert("b".to_string(), "2".to_string());
        m.insert("a".to_string(), "x y".to_string());
        let mut buf = Vec::new();
        write_stats(&mut buf, &m).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "a=x y\nb=2\n");
        assert_eq!(parse_stats(&text), m);
    }
}
