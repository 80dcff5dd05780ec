//! Error statistics over a trace.

use crate::error::{Error, Result};
use crate::vehicle::frames::wrap_angle;

use super::trace::TraceRow;

/// Quartiles and maximum of an absolute-error series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

/// Nearest-rank percentile of a sorted, nonempty slice, `p` in (0, 1].
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = (p * n as f64).ceil().max(1.0) as usize;
    sorted[rank.min(n) - 1]
}

impl ErrorStats {
    /// Statistics of `|e|` over the series.
    pub fn from_errors(errors: &[f64]) -> Result<ErrorStats> {
        if errors.is_empty() {
            return Err(Error::EmptyTrace);
        }
        let mut abs: Vec<f64> = errors.iter().map(|e| e.abs()).collect();
        abs.sort_by(f64::total_cmp);
        Ok(ErrorStats {
            q25: nearest_rank(&abs, 0.25),
            median: nearest_rank(&abs, 0.5),
            q75: nearest_rank(&abs, 0.75),
            max: *abs.last().expect("nonempty"),
        })
    }

    pub fn scaled(&self, k: f64) -> ErrorStats {
        ErrorStats {
            q25: self.q25 * k,
            median: self.median * k,
            q75: self.q75 * k,
            max: self.max * k,
        }
    }
}

/// A tracked quantity whose error can be summarized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Euclidean position error, m.
    Position,
    X,
    Y,
    Z,
    /// Attitude errors in rad, wrapped to (−π, π].
    Roll,
    Pitch,
    Yaw,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Position => "pos",
            Channel::X => "x",
            Channel::Y => "y",
            Channel::Z => "z",
            Channel::Roll => "roll",
            Channel::Pitch => "pitch",
            Channel::Yaw => "yaw",
        }
    }

    pub fn is_angle(self) -> bool {
        matches!(self, Channel::Roll | Channel::Pitch | Channel::Yaw)
    }

    /// Signed error (actual − reference) for one row.
    pub fn error(self, row: &TraceRow) -> f64 {
        match self {
            Channel::Position => (row.position - row.position_d).norm(),
            Channel::X => row.position.x - row.position_d.x,
            Channel::Y => row.position.y - row.position_d.y,
            Channel::Z => row.position.z - row.position_d.z,
            Channel::Roll => wrap_angle(row.euler[0] - row.euler_d[0]),
            Channel::Pitch => wrap_angle(row.euler[1] - row.euler_d[1]),
            Channel::Yaw => wrap_angle(row.euler[2] - row.euler_d[2]),
        }
    }
}

/// Error statistics of `channel` over rows with `t0 <= t <= t1`.
pub fn compute_metrics(trace: &[TraceRow], channel: Channel, window: Option<(f64, f64)>) -> Result<ErrorStats> {
    let errors: Vec<f64> = trace
        .iter()
        .filter(|r| window.is_none_or(|(a, b)| r.t >= a && r.t <= b))
        .map(|r| channel.error(r))
        .collect();
    ErrorStats::from_errors(&errors)
}
