//! Time-stamped absolute-moment records shared by the solver and the sampler.

use serde::{Deserialize, Serialize};

/// Moments `M_p = integral |xi|^p dmu` at one instant, plus the signed first
/// moment (momentum), which the absolute moments cannot recover.
///
/// `time` is original time t for unscaled runs and self-similar time s for
/// rescaled ones; `rescaled` says which.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRecord {
    pub time: f64,
    pub rescaled: bool,
    /// `(order, value)` pairs, ascending in order.
    pub moments: Vec<(f64, f64)>,
    pub momentum: f64,
}

impl MomentRecord {
    /// `M_p` if order `p` was recorded.
    pub fn moment(&self, p: f64) -> Option<f64> {
        self.moments
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, v)| *v)
    }

    pub fn mass(&self) -> f64 {
        self.moment(0.0).unwrap_or(f64::NAN)
    }

    /// Alias for the second moment.
    pub fn energy(&self) -> f64 {
        self.moment(2.0).unwrap_or(f64::NAN)
    }
}

/// Standard orders recorded by the run drivers.
pub const RECORDED_ORDERS: [f64; 5] = [0.0, 1.0, 2.0, 3.0, 4.0];
