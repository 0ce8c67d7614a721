//! Model parameters of the collision rule and the rescaled drift.

use crate::error::{invalid, Error};
use serde::{Deserialize, Serialize};

/// Collision rule `(x, y) -> (a x + b y, b x + a y)` with `b = 1 - a`, kernel
/// `|x - y|^gamma`, and drift coefficient `c` of the rescaled equation
/// `d_s g + c d_xi (xi g) = Q(g, g)`.
///
/// `c = 0` selects the original (unscaled) equation. `c = a*b` makes the
/// rescaled gamma = 0 dynamics conserve energy exactly, which is the right
/// normalization for comparing against the explicit steady profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub drift_coeff: f64,
}

impl ModelParams {
    pub fn new(gamma: f64, a: f64, drift_coeff: f64) -> Result<Self, Error> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(invalid(format!("gamma must satisfy gamma >= 0, got {gamma}")));
        }
        if !(a > 0.0 && a < 1.0) {
            return Err(invalid(format!("a must lie in (0, 1), got {a}")));
        }
        if !drift_coeff.is_finite() || drift_coeff < 0.0 {
            return Err(invalid(format!(
                "drift_coeff must satisfy c >= 0, got {drift_coeff}"
            )));
        }
        Ok(Self {
            gamma,
            a,
            b: 1.0 - a,
            drift_coeff,
        })
    }

    /// Default drift coefficient: `a*b` when gamma = 0 (energy-conserving
    /// normalization), `1` otherwise.
    pub fn default_drift(gamma: f64, a: f64) -> f64 {
        if gamma == 0.0 {
            a * (1.0 - a)
        } else {
            1.0
        }
    }

    /// Energy dissipation factor `a*b` of a single collision.
    pub fn ab(&self) -> f64 {
        self.a * self.b
    }

    /// `1 - a^k - b^k`, the coefficient in the moment dissipation bounds;
    /// positive for every k > 1.
    pub fn povzner_coefficient(&self, k: f64) -> f64 {
        1.0 - self.a.powf(k) - self.b.powf(k)
    }

    pub fn kernel(&self, dx: f64) -> f64 {
        let d = dx.abs();
        // powf(0, 0) = 1 in IEEE arithmetic, which is the right convention:
        // the gamma = 0 kernel is identically 1, including at x = y.
        if self.gamma == 0.0 {
            1.0
        } else if self.gamma == 1.0 {
            d
        } else if self.gamma == 2.0 {
            d * d
        } else {
            d.powf(self.gamma)
        }
    }
}
