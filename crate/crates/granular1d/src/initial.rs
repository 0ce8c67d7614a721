//! Initial data shared by the DG solver (densities to project) and the
//! particle sampler (position draws). All presets have mass 1, zero momentum,
//! and unit energy.

use rand::Rng;

/// The explicit steady profile of the rescaled gamma = 0 dynamics,
/// `(2/pi) (1 + xi^2)^{-2}`.
pub fn m1_profile(xi: f64) -> f64 {
    let d = 1.0 + xi * xi;
    2.0 * std::f64::consts::FRAC_1_PI / (d * d)
}

/// CDF of [`m1_profile`]: `1/2 + (arctan xi + xi/(1+xi^2)) / pi`.
pub fn m1_cdf(xi: f64) -> f64 {
    0.5 + (xi.atan() + xi / (1.0 + xi * xi)) * std::f64::consts::FRAC_1_PI
}

/// Inverse CDF by bisection; the CDF is strictly increasing, so 80 halvings
/// from a bracket that always contains the root pin the quantile to full
/// double precision.
pub fn m1_quantile(u: f64) -> f64 {
    assert!(u > 0.0 && u < 1.0, "quantile argument must lie in (0, 1)");
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    while m1_cdf(lo) > u {
        lo *= 2.0;
    }
    while m1_cdf(hi) < u {
        hi *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if m1_cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Initial datum presets. `Table` is a sampled density (xi, g) for projection
/// only; `Positions` is a raw particle snapshot for sampler runs only.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Uniform density `1/(2 sqrt 3)` on `[-sqrt 3, sqrt 3]`.
    UniformBox,
    /// Standard normal density.
    Gaussian,
    /// The explicit gamma = 0 steady profile.
    M1,
    /// Piecewise-linear density through the given (xi, g) points, ascending xi.
    Table(Vec<(f64, f64)>),
    /// Verbatim particle positions.
    Positions(Vec<f64>),
}

impl InitialCondition {
    pub fn has_density(&self) -> bool {
        !matches!(self, Self::Positions(_))
    }

    /// Density at `xi`. Panics for `Positions`, which has no density.
    pub fn density(&self, xi: f64) -> f64 {
        match self {
            Self::UniformBox => {
                if xi.abs() <= SQRT3 {
                    0.5 / SQRT3
                } else {
                    0.0
                }
            }
            Self::Gaussian => {
                (-0.5 * xi * xi).exp() / (2.0 * std::f64::consts::PI).sqrt()
            }
            Self::M1 => m1_profile(xi),
            Self::Table(points) => interp_linear(points, xi),
            Self::Positions(_) => {
                panic!("a position snapshot has no density; use it with sampler modes")
            }
        }
    }

    /// Jump locations of the density, used to split projection cells.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::UniformBox => vec![-SQRT3, SQRT3],
            Self::Table(points) => {
                let mut b = Vec::new();
                if let (Some(first), Some(last)) = (points.first(), points.last()) {
                    b.push(first.0);
                    b.push(last.0);
                }
                b
            }
            _ => Vec::new(),
        }
    }

    /// `n` particle positions. `Positions` returns the stored snapshot
    /// verbatim (its own length wins); `Table` has no sampler.
    pub fn positions(&self, n: usize, rng: &mut impl Rng) -> Vec<f64> {
        match self {
            Self::UniformBox => (0..n).map(|_| rng.gen_range(-SQRT3..SQRT3)).collect(),
            Self::Gaussian => (0..n).map(|_| sample_normal(rng)).collect(),
            Self::M1 => (0..n)
                .map(|_| {
                    let u = loop {
                        let u: f64 = rng.gen();
                        if u > 0.0 {
                            break u;
                        }
                    };
                    m1_quantile(u)
                })
                .collect(),
            Self::Positions(p) => p.clone(),
            Self::Table(_) => {
                panic!("a density table has no sampler; use a position snapshot")
            }
        }
    }
}

/// One standard normal draw by Box-Muller.
fn sample_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn interp_linear(points: &[(f64, f64)], xi: f64) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    if xi < points[0].0 || xi > points[points.len() - 1].0 {
        return 0.0;
    }
    let idx = points.partition_point(|&(x, _)| x <= xi);
    if idx == 0 {
        return points[0].1;
    }
    if idx == points.len() {
        return points[points.len() - 1].1;
    }
    let (x0, g0) = points[idx - 1];
    let (x1, g1) = points[idx];
    if x1 == x0 {
        return g1;
    }
    g0 + (g1 - g0) * (xi - x0) / (x1 - x0)
}
