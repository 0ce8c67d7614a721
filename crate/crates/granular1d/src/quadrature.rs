//! Gauss-Legendre quadrature on the reference interval `[-1, 1]` and Legendre
//! polynomial evaluation. The DG basis on each cell is `P_m(2(xi - xi_j)/dxi)`,
//! so every integral in the scheme reduces to weighted sums over these nodes.

use crate::error::{invalid, Error};

/// Nodes and weights on `[-1, 1]`. A rule with `n` Gauss points integrates
/// polynomials of degree `2n - 1` exactly; a composite rule of `p` panels with
/// `n` points each is exact per panel, which matters when the integrand has
/// known interior breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Plain Gauss-Legendre rule with `n` points.
    pub fn gauss_legendre(n: usize) -> Result<Self, Error> {
        if n == 0 {
            return Err(invalid("quadrature order must be at least 1"));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Newton iteration on P_n from the Chebyshev-like initial guess;
        // converges in a handful of steps for any practical n.
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 5e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // The guess enumerates roots from the right; store symmetrically.
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
            let (_, d) = legendre_with_derivative(n, 0.0);
            weights[n / 2] = 2.0 / (d * d);
        }
        Ok(Self { nodes, weights })
    }

    /// Composite rule: `panels` equal subintervals of `[-1, 1]`, each carrying
    /// a Gauss-Legendre rule with `n` points. Used for projecting initial data
    /// whose breakpoints are not aligned with cell edges.
    pub fn composite_gauss(n: usize, panels: usize) -> Result<Self, Error> {
        if panels == 0 {
            return Err(invalid("composite rule needs at least 1 panel"));
        }
        let base = Self::gauss_legendre(n)?;
        let h = 2.0 / panels as f64;
        let mut nodes = Vec::with_capacity(n * panels);
        let mut weights = Vec::with_capacity(n * panels);
        for p in 0..panels {
            let mid = -1.0 + (p as f64 + 0.5) * h;
            for (&t, &w) in base.nodes.iter().zip(&base.weights) {
                nodes.push(mid + 0.5 * h * t);
                weights.push(0.5 * h * w);
            }
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of `f` over `[-1, 1]`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for m in 1..n {
        let mf = m as f64;
        let p_next = ((2.0 * mf + 1.0) * x * p - mf * p_prev) / (mf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (p_prev - x * p) / (1.0 - x * x);
    (p, d)
}

/// `P_m(x)` for `m = 0..=degree`, written into `out`.
pub fn legendre_values(degree: usize, x: f64, out: &mut [f64]) {
    debug_assert!(out.len() > degree);
    out[0] = 1.0;
    if degree == 0 {
        return;
    }
    out[1] = x;
    for m in 1..degree {
        let mf = m as f64;
        out[m + 1] = ((2.0 * mf + 1.0) * x * out[m] - mf * out[m - 1]) / (mf + 1.0);
    }
}

/// `P_m'(x)` for `m = 0..=degree`, from the derivative recurrence
/// `P_{m+1}' = P_{m-1}' + (2m+1) P_m`.
pub fn legendre_derivatives(degree: usize, x: f64, out: &mut [f64]) {
    debug_assert!(out.len() > degree);
    let mut vals = vec![0.0; degree + 1];
    legendre_values(degree, x, &mut vals);
    out[0] = 0.0;
    if degree == 0 {
        return;
    }
    out[1] = 1.0;
    for m in 1..degree {
        out[m + 1] = out[m - 1] + (2.0 * m as f64 + 1.0) * vals[m];
    }
}
