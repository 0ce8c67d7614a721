//! Piecewise-polynomial DG field: per cell `j`, coefficients against the
//! shifted Legendre basis `P_m(2(xi - xi_j)/dxi)`, `m = 0..=k`.

use std::sync::Arc;

use crate::error::Error;
use crate::grid::Grid;
use crate::moments::{MomentRecord, RECORDED_ORDERS};
use crate::quadrature::{legendre_values, QuadratureRule};

#[derive(Debug, Clone, PartialEq)]
pub struct DGField {
    grid: Arc<Grid>,
    degree: usize,
    /// Row-major `[cell][mode]`.
    coeffs: Vec<f64>,
}

impl DGField {
    pub fn zeros(grid: Arc<Grid>, degree: usize) -> Self {
        let coeffs = vec![0.0; grid.n_cells() * (degree + 1)];
        Self {
            grid,
            degree,
            coeffs,
        }
    }

    pub fn from_coeffs(grid: Arc<Grid>, degree: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), grid.n_cells() * (degree + 1));
        Self {
            grid,
            degree,
            coeffs,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, cell: usize, mode: usize) -> f64 {
        self.coeffs[cell * (self.degree + 1) + mode]
    }

    fn modes(&self) -> usize {
        self.degree + 1
    }

    /// Value at `xi` from inside the containing cell. Points on an interior
    /// edge take the right cell's trace; use [`Self::trace_left`] /
    /// [`Self::trace_right`] to pick a side explicitly.
    pub fn eval(&self, xi: f64) -> Result<f64, Error> {
        let j = self.grid.cell_of(xi).ok_or(Error::OutOfDomain {
            xi,
            half_width: self.grid.half_width(),
        })?;
        Ok(self.eval_in_cell(j, self.grid.local_coord(j, xi)))
    }

    /// Value at local coordinate `u` in cell `j` (no domain check).
    pub fn eval_in_cell(&self, j: usize, u: f64) -> f64 {
        let base = j * self.modes();
        let mut vals = [0.0; 16];
        debug_assert!(self.degree < 16);
        legendre_values(self.degree, u, &mut vals);
        let mut acc = 0.0;
        for m in 0..self.modes() {
            acc += self.coeffs[base + m] * vals[m];
        }
        acc
    }

    /// Trace at interior edge `e` from the left cell `e - 1`, for `e` in `1..=N`.
    pub fn trace_left(&self, e: usize) -> f64 {
        let base = (e - 1) * self.modes();
        self.coeffs[base..base + self.modes()].iter().sum()
    }

    /// Trace at interior edge `e` from the right cell `e`, for `e` in `0..N`.
    pub fn trace_right(&self, e: usize) -> f64 {
        let base = e * self.modes();
        let mut acc = 0.0;
        let mut sign = 1.0;
        for m in 0..self.modes() {
            acc += sign * self.coeffs[base + m];
            sign = -sign;
        }
        acc
    }

    /// `integral g dxi`, exact from the cell averages.
    pub fn mass(&self) -> f64 {
        let dxi = self.grid.dxi();
        (0..self.grid.n_cells()).map(|j| self.coeff(j, 0) * dxi).sum()
    }

    /// `integral xi g dxi`, exact for degree >= 1.
    pub fn momentum(&self) -> f64 {
        let dxi = self.grid.dxi();
        let mut acc = 0.0;
        for j in 0..self.grid.n_cells() {
            let mut cell = self.coeff(j, 0) * self.grid.cell_center(j);
            if self.degree >= 1 {
                // integral of P_1(u)^2 over [-1,1] is 2/3.
                cell += self.coeff(j, 1) * dxi / 6.0;
            }
            acc += cell * dxi;
        }
        acc
    }

    /// `integral |xi|^p g dxi` by per-cell quadrature.
    pub fn moment(&self, p: f64, quad: &QuadratureRule) -> f64 {
        if p == 0.0 {
            return self.mass();
        }
        let dxi = self.grid.dxi();
        let mut acc = 0.0;
        for j in 0..self.grid.n_cells() {
            let xc = self.grid.cell_center(j);
            let mut cell = 0.0;
            for (&t, &w) in quad.nodes.iter().zip(&quad.weights) {
                let xi = xc + 0.5 * dxi * t;
                cell += w * xi.abs().powf(p) * self.eval_in_cell(j, t);
            }
            acc += 0.5 * dxi * cell;
        }
        acc
    }

    /// Absolute moments for the given orders, as a [`MomentRecord`].
    pub fn moment_record(&self, orders: &[f64], time: f64, rescaled: bool, quad: &QuadratureRule) -> MomentRecord {
        let moments = orders.iter().map(|&p| (p, self.moment(p, quad))).collect();
        MomentRecord {
            time,
            rescaled,
            moments,
            momentum: self.momentum(),
        }
    }

    pub fn standard_record(&self, time: f64, rescaled: bool, quad: &QuadratureRule) -> MomentRecord {
        self.moment_record(&RECORDED_ORDERS, time, rescaled, quad)
    }

    /// L2 norm, exact via the orthogonality of the basis.
    pub fn l2_norm(&self) -> f64 {
        let dxi = self.grid.dxi();
        let mut acc = 0.0;
        for j in 0..self.grid.n_cells() {
            for m in 0..self.modes() {
                let c = self.coeff(j, m);
                acc += c * c * dxi / (2.0 * m as f64 + 1.0);
            }
        }
        acc.sqrt()
    }

    /// Minimum value over all quadrature nodes and cell edges, a cheap proxy
    /// for pointwise nonnegativity checks.
    pub fn min_on_nodes(&self, quad: &QuadratureRule) -> f64 {
        let mut min = f64::INFINITY;
        for j in 0..self.grid.n_cells() {
            for &t in &quad.nodes {
                min = min.min(self.eval_in_cell(j, t));
            }
            min = min.min(self.eval_in_cell(j, -1.0));
            min = min.min(self.eval_in_cell(j, 1.0));
        }
        min
    }

    /// `self + scale * other`, elementwise on coefficients.
    pub fn axpy(&self, scale: f64, other: &DGField) -> DGField {
        debug_assert_eq!(self.coeffs.len(), other.coeffs.len());
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&x, &y)| x + scale * y)
            .collect();
        DGField {
            grid: self.grid.clone(),
            degree: self.degree,
            coeffs,
        }
    }

    /// `alpha * self + beta * other`.
    pub fn linear_comb(&self, alpha: f64, beta: f64, other: &DGField) -> DGField {
        debug_assert_eq!(self.coeffs.len(), other.coeffs.len());
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&x, &y)| alpha * x + beta * y)
            .collect();
        DGField {
            grid: self.grid.clone(),
            degree: self.degree,
            coeffs,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

/// L2 projection of `profile` onto the DG space, cell by cell.
pub fn project_initial(
    profile: impl Fn(f64) -> f64,
    grid: &Arc<Grid>,
    degree: usize,
    quad: &QuadratureRule,
) -> DGField {
    let mut field = DGField::zeros(grid.clone(), degree);
    let dxi = grid.dxi();
    let modes = degree + 1;
    let mut vals = vec![0.0; modes];
    for j in 0..grid.n_cells() {
        let xc = grid.cell_center(j);
        let base = j * modes;
        for (&t, &w) in quad.nodes.iter().zip(&quad.weights) {
            let g = profile(xc + 0.5 * dxi * t);
            legendre_values(degree, t, &mut vals);
            for m in 0..modes {
                field.coeffs[base + m] += w * g * vals[m];
            }
        }
        for m in 0..modes {
            // Normalization: integral of P_m^2 over [-1,1] is 2/(2m+1).
            field.coeffs[base + m] *= (2.0 * m as f64 + 1.0) / 2.0;
        }
    }
    field
}

/// Like [`project_initial`], but splits each cell at the given breakpoints so
/// that data with known jumps (for example an indicator profile) is projected
/// with exact per-piece quadrature. Breakpoints outside a cell are ignored.
pub fn project_piecewise(
    profile: impl Fn(f64) -> f64,
    breakpoints: &[f64],
    grid: &Arc<Grid>,
    degree: usize,
    quad: &QuadratureRule,
) -> DGField {
    let mut field = DGField::zeros(grid.clone(), degree);
    let dxi = grid.dxi();
    let modes = degree + 1;
    let mut vals = vec![0.0; modes];
    for j in 0..grid.n_cells() {
        let (lo, hi) = (grid.edge(j), grid.edge(j + 1));
        let mut cuts: Vec<f64> = vec![lo];
        for &b in breakpoints {
            if b > lo && b < hi {
                cuts.push(b);
            }
        }
        cuts.push(hi);
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let xc = grid.cell_center(j);
        let base = j * modes;
        for piece in cuts.windows(2) {
            let (pl, ph) = (piece[0], piece[1]);
            let half = 0.5 * (ph - pl);
            let mid = 0.5 * (ph + pl);
            if half <= 0.0 {
                continue;
            }
            for (&t, &w) in quad.nodes.iter().zip(&quad.weights) {
                let xi = mid + half * t;
                // Evaluate strictly inside the piece; the profile may jump at
                // the cut itself.
                let g = profile(xi);
                let u = 2.0 * (xi - xc) / dxi;
                legendre_values(degree, u, &mut vals);
                let scale = w * half * 2.0 / dxi; // d(xi) measure in u units
                for m in 0..modes {
                    field.coeffs[base + m] += scale * g * vals[m];
                }
            }
        }
        for m in 0..modes {
            field.coeffs[base + m] *= (2.0 * m as f64 + 1.0) / 2.0;
        }
    }
    field
}
