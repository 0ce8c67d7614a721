//! Uniform symmetric grid on `[-L, L]`.

use crate::error::{invalid, Error};

/// `n_cells` equal cells covering `[-L, L]`. Edges are stored explicitly and
/// built symmetrically, so `edge(0) = -L`, `edge(N) = L`, and
/// `edge(N - e) = -edge(e)` hold exactly in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    half_width: f64,
    n_cells: usize,
    dxi: f64,
    edges: Vec<f64>,
}

impl Grid {
    pub fn new(half_width: f64, n_cells: usize) -> Result<Self, Error> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid(format!("half width must be positive, got {half_width}")));
        }
        if n_cells == 0 {
            return Err(invalid("grid needs at least one cell"));
        }
        let dxi = 2.0 * half_width / n_cells as f64;
        let mut edges = vec![0.0; n_cells + 1];
        for e in 0..=n_cells / 2 {
            let left = -half_width + e as f64 * dxi;
            edges[e] = left;
            edges[n_cells - e] = -left;
        }
        // Even cell count: the middle edge is exactly 0, not -0.
        if n_cells % 2 == 0 {
            edges[n_cells / 2] = 0.0;
        }
        Ok(Self {
            half_width,
            n_cells,
            dxi,
            edges,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Uniform cell width `2L / N`.
    pub fn dxi(&self) -> f64 {
        self.dxi
    }

    /// Edge `xi_{j - 1/2}`, for `e` in `0..=N`.
    pub fn edge(&self, e: usize) -> f64 {
        self.edges[e]
    }

    /// All `N + 1` edges, ascending.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn cell_center(&self, j: usize) -> f64 {
        0.5 * (self.edges[j] + self.edges[j + 1])
    }

    /// Cell index containing `xi`; points on an interior edge map to the cell
    /// on the right, and `xi = L` maps to the last cell.
    pub fn cell_of(&self, xi: f64) -> Option<usize> {
        if !(xi >= -self.half_width && xi <= self.half_width) {
            return None;
        }
        let j = ((xi + self.half_width) / self.dxi) as usize;
        Some(j.min(self.n_cells - 1))
    }

    /// Local coordinate of `xi` in cell `j`, in `[-1, 1]`.
    pub fn local_coord(&self, j: usize, xi: f64) -> f64 {
        2.0 * (xi - self.cell_center(j)) / self.dxi
    }
}
