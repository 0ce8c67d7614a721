//! DG discretization of the rescaled drift term `c d/dxi (xi g)`.
//!
//! Integrating against `P_m` on cell `j` gives edge fluxes and a volume term,
//!
//! ```text
//! d_{j,m} = (2m+1)/dxi * c * [ h_{j+1/2} - (-1)^m h_{j-1/2} - Vol_{j,m} ],
//! ```
//!
//! with the upwind flux `h_e = xi_e * (xi_e > 0 ? left trace : right trace)`
//! (characteristic speed `c xi` points away from the origin, so both domain
//! ends are pure outflow). The volume integral reduces to two constant
//! `(k+1)^2` matrices, so the whole term is linear algebra on the
//! coefficients, with no per-call quadrature.

use crate::field::DGField;
use crate::params::ModelParams;
use crate::quadrature::{legendre_derivatives, legendre_values, QuadratureRule};

/// Precomputed volume-term matrices `A[r][m] = integral P_r P_m'` and
/// `B[r][m] = integral u P_r P_m'` over `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct DriftTables {
    degree: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl DriftTables {
    pub fn build(degree: usize) -> Self {
        let kp1 = degree + 1;
        // Integrands have degree at most 2k, exact for k+1 Gauss points; take
        // one more for headroom.
        let quad = QuadratureRule::gauss_legendre(degree + 2).expect("degree + 2 >= 1");
        let mut a = vec![0.0; kp1 * kp1];
        let mut b = vec![0.0; kp1 * kp1];
        let mut vals = vec![0.0; kp1];
        let mut ders = vec![0.0; kp1];
        for (&u, &w) in quad.nodes.iter().zip(&quad.weights) {
            legendre_values(degree, u, &mut vals);
            legendre_derivatives(degree, u, &mut ders);
            for r in 0..kp1 {
                for m in 0..kp1 {
                    a[r * kp1 + m] += w * vals[r] * ders[m];
                    b[r * kp1 + m] += w * u * vals[r] * ders[m];
                }
            }
        }
        Self { degree, a, b }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

/// The DG form of `+ c d/dxi (xi g)`. The time stepper subtracts this from
/// the collision term, so a steady profile satisfies
/// `collision_rhs(g) - drift_rhs(g) = 0`.
///
/// Interior edges take the upwind trace. The two outer edges carry zero
/// flux, so the edge contributions telescope to nothing and the truncated
/// system conserves mass exactly, whatever the tails do.
pub fn drift_rhs(field: &DGField, params: &ModelParams, tables: &DriftTables) -> DGField {
    let grid = field.grid();
    let n = grid.n_cells();
    let kp1 = field.degree() + 1;
    debug_assert_eq!(tables.degree, field.degree());
    let dxi = grid.dxi();
    let half = 0.5 * dxi;
    let c = params.drift_coeff;

    // Upwind edge fluxes xi_e * g_upwind(xi_e); at xi_e = 0 the flux vanishes
    // identically.
    let mut flux = vec![0.0; n + 1];
    for e in 1..n {
        let xi_e = grid.edge(e);
        flux[e] = if xi_e > 0.0 {
            xi_e * field.trace_left(e)
        } else if xi_e < 0.0 {
            xi_e * field.trace_right(e)
        } else {
            0.0
        };
    }

    let mut coeffs = vec![0.0; n * kp1];
    for j in 0..n {
        let xc = grid.cell_center(j);
        for m in 0..kp1 {
            // Vol_{j,m} = sum_r c_{j,r} (xc A[r][m] + half B[r][m]).
            let mut vol = 0.0;
            for r in 0..kp1 {
                vol += field.coeff(j, r) * (xc * tables.a[r * kp1 + m] + half * tables.b[r * kp1 + m]);
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[j * kp1 + m] =
                (2.0 * m as f64 + 1.0) / dxi * c * (flux[j + 1] - sign * flux[j] - vol);
        }
    }
    DGField::from_coeffs(grid.clone(), field.degree(), coeffs)
}
