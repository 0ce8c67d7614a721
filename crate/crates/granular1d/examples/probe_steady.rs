use granular1d::collision::CollisionWorkspace;
use granular1d::drift::DriftTables;
use granular1d::field::project_piecewise;
use granular1d::grid::Grid;
use granular1d::initial::m1_profile;
use granular1d::params::ModelParams;
use granular1d::quadrature::QuadratureRule;
use granular1d::timestep::{run_to_steady, RunOptions};
use std::sync::Arc;

fn main() {
    let a = 0.5;
    let params = ModelParams::new(0.0, a, ModelParams::default_drift(0.0, a)).unwrap();
    let tables = DriftTables::build(2);
    let quad = QuadratureRule::gauss_legendre(6).unwrap();
    for (l, n) in [(12.0, 48usize), (12.0, 96)] {
        let grid = Arc::new(Grid::new(l, n).unwrap());
        let ws = CollisionWorkspace::build(&grid, 2, &quad, &params, 64 << 20).unwrap();
        let half = 3.0f64.sqrt();
        let g0 = project_piecewise(
            |x| if x.abs() <= half { 0.5 / half } else { 0.0 },
            &[-half, half],
            &grid,
            2,
            &quad,
        );
        let opts = RunOptions { cfl: 0.8, threshold: 1e-4, ..RunOptions::default() };
        let r = run_to_steady(&g0, &ws, &tables, &params, &opts, &quad).unwrap();
        println!(
            "L={l} N={n}: steps={} s={:.2} res={:.2e} mass={:.10} M2={:.8}",
            r.n_steps, r.time, r.final_residual, r.field.mass(),
            r.moment_history.last().unwrap().energy()
        );
        let dxi = grid.dxi();
        // Edge 0, center of cell right of 0, next edge, etc.
        for xi in [0.0, 0.25 * dxi, 0.5 * dxi, dxi, 1.5 * dxi, 2.0 * dxi, 0.5, 1.0, 2.0, 4.0] {
            let left = r.field.eval(xi - 1e-12).unwrap();
            let right = r.field.eval(xi + 1e-12).unwrap();
            println!(
                "  xi={xi:7.4}: left={left:9.6} right={right:9.6}  M1={:9.6}",
                m1_profile(xi)
            );
        }
        // L1 distance via fine sampling.
        let mut l1 = 0.0;
        let samples = 4000;
        for i in 0..samples {
            let xi = -l + (i as f64 + 0.5) * (2.0 * l / samples as f64);
            l1 += (r.field.eval(xi).unwrap() - m1_profile(xi)).abs() * (2.0 * l / samples as f64);
        }
        println!("  L1 distance ~ {l1:.4e}");
    }
}
