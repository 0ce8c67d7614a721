//! Explicit time stepping: a three-stage strong-stability Runge-Kutta core,
//! rate-aware step-size control, and the steady / fixed-horizon run drivers.

use std::time::{Duration, Instant};

use crate::collision::{collision_rhs_with_rate, CollisionWorkspace};
use crate::drift::{drift_rhs, DriftTables};
use crate::field::DGField;
use crate::grid::Grid;
use crate::moments::MomentRecord;
use crate::params::ModelParams;
use crate::quadrature::QuadratureRule;

/// Knobs shared by the run drivers.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Step-size safety factor against the rate bound of [`choose_dt`].
    pub cfl: f64,
    /// Steady runs stop once the residual drops below this (absolute).
    pub threshold: f64,
    pub max_steps: usize,
    /// Moments are recorded every this many steps (and at both endpoints).
    pub record_every: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            cfl: 0.3,
            threshold: 1.0e-4,
            max_steps: 200_000,
            record_every: 20,
        }
    }
}

/// Everything a finished (or aborted) run leaves behind.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub field: DGField,
    pub n_steps: usize,
    /// Final time: self-similar s when the drift term is active, original t
    /// otherwise.
    pub time: f64,
    /// Residual of the last step taken, `|g_next - g| / dt` in L2.
    pub final_residual: f64,
    pub moment_history: Vec<MomentRecord>,
    /// `(time, residual)` after every step.
    pub residual_history: Vec<(f64, f64)>,
    pub wall_time: Duration,
}

/// Abnormal end of a run. Both variants carry the state at the point of
/// failure so callers can inspect or dump it.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("solution lost finiteness or exceeded the norm cap after {} steps (time {:.6})", .0.n_steps, .0.time)]
    Blowup(Box<RunResult>),
    #[error("step budget exhausted after {} steps (time {:.6}, residual {:.3e})", .0.n_steps, .0.time, .0.final_residual)]
    MaxSteps(Box<RunResult>),
}

impl RunError {
    /// The partial result carried by either variant.
    pub fn partial(&self) -> &RunResult {
        match self {
            RunError::Blowup(r) | RunError::MaxSteps(r) => r,
        }
    }
}

/// One step of the three-stage strong-stability Runge-Kutta scheme.
///
/// `k1` must be `rhs(field)`; the remaining two evaluations are taken here.
/// Passing stage one in lets drivers reuse it for step-size control.
pub fn rk3_step<F>(field: &DGField, k1: &DGField, dt: f64, mut rhs: F) -> DGField
where
    F: FnMut(&DGField) -> DGField,
{
    let u1 = field.axpy(dt, k1);
    let k2 = rhs(&u1);
    let u2 = field
        .linear_comb(0.75, 0.25, &u1)
        .axpy(0.25 * dt, &k2);
    let k3 = rhs(&u2);
    field
        .linear_comb(1.0 / 3.0, 2.0 / 3.0, &u2)
        .axpy(2.0 / 3.0 * dt, &k3)
}

/// Step size from the stability bound: the advective speed `c * L` resolved
/// at cell scale with the usual `2k + 1` degree penalty, plus the largest
/// collision rate seen on the quadrature nodes.
pub fn choose_dt(cfl: f64, params: &ModelParams, grid: &Grid, degree: usize, rate: f64) -> f64 {
    let advective = params.drift_coeff * (grid.half_width() / grid.dxi()) * (2 * degree + 1) as f64;
    let denom = advective + rate;
    if denom > 0.0 {
        cfl / denom
    } else {
        f64::INFINITY
    }
}

/// L2 norm of the discrete time derivative `(next - prev) / dt`.
pub fn residual_norm(prev: &DGField, next: &DGField, dt: f64) -> f64 {
    next.axpy(-1.0, prev).l2_norm() / dt
}

/// Collision minus drift, with the collision rate bound as a byproduct.
/// The drift term is skipped entirely when the coefficient is zero, which
/// turns the dynamics into the original (unrescaled) equation.
fn total_rhs(
    field: &DGField,
    ws: &CollisionWorkspace,
    tables: &DriftTables,
    params: &ModelParams,
) -> (DGField, f64) {
    let (coll, rate) = collision_rhs_with_rate(field, ws);
    if params.drift_coeff != 0.0 {
        (coll.axpy(-1.0, &drift_rhs(field, params, tables)), rate)
    } else {
        (coll, rate)
    }
}

/// March until the residual drops below `opts.threshold`.
pub fn run_to_steady(
    initial: &DGField,
    ws: &CollisionWorkspace,
    tables: &DriftTables,
    params: &ModelParams,
    opts: &RunOptions,
    quad: &QuadratureRule,
) -> Result<RunResult, RunError> {
    march(initial, ws, tables, params, opts, quad, None)
}

/// March the dynamics over `[0, horizon]`, clamping the final step so the
/// end time is hit exactly.
pub fn run_transient(
    initial: &DGField,
    ws: &CollisionWorkspace,
    tables: &DriftTables,
    params: &ModelParams,
    horizon: f64,
    opts: &RunOptions,
    quad: &QuadratureRule,
) -> Result<RunResult, RunError> {
    march(initial, ws, tables, params, opts, quad, Some(horizon))
}

/// Shared driver. `horizon = None` runs to the residual threshold, `Some(T)`
/// runs to time `T` with the last step clamped.
fn march(
    initial: &DGField,
    ws: &CollisionWorkspace,
    tables: &DriftTables,
    params: &ModelParams,
    opts: &RunOptions,
    quad: &QuadratureRule,
    horizon: Option<f64>,
) -> Result<RunResult, RunError> {
    let start = Instant::now();
    let rescaled = params.drift_coeff != 0.0;
    let norm_cap = 1.0e9_f64.max(1.0e6 * initial.l2_norm());

    let mut field = initial.clone();
    let mut time = 0.0;
    let mut n_steps = 0usize;
    let mut final_residual = f64::INFINITY;
    let mut moment_history = vec![field.standard_record(time, rescaled, quad)];
    let mut residual_history = Vec::new();

    let finish = |field: DGField,
                  n_steps: usize,
                  time: f64,
                  final_residual: f64,
                  mut moment_history: Vec<MomentRecord>,
                  residual_history: Vec<(f64, f64)>| {
        if moment_history.last().map(|r| r.time) != Some(time) {
            moment_history.push(field.standard_record(time, rescaled, quad));
        }
        RunResult {
            field,
            n_steps,
            time,
            final_residual,
            moment_history,
            residual_history,
            wall_time: start.elapsed(),
        }
    };

    loop {
        if let Some(t_end) = horizon {
            if time >= t_end * (1.0 - 1.0e-14) {
                return Ok(finish(field, n_steps, time, final_residual, moment_history, residual_history));
            }
        }
        if n_steps >= opts.max_steps {
            return Err(RunError::MaxSteps(Box::new(finish(
                field, n_steps, time, final_residual, moment_history, residual_history,
            ))));
        }

        let (k1, rate) = total_rhs(&field, ws, tables, params);
        let mut dt = choose_dt(opts.cfl, params, field.grid(), field.degree(), rate);
        let mut lands_on_end = false;
        if let Some(t_end) = horizon {
            if dt >= t_end - time {
                dt = t_end - time;
                lands_on_end = true;
            }
        }
        if !dt.is_finite() || dt <= 0.0 {
            // A zero or non-finite rate with no drift: nothing can evolve.
            return Err(RunError::Blowup(Box::new(finish(
                field, n_steps, time, final_residual, moment_history, residual_history,
            ))));
        }

        let next = rk3_step(&field, &k1, dt, |f| total_rhs(f, ws, tables, params).0);
        let res = residual_norm(&field, &next, dt);
        n_steps += 1;
        time = if lands_on_end { horizon.unwrap() } else { time + dt };
        residual_history.push((time, res));
        final_residual = res;

        if !next.is_finite() || next.l2_norm() > norm_cap {
            return Err(RunError::Blowup(Box::new(finish(
                next, n_steps, time, final_residual, moment_history, residual_history,
            ))));
        }
        field = next;

        if n_steps % opts.record_every == 0 {
            moment_history.push(field.standard_record(time, rescaled, quad));
        }
        if horizon.is_none() && res <= opts.threshold {
            return Ok(finish(field, n_steps, time, final_residual, moment_history, residual_history));
        }
    }
}
