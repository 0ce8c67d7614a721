//! Numerical toolkit for a one-dimensional dissipative kinetic equation with
//! collision kernel `|x - y|^gamma`.
//!
//! A binary collision replaces velocities `(x, y)` by the convex mixtures
//! `(a x + b y, b x + a y)` with `a + b = 1`, which conserves momentum and
//! dissipates energy at rate `2ab (x - y)^2`. The crate provides three layers:
//!
//! * a discontinuous Galerkin solver for the rescaled equation
//!   `d_s g + c d_xi (xi g) = Q(g, g)`, whose steady states are the
//!   self-similar cooling profiles of the original dynamics;
//! * a stochastic particle sampler (DSMC) for the original equation,
//!   used as an independent oracle and for cooling-law experiments;
//! * an analysis layer: moment decay envelopes, cooling-exponent fits,
//!   self-similar rescaling maps, Wasserstein/Kantorovich distances, and a
//!   coupled-noise stability experiment.
//!
//! Entry points: [`config::parse_config`] + [`runner::run`] drive everything
//! from a plain-text config (the thin `granular1d` binary wraps exactly this);
//! the `examples/` directory exercises each capability directly against the
//! library API.

pub mod analysis;
pub mod collision;
pub mod config;
pub mod drift;
pub mod error;
pub mod field;
pub mod grid;
pub mod initial;
pub mod moments;
pub mod params;
pub mod particle;
pub mod quadrature;
pub mod runner;
pub mod timestep;

pub use error::Error;
pub use field::DGField;
pub use grid::Grid;
pub use moments::MomentRecord;
pub use params::ModelParams;
pub use quadrature::QuadratureRule;
