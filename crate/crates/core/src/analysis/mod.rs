//! Local/global error bookkeeping for RK3GL2 trajectories.
//!
//! The chain of operations mirrors how the global error is assembled:
//!
//! 1. [`local_errors`]: one-step defects `ε_i` started from exact values, and
//!    the measured global errors `Δ_i = w_i − y_i`.
//! 2. [`mean_value_slopes`]: the secant slopes of `f` and of the RK increment
//!    `F` between `y_i` and `w_i`. These are the exact mean-value slopes, so
//!    every expansion below is an identity rather than an approximation.
//! 3. [`propagation_coefficients`]: step multipliers `α`, the per-node
//!    weights `γ` and the per-subinterval `A` and `B` coefficients.
//! 4. [`reconstruct_global_error`] and [`g_weights`]: rebuild `Δ` at `b`
//!    from the local errors alone, bucketed into the quadrature defects, the
//!    RK defects scaled by `h`, and the carried-error chain.
//! 5. [`observed_order`] and [`convergence_study`]: empirical orders from
//!    step halving.

mod coefficients;
mod decomposition;
mod local;
mod order;

use thiserror::Error;

use crate::quadrature::IntervalError;
use crate::solver::SolveError;

pub use coefficients::{
    mean_value_slopes, product_formula, propagation_coefficients, rk_node_checks,
    MeanValueSlopes, PropagationCoefficients, RkNodeCheck, SubintervalCoefficients,
    DEGENERATE_DELTA,
};
pub use decomposition::{decompose, g_weights, reconstruct_global_error, DecompositionReport};
pub use local::{gl_local_error, local_errors, rk_local_error, ErrorSeries};
pub use order::{convergence_study, observed_order, ConvergenceRow, ConvergenceTable, OrderEstimate};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("problem `{0}` has no exact solution")]
    MissingExact(String),
    #[error("trajectory has no quadrature subintervals (not an RK3GL2 solve)")]
    NotHybrid,
    #[error("length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("need at least two (h, E) pairs, got {0}")]
    InsufficientData(usize),
    #[error("step sizes must halve at each entry: h = {prev} followed by {next}")]
    NotHalving { prev: f64, next: f64 },
    #[error("error is zero at h = {0}: the method is exact here, no order can be fitted")]
    ExactIntegration(f64),
    #[error("error at h = {h} is {error}, which cannot be fitted")]
    NonPositiveError { h: f64, error: f64 },
    #[error("subinterval counts must double: {0:?}")]
    NotDoubling(Vec<usize>),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}
