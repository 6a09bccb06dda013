//! RK3GL2: a hybrid of an explicit third-order Runge-Kutta method and
//! two-point Gauss-Legendre quadrature for scalar initial value problems,
//! together with tooling that reconstructs the global error from the
//! local-error propagation coefficients of the method.
//!
//! The pipeline is
//! [`ODEProblem`] → [`solve_rkgl`] → [`local_errors`] → [`mean_value_slopes`]
//! → [`propagation_coefficients`] → [`reconstruct_global_error`].

pub mod analysis;
pub mod cli;
pub mod expression;
pub mod format;
pub mod problem;
pub mod quadrature;
pub mod rk;
pub mod solver;

pub use analysis::{
    convergence_study, g_weights, local_errors, mean_value_slopes, observed_order,
    propagation_coefficients, reconstruct_global_error, DecompositionReport, ErrorSeries,
    MeanValueSlopes, OrderEstimate, PropagationCoefficients,
};
pub use expression::Expr;
pub use problem::ODEProblem;
pub use quadrature::{gl2_rule, gl2_update, GlRule};
pub use rk::ButcherTableau;
pub use solver::{build_mesh, solve_rk3, solve_rkgl, Method, Mesh, NodeRole, Trajectory};
