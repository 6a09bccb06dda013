use crate::problem::ODEProblem;
use crate::quadrature::WEIGHTS;
use crate::rk::{rk3_increment_dy, ButcherTableau};
use crate::solver::{NodeRole, Trajectory};

use super::{AnalysisError, ErrorSeries};

/// Below this `|Δ|` the secant slope is replaced by the analytic derivative.
pub const DEGENERATE_DELTA: f64 = 1e-300;

/// Secant slopes between the exact and numerical values at each node.
///
/// `rhs[j] = [f(x_j, w_j) − f(x_j, y_j)] / Δ_j` and
/// `increment[i] = [F(x_i, w_i) − F(x_i, y_i)] / Δ_i` for the step leaving
/// node `i`. Where `Δ = 0` the analytic `f_y` / `F_y` at `y` is used instead.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanValueSlopes {
    pub rhs: Vec<f64>,
    pub increment: Vec<f64>,
}

/// Coefficients of the quadrature update of one subinterval, whose RK nodes
/// are `3k+1`, `3k+2` and whose GL node is `3k+3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubintervalCoefficients {
    /// Average GL node spacing of the subinterval.
    pub h: f64,
    /// Weights of `ε_{3k+1}` and `ε_{3k+2}` inside the quadrature sum.
    pub gamma: [f64; 2],
    /// `γ_{3k+1} ε_{3k+1} + γ_{3k+2} ε_{3k+2}`.
    pub a_sum: f64,
    /// Multiplier of `h Δ_{3k}` carried into `Δ_{3k+3}`.
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationCoefficients {
    pub slopes: MeanValueSlopes,
    /// `α_i = 1 + h_i F_y(x_i, ξ_i)` for the step leaving node `i`.
    pub alpha: Vec<f64>,
    /// Empty for plain RK trajectories.
    pub subintervals: Vec<SubintervalCoefficients>,
}

fn check_len(what: &'static str, got: usize, expected: usize) -> Result<(), AnalysisError> {
    if got == expected {
        Ok(())
    } else {
        Err(AnalysisError::LengthMismatch { what, got, expected })
    }
}

pub fn mean_value_slopes(
    problem: &ODEProblem,
    trajectory: &Trajectory,
    eps: &ErrorSeries,
) -> Result<MeanValueSlopes, AnalysisError> {
    let y = trajectory
        .y
        .as_ref()
        .ok_or_else(|| AnalysisError::MissingExact(problem.name.clone()))?;
    let mesh = &trajectory.mesh;
    let n = mesh.len();
    check_len("error series", eps.len(), n)?;

    let tableau = ButcherTableau::rk3();
    let f = |x: f64, y: f64| problem.f(x, y);
    let w = &trajectory.w;

    let rhs = (0..n)
        .map(|j| {
            let (x, delta) = (mesh.nodes[j], eps.global[j]);
            if delta.abs() > DEGENERATE_DELTA {
                (f(x, w[j]) - f(x, y[j])) / delta
            } else {
                problem.f_y_or_numeric(x, y[j])
            }
        })
        .collect();

    let increment = (0..n - 1)
        .map(|i| {
            let (x, h, delta) = (mesh.nodes[i], mesh.step_sizes[i], eps.global[i]);
            if delta.abs() > DEGENERATE_DELTA {
                (tableau.increment(f, x, w[i], h) - tableau.increment(f, x, y[i], h)) / delta
            } else {
                match problem.f_y_fn() {
                    Some(f_y) => rk3_increment_dy(f, |x, y| f_y(x, y), x, y[i], h),
                    None => {
                        let d = 1e-6 * y[i].abs().max(1.0);
                        tableau.increment_dy_numeric(f, x, y[i], h, d)
                    }
                }
            }
        })
        .collect();

    Ok(MeanValueSlopes { rhs, increment })
}

/// Builds `α` for every step and, for RK3GL2 trajectories, the `γ`, `A` and
/// `B` coefficients of each subinterval:
///
/// ```text
/// γ_{3k+1} = C₁ s_{3k+1} + α_{3k+1} C₂ s_{3k+2}
/// γ_{3k+2} = C₂ s_{3k+2}
/// A_k      = γ_{3k+1} ε_{3k+1} + γ_{3k+2} ε_{3k+2}
/// B_k      = C₁ s_{3k+1} α_{3k} + C₂ s_{3k+2} α_{3k} α_{3k+1}
/// ```
///
/// where `s_j` is the secant slope of `f` at node `j`. With these,
/// `Δ_{3k+3} = Δ_{3k} + ε_{3k+3} + h A_k + h B_k Δ_{3k}` holds exactly.
pub fn propagation_coefficients(
    trajectory: &Trajectory,
    slopes: &MeanValueSlopes,
    eps: &ErrorSeries,
) -> Result<PropagationCoefficients, AnalysisError> {
    let mesh = &trajectory.mesh;
    let n = mesh.len();
    check_len("error series", eps.len(), n)?;
    check_len("f slopes", slopes.rhs.len(), n)?;
    check_len("increment slopes", slopes.increment.len(), n - 1)?;

    let alpha: Vec<f64> = mesh
        .step_sizes
        .iter()
        .zip(&slopes.increment)
        .map(|(h, s)| 1.0 + h * s)
        .collect();

    let [c1, c2] = WEIGHTS;
    let subintervals = mesh
        .rules
        .iter()
        .enumerate()
        .map(|(k, rule)| {
            let base = 3 * k;
            let (s1, s2) = (slopes.rhs[base + 1], slopes.rhs[base + 2]);
            let (alpha_in, alpha_mid) = (alpha[base], alpha[base + 1]);
            let gamma = [c1 * s1 + alpha_mid * c2 * s2, c2 * s2];
            SubintervalCoefficients {
                h: rule.h,
                gamma,
                a_sum: gamma[0] * eps.local[base + 1] + gamma[1] * eps.local[base + 2],
                b: c1 * s1 * alpha_in + c2 * s2 * alpha_in * alpha_mid,
            }
        })
        .collect();

    Ok(PropagationCoefficients {
        slopes: slopes.clone(),
        alpha,
        subintervals,
    })
}

/// `Δ_i` predicted by `ε_i + α_{i−1} Δ_{i−1}` next to the measured value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RkNodeCheck {
    pub index: usize,
    pub predicted: f64,
    pub measured: f64,
}

impl RkNodeCheck {
    pub fn relative_residual(&self) -> f64 {
        (self.predicted - self.measured).abs() / self.measured.abs().max(1.0)
    }
}

/// One-step recurrence at every RK node.
pub fn rk_node_checks(eps: &ErrorSeries, coeffs: &PropagationCoefficients) -> Vec<RkNodeCheck> {
    (1..eps.len())
        .filter(|&i| eps.roles[i] == NodeRole::Rk)
        .map(|i| RkNodeCheck {
            index: i,
            predicted: eps.local[i] + coeffs.alpha[i - 1] * eps.global[i - 1],
            measured: eps.global[i],
        })
        .collect()
}

/// `Δ_n = Σ_{j ≤ n} (Π_{k=j}^{n−1} α_k) ε_j`, the unrolled one-step recurrence.
/// Only meaningful when every node up to `n` is an RK node.
pub fn product_formula(eps: &ErrorSeries, coeffs: &PropagationCoefficients, n: usize) -> f64 {
    let mut total = 0.0;
    let mut weight = 1.0;
    for j in (1..=n).rev() {
        total += weight * eps.local[j];
        weight *= coeffs.alpha[j - 1];
    }
    total
}
