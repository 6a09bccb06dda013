use crate::problem::ODEProblem;
use crate::quadrature::{gl2_rule, gl2_update};
use crate::rk::ButcherTableau;
use crate::solver::{NodeRole, Trajectory};

use super::AnalysisError;

/// Per-node local errors `ε_i` and global errors `Δ_i`.
///
/// `ε_0 = Δ_0 = 0` by convention: the initial value is taken as exact.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    pub roles: Vec<NodeRole>,
    pub local: Vec<f64>,
    pub global: Vec<f64>,
}

impl ErrorSeries {
    pub fn len(&self) -> usize {
        self.local.len()
    }

    pub fn is_empty(&self) -> bool {
        self.local.is_empty()
    }

    /// Measured `Δ` at `b`.
    pub fn end_error(&self) -> f64 {
        self.global.last().copied().unwrap_or(0.0)
    }
}

/// Defect of one RK3 step of length `h` started from the exact solution at `x`.
pub fn rk_local_error(problem: &ODEProblem, x: f64, h: f64) -> Result<f64, AnalysisError> {
    let exact = |x| problem.exact(x).ok_or_else(|| AnalysisError::MissingExact(problem.name.clone()));
    let start = exact(x)?;
    let stepped = ButcherTableau::rk3().step(|x, y| problem.f(x, y), x, start, h);
    Ok(stepped - exact(x + h)?)
}

/// Defect of the quadrature update on `[u, v]` with exact values everywhere.
pub fn gl_local_error(problem: &ODEProblem, u: f64, v: f64) -> Result<f64, AnalysisError> {
    let exact = |x| problem.exact(x).ok_or_else(|| AnalysisError::MissingExact(problem.name.clone()));
    let rule = gl2_rule(u, v)?;
    let nodes = [exact(rule.nodes[0])?, exact(rule.nodes[1])?];
    Ok(gl2_update(exact(u)?, |x, y| problem.f(x, y), &rule, nodes) - exact(v)?)
}

/// Local errors at every node of `trajectory`: RK nodes use the one-step
/// defect from the exact value at the previous node, GL nodes the quadrature
/// defect with exact values at the subinterval start and both GL nodes.
pub fn local_errors(problem: &ODEProblem, trajectory: &Trajectory) -> Result<ErrorSeries, AnalysisError> {
    let y = trajectory
        .y
        .as_ref()
        .ok_or_else(|| AnalysisError::MissingExact(problem.name.clone()))?;
    let mesh = &trajectory.mesh;
    let n = mesh.len();
    if y.len() != n || trajectory.w.len() != n {
        return Err(AnalysisError::LengthMismatch {
            what: "trajectory values",
            got: y.len().min(trajectory.w.len()),
            expected: n,
        });
    }
    let tableau = ButcherTableau::rk3();
    let f = |x: f64, y: f64| problem.f(x, y);

    let mut local = vec![0.0; n];
    let mut global = vec![0.0; n];
    for i in 1..n {
        local[i] = match mesh.roles[i] {
            NodeRole::Rk => {
                let h = mesh.step_sizes[i - 1];
                tableau.step(f, mesh.nodes[i - 1], y[i - 1], h) - y[i]
            }
            NodeRole::Gl => {
                let base = i - 3;
                let rule = &mesh.rules[base / 3];
                gl2_update(y[base], f, rule, [y[base + 1], y[base + 2]]) - y[i]
            }
            NodeRole::Initial => 0.0,
        };
        global[i] = trajectory.w[i] - y[i];
    }
    Ok(ErrorSeries {
        roles: mesh.roles.clone(),
        local,
        global,
    })
}
