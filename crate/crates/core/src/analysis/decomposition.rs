use std::io::{self, Write};

use crate::format::sig17;
use crate::problem::ODEProblem;
use crate::solver::{Mesh, Trajectory};

use super::{
    local_errors, mean_value_slopes, propagation_coefficients, AnalysisError, ErrorSeries,
    PropagationCoefficients,
};

/// The global error at `b` rebuilt from local errors, split into
///
/// * `eps_gl_sum`: Σ of the quadrature defects at the GL nodes,
/// * `a_part`: `h Σ A_k`, the RK defects entering through the quadrature sums,
/// * `b_part`: `h Σ B_k Δ_{3k}`, the error carried across subinterval ends.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub delta_end: f64,
    pub eps_gl_sum: f64,
    pub a_part: f64,
    pub b_part: f64,
    pub reconstruction: f64,
    /// `reconstruction − delta_end`.
    pub residual: f64,
    /// Reconstructed `Δ` at each GL node, in order.
    pub gl_node_errors: Vec<f64>,
    /// `G_i` for nodes `1..=3N`.
    pub g_weights: Vec<f64>,
    pub g_reconstruction: f64,
}

impl DecompositionReport {
    /// `|residual| ≤ tol · max(1, |Δ_end|)`.
    pub fn residual_within(&self, tol: f64) -> bool {
        self.residual.abs() <= tol * self.delta_end.abs().max(1.0)
    }

    pub fn g_residual(&self) -> f64 {
        self.g_reconstruction - self.delta_end
    }

    /// JSON object with every number printed to 17 significant digits.
    pub fn write_json<W: Write>(&self, mut out: W) -> io::Result<()> {
        let weights: Vec<String> = self.g_weights.iter().map(|g| sig17(*g)).collect();
        writeln!(out, "{{")?;
        writeln!(out, "  \"delta_end\": {},", sig17(self.delta_end))?;
        writeln!(out, "  \"eps_gl_sum\": {},", sig17(self.eps_gl_sum))?;
        writeln!(out, "  \"A_part\": {},", sig17(self.a_part))?;
        writeln!(out, "  \"B_part\": {},", sig17(self.b_part))?;
        writeln!(out, "  \"reconstruction\": {},", sig17(self.reconstruction))?;
        writeln!(out, "  \"residual\": {},", sig17(self.residual))?;
        writeln!(out, "  \"g_weights\": [{}],", weights.join(", "))?;
        writeln!(out, "  \"g_reconstruction\": {}", sig17(self.g_reconstruction))?;
        writeln!(out, "}}")
    }
}

fn check_hybrid(eps: &ErrorSeries, coeffs: &PropagationCoefficients, mesh: &Mesh) -> Result<usize, AnalysisError> {
    if !mesh.is_hybrid() {
        return Err(AnalysisError::NotHybrid);
    }
    let subintervals = mesh.subintervals();
    let expected = 3 * subintervals + 1;
    for (what, got) in [("error series", eps.len()), ("mesh nodes", mesh.len())] {
        if got != expected {
            return Err(AnalysisError::LengthMismatch { what, got, expected });
        }
    }
    if coeffs.subintervals.len() != subintervals {
        return Err(AnalysisError::LengthMismatch {
            what: "subinterval coefficients",
            got: coeffs.subintervals.len(),
            expected: subintervals,
        });
    }
    Ok(subintervals)
}

/// `G_i` such that `Δ_{3N} = Σ_i G_i ε_i`.
///
/// Unrolling `Δ_{3k+3} = (1 + h B_k) Δ_{3k} + ε_{3k+3} + h A_k` gives, with
/// `P_k = Π_{m>k} (1 + h B_m)`,
/// `G_{3k+3} = P_k` and `G_{3k+j} = h γ_j P_k` for the RK nodes `j = 1, 2`.
pub fn g_weights(coeffs: &PropagationCoefficients, mesh: &Mesh) -> Vec<f64> {
    let n = coeffs.subintervals.len().min(mesh.subintervals());
    let mut weights = vec![0.0; 3 * n];
    let mut carried = 1.0;
    for (k, sub) in coeffs.subintervals[..n].iter().enumerate().rev() {
        weights[3 * k] = sub.h * sub.gamma[0] * carried;
        weights[3 * k + 1] = sub.h * sub.gamma[1] * carried;
        weights[3 * k + 2] = carried;
        carried *= 1.0 + sub.h * sub.b;
    }
    weights
}

/// Runs the subinterval recurrence from `Δ_0 = 0` and sums the three buckets.
pub fn reconstruct_global_error(
    eps: &ErrorSeries,
    coeffs: &PropagationCoefficients,
    mesh: &Mesh,
) -> Result<DecompositionReport, AnalysisError> {
    check_hybrid(eps, coeffs, mesh)?;

    let mut carried = 0.0;
    let (mut eps_gl_sum, mut a_part, mut b_part) = (0.0, 0.0, 0.0);
    let mut gl_node_errors = Vec::with_capacity(coeffs.subintervals.len());
    for (k, sub) in coeffs.subintervals.iter().enumerate() {
        let gl_defect = eps.local[3 * k + 3];
        let a_term = sub.h * sub.a_sum;
        let b_term = sub.h * sub.b * carried;
        eps_gl_sum += gl_defect;
        a_part += a_term;
        b_part += b_term;
        carried += gl_defect + a_term + b_term;
        gl_node_errors.push(carried);
    }

    let weights = g_weights(coeffs, mesh);
    let g_reconstruction = weights.iter().zip(&eps.local[1..]).map(|(g, e)| g * e).sum();
    let reconstruction = eps_gl_sum + a_part + b_part;
    let delta_end = eps.end_error();
    Ok(DecompositionReport {
        delta_end,
        eps_gl_sum,
        a_part,
        b_part,
        reconstruction,
        residual: reconstruction - delta_end,
        gl_node_errors,
        g_weights: weights,
        g_reconstruction,
    })
}

/// Local errors → slopes → coefficients → report, for one solved trajectory.
pub fn decompose(problem: &ODEProblem, trajectory: &Trajectory) -> Result<DecompositionReport, AnalysisError> {
    if !trajectory.mesh.is_hybrid() {
        return Err(AnalysisError::NotHybrid);
    }
    let eps = local_errors(problem, trajectory)?;
    let slopes = mean_value_slopes(problem, trajectory, &eps)?;
    let coeffs = propagation_coefficients(trajectory, &slopes, &eps)?;
    reconstruct_global_error(&eps, &coeffs, &trajectory.mesh)
}
