use std::io::{self, Write};

use crate::format::{json_string, sig17};
use crate::problem::ODEProblem;
use crate::solver::{solve, Method};

use super::AnalysisError;

const HALVING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    /// `(h, E)` by decreasing `h`.
    pub pairs: Vec<(f64, f64)>,
    /// `log₂(E_j / E_{j+1})` for each adjacent pair.
    pub fitted_orders: Vec<f64>,
    pub mean_order: f64,
}

/// Observed orders from a halving sequence of step sizes.
pub fn observed_order(pairs: &[(f64, f64)]) -> Result<OrderEstimate, AnalysisError> {
    if pairs.len() < 2 {
        return Err(AnalysisError::InsufficientData(pairs.len()));
    }
    for &(h, e) in pairs {
        if e == 0.0 {
            return Err(AnalysisError::ExactIntegration(h));
        }
        if !(e > 0.0) || !e.is_finite() {
            return Err(AnalysisError::NonPositiveError { h, error: e });
        }
    }
    for w in pairs.windows(2) {
        let (prev, next) = (w[0].0, w[1].0);
        if !(next > 0.0) || ((prev / next) - 2.0).abs() > 2.0 * HALVING_TOL {
            return Err(AnalysisError::NotHalving { prev, next });
        }
    }
    let fitted_orders: Vec<f64> = pairs.windows(2).map(|w| (w[0].1 / w[1].1).log2()).collect();
    let mean_order = fitted_orders.iter().sum::<f64>() / fitted_orders.len() as f64;
    Ok(OrderEstimate {
        pairs: pairs.to_vec(),
        fitted_orders,
        mean_order,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    /// Subinterval count; plain RK3 runs take `3N` steps.
    pub n: usize,
    pub h: f64,
    /// `|Δ|` at `b`.
    pub error: f64,
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub problem: String,
    pub method: Method,
    pub rows: Vec<ConvergenceRow>,
    /// Fails with [`AnalysisError::ExactIntegration`] when some run is exact.
    pub estimate: Result<OrderEstimate, AnalysisError>,
}

impl ConvergenceTable {
    pub fn mean_order(&self) -> Option<f64> {
        self.estimate.as_ref().ok().map(|e| e.mean_order)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "problem,method,N,h,E,observed_order")?;
        for row in &self.rows {
            let order = row.observed_order.map(sig17).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{order}",
                self.problem,
                self.method.as_str(),
                row.n,
                sig17(row.h),
                sig17(row.error)
            )?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{{")?;
        writeln!(out, "  \"problem\": {},", json_string(&self.problem))?;
        writeln!(out, "  \"method\": {},", json_string(self.method.as_str()))?;
        let mean = self.mean_order().map_or_else(|| "null".to_string(), sig17);
        writeln!(out, "  \"mean_order\": {mean},")?;
        writeln!(out, "  \"rows\": [")?;
        for (i, row) in self.rows.iter().enumerate() {
            let order = row.observed_order.map_or_else(|| "null".to_string(), sig17);
            writeln!(
                out,
                "    {{\"N\": {}, \"h\": {}, \"E\": {}, \"observed_order\": {order}}}{}",
                row.n,
                sig17(row.h),
                sig17(row.error),
                if i + 1 < self.rows.len() { "," } else { "" }
            )?;
        }
        writeln!(out, "  ]")?;
        writeln!(out, "}}")
    }
}

/// Solves at every `N` in `ns` (each double the last) and fits orders to the
/// endpoint error. `h = (b − a)/(3N)` for both methods.
pub fn convergence_study(
    problem: &ODEProblem,
    method: Method,
    ns: &[usize],
) -> Result<ConvergenceTable, AnalysisError> {
    if ns.len() < 2 {
        return Err(AnalysisError::InsufficientData(ns.len()));
    }
    if ns[0] == 0 || ns.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(AnalysisError::NotDoubling(ns.to_vec()));
    }
    if !problem.has_exact() {
        return Err(AnalysisError::MissingExact(problem.name.clone()));
    }
    let mut pairs = Vec::with_capacity(ns.len());
    for &n in ns {
        let trajectory = solve(problem, method, n)?;
        let error = trajectory.end_error().map(f64::abs).unwrap_or(f64::NAN);
        pairs.push(((problem.b - problem.a) / (3 * n) as f64, error));
    }
    let estimate = observed_order(&pairs);
    let fitted = estimate.as_ref().map(|e| e.fitted_orders.clone()).unwrap_or_default();
    let rows = ns
        .iter()
        .zip(&pairs)
        .enumerate()
        .map(|(i, (&n, &(h, error)))| ConvergenceRow {
            n,
            h,
            error,
            observed_order: i.checked_sub(1).and_then(|j| fitted.get(j).copied()),
        })
        .collect();
    Ok(ConvergenceTable {
        problem: problem.name.clone(),
        method,
        rows,
        estimate,
    })
}
