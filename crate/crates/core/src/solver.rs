//! The RK3GL2 driver and a plain RK3 baseline.
//!
//! `[a, b]` is split into `N` equal subintervals. Inside each one the two
//! Gauss-Legendre nodes are reached with RK3 steps (of unequal length), and
//! the right endpoint is then produced by the quadrature update, which starts
//! from the value at the *left* endpoint:
//!
//! ```text
//! x_{3k} ──RK3──> x_{3k+1} ──RK3──> x_{3k+2}        x_{3k+3}
//!   │                                                  ▲
//!   └───────── w_{3k} + h Σ C_j f(x_j, w_j) ───────────┘
//! ```

use std::fmt;
use std::io::{self, Write};

use thiserror::Error;

use crate::format::{json_string, sig17};
use crate::problem::ODEProblem;
use crate::quadrature::{gl2_rule, gl2_update, GlRule};
use crate::rk::ButcherTableau;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid mesh arguments: a = {a}, b = {b}, count = {count}")]
    InvalidMesh { a: f64, b: f64, count: usize },
    #[error("non-finite solution value {value} at node {index} (x = {x})")]
    NonFinite { index: usize, x: f64, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeRole {
    Initial,
    /// Reached by an RK3 step from the previous node.
    Rk,
    /// Subinterval endpoint produced by the quadrature update.
    Gl,
}

impl NodeRole {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeRole::Initial => "INITIAL",
            NodeRole::Rk => "RK",
            NodeRole::Gl => "GL",
        }
    }
}

impl fmt::Display for NodeRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Rkgl,
    Rk3,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Rkgl => "rkgl",
            Method::Rk3 => "rk3",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub roles: Vec<NodeRole>,
    /// `h_i = x_{i+1} − x_i`, one per step.
    pub step_sizes: Vec<f64>,
    /// Quadrature rule of each subinterval; empty for a plain RK mesh.
    pub rules: Vec<GlRule>,
}

impl Mesh {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of quadrature subintervals (zero for a plain RK mesh).
    pub fn subintervals(&self) -> usize {
        self.rules.len()
    }

    pub fn is_hybrid(&self) -> bool {
        !self.rules.is_empty()
    }

    /// Average GL node spacing per subinterval.
    pub fn gl_h(&self) -> Vec<f64> {
        self.rules.iter().map(|r| r.h).collect()
    }

    /// Uniform mesh of `n_steps` RK steps.
    pub fn uniform(a: f64, b: f64, n_steps: usize) -> Result<Mesh, SolveError> {
        if !(a < b) || n_steps == 0 || !a.is_finite() || !b.is_finite() {
            return Err(SolveError::InvalidMesh { a, b, count: n_steps });
        }
        let nodes: Vec<f64> = (0..=n_steps).map(|i| split_point(a, b, n_steps, i)).collect();
        let mut roles = vec![NodeRole::Rk; n_steps + 1];
        roles[0] = NodeRole::Initial;
        Ok(Mesh {
            a,
            b,
            step_sizes: nodes.windows(2).map(|w| w[1] - w[0]).collect(),
            nodes,
            roles,
            rules: Vec::new(),
        })
    }
}

fn split_point(a: f64, b: f64, n: usize, i: usize) -> f64 {
    if i == n {
        b
    } else {
        a + (b - a) * (i as f64 / n as f64)
    }
}

/// `N` equal subintervals; nodes `x_{3k+1}, x_{3k+2}` are the GL nodes of
/// subinterval `k` and `x_{3k+3}` its right endpoint.
pub fn build_mesh(a: f64, b: f64, subintervals: usize) -> Result<Mesh, SolveError> {
    let invalid = || SolveError::InvalidMesh { a, b, count: subintervals };
    if !(a < b) || subintervals == 0 || !a.is_finite() || !b.is_finite() {
        return Err(invalid());
    }
    let mut nodes = Vec::with_capacity(3 * subintervals + 1);
    let mut roles = Vec::with_capacity(3 * subintervals + 1);
    let mut rules = Vec::with_capacity(subintervals);
    nodes.push(a);
    roles.push(NodeRole::Initial);
    for k in 0..subintervals {
        let u = split_point(a, b, subintervals, k);
        let v = split_point(a, b, subintervals, k + 1);
        let rule = gl2_rule(u, v).map_err(|_| invalid())?;
        nodes.extend([rule.nodes[0], rule.nodes[1], v]);
        roles.extend([NodeRole::Rk, NodeRole::Rk, NodeRole::Gl]);
        rules.push(rule);
    }
    Ok(Mesh {
        a,
        b,
        step_sizes: nodes.windows(2).map(|w| w[1] - w[0]).collect(),
        nodes,
        roles,
        rules,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub problem_name: String,
    pub method: Method,
    pub mesh: Mesh,
    pub w: Vec<f64>,
    /// Exact solution at the nodes, when the problem has one.
    pub y: Option<Vec<f64>>,
}

impl Trajectory {
    fn finish(problem: &ODEProblem, method: Method, mesh: Mesh, w: Vec<f64>) -> Result<Self, SolveError> {
        if let Some(index) = w.iter().position(|v| !v.is_finite()) {
            return Err(SolveError::NonFinite {
                index,
                x: mesh.nodes[index],
                value: w[index],
            });
        }
        let y = problem
            .has_exact()
            .then(|| mesh.nodes.iter().map(|&x| problem.exact(x).unwrap_or(f64::NAN)).collect());
        Ok(Trajectory {
            problem_name: problem.name.clone(),
            method,
            mesh,
            w,
            y,
        })
    }

    /// `w_i − y_i` at every node, when the exact solution is known.
    pub fn global_errors(&self) -> Option<Vec<f64>> {
        self.y
            .as_ref()
            .map(|y| self.w.iter().zip(y).map(|(w, y)| w - y).collect())
    }

    /// Global error at `b`.
    pub fn end_error(&self) -> Option<f64> {
        self.global_errors().and_then(|d| d.last().copied())
    }

    /// Writes `index,x,role,w,y,global_error`, one row per node. `y` and
    /// `global_error` are left empty when the exact solution is unknown.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "index,x,role,w,y,global_error")?;
        for (i, (&x, &w)) in self.mesh.nodes.iter().zip(&self.w).enumerate() {
            let role = self.mesh.roles[i];
            match &self.y {
                Some(y) => writeln!(
                    out,
                    "{i},{},{role},{},{},{}",
                    sig17(x),
                    sig17(w),
                    sig17(y[i]),
                    sig17(w - y[i])
                )?,
                None => writeln!(out, "{i},{},{role},{},,", sig17(x), sig17(w))?,
            }
        }
        Ok(())
    }

    /// Same columns as [`Trajectory::write_csv`] as a JSON object with a
    /// `nodes` array; missing exact values are `null`.
    pub fn write_json<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{{")?;
        writeln!(out, "  \"problem\": {},", json_string(&self.problem_name))?;
        writeln!(out, "  \"method\": {},", json_string(self.method.as_str()))?;
        writeln!(out, "  \"nodes\": [")?;
        let n = self.w.len();
        for i in 0..n {
            let (y, err) = match &self.y {
                Some(y) => (sig17(y[i]), sig17(self.w[i] - y[i])),
                None => ("null".to_string(), "null".to_string()),
            };
            writeln!(
                out,
                "    {{\"index\": {i}, \"x\": {}, \"role\": \"{}\", \"w\": {}, \"y\": {y}, \"global_error\": {err}}}{}",
                sig17(self.mesh.nodes[i]),
                self.mesh.roles[i],
                sig17(self.w[i]),
                if i + 1 < n { "," } else { "" }
            )?;
        }
        writeln!(out, "  ]")?;
        writeln!(out, "}}")
    }
}

/// RK3GL2 over `subintervals` equal pieces of `[a, b]`.
pub fn solve_rkgl(problem: &ODEProblem, subintervals: usize) -> Result<Trajectory, SolveError> {
    let mesh = build_mesh(problem.a, problem.b, subintervals)?;
    let tableau = ButcherTableau::rk3();
    let f = |x: f64, y: f64| problem.f(x, y);
    let x = &mesh.nodes;
    let mut w = Vec::with_capacity(mesh.len());
    w.push(problem.y0);
    for (k, rule) in mesh.rules.iter().enumerate() {
        let base = 3 * k;
        let w0 = w[base];
        let w1 = tableau.step(f, x[base], w0, x[base + 1] - x[base]);
        let w2 = tableau.step(f, x[base + 1], w1, x[base + 2] - x[base + 1]);
        let w3 = gl2_update(w0, f, rule, [w1, w2]);
        w.extend([w1, w2, w3]);
        if !w3.is_finite() {
            break;
        }
    }
    w.resize(mesh.len(), f64::NAN);
    Trajectory::finish(problem, Method::Rkgl, mesh, w)
}

/// Plain RK3 with `n_steps` equal steps.
pub fn solve_rk3(problem: &ODEProblem, n_steps: usize) -> Result<Trajectory, SolveError> {
    let mesh = Mesh::uniform(problem.a, problem.b, n_steps)?;
    let tableau = ButcherTableau::rk3();
    let f = |x: f64, y: f64| problem.f(x, y);
    let mut w = Vec::with_capacity(mesh.len());
    w.push(problem.y0);
    for (i, &h) in mesh.step_sizes.iter().enumerate() {
        w.push(tableau.step(f, mesh.nodes[i], w[i], h));
    }
    Trajectory::finish(problem, Method::Rk3, mesh, w)
}

/// Dispatch on `method`; for [`Method::Rk3`] `n` counts subinterval
/// equivalents, i.e. `3n` steps, so both methods use the same nodes count.
pub fn solve(problem: &ODEProblem, method: Method, n: usize) -> Result<Trajectory, SolveError> {
    match method {
        Method::Rkgl => solve_rkgl(problem, n),
        Method::Rk3 => solve_rk3(problem, 3 * n),
    }
}
