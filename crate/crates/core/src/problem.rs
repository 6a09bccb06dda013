//! Scalar initial value problems `y' = f(x, y)`, `y(a) = y0` on `[a, b]`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::expression::{Expr, ParseError};

pub type RhsFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type SolutionFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Registry keys accepted by [`ODEProblem::builtin`].
pub const BUILTIN_NAMES: [&str; 4] = ["expgrow", "riccati", "logistic", "forced"];

const EXACT_RESIDUAL_STEP: f64 = 1e-6;
const EXACT_RESIDUAL_TOL: f64 = 1e-8;
const EXACT_RESIDUAL_POINTS: usize = 11;
const INITIAL_VALUE_TOL: f64 = 1e-14;
const FY_CHECK_STEP: f64 = 1e-5;
const FY_CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("unknown problem `{name}` (available: {})", BUILTIN_NAMES.join(", "))]
    UnknownName { name: String },
    #[error("failed to parse `{source_text}`: {error}")]
    Parse { source_text: String, error: ParseError },
    #[error("invalid interval: need a < b, got a = {a}, b = {b}")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("cannot read problem file {path}: {message}")]
    Config { path: String, message: String },
}

/// A scalar IVP with optional analytic `f_y` and exact solution.
///
/// Cloning is cheap; the functions are shared.
#[derive(Clone)]
pub struct ODEProblem {
    pub name: String,
    pub a: f64,
    pub b: f64,
    pub y0: f64,
    f: RhsFn,
    f_y: Option<RhsFn>,
    exact: Option<SolutionFn>,
}

impl fmt::Debug for ODEProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ODEProblem")
            .field("name", &self.name)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("y0", &self.y0)
            .field("has_f_y", &self.f_y.is_some())
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

/// On-disk problem description (JSON).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub f: String,
    #[serde(default)]
    pub exact: Option<String>,
    pub a: f64,
    pub b: f64,
    pub y0: f64,
    #[serde(default)]
    pub name: Option<String>,
}

impl ODEProblem {
    /// Builds a problem from closures. No invariants are checked here; call
    /// [`ODEProblem::validate`] before trusting user-supplied functions.
    pub fn new(
        name: impl Into<String>,
        f: RhsFn,
        f_y: Option<RhsFn>,
        exact: Option<SolutionFn>,
        a: f64,
        b: f64,
        y0: f64,
    ) -> Result<Self, ProblemError> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(ProblemError::InvalidInterval { a, b });
        }
        Ok(ODEProblem {
            name: name.into(),
            a,
            b,
            y0,
            f,
            f_y,
            exact,
        })
    }

    pub fn builtin(name: &str) -> Result<Self, ProblemError> {
        match name {
            "expgrow" => ODEProblem::new(
                name,
                Arc::new(|_, y| y),
                Some(Arc::new(|_, _| 1.0)),
                Some(Arc::new(f64::exp)),
                0.0,
                2.0,
                1.0,
            ),
            "riccati" => ODEProblem::new(
                name,
                Arc::new(|x, y| -2.0 * x * y * y),
                Some(Arc::new(|x, y| -4.0 * x * y)),
                Some(Arc::new(|x| 1.0 / (1.0 + x * x))),
                0.0,
                2.0,
                1.0,
            ),
            "logistic" => ODEProblem::new(
                name,
                Arc::new(|_, y| y * (1.0 - y)),
                Some(Arc::new(|_, y| 1.0 - 2.0 * y)),
                Some(Arc::new(|x: f64| 1.0 / (1.0 + (-x).exp()))),
                0.0,
                4.0,
                0.5,
            ),
            "forced" => ODEProblem::new(
                name,
                Arc::new(|x: f64, y| -5.0 * (y - x.sin()) + x.cos()),
                Some(Arc::new(|_, _| -5.0)),
                Some(Arc::new(|x: f64| x.sin() + (-5.0 * x).exp())),
                0.0,
                3.0,
                1.0,
            ),
            _ => Err(ProblemError::UnknownName {
                name: name.to_string(),
            }),
        }
    }

    /// Parses `f_src` (and `exact_src`, if given) and derives `f_y`
    /// symbolically. All invariants are checked before returning.
    ///
    /// When `f` has a `y`-dependent exponent `f_y` is left unset and callers
    /// fall back to finite differences.
    pub fn from_expressions(
        f_src: &str,
        exact_src: Option<&str>,
        a: f64,
        b: f64,
        y0: f64,
    ) -> Result<Self, ProblemError> {
        let parse = |src: &str| {
            Expr::parse(src).map_err(|error| ProblemError::Parse {
                source_text: src.to_string(),
                error,
            })
        };
        let f_expr = Arc::new(parse(f_src)?);
        let f_y_expr = f_expr.diff_y().ok().map(Arc::new);
        let exact_expr = exact_src.map(parse).transpose()?.map(Arc::new);

        let f: RhsFn = {
            let e = Arc::clone(&f_expr);
            Arc::new(move |x, y| e.eval(x, y))
        };
        let f_y: Option<RhsFn> = f_y_expr.map(|e| Arc::new(move |x, y| e.eval(x, y)) as RhsFn);
        let exact: Option<SolutionFn> =
            exact_expr.map(|e| Arc::new(move |x| e.eval(x, 0.0)) as SolutionFn);

        let p = ODEProblem::new("custom", f, f_y, exact, a, b, y0)?;
        p.validate()?;
        Ok(p)
    }

    pub fn from_config(config: &ProblemConfig) -> Result<Self, ProblemError> {
        let mut p = ODEProblem::from_expressions(
            &config.f,
            config.exact.as_deref(),
            config.a,
            config.b,
            config.y0,
        )?;
        if let Some(name) = &config.name {
            p.name = name.clone();
        }
        Ok(p)
    }

    pub fn from_config_file(path: &Path) -> Result<Self, ProblemError> {
        let config_err = |message: String| ProblemError::Config {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| config_err(e.to_string()))?;
        let config: ProblemConfig =
            serde_json::from_str(&text).map_err(|e| config_err(e.to_string()))?;
        let mut p = ODEProblem::from_config(&config)?;
        if config.name.is_none() {
            if let Some(stem) = path.file_stem() {
                p.name = stem.to_string_lossy().into_owned();
            }
        }
        Ok(p)
    }

    #[inline]
    pub fn f(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }

    pub fn rhs(&self) -> &RhsFn {
        &self.f
    }

    /// Analytic `∂f/∂y`, if known.
    pub fn f_y(&self, x: f64, y: f64) -> Option<f64> {
        self.f_y.as_ref().map(|g| g(x, y))
    }

    pub fn f_y_fn(&self) -> Option<&RhsFn> {
        self.f_y.as_ref()
    }

    /// `∂f/∂y`: analytic when available, otherwise a central difference.
    pub fn f_y_or_numeric(&self, x: f64, y: f64) -> f64 {
        self.f_y(x, y).unwrap_or_else(|| {
            let d = FY_CHECK_STEP * y.abs().max(1.0);
            (self.f(x, y + d) - self.f(x, y - d)) / (2.0 * d)
        })
    }

    pub fn exact(&self, x: f64) -> Option<f64> {
        self.exact.as_ref().map(|s| s(x))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Checks every problem invariant, reporting the first violation.
    pub fn validate(&self) -> Result<(), ProblemError> {
        if !(self.a < self.b) {
            return Err(ProblemError::InvalidInterval {
                a: self.a,
                b: self.b,
            });
        }
        if let Some(exact) = &self.exact {
            let start = exact(self.a);
            if !((start - self.y0).abs() <= INITIAL_VALUE_TOL * self.y0.abs().max(1.0)) {
                return Err(ProblemError::Invariant(format!(
                    "exact solution at a = {} is {start}, expected y0 = {}",
                    self.a, self.y0
                )));
            }
            for x in sample_points(self.a, self.b, EXACT_RESIDUAL_POINTS) {
                let d = EXACT_RESIDUAL_STEP;
                let derivative = (exact(x + d) - exact(x - d)) / (2.0 * d);
                let residual = derivative - self.f(x, exact(x));
                if !(residual.abs() <= EXACT_RESIDUAL_TOL) {
                    return Err(ProblemError::Invariant(format!(
                        "exact solution does not satisfy the ODE at x = {x} (residual {residual:e})"
                    )));
                }
            }
        }
        if let Some(f_y) = &self.f_y {
            for x in sample_points(self.a, self.b, 5) {
                let centre = self.exact(x).unwrap_or(self.y0);
                let spread = 0.1 * centre.abs().max(1.0);
                for y in [centre - spread, centre, centre + spread] {
                    let analytic = f_y(x, y);
                    let d = FY_CHECK_STEP;
                    let numeric = (self.f(x, y + d) - self.f(x, y - d)) / (2.0 * d);
                    if !analytic.is_finite() || !numeric.is_finite() {
                        continue;
                    }
                    let scale = analytic.abs().max(self.f(x, y).abs()).max(1.0);
                    if (analytic - numeric).abs() > FY_CHECK_TOL * scale {
                        return Err(ProblemError::Invariant(format!(
                            "f_y = {analytic} disagrees with finite difference {numeric} at ({x}, {y})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn sample_points(a: f64, b: f64, count: usize) -> impl Iterator<Item = f64> {
    let last = (count - 1) as f64;
    (0..count).map(move |i| if i + 1 == count { b } else { a + (b - a) * i as f64 / last })
}
