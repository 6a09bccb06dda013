use thiserror::Error;

use super::{BinOp, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiffError {
    #[error("cannot differentiate `{0}`: exponent depends on y")]
    YDependentExponent(String),
}

impl Expr {
    /// Symbolic partial derivative with respect to `y`.
    ///
    /// Subtrees that do not mention `y` differentiate to `0` without being
    /// visited. The result is lightly simplified (zero/one elimination and
    /// folding of finite constants) but not normalized.
    pub fn diff_y(&self) -> Result<Expr, DiffError> {
        if !self.depends_on_y() {
            return Ok(Expr::Const(0.0));
        }
        Ok(match self {
            Expr::Const(_) | Expr::Var(Var::X) => Expr::Const(0.0),
            Expr::Var(Var::Y) => Expr::Const(1.0),
            Expr::Neg(inner) => neg(inner.diff_y()?),
            Expr::Binary(op, lhs, rhs) => {
                let (u, v) = (lhs.as_ref(), rhs.as_ref());
                match op {
                    BinOp::Add => add(u.diff_y()?, v.diff_y()?),
                    BinOp::Sub => sub(u.diff_y()?, v.diff_y()?),
                    BinOp::Mul => add(mul(u.diff_y()?, v.clone()), mul(u.clone(), v.diff_y()?)),
                    // (u'v - uv') / v^2
                    BinOp::Div => div(
                        sub(mul(u.diff_y()?, v.clone()), mul(u.clone(), v.diff_y()?)),
                        mul(v.clone(), v.clone()),
                    ),
                    BinOp::Pow => {
                        if v.depends_on_y() {
                            return Err(DiffError::YDependentExponent(self.to_string()));
                        }
                        // v * u^(v-1) * u'
                        let lowered = pow(u.clone(), sub(v.clone(), Expr::Const(1.0)));
                        mul(mul(v.clone(), lowered), u.diff_y()?)
                    }
                }
            }
            Expr::Call(func, arg) => {
                let inner = arg.diff_y()?;
                let a = arg.as_ref().clone();
                let outer = match func {
                    Func::Sin => Expr::call(Func::Cos, a),
                    Func::Cos => neg(Expr::call(Func::Sin, a)),
                    Func::Exp => Expr::call(Func::Exp, a),
                    Func::Log => div(Expr::Const(1.0), a),
                    Func::Sqrt => div(Expr::Const(0.5), Expr::call(Func::Sqrt, a)),
                };
                mul(outer, inner)
            }
        })
    }
}

fn constant(e: &Expr) -> Option<f64> {
    match e {
        Expr::Const(c) => Some(*c),
        _ => None,
    }
}

fn fold(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    if let (Some(a), Some(b)) = (constant(&lhs), constant(&rhs)) {
        let folded = op.apply(a, b);
        if folded.is_finite() {
            return Expr::Const(folded);
        }
    }
    Expr::binary(op, lhs, rhs)
}

fn is(e: &Expr, value: f64) -> bool {
    constant(e) == Some(value)
}

fn neg(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::neg(other),
    }
}

fn add(lhs: Expr, rhs: Expr) -> Expr {
    if is(&lhs, 0.0) {
        rhs
    } else if is(&rhs, 0.0) {
        lhs
    } else {
        fold(BinOp::Add, lhs, rhs)
    }
}

fn sub(lhs: Expr, rhs: Expr) -> Expr {
    if is(&rhs, 0.0) {
        lhs
    } else if is(&lhs, 0.0) {
        neg(rhs)
    } else {
        fold(BinOp::Sub, lhs, rhs)
    }
}

fn mul(lhs: Expr, rhs: Expr) -> Expr {
    if is(&lhs, 0.0) || is(&rhs, 0.0) {
        Expr::Const(0.0)
    } else if is(&lhs, 1.0) {
        rhs
    } else if is(&rhs, 1.0) {
        lhs
    } else {
        fold(BinOp::Mul, lhs, rhs)
    }
}

fn div(lhs: Expr, rhs: Expr) -> Expr {
    if is(&rhs, 1.0) {
        lhs
    } else {
        fold(BinOp::Div, lhs, rhs)
    }
}

fn pow(base: Expr, exponent: Expr) -> Expr {
    if is(&exponent, 1.0) {
        base
    } else if is(&exponent, 0.0) {
        Expr::Const(1.0)
    } else {
        fold(BinOp::Pow, base, exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_equal(lhs: &Expr, rhs: &Expr) {
        for i in 0..5 {
            for j in 0..5 {
                let (x, y) = (-1.0 + 0.5 * i as f64, 0.3 + 0.4 * j as f64);
                let (a, b) = (lhs.eval(x, y), rhs.eval(x, y));
                assert!((a - b).abs() <= 1e-14 * (1.0 + b.abs()), "{lhs} vs {rhs} at ({x},{y}): {a} != {b}");
            }
        }
    }

    fn d(src: &str) -> Expr {
        Expr::parse(src).unwrap().diff_y().unwrap()
    }

    #[test]
    fn square() {
        grid_equal(&d("y^2"), &Expr::parse("2*y").unwrap());
    }

    #[test]
    fn x_only_is_zero() {
        assert_eq!(d("x"), Expr::Const(0.0));
        assert_eq!(d("sin(x)^3 / exp(x)"), Expr::Const(0.0));
    }

    #[test]
    fn product_with_function() {
        grid_equal(&d("x*sin(y)"), &Expr::parse("x*cos(y)").unwrap());
    }

    #[test]
    fn quotient_chain_and_roots() {
        grid_equal(&d("1/(1+y^2)"), &Expr::parse("-2*y/(1+y^2)^2").unwrap());
        grid_equal(&d("log(y)"), &Expr::parse("1/y").unwrap());
        grid_equal(&d("sqrt(y)"), &Expr::parse("0.5/sqrt(y)").unwrap());
        grid_equal(&d("exp(-x*y)"), &Expr::parse("-x*exp(-x*y)").unwrap());
        grid_equal(&d("cos(y^3)"), &Expr::parse("-sin(y^3)*3*y^2").unwrap());
        grid_equal(&d("-5*(y-sin(x))+cos(x)"), &Expr::Const(-5.0));
    }

    #[test]
    fn x_dependent_exponent_is_fine() {
        grid_equal(&d("y^x"), &Expr::parse("x*y^(x-1)").unwrap());
    }

    #[test]
    fn y_dependent_exponent_rejected_at_diff_time() {
        let e = Expr::parse("2^y").unwrap();
        assert_eq!(e.eval(0.0, 3.0), 8.0);
        assert!(matches!(e.diff_y(), Err(DiffError::YDependentExponent(_))));
    }

    #[test]
    fn simplification_keeps_linear_terms_small() {
        assert_eq!(d("3*y + x"), Expr::Const(3.0));
        assert_eq!(d("y"), Expr::Const(1.0));
    }
}
