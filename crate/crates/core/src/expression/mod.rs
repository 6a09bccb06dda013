//! Arithmetic expressions in the variables `x` and `y`.
//!
//! Right-hand sides of ODE problems loaded from config files are written in
//! this small language. An [`Expr`] can be evaluated, printed back to a fully
//! parenthesized canonical form, and differentiated symbolically with respect
//! to `y` (see [`Expr::diff_y`]).

mod diff;
mod parse;

use std::fmt;

pub use diff::DiffError;
pub use parse::ParseError;

/// Independent variable `x` or dependent variable `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn apply(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            BinOp::Add => lhs + rhs,
            BinOp::Sub => lhs - rhs,
            BinOp::Mul => lhs * rhs,
            BinOp::Div => lhs / rhs,
            BinOp::Pow => lhs.powf(rhs),
        }
    }
}

/// Built-in unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, arg: f64) -> f64 {
        match self {
            Func::Sin => arg.sin(),
            Func::Cos => arg.cos(),
            Func::Exp => arg.exp(),
            Func::Log => arg.ln(),
            Func::Sqrt => arg.sqrt(),
        }
    }
}

/// Expression tree. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Parses `source` using the usual precedence rules, `^` binding tightest
    /// and associating to the right.
    pub fn parse(source: &str) -> Result<Expr, ParseError> {
        parse::parse(source)
    }

    /// Evaluates at `(x, y)`. Domain violations (log of a negative, division by
    /// zero, ...) yield IEEE NaN or infinity rather than an error.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::Y) => y,
            Expr::Neg(inner) => -inner.eval(x, y),
            Expr::Binary(op, lhs, rhs) => op.apply(lhs.eval(x, y), rhs.eval(x, y)),
            Expr::Call(func, arg) => func.apply(arg.eval(x, y)),
        }
    }

    /// True if the variable `y` occurs anywhere in the tree.
    pub fn depends_on_y(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(Var::X) => false,
            Expr::Var(Var::Y) => true,
            Expr::Neg(inner) | Expr::Call(_, inner) => inner.depends_on_y(),
            Expr::Binary(_, lhs, rhs) => lhs.depends_on_y() || rhs.depends_on_y(),
        }
    }

    pub fn neg(inner: Expr) -> Expr {
        Expr::Neg(Box::new(inner))
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, Box::new(arg))
    }
}

/// Fully parenthesized canonical form. Constants use the shortest
/// representation that round-trips, so `parse(e.to_string())` evaluates
/// bit-identically to `e`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write_const(f, *c),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::Y) => f.write_str("y"),
            Expr::Neg(inner) => write!(f, "(-{inner})"),
            Expr::Binary(op, lhs, rhs) => write!(f, "({lhs}{}{rhs})", op.symbol()),
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c.is_nan() {
        f.write_str("(0/0)")
    } else if c.is_infinite() {
        f.write_str(if c > 0.0 { "(1/0)" } else { "(-(1/0))" })
    } else if c.is_sign_negative() {
        write!(f, "(-{:e})", -c)
    } else {
        write!(f, "{c:e}")
    }
}
