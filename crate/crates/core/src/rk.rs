//! Explicit Runge-Kutta stepping from a Butcher tableau.
//!
//! One step is written `w_{i+1} = w_i + h F(x_i, w_i)` where the increment
//! function is `F = (Σ b_i k_i) / h` and `k_i = h f(x + c_i h, y + Σ_j a_ij k_j)`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableauError {
    #[error("stage count mismatch: c has {c}, b has {b}, A has {rows} rows")]
    Shape { c: usize, b: usize, rows: usize },
    #[error("A is not strictly lower triangular (entry ({row}, {col}) = {value})")]
    NotExplicit { row: usize, col: usize, value: f64 },
    #[error("weights sum to {0}, expected 1")]
    Inconsistent(f64),
    #[error("row {row}: c = {c} but row sum of A = {sum}")]
    RowSum { row: usize, c: f64, sum: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl ButcherTableau {
    pub fn new(c: Vec<f64>, a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self, TableauError> {
        let t = ButcherTableau { c, a, b };
        t.check()?;
        Ok(t)
    }

    /// The third-order tableau
    ///
    /// ```text
    ///  0   |
    ///  1/2 | 1/2
    ///  3/4 | 0    3/4
    /// -----+---------------
    ///      | 2/9  3/9  4/9
    /// ```
    pub fn rk3() -> Self {
        ButcherTableau {
            c: vec![0.0, 0.5, 0.75],
            a: vec![vec![], vec![0.5], vec![0.0, 0.75]],
            b: vec![2.0 / 9.0, 3.0 / 9.0, 4.0 / 9.0],
        }
    }

    pub fn stages(&self) -> usize {
        self.c.len()
    }

    /// Coefficient `a_ij`; zero on and above the diagonal or where a row is short.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.a.get(i).and_then(|row| row.get(j)).copied().unwrap_or(0.0)
    }

    /// Shape, explicitness, `Σ b = 1` and `c_i = Σ_j a_ij`.
    pub fn check(&self) -> Result<(), TableauError> {
        let s = self.c.len();
        if self.b.len() != s || self.a.len() != s {
            return Err(TableauError::Shape {
                c: s,
                b: self.b.len(),
                rows: self.a.len(),
            });
        }
        for (i, row) in self.a.iter().enumerate() {
            for (j, &value) in row.iter().enumerate() {
                if j >= i && value != 0.0 {
                    return Err(TableauError::NotExplicit { row: i, col: j, value });
                }
            }
        }
        let total: f64 = self.b.iter().sum();
        if (total - 1.0).abs() > 1e-14 {
            return Err(TableauError::Inconsistent(total));
        }
        for (i, row) in self.a.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - self.c[i]).abs() > 1e-14 {
                return Err(TableauError::RowSum { row: i, c: self.c[i], sum });
            }
        }
        Ok(())
    }

    /// Increment function `F(x, y)` for step size `h` (nonzero).
    pub fn increment<F>(&self, f: F, x: f64, y: f64, h: f64) -> f64
    where
        F: Fn(f64, f64) -> f64,
    {
        let s = self.stages();
        let mut k = Vec::with_capacity(s);
        for i in 0..s {
            let shift: f64 = (0..i).map(|j| self.coeff(i, j) * k[j]).sum();
            k.push(h * f(x + self.c[i] * h, y + shift));
        }
        let weighted: f64 = self.b.iter().zip(&k).map(|(b, k)| b * k).sum();
        weighted / h
    }

    pub fn step<F>(&self, f: F, x: f64, w: f64, h: f64) -> f64
    where
        F: Fn(f64, f64) -> f64,
    {
        w + h * self.increment(f, x, w, h)
    }

    /// Central difference `[F(x, y+δ) − F(x, y−δ)] / 2δ`.
    pub fn increment_dy_numeric<F>(&self, f: F, x: f64, y: f64, h: f64, delta: f64) -> f64
    where
        F: Fn(f64, f64) -> f64,
    {
        let up = self.increment(&f, x, y + delta, h);
        let down = self.increment(&f, x, y - delta, h);
        (up - down) / (2.0 * delta)
    }
}

/// `∂F/∂y` in closed form for [`ButcherTableau::rk3`], by the chain rule through
/// the three stages:
///
/// ```text
/// dk1 = h f_y(x, y)
/// dk2 = h f_y(x + h/2, y + k1/2) (1 + dk1/2)
/// dk3 = h f_y(x + 3h/4, y + 3k2/4) (1 + 3 dk2/4)
/// F_y = (2 dk1 + 3 dk2 + 4 dk3) / 9h
/// ```
pub fn rk3_increment_dy<F, G>(f: F, f_y: G, x: f64, y: f64, h: f64) -> f64
where
    F: Fn(f64, f64) -> f64,
    G: Fn(f64, f64) -> f64,
{
    let k1 = h * f(x, y);
    let y2 = y + 0.5 * k1;
    let k2 = h * f(x + 0.5 * h, y2);
    let y3 = y + 0.75 * k2;

    let dk1 = h * f_y(x, y);
    let dk2 = h * f_y(x + 0.5 * h, y2) * (1.0 + 0.5 * dk1);
    let dk3 = h * f_y(x + 0.75 * h, y3) * (1.0 + 0.75 * dk2);
    (2.0 * dk1 + 3.0 * dk2 + 4.0 * dk3) / (9.0 * h)
}
