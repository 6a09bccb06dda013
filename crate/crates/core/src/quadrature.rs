//! Two-point Gauss-Legendre quadrature.
//!
//! Written in "average node spacing" form: on `[u, v]` the rule reads
//! `∫ f ≈ h (C₁ f(x₁) + C₂ f(x₂))` with `h = (v − u)/3` and `C₁ = C₂ = 3/2`,
//! which is the textbook rule with weights `(v − u)/2` rescaled by the mean
//! separation of the canonical nodes (2/3 on `[−1, 1]`).

use thiserror::Error;

/// Roots of the degree-2 Legendre polynomial on `[−1, 1]`: `∓√3/3`.
pub const CANONICAL_ROOTS: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

/// Weights paired with the spacing `h = (v − u)/3`.
pub const WEIGHTS: [f64; 2] = [1.5, 1.5];

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid interval [{u}, {v}]: need u < v")]
pub struct IntervalError {
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlRule {
    pub u: f64,
    pub v: f64,
    pub nodes: [f64; 2],
    /// Average node spacing, `(v − u)/3`.
    pub h: f64,
}

impl GlRule {
    pub fn weights(&self) -> [f64; 2] {
        WEIGHTS
    }

    /// `h (C₁ g(x₁) + C₂ g(x₂))` for a function of `x` alone.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        self.h * (WEIGHTS[0] * g(self.nodes[0]) + WEIGHTS[1] * g(self.nodes[1]))
    }
}

/// Maps the canonical roots onto `[u, v]` via `x = ((v − u) x̃ + u + v) / 2`.
pub fn gl2_rule(u: f64, v: f64) -> Result<GlRule, IntervalError> {
    if !(u < v) || !u.is_finite() || !v.is_finite() {
        return Err(IntervalError { u, v });
    }
    let map = |root: f64| 0.5 * ((v - u) * root + u + v);
    Ok(GlRule {
        u,
        v,
        nodes: [map(CANONICAL_ROOTS[0]), map(CANONICAL_ROOTS[1])],
        h: (v - u) / 3.0,
    })
}

/// Closes a subinterval: `w_base + h Σ C_j f(x_j, w_j)` with `w_j` the
/// approximations at the rule's nodes.
pub fn gl2_update<F>(w_base: f64, f: F, rule: &GlRule, w_at_nodes: [f64; 2]) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let [x1, x2] = rule.nodes;
    let [c1, c2] = WEIGHTS;
    w_base + rule.h * (c1 * f(x1, w_at_nodes[0]) + c2 * f(x2, w_at_nodes[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_roots_are_root_three_over_three() {
        let r = 3f64.sqrt() / 3.0;
        assert!((CANONICAL_ROOTS[1] - r).abs() <= f64::EPSILON);
        assert_eq!(CANONICAL_ROOTS[0], -CANONICAL_ROOTS[1]);
        // P2(x) = (3x² − 1)/2 vanishes at the roots
        for x in CANONICAL_ROOTS {
            assert!((3.0 * x * x - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn reference_interval() {
        let rule = gl2_rule(-1.0, 1.0).unwrap();
        for (node, root) in rule.nodes.iter().zip(CANONICAL_ROOTS) {
            assert!((node - root).abs() <= f64::EPSILON);
        }
        assert_eq!(rule.h, 2.0 / 3.0);
        assert_eq!(rule.weights(), [1.5, 1.5]);
    }

    #[test]
    fn interval_zero_three() {
        let rule = gl2_rule(0.0, 3.0).unwrap();
        let half = 3f64.sqrt() / 2.0;
        assert!((rule.nodes[0] - (1.5 - half)).abs() < 1e-15);
        assert!((rule.nodes[1] - (1.5 + half)).abs() < 1e-15);
        assert_eq!(rule.h, 1.0);
    }

    #[test]
    fn rejects_empty_interval() {
        assert!(gl2_rule(1.0, 1.0).is_err());
        assert!(gl2_rule(2.0, 1.0).is_err());
        assert!(gl2_rule(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn update_examples() {
        let rule = gl2_rule(0.2, 1.7).unwrap();
        assert_eq!(gl2_update(3.0, |_, _| 0.0, &rule, [9.0, 9.0]), 3.0);
        assert!((gl2_update(3.0, |_, _| 1.0, &rule, [0.0, 0.0]) - 4.5).abs() < 1e-15);

        let rule = gl2_rule(0.0, 3.0).unwrap();
        let nodes = rule.nodes.map(|x| x.powi(4) / 4.0);
        let got = gl2_update(0.0, |x, _| x * x * x, &rule, nodes);
        assert!((got - 81.0 / 4.0).abs() <= 1e-13 * 81.0 / 4.0);
    }

    proptest! {
        #[test]
        fn nodes_symmetric_and_interior(u in -5.0f64..5.0, width in 1e-3f64..10.0) {
            let v = u + width;
            let rule = gl2_rule(u, v).unwrap();
            let mid = 0.5 * (u + v);
            prop_assert!(u < rule.nodes[0] && rule.nodes[0] < rule.nodes[1] && rule.nodes[1] < v);
            prop_assert!(((rule.nodes[0] - mid) + (rule.nodes[1] - mid)).abs() <= 1e-14 * (1.0 + mid.abs() + width));
            prop_assert_eq!(rule.h, (v - u) / 3.0);
        }

        #[test]
        fn cubic_exactness(u in -5.0f64..5.0, v in -5.0f64..5.0,
                           c in proptest::array::uniform4(-3.0f64..3.0)) {
            prop_assume!(v - u > 1e-2);
            let p = |x: f64| c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
            let antiderivative = |x: f64| {
                c[0] * x + c[1] * x * x / 2.0 + c[2] * x.powi(3) / 3.0 + c[3] * x.powi(4) / 4.0
            };
            let exact = antiderivative(v) - antiderivative(u);
            let rule = gl2_rule(u, v).unwrap();
            let got = gl2_update(0.0, |x, _| p(x), &rule, [0.0, 0.0]);
            // Relative to ∫|p|'s natural bound so cancelling integrals are not penalized.
            let reach = u.abs().max(v.abs()).max(1.0).powi(3);
            let scale = c.iter().map(|k| k.abs()).sum::<f64>() * reach * (v - u);
            prop_assert!((got - exact).abs() <= 1e-13 * scale, "{} vs {}", got, exact);
        }
    }
}
