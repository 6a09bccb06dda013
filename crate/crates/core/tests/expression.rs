use proptest::prelude::*;
use rk3gl2::expression::{BinOp, Func, Var};
use rk3gl2::Expr;

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-1e3f64..1e3).prop_map(Expr::Const),
        Just(Expr::Var(Var::X)),
        Just(Expr::Var(Var::Y)),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        let ops = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div),
            Just(BinOp::Pow),
        ];
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            (ops, inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            (proptest::sample::select(Func::ALL.to_vec()), inner).prop_map(|(f, a)| Expr::call(f, a)),
        ]
    })
}

fn same_value(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
}

proptest! {
    #[test]
    fn printed_form_reparses_to_the_same_function(e in arb_expr(), x in -3f64..3.0, y in -3f64..3.0) {
        let printed = e.to_string();
        let back = Expr::parse(&printed).unwrap();
        prop_assert!(same_value(e.eval(x, y), back.eval(x, y)), "{printed}");
        prop_assert_eq!(back.to_string(), printed);
    }
}

// Central differences with step δ have error ~ δ² f_yyy / 6; a tenfold δ
// reduction should cut the gap about a hundredfold.
#[test]
fn derivative_matches_central_differences() {
    let cases = [
        ("sin(3*y) + x*y^3", 0.4, 0.7),
        ("exp(2*y)*cos(x)", 0.3, 0.5),
        ("y^4/(1+x^2)", 1.1, 1.3),
        ("log(2 + y^2) - sqrt(1 + x*y)", 0.8, 1.7),
    ];
    for (src, x, y) in cases {
        let f = Expr::parse(src).unwrap();
        let d = f.diff_y().unwrap();
        let gap = |delta: f64| {
            let numeric = (f.eval(x, y + delta) - f.eval(x, y - delta)) / (2.0 * delta);
            (d.eval(x, y) - numeric).abs()
        };
        let ratio = gap(1e-2) / gap(1e-3);
        assert!((80.0..=120.0).contains(&ratio), "{src}: ratio {ratio}");
        assert!(gap(1e-5) < 1e-8, "{src}");
    }
}
