//! Property tests for the expression front-end.

use alphafrac::expr::{eval, parse, BinaryOp, Expr, UnaryOp};
use proptest::prelude::*;

/// Generates parser-canonical trees: constants are non-negative (a negative
/// literal never comes out of the parser — unary minus does) and finite.
fn arb_expr() -> impl Strategy<Value = Expr<f64>> {
    let leaf = prop_oneof![
        (0.0..1000.0f64).prop_map(Expr::Constant),
        prop::sample::select(vec![0.0f64, 1.0, 0.5, 2.0]).prop_map(Expr::Constant),
        Just(Expr::Variable),
    ];
    leaf.prop_recursive(6, 48, 3, |inner| {
        let unary = prop::sample::select(vec![
            UnaryOp::Neg,
            UnaryOp::Sin,
            UnaryOp::Cos,
            UnaryOp::Exp,
            UnaryOp::Ln,
            UnaryOp::Sqrt,
            UnaryOp::Abs,
        ]);
        let binary = prop::sample::select(vec![
            BinaryOp::Add,
            BinaryOp::Sub,
            BinaryOp::Mul,
            BinaryOp::Div,
            BinaryOp::Pow,
        ]);
        prop_oneof![
            (unary, inner.clone()).prop_map(|(op, g)| Expr::Unary(op, Box::new(g))),
            (binary, inner.clone(), inner).prop_map(|(op, l, r)| Expr::Binary(
                op,
                Box::new(l),
                Box::new(r)
            )),
        ]
    })
}

proptest! {
    /// Rendering and re-parsing reproduces the tree node for node.
    #[test]
    fn parse_render_roundtrip(e in arb_expr()) {
        let rendered = e.to_string();
        let reparsed: Expr<f64> = parse(&rendered)
            .unwrap_or_else(|err| panic!("{rendered}: {err}"));
        prop_assert_eq!(&reparsed, &e, "render: {}", rendered);
    }

    /// Rendering is a fixed point: render(parse(render(e))) = render(e).
    #[test]
    fn render_is_stable(e in arb_expr()) {
        let once = e.to_string();
        let twice = parse::<f64>(&once).unwrap().to_string();
        prop_assert_eq!(once, twice);
    }

    /// eval respects the power node's mathematical definition.
    #[test]
    fn eval_power_homomorphism(t in 0.05..20.0f64, n in -3.0..4.0f64) {
        let f = parse::<f64>(&format!("t^({n})")).unwrap();
        let got = eval(&f, t).unwrap();
        prop_assert!((got - t.powf(n)).abs() <= 1e-12 * t.powf(n).abs().max(1.0));
    }

    /// Parse failures always point inside the input (offset ≤ len).
    #[test]
    fn parse_error_positions_in_range(s in "[-+*/^()a-z0-9. ]{0,24}") {
        if let Err(err) = parse::<f64>(&s) {
            prop_assert!(err.position <= s.len());
        }
    }

    /// Evaluation is deterministic: same tree, same point, same bits
    /// (NaN compared through its bit pattern).
    #[test]
    fn eval_deterministic(e in arb_expr(), t in 0.1..10.0f64) {
        let a = eval(&e, t).map(f64::to_bits);
        let b = eval(&e, t).map(f64::to_bits);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn substitution_is_composition() {
    let f = parse::<f64>("t^2+sin(t)").unwrap();
    let g = parse::<f64>("exp(t/2)").unwrap();
    let composed = f.substitute(&g);
    for t in [0.3, 1.0, 2.5] {
        let inner = eval(&g, t).unwrap();
        assert_eq!(eval(&composed, t).unwrap(), eval(&f, inner).unwrap());
    }
}
