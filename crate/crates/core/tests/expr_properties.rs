//! Property tests for the expression layer: differentiation against central
//! finite differences, linearity, semantic preservation under
//! simplification and print/parse fidelity.

use nullgauge::expr::Exponent;
use nullgauge::{parse_expr, partial_derivative, simplify, EvalPoint, Expr, Var, VarSet};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-3.0f64..3.0).prop_map(|c| Expr::Const((c * 8.0).round() / 8.0)),
        Just(Expr::t()),
        Just(Expr::x()),
        Just(Expr::xdot()),
    ]
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a / b),
            (inner.clone(), 0i64..4).prop_map(|(a, n)| a.powi(n)),
            (inner.clone(), prop_oneof![Just((1, 2)), Just((1, 3)), Just((-2, 3)), Just((-1, 1))])
                .prop_map(|(a, (p, q))| a.pow(Exponent::new(p, q))),
            inner.clone().prop_map(|a| -a),
            inner.clone().prop_map(Expr::ln),
            inner.clone().prop_map(Expr::sin),
            inner.clone().prop_map(Expr::cos),
            inner.clone().prop_map(Expr::abs),
            inner.prop_map(|a| (a * 0.25).exp()),
        ]
    })
}

fn point() -> impl Strategy<Value = EvalPoint> {
    (0.0f64..1.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(t, x, v)| EvalPoint::new(t, x, v, 0.0))
}

/// Central difference of `e` in `v`, or `None` near singularities.
fn central_difference(e: &Expr, v: Var, p: &EvalPoint, h: f64) -> Option<f64> {
    let plus = e.eval_guarded(&p.with(v, p.get(v) + h), 1e-2).ok()?;
    let minus = e.eval_guarded(&p.with(v, p.get(v) - h), 1e-2).ok()?;
    Some((plus - minus) / (2.0 * h))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn derivative_matches_finite_differences(e in expr_strategy(), p in point()) {
        for v in [Var::T, Var::X, Var::Xdot] {
            let d = partial_derivative(&e, v);
            let Ok((value, _)) = e.eval_scaled(&p, 1e-2) else { continue };
            // keep away from kinks of abs and from steep regions
            if value.abs() > 1e3 { continue; }
            let Ok(exact) = d.eval_guarded(&p, 1e-2) else { continue };
            let Some(fd) = central_difference(&e, v, &p, 1e-6) else { continue };
            let Some(fd_half) = central_difference(&e, v, &p, 5e-7) else { continue };
            // a kink or pole inside the stencil shows up as step dependence
            if (fd - fd_half).abs() > 1e-4 * fd.abs().max(1.0) { continue; }
            prop_assert!(
                (exact - fd).abs() <= 1e-5 * exact.abs().max(1.0),
                "d/d{} of {} at {:?}: symbolic {} vs fd {}", v, e, p, exact, fd
            );
        }
    }

    #[test]
    fn differentiation_is_linear(
        e1 in expr_strategy(),
        e2 in expr_strategy(),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        pts in proptest::collection::vec(point(), 100),
    ) {
        for v in [Var::T, Var::X, Var::Xdot] {
            let combined = partial_derivative(&(a * e1.clone() + b * e2.clone()), v);
            let d1 = partial_derivative(&e1, v);
            let d2 = partial_derivative(&e2, v);
            for p in &pts {
                let (Ok((lhs, s1)), Ok((r1, s2)), Ok((r2, s3))) =
                    (combined.eval_scaled(p, 1e-3), d1.eval_scaled(p, 1e-3), d2.eval_scaled(p, 1e-3))
                else { continue };
                let rhs = a * r1 + b * r2;
                let scale = 1.0f64.max(s1).max(a.abs() * s2 + b.abs() * s3);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn simplify_preserves_value(e in expr_strategy(), p in point()) {
        let s = simplify(&e);
        if let Ok(v) = e.eval_guarded(&p, 1e-3) {
            let w = s.eval(&p);
            prop_assert!(w.is_ok(), "{} -> {} fails at {:?}", e, s, p);
            let w = w.unwrap();
            prop_assert!(
                (v - w).abs() <= 1e-12 * v.abs().max(1.0),
                "{} -> {} at {:?}: {} vs {}", e, s, p, v, w
            );
        }
    }

    #[test]
    fn printed_text_parses_back(e in expr_strategy()) {
        let raw = parse_expr(&e.to_text(), VarSet::ALL).unwrap();
        prop_assert_eq!(&raw, &e);
        let s = simplify(&e);
        let back = parse_expr(&s.to_text(), VarSet::ALL).unwrap();
        prop_assert_eq!(back, s);
    }
}
