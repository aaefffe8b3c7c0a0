//! Nullness of gauge derivatives, the affine form of the EL residual and
//! the closed-form residuals of the two test families.

use nullgauge::families::{
    nonstandard_null_const, nonstandard_null_general, nonstandard_test_residual, standard_null_general,
    standard_test_residual, time_only_null, CoefficientSet, NsCoefficients,
};
use nullgauge::variational::{derive_ode, el_residual, gauge_derivative, is_null, GaugeSpec, LagrangianSpec};
use nullgauge::{parse_expr, DomainBox, EvalPoint, Expr, VarSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GAUGES: &[&str] = &[
    "0.5*x^2",
    "t*x^2 + sin(t)*x",
    "exp(t)*x^3 - t^2",
    "ln(abs(x + 3))",
    "(t + 1)*ln(x^2 + 1)",
    "x*cos(t*x)",
    // a logarithmic gauge whose constant is allowed to vary with time
    "ln(abs(x + 2 + t))",
    "t*(1 - t)*ln(abs(2*x + 5 + sin(t)))",
    "x^(1/3)*t",
    "exp(x*t)/(t + 2)",
];

fn gauge(s: &str) -> GaugeSpec {
    GaugeSpec::new(parse_expr(s, VarSet::GAUGE).unwrap()).unwrap()
}

fn time_expr(s: &str) -> Expr {
    parse_expr(s, VarSet::TIME).unwrap()
}

fn points(n: usize, seed: u64) -> Vec<EvalPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            EvalPoint::new(
                rng.gen_range(0.0..1.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            )
        })
        .collect()
}

/// `dΦ/dt` along the straight line through `(t, x)` with slope `xdot`, by
/// central differences.
fn fd_gauge_derivative(g: &GaugeSpec, p: &EvalPoint, h: f64) -> Option<f64> {
    let plus = g.eval(p.t + h, p.x + h * p.xdot).ok()?;
    let minus = g.eval(p.t - h, p.x - h * p.xdot).ok()?;
    Some((plus - minus) / (2.0 * h))
}

#[test]
fn gauge_derivatives_are_null() {
    for src in GAUGES {
        let l = gauge_derivative(&gauge(src));
        let r = is_null(&l, &DomainBox::default(), 200, 1e-9).unwrap();
        assert!(r.is_null, "{src}: {r:?}");
    }
}

#[test]
fn gauge_derivative_matches_finite_differences() {
    for src in GAUGES {
        let g = gauge(src);
        let l = gauge_derivative(&g);
        for p in points(50, 3) {
            let (Ok(exact), Some(fd)) = (l.body().eval_guarded(&p, 1e-2), fd_gauge_derivative(&g, &p, 1e-6)) else {
                continue;
            };
            assert!((exact - fd).abs() <= 1e-5 * exact.abs().max(1.0), "{src} at {p:?}: {exact} vs {fd}");
        }
    }
}

#[test]
fn residual_is_affine_in_acceleration() {
    let corpus =
        ["0.5*xdot^2", "0.5*(xdot^2 - x^2)", "1/(xdot + 3)", "xdot/(x + t + 4)", "exp(t)*xdot^3*x", "t*x*xdot"];
    for src in corpus {
        let l = LagrangianSpec::custom(parse_expr(src, VarSet::LAGRANGIAN).unwrap()).unwrap();
        let r = el_residual(&l);
        let ode = derive_ode(&l);
        for p in points(100, 11) {
            let Ok((full, scale)) = r.eval_scaled(&p, 1e-3) else { continue };
            let affine = ode.p.eval(&p).unwrap() * p.xddot + ode.q.eval(&p).unwrap();
            assert!((full - affine).abs() <= 1e-10 * scale.max(1.0), "{src}: {full} vs {affine}");
        }
    }
}

#[test]
fn time_only_addons_keep_nullness() {
    let (base, _) = standard_null_general(
        &CoefficientSet::new(time_expr("t"), time_expr("1"), time_expr("0"), time_expr("0")).unwrap(),
    );
    let addons = ["1", "t", "t^2", "exp(t)", "sin(t)", "cos(3*t)", "1/(t + 1)", "ln(t + 2)", "t^(5/2)", "abs(t - 0.5)"];
    for a in addons {
        let extra = LagrangianSpec::custom(time_expr(a)).unwrap();
        let l = base.plus(&extra);
        assert!(is_null(&l, &DomainBox::default(), 200, 1e-9).unwrap().is_null, "{a}");
    }
}

/// `(f, f')` pairs written out by hand.
type Coeff = (&'static str, fn(f64) -> f64);

const CONSTANT: [Coeff; 2] = [("1.5", |_| 0.0), ("-2", |_| 0.0)];
const VARYING: [Coeff; 2] = [("t", |_| 1.0), ("t^2", |t| 2.0 * t)];

#[test]
fn standard_test_residual_closed_form() {
    let zero: Coeff = ("0", |_| 0.0);
    let all: Vec<Coeff> = CONSTANT.iter().chain(VARYING.iter()).copied().chain([zero]).collect();
    for f1 in &all {
        for f2 in &all {
            for f3 in &all {
                let c = CoefficientSet::new(time_expr(f1.0), time_expr(f2.0), time_expr(f3.0), time_expr("exp(t)"))
                    .unwrap();
                let (l, closed) = standard_test_residual(&c);
                let r = el_residual(&l);
                for p in points(20, 5) {
                    let expected = f1.1(p.t) * p.x + f2.1(p.t) * p.t + f3.1(p.t);
                    assert!((r.eval(&p).unwrap() - expected).abs() <= 1e-10);
                    assert!((closed.eval(&p).unwrap() - expected).abs() <= 1e-10);
                }
                let varying = [f1.0, f2.0, f3.0].iter().any(|s| s.contains('t'));
                let rep = is_null(&l, &DomainBox::default(), 200, 1e-9).unwrap();
                assert_eq!(rep.is_null, !varying, "{} {} {}", f1.0, f2.0, f3.0);
                if varying {
                    assert!(rep.max_abs_residual > 1e-3);
                }
            }
        }
    }
}

#[test]
fn nonstandard_test_residual_closed_form() {
    for a3 in [0.0, 0.5, -0.5, 1.0, -1.0] {
        let (a1, a2, a4) = (1.5, 1.0, 3.5);
        let (l, closed) = nonstandard_test_residual(a1, a2, a3, a4).unwrap();
        let r = el_residual(&l);
        for p in points(50, 9) {
            let d = a2 * p.x + a3 * p.t + a4;
            let expected = -a1 * a3 / (d * d);
            assert!((r.eval(&p).unwrap() - expected).abs() <= 1e-10);
            assert!((closed.eval(&p).unwrap() - expected).abs() <= 1e-10);
        }
        let rep = is_null(&l, &DomainBox::default(), 200, 1e-9).unwrap();
        assert_eq!(rep.is_null, a3 == 0.0, "a3 = {a3}");
    }
}

#[test]
fn constructors_satisfy_gauge_relation() {
    let pairs = vec![
        nonstandard_null_const(2.0, 1.0, 3.0).unwrap(),
        nonstandard_null_general(&NsCoefficients::new(time_expr("1"), time_expr("1 + t^2"), 0.5).unwrap()),
        time_only_null(2.0, 3.0, 1.0).unwrap(),
        standard_null_general(
            &CoefficientSet::new(time_expr("sin(t)"), time_expr("t"), time_expr("1"), time_expr("t^2")).unwrap(),
        ),
    ];
    for (l, g) in pairs {
        let from_gauge = gauge_derivative(&g);
        for p in points(100, 21) {
            let (Ok(a), Ok(b)) = (l.body().eval_guarded(&p, 1e-6), from_gauge.body().eval_guarded(&p, 1e-6)) else {
                continue;
            };
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
            if let Some(fd) = fd_gauge_derivative(&g, &p, 1e-6) {
                assert!((a - fd).abs() <= 1e-5 * a.abs().max(1.0));
            }
        }
    }
}
