//! Standard and non-standard Lagrangians for the free particle `xddot = 0`.
//!
//! With `v(t) = a_o t + v_o`, the non-standard coefficients are
//!
//! ```text
//! g1 = C1 v³,  g2 = -C1 a_o v²,  g3 = C1 C2 v²
//! L  = 1 / (g1 xdot + g2 x + g3)
//! ```
//!
//! and `u = ġ1/g1 = 3 a_o / v` solves `u' + u²/3 = 0`.

use serde::Serialize;

use crate::domain::DomainBox;
use crate::error::{Error, Result};
use crate::exactness::{standard_endpoint_residuals, EndConditions};
use crate::expr::{partial_derivative, simplify, EvalPoint, Expr, Trajectory, Var, MACHINE_TINY};
use crate::families::CoefficientSet;
use crate::variational::{derive_ode, el_residual, scaled_residual, FamilyTag, LagrangianSpec, OdeForm};

/// Padding around `[t0, t1]` inside which `a_o t + v_o` must not vanish.
pub const POLE_PAD: f64 = 0.05;
pub const RK4_STEP: f64 = 1e-3;
/// Bound on the scaled `Q` of the EL equation `P xddot + Q = 0`.
pub const Q_TOL: f64 = 1e-9;
/// Lower bound on `|P|`.
pub const P_MIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSolution {
    pub u: Expr,
    pub v: Expr,
}

fn linear_v(a_o: f64, v_o: f64) -> Expr {
    simplify(&(a_o * Expr::t() + v_o))
}

/// `v = a_o t + v_o`, `u = 3 v'/v`.
pub fn riccati_u(a_o: f64, v_o: f64) -> Result<RiccatiSolution> {
    if a_o == 0.0 && v_o == 0.0 {
        return Err(Error::InvalidParameter("a_o and v_o must not both vanish".into()));
    }
    let v = linear_v(a_o, v_o);
    let u = simplify(&(3.0 * a_o / v.clone()));
    Ok(RiccatiSolution { u, v })
}

/// `u' + u²/3` at `t`.
pub fn riccati_residual(s: &RiccatiSolution, t: f64) -> Result<f64> {
    let p = EvalPoint::at_time(t);
    let u = s.u.eval(&p)?;
    let du = partial_derivative(&s.u, Var::T).eval(&p)?;
    Ok(du + u * u / 3.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NslDerivation {
    pub a_o: f64,
    pub v_o: f64,
    pub c1: f64,
    pub c2: f64,
    pub g1: Expr,
    pub g2: Expr,
    pub g3: Expr,
    pub lagrangian: LagrangianSpec,
}

/// Closed-form coefficients and the resulting non-standard Lagrangian.
pub fn nsl_coefficients(a_o: f64, v_o: f64, c1: f64, c2: f64) -> Result<NslDerivation> {
    if c1 == 0.0 {
        return Err(Error::InvalidParameter("C1 must be nonzero".into()));
    }
    let v = riccati_u(a_o, v_o)?.v;
    let g1 = simplify(&(c1 * v.clone().powi(3)));
    let g2 = simplify(&(-c1 * a_o * v.clone().powi(2)));
    let g3 = simplify(&(c1 * c2 * v.powi(2)));
    let denom = g1.clone() * Expr::xdot() + g2.clone() * Expr::x() + g3.clone();
    let lagrangian = LagrangianSpec::new(simplify(&(1.0 / denom)), FamilyTag::Nonstandard)?;
    Ok(NslDerivation { a_o, v_o, c1, c2, g1, g2, g3, lagrangian })
}

/// The three coefficient conditions evaluated at `t`:
///
/// ```text
/// r1 = g2/g1 + ġ1/(3 g1)
/// r2 = ġ2/g1 - ½ (ġ1/g1)(g2/g1) + g2²/(2 g1²)
/// r3 = ġ3/g1 - ½ (ġ1/g1)(g3/g1) + (g3/g1)(g2/(2 g1))
/// ```
pub fn coefficient_condition_residuals(d: &NslDerivation, t: f64) -> Result<(f64, f64, f64)> {
    let root = if d.a_o != 0.0 { -d.v_o / d.a_o } else { f64::NAN };
    if (d.a_o * t + d.v_o).abs() < f64::MIN_POSITIVE {
        return Err(Error::Pole { t: root, lo: t, hi: t });
    }
    let p = EvalPoint::at_time(t);
    let val = |e: &Expr| e.eval(&p);
    let der = |e: &Expr| partial_derivative(e, Var::T).eval(&p);
    let (g1, g2, g3) = (val(&d.g1)?, val(&d.g2)?, val(&d.g3)?);
    let (dg1, dg2, dg3) = (der(&d.g1)?, der(&d.g2)?, der(&d.g3)?);
    let r1 = g2 / g1 + dg1 / (3.0 * g1);
    let r2 = dg2 / g1 - 0.5 * (dg1 / g1) * (g2 / g1) + g2 * g2 / (2.0 * g1 * g1);
    let r3 = dg3 / g1 - 0.5 * (dg1 / g1) * (g3 / g1) + (g3 / g1) * (g2 / (2.0 * g1));
    Ok((r1, r2, r3))
}

/// Outcome of checking that the EL equation of the derived Lagrangian is a
/// nonzero multiple of `xddot`.
#[derive(Debug, Clone, PartialEq)]
pub struct InertiaVerification {
    pub ode: OdeForm,
    pub max_abs_q: f64,
    /// `|Q|` scaled like nullness residuals; compared with [`Q_TOL`].
    pub max_scaled_q: f64,
    pub min_abs_p: f64,
    pub samples: usize,
    pub passes: bool,
}

/// Extracts `P xddot + Q` and samples `domain` to confirm `Q ≈ 0` and
/// `|P|` bounded away from zero.
pub fn verify_inertia_nsl(d: &NslDerivation, domain: &DomainBox, n_samples: usize) -> Result<InertiaVerification> {
    let ode = derive_ode(&d.lagrangian);
    let body = d.lagrangian.body();
    let denom = d.g1.clone() * Expr::xdot() + d.g2.clone() * Expr::x() + d.g3.clone();
    // Powers of W reach far below any absolute guard when a_o t + v_o is
    // small, so admissibility is judged by cancellation in W itself.
    let samples = domain.sample(n_samples, |p| {
        let (w, w_scale) = denom.eval_scaled(p, MACHINE_TINY).ok()?;
        if w.abs() < domain.guard * w_scale {
            return None;
        }
        let (raw, scaled) = scaled_residual(&ode.q, body, p, MACHINE_TINY)?;
        let pv = ode.p.eval(p).ok()?;
        Some((raw, scaled, pv.abs()))
    })?;
    let mut out = InertiaVerification {
        ode,
        max_abs_q: 0.0,
        max_scaled_q: 0.0,
        min_abs_p: f64::INFINITY,
        samples: samples.len(),
        passes: false,
    };
    for (_, (raw, scaled, p)) in samples {
        out.max_abs_q = out.max_abs_q.max(raw);
        out.max_scaled_q = out.max_scaled_q.max(scaled);
        out.min_abs_p = out.min_abs_p.min(p);
    }
    out.passes = out.max_scaled_q <= Q_TOL && out.min_abs_p >= P_MIN;
    Ok(out)
}

/// Largest `|EL(L)|` along `path` at the given times.
pub fn el_residual_along(l: &LagrangianSpec, path: &Trajectory, times: &[f64]) -> Result<f64> {
    let r = el_residual(l);
    times.iter().try_fold(0.0f64, |acc, &t| {
        let v = r.eval(&path.point(t)?).map_err(|source| Error::SingularityOnPath { t, source })?;
        Ok(acc.max(v.abs()))
    })
}

/// The two endpoint relations as printed for the free particle, alongside
/// the general endpoint residuals for `x(0) = 1`, `x(1) = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InertiaExactness {
    /// `f1(1) + f2(1) + f3(1) + f4(1)`.
    pub printed_end: f64,
    /// `f3(0) + ½ f1(0)`.
    pub printed_start: f64,
    /// `½ f1(1)·4 + 2 f2(1) + 2 f3(1) + f4(1)`.
    pub general_end: f64,
    /// `½ f1(0) + f3(0)`.
    pub general_start: f64,
}

pub fn inertia_exactness_relations(c: &CoefficientSet) -> Result<InertiaExactness> {
    let at = |e: &Expr, t: f64| e.eval(&EvalPoint::at_time(t));
    let printed_end = at(&c.f1, 1.0)? + at(&c.f2, 1.0)? + at(&c.f3, 1.0)? + at(&c.f4, 1.0)?;
    let printed_start = at(&c.f3, 0.0)? + 0.5 * at(&c.f1, 0.0)?;
    let (general_end, general_start) = standard_endpoint_residuals(c, &EndConditions::default())?;
    Ok(InertiaExactness { printed_end, printed_start, general_end, general_start })
}

/// Errors with [`Error::Pole`] if `a_o t + v_o` vanishes in
/// `[t0 - pad, t1 + pad]`.
pub fn check_pole_free(a_o: f64, v_o: f64, t0: f64, t1: f64, pad: f64) -> Result<()> {
    let (lo, hi) = (t0.min(t1) - pad, t0.max(t1) + pad);
    if a_o == 0.0 {
        if v_o == 0.0 {
            return Err(Error::InvalidParameter("a_o and v_o must not both vanish".into()));
        }
        return Ok(());
    }
    let t = -v_o / a_o;
    if (lo..=hi).contains(&t) {
        return Err(Error::Pole { t, lo, hi });
    }
    Ok(())
}

fn rk4_step(u: f64, h: f64) -> f64 {
    let f = |u: f64| -u * u / 3.0;
    let k1 = f(u);
    let k2 = f(u + 0.5 * h * k1);
    let k3 = f(u + 0.5 * h * k2);
    let k4 = f(u + h * k3);
    u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates `u' = -u²/3` from `u(0) = 3 a_o / v_o` with classical RK4 at
/// step [`RK4_STEP`] (shortened to land on each grid time) and returns the
/// largest deviation from `3 a_o / (a_o t + v_o)` over `grid`.
pub fn riccati_numeric_crosscheck(a_o: f64, v_o: f64, grid: &[f64]) -> Result<f64> {
    if a_o == 0.0 && v_o == 0.0 {
        return Err(Error::InvalidParameter("a_o and v_o must not both vanish".into()));
    }
    let (lo, hi) = grid.iter().fold((0.0f64, 0.0f64), |(l, h), &t| (l.min(t), h.max(t)));
    check_pole_free(a_o, v_o, lo, hi, 0.0)?;
    let exact = |t: f64| 3.0 * a_o / (a_o * t + v_o);
    let mut worst = 0.0f64;
    for &target in grid {
        let steps = (target.abs() / RK4_STEP).ceil().max(1.0) as usize;
        let h = target / steps as f64;
        let u = (0..steps).fold(exact(0.0), |u, _| rk4_step(u, h));
        worst = worst.max((u - exact(target)).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, VarSet};

    #[test]
    fn riccati_examples() {
        let s = riccati_u(1.0, 1.0).unwrap();
        assert_eq!(s.u.eval(&EvalPoint::at_time(1.0)).unwrap(), 1.5);
        for t in [0.0, 0.5, 1.0] {
            assert!(riccati_residual(&s, t).unwrap().abs() <= 1e-12);
        }
        assert!(riccati_u(0.0, 1.0).unwrap().u.is_zero());
        assert!(riccati_u(0.0, 0.0).is_err());
    }

    #[test]
    fn coefficient_values() {
        let d = nsl_coefficients(1.0, 1.0, 1.0, 3.0).unwrap();
        let p = EvalPoint::at_time(1.0);
        assert_eq!(d.g1.eval(&p).unwrap(), 8.0);
        assert_eq!(d.g2.eval(&p).unwrap(), -4.0);
        assert_eq!(d.g3.eval(&p).unwrap(), 12.0);
        let d = nsl_coefficients(0.0, 1.0, 1.0, 2.0).unwrap();
        assert_eq!((d.g1.clone(), d.g2.clone(), d.g3.clone()), (Expr::one(), Expr::zero(), Expr::Const(2.0)));
        assert_eq!(d.lagrangian.body(), &parse_expr("1/(xdot + 2)", VarSet::ALL).unwrap());
        assert!(nsl_coefficients(1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn lagrangian_value() {
        let d = nsl_coefficients(1.0, 1.0, 1.0, 1.0).unwrap();
        let v = d.lagrangian.body().eval(&EvalPoint::new(0.5, 1.5, 1.0, 0.0)).unwrap();
        assert!((v - 1.0 / 2.25).abs() < 1e-15);
    }

    #[test]
    fn conditions_vanish() {
        let d = nsl_coefficients(1.0, 1.0, 1.0, 1.0).unwrap();
        for t in [0.0, 0.3, 1.0] {
            let (r1, r2, r3) = coefficient_condition_residuals(&d, t).unwrap();
            assert!(r1.abs().max(r2.abs()).max(r3.abs()) <= 1e-12);
        }
        let mut tampered = d.clone();
        tampered.g2 = simplify(&(1.1 * d.g2.clone()));
        let (r1, _, _) = coefficient_condition_residuals(&tampered, 0.0).unwrap();
        assert!((r1 + 0.1).abs() < 1e-12);
        let d = nsl_coefficients(0.0, 2.0, 1.5, 1.0).unwrap();
        assert_eq!(coefficient_condition_residuals(&d, 0.4).unwrap(), (0.0, 0.0, 0.0));
        let d = nsl_coefficients(1.0, -0.5, 1.0, 1.0).unwrap();
        assert!(matches!(coefficient_condition_residuals(&d, 0.5), Err(Error::Pole { .. })));
    }

    #[test]
    fn ode_reduces_to_inertia() {
        let d = nsl_coefficients(1.0, 1.0, 1.0, 1.0).unwrap();
        let v = verify_inertia_nsl(&d, &DomainBox::default(), 200).unwrap();
        assert!(v.passes, "{v:?}");
        let straight = Trajectory::new(parse_expr("t + 1", VarSet::TIME).unwrap()).unwrap();
        assert!(el_residual_along(&d.lagrangian, &straight, &[0.0, 0.25, 0.5, 1.0]).unwrap() <= 1e-10);
        let parabola = Trajectory::new(parse_expr("t^2", VarSet::TIME).unwrap()).unwrap();
        assert!(el_residual_along(&d.lagrangian, &parabola, &[0.5]).unwrap() > 1e-3);
    }

    #[test]
    fn exactness_relations() {
        let t = |s: &str| parse_expr(s, VarSet::TIME).unwrap();
        let c = CoefficientSet::new(t("2"), t("0"), t("-1 - t"), t("0")).unwrap();
        let r = inertia_exactness_relations(&c).unwrap();
        assert_eq!((r.printed_end, r.printed_start), (0.0, 0.0));
        let r = inertia_exactness_relations(&CoefficientSet::zero()).unwrap();
        assert_eq!((r.printed_end, r.printed_start, r.general_end, r.general_start), (0.0, 0.0, 0.0, 0.0));
        let r = inertia_exactness_relations(&CoefficientSet::constants(1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!((r.printed_end, r.printed_start), (1.0, 0.5));
        assert_eq!((r.general_end, r.general_start), (2.0, 0.5));
    }

    #[test]
    fn rk4_crosscheck() {
        assert!(riccati_numeric_crosscheck(1.0, 1.0, &[0.25, 0.5, 0.75, 1.0]).unwrap() <= 1e-8);
        assert_eq!(riccati_numeric_crosscheck(0.0, 1.0, &[0.5, 1.0]).unwrap(), 0.0);
        assert!(riccati_numeric_crosscheck(-1.0, 2.0, &[0.25, 0.5, 1.0]).unwrap() <= 1e-8);
        assert!(matches!(riccati_numeric_crosscheck(-1.0, 0.5, &[1.0]), Err(Error::Pole { .. })));
    }

    #[test]
    fn pole_exclusion() {
        assert!(check_pole_free(1.0, 1.0, 0.0, 1.0, POLE_PAD).is_ok());
        assert!(check_pole_free(1.0, 0.02, 0.0, 1.0, POLE_PAD).is_err());
        assert!(check_pole_free(-1.0, 1.04, 0.0, 1.0, POLE_PAD).is_err());
        assert!(check_pole_free(0.0, 1.0, 0.0, 1.0, POLE_PAD).is_ok());
    }
}
