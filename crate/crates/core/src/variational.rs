//! The Euler–Lagrange operator and the checks built on it: nullness by
//! sampling, gauge derivatives, extraction of the second-order ODE and a
//! path-independence certificate.

use serde::{Deserialize, Serialize};

use crate::action::{action_integral, trajectory_corpus, QuadOptions};
use crate::domain::DomainBox;
use crate::error::{Error, Result};
use crate::exactness::EndConditions;
use crate::expr::{partial_derivative, simplify, total_time_derivative, EvalPoint, Expr, Var, VarSet};

/// Default nullness tolerance on scaled residuals.
pub const DEFAULT_NULL_TOL: f64 = 1e-9;
/// Default number of sample points for nullness checks.
pub const DEFAULT_SAMPLES: usize = 200;

/// Where a Lagrangian came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyTag {
    Standard,
    StandardNull,
    Nonstandard,
    NonstandardNull,
    Custom,
}

impl FamilyTag {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyTag::Standard => "standard",
            FamilyTag::StandardNull => "standard-null",
            FamilyTag::Nonstandard => "nonstandard",
            FamilyTag::NonstandardNull => "nonstandard-null",
            FamilyTag::Custom => "custom",
        }
    }
}

/// A first-order Lagrangian `L(t, x, xdot)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianSpec {
    body: Expr,
    family: FamilyTag,
}

impl LagrangianSpec {
    pub fn new(body: Expr, family: FamilyTag) -> Result<Self> {
        if !body.free_vars().is_subset(VarSet::LAGRANGIAN) {
            return Err(Error::VariableOutOfScope { expr: body.to_text(), allowed: "t, x, xdot" });
        }
        Ok(LagrangianSpec { body, family })
    }

    pub fn custom(body: Expr) -> Result<Self> {
        Self::new(body, FamilyTag::Custom)
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    pub fn family(&self) -> FamilyTag {
        self.family
    }

    pub fn with_family(mut self, family: FamilyTag) -> Self {
        self.family = family;
        self
    }

    /// `self + other`, simplified, tagged custom.
    pub fn plus(&self, other: &LagrangianSpec) -> LagrangianSpec {
        LagrangianSpec { body: simplify(&(self.body.clone() + other.body.clone())), family: FamilyTag::Custom }
    }
}

/// A gauge function `Φ(t, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeSpec {
    body: Expr,
}

impl GaugeSpec {
    pub fn new(body: Expr) -> Result<Self> {
        if !body.free_vars().is_subset(VarSet::GAUGE) {
            return Err(Error::VariableOutOfScope { expr: body.to_text(), allowed: "t, x" });
        }
        Ok(GaugeSpec { body })
    }

    pub fn zero() -> Self {
        GaugeSpec { body: Expr::zero() }
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    pub fn eval(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.body.eval(&EvalPoint::new(t, x, 0.0, 0.0))?)
    }
}

/// Outcome of a sampled nullness test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullnessReport {
    pub is_null: bool,
    /// Largest `|EL(L)|` over the samples.
    pub max_abs_residual: f64,
    /// Largest residual after scaling by `max(1, |L|, roundoff scale)`;
    /// this is the quantity compared with `tolerance`.
    pub max_scaled_residual: f64,
    /// Sample attaining `max_scaled_residual`.
    pub worst_point: EvalPoint,
    pub samples_used: usize,
    pub tolerance: f64,
}

/// The EL equation written as `p * xddot + q = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeForm {
    pub p: Expr,
    pub q: Expr,
}

/// `d/dt(∂L/∂xdot) - ∂L/∂x`, simplified. Affine in `xddot`.
pub fn el_residual(l: &LagrangianSpec) -> Expr {
    let momentum = partial_derivative(&l.body, Var::Xdot);
    let rate = total_time_derivative(&momentum).expect("Lagrangian bodies never contain xddot");
    simplify(&(rate - partial_derivative(&l.body, Var::X)))
}

/// Residual of `residual` at `p` divided by `max(1, |L(p)|, roundoff scale)`,
/// or `None` if either expression is singular at `p` under `guard`.
pub(crate) fn scaled_residual(residual: &Expr, lagrangian: &Expr, p: &EvalPoint, guard: f64) -> Option<(f64, f64)> {
    let (r, scale) = residual.eval_scaled(p, guard).ok()?;
    let l = lagrangian.eval_guarded(p, guard).ok()?;
    Some((r.abs(), r.abs() / 1f64.max(l.abs()).max(scale)))
}

/// Evaluates the EL residual of `l` at `n_samples` admissible points of
/// `domain`; null iff every scaled residual is within `tol`.
pub fn is_null(l: &LagrangianSpec, domain: &DomainBox, n_samples: usize, tol: f64) -> Result<NullnessReport> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("at least one sample is required".into()));
    }
    let residual = el_residual(l);
    let samples = domain.sample(n_samples, |p| scaled_residual(&residual, &l.body, p, domain.guard))?;
    let mut report = NullnessReport {
        is_null: false,
        max_abs_residual: 0.0,
        max_scaled_residual: -1.0,
        worst_point: samples[0].0,
        samples_used: samples.len(),
        tolerance: tol,
    };
    for (p, (raw, scaled)) in samples {
        report.max_abs_residual = report.max_abs_residual.max(raw);
        if scaled > report.max_scaled_residual {
            report.max_scaled_residual = scaled;
            report.worst_point = p;
        }
    }
    report.is_null = report.max_scaled_residual <= tol;
    Ok(report)
}

/// `L = dΦ/dt = ∂Φ/∂t + xdot ∂Φ/∂x`.
pub fn gauge_derivative(g: &GaugeSpec) -> LagrangianSpec {
    let body = total_time_derivative(&g.body).expect("gauge bodies never contain xddot");
    LagrangianSpec { body, family: FamilyTag::Custom }
}

/// Largest `|L - dΦ/dt|` over sampled points, scaled like nullness
/// residuals. Returns `(max raw deviation, max scaled deviation)`.
pub fn gauge_consistency(
    l: &LagrangianSpec,
    g: &GaugeSpec,
    domain: &DomainBox,
    n_samples: usize,
) -> Result<(f64, f64)> {
    let diff = l.body.clone() - gauge_derivative(g).body;
    let samples = domain.sample(n_samples, |p| scaled_residual(&diff, &l.body, p, domain.guard))?;
    Ok(samples.iter().fold((0.0f64, 0.0f64), |(a, b), (_, (raw, scaled))| (a.max(*raw), b.max(*scaled))))
}

/// Splits the EL residual into `p * xddot + q` by substituting
/// `xddot = 0` (giving `q`) and `xddot = 1` (giving `p + q`).
pub fn derive_ode(l: &LagrangianSpec) -> OdeForm {
    let residual = el_residual(l);
    let q = simplify(&residual.substitute(Var::Xddot, &Expr::zero()));
    let p = simplify(&(residual.substitute(Var::Xddot, &Expr::one()) - q.clone()));
    OdeForm { p, q }
}

/// Integrates `l` along `n_paths` trajectories sharing both endpoints and
/// returns the largest pairwise difference of the action values. For a null
/// Lagrangian the spread is at quadrature-noise level.
pub fn path_independence_certificate(
    l: &LagrangianSpec,
    ends: &EndConditions,
    n_paths: usize,
    quad_tol: f64,
) -> Result<f64> {
    if n_paths < 2 {
        return Err(Error::InvalidParameter("path independence needs at least two paths".into()));
    }
    let opts = QuadOptions { tol: quad_tol, ..QuadOptions::default() };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for path in trajectory_corpus(ends, n_paths) {
        let a = action_integral(l, &path, ends, &opts)?.value;
        lo = lo.min(a);
        hi = hi.max(a);
    }
    Ok(hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn lag(s: &str) -> LagrangianSpec {
        LagrangianSpec::custom(parse_expr(s, VarSet::LAGRANGIAN).unwrap()).unwrap()
    }

    fn gauge(s: &str) -> GaugeSpec {
        GaugeSpec::new(parse_expr(s, VarSet::GAUGE).unwrap()).unwrap()
    }

    fn unit_ends() -> EndConditions {
        EndConditions::new(0.0, 1.0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn scopes_are_enforced() {
        assert!(LagrangianSpec::custom(Expr::xddot()).is_err());
        assert!(GaugeSpec::new(Expr::xdot()).is_err());
    }

    #[test]
    fn free_particle_residual_is_acceleration() {
        assert_eq!(el_residual(&lag("0.5*xdot^2")), Expr::xddot());
    }

    #[test]
    fn classic_null_term() {
        let r = el_residual(&lag("1.7*xdot*x"));
        assert_eq!(r, Expr::zero());
    }

    #[test]
    fn nonstandard_test_residual_value() {
        // a1 = a2 = a3 = 1, a4 = 0 at (t, x) = (1, 1): -1/(1 + 1)^2
        let r = el_residual(&lag("xdot/(x + t)"));
        let v = r.eval(&EvalPoint::new(1.0, 1.0, 0.3, -0.7)).unwrap();
        assert!((v + 0.25).abs() < 1e-12, "{v}");
    }

    #[test]
    fn constant_family_is_null() {
        let rep = is_null(&lag("5*(xdot*t + x)"), &DomainBox::default(), 200, 1e-9).unwrap();
        assert!(rep.is_null);
        assert_eq!(rep.samples_used, 200);
    }

    #[test]
    fn free_particle_is_not_null() {
        let rep = is_null(&lag("0.5*xdot^2"), &DomainBox::default(), 200, 1e-9).unwrap();
        assert!(!rep.is_null);
        // the residual is xddot itself, sampled over [-2, 2]
        assert!(rep.max_abs_residual > 1.9 && rep.max_abs_residual <= 2.0);
    }

    #[test]
    fn adding_time_function_keeps_nullness() {
        let rep = is_null(&lag("x*xdot + sin(t)"), &DomainBox::default(), 200, 1e-9).unwrap();
        assert!(rep.is_null);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(is_null(&lag("x"), &DomainBox::default(), 0, 1e-9).is_err());
    }

    #[test]
    fn gauge_derivative_examples() {
        assert_eq!(gauge_derivative(&gauge("0.5*3*x^2")).body, simplify(&parse_expr("3*x*xdot", VarSet::ALL).unwrap()));
        let l = gauge_derivative(&gauge("(2/3)*ln(abs(3*x + 4))"));
        let expected = parse_expr("2*xdot/(3*x + 4)", VarSet::ALL).unwrap();
        let p = EvalPoint::new(0.2, 0.4, -1.3, 0.0);
        assert!((l.body.eval(&p).unwrap() - expected.eval(&p).unwrap()).abs() < 1e-14);
        assert_eq!(gauge_derivative(&gauge("7")).body, Expr::zero());
    }

    #[test]
    fn gauge_consistency_of_log_pair() {
        let (raw, _) =
            gauge_consistency(&lag("xdot/(x + 1)"), &gauge("ln(x + 1)"), &DomainBox::default(), 200).unwrap();
        assert!(raw <= 1e-10);
    }

    #[test]
    fn ode_of_free_particle() {
        let ode = derive_ode(&lag("0.5*xdot^2"));
        assert_eq!(ode.p, Expr::one());
        assert_eq!(ode.q, Expr::zero());
    }

    #[test]
    fn ode_of_null_lagrangian_vanishes() {
        let ode = derive_ode(&gauge_derivative(&gauge("t*x^2 + sin(t)*x")));
        assert_eq!(ode.p, Expr::zero());
        assert_eq!(ode.q, Expr::zero());
    }

    #[test]
    fn path_independence() {
        let spread = path_independence_certificate(&lag("x*xdot"), &unit_ends(), 6, 1e-10).unwrap();
        assert!(spread <= 1e-9, "{spread}");
        let spread = path_independence_certificate(&lag("4"), &unit_ends(), 6, 1e-10).unwrap();
        assert!(spread <= 1e-14);
        let spread = path_independence_certificate(&lag("0.5*xdot^2"), &unit_ends(), 6, 1e-10).unwrap();
        assert!(spread > 0.1, "{spread}");
        assert!(path_independence_certificate(&lag("x"), &unit_ends(), 1, 1e-10).is_err());
    }
}
