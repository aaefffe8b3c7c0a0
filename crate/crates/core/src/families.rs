//! Constructors for the standard and non-standard Lagrangian families and
//! their null Lagrangians.
//!
//! Every null Lagrangian is produced as the total time derivative of its
//! gauge function, so each returned `(L, Φ)` pair satisfies `L = dΦ/dt`
//! exactly. The constant standard family uses one coefficient set
//! `{c1, c2, c3, c4}` for both members of the pair:
//!
//! ```text
//! Φ = ½ c1 x² + c2 x t + c3 x + c4 t
//! L = c1 xdot x + c2 (xdot t + x) + c3 xdot + c4
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{partial_derivative, simplify, Expr, Var, VarSet};
use crate::variational::{gauge_derivative, FamilyTag, GaugeSpec, LagrangianSpec};

fn time_only(name: &str, e: Expr) -> Result<Expr> {
    if !e.free_vars().is_subset(VarSet::TIME) {
        return Err(Error::VariableOutOfScope { expr: format!("{name} = {e}"), allowed: "t" });
    }
    Ok(simplify(&e))
}

fn dt(e: &Expr) -> Expr {
    partial_derivative(e, Var::T)
}

/// Coefficients `f1..f4(t)` of the general standard null family.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub f1: Expr,
    pub f2: Expr,
    pub f3: Expr,
    pub f4: Expr,
}

impl CoefficientSet {
    pub fn new(f1: Expr, f2: Expr, f3: Expr, f4: Expr) -> Result<Self> {
        Ok(CoefficientSet {
            f1: time_only("f1", f1)?,
            f2: time_only("f2", f2)?,
            f3: time_only("f3", f3)?,
            f4: time_only("f4", f4)?,
        })
    }

    pub fn constants(c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        CoefficientSet { f1: Expr::Const(c1), f2: Expr::Const(c2), f3: Expr::Const(c3), f4: Expr::Const(c4) }
    }

    pub fn zero() -> Self {
        Self::constants(0.0, 0.0, 0.0, 0.0)
    }
}

/// Coefficients `h1(t)`, `h2(t)` and the constant `a4` of the general
/// non-standard null family.
#[derive(Debug, Clone, PartialEq)]
pub struct NsCoefficients {
    pub h1: Expr,
    pub h2: Expr,
    pub a4: f64,
}

impl NsCoefficients {
    pub fn new(h1: Expr, h2: Expr, a4: f64) -> Result<Self> {
        let h2 = time_only("h2", h2)?;
        if h2.is_zero() {
            return Err(Error::InvalidParameter("h2 must not vanish identically".into()));
        }
        Ok(NsCoefficients { h1: time_only("h1", h1)?, h2, a4 })
    }
}

/// `alpha(t)` and `beta(t)` of the standard Lagrangian.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardParams {
    pub alpha: Expr,
    pub beta: Expr,
}

impl StandardParams {
    pub fn new(alpha: Expr, beta: Expr) -> Result<Self> {
        Ok(StandardParams { alpha: time_only("alpha", alpha)?, beta: time_only("beta", beta)? })
    }
}

/// Non-fatal findings reported by constructors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyWarning {
    /// The denominator `g1 xdot + g2 x + g3` depends on neither `x` nor
    /// `xdot`; the Lagrangian is a function of `t` alone and trivially null.
    DegenerateDenominator,
}

impl fmt::Display for FamilyWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyWarning::DegenerateDenominator => {
                f.write_str("denominator is independent of x and xdot; the Lagrangian is trivially null")
            }
        }
    }
}

/// `½ (alpha xdot² - beta x²)`.
pub fn standard_lagrangian(p: &StandardParams) -> LagrangianSpec {
    let x = Expr::x();
    let v = Expr::xdot();
    let body = 0.5 * (p.alpha.clone() * v.powi(2) - p.beta.clone() * x.powi(2));
    LagrangianSpec::new(simplify(&body), FamilyTag::Standard).expect("t, x, xdot only")
}

fn null_pair(gauge: Expr, family: FamilyTag) -> (LagrangianSpec, GaugeSpec) {
    let g = GaugeSpec::new(simplify(&gauge)).expect("gauge bodies are built from t and x");
    let l = gauge_derivative(&g).with_family(family);
    (l, g)
}

/// `Φ = ½ c1 x² + c2 x t + c3 x + c4 t` and its derivative.
pub fn standard_null_const(c1: f64, c2: f64, c3: f64, c4: f64) -> (LagrangianSpec, GaugeSpec) {
    standard_null_general(&CoefficientSet::constants(c1, c2, c3, c4))
}

/// `Φ = ½ f1 x² + f2 x t + f3 x + f4 t` and `L = dΦ/dt`.
pub fn standard_null_general(c: &CoefficientSet) -> (LagrangianSpec, GaugeSpec) {
    let (x, t) = (Expr::x(), Expr::t());
    let gauge = 0.5 * c.f1.clone() * x.clone().powi(2)
        + c.f2.clone() * x.clone() * t.clone()
        + c.f3.clone() * x
        + c.f4.clone() * t;
    null_pair(gauge, FamilyTag::StandardNull)
}

/// The test Lagrangian `f1 xdot x + f2 (xdot t + x) + f3 xdot + f4` and the
/// closed form of its EL residual, `f1' x + f2' t + f3'`.
pub fn standard_test_residual(c: &CoefficientSet) -> (LagrangianSpec, Expr) {
    let (x, t, v) = (Expr::x(), Expr::t(), Expr::xdot());
    let body = c.f1.clone() * v.clone() * x.clone()
        + c.f2.clone() * (v.clone() * t.clone() + x.clone())
        + c.f3.clone() * v
        + c.f4.clone();
    let residual = dt(&c.f1) * x + dt(&c.f2) * t + dt(&c.f3);
    let l = LagrangianSpec::new(simplify(&body), FamilyTag::Custom).expect("t, x, xdot only");
    (l, simplify(&residual))
}

/// `1 / (g1 xdot + g2 x + g3)`, with a warning when the denominator does
/// not involve `x` or `xdot`.
pub fn nonstandard_lagrangian(g1: &Expr, g2: &Expr, g3: &Expr) -> Result<(LagrangianSpec, Option<FamilyWarning>)> {
    let g1 = time_only("g1", g1.clone())?;
    let g2 = time_only("g2", g2.clone())?;
    let g3 = time_only("g3", g3.clone())?;
    let warning = (g1.is_zero() && g2.is_zero()).then_some(FamilyWarning::DegenerateDenominator);
    let body = 1.0 / (g1 * Expr::xdot() + g2 * Expr::x() + g3);
    Ok((LagrangianSpec::new(simplify(&body), FamilyTag::Nonstandard)?, warning))
}

/// The test Lagrangian `a1 xdot / (a2 x + a3 t + a4)` and its residual
/// `-a1 a3 / (a2 x + a3 t + a4)²`.
pub fn nonstandard_test_residual(a1: f64, a2: f64, a3: f64, a4: f64) -> Result<(LagrangianSpec, Expr)> {
    if a1 == 0.0 {
        return Err(Error::InvalidParameter("a1 must be nonzero".into()));
    }
    if a2 == 0.0 {
        return Err(Error::InvalidParameter("a2 must be nonzero".into()));
    }
    let denom = a2 * Expr::x() + a3 * Expr::t() + a4;
    let body = a1 * Expr::xdot() / denom.clone();
    let residual = -(a1 * a3) / denom.powi(2);
    Ok((LagrangianSpec::new(simplify(&body), FamilyTag::Custom)?, simplify(&residual)))
}

/// `Φ = (a1/a2) ln|a2 x + a4|`, whose derivative is `a1 xdot / (a2 x + a4)`.
pub fn nonstandard_null_const(a1: f64, a2: f64, a4: f64) -> Result<(LagrangianSpec, GaugeSpec)> {
    if a2 == 0.0 {
        return Err(Error::InvalidParameter("a2 must be nonzero".into()));
    }
    let gauge = (a1 / a2) * (a2 * Expr::x() + a4).abs().ln();
    Ok(null_pair(gauge, FamilyTag::NonstandardNull))
}

/// `Φ = (h1/h2) ln|h2 x + a4|` and `L = dΦ/dt`.
pub fn nonstandard_null_general(c: &NsCoefficients) -> (LagrangianSpec, GaugeSpec) {
    let gauge = c.h1.clone() / c.h2.clone() * (c.h2.clone() * Expr::x() + c.a4).ln();
    null_pair(gauge, FamilyTag::NonstandardNull)
}

/// `Φ = (b1/b2) ln|b2 t + b3|`, `L = b1 / (b2 t + b3)`.
pub fn time_only_null(b1: f64, b2: f64, b3: f64) -> Result<(LagrangianSpec, GaugeSpec)> {
    if b2 == 0.0 {
        return Err(Error::InvalidParameter("b2 must be nonzero".into()));
    }
    let gauge = (b1 / b2) * (b2 * Expr::t() + b3).abs().ln();
    Ok(null_pair(gauge, FamilyTag::StandardNull))
}

/// Family names understood by the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Standard,
    StandardNullConst,
    StandardNullGeneral,
    StandardTest,
    Nonstandard,
    NonstandardTest,
    NonstandardNullGeneral,
    TimeOnlyNull,
}

impl FamilyName {
    pub const ALL: [FamilyName; 8] = [
        FamilyName::Standard,
        FamilyName::StandardNullConst,
        FamilyName::StandardNullGeneral,
        FamilyName::StandardTest,
        FamilyName::Nonstandard,
        FamilyName::NonstandardTest,
        FamilyName::NonstandardNullGeneral,
        FamilyName::TimeOnlyNull,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyName::Standard => "standard",
            FamilyName::StandardNullConst => "standard-null-const",
            FamilyName::StandardNullGeneral => "standard-null-general",
            FamilyName::StandardTest => "standard-test",
            FamilyName::Nonstandard => "nonstandard",
            FamilyName::NonstandardTest => "nonstandard-test",
            FamilyName::NonstandardNullGeneral => "nonstandard-null-general",
            FamilyName::TimeOnlyNull => "time-only-null",
        }
    }
}

impl FromStr for FamilyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyName::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family `{s}`")))
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
