//! Endpoint evaluation of gauge functions and the exactness gate.
//!
//! A gauge function is exact on `[t_o, t_e]` when it vanishes at both
//! `(t_o, x_o)` and `(t_e, x_e)`; its null Lagrangian then leaves the action
//! unchanged.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{simplify, EvalError, EvalPoint, Expr};
use crate::families::{CoefficientSet, NsCoefficients};
use crate::variational::GaugeSpec;

pub const DEFAULT_EXACT_TOL: f64 = 1e-9;

/// Times and positions at the two ends of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndConditions {
    pub t_o: f64,
    pub t_e: f64,
    pub x_o: f64,
    pub x_e: f64,
}

impl EndConditions {
    pub fn new(t_o: f64, t_e: f64, x_o: f64, x_e: f64) -> Result<Self> {
        if ![t_o, t_e, x_o, x_e].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("end conditions must be finite".into()));
        }
        if t_o >= t_e {
            return Err(Error::InvalidParameter(format!("t_o = {t_o} must precede t_e = {t_e}")));
        }
        Ok(EndConditions { t_o, t_e, x_o, x_e })
    }

    /// `[(t_o, x_o), (t_e, x_e)]`.
    pub fn points(&self) -> [(f64, f64); 2] {
        [(self.t_o, self.x_o), (self.t_e, self.x_e)]
    }
}

impl Default for EndConditions {
    /// `x(0) = 1`, `x(1) = 2`.
    fn default() -> Self {
        EndConditions { t_o: 0.0, t_e: 1.0, x_o: 1.0, x_e: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub phi_start: f64,
    pub phi_end: f64,
    pub delta_phi: f64,
    pub is_exact: bool,
    pub tolerance: f64,
}

fn endpoint_values(g: &GaugeSpec, ends: &EndConditions) -> Result<(f64, f64)> {
    Ok((g.eval(ends.t_o, ends.x_o)?, g.eval(ends.t_e, ends.x_e)?))
}

/// `Φ(t_e, x_e) - Φ(t_o, x_o)`.
pub fn gauge_delta(g: &GaugeSpec, ends: &EndConditions) -> Result<f64> {
    let (start, end) = endpoint_values(g, ends)?;
    Ok(end - start)
}

/// Exact iff `|Φ|` is within `tol` at both ends.
pub fn is_exact(g: &GaugeSpec, ends: &EndConditions, tol: f64) -> Result<ExactnessReport> {
    let (phi_start, phi_end) = endpoint_values(g, ends)?;
    Ok(ExactnessReport {
        phi_start,
        phi_end,
        delta_phi: phi_end - phi_start,
        is_exact: phi_start.abs().max(phi_end.abs()) <= tol,
        tolerance: tol,
    })
}

fn at(e: &Expr, t: f64) -> Result<f64> {
    Ok(e.eval(&EvalPoint::at_time(t))?)
}

/// `½ f1 x² + f2 x t + f3 x + f4 t` at the final and initial ends.
pub fn standard_endpoint_residuals(c: &CoefficientSet, ends: &EndConditions) -> Result<(f64, f64)> {
    let residual = |t: f64, x: f64| -> Result<f64> {
        Ok(0.5 * at(&c.f1, t)? * x * x + at(&c.f2, t)? * x * t + at(&c.f3, t)? * x + at(&c.f4, t)? * t)
    };
    Ok((residual(ends.t_e, ends.x_e)?, residual(ends.t_o, ends.x_o)?))
}

/// `(h1/h2) ln(h2 x + a4)` at the final and initial ends.
pub fn nonstandard_endpoint_residuals(c: &NsCoefficients, ends: &EndConditions) -> Result<(f64, f64)> {
    let value = |t: f64, x: f64| -> Result<f64> {
        let h1 = at(&c.h1, t)?;
        let h2 = at(&c.h2, t)?;
        let arg = h2 * x + c.a4;
        if arg.abs() < f64::MIN_POSITIVE {
            return Err(EvalError::LogOfZero { expr: c.h2.clone() * Expr::x() + c.a4 }.into());
        }
        if h1 == 0.0 {
            return Ok(0.0);
        }
        Ok(h1 / h2 * arg.ln())
    };
    Ok((value(ends.t_e, ends.x_e)?, value(ends.t_o, ends.x_o)?))
}

/// Straight line through `(t0, v0)` and `(t1, v1)`.
fn linear_through(t0: f64, v0: f64, t1: f64, v1: f64) -> Expr {
    let slope = (v1 - v0) / (t1 - t0);
    simplify(&(v0 + slope * (Expr::t() - t0)))
}

/// Replaces `f3` and `f4` by the linear interpolants of
/// `f3 = -f1 x / 2` and `f4 = -f2 x` taken at both ends, which makes the
/// gauge vanish at both ends.
pub fn endpoint_closure(c: &CoefficientSet, ends: &EndConditions) -> Result<CoefficientSet> {
    let (to, te, xo, xe) = (ends.t_o, ends.t_e, ends.x_o, ends.x_e);
    let f3 = linear_through(to, -0.5 * at(&c.f1, to)? * xo, te, -0.5 * at(&c.f1, te)? * xe);
    let f4 = linear_through(to, -at(&c.f2, to)? * xo, te, -at(&c.f2, te)? * xe);
    Ok(CoefficientSet { f1: c.f1.clone(), f2: c.f2.clone(), f3, f4 })
}
