//! The action functional `A[x] = ∫ L dt` and the gauge-shift identity
//! `A[L + dΦ/dt] = A[L] + Φ(t_e, x_e) - Φ(t_o, x_o)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactness::{gauge_delta, EndConditions};
use crate::expr::{simplify, EvalError, EvalPoint, Expr, Trajectory};
use crate::quad::{adaptive_simpson, gauss_legendre_adaptive, DEFAULT_PANELS};
use crate::variational::{GaugeSpec, LagrangianSpec};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
/// How far a trajectory may miss the prescribed end positions.
pub const ENDPOINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadMethod {
    #[default]
    GaussLegendre,
    Simpson,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub method: QuadMethod,
    pub tol: f64,
    pub initial_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { method: QuadMethod::GaussLegendre, tol: DEFAULT_QUAD_TOL, initial_panels: DEFAULT_PANELS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionResult {
    pub value: f64,
    pub panels: usize,
    pub estimated_error: f64,
}

/// The three integrals and the gauge shift entering the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeShift {
    pub action_with_null: f64,
    pub action_base: f64,
    pub delta_phi: f64,
    /// `|A[L + L_null] - A[L] - ΔΦ|`.
    pub discrepancy: f64,
}

impl GaugeShift {
    /// The check passes when the discrepancy is within ten quadrature
    /// tolerances.
    pub fn passes(&self, quad_tol: f64) -> bool {
        self.discrepancy <= 10.0 * quad_tol
    }
}

fn check_endpoints(path: &Trajectory, ends: &EndConditions) -> Result<()> {
    for (t, expected) in [(ends.t_o, ends.x_o), (ends.t_e, ends.x_e)] {
        let actual = path.x().eval(&EvalPoint::at_time(t))?;
        if (actual - expected).abs() > ENDPOINT_TOL {
            return Err(Error::EndpointMismatch { t, expected, actual });
        }
    }
    Ok(())
}

const SCAN_INTERVALS: usize = 1024;

/// Denominators, logarithm arguments and bases of negative powers in `e`.
fn singular_parts(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    e.visit(&mut |node| {
        let part = match node {
            Expr::Div(_, b) => b,
            Expr::Ln(a) => a,
            Expr::Pow(b, r) if *r < 0.into() => b,
            _ => return,
        };
        // |u| vanishes exactly where u does, and u changes sign there
        let part = match &**part {
            Expr::Abs(inner) => inner,
            other => other,
        };
        if !out.contains(part) {
            out.push(part.clone());
        }
    });
    out
}

/// Looks for a zero of any singular part of `body` along `path` by scanning
/// a uniform grid for sign changes and bisecting. Quadrature nodes can step
/// over an isolated pole, so this runs before integration.
fn scan_for_singularity(body: &Expr, path: &Trajectory, a: f64, b: f64) -> Result<()> {
    let parts = singular_parts(body);
    if parts.is_empty() {
        return Ok(());
    }
    let eval = |part: &Expr, t: f64| -> Result<f64> {
        let p = path.point(t).map_err(|e| match e {
            Error::Eval(source) => Error::SingularityOnPath { t, source },
            other => other,
        })?;
        let v = part.eval(&p).map_err(|source| Error::SingularityOnPath { t, source })?;
        if v == 0.0 {
            return Err(Error::SingularityOnPath { t, source: EvalError::DivisionByZero { expr: part.clone() } });
        }
        Ok(v)
    };
    let h = (b - a) / SCAN_INTERVALS as f64;
    for part in &parts {
        let mut prev_t = a;
        let mut prev = eval(part, a)?;
        for k in 1..=SCAN_INTERVALS {
            let t = if k == SCAN_INTERVALS { b } else { a + k as f64 * h };
            let v = eval(part, t)?;
            if v.signum() != prev.signum() {
                let (mut lo, mut hi, mut f_lo) = (prev_t, t, prev);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let fm = eval(part, mid)?;
                    if fm.signum() == f_lo.signum() {
                        lo = mid;
                        f_lo = fm;
                    } else {
                        hi = mid;
                    }
                }
                let t = 0.5 * (lo + hi);
                return Err(Error::SingularityOnPath { t, source: EvalError::DivisionByZero { expr: part.clone() } });
            }
            prev_t = t;
            prev = v;
        }
    }
    Ok(())
}

/// `∫_{t_o}^{t_e} L(t, x(t), xdot(t)) dt` along `path`.
pub fn action_integral(
    l: &LagrangianSpec,
    path: &Trajectory,
    ends: &EndConditions,
    opts: &QuadOptions,
) -> Result<ActionResult> {
    check_endpoints(path, ends)?;
    scan_for_singularity(l.body(), path, ends.t_o, ends.t_e)?;
    let integrand = |t: f64| -> Result<f64> {
        let p = path.point(t).map_err(|e| match e {
            Error::Eval(source) => Error::SingularityOnPath { t, source },
            other => other,
        })?;
        l.body().eval(&p).map_err(|source| Error::SingularityOnPath { t, source })
    };
    let q = match opts.method {
        QuadMethod::GaussLegendre => {
            gauss_legendre_adaptive(ends.t_o, ends.t_e, opts.tol, opts.initial_panels, integrand)?
        }
        QuadMethod::Simpson => adaptive_simpson(ends.t_o, ends.t_e, opts.tol, integrand)?,
    };
    Ok(ActionResult { value: q.value, panels: q.panels, estimated_error: q.estimated_error })
}

/// Compares `A[L + L_null] - A[L]` with the gauge endpoint difference.
pub fn gauge_shift_check(
    l: &LagrangianSpec,
    l_null: &LagrangianSpec,
    g: &GaugeSpec,
    path: &Trajectory,
    ends: &EndConditions,
    opts: &QuadOptions,
) -> Result<GaugeShift> {
    let with_null = action_integral(&l.plus(l_null), path, ends, opts)?.value;
    let base = action_integral(l, path, ends, opts)?.value;
    let delta_phi = gauge_delta(g, ends)?;
    Ok(GaugeShift {
        action_with_null: with_null,
        action_base: base,
        delta_phi,
        discrepancy: (with_null - base - delta_phi).abs(),
    })
}

/// The straight line between the endpoints followed by `n - 1` sine
/// perturbations `eps * sin(k π (t - t_o) / (t_e - t_o))`, all sharing the
/// same endpoints. Wave numbers cycle through 3, 2, 1 and amplitudes step
/// down from 0.2 to 0.05.
pub fn trajectory_corpus(ends: &EndConditions, n: usize) -> Vec<Trajectory> {
    let span = ends.t_e - ends.t_o;
    let phase = (Expr::t() - ends.t_o) / span;
    let straight = ends.x_o + (ends.x_e - ends.x_o) * phase.clone();
    let perturbed = n.saturating_sub(1);
    let mut out = Vec::with_capacity(n);
    if n > 0 {
        out.push(Trajectory::new(simplify(&straight)).expect("time-only path"));
    }
    for j in 0..perturbed {
        let k = 3 - (j % 3) as i32;
        let eps = if perturbed > 1 { 0.2 - 0.15 * j as f64 / (perturbed - 1) as f64 } else { 0.2 };
        let bump = eps * (k as f64 * PI * phase.clone()).sin();
        out.push(Trajectory::new(simplify(&(straight.clone() + bump))).expect("time-only path"));
    }
    out
}
