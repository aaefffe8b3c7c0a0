//! One-dimensional quadrature: composite 5-point Gauss–Legendre with a
//! Richardson error estimate, and adaptive Simpson as a cross-check.

use std::sync::OnceLock;

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Nodes and weights of the 5-point Gauss–Legendre rule on `[-1, 1]`.
fn gauss_legendre_5() -> &'static [(f64, f64); 5] {
    static RULE: OnceLock<[(f64, f64); 5]> = OnceLock::new();
    RULE.get_or_init(|| {
        let s = (10.0f64 / 7.0).sqrt();
        let inner = (5.0 - 2.0 * s).sqrt() / 3.0;
        let outer = (5.0 + 2.0 * s).sqrt() / 3.0;
        let r70 = 70.0f64.sqrt();
        let w_inner = (322.0 + 13.0 * r70) / 900.0;
        let w_outer = (322.0 - 13.0 * r70) / 900.0;
        [(-outer, w_outer), (-inner, w_inner), (0.0, 128.0 / 225.0), (inner, w_inner), (outer, w_outer)]
    })
}

/// Composite 5-point Gauss–Legendre over `panels` equal panels of `[a, b]`.
pub fn gauss_legendre<E>(a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> Result<f64, E>) -> Result<f64, E> {
    let h = (b - a) / panels as f64;
    let mut total = CompensatedSum::default();
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for &(node, weight) in gauss_legendre_5() {
            total.add(0.5 * h * weight * f(mid + 0.5 * h * node)?);
        }
    }
    Ok(total.value())
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub panels: usize,
    pub estimated_error: f64,
}

pub const DEFAULT_PANELS: usize = 64;
pub const MAX_PANELS: usize = 4096;

/// Doubles the Gauss–Legendre panel count, starting at `initial_panels`,
/// until the Richardson estimate `|I(2n) - I(n)| / (2^10 - 1)` is within
/// `tol` or the panel count reaches [`MAX_PANELS`].
pub fn gauss_legendre_adaptive<E>(
    a: f64,
    b: f64,
    tol: f64,
    initial_panels: usize,
    mut f: impl FnMut(f64) -> Result<f64, E>,
) -> Result<Quadrature, E> {
    let mut n = initial_panels.clamp(1, MAX_PANELS / 2);
    let mut coarse = gauss_legendre(a, b, n, &mut f)?;
    loop {
        let fine = gauss_legendre(a, b, 2 * n, &mut f)?;
        // the 5-point rule has order 10
        let err = (fine - coarse).abs() / 1023.0;
        if err <= tol || 2 * n >= MAX_PANELS {
            return Ok(Quadrature { value: fine, panels: 2 * n, estimated_error: err });
        }
        n *= 2;
        coarse = fine;
    }
}

const SIMPSON_MAX_DEPTH: u32 = 40;

/// Adaptive Simpson with the usual `|S2 - S1| <= 15 tol` acceptance and
/// Richardson correction.
pub fn adaptive_simpson<E>(
    a: f64,
    b: f64,
    tol: f64,
    mut f: impl FnMut(f64) -> Result<f64, E>,
) -> Result<Quadrature, E> {
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut state = SimpsonState { panels: 0, error: CompensatedSum::default() };
    let value = simpson_step(&mut f, [a, m, b], [fa, fm, fb], whole, tol, SIMPSON_MAX_DEPTH, &mut state)?;
    Ok(Quadrature { value, panels: state.panels, estimated_error: state.error.value() })
}

struct SimpsonState {
    panels: usize,
    error: CompensatedSum,
}

fn simpson_step<E>(
    f: &mut impl FnMut(f64) -> Result<f64, E>,
    [a, m, b]: [f64; 3],
    [fa, fm, fb]: [f64; 3],
    whole: f64,
    tol: f64,
    depth: u32,
    state: &mut SimpsonState,
) -> Result<f64, E> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        state.panels += 2;
        state.error.add(delta.abs() / 15.0);
        return Ok(left + right + delta / 15.0);
    }
    let l = simpson_step(f, [a, lm, m], [fa, flm, fm], left, 0.5 * tol, depth - 1, state)?;
    let r = simpson_step(f, [m, rm, b], [fm, frm, fb], right, 0.5 * tol, depth - 1, state)?;
    Ok(l + r)
}
