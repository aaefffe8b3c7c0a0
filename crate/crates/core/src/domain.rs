//! Sampling boxes and the deterministic point sampler used by every
//! numerical identity check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{EvalPoint, Var};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_GUARD: f64 = 1e-6;
/// Rejection attempts per sample before giving up.
pub const MAX_ATTEMPTS: usize = 1000;

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Interval> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidParameter(format!("empty or unbounded interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo..=self.hi)
        }
    }
}

/// Per-variable ranges plus the sampler seed and singularity guard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub t: Interval,
    pub x: Interval,
    pub xdot: Interval,
    pub xddot: Interval,
    pub seed: u64,
    /// Points where any denominator is smaller than this in magnitude are
    /// rejected and resampled.
    pub guard: f64,
}

impl Default for DomainBox {
    fn default() -> Self {
        DomainBox {
            t: Interval { lo: 0.0, hi: 1.0 },
            x: Interval { lo: -2.0, hi: 2.0 },
            xdot: Interval { lo: -2.0, hi: 2.0 },
            xddot: Interval { lo: -2.0, hi: 2.0 },
            seed: DEFAULT_SEED,
            guard: DEFAULT_GUARD,
        }
    }
}

impl DomainBox {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_guard(mut self, guard: f64) -> Result<Self> {
        if !(guard > 0.0 && guard.is_finite()) {
            return Err(Error::InvalidParameter(format!("guard must be positive, got {guard}")));
        }
        self.guard = guard;
        Ok(self)
    }

    pub fn range(&self, v: Var) -> Interval {
        match v {
            Var::T => self.t,
            Var::X => self.x,
            Var::Xdot => self.xdot,
            Var::Xddot => self.xddot,
        }
    }

    pub fn set_range(&mut self, v: Var, r: Interval) {
        match v {
            Var::T => self.t = r,
            Var::X => self.x = r,
            Var::Xdot => self.xdot = r,
            Var::Xddot => self.xddot = r,
        }
    }

    /// Parses `t=0..1,x=-2..2,...`; unspecified variables keep their
    /// default range.
    pub fn parse_ranges(spec: &str) -> Result<DomainBox> {
        let mut b = DomainBox::default();
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let bad = || Error::InvalidParameter(format!("malformed domain entry `{part}`"));
            let (name, range) = part.split_once('=').ok_or_else(bad)?;
            let var = Var::from_name(name.trim()).ok_or_else(bad)?;
            let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
            let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
            b.set_range(var, Interval::new(lo, hi)?);
        }
        Ok(b)
    }

    /// Draws `n` points, rejecting those for which `admissible` fails.
    ///
    /// Sample `i` is drawn from its own ChaCha stream keyed by `(seed, i)`,
    /// so the result does not depend on evaluation order.
    pub fn sample<T>(
        &self,
        n: usize,
        mut admissible: impl FnMut(&EvalPoint) -> Option<T>,
    ) -> Result<Vec<(EvalPoint, T)>> {
        let mut out = Vec::with_capacity(n);
        for index in 0..n {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(index as u64);
            let found = (0..MAX_ATTEMPTS).find_map(|_| {
                let p = EvalPoint::new(
                    self.t.sample(&mut rng),
                    self.x.sample(&mut rng),
                    self.xdot.sample(&mut rng),
                    self.xddot.sample(&mut rng),
                );
                admissible(&p).map(|v| (p, v))
            });
            match found {
                Some(hit) => out.push(hit),
                None => return Err(Error::SamplingExhausted { index, attempts: MAX_ATTEMPTS }),
            }
        }
        Ok(out)
    }
}
