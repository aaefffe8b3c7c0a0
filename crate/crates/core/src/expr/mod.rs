//! Expression trees over the jet variables `t`, `x`, `xdot` and `xddot`.
//!
//! Every Lagrangian, gauge function and coefficient function in the crate is
//! an [`Expr`]. Trees are immutable values; the helpers in this module build,
//! inspect and evaluate them, while parsing, printing, differentiation and
//! simplification live in the submodules.

mod diff;
mod parse;
mod print;
mod simplify;
mod trajectory;

use std::cmp::Ordering;
use std::fmt;
use std::ops;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use diff::{partial_derivative, total_time_derivative, OrderOverflow};
pub use parse::{parse_expr, ParseError};
pub use simplify::simplify;
pub use trajectory::Trajectory;

/// Rational exponent of a [`Expr::Pow`] node.
pub type Exponent = Rational64;

/// One of the four independent jet coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    T,
    X,
    Xdot,
    Xddot,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::T, Var::X, Var::Xdot, Var::Xddot];

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X => "x",
            Var::Xdot => "xdot",
            Var::Xddot => "xddot",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == name)
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A subset of [`Var`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct VarSet(u8);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);
    /// `{t}`: coefficient functions and trajectories.
    pub const TIME: VarSet = VarSet(0b0001);
    /// `{t, x}`: gauge functions.
    pub const GAUGE: VarSet = VarSet(0b0011);
    /// `{t, x, xdot}`: first-order Lagrangians.
    pub const LAGRANGIAN: VarSet = VarSet(0b0111);
    pub const ALL: VarSet = VarSet(0b1111);

    pub fn of(vars: &[Var]) -> VarSet {
        VarSet(vars.iter().fold(0, |acc, v| acc | v.bit()))
    }

    pub fn contains(self, v: Var) -> bool {
        self.0 & v.bit() != 0
    }

    pub fn insert(&mut self, v: Var) {
        self.0 |= v.bit();
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Var> {
        Var::ALL.into_iter().filter(move |v| self.contains(*v))
    }
}

/// Immutable expression tree.
///
/// `Ln` is the logarithm of the absolute value of its argument, so
/// `Ln(a)` and `Ln(Abs(a))` evaluate identically.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
    Neg(Box<Expr>),
    Ln(Box<Expr>),
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Abs(Box<Expr>),
}

/// A point of the jet space at which expressions are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalPoint {
    pub t: f64,
    pub x: f64,
    pub xdot: f64,
    pub xddot: f64,
}

impl EvalPoint {
    pub fn new(t: f64, x: f64, xdot: f64, xddot: f64) -> Self {
        EvalPoint { t, x, xdot, xddot }
    }

    /// A point carrying only the time coordinate.
    pub fn at_time(t: f64) -> Self {
        EvalPoint { t, ..Default::default() }
    }

    pub fn get(&self, v: Var) -> f64 {
        match v {
            Var::T => self.t,
            Var::X => self.x,
            Var::Xdot => self.xdot,
            Var::Xddot => self.xddot,
        }
    }

    pub fn with(mut self, v: Var, value: f64) -> Self {
        match v {
            Var::T => self.t = value,
            Var::X => self.x = value,
            Var::Xdot => self.xdot = value,
            Var::Xddot => self.xddot = value,
        }
        self
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.xdot.is_finite() && self.xddot.is_finite()
    }
}

/// Evaluation failure; each variant carries the offending sub-expression.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero in `{expr}`")]
    DivisionByZero { expr: Expr },
    #[error("logarithm of zero in `{expr}`")]
    LogOfZero { expr: Expr },
    #[error("non-finite value from `{expr}`")]
    NonFinite { expr: Expr },
}

impl EvalError {
    pub fn expr(&self) -> &Expr {
        match self {
            EvalError::DivisionByZero { expr } | EvalError::LogOfZero { expr } | EvalError::NonFinite { expr } => expr,
        }
    }
}

/// Smallest denominator magnitude accepted by plain [`Expr::eval`].
pub const MACHINE_TINY: f64 = f64::MIN_POSITIVE;

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn t() -> Expr {
        Expr::Var(Var::T)
    }

    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    pub fn xdot() -> Expr {
        Expr::Var(Var::Xdot)
    }

    pub fn xddot() -> Expr {
        Expr::Var(Var::Xddot)
    }

    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn one() -> Expr {
        Expr::Const(1.0)
    }

    pub fn powi(self, n: i64) -> Expr {
        Expr::Pow(Box::new(self), Exponent::from_integer(n))
    }

    pub fn pow(self, r: Exponent) -> Expr {
        Expr::Pow(Box::new(self), r)
    }

    pub fn ln(self) -> Expr {
        Expr::Ln(Box::new(self))
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    pub fn sin(self) -> Expr {
        Expr::Sin(Box::new(self))
    }

    pub fn cos(self) -> Expr {
        Expr::Cos(Box::new(self))
    }

    pub fn abs(self) -> Expr {
        Expr::Abs(Box::new(self))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    /// Variables occurring anywhere in the tree.
    pub fn free_vars(&self) -> VarSet {
        let mut set = VarSet::EMPTY;
        self.visit(&mut |e| {
            if let Expr::Var(v) = e {
                set.insert(*v);
            }
        });
        set
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.free_vars().contains(v)
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Const(_) | Expr::Var(_) => {}
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Expr::Pow(a, _)
            | Expr::Neg(a)
            | Expr::Ln(a)
            | Expr::Exp(a)
            | Expr::Sin(a)
            | Expr::Cos(a)
            | Expr::Abs(a) => a.visit(f),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Replaces every occurrence of `v` by `with`.
    pub fn substitute(&self, v: Var, with: &Expr) -> Expr {
        self.map_leaves(&|e| match e {
            Expr::Var(w) if *w == v => Some(with.clone()),
            _ => None,
        })
    }

    fn map_leaves(&self, f: &impl Fn(&Expr) -> Option<Expr>) -> Expr {
        if let Some(r) = f(self) {
            return r;
        }
        let bx = |e: &Expr| Box::new(e.map_leaves(f));
        match self {
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Add(a, b) => Expr::Add(bx(a), bx(b)),
            Expr::Sub(a, b) => Expr::Sub(bx(a), bx(b)),
            Expr::Mul(a, b) => Expr::Mul(bx(a), bx(b)),
            Expr::Div(a, b) => Expr::Div(bx(a), bx(b)),
            Expr::Pow(a, r) => Expr::Pow(bx(a), *r),
            Expr::Neg(a) => Expr::Neg(bx(a)),
            Expr::Ln(a) => Expr::Ln(bx(a)),
            Expr::Exp(a) => Expr::Exp(bx(a)),
            Expr::Sin(a) => Expr::Sin(bx(a)),
            Expr::Cos(a) => Expr::Cos(bx(a)),
            Expr::Abs(a) => Expr::Abs(bx(a)),
        }
    }

    /// IEEE double evaluation. `Ln(a)` evaluates as `ln|a|`.
    pub fn eval(&self, p: &EvalPoint) -> Result<f64, EvalError> {
        self.eval_guarded(p, MACHINE_TINY)
    }

    /// Like [`Expr::eval`], but any denominator, logarithm argument or base of
    /// a negative power with magnitude below `guard` is reported as an error.
    pub fn eval_guarded(&self, p: &EvalPoint, guard: f64) -> Result<f64, EvalError> {
        self.eval_scaled(p, guard).map(|(v, _)| v)
    }

    /// Evaluates the expression together with a roundoff scale: the value the
    /// expression would take if every sum were replaced by the sum of absolute
    /// values. Cancellation error of the computed value is of order
    /// `f64::EPSILON * scale`, and `scale >= |value|`.
    pub fn eval_scaled(&self, p: &EvalPoint, guard: f64) -> Result<(f64, f64), EvalError> {
        let non_finite = || EvalError::NonFinite { expr: self.clone() };
        let (v, s) = match self {
            Expr::Const(c) => (*c, c.abs()),
            Expr::Var(var) => {
                let v = p.get(*var);
                (v, v.abs())
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let (va, sa) = a.eval_scaled(p, guard)?;
                let (vb, sb) = b.eval_scaled(p, guard)?;
                let v = if matches!(self, Expr::Add(..)) { va + vb } else { va - vb };
                (v, sa + sb)
            }
            Expr::Mul(a, b) => {
                let (va, sa) = a.eval_scaled(p, guard)?;
                let (vb, sb) = b.eval_scaled(p, guard)?;
                (va * vb, sa * sb)
            }
            Expr::Div(a, b) => {
                let (va, sa) = a.eval_scaled(p, guard)?;
                let (vb, sb) = b.eval_scaled(p, guard)?;
                if vb.abs() < guard {
                    return Err(EvalError::DivisionByZero { expr: (**b).clone() });
                }
                let q = va / vb;
                (q, (sa + q.abs() * sb) / vb.abs())
            }
            Expr::Pow(b, r) => {
                let (vb, sb) = b.eval_scaled(p, guard)?;
                if r.is_negative() && vb.abs() < guard {
                    return Err(EvalError::DivisionByZero { expr: (**b).clone() });
                }
                let v = rational_pow(vb, *r).ok_or_else(non_finite)?;
                let rel = if vb == 0.0 { 0.0 } else { sb / vb.abs() };
                let rf = r.to_f64().unwrap_or(f64::NAN).abs();
                (v, v.abs() * (1.0 + rf * rel))
            }
            Expr::Neg(a) => {
                let (va, sa) = a.eval_scaled(p, guard)?;
                (-va, sa)
            }
            Expr::Ln(a) => {
                let (va, sa) = a.eval_scaled(p, guard)?;
                if va.abs() < guard {
                    return Err(EvalError::LogOfZero { expr: (**a).clone() });
                }
                let v = va.abs().ln();
                (v, v.abs() + sa / va.abs())
            }
            Expr::Exp(a) => {
                let (va, sa) = a.eval_scaled(p, guard)?;
                let v = va.exp();
                (v, v * (1.0 + sa))
            }
            Expr::Sin(a) => {
                let (va, sa) = a.eval_scaled(p, guard)?;
                let v = va.sin();
                (v, v.abs() + sa)
            }
            Expr::Cos(a) => {
                let (va, sa) = a.eval_scaled(p, guard)?;
                let v = va.cos();
                (v, v.abs() + sa)
            }
            Expr::Abs(a) => {
                let (va, sa) = a.eval_scaled(p, guard)?;
                (va.abs(), sa)
            }
        };
        if !v.is_finite() || !s.is_finite() {
            return Err(non_finite());
        }
        Ok((v, s.max(v.abs())))
    }
}

/// Real power with a rational exponent. Negative bases are accepted for odd
/// denominators (real odd roots); `None` when the result is not real.
pub(crate) fn rational_pow(base: f64, r: Exponent) -> Option<f64> {
    let num = *r.numer();
    let den = *r.denom();
    if r.is_zero() {
        return Some(1.0);
    }
    if den == 1 {
        return Some(match i32::try_from(num) {
            Ok(n) => base.powi(n),
            Err(_) => base.powf(num as f64),
        });
    }
    let rf = num as f64 / den as f64;
    if base >= 0.0 {
        return Some(base.powf(rf));
    }
    if den % 2 == 0 {
        return None;
    }
    let magnitude = (-base).powf(rf);
    Some(if num % 2 == 0 { magnitude } else { -magnitude })
}

/// Kind rank used by [`canonical_cmp`].
fn rank(e: &Expr) -> u8 {
    match e {
        Expr::Var(_) => 0,
        Expr::Const(_) => 1,
        Expr::Pow(..) => 2,
        Expr::Ln(_) => 3,
        Expr::Exp(_) => 4,
        Expr::Sin(_) => 5,
        Expr::Cos(_) => 6,
        Expr::Abs(_) => 7,
        Expr::Neg(_) => 8,
        Expr::Mul(..) => 9,
        Expr::Div(..) => 10,
        Expr::Add(..) => 11,
        Expr::Sub(..) => 12,
    }
}

/// A total order on expression trees, used to sort factors and terms.
pub(crate) fn canonical_cmp(a: &Expr, b: &Expr) -> Ordering {
    let by_rank = rank(a).cmp(&rank(b));
    if by_rank != Ordering::Equal {
        return by_rank;
    }
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => x.total_cmp(y),
        (Expr::Var(x), Expr::Var(y)) => x.cmp(y),
        (Expr::Pow(x, r), Expr::Pow(y, s)) => canonical_cmp(x, y).then_with(|| r.cmp(s)),
        (Expr::Add(a1, a2), Expr::Add(b1, b2))
        | (Expr::Sub(a1, a2), Expr::Sub(b1, b2))
        | (Expr::Mul(a1, a2), Expr::Mul(b1, b2))
        | (Expr::Div(a1, a2), Expr::Div(b1, b2)) => canonical_cmp(a1, b1).then_with(|| canonical_cmp(a2, b2)),
        (Expr::Neg(x), Expr::Neg(y))
        | (Expr::Ln(x), Expr::Ln(y))
        | (Expr::Exp(x), Expr::Exp(y))
        | (Expr::Sin(x), Expr::Sin(y))
        | (Expr::Cos(x), Expr::Cos(y))
        | (Expr::Abs(x), Expr::Abs(y)) => canonical_cmp(x, y),
        _ => unreachable!("equal rank implies equal kind"),
    }
}

macro_rules! binary_op {
    ($tr:ident, $method:ident, $variant:ident) => {
        impl ops::$tr for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(self), Box::new(rhs))
            }
        }
        impl ops::$tr<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$variant(Box::new(self), Box::new(Expr::Const(rhs)))
            }
        }
        impl ops::$tr<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(Expr::Const(self)), Box::new(rhs))
            }
        }
    };
}

binary_op!(Add, add, Add);
binary_op!(Sub, sub, Sub);
binary_op!(Mul, mul, Mul);
binary_op!(Div, div, Div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Expr {
        Expr::Const(c)
    }
}

impl From<Var> for Expr {
    fn from(v: Var) -> Expr {
        Expr::Var(v)
    }
}
