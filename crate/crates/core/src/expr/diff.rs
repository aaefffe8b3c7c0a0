use num_traits::{One, Zero};
use thiserror::Error;

use super::{simplify, Expr, Var};

/// `total_time_derivative` was handed an expression that already depends on
/// `xddot`; its derivative would need the third jet coordinate.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("order overflow: `{expr}` already depends on xddot")]
pub struct OrderOverflow {
    pub expr: Expr,
}

/// Exact symbolic partial derivative, simplified.
pub fn partial_derivative(e: &Expr, v: Var) -> Expr {
    simplify(&diff(e, v))
}

/// `d/dt = ∂/∂t + xdot ∂/∂x + xddot ∂/∂xdot` applied to `e`, simplified.
pub fn total_time_derivative(e: &Expr) -> Result<Expr, OrderOverflow> {
    if e.contains_var(Var::Xddot) {
        return Err(OrderOverflow { expr: e.clone() });
    }
    let raw = diff(e, Var::T) + Expr::xdot() * diff(e, Var::X) + Expr::xddot() * diff(e, Var::Xdot);
    Ok(simplify(&raw))
}

fn diff(e: &Expr, v: Var) -> Expr {
    if !e.contains_var(v) {
        return Expr::zero();
    }
    match e {
        Expr::Const(_) => Expr::zero(),
        Expr::Var(w) => Expr::Const(if *w == v { 1.0 } else { 0.0 }),
        Expr::Add(a, b) => diff(a, v) + diff(b, v),
        Expr::Sub(a, b) => diff(a, v) - diff(b, v),
        Expr::Mul(a, b) => diff(a, v) * (**b).clone() + (**a).clone() * diff(b, v),
        Expr::Div(a, b) => diff(a, v) / (**b).clone() - (**a).clone() * diff(b, v) / (**b).clone().powi(2),
        Expr::Pow(base, r) => {
            if r.is_zero() {
                return Expr::zero();
            }
            let lowered = (**base).clone().pow(r - super::Exponent::one());
            Expr::Const(*r.numer() as f64 / *r.denom() as f64) * lowered * diff(base, v)
        }
        Expr::Neg(a) => -diff(a, v),
        Expr::Ln(a) => match &**a {
            // ln|abs(u)| = ln|u|
            Expr::Abs(u) => diff(u, v) / (**u).clone(),
            _ => diff(a, v) / (**a).clone(),
        },
        Expr::Exp(a) => e.clone() * diff(a, v),
        Expr::Sin(a) => (**a).clone().cos() * diff(a, v),
        Expr::Cos(a) => -((**a).clone().sin()) * diff(a, v),
        Expr::Abs(a) => (**a).clone() / e.clone() * diff(a, v),
    }
}
