use super::{partial_derivative, EvalPoint, Expr, Var, VarSet};
use crate::error::{Error, Result};

/// A path `x(t)` with its first two derivatives precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    x: Expr,
    xdot: Expr,
    xddot: Expr,
}

impl Trajectory {
    pub fn new(x_of_t: Expr) -> Result<Self> {
        if !x_of_t.free_vars().is_subset(VarSet::TIME) {
            return Err(Error::VariableOutOfScope { expr: x_of_t.to_text(), allowed: "t" });
        }
        let xdot = partial_derivative(&x_of_t, Var::T);
        let xddot = partial_derivative(&xdot, Var::T);
        Ok(Trajectory { x: x_of_t, xdot, xddot })
    }

    pub fn x(&self) -> &Expr {
        &self.x
    }

    pub fn xdot(&self) -> &Expr {
        &self.xdot
    }

    pub fn xddot(&self) -> &Expr {
        &self.xddot
    }

    /// The jet point `(t, x(t), xdot(t), xddot(t))`.
    pub fn point(&self, t: f64) -> Result<EvalPoint> {
        let at = EvalPoint::at_time(t);
        Ok(EvalPoint::new(t, self.x.eval(&at)?, self.xdot.eval(&at)?, self.xddot.eval(&at)?))
    }
}
