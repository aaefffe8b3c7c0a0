//! Null Lagrangians, gauge functions and the invariance of the action.
//!
//! The crate builds Lagrangians and gauge functions as symbolic [`Expr`]
//! trees over the jet coordinates `t`, `x`, `xdot`, `xddot`, applies the
//! Euler–Lagrange operator to them, decides nullness by deterministic
//! sampling, integrates actions along trajectories and checks the endpoint
//! conditions under which a gauge term leaves the action unchanged.
//!
//! Modules:
//! - [`expr`]: expression trees, DSL parsing, evaluation, differentiation;
//! - [`domain`]: sampling boxes and the seeded point sampler;
//! - [`variational`]: Euler–Lagrange residuals, nullness, ODE extraction;
//! - [`families`]: constructors for the standard and non-standard families;
//! - [`exactness`]: gauge endpoint values and the exactness gate;
//! - [`action`]: action integrals and the gauge-shift check;
//! - [`inertia`]: exact null Lagrangians for the free particle `xddot = 0`.

pub mod action;
pub mod domain;
pub mod error;
pub mod exactness;
pub mod expr;
pub mod families;
pub mod inertia;
pub mod quad;
pub mod variational;

pub use domain::{DomainBox, Interval};
pub use error::{Error, Result};
pub use expr::{
    parse_expr, partial_derivative, simplify, total_time_derivative, EvalError, EvalPoint, Expr, ParseError, Var,
    VarSet,
};
