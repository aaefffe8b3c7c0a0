//! DSL text rendering. The output parses back to the same tree.

use std::fmt;

use num_traits::Signed;

use super::{Exponent, Expr};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const PREFIX: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => SUM,
        Expr::Mul(..) | Expr::Div(..) => PRODUCT,
        Expr::Neg(_) => PREFIX,
        Expr::Const(c) if c.is_sign_negative() => PREFIX,
        Expr::Pow(..) => POWER,
        _ => ATOM,
    }
}

fn child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn exponent(f: &mut fmt::Formatter<'_>, r: &Exponent) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else if r.is_negative() {
        write!(f, "(-{}/{})", -r.numer(), r.denom())
    } else {
        write!(f, "({}/{})", r.numer(), r.denom())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                // `-0` would come back as a negated literal
                if *c == 0.0 {
                    f.write_str("0")
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                child(f, a, SUM)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                child(f, b, PRODUCT)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                child(f, a, PRODUCT)?;
                f.write_str(if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                child(f, b, PREFIX)
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                match **a {
                    // a bare literal after `-` is folded by the parser
                    Expr::Const(c) if c >= 0.0 => write!(f, "({a})"),
                    _ => child(f, a, PREFIX),
                }
            }
            Expr::Pow(b, r) => {
                child(f, b, ATOM)?;
                f.write_str("^")?;
                exponent(f, r)
            }
            Expr::Ln(a) => write!(f, "ln({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Abs(a) => write!(f, "abs({a})"),
        }
    }
}

impl Expr {
    /// DSL text for this tree.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_expr, VarSet};
    use super::*;

    fn round_trip(e: Expr) {
        let text = e.to_text();
        let back = parse_expr(&text, VarSet::ALL).unwrap_or_else(|err| panic!("{text}: {err}"));
        assert_eq!(back, e, "text was {text}");
    }

    #[test]
    fn renders_minimal_parentheses() {
        let e = 0.5 * Expr::x().powi(2) + Expr::t() * Expr::x() * Expr::xdot();
        assert_eq!(e.to_text(), "0.5*x^2 + t*x*xdot");
        assert_eq!((1.0 / (Expr::t() + 1.0)).to_text(), "1/(t + 1)");
        assert_eq!((Expr::t() + 1.0).abs().ln().to_text(), "ln(abs(t + 1))");
        assert_eq!((Expr::t() + 1.0).powi(3).to_text(), "(t + 1)^3");
        assert_eq!(Expr::x().pow(Exponent::new(-1, 3)).to_text(), "x^(-1/3)");
    }

    #[test]
    fn structure_survives_round_trip() {
        let x = Expr::x;
        round_trip(x() - (x() - Expr::t()));
        round_trip(x() / (x() * Expr::t()));
        round_trip(-(x() * Expr::t()));
        round_trip(-Expr::Const(2.0));
        round_trip(Expr::Const(-2.0));
        round_trip(Expr::Const(-2.0).powi(2));
        round_trip(-(Expr::Const(2.0).powi(2)));
        round_trip(-Expr::Const(-2.0));
        round_trip(x() * Expr::Const(-0.125));
        round_trip(x().powi(2).powi(3));
        round_trip((-x()).powi(-1));
        round_trip(-(-x()));
        round_trip(Expr::Const(1e-7) + Expr::Const(1e21));
        round_trip(Expr::xddot() - Expr::Const(-3.5) * Expr::xdot().sin());
    }
}
