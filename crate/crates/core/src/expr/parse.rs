//! Recursive-descent parser for the expression DSL.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' rational)?
//! atom   := number | ident | func '(' expr ')' | '(' expr ')'
//! func   := ln | exp | sin | cos | abs
//! ident  := t | x | xdot | xddot
//! rational := ['-'] number | '(' ['-'] integer ['/' integer] ')'
//! ```
//!
//! A minus sign directly in front of a number literal that is not raised to a
//! power is folded into the literal, so `-2` parses as `Const(-2)` while
//! `-x^2` parses as `Neg(Pow(x, 2))`.

use num_traits::Zero;
use thiserror::Error;

use super::{Exponent, Expr, Var, VarSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at column {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("forbidden variable `{name}` at column {position}")]
    ForbiddenVariable { name: String, position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. } | ParseError::ForbiddenVariable { position, .. } => *position,
        }
    }
}

/// Parses `source`, rejecting any variable outside `allowed`.
pub fn parse_expr(source: &str, allowed: VarSet) -> Result<Expr, ParseError> {
    let tokens = lex(source)?;
    let mut parser = Parser { tokens, pos: 0, allowed };
    let e = parser.expr()?;
    match parser.peek() {
        Tok::End => Ok(e),
        _ => Err(parser.error("unexpected trailing input")),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i + 1;
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((tok, start));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                j += 1;
            }
            if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                let mut k = j + 1;
                if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    j = k;
                }
            }
            let text: String = chars[i..j].iter().collect();
            let value: f64 = text
                .parse()
                .map_err(|_| ParseError::Syntax { position: start, message: format!("malformed number `{text}`") })?;
            if !value.is_finite() {
                return Err(ParseError::Syntax {
                    position: start,
                    message: format!("number `{text}` is out of range"),
                });
            }
            out.push((Tok::Num(value, text), start));
            i = j;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            out.push((Tok::Ident(chars[i..j].iter().collect()), start));
            i = j;
        } else {
            return Err(ParseError::Syntax { position: start, message: format!("unexpected character `{c}`") });
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    allowed: VarSet,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].0
    }

    fn column(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: &str) -> ParseError {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            Tok::Num(_, text) => format!("`{text}`"),
            Tok::Ident(name) => format!("`{name}`"),
            other => format!("`{}`", symbol(other)),
        };
        ParseError::Syntax { position: self.column(), message: format!("{message}, found {found}") }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", symbol(&tok))))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = lhs + self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = lhs * self.factor()?;
                }
                Tok::Slash => {
                    self.bump();
                    lhs = lhs / self.factor()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            if let Tok::Num(value, _) = self.peek().clone() {
                if *self.peek_at(1) != Tok::Caret {
                    self.bump();
                    return Ok(Expr::Const(-value));
                }
            }
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let r = self.rational()?;
            return Ok(base.pow(r));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let column = self.column();
        match self.peek().clone() {
            Tok::Num(value, _) => {
                self.bump();
                Ok(Expr::Const(value))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(v) = Var::from_name(&name) {
                    if !self.allowed.contains(v) {
                        return Err(ParseError::ForbiddenVariable { name, position: column });
                    }
                    return Ok(Expr::Var(v));
                }
                let wrap: fn(Expr) -> Expr = match name.as_str() {
                    "ln" => Expr::ln,
                    "exp" => Expr::exp,
                    "sin" => Expr::sin,
                    "cos" => Expr::cos,
                    "abs" => Expr::abs,
                    _ => {
                        return Err(ParseError::Syntax {
                            position: column,
                            message: format!("unknown identifier `{name}`"),
                        })
                    }
                };
                self.expect(Tok::LParen)?;
                let arg = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(wrap(arg))
            }
            _ => Err(self.error("expected a number, variable, function or `(`")),
        }
    }

    fn rational(&mut self) -> Result<Exponent, ParseError> {
        let parenthesized = *self.peek() == Tok::LParen;
        if parenthesized {
            self.bump();
        }
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let column = self.column();
        let text = match self.peek() {
            Tok::Num(_, text) => text.clone(),
            _ => return Err(self.error("expected a rational exponent")),
        };
        self.bump();
        let mut r = decimal_to_rational(&text).ok_or_else(|| ParseError::Syntax {
            position: column,
            message: format!("exponent `{text}` is not representable as a rational"),
        })?;
        if parenthesized {
            if *self.peek() == Tok::Slash {
                self.bump();
                let column = self.column();
                let den = match self.bump() {
                    Tok::Num(_, text) => decimal_to_rational(&text),
                    _ => None,
                };
                match den {
                    Some(d) if !d.is_zero() => r /= d,
                    _ => {
                        return Err(ParseError::Syntax {
                            position: column,
                            message: "expected a nonzero denominator in the exponent".into(),
                        })
                    }
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok(if negative { -r } else { r })
    }
}

fn symbol(tok: &Tok) -> &'static str {
    match tok {
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Slash => "/",
        Tok::Caret => "^",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::End => "end of input",
        Tok::Num(..) => "number",
        Tok::Ident(_) => "identifier",
    }
}

/// Exact rational value of a decimal literal such as `2`, `0.5` or `1.5e-1`.
fn decimal_to_rational(text: &str) -> Option<Exponent> {
    let (mantissa, exp10) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits.is_empty() { "0".to_string() } else { digits };
    let numer: i64 = digits.parse().ok()?;
    let scale = exp10 - frac_part.len() as i32;
    let pow10 = 10i64.checked_pow(scale.unsigned_abs())?;
    if scale >= 0 {
        Some(Exponent::from_integer(numer.checked_mul(pow10)?))
    } else {
        Some(Exponent::new(numer, pow10))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lag(s: &str) -> Result<Expr, ParseError> {
        parse_expr(s, VarSet::LAGRANGIAN)
    }

    #[test]
    fn product_of_variables() {
        assert_eq!(lag("xdot*x").unwrap(), Expr::xdot() * Expr::x());
    }

    #[test]
    fn reciprocal_of_sum() {
        assert_eq!(lag("1/(x + t)").unwrap(), 1.0 / (Expr::x() + Expr::t()));
    }

    #[test]
    fn forbidden_variable_is_named() {
        let err = lag("ln(x) + xddot").unwrap_err();
        assert_eq!(err, ParseError::ForbiddenVariable { name: "xddot".into(), position: 9 });
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = lag("x + * t").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { position: 5, .. }), "{err:?}");
        assert!(matches!(lag("sin x"), Err(ParseError::Syntax { .. })));
        assert!(matches!(lag("(x + 1"), Err(ParseError::Syntax { .. })));
        assert!(matches!(lag("y"), Err(ParseError::Syntax { .. })));
        assert!(matches!(lag("x $ 2"), Err(ParseError::Syntax { position: 3, .. })));
        assert!(matches!(lag(""), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(lag("-x^2").unwrap(), -(Expr::x().powi(2)));
        assert_eq!(lag("-2").unwrap(), Expr::Const(-2.0));
        assert_eq!(lag("-2^2").unwrap(), -(Expr::Const(2.0).powi(2)));
        assert_eq!(lag("-(2)").unwrap(), -Expr::Const(2.0));
        assert_eq!(lag("x*-2").unwrap(), Expr::x() * Expr::Const(-2.0));
    }

    #[test]
    fn rational_exponents() {
        assert_eq!(lag("x^0.5").unwrap(), Expr::x().pow(Exponent::new(1, 2)));
        assert_eq!(lag("x^(1/3)").unwrap(), Expr::x().pow(Exponent::new(1, 3)));
        assert_eq!(lag("x^(-2/4)").unwrap(), Expr::x().pow(Exponent::new(-1, 2)));
        assert_eq!(lag("x^-2").unwrap(), Expr::x().powi(-2));
        assert!(lag("x^(1/0)").is_err());
        assert!(lag("x^t").is_err());
    }

    #[test]
    fn functions_and_precedence() {
        let e = lag("ln(abs(t + 1)) - 2*x/xdot + exp(sin(cos(t)))").unwrap();
        let expected = (Expr::t() + 1.0).abs().ln() - 2.0 * Expr::x() / Expr::xdot() + Expr::t().cos().sin().exp();
        assert_eq!(e, expected);
    }

    #[test]
    fn decimal_literals() {
        assert_eq!(decimal_to_rational("0.25"), Some(Exponent::new(1, 4)));
        assert_eq!(decimal_to_rational("1.5e1"), Some(Exponent::from_integer(15)));
        assert_eq!(decimal_to_rational("5e-1"), Some(Exponent::new(1, 2)));
        assert_eq!(lag("1e-3").unwrap(), Expr::Const(1e-3));
    }
}
