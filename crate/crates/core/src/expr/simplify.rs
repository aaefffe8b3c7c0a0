//! Best-effort canonicalization.
//!
//! An expression is brought into a sum of terms, each term a coefficient
//! times a sorted product of `base^exponent` factors. Products distribute
//! over sums, like factors merge their exponents and like terms merge their
//! coefficients. Powers of multi-term sums other than the first are kept
//! unexpanded. The result is rebuilt into an ordinary [`Expr`].

use std::cmp::Ordering;

use num_traits::{CheckedAdd, CheckedMul, One, Signed, Zero};

use super::{canonical_cmp, rational_pow, Exponent, Expr};

/// Simplified copy of `e`. Evaluates identically to `e` up to rounding
/// wherever `e` itself evaluates.
pub fn simplify(e: &Expr) -> Expr {
    rebuild(&canon(e))
}

#[derive(Debug, Clone, PartialEq)]
struct Term {
    coeff: f64,
    factors: Vec<(Expr, Exponent)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Sum {
    terms: Vec<Term>,
}

impl Sum {
    fn constant(c: f64) -> Sum {
        if c == 0.0 {
            Sum::default()
        } else {
            Sum { terms: vec![Term { coeff: c, factors: vec![] }] }
        }
    }

    fn atom(e: Expr) -> Sum {
        Sum::factor(e, Exponent::one())
    }

    fn factor(base: Expr, r: Exponent) -> Sum {
        Sum { terms: vec![Term { coeff: 1.0, factors: vec![(base, r)] }] }
    }

    fn as_constant(&self) -> Option<f64> {
        match self.terms.as_slice() {
            [] => Some(0.0),
            [t] if t.factors.is_empty() => Some(t.coeff),
            _ => None,
        }
    }

    fn add(mut self, other: Sum) -> Sum {
        self.terms.extend(other.terms);
        normalize(self.terms)
    }

    fn scale(mut self, c: f64) -> Sum {
        if c == 0.0 {
            return Sum::default();
        }
        for t in &mut self.terms {
            t.coeff *= c;
        }
        normalize(self.terms)
    }

    fn mul(&self, other: &Sum) -> Sum {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(mul_terms(a, b));
            }
        }
        normalize(terms)
    }

    fn power(self, r: Exponent) -> Sum {
        if r.is_zero() {
            return Sum::constant(1.0);
        }
        if r.is_one() {
            return self;
        }
        if self.terms.is_empty() {
            return if r.is_positive() { Sum::default() } else { Sum::factor(Expr::zero(), r) };
        }
        if self.terms.len() > 1 {
            return Sum::factor(rebuild(&self), r);
        }
        let term = &self.terms[0];
        if term.factors.is_empty() {
            return match rational_pow(term.coeff, r) {
                Some(v) if v.is_finite() => Sum::constant(v),
                _ => Sum::factor(Expr::Const(term.coeff), r),
            };
        }
        if r.is_integer() {
            let coeff = rational_pow(term.coeff, r).unwrap_or(f64::NAN);
            let factors: Option<Vec<_>> =
                term.factors.iter().map(|(b, e)| e.checked_mul(&r).map(|e| (b.clone(), e))).collect();
            if let (true, Some(factors)) = (coeff.is_finite(), factors) {
                return normalize(vec![Term { coeff, factors }]);
            }
            return Sum::factor(rebuild(&self), r);
        }
        if term.coeff > 0.0 {
            let coeff = rational_pow(term.coeff, r).unwrap_or(f64::NAN);
            if coeff.is_finite() {
                let unit = Term { coeff: 1.0, factors: term.factors.clone() };
                let base = match unit.factors.as_slice() {
                    [(b, e)] if e.is_one() => b.clone(),
                    _ => rebuild(&Sum { terms: vec![unit] }),
                };
                return Sum::factor(base, r).scale(coeff);
            }
        }
        Sum::factor(rebuild(&self), r)
    }
}

fn mul_terms(a: &Term, b: &Term) -> Term {
    let mut factors: Vec<(Expr, Exponent)> = Vec::with_capacity(a.factors.len() + b.factors.len());
    let (mut i, mut j) = (0, 0);
    while i < a.factors.len() || j < b.factors.len() {
        let ord = match (a.factors.get(i), b.factors.get(j)) {
            (Some(x), Some(y)) => canonical_cmp(&x.0, &y.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match ord {
            Ordering::Less => {
                factors.push(a.factors[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                factors.push(b.factors[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let (base, ea) = &a.factors[i];
                let eb = &b.factors[j].1;
                match ea.checked_add(eb) {
                    Some(e) if e.is_zero() => {}
                    Some(e) => factors.push((base.clone(), e)),
                    None => {
                        factors.push(a.factors[i].clone());
                        factors.push(b.factors[j].clone());
                    }
                }
                i += 1;
                j += 1;
            }
        }
    }
    Term { coeff: a.coeff * b.coeff, factors }
}

fn cmp_factor_lists(a: &[(Expr, Exponent)], b: &[(Expr, Exponent)]) -> Ordering {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return Ordering::Equal,
        (true, false) => return Ordering::Greater,
        (false, true) => return Ordering::Less,
        _ => {}
    }
    for ((ba, ea), (bb, eb)) in a.iter().zip(b) {
        let ord = canonical_cmp(ba, bb).then_with(|| eb.cmp(ea));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    a.len().cmp(&b.len())
}

fn normalize(mut terms: Vec<Term>) -> Sum {
    terms.retain(|t| t.coeff != 0.0);
    for t in &mut terms {
        t.factors.sort_by(|x, y| canonical_cmp(&x.0, &y.0).then_with(|| y.1.cmp(&x.1)));
    }
    terms.sort_by(|x, y| cmp_factor_lists(&x.factors, &y.factors));
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.factors == t.factors => last.coeff += t.coeff,
            _ => out.push(t),
        }
    }
    out.retain(|t| t.coeff != 0.0);
    Sum { terms: out }
}

fn canon(e: &Expr) -> Sum {
    match e {
        Expr::Const(c) => Sum::constant(*c),
        Expr::Var(_) => Sum::atom(e.clone()),
        Expr::Add(a, b) => canon(a).add(canon(b)),
        Expr::Sub(a, b) => canon(a).add(canon(b).scale(-1.0)),
        Expr::Neg(a) => canon(a).scale(-1.0),
        Expr::Mul(a, b) => {
            let ca = canon(a);
            if ca.terms.is_empty() {
                return ca;
            }
            ca.mul(&canon(b))
        }
        Expr::Div(a, b) => {
            let ca = canon(a);
            let cb = canon(b);
            if ca.terms.is_empty() && !cb.terms.is_empty() {
                return ca;
            }
            ca.mul(&cb.power(-Exponent::one()))
        }
        Expr::Pow(b, r) => canon(b).power(*r),
        Expr::Ln(a) => {
            let inner = simplify(a);
            match inner.as_const() {
                Some(c) if c != 0.0 => Sum::constant(c.abs().ln()),
                _ => Sum::atom(inner.ln()),
            }
        }
        Expr::Exp(a) => fold_or_atom(a, f64::exp, Expr::exp),
        Expr::Sin(a) => fold_or_atom(a, f64::sin, Expr::sin),
        Expr::Cos(a) => fold_or_atom(a, f64::cos, Expr::cos),
        Expr::Abs(a) => {
            let mut inner = canon(a);
            if let Some(c) = inner.as_constant() {
                return Sum::constant(c.abs());
            }
            if let [t] = inner.terms.as_slice() {
                if t.coeff < 0.0 {
                    inner = inner.scale(-1.0);
                }
            }
            match rebuild(&inner) {
                nested @ Expr::Abs(_) => Sum::atom(nested),
                other => Sum::atom(other.abs()),
            }
        }
    }
}

fn fold_or_atom(arg: &Expr, f: fn(f64) -> f64, wrap: fn(Expr) -> Expr) -> Sum {
    let inner = simplify(arg);
    if let Some(c) = inner.as_const() {
        let v = f(c);
        if v.is_finite() {
            return Sum::constant(v);
        }
    }
    Sum::atom(wrap(inner))
}

fn factor_expr(base: &Expr, r: Exponent) -> Expr {
    if r.is_one() {
        base.clone()
    } else {
        base.clone().pow(r)
    }
}

fn product(factors: Vec<Expr>) -> Option<Expr> {
    factors.into_iter().reduce(|acc, f| acc * f)
}

fn term_expr(t: &Term) -> Expr {
    let mut numer = Vec::new();
    let mut denom = Vec::new();
    for (b, r) in &t.factors {
        if r.is_negative() {
            denom.push(factor_expr(b, -r));
        } else {
            numer.push(factor_expr(b, *r));
        }
    }
    let top = if numer.is_empty() {
        Expr::Const(t.coeff)
    } else if t.coeff == 1.0 {
        product(numer).expect("nonempty")
    } else if t.coeff == -1.0 {
        numer[0] = -numer[0].clone();
        product(numer).expect("nonempty")
    } else {
        numer.insert(0, Expr::Const(t.coeff));
        product(numer).expect("nonempty")
    };
    match product(denom) {
        Some(d) => top / d,
        None => top,
    }
}

fn rebuild(s: &Sum) -> Expr {
    // lead with a positive term when there is one
    let lead = s.terms.iter().position(|t| t.coeff > 0.0).unwrap_or(0);
    let ordered =
        s.terms.get(lead).into_iter().chain(s.terms.iter().enumerate().filter(|(i, _)| *i != lead).map(|(_, t)| t));
    let mut acc: Option<Expr> = None;
    for t in ordered {
        acc = Some(match acc {
            None => term_expr(t),
            Some(a) if t.coeff < 0.0 => a - term_expr(&Term { coeff: -t.coeff, factors: t.factors.clone() }),
            Some(a) => a + term_expr(t),
        });
    }
    acc.unwrap_or_else(Expr::zero)
}
