//! Expanded normal form for polynomial expressions.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Expr, Node};

/// Sorted `(variable, exponent)` pairs.
type Monomial = Vec<(String, u32)>;
type Poly = BTreeMap<Monomial, BigRational>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut m: BTreeMap<String, u32> = a.iter().cloned().collect();
    for (v, k) in b {
        *m.entry(v.clone()).or_insert(0) += k;
    }
    m.into_iter().collect()
}

fn add_into(acc: &mut Poly, p: &Poly, sign: &BigRational) {
    for (m, c) in p {
        let e = acc.entry(m.clone()).or_insert_with(BigRational::zero);
        *e += c * sign;
        if e.is_zero() {
            acc.remove(m);
        }
    }
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            add_into(&mut out, &Poly::from([(mono_mul(ma, mb), ca * cb)]), &BigRational::one());
        }
    }
    out
}

fn to_poly(e: &Expr) -> Option<Poly> {
    Some(match e.kind() {
        Node::Const(q) => {
            let mut p = Poly::new();
            if !q.is_zero() {
                p.insert(vec![], q.clone());
            }
            p
        }
        Node::Var(v) => Poly::from([(vec![(v.to_string(), 1)], BigRational::one())]),
        Node::Neg(a) => to_poly(a)?.into_iter().map(|(m, c)| (m, -c)).collect(),
        Node::Add(a, b) | Node::Sub(a, b) => {
            let mut p = to_poly(a)?;
            let sign = if matches!(e.kind(), Node::Sub(..)) { -BigRational::one() } else { BigRational::one() };
            add_into(&mut p, &to_poly(b)?, &sign);
            p
        }
        Node::Mul(a, b) => mul(&to_poly(a)?, &to_poly(b)?),
        Node::Div(a, b) => {
            let q = b.as_const().filter(|q| !q.is_zero())?.recip();
            to_poly(a)?.into_iter().map(|(m, c)| (m, c * &q)).collect()
        }
        Node::Pow(a, k) if *k >= 0 => {
            let base = to_poly(a)?;
            let mut acc = Poly::from([(vec![], BigRational::one())]);
            for _ in 0..*k {
                acc = mul(&acc, &base);
            }
            acc
        }
        Node::Pow(..) | Node::Call(..) => return None,
    })
}

/// Expands a polynomial with rational coefficients into a sum of monomials
/// in a fixed order, or `None` if `e` is not polynomial.
pub fn expand_polynomial(e: &Expr) -> Option<Expr> {
    let p = to_poly(e)?;
    let mut out: Option<Expr> = None;
    for (m, c) in p.iter().rev() {
        let factors: Vec<Expr> = m.iter().map(|(v, k)| Expr::var(v).powi(*k as i32)).collect();
        let mono = factors.iter().skip(1).fold(factors.first().cloned().unwrap_or_else(Expr::one), |acc, f| acc.mul(f));
        out = Some(match out {
            Some(acc) if c.is_negative() => acc.sub(&Expr::constant(-c).mul(&mono)),
            Some(acc) => acc.add(&Expr::constant(c.clone()).mul(&mono)),
            None => Expr::constant(c.clone()).mul(&mono),
        });
    }
    Some(out.unwrap_or_else(Expr::zero))
}

/// Polynomial normal form when available, otherwise [`super::simplify`].
pub fn tidy(e: &Expr) -> Expr {
    expand_polynomial(e).unwrap_or_else(|| super::simplify(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn collects_like_terms() {
        let e = parse("x_2 - (1/2)*(x_1 + x_1) + x_1").unwrap();
        assert_eq!(expand_polynomial(&e).unwrap().to_string(), "x_2");
        let e = parse("(x + y)^2 - y*y").unwrap();
        assert_eq!(expand_polynomial(&e).unwrap(), expand_polynomial(&parse("2*x*y + x^2").unwrap()).unwrap());
        assert!(expand_polynomial(&parse("exp(x)").unwrap()).is_none());
        assert!(expand_polynomial(&parse("x/y").unwrap()).is_none());
        assert_eq!(expand_polynomial(&parse("x - x").unwrap()).unwrap(), Expr::zero());
    }
}
