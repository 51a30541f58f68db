use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::{rational_pow, rational_to_f64, Expr, Func, Node, NodeKey};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("division by a non-unit")]
    DivisionByNonUnit,
    #[error("{func} outside its domain")]
    Domain { func: &'static str },
    #[error("{0} has no exact rational value")]
    NotExact(String),
}

/// A commutative scalar ring expressions can be evaluated over.
///
/// Rings are values rather than bare element types so that a ring can carry
/// context its constants need (a Weil algebra's structure table, say).
pub trait Ring {
    type Elem: Clone;

    fn constant(&self, q: &BigRational) -> Result<Self::Elem, EvalError>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, EvalError>;
    fn apply(&self, func: Func, a: &Self::Elem) -> Result<Self::Elem, EvalError>;
    /// Structural zero test; `false` is always a safe answer.
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn zero(&self) -> Self::Elem {
        self.constant(&BigRational::zero()).expect("zero is representable")
    }

    fn one(&self) -> Self::Elem {
        self.constant(&BigRational::one()).expect("one is representable")
    }

    fn scale(&self, q: &BigRational, a: &Self::Elem) -> Result<Self::Elem, EvalError> {
        Ok(self.mul(&self.constant(q)?, a))
    }

    fn powi(&self, a: &Self::Elem, k: i32) -> Result<Self::Elem, EvalError> {
        let mut base = a.clone();
        let mut acc = self.one();
        let mut n = k.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base);
            }
        }
        if k < 0 {
            self.div(&self.one(), &acc)
        } else {
            Ok(acc)
        }
    }
}

/// Variable assignment over the active scalar kind.
#[derive(Debug, Clone)]
pub struct Env<T> {
    vars: HashMap<String, T>,
}

impl<T> Default for Env<T> {
    fn default() -> Self {
        Env { vars: HashMap::new() }
    }
}

impl<T> Env<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: T) -> Self {
        self.vars.insert(name.to_string(), value);
        self
    }

    pub fn set(&mut self, name: &str, value: T) {
        self.vars.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<&T> {
        self.vars.get(name)
    }
}

impl<T> FromIterator<(String, T)> for Env<T> {
    fn from_iter<I: IntoIterator<Item = (String, T)>>(iter: I) -> Self {
        Env { vars: iter.into_iter().collect() }
    }
}

/// Evaluates `e` over `ring`.
pub fn eval<R: Ring>(e: &Expr, env: &Env<R::Elem>, ring: &R) -> Result<R::Elem, EvalError> {
    Evaluator::new(ring, env).eval(e)
}

/// Memoizing evaluator; shares work across expressions evaluated at the same
/// assignment, which matters for the DAGs produced by differentiation.
pub struct Evaluator<'a, R: Ring> {
    ring: &'a R,
    env: &'a Env<R::Elem>,
    cache: HashMap<NodeKey, (Expr, R::Elem)>,
}

impl<'a, R: Ring> Evaluator<'a, R> {
    pub fn new(ring: &'a R, env: &'a Env<R::Elem>) -> Self {
        Evaluator { ring, env, cache: HashMap::new() }
    }

    pub fn eval(&mut self, e: &Expr) -> Result<R::Elem, EvalError> {
        if let Some((_, v)) = self.cache.get(&e.key()) {
            return Ok(v.clone());
        }
        let r = self.ring;
        let v = match e.kind() {
            Node::Const(q) => r.constant(q)?,
            Node::Var(name) => self
                .env
                .get(name)
                .cloned()
                .ok_or_else(|| EvalError::UnboundVariable(name.to_string()))?,
            Node::Neg(a) => {
                let a = self.eval(a)?;
                r.neg(&a)
            }
            Node::Add(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                r.add(&a, &b)
            }
            Node::Sub(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                r.sub(&a, &b)
            }
            Node::Mul(a, b) => {
                let a = self.eval(a)?;
                if r.is_zero(&a) {
                    a
                } else {
                    let b = self.eval(b)?;
                    r.mul(&a, &b)
                }
            }
            Node::Div(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                r.div(&a, &b)?
            }
            Node::Pow(a, k) => {
                let a = self.eval(a)?;
                r.powi(&a, *k)?
            }
            Node::Call(f, a) => {
                let a = self.eval(a)?;
                r.apply(*f, &a)?
            }
        };
        self.cache.insert(e.key(), (e.clone(), v.clone()));
        Ok(v)
    }
}

/// Double-precision evaluation with native analytic functions.
#[derive(Debug, Clone, Copy, Default)]
pub struct F64Ring;

impl Ring for F64Ring {
    type Elem = f64;

    fn constant(&self, q: &BigRational) -> Result<f64, EvalError> {
        Ok(rational_to_f64(q))
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn sub(&self, a: &f64, b: &f64) -> f64 {
        a - b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn neg(&self, a: &f64) -> f64 {
        -a
    }
    fn div(&self, a: &f64, b: &f64) -> Result<f64, EvalError> {
        if *b == 0.0 {
            return Err(EvalError::DivisionByNonUnit);
        }
        Ok(a / b)
    }
    fn apply(&self, func: Func, a: &f64) -> Result<f64, EvalError> {
        let x = *a;
        let v = match func {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Log if x > 0.0 => x.ln(),
            Func::Sqrt if x >= 0.0 => x.sqrt(),
            Func::Log | Func::Sqrt => return Err(EvalError::Domain { func: func.name() }),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Domain { func: func.name() })
        }
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == 0.0
    }
    fn powi(&self, a: &f64, k: i32) -> Result<f64, EvalError> {
        if *a == 0.0 && k < 0 {
            return Err(EvalError::DivisionByNonUnit);
        }
        Ok(a.powi(k))
    }
}

/// Exact rational arithmetic; analytic functions only where the value is rational.
#[derive(Debug, Clone, Copy, Default)]
pub struct RationalRing;

impl Ring for RationalRing {
    type Elem = BigRational;

    fn constant(&self, q: &BigRational) -> Result<BigRational, EvalError> {
        Ok(q.clone())
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn div(&self, a: &BigRational, b: &BigRational) -> Result<BigRational, EvalError> {
        if b.is_zero() {
            return Err(EvalError::DivisionByNonUnit);
        }
        Ok(a / b)
    }
    fn apply(&self, func: Func, a: &BigRational) -> Result<BigRational, EvalError> {
        if matches!(func, Func::Log) && !a.is_positive() || matches!(func, Func::Sqrt) && a.is_negative() {
            return Err(EvalError::Domain { func: func.name() });
        }
        func.exact_value(a)
            .ok_or_else(|| EvalError::NotExact(format!("{}({a})", func.name())))
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn powi(&self, a: &BigRational, k: i32) -> Result<BigRational, EvalError> {
        if a.is_zero() && k < 0 {
            return Err(EvalError::DivisionByNonUnit);
        }
        Ok(rational_pow(a, k))
    }
}

/// Symbolic scalars: evaluation builds expressions.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExprRing;

impl Ring for ExprRing {
    type Elem = Expr;

    fn constant(&self, q: &BigRational) -> Result<Expr, EvalError> {
        Ok(Expr::constant(q.clone()))
    }
    fn add(&self, a: &Expr, b: &Expr) -> Expr {
        a.add(b)
    }
    fn sub(&self, a: &Expr, b: &Expr) -> Expr {
        a.sub(b)
    }
    fn mul(&self, a: &Expr, b: &Expr) -> Expr {
        a.mul(b)
    }
    fn neg(&self, a: &Expr) -> Expr {
        a.neg()
    }
    fn div(&self, a: &Expr, b: &Expr) -> Result<Expr, EvalError> {
        if b.is_zero() {
            return Err(EvalError::DivisionByNonUnit);
        }
        Ok(a.div(b))
    }
    fn apply(&self, func: Func, a: &Expr) -> Result<Expr, EvalError> {
        if let Some(q) = a.as_const() {
            if matches!(func, Func::Log) && !q.is_positive() || matches!(func, Func::Sqrt) && q.is_negative() {
                return Err(EvalError::Domain { func: func.name() });
            }
        }
        Ok(Expr::call(func, a))
    }
    fn is_zero(&self, a: &Expr) -> bool {
        a.is_zero()
    }
    fn powi(&self, a: &Expr, k: i32) -> Result<Expr, EvalError> {
        if a.is_zero() && k < 0 {
            return Err(EvalError::DivisionByNonUnit);
        }
        Ok(a.powi(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn float_and_rational_agree_on_polynomials() {
        let e = parse("(x + 1/2)^3 - x*y/3").unwrap();
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let exact = eval(&e, &Env::new().with("x", q(1, 3)).with("y", q(-2, 1)), &RationalRing).unwrap();
        let float = eval(&e, &Env::new().with("x", 1.0 / 3.0).with("y", -2.0), &F64Ring).unwrap();
        assert!((rational_to_f64(&exact) - float).abs() < 1e-14);
    }

    #[test]
    fn errors() {
        let env = Env::new().with("x", 0.0);
        assert_eq!(eval(&parse("1/x").unwrap(), &env, &F64Ring), Err(EvalError::DivisionByNonUnit));
        assert!(matches!(eval(&parse("log(x)").unwrap(), &env, &F64Ring), Err(EvalError::Domain { .. })));
        assert!(matches!(eval(&parse("y").unwrap(), &env, &F64Ring), Err(EvalError::UnboundVariable(_))));
        let renv = Env::new().with("x", BigRational::one());
        assert!(matches!(eval(&parse("sin(x)").unwrap(), &renv, &RationalRing), Err(EvalError::NotExact(_))));
    }
}
