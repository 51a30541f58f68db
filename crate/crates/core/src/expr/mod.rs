//! Symbolic scalar expressions over named coordinates.
//!
//! Expressions are immutable reference-counted trees (in practice DAGs, since
//! derivatives and lifts share subterms). The arithmetic operators build
//! through light-weight smart constructors that fold constants and drop
//! additive/multiplicative identities; [`Expr::node`] builds raw nodes, which
//! is what the parser uses.

mod diff;
mod eval;
mod parse;
mod poly;
mod print;
mod sample;
mod taylor;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use eval::{eval, Env, EvalError, Evaluator, ExprRing, F64Ring, RationalRing, Ring};
pub use parse::{parse, ParseError};
pub use poly::{expand_polynomial, tidy};
pub use print::to_latex;
pub use sample::{expr_equiv, max_scaled_difference, SampleError, SamplePoint, Sampler, SamplingPolicy};
pub use taylor::taylor_coefficients;


/// Largest admissible integer exponent magnitude.
pub const MAX_EXPONENT: i32 = 64;

/// The analytic unary functions an expression may apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Sin, Func::Cos, Func::Tan, Func::Exp, Func::Log, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Value at a rational point when it is itself rational.
    fn exact_value(self, q: &BigRational) -> Option<BigRational> {
        let zero = q.is_zero();
        let one = q.is_one();
        match self {
            Func::Sin | Func::Tan if zero => Some(BigRational::zero()),
            Func::Cos | Func::Exp if zero => Some(BigRational::one()),
            Func::Log if one => Some(BigRational::zero()),
            Func::Sqrt if zero || one => Some(q.clone()),
            _ => None,
        }
    }
}

#[derive(Debug, PartialEq)]
pub enum Node {
    Const(BigRational),
    Var(Arc<str>),
    Neg(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, i32),
    Call(Func, Expr),
}

#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub(crate) type NodeKey = *const Node;

impl Expr {
    /// Wraps a node without any simplification.
    pub fn node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn kind(&self) -> &Node {
        &self.0
    }

    pub(crate) fn key(&self) -> NodeKey {
        Arc::as_ptr(&self.0)
    }

    pub fn constant(q: BigRational) -> Expr {
        Expr::node(Node::Const(q))
    }

    pub fn int(i: i64) -> Expr {
        Expr::constant(BigRational::from_integer(BigInt::from(i)))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr::constant(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(name: &str) -> Expr {
        Expr::node(Node::Var(Arc::from(name)))
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        match self.kind() {
            Node::Const(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self.kind() {
            Node::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(One::is_one)
    }

    pub fn neg(&self) -> Expr {
        match self.kind() {
            Node::Const(q) => Expr::constant(-q),
            Node::Neg(a) => a.clone(),
            _ => Expr::node(Node::Neg(self.clone())),
        }
    }

    pub fn add(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a + b),
            (Some(a), _) if a.is_zero() => rhs.clone(),
            (_, Some(b)) if b.is_zero() => self.clone(),
            _ => Expr::node(Node::Add(self.clone(), rhs.clone())),
        }
    }

    pub fn sub(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a - b),
            (_, Some(b)) if b.is_zero() => self.clone(),
            (Some(a), _) if a.is_zero() => rhs.neg(),
            _ if Arc::ptr_eq(&self.0, &rhs.0) => Expr::zero(),
            _ => Expr::node(Node::Sub(self.clone(), rhs.clone())),
        }
    }

    pub fn mul(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a * b),
            (Some(_), None) => scale(self.as_const().unwrap(), rhs),
            (None, Some(b)) => scale(b, self),
            (None, None) => Expr::node(Node::Mul(self.clone(), rhs.clone())),
        }
    }

    pub fn div(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (_, Some(b)) if b.is_zero() => Expr::node(Node::Div(self.clone(), rhs.clone())),
            (Some(a), Some(b)) => Expr::constant(a / b),
            (Some(a), None) if a.is_zero() => Expr::zero(),
            (None, Some(b)) => scale(&b.recip(), self),
            _ => Expr::node(Node::Div(self.clone(), rhs.clone())),
        }
    }

    pub fn powi(&self, exponent: i32) -> Expr {
        if exponent == 0 {
            return Expr::one();
        }
        if exponent == 1 {
            return self.clone();
        }
        if let Some(q) = self.as_const() {
            if !(q.is_zero() && exponent < 0) {
                return Expr::constant(rational_pow(q, exponent));
            }
        }
        Expr::node(Node::Pow(self.clone(), exponent))
    }

    pub fn call(func: Func, arg: &Expr) -> Expr {
        if let Some(v) = arg.as_const().and_then(|q| func.exact_value(q)) {
            return Expr::constant(v);
        }
        Expr::node(Node::Call(func, arg.clone()))
    }

    pub fn sin(&self) -> Expr {
        Expr::call(Func::Sin, self)
    }
    pub fn cos(&self) -> Expr {
        Expr::call(Func::Cos, self)
    }
    pub fn exp(&self) -> Expr {
        Expr::call(Func::Exp, self)
    }
    pub fn sqrt(&self) -> Expr {
        Expr::call(Func::Sqrt, self)
    }

    /// Sum of a list of expressions; zero for an empty list.
    pub fn sum<'a, I: IntoIterator<Item = &'a Expr>>(terms: I) -> Expr {
        terms.into_iter().fold(Expr::zero(), |acc, t| acc.add(t))
    }

    /// Symbolic partial derivative with respect to `var`.
    pub fn diff(&self, var: &str) -> Expr {
        diff::differentiate(self, var)
    }

    /// Replaces variables according to `map`, simplifying as it rebuilds.
    pub fn substitute(&self, map: &HashMap<String, Expr>) -> Expr {
        let mut memo = HashMap::new();
        substitute_rec(self, map, &mut memo)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        collect_vars(self, &mut out, &mut seen);
        out
    }

    pub fn depends_on(&self, var: &str) -> bool {
        let mut memo = HashMap::new();
        depends_rec(self, var, &mut memo)
    }

    /// Number of distinct nodes in the DAG.
    pub fn node_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        count_rec(self, &mut seen);
        seen.len()
    }
}

fn scale(c: &BigRational, e: &Expr) -> Expr {
    if c.is_zero() {
        return Expr::zero();
    }
    if c.is_one() {
        return e.clone();
    }
    if (-c).is_one() {
        return e.neg();
    }
    match e.kind() {
        Node::Mul(a, b) => {
            if let Some(inner) = a.as_const() {
                return scale(&(c * inner), b);
            }
            Expr::node(Node::Mul(Expr::constant(c.clone()), e.clone()))
        }
        _ => Expr::node(Node::Mul(Expr::constant(c.clone()), e.clone())),
    }
}

pub(crate) fn rational_pow(q: &BigRational, exponent: i32) -> BigRational {
    let base = if exponent < 0 { q.recip() } else { q.clone() };
    let mut acc = BigRational::one();
    for _ in 0..exponent.unsigned_abs() {
        acc *= &base;
    }
    acc
}

/// Rebuilds the tree bottom-up through the smart constructors.
pub fn simplify(e: &Expr) -> Expr {
    let mut memo: HashMap<NodeKey, (Expr, Expr)> = HashMap::new();
    simplify_rec(e, &mut memo)
}

fn simplify_rec(e: &Expr, memo: &mut HashMap<NodeKey, (Expr, Expr)>) -> Expr {
    if let Some((_, s)) = memo.get(&e.key()) {
        return s.clone();
    }
    let out = match e.kind() {
        Node::Const(_) | Node::Var(_) => e.clone(),
        Node::Neg(a) => simplify_rec(a, memo).neg(),
        Node::Add(a, b) => simplify_rec(a, memo).add(&simplify_rec(b, memo)),
        Node::Sub(a, b) => simplify_rec(a, memo).sub(&simplify_rec(b, memo)),
        Node::Mul(a, b) => simplify_rec(a, memo).mul(&simplify_rec(b, memo)),
        Node::Div(a, b) => simplify_rec(a, memo).div(&simplify_rec(b, memo)),
        Node::Pow(a, k) => simplify_rec(a, memo).powi(*k),
        Node::Call(f, a) => Expr::call(*f, &simplify_rec(a, memo)),
    };
    memo.insert(e.key(), (e.clone(), out.clone()));
    out
}

fn substitute_rec(
    e: &Expr,
    map: &HashMap<String, Expr>,
    memo: &mut HashMap<NodeKey, (Expr, Expr)>,
) -> Expr {
    if let Some((_, s)) = memo.get(&e.key()) {
        return s.clone();
    }
    let out = match e.kind() {
        Node::Const(_) => e.clone(),
        Node::Var(v) => map.get(&**v).cloned().unwrap_or_else(|| e.clone()),
        Node::Neg(a) => substitute_rec(a, map, memo).neg(),
        Node::Add(a, b) => substitute_rec(a, map, memo).add(&substitute_rec(b, map, memo)),
        Node::Sub(a, b) => substitute_rec(a, map, memo).sub(&substitute_rec(b, map, memo)),
        Node::Mul(a, b) => substitute_rec(a, map, memo).mul(&substitute_rec(b, map, memo)),
        Node::Div(a, b) => substitute_rec(a, map, memo).div(&substitute_rec(b, map, memo)),
        Node::Pow(a, k) => substitute_rec(a, map, memo).powi(*k),
        Node::Call(f, a) => Expr::call(*f, &substitute_rec(a, map, memo)),
    };
    memo.insert(e.key(), (e.clone(), out.clone()));
    out
}

fn collect_vars(
    e: &Expr,
    out: &mut BTreeSet<String>,
    seen: &mut std::collections::HashSet<NodeKey>,
) {
    if !seen.insert(e.key()) {
        return;
    }
    match e.kind() {
        Node::Const(_) => {}
        Node::Var(v) => {
            out.insert(v.to_string());
        }
        Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => collect_vars(a, out, seen),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            collect_vars(a, out, seen);
            collect_vars(b, out, seen);
        }
    }
}

fn depends_rec(e: &Expr, var: &str, memo: &mut HashMap<NodeKey, bool>) -> bool {
    if let Some(&d) = memo.get(&e.key()) {
        return d;
    }
    let d = match e.kind() {
        Node::Const(_) => false,
        Node::Var(v) => &**v == var,
        Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => depends_rec(a, var, memo),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            depends_rec(a, var, memo) || depends_rec(b, var, memo)
        }
    };
    memo.insert(e.key(), d);
    d
}

fn count_rec(e: &Expr, seen: &mut std::collections::HashSet<NodeKey>) {
    if !seen.insert(e.key()) {
        return;
    }
    match e.kind() {
        Node::Const(_) | Node::Var(_) => {}
        Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => count_rec(a, seen),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            count_rec(a, seen);
            count_rec(b, seen);
        }
    }
}

/// Converts a rational to the nearest `f64`.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale through the integer parts.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        if q.is_negative() {
            -(n.abs() / d)
        } else {
            n / d
        }
    })
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl std::ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$inner(self, rhs)
            }
        }
        impl std::ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$inner(&self, &rhs)
            }
        }
        impl std::ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$inner(&self, rhs)
            }
        }
        impl std::ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$inner(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);
forward_binop!(Div, div, div);

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Expr, ParseError> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn simplify_identities() {
        assert_eq!(simplify(&p("0*x")), Expr::zero());
        assert_eq!(simplify(&p("x + 0")), Expr::var("x"));
        assert_eq!(simplify(&p("2*3")), Expr::int(6));
        assert_eq!(simplify(&p("x/2")), simplify(&p("(1/2)*x")));
    }

    #[test]
    fn substitute_replaces_and_folds() {
        let e = p("x*y + sin(z)");
        let mut map = HashMap::new();
        map.insert("z".to_string(), Expr::zero());
        map.insert("y".to_string(), Expr::one());
        assert_eq!(e.substitute(&map), Expr::var("x"));
    }

    #[test]
    fn free_vars_are_collected() {
        let vars: Vec<_> = p("x*y + sin(z)").free_vars().into_iter().collect();
        assert_eq!(vars, ["x", "y", "z"]);
    }
}
