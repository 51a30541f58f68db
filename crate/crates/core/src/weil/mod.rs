//! Weil algebras given by structure constants, their elements over any scalar
//! ring, and linear functionals with their Gram forms.
//!
//! Basis index 0 is always the unit (label `1`); indices `1..dim` span the
//! maximal ideal.

mod element;
mod functional;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::expr::EvalError;
use crate::linalg;
use crate::report::{Check, Residual, VerificationReport};

pub use element::{WeilElement, WeilRing};
pub use functional::{FunctionalPreset, LinearFunctional};

/// Default bound on algebra dimension.
pub const DEFAULT_DIM_CAP: usize = 512;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeilError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("algebra dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("invalid structure table: {0}")]
    InvalidTable(String),
    #[error("operands belong to different algebras")]
    AlgebraMismatch,
    #[error("element has zero real part and is not a unit")]
    ZeroRealPart,
    #[error("series needs {needed} derivative orders, got {got}")]
    InsufficientDerivatives { needed: usize, got: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Structure constants: `table[i][j][k]` is the coefficient of `a_k` in `a_i a_j`.
pub type Table = Vec<Vec<Vec<BigRational>>>;

#[derive(Debug)]
struct AlgebraData {
    name: String,
    labels: Vec<String>,
    table: Table,
    sparse: Vec<Vec<Vec<(usize, BigRational)>>>,
    nilpotency_order: Option<usize>,
}

/// A finite-dimensional commutative unital algebra with nilpotent maximal ideal.
/// Cheap to clone.
#[derive(Clone)]
pub struct WeilAlgebra(Arc<AlgebraData>);

impl fmt::Debug for WeilAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeilAlgebra({}, dim {})", self.0.name, self.dim())
    }
}

impl PartialEq for WeilAlgebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.labels == other.0.labels && self.0.table == other.0.table)
    }
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

impl WeilAlgebra {
    fn build(name: String, labels: Vec<String>, table: Table) -> WeilAlgebra {
        let sparse = table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| {
                        c.iter()
                            .enumerate()
                            .filter(|(_, v)| !v.is_zero())
                            .map(|(k, v)| (k, v.clone()))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut data = AlgebraData { name, labels, table, sparse, nilpotency_order: None };
        data.nilpotency_order = nilpotency(&data);
        WeilAlgebra(Arc::new(data))
    }

    /// The one-dimensional algebra ℝ.
    pub fn trivial() -> WeilAlgebra {
        Self::build("trivial".into(), vec!["1".into()], vec![vec![vec![q(1)]]])
    }

    /// ℝ[u]/(u²).
    pub fn dual() -> WeilAlgebra {
        let mut a = Self::jet(1).expect("k = 1 is valid");
        Arc::get_mut(&mut a.0).expect("fresh").name = "dual".into();
        a
    }

    /// ℝ[u]/(u^{k+1}) with basis 1, u, …, u^k.
    pub fn jet(k: usize) -> Result<WeilAlgebra, WeilError> {
        if k == 0 {
            return Err(WeilError::InvalidParameter("jet order must be at least 1".into()));
        }
        let dim = k + 1;
        if dim > DEFAULT_DIM_CAP {
            return Err(WeilError::DimensionCap { dim, cap: DEFAULT_DIM_CAP });
        }
        let labels = (0..dim)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "u".to_string(),
                _ => format!("u^{i}"),
            })
            .collect();
        let mut table = vec![vec![vec![q(0); dim]; dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                if i + j < dim {
                    table[i][j][i + j] = q(1);
                }
            }
        }
        Ok(Self::build(format!("jet({k})"), labels, table))
    }

    /// ℝ[X_1..X_n]/𝔪^{k+1} with monomials in degree-lexicographic order.
    pub fn truncated(n: usize, k: usize) -> Result<WeilAlgebra, WeilError> {
        Self::truncated_with_cap(n, k, DEFAULT_DIM_CAP)
    }

    pub fn truncated_with_cap(n: usize, k: usize, cap: usize) -> Result<WeilAlgebra, WeilError> {
        if n == 0 || k == 0 {
            return Err(WeilError::InvalidParameter("truncated algebra needs n >= 1 and k >= 1".into()));
        }
        let dim = binomial(n + k, k).unwrap_or(usize::MAX);
        if dim > cap {
            return Err(WeilError::DimensionCap { dim, cap });
        }
        let mut monos: Vec<Vec<usize>> = Vec::with_capacity(dim);
        exponents(n, k, &mut Vec::new(), &mut monos);
        monos.sort_by(|a, b| {
            let (da, db): (usize, usize) = (a.iter().sum(), b.iter().sum());
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let index: HashMap<&[usize], usize> = monos.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect();
        let mut table = vec![vec![vec![q(0); dim]; dim]; dim];
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                let prod: Vec<usize> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if let Some(&p) = index.get(prod.as_slice()) {
                    table[i][j][p] = q(1);
                }
            }
        }
        let labels = monos.iter().map(|m| monomial_label(m)).collect();
        Ok(Self::build(format!("truncated({n},{k})"), labels, table))
    }

    /// Dense user-supplied table; rejected unless every axiom holds.
    pub fn from_table(labels: Vec<String>, table: Table) -> Result<WeilAlgebra, WeilError> {
        let a = Self::from_table_unchecked(labels, table)?;
        let report = a.verify_axioms();
        if !report.passed() {
            return Err(WeilError::InvalidTable(format!("fails {}", report.failing().join(", "))));
        }
        Ok(a)
    }

    /// Shape-checked table without axiom checks, for inspection by [`verify_axioms`](Self::verify_axioms).
    pub fn from_table_unchecked(labels: Vec<String>, table: Table) -> Result<WeilAlgebra, WeilError> {
        let dim = table.len();
        if dim == 0 {
            return Err(WeilError::InvalidTable("empty table".into()));
        }
        if dim > DEFAULT_DIM_CAP {
            return Err(WeilError::DimensionCap { dim, cap: DEFAULT_DIM_CAP });
        }
        if labels.len() != dim {
            return Err(WeilError::InvalidTable(format!("{} labels for dimension {dim}", labels.len())));
        }
        if labels[0] != "1" {
            return Err(WeilError::InvalidTable("label `1` must name basis element 0".into()));
        }
        if labels[1..].iter().any(|l| l == "1") {
            return Err(WeilError::InvalidTable("label `1` is reserved for the unit".into()));
        }
        if table.iter().any(|row| row.len() != dim || row.iter().any(|c| c.len() != dim)) {
            return Err(WeilError::InvalidTable(format!("table must be {dim}x{dim}x{dim}")));
        }
        Ok(Self::build("custom".into(), labels, table))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn dim(&self) -> usize {
        self.0.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.0.labels
    }

    pub fn table(&self) -> &Table {
        &self.0.table
    }

    /// Nonzero structure constants of `a_i a_j`.
    pub fn product_terms(&self, i: usize, j: usize) -> &[(usize, BigRational)] {
        &self.0.sparse[i][j]
    }

    /// Smallest `k` with every `k`-fold product of ideal elements zero.
    pub fn nilpotency_order(&self) -> usize {
        self.0.nilpotency_order.expect("validated algebras are nilpotent")
    }

    pub fn try_nilpotency_order(&self) -> Option<usize> {
        self.0.nilpotency_order
    }

    /// Exact product of rational coefficient vectors.
    pub fn mul_rational(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![q(0); self.dim()];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                let xy = x * y;
                for (k, c) in self.product_terms(i, j) {
                    out[*k] += &xy * c;
                }
            }
        }
        out
    }

    pub fn basis_rational(&self, k: usize) -> Vec<BigRational> {
        let mut v = vec![q(0); self.dim()];
        v[k] = q(1);
        v
    }

    /// Checks every algebra axiom exactly.
    pub fn verify_axioms(&self) -> VerificationReport {
        let l = self.dim();
        let c = &self.0.table;
        let mut report = VerificationReport::new(format!("axioms of {}", self.name()));

        let comm = (0..l).all(|i| (0..l).all(|j| c[i][j] == c[j][i]));
        report.push(exact_check("commutativity", comm));

        let mut assoc = true;
        'outer: for i in 0..l {
            for j in 0..l {
                for k in 0..l {
                    let left = self.mul_rational(&c[i][j], &self.basis_rational(k));
                    let right = self.mul_rational(&self.basis_rational(i), &c[j][k]);
                    if left != right {
                        assoc = false;
                        break 'outer;
                    }
                }
            }
        }
        report.push(exact_check("associativity", assoc));

        let unit = (0..l).all(|j| c[0][j] == self.basis_rational(j) && c[j][0] == self.basis_rational(j));
        report.push(exact_check("unit", unit));

        let closure = (1..l).all(|i| (1..l).all(|j| c[i][j][0].is_zero()));
        report.push(exact_check("ideal closure", closure));

        let nil = match self.0.nilpotency_order {
            Some(k) => exact_check("nilpotency", true).with_detail(format!("order {k}")),
            None => exact_check("nilpotency", false),
        };
        report.push(nil);
        report
    }
}

fn exact_check(name: &str, ok: bool) -> Check {
    Check::from_bool(name, ok).with_residual(if ok { Residual::Exact } else { Residual::None })
}

fn exponents(n: usize, budget: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == n {
        out.push(prefix.clone());
        return;
    }
    for e in 0..=budget {
        prefix.push(e);
        exponents(n, budget - e, prefix, out);
        prefix.pop();
    }
}

fn monomial_label(m: &[usize]) -> String {
    let parts: Vec<String> = m
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0)
        .map(|(i, e)| if *e == 1 { format!("X{}", i + 1) } else { format!("X{}^{e}", i + 1) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

// Powers of the ideal by repeated multiplication with rank tracking.
fn nilpotency(data: &AlgebraData) -> Option<usize> {
    let l = data.labels.len();
    let ideal: Vec<usize> = (1..l).collect();
    let mul = |a: &[BigRational], j: usize| {
        let mut out = vec![q(0); l];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (k, c) in &data.sparse[i][j] {
                out[*k] += x * c;
            }
        }
        out
    };
    let mut power: linalg::QMatrix = ideal
        .iter()
        .map(|&i| {
            let mut v = vec![q(0); l];
            v[i] = q(1);
            v
        })
        .collect();
    let mut prev_rank = power.len();
    for order in 1..=l + 1 {
        if prev_rank == 0 {
            return Some(order);
        }
        let mut next: linalg::QMatrix = Vec::new();
        for b in &power {
            for &j in &ideal {
                next.push(mul(b, j));
            }
        }
        let mut reduced = next;
        let pivots = linalg::rref(&mut reduced);
        reduced.truncate(pivots.len());
        if !reduced.is_empty() && pivots.len() >= prev_rank {
            return None;
        }
        prev_rank = reduced.len();
        power = reduced;
    }
    None
}

/// Parses `trivial`, `dual`, `jet(k)` and `truncated(n,k)`.
impl std::str::FromStr for WeilAlgebra {
    type Err = WeilError;

    fn from_str(s: &str) -> Result<Self, WeilError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || WeilError::InvalidParameter(format!("unknown algebra `{s}`; expected dual, trivial, jet(k) or truncated(n,k)"));
        let args = |prefix: &str| -> Option<Vec<usize>> {
            let inner = s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            inner.split(',').map(|t| t.parse().ok()).collect()
        };
        match s.as_str() {
            "dual" => Ok(WeilAlgebra::dual()),
            "trivial" => Ok(WeilAlgebra::trivial()),
            _ => {
                if let Some(a) = args("jet") {
                    match a[..] {
                        [k] => WeilAlgebra::jet(k),
                        _ => Err(bad()),
                    }
                } else if let Some(a) = args("truncated") {
                    match a[..] {
                        [n, k] => WeilAlgebra::truncated(n, k),
                        _ => Err(bad()),
                    }
                } else {
                    Err(bad())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_and_orders() {
        assert_eq!(WeilAlgebra::dual().dim(), 2);
        for k in 1..5 {
            let a = WeilAlgebra::jet(k).unwrap();
            assert_eq!(a.dim(), k + 1);
            assert_eq!(a.nilpotency_order(), k + 1);
        }
        assert_eq!(WeilAlgebra::truncated(2, 2).unwrap().dim(), 6);
        assert_eq!(WeilAlgebra::truncated(2, 2).unwrap().nilpotency_order(), 3);
        assert_eq!(WeilAlgebra::truncated(3, 1).unwrap().dim(), 4);
        assert_eq!(WeilAlgebra::trivial().nilpotency_order(), 1);
        assert!(WeilAlgebra::jet(0).is_err());
        assert!(matches!(WeilAlgebra::truncated(10, 10), Err(WeilError::DimensionCap { .. })));
    }

    #[test]
    fn truncated_two_one_kills_cross_term() {
        let a = WeilAlgebra::truncated(2, 1).unwrap();
        assert_eq!(a.labels(), ["1", "X1", "X2"]);
        assert!(a.product_terms(1, 2).is_empty());
        let b = WeilAlgebra::truncated(2, 2).unwrap();
        assert_eq!(b.labels(), ["1", "X1", "X2", "X1^2", "X1*X2", "X2^2"]);
    }

    #[test]
    fn truncated_one_k_is_jet() {
        let t = WeilAlgebra::truncated(1, 3).unwrap();
        let j = WeilAlgebra::jet(3).unwrap();
        assert_eq!(t.table(), j.table());
    }

    #[test]
    fn constructors_satisfy_axioms() {
        for a in [
            WeilAlgebra::dual(),
            WeilAlgebra::jet(3).unwrap(),
            WeilAlgebra::truncated(2, 2).unwrap(),
        ] {
            let r = a.verify_axioms();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn planted_defects_are_reported() {
        let j = WeilAlgebra::jet(2).unwrap();
        let mut t = j.table().clone();
        t[1][2][2] = q(1);
        let bad = WeilAlgebra::from_table_unchecked(j.labels().to_vec(), t).unwrap();
        assert_eq!(bad.verify_axioms().check("commutativity").unwrap().status, crate::report::Status::Fail);

        let mut t = j.table().clone();
        t[0][1][1] = q(2);
        let bad = WeilAlgebra::from_table_unchecked(j.labels().to_vec(), t.clone()).unwrap();
        assert!(bad.verify_axioms().failing().contains(&"unit"));
        assert!(WeilAlgebra::from_table(j.labels().to_vec(), t).is_err());
    }

    #[test]
    fn parses_specs() {
        assert_eq!("jet(2)".parse::<WeilAlgebra>().unwrap().dim(), 3);
        assert_eq!("truncated(2, 2)".parse::<WeilAlgebra>().unwrap().dim(), 6);
        assert_eq!("dual".parse::<WeilAlgebra>().unwrap().name(), "dual");
        assert!("jet(0)".parse::<WeilAlgebra>().is_err());
        assert!("poly(3)".parse::<WeilAlgebra>().is_err());
    }
}
