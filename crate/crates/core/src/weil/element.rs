use num_rational::BigRational;
use num_traits::One;

use super::{WeilAlgebra, WeilError};
use crate::expr::{taylor_coefficients, EvalError, Func, Ring};

/// An element `Σ c_k a_k` of a Weil algebra with coefficients in some scalar ring.
#[derive(Clone, Debug)]
pub struct WeilElement<T> {
    algebra: WeilAlgebra,
    coeffs: Vec<T>,
}

impl<T: PartialEq> PartialEq for WeilElement<T> {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra && self.coeffs == other.coeffs
    }
}

impl<T> WeilElement<T> {
    pub fn algebra(&self) -> &WeilAlgebra {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &T {
        &self.coeffs[k]
    }

    /// Coefficient on the unit.
    pub fn real_part(&self) -> &T {
        &self.coeffs[0]
    }
}

/// Per product `a_i a_j`: the nonzero `(k, c)` terms, with `None` for `c = 1`.
type ProductTable<T> = Vec<Vec<Vec<(usize, Option<T>)>>>;

/// Arithmetic in `A ⊗ R` for a Weil algebra `A` and a scalar ring `R`.
///
/// Structure constants are converted into `R` once; products skip zero
/// coefficients and multiplications by one.
pub struct WeilRing<R: Ring> {
    algebra: WeilAlgebra,
    base: R,
    table: ProductTable<R::Elem>,
}

impl<R: Ring> WeilRing<R> {
    pub fn new(algebra: &WeilAlgebra, base: R) -> Self {
        let l = algebra.dim();
        let table = (0..l)
            .map(|i| {
                (0..l)
                    .map(|j| {
                        algebra
                            .product_terms(i, j)
                            .iter()
                            .map(|(k, c)| {
                                let v = if c.is_one() {
                                    None
                                } else {
                                    Some(base.constant(c).expect("rational structure constants"))
                                };
                                (*k, v)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        WeilRing { algebra: algebra.clone(), base, table }
    }

    pub fn algebra(&self) -> &WeilAlgebra {
        &self.algebra
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn element(&self, coeffs: Vec<R::Elem>) -> Result<WeilElement<R::Elem>, WeilError> {
        if coeffs.len() != self.dim() {
            return Err(WeilError::InvalidParameter(format!(
                "{} coefficients for an algebra of dimension {}",
                coeffs.len(),
                self.dim()
            )));
        }
        Ok(WeilElement { algebra: self.algebra.clone(), coeffs })
    }

    pub fn scalar(&self, t: R::Elem) -> WeilElement<R::Elem> {
        let mut coeffs = vec![self.base.zero(); self.dim()];
        coeffs[0] = t;
        WeilElement { algebra: self.algebra.clone(), coeffs }
    }

    /// The basis element `a_k` scaled by `t`.
    pub fn basis_scaled(&self, k: usize, t: R::Elem) -> WeilElement<R::Elem> {
        let mut coeffs = vec![self.base.zero(); self.dim()];
        coeffs[k] = t;
        WeilElement { algebra: self.algebra.clone(), coeffs }
    }

    pub fn basis(&self, k: usize) -> WeilElement<R::Elem> {
        self.basis_scaled(k, self.base.one())
    }

    pub fn ideal_part(&self, x: &WeilElement<R::Elem>) -> WeilElement<R::Elem> {
        let mut y = x.clone();
        y.coeffs[0] = self.base.zero();
        y
    }

    fn is_scalar(&self, x: &WeilElement<R::Elem>) -> bool {
        x.coeffs[1..].iter().all(|c| self.base.is_zero(c))
    }

    fn same_algebra(&self, x: &WeilElement<R::Elem>) -> Result<(), WeilError> {
        if x.algebra == self.algebra {
            Ok(())
        } else {
            Err(WeilError::AlgebraMismatch)
        }
    }

    pub fn try_mul(
        &self,
        a: &WeilElement<R::Elem>,
        b: &WeilElement<R::Elem>,
    ) -> Result<WeilElement<R::Elem>, WeilError> {
        self.same_algebra(a)?;
        self.same_algebra(b)?;
        Ok(self.mul(a, b))
    }

    pub fn try_add(
        &self,
        a: &WeilElement<R::Elem>,
        b: &WeilElement<R::Elem>,
    ) -> Result<WeilElement<R::Elem>, WeilError> {
        self.same_algebra(a)?;
        self.same_algebra(b)?;
        Ok(self.add(a, b))
    }

    pub fn scale_by(&self, t: &R::Elem, x: &WeilElement<R::Elem>) -> WeilElement<R::Elem> {
        self.map(x, |c| self.base.mul(t, c))
    }

    fn map(&self, x: &WeilElement<R::Elem>, f: impl Fn(&R::Elem) -> R::Elem) -> WeilElement<R::Elem> {
        WeilElement { algebra: self.algebra.clone(), coeffs: x.coeffs.iter().map(f).collect() }
    }

    fn zip(
        &self,
        a: &WeilElement<R::Elem>,
        b: &WeilElement<R::Elem>,
        f: impl Fn(&R::Elem, &R::Elem) -> R::Elem,
    ) -> WeilElement<R::Elem> {
        debug_assert!(a.algebra == self.algebra && b.algebra == self.algebra);
        WeilElement {
            algebra: self.algebra.clone(),
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| f(x, y)).collect(),
        }
    }

    /// Multiplicative inverse by the terminating geometric series.
    pub fn invert(&self, x: &WeilElement<R::Elem>) -> Result<WeilElement<R::Elem>, WeilError> {
        let r = x.real_part();
        if self.base.is_zero(r) {
            return Err(WeilError::ZeroRealPart);
        }
        let inv_r = self.base.div(&self.base.one(), r)?;
        if self.is_scalar(x) {
            return Ok(self.scalar(inv_r));
        }
        // x = r(1 + n) so x⁻¹ = r⁻¹ Σ (-n)^m
        let minus_n = self.scale_by(&self.base.neg(&inv_r), &self.ideal_part(x));
        let mut acc = self.scalar(self.base.one());
        let mut pow = acc.clone();
        for _ in 1..self.algebra.nilpotency_order() {
            pow = self.mul(&pow, &minus_n);
            acc = self.add(&acc, &pow);
        }
        Ok(self.scale_by(&inv_r, &acc))
    }

    /// `Σ t_m (x − c·1)^m` for Taylor coefficients `t_m` around `c = real_part(x)`.
    pub fn series(&self, taylor: &[R::Elem], x: &WeilElement<R::Elem>) -> WeilElement<R::Elem> {
        let n = self.ideal_part(x);
        let mut acc = self.scalar(taylor.last().cloned().unwrap_or_else(|| self.base.zero()));
        for t in taylor.iter().rev().skip(1) {
            acc = self.mul(&acc, &n);
            acc.coeffs[0] = self.base.add(&acc.coeffs[0], t);
        }
        acc
    }

    /// Evaluates an analytic function from its derivatives `f^(m)(c)` at `c = real_part(x)`.
    pub fn apply_series(
        &self,
        derivs: &[R::Elem],
        x: &WeilElement<R::Elem>,
    ) -> Result<WeilElement<R::Elem>, WeilError> {
        let needed = self.algebra.nilpotency_order();
        if derivs.len() < needed {
            return Err(WeilError::InsufficientDerivatives { needed, got: derivs.len() });
        }
        let mut inv_fact = BigRational::one();
        let mut taylor = Vec::with_capacity(needed);
        for (m, d) in derivs.iter().take(needed).enumerate() {
            if m > 0 {
                inv_fact /= BigRational::from_integer(m.into());
            }
            taylor.push(self.base.scale(&inv_fact, d)?);
        }
        Ok(self.series(&taylor, x))
    }
}

impl<R: Ring> Ring for WeilRing<R> {
    type Elem = WeilElement<R::Elem>;

    fn constant(&self, q: &BigRational) -> Result<Self::Elem, EvalError> {
        Ok(self.scalar(self.base.constant(q)?))
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.zip(a, b, |x, y| self.base.add(x, y))
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.zip(a, b, |x, y| self.base.sub(x, y))
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.map(a, |x| self.base.neg(x))
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        debug_assert!(a.algebra == self.algebra && b.algebra == self.algebra);
        let base = &self.base;
        let mut out = vec![base.zero(); self.dim()];
        for (i, x) in a.coeffs.iter().enumerate() {
            if base.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if base.is_zero(y) {
                    continue;
                }
                let terms = &self.table[i][j];
                if terms.is_empty() {
                    continue;
                }
                let xy = base.mul(x, y);
                for (k, c) in terms {
                    let term = match c {
                        None => xy.clone(),
                        Some(c) => base.mul(c, &xy),
                    };
                    out[*k] = base.add(&out[*k], &term);
                }
            }
        }
        WeilElement { algebra: self.algebra.clone(), coeffs: out }
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, EvalError> {
        match self.invert(b) {
            Ok(inv) => Ok(self.mul(a, &inv)),
            Err(WeilError::Eval(e)) => Err(e),
            Err(_) => Err(EvalError::DivisionByNonUnit),
        }
    }

    fn apply(&self, func: Func, a: &Self::Elem) -> Result<Self::Elem, EvalError> {
        let c = a.real_part();
        if self.is_scalar(a) {
            return Ok(self.scalar(self.base.apply(func, c)?));
        }
        let order = self.algebra.nilpotency_order() - 1;
        let taylor = taylor_coefficients(&self.base, func, c, order)?;
        Ok(self.series(&taylor, a))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.coeffs.iter().all(|c| self.base.is_zero(c))
    }
}
