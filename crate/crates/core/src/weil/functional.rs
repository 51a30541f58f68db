use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{WeilAlgebra, WeilElement, WeilError};
use crate::expr::Ring;
use crate::linalg::{self, QMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionalPreset {
    /// Projection onto the real part.
    Real,
    /// Coefficient of the last basis monomial.
    Top,
    /// Real part plus top coefficient.
    Mixed,
}

impl FunctionalPreset {
    pub const ALL: [FunctionalPreset; 3] = [FunctionalPreset::Real, FunctionalPreset::Top, FunctionalPreset::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            FunctionalPreset::Real => "real",
            FunctionalPreset::Top => "top",
            FunctionalPreset::Mixed => "mixed",
        }
    }
}

impl FromStr for FunctionalPreset {
    type Err = WeilError;

    fn from_str(s: &str) -> Result<Self, WeilError> {
        FunctionalPreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| WeilError::InvalidParameter(format!("unknown functional preset `{s}`")))
    }
}

/// A linear functional `λ` on a Weil algebra, determined by `λ(a_k)`.
#[derive(Clone, PartialEq)]
pub struct LinearFunctional {
    algebra: WeilAlgebra,
    values: Vec<BigRational>,
}

impl fmt::Debug for LinearFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "LinearFunctional({})", vals.join(", "))
    }
}

impl LinearFunctional {
    pub fn new(algebra: &WeilAlgebra, values: Vec<BigRational>) -> Result<Self, WeilError> {
        if values.len() != algebra.dim() {
            return Err(WeilError::InvalidParameter(format!(
                "functional has {} values for an algebra of dimension {}",
                values.len(),
                algebra.dim()
            )));
        }
        Ok(LinearFunctional { algebra: algebra.clone(), values })
    }

    pub fn preset(algebra: &WeilAlgebra, preset: FunctionalPreset) -> Self {
        let l = algebra.dim();
        let mut values = vec![BigRational::zero(); l];
        match preset {
            FunctionalPreset::Real => values[0] = BigRational::one(),
            FunctionalPreset::Top => values[l - 1] = BigRational::one(),
            FunctionalPreset::Mixed => {
                values[0] = BigRational::one();
                values[l - 1] = BigRational::one();
            }
        }
        LinearFunctional { algebra: algebra.clone(), values }
    }

    pub fn algebra(&self) -> &WeilAlgebra {
        &self.algebra
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// `B[k][m] = λ(a_k a_m)`.
    pub fn gram(&self) -> QMatrix {
        let l = self.algebra.dim();
        (0..l)
            .map(|k| {
                (0..l)
                    .map(|m| {
                        self.algebra
                            .product_terms(k, m)
                            .iter()
                            .map(|(s, c)| c * &self.values[*s])
                            .fold(BigRational::zero(), |a, b| a + b)
                    })
                    .collect()
            })
            .collect()
    }

    pub fn is_normalized(&self) -> bool {
        self.values[0].is_one()
    }

    pub fn is_nondegenerate(&self) -> bool {
        !linalg::det(&self.gram()).is_zero()
    }

    /// (positive, negative, zero) inertia of the Gram form.
    pub fn gram_signature(&self) -> (usize, usize, usize) {
        linalg::signature(&self.gram())
    }

    pub fn gram_inverse(&self) -> Option<QMatrix> {
        linalg::inverse(&self.gram())
    }

    /// `λ(x)` for an element with coefficients in `ring`.
    pub fn apply<R: Ring>(&self, ring: &R, x: &WeilElement<R::Elem>) -> R::Elem {
        self.apply_coeffs(ring, x.coeffs())
    }

    pub fn apply_coeffs<R: Ring>(&self, ring: &R, coeffs: &[R::Elem]) -> R::Elem {
        let mut acc = ring.zero();
        for (v, c) in self.values.iter().zip(coeffs) {
            if v.is_zero() || ring.is_zero(c) {
                continue;
            }
            let term = if v.is_one() { c.clone() } else { ring.scale(v, c).expect("rational scale") };
            acc = ring.add(&acc, &term);
        }
        acc
    }
}
