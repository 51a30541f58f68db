//! Tensor fields with symbolic components on a single coordinate patch, and
//! the coordinate calculus built on them.

mod connection;
mod forms;
mod map;
mod tensors;
mod vector;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{Expr, Func, SampleError};

pub use connection::{levi_civita, levi_civita_at, ChristoffelProvider, Connection, Curvature, SYMBOLIC_INVERSE_MAX_DIM};
pub use forms::KForm;
pub use map::SmoothMap;
pub use tensors::{nijenhuis, schouten_ll, Bivector, Nijenhuis, Tensor02, Tensor11, Trivector};
pub use vector::{pointwise_rank, Distribution, VectorField, RANK_TOL};

/// Metrics are symmetric (0,2)-tensors.
pub type Metric = Tensor02;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid coordinate name `{0}`")]
    InvalidCoordinate(String),
    #[error("duplicate coordinate `{0}`")]
    DuplicateCoordinate(String),
    #[error("operands live on different patches")]
    PatchMismatch,
    #[error("degree {degree} is out of range for dimension {dim}")]
    Degree { degree: usize, dim: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("metric is degenerate at a sample point")]
    DegenerateMetric,
    #[error("symbolic inverse limited to dimension {max}; use a pointwise provider")]
    TooLargeForSymbolic { max: usize },
    #[error(transparent)]
    Sample(#[from] SampleError),
}

#[derive(Debug, PartialEq, Eq)]
struct PatchData {
    coords: Vec<String>,
}

/// An open subset of ℝⁿ with named coordinates. Cheap to clone.
#[derive(Clone, PartialEq, Eq)]
pub struct Patch(Arc<PatchData>);

impl fmt::Debug for Patch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Patch({})", self.0.coords.join(", "))
    }
}

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && Func::from_name(s).is_none()
}

impl Patch {
    pub fn new<S: AsRef<str>>(coords: &[S]) -> Result<Patch, GeometryError> {
        let mut out: Vec<String> = Vec::with_capacity(coords.len());
        for c in coords {
            let c = c.as_ref();
            if !valid_identifier(c) {
                return Err(GeometryError::InvalidCoordinate(c.to_string()));
            }
            if out.iter().any(|o| o == c) {
                return Err(GeometryError::DuplicateCoordinate(c.to_string()));
            }
            out.push(c.to_string());
        }
        if out.is_empty() {
            return Err(GeometryError::Shape("a patch needs at least one coordinate".into()));
        }
        Ok(Patch(Arc::new(PatchData { coords: out })))
    }

    pub fn dim(&self) -> usize {
        self.0.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.0.coords
    }

    pub fn coord(&self, i: usize) -> &str {
        &self.0.coords[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.coords.iter().position(|c| c == name)
    }

    pub fn coord_expr(&self, i: usize) -> Expr {
        Expr::var(&self.0.coords[i])
    }

    /// `∂f/∂x^i`.
    pub fn partial(&self, f: &Expr, i: usize) -> Expr {
        f.diff(&self.0.coords[i])
    }

    /// This patch times ℝ with a new last coordinate.
    pub fn extend(&self, name: &str) -> Result<Patch, GeometryError> {
        let mut coords = self.0.coords.clone();
        coords.push(name.to_string());
        Patch::new(&coords)
    }
}

pub(crate) fn ensure_same(a: &Patch, b: &Patch) -> Result<(), GeometryError> {
    if a == b {
        Ok(())
    } else {
        Err(GeometryError::PatchMismatch)
    }
}

/// Sign of the permutation sorting `idx`, or `None` if it has repeats.
pub(crate) fn sort_with_sign(idx: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patch_validation() {
        assert_eq!(Patch::new(&["x", "y"]).unwrap().dim(), 2);
        assert!(matches!(Patch::new(&["x", "x"]), Err(GeometryError::DuplicateCoordinate(_))));
        assert!(matches!(Patch::new(&["1x"]), Err(GeometryError::InvalidCoordinate(_))));
        assert!(matches!(Patch::new(&["sin"]), Err(GeometryError::InvalidCoordinate(_))));
    }

    #[test]
    fn permutation_signs() {
        let mut a = [2, 0, 1];
        assert_eq!(sort_with_sign(&mut a), Some(1));
        assert_eq!(a, [0, 1, 2]);
        let mut b = [1, 0];
        assert_eq!(sort_with_sign(&mut b), Some(-1));
        assert_eq!(sort_with_sign(&mut [1, 1]), None);
    }
}
