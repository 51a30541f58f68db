use std::ops::RangeInclusive;

use super::{ensure_same, GeometryError, Patch};
use crate::checks::sample_values_over;
use crate::expr::{parse, Expr, ParseError, SampleError, SamplingPolicy};
use crate::linalg::rank_f64;

/// Relative singular-value threshold for numerical ranks.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    patch: Patch,
    comps: Vec<Expr>,
}

impl VectorField {
    pub fn new(patch: &Patch, comps: Vec<Expr>) -> Result<Self, GeometryError> {
        if comps.len() != patch.dim() {
            return Err(GeometryError::Shape(format!(
                "vector field with {} components on a {}-dimensional patch",
                comps.len(),
                patch.dim()
            )));
        }
        Ok(VectorField { patch: patch.clone(), comps })
    }

    pub fn parse(patch: &Patch, comps: &[&str]) -> Result<Self, ParseError> {
        let comps = comps.iter().map(|s| parse(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(patch, comps).expect("component count checked by caller"))
    }

    pub fn zero(patch: &Patch) -> Self {
        VectorField { patch: patch.clone(), comps: vec![Expr::zero(); patch.dim()] }
    }

    /// The coordinate field `∂/∂x^i`.
    pub fn coordinate(patch: &Patch, i: usize) -> Self {
        let mut v = Self::zero(patch);
        v.comps[i] = Expr::one();
        v
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn comps(&self) -> &[Expr] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &Expr {
        &self.comps[i]
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let terms: Vec<Expr> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| c.mul(&self.patch.partial(f, i)))
            .collect();
        Expr::sum(&terms)
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField, GeometryError> {
        ensure_same(&self.patch, &other.patch)?;
        Ok(self.zip(other, Expr::add))
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField, GeometryError> {
        ensure_same(&self.patch, &other.patch)?;
        Ok(self.zip(other, Expr::sub))
    }

    fn zip(&self, other: &VectorField, f: impl Fn(&Expr, &Expr) -> Expr) -> VectorField {
        VectorField {
            patch: self.patch.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, f: &Expr) -> VectorField {
        VectorField { patch: self.patch.clone(), comps: self.comps.iter().map(|c| f.mul(c)).collect() }
    }

    /// `[X, Y]^i = X(Y^i) − Y(X^i)`.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField, GeometryError> {
        ensure_same(&self.patch, &other.patch)?;
        let comps = (0..self.patch.dim())
            .map(|i| self.apply(&other.comps[i]).sub(&other.apply(&self.comps[i])))
            .collect();
        Ok(VectorField { patch: self.patch.clone(), comps })
    }

    pub fn lie_derivative(&self, other: &VectorField) -> Result<VectorField, GeometryError> {
        self.bracket(other)
    }

    pub fn substitute(&self, map: &std::collections::HashMap<String, Expr>) -> VectorField {
        VectorField { patch: self.patch.clone(), comps: self.comps.iter().map(|c| c.substitute(map)).collect() }
    }

    /// Same components read on another patch with the same dimension.
    pub fn on_patch(&self, patch: &Patch) -> Result<VectorField, GeometryError> {
        VectorField::new(patch, self.comps.clone())
    }
}

/// Minimum and maximum rank of the matrix with the given rows over sample points.
pub fn pointwise_rank(
    rows: &[Vec<Expr>],
    patch: &Patch,
    policy: &SamplingPolicy,
) -> Result<RangeInclusive<usize>, SampleError> {
    if rows.is_empty() {
        return Ok(0..=0);
    }
    let cols = rows[0].len();
    let flat: Vec<Expr> = rows.iter().flatten().cloned().collect();
    let values = sample_values_over(patch.coords(), &flat, policy)?;
    let (mut lo, mut hi) = (usize::MAX, 0);
    for v in values {
        let m: Vec<Vec<f64>> = v.chunks(cols).map(<[f64]>::to_vec).collect();
        let r = rank_f64(&m, RANK_TOL);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(lo..=hi)
}

/// A distribution spanned by generator fields, with its expected rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    patch: Patch,
    generators: Vec<VectorField>,
    rank: usize,
}

impl Distribution {
    pub fn new(patch: &Patch, generators: Vec<VectorField>, rank: usize) -> Result<Self, GeometryError> {
        if generators.len() < rank {
            return Err(GeometryError::Shape(format!("{} generators for rank {rank}", generators.len())));
        }
        for g in &generators {
            ensure_same(patch, g.patch())?;
        }
        Ok(Distribution { patch: patch.clone(), generators, rank })
    }

    /// Rank taken to be the number of generators.
    pub fn spanned_by(patch: &Patch, generators: Vec<VectorField>) -> Result<Self, GeometryError> {
        let r = generators.len();
        Self::new(patch, generators, r)
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn generators(&self) -> &[VectorField] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rows(&self) -> Vec<Vec<Expr>> {
        self.generators.iter().map(|g| g.comps().to_vec()).collect()
    }

    pub fn pointwise_rank(&self, policy: &SamplingPolicy) -> Result<RangeInclusive<usize>, SampleError> {
        pointwise_rank(&self.rows(), &self.patch, policy)
    }

    /// Generators together with all brackets of length up to `depth`.
    pub fn bracket_span(&self, depth: usize) -> Vec<VectorField> {
        let mut all = self.generators.clone();
        let mut layer = self.generators.clone();
        for _ in 1..depth {
            let mut next = Vec::new();
            for a in &self.generators {
                for b in &layer {
                    let c = a.bracket(b).expect("same patch");
                    if c.comps().iter().any(|e| !e.is_zero()) {
                        next.push(c);
                    }
                }
            }
            all.extend(next.iter().cloned());
            layer = next;
        }
        all
    }
}
