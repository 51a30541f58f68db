use std::collections::HashMap;

use super::{ensure_same, GeometryError, Patch};
use crate::expr::{parse, Expr, ParseError};

/// A map between patches given by target coordinates as expressions in source coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothMap {
    source: Patch,
    target: Patch,
    comps: Vec<Expr>,
}

impl SmoothMap {
    pub fn new(source: &Patch, target: &Patch, comps: Vec<Expr>) -> Result<Self, GeometryError> {
        if comps.len() != target.dim() {
            return Err(GeometryError::Shape(format!(
                "map with {} components into a {}-dimensional patch",
                comps.len(),
                target.dim()
            )));
        }
        Ok(SmoothMap { source: source.clone(), target: target.clone(), comps })
    }

    pub fn parse(source: &Patch, target: &Patch, comps: &[&str]) -> Result<Self, ParseError> {
        let comps = comps.iter().map(|s| parse(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(source, target, comps).expect("component count checked by caller"))
    }

    pub fn identity(patch: &Patch) -> Self {
        let comps = (0..patch.dim()).map(|i| patch.coord_expr(i)).collect();
        SmoothMap { source: patch.clone(), target: patch.clone(), comps }
    }

    pub fn source(&self) -> &Patch {
        &self.source
    }

    pub fn target(&self) -> &Patch {
        &self.target
    }

    pub fn comps(&self) -> &[Expr] {
        &self.comps
    }

    /// Target coordinate name to component expression.
    pub fn substitution(&self) -> HashMap<String, Expr> {
        self.target.coords().iter().cloned().zip(self.comps.iter().cloned()).collect()
    }

    /// `f ∘ φ` for a function `f` on the target.
    pub fn pull_function(&self, f: &Expr) -> Expr {
        f.substitute(&self.substitution())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SmoothMap) -> Result<SmoothMap, GeometryError> {
        ensure_same(&self.source, &inner.target)?;
        let s = inner.substitution();
        Ok(SmoothMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            comps: self.comps.iter().map(|c| c.substitute(&s)).collect(),
        })
    }

    /// `J[a][i] = ∂φ^a / ∂x^i`.
    pub fn jacobian(&self) -> Vec<Vec<Expr>> {
        self.comps
            .iter()
            .map(|c| (0..self.source.dim()).map(|i| self.source.partial(c, i)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_and_jacobian() {
        let p = Patch::new(&["x", "y"]).unwrap();
        let f = SmoothMap::parse(&p, &p, &["x + y", "y"]).unwrap();
        let g = SmoothMap::parse(&p, &p, &["x^2", "y"]).unwrap();
        let fg = f.compose(&g).unwrap();
        assert_eq!(fg.comps()[0].to_string(), "x^2 + y");
        let j = g.jacobian();
        assert_eq!(j[0][0].to_string(), "2*x");
        assert!(j[0][1].is_zero());
    }
}
