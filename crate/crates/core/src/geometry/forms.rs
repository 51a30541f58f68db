use std::collections::{BTreeMap, HashMap};

use super::{ensure_same, sort_with_sign, GeometryError, Patch, SmoothMap, VectorField};
use crate::expr::Expr;

/// A differential k-form `Σ_I ω_I dx^I` over strictly increasing index tuples.
/// Only structurally nonzero components are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct KForm {
    patch: Patch,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Expr>,
}

impl KForm {
    pub fn zero(patch: &Patch, degree: usize) -> Result<Self, GeometryError> {
        if degree > patch.dim() {
            return Err(GeometryError::Degree { degree, dim: patch.dim() });
        }
        Ok(KForm { patch: patch.clone(), degree, comps: BTreeMap::new() })
    }

    /// Accumulates `(indices, coefficient)` terms; indices may be unsorted.
    pub fn from_terms<I>(patch: &Patch, degree: usize, terms: I) -> Result<Self, GeometryError>
    where
        I: IntoIterator<Item = (Vec<usize>, Expr)>,
    {
        let mut out = Self::zero(patch, degree)?;
        for (idx, c) in terms {
            if idx.len() != degree || idx.iter().any(|&i| i >= patch.dim()) {
                return Err(GeometryError::Shape(format!("index tuple {idx:?} for a {degree}-form")));
            }
            out.add_term(idx, c);
        }
        Ok(out)
    }

    pub(crate) fn add_term(&mut self, mut idx: Vec<usize>, c: Expr) {
        if c.is_zero() {
            return;
        }
        let Some(sign) = sort_with_sign(&mut idx) else {
            return;
        };
        let c = if sign < 0 { c.neg() } else { c };
        let next = match self.comps.remove(&idx) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !next.is_zero() {
            self.comps.insert(idx, next);
        }
    }

    pub fn function(patch: &Patch, f: Expr) -> Self {
        Self::from_terms(patch, 0, [(vec![], f)]).expect("degree 0")
    }

    /// The coordinate 1-form `dx^i`.
    pub fn dx(patch: &Patch, i: usize) -> Self {
        Self::from_terms(patch, 1, [(vec![i], Expr::one())]).expect("valid index")
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &BTreeMap<Vec<usize>, Expr> {
        &self.comps
    }

    pub fn get(&self, idx: &[usize]) -> Expr {
        self.comps.get(idx).cloned().unwrap_or_else(Expr::zero)
    }

    /// Component on an arbitrary (possibly unsorted) tuple, with sign.
    pub fn component(&self, idx: &[usize]) -> Expr {
        let mut sorted = idx.to_vec();
        match sort_with_sign(&mut sorted) {
            None => Expr::zero(),
            Some(s) if s < 0 => self.get(&sorted).neg(),
            Some(_) => self.get(&sorted),
        }
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn add(&self, other: &KForm) -> Result<KForm, GeometryError> {
        ensure_same(&self.patch, &other.patch)?;
        if self.degree != other.degree {
            return Err(GeometryError::Shape("adding forms of different degrees".into()));
        }
        let mut out = self.clone();
        for (i, c) in &other.comps {
            out.add_term(i.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &KForm) -> Result<KForm, GeometryError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> KForm {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, f: &Expr) -> KForm {
        self.map(|c| f.mul(c))
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> KForm {
        let mut out = KForm { patch: self.patch.clone(), degree: self.degree, comps: BTreeMap::new() };
        for (i, c) in &self.comps {
            out.add_term(i.clone(), f(c));
        }
        out
    }

    pub fn substitute(&self, map: &HashMap<String, Expr>) -> KForm {
        self.map(|c| c.substitute(map))
    }

    pub fn exterior_derivative(&self) -> Result<KForm, GeometryError> {
        let n = self.patch.dim();
        let mut out = Self::zero(&self.patch, self.degree + 1)?;
        for (idx, c) in &self.comps {
            for j in 0..n {
                if idx.contains(&j) {
                    continue;
                }
                let dc = self.patch.partial(c, j);
                if dc.is_zero() {
                    continue;
                }
                let mut t = Vec::with_capacity(idx.len() + 1);
                t.push(j);
                t.extend_from_slice(idx);
                out.add_term(t, dc);
            }
        }
        Ok(out)
    }

    pub fn d(&self) -> Result<KForm, GeometryError> {
        self.exterior_derivative()
    }

    pub fn wedge(&self, other: &KForm) -> Result<KForm, GeometryError> {
        ensure_same(&self.patch, &other.patch)?;
        let mut out = Self::zero(&self.patch, self.degree + other.degree)?;
        for (i, a) in &self.comps {
            for (j, b) in &other.comps {
                if i.iter().any(|x| j.contains(x)) {
                    continue;
                }
                let mut t = i.clone();
                t.extend_from_slice(j);
                out.add_term(t, a.mul(b));
            }
        }
        Ok(out)
    }

    /// `α^k` for `k ≥ 1`.
    pub fn power(&self, k: usize) -> Result<KForm, GeometryError> {
        let mut out = self.clone();
        for _ in 1..k {
            out = out.wedge(self)?;
        }
        Ok(out)
    }

    /// `i_X ω`.
    pub fn interior(&self, x: &VectorField) -> Result<KForm, GeometryError> {
        ensure_same(&self.patch, x.patch())?;
        if self.degree == 0 {
            return Self::zero(&self.patch, 0);
        }
        let mut out = Self::zero(&self.patch, self.degree - 1)?;
        for (idx, c) in &self.comps {
            for (p, &i) in idx.iter().enumerate() {
                let xi = x.comp(i);
                if xi.is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(p);
                let term = xi.mul(c);
                out.add_term(rest, if p % 2 == 0 { term } else { term.neg() });
            }
        }
        Ok(out)
    }

    /// Lie derivative by the coordinate formula
    /// `(L_X ω) = Σ_I X(ω_I) dx^I + ω_I Σ_p dx^{i_1} ∧ … ∧ d(X^{i_p}) ∧ …`.
    pub fn lie_derivative(&self, x: &VectorField) -> Result<KForm, GeometryError> {
        ensure_same(&self.patch, x.patch())?;
        let n = self.patch.dim();
        let mut out = Self::zero(&self.patch, self.degree)?;
        for (idx, c) in &self.comps {
            out.add_term(idx.clone(), x.apply(c));
            for p in 0..idx.len() {
                let xi = x.comp(idx[p]);
                for j in 0..n {
                    let dxj = self.patch.partial(xi, j);
                    if dxj.is_zero() {
                        continue;
                    }
                    let mut t = idx.clone();
                    t[p] = j;
                    out.add_term(t, c.mul(&dxj));
                }
            }
        }
        Ok(out)
    }

    /// `φ^*ω` for `φ` from another patch into this form's patch.
    pub fn pullback(&self, phi: &SmoothMap) -> Result<KForm, GeometryError> {
        ensure_same(&self.patch, phi.target())?;
        let src = phi.source();
        let subst = phi.substitution();
        let differentials: Vec<KForm> = phi
            .comps()
            .iter()
            .map(|f| KForm::function(src, f.clone()).d())
            .collect::<Result<_, _>>()?;
        let mut out = Self::zero(src, self.degree)?;
        for (idx, c) in &self.comps {
            let mut acc = KForm::function(src, c.substitute(&subst));
            for &i in idx {
                acc = acc.wedge(&differentials[i])?;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    /// Antisymmetric component matrix of a 2-form.
    pub fn matrix(&self) -> Result<Vec<Vec<Expr>>, GeometryError> {
        if self.degree != 2 {
            return Err(GeometryError::Degree { degree: self.degree, dim: self.patch.dim() });
        }
        let n = self.patch.dim();
        let mut m = vec![vec![Expr::zero(); n]; n];
        for (idx, c) in &self.comps {
            m[idx[0]][idx[1]] = c.clone();
            m[idx[1]][idx[0]] = c.neg();
        }
        Ok(m)
    }

    /// Covector of a 1-form.
    pub fn covector(&self) -> Result<Vec<Expr>, GeometryError> {
        if self.degree != 1 {
            return Err(GeometryError::Degree { degree: self.degree, dim: self.patch.dim() });
        }
        Ok((0..self.patch.dim()).map(|i| self.get(&[i])).collect())
    }

    /// Coefficient of `dx^1 ∧ … ∧ dx^n` for a top-degree form.
    pub fn top_coefficient(&self) -> Result<Expr, GeometryError> {
        let n = self.patch.dim();
        if self.degree != n {
            return Err(GeometryError::Degree { degree: self.degree, dim: n });
        }
        Ok(self.get(&(0..n).collect::<Vec<_>>()))
    }

    /// Sets `dx^i = 0` and `x^i = 0` for coordinates outside `keep`.
    pub fn restrict_to_coordinate_subspace(&self, keep: &[usize]) -> KForm {
        let subst: HashMap<String, Expr> = (0..self.patch.dim())
            .filter(|i| !keep.contains(i))
            .map(|i| (self.patch.coord(i).to_string(), Expr::zero()))
            .collect();
        let mut out = KForm { patch: self.patch.clone(), degree: self.degree, comps: BTreeMap::new() };
        for (idx, c) in &self.comps {
            if idx.iter().all(|i| keep.contains(i)) {
                out.add_term(idx.clone(), c.substitute(&subst));
            }
        }
        out
    }

    /// Same components on a patch of the same dimension.
    pub fn on_patch(&self, patch: &Patch) -> Result<KForm, GeometryError> {
        if patch.dim() != self.patch.dim() {
            return Err(GeometryError::PatchMismatch);
        }
        Ok(KForm { patch: patch.clone(), degree: self.degree, comps: self.comps.clone() })
    }

    /// Components with indices shifted into a larger patch (for products and suspensions).
    pub fn embed(&self, patch: &Patch, index_map: impl Fn(usize) -> usize) -> Result<KForm, GeometryError> {
        KForm::from_terms(
            patch,
            self.degree,
            self.comps.iter().map(|(i, c)| (i.iter().map(|&k| index_map(k)).collect(), c.clone())),
        )
    }

    /// All coefficient expressions.
    pub fn coefficients(&self) -> Vec<Expr> {
        self.comps.values().cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::zero_check;
    use crate::expr::{parse, SamplingPolicy};

    fn r3() -> Patch {
        Patch::new(&["x", "y", "z"]).unwrap()
    }

    fn one_form(p: &Patch, c: &[&str]) -> KForm {
        KForm::from_terms(p, 1, c.iter().enumerate().map(|(i, s)| (vec![i], parse(s).unwrap()))).unwrap()
    }

    #[test]
    fn exterior_derivative_examples() {
        let p = r3();
        let x_dy = one_form(&p, &["0", "x", "0"]);
        let dxdy = KForm::dx(&p, 0).wedge(&KForm::dx(&p, 1)).unwrap();
        assert_eq!(x_dy.d().unwrap(), dxdy);
        assert_eq!(one_form(&p, &["0", "x", "1"]).d().unwrap(), dxdy);
        let f = KForm::function(&p, parse("sin(x)*y").unwrap());
        let ddf = f.d().unwrap().d().unwrap();
        assert!(zero_check("ddf", &ddf.coefficients(), &SamplingPolicy::default()).passed());
    }

    #[test]
    fn interior_and_wedge_signs() {
        let p = r3();
        let beta = one_form(&p, &["0", "x", "1"]);
        let dz = VectorField::coordinate(&p, 2);
        assert_eq!(beta.interior(&dz).unwrap().get(&[]), Expr::one());
        let dydx = KForm::dx(&p, 1).wedge(&KForm::dx(&p, 0)).unwrap();
        assert_eq!(dydx.get(&[0, 1]), Expr::int(-1));
        let dxdy = dydx.neg();
        let i = dxdy.interior(&VectorField::coordinate(&p, 1)).unwrap();
        assert_eq!(i.get(&[0]), Expr::int(-1));
    }

    #[test]
    fn pullback_of_shear() {
        let p = Patch::new(&["x", "y"]).unwrap();
        let phi = SmoothMap::parse(&p, &p, &["x", "x + y"]).unwrap();
        let area = KForm::dx(&p, 0).wedge(&KForm::dx(&p, 1)).unwrap();
        assert_eq!(area.pullback(&phi).unwrap(), area);
    }

    #[test]
    fn restriction_to_subspace() {
        let p = Patch::new(&["x", "y"]).unwrap();
        let w = KForm::from_terms(&p, 1, [(vec![0], parse("y").unwrap()), (vec![1], Expr::one())]).unwrap();
        let r = w.restrict_to_coordinate_subspace(&[0]);
        assert!(r.is_structurally_zero());
    }
}
