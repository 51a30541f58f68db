//! Prolongation of coordinate patches and the objects living on them to
//! the bundle of `A`-points.
//!
//! A patch with coordinates `x^1..x^n` lifts to `n·l` coordinates named
//! `<x^i>_<k>` for `k = 1..l`, stored at index `i·l + (k−1)`. A base function
//! `f` lifts by substituting `x^i ↦ Σ_k x^{i,k} a_k` and expanding in `A`.

mod sections;
mod tensors;

use thiserror::Error;

use crate::expr::{Env, EvalError, Evaluator, Expr, ExprRing, Ring};
use crate::geometry::{GeometryError, Patch, SmoothMap};
use crate::weil::{WeilAlgebra, WeilElement, WeilError, WeilRing};

pub use sections::{augment_contact, augment_odd, augmentation_form, suspension, SectionFamily};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiftError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Weil(#[from] WeilError),
    #[error("lift evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("objects are lifted over different patches or algebras")]
    Mismatch,
    #[error("component {0} of the base part depends on fiber coordinates")]
    NotProjectable(String),
    #[error("section is not affine in the base coordinates: {0}")]
    NonAffineSection(String),
    #[error("map is not a section of the projection: {0}")]
    NotASection(String),
    #[error("augmentation needs an odd algebra dimension, got {0}")]
    OddDimensionRequired(usize),
    #[error("no augmentation matching: {0}")]
    MatchingImpossible(String),
    #[error("functional unsuitable: {0}")]
    Functional(String),
}

/// A base patch together with its lift under a Weil algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPatch {
    base: Patch,
    algebra: WeilAlgebra,
    patch: Patch,
}

/// The `a_k`-components of a lifted function.
#[derive(Debug, Clone, PartialEq)]
pub struct AValuedFunction {
    pub coeffs: Vec<Expr>,
}

impl AValuedFunction {
    pub fn coeff(&self, k: usize) -> &Expr {
        &self.coeffs[k]
    }
}

pub fn lifted_name(base: &str, k: usize) -> String {
    format!("{base}_{}", k + 1)
}

impl LiftedPatch {
    pub fn new(base: &Patch, algebra: &WeilAlgebra) -> Result<Self, LiftError> {
        let l = algebra.dim();
        let names: Vec<String> =
            base.coords().iter().flat_map(|c| (0..l).map(move |k| lifted_name(c, k))).collect();
        let patch = Patch::new(&names)?;
        Ok(LiftedPatch { base: base.clone(), algebra: algebra.clone(), patch })
    }

    pub fn base(&self) -> &Patch {
        &self.base
    }

    pub fn algebra(&self) -> &WeilAlgebra {
        &self.algebra
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn l(&self) -> usize {
        self.algebra.dim()
    }

    pub fn n(&self) -> usize {
        self.base.dim()
    }

    pub fn index(&self, i: usize, k: usize) -> usize {
        i * self.l() + k
    }

    /// `(i, k)` for a lifted index.
    pub fn split(&self, a: usize) -> (usize, usize) {
        (a / self.l(), a % self.l())
    }

    pub fn coord_expr(&self, i: usize, k: usize) -> Expr {
        self.patch.coord_expr(self.index(i, k))
    }

    pub fn ring(&self) -> WeilRing<ExprRing> {
        WeilRing::new(&self.algebra, ExprRing)
    }

    /// Each base coordinate bound to `Σ_k x^{i,k} a_k`.
    pub(crate) fn point_env(&self, ring: &WeilRing<ExprRing>) -> Result<Env<WeilElement<Expr>>, LiftError> {
        let mut env = Env::new();
        for i in 0..self.n() {
            let coeffs = (0..self.l()).map(|k| self.coord_expr(i, k)).collect();
            env.set(self.base.coord(i), ring.element(coeffs)?);
        }
        Ok(env)
    }

    /// `f^A` as an element of `A ⊗ C^∞(lifted patch)`.
    pub fn lift_element(&self, f: &Expr) -> Result<WeilElement<Expr>, LiftError> {
        let ring = self.ring();
        let env = self.point_env(&ring)?;
        Ok(Evaluator::new(&ring, &env).eval(f)?)
    }

    /// Lifts of several functions sharing one evaluation cache.
    pub fn lift_elements(&self, fs: &[Expr]) -> Result<Vec<WeilElement<Expr>>, LiftError> {
        let ring = self.ring();
        let env = self.point_env(&ring)?;
        let mut ev = Evaluator::new(&ring, &env);
        fs.iter().map(|f| ev.eval(f).map_err(LiftError::from)).collect()
    }

    pub fn lift_function(&self, f: &Expr) -> Result<AValuedFunction, LiftError> {
        Ok(AValuedFunction { coeffs: self.lift_element(f)?.into_coeffs() })
    }

    /// Componentwise lift of a map between base patches.
    pub fn lift_map(&self, target: &LiftedPatch, phi: &SmoothMap) -> Result<SmoothMap, LiftError> {
        if phi.source() != &self.base || phi.target() != &target.base || self.algebra != target.algebra {
            return Err(LiftError::Mismatch);
        }
        let comps = self.lift_elements(phi.comps())?.into_iter().flat_map(WeilElement::into_coeffs).collect();
        Ok(SmoothMap::new(&self.patch, &target.patch, comps)?)
    }

    /// `x^{i,1} = x^i`, all other lifted coordinates zero.
    pub fn canonical_section(&self) -> SmoothMap {
        let comps = (0..self.n())
            .flat_map(|i| (0..self.l()).map(move |k| if k == 0 { self.base.coord_expr(i) } else { Expr::zero() }))
            .collect();
        SmoothMap::new(&self.base, &self.patch, comps).expect("n·l components")
    }

    /// The projection to the base, `x^i = x^{i,1}`.
    pub fn projection(&self) -> SmoothMap {
        let comps = (0..self.n()).map(|i| self.coord_expr(i, 0)).collect();
        SmoothMap::new(&self.patch, &self.base, comps).expect("n components")
    }

    /// Substitution `x^i ↦ x^{i,1}`.
    pub(crate) fn base_to_first(&self) -> std::collections::HashMap<String, Expr> {
        (0..self.n()).map(|i| (self.base.coord(i).to_string(), self.coord_expr(i, 0))).collect()
    }

    /// Substitution `x^{i,1} ↦ x^i`.
    pub(crate) fn first_to_base(&self) -> std::collections::HashMap<String, Expr> {
        (0..self.n()).map(|i| (self.patch.coord(self.index(i, 0)).to_string(), self.base.coord_expr(i))).collect()
    }

    /// True if `e` involves only the coordinates `x^{·,1}`.
    pub(crate) fn depends_only_on_base(&self, e: &Expr) -> bool {
        (0..self.n()).all(|i| (1..self.l()).all(|k| !e.depends_on(self.patch.coord(self.index(i, k)))))
    }

    /// Product `a_{k_1} ⋯ a_{k_p}` with the empty product equal to one.
    pub(crate) fn basis_product(&self, ring: &WeilRing<ExprRing>, ks: &[usize]) -> WeilElement<Expr> {
        ks.iter().fold(ring.scalar(Expr::one()), |acc, &k| ring.mul(&acc, &ring.basis(k)))
    }
}

/// All tuples in `0..l` of length `p`.
pub(crate) fn tuples(l: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..p {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..l).map(move |k| {
                    let mut u = t.clone();
                    u.push(k);
                    u
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::identity_check;
    use crate::expr::{parse, SamplingPolicy};

    fn line(alg: &WeilAlgebra) -> LiftedPatch {
        LiftedPatch::new(&Patch::new(&["x"]).unwrap(), alg).unwrap()
    }

    #[test]
    fn lifted_coordinates() {
        let p = Patch::new(&["x", "y"]).unwrap();
        let lp = LiftedPatch::new(&p, &WeilAlgebra::dual()).unwrap();
        assert_eq!(lp.patch().coords(), &["x_1", "x_2", "y_1", "y_2"]);
        let q = Patch::new(&["x", "y", "z"]).unwrap();
        assert_eq!(LiftedPatch::new(&q, &WeilAlgebra::jet(2).unwrap()).unwrap().patch().dim(), 9);
        assert_eq!(LiftedPatch::new(&q, &WeilAlgebra::trivial()).unwrap().patch().dim(), 3);
    }

    #[test]
    fn function_lifts() {
        let lp = line(&WeilAlgebra::dual());
        let sq = lp.lift_function(&parse("x^2").unwrap()).unwrap();
        let pol = SamplingPolicy::default();
        let want = [parse("x_1^2").unwrap(), parse("2*x_1*x_2").unwrap()];
        assert!(identity_check("x^2", &sq.coeffs.iter().cloned().zip(want).collect::<Vec<_>>(), &pol).passed());
        let s = lp.lift_function(&parse("sin(x)").unwrap()).unwrap();
        let want = [parse("sin(x_1)").unwrap(), parse("x_2*cos(x_1)").unwrap()];
        assert!(identity_check("sin", &s.coeffs.iter().cloned().zip(want).collect::<Vec<_>>(), &pol).passed());
        let j = line(&WeilAlgebra::jet(3).unwrap());
        let x = j.lift_function(&parse("x").unwrap()).unwrap();
        assert_eq!(x.coeffs, ["x_1", "x_2", "x_3", "x_4"].map(Expr::var));
    }

    #[test]
    fn map_lift_is_functorial() {
        let p = Patch::new(&["x", "y"]).unwrap();
        let lp = LiftedPatch::new(&p, &WeilAlgebra::jet(2).unwrap()).unwrap();
        let phi = SmoothMap::parse(&p, &p, &["x*y", "sin(x) + y"]).unwrap();
        let psi = SmoothMap::parse(&p, &p, &["x + y^2", "exp(y)"]).unwrap();
        let lhs = lp.lift_map(&lp, &phi.compose(&psi).unwrap()).unwrap();
        let rhs = lp.lift_map(&lp, &phi).unwrap().compose(&lp.lift_map(&lp, &psi).unwrap()).unwrap();
        let pairs: Vec<_> = lhs.comps().iter().cloned().zip(rhs.comps().iter().cloned()).collect();
        assert!(identity_check("functorial", &pairs, &SamplingPolicy::default()).passed());
        let id = lp.lift_map(&lp, &SmoothMap::identity(&p)).unwrap();
        assert_eq!(id, SmoothMap::identity(lp.patch()));
    }

    #[test]
    fn tuples_enumerate() {
        assert_eq!(tuples(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(tuples(3, 0), vec![Vec::<usize>::new()]);
    }
}
