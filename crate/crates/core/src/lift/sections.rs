use super::{LiftError, LiftedPatch};
use crate::expr::Expr;
use crate::geometry::{ensure_same, Bivector, Distribution, KForm, Patch, SmoothMap, VectorField};
use crate::weil::LinearFunctional;

/// Sections `S_1 = α, S_2, …, S_l` of the projection, all affine in the base coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionFamily {
    lifted: LiftedPatch,
    sections: Vec<SmoothMap>,
    jacobians: Vec<Vec<Vec<Expr>>>,
}

impl SectionFamily {
    /// Validates the section property and affineness.
    pub fn new(lifted: &LiftedPatch, sections: Vec<SmoothMap>) -> Result<Self, LiftError> {
        let mut jacobians = Vec::with_capacity(sections.len());
        for (j, s) in sections.iter().enumerate() {
            if s.source() != lifted.base() || s.target() != lifted.patch() {
                return Err(LiftError::Mismatch);
            }
            for i in 0..lifted.n() {
                let first = &s.comps()[lifted.index(i, 0)];
                if first != &lifted.base().coord_expr(i) {
                    return Err(LiftError::NotASection(format!("S_{} sets {} = {first}", j + 1, lifted.patch().coord(lifted.index(i, 0)))));
                }
            }
            let jac = s.jacobian();
            if let Some(bad) = jac.iter().flatten().find(|e| e.as_const().is_none()) {
                return Err(LiftError::NonAffineSection(format!("S_{} has Jacobian entry {bad}", j + 1)));
            }
            jacobians.push(jac);
        }
        if sections.is_empty() {
            return Err(LiftError::NotASection("empty section family".into()));
        }
        Ok(SectionFamily { lifted: lifted.clone(), sections, jacobians })
    }

    /// `S_1 = α`; `S_j` sets `x^{i,1} = x^{i,j} = x^i` and the rest to zero.
    pub fn basis(lifted: &LiftedPatch) -> Self {
        let mut sections = vec![lifted.canonical_section()];
        for j in 1..lifted.l() {
            let comps = (0..lifted.n())
                .flat_map(|i| {
                    (0..lifted.l()).map(move |k| {
                        if k == 0 || k == j {
                            lifted.base().coord_expr(i)
                        } else {
                            Expr::zero()
                        }
                    })
                })
                .collect();
            sections.push(SmoothMap::new(lifted.base(), lifted.patch(), comps).expect("n·l components"));
        }
        Self::new(lifted, sections).expect("basis sections are affine sections")
    }

    pub fn sections(&self) -> &[SmoothMap] {
        &self.sections
    }

    /// `(S_j)_* X`, extended to be constant along the fibers.
    pub fn pushforward(&self, j: usize, x: &VectorField) -> Result<VectorField, LiftError> {
        let lp = &self.lifted;
        ensure_same(lp.base(), x.patch())?;
        let subst = lp.base_to_first();
        let moved: Vec<Expr> = x.comps().iter().map(|c| c.substitute(&subst)).collect();
        let comps = self.jacobians[j]
            .iter()
            .map(|row| {
                let terms: Vec<Expr> =
                    row.iter().zip(&moved).filter(|(r, _)| !r.is_zero()).map(|(r, c)| r.mul(c)).collect();
                Expr::sum(&terms)
            })
            .collect();
        Ok(VectorField::new(lp.patch(), comps)?)
    }

    /// `(1/m) Σ_j (S_j)_* X` over the `m` sections.
    pub fn averaged_lift_vector(&self, x: &VectorField) -> Result<VectorField, LiftError> {
        let mut acc = VectorField::zero(self.lifted.patch());
        for j in 0..self.sections.len() {
            acc = acc.add(&self.pushforward(j, x)?)?;
        }
        Ok(acc.scale(&Expr::ratio(1, self.sections.len() as i64)))
    }

    /// `(1/m) Σ_j J_j Λ J_jᵀ`, fiber-constant.
    pub fn averaged_lift_bivector(&self, lambda: &Bivector) -> Result<Bivector, LiftError> {
        let lp = &self.lifted;
        ensure_same(lp.base(), lambda.patch())?;
        let subst = lp.base_to_first();
        let moved = lambda.map(|c| c.substitute(&subst));
        let (dim, n) = (lp.patch().dim(), lp.n());
        let mut acc = Bivector::zero(lp.patch());
        for jac in &self.jacobians {
            let mut comps = vec![vec![Expr::zero(); dim]; dim];
            for (a, row) in comps.iter_mut().enumerate() {
                for (b, slot) in row.iter_mut().enumerate() {
                    let mut terms = Vec::new();
                    for p in 0..n {
                        if jac[a][p].is_zero() {
                            continue;
                        }
                        for q in 0..n {
                            let c = moved.get(p, q);
                            if !jac[b][q].is_zero() && !c.is_zero() {
                                terms.push(jac[a][p].mul(c).mul(&jac[b][q]));
                            }
                        }
                    }
                    *slot = Expr::sum(&terms);
                }
            }
            acc = acc.add(&Bivector::new(lp.patch(), comps)?)?;
        }
        let m = Expr::ratio(1, self.sections.len() as i64);
        Ok(acc.map(|c| m.mul(c)))
    }
}

impl LiftedPatch {
    pub fn basis_sections(&self) -> SectionFamily {
        SectionFamily::basis(self)
    }

    /// `π^*ω`: `x^i ↦ x^{i,1}`, `dx^i ↦ dx^{i,1}`.
    pub fn pullback_projection(&self, omega: &KForm) -> Result<KForm, LiftError> {
        ensure_same(self.base(), omega.patch())?;
        let subst = self.base_to_first();
        Ok(omega.embed(self.patch(), |i| self.index(i, 0))?.substitute(&subst))
    }

    /// `π_* V` for a projectable field `V`.
    pub fn projection_pushforward(&self, v: &VectorField) -> Result<VectorField, LiftError> {
        ensure_same(self.patch(), v.patch())?;
        let back = self.first_to_base();
        let comps = (0..self.n())
            .map(|i| {
                let c = v.comp(self.index(i, 0));
                if self.depends_only_on_base(c) {
                    Ok(c.substitute(&back))
                } else {
                    Err(LiftError::NotProjectable(self.patch().coord(self.index(i, 0)).to_string()))
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(VectorField::new(self.base(), comps)?)
    }

    /// Lift of the coordinate subspace `{x^i = 0 : i ∉ keep}`.
    pub fn lift_submanifold(&self, keep: &[usize]) -> Result<Distribution, LiftError> {
        let mut gens = Vec::new();
        for &i in keep {
            if i >= self.n() {
                return Err(LiftError::Geometry(crate::geometry::GeometryError::Shape(format!("coordinate index {i}"))));
            }
            for k in 0..self.l() {
                gens.push(VectorField::coordinate(self.patch(), self.index(i, k)));
            }
        }
        Ok(Distribution::spanned_by(self.patch(), gens)?)
    }

    /// Lifted indices of the subspace produced by [`Self::lift_submanifold`].
    pub fn submanifold_indices(&self, keep: &[usize]) -> Vec<usize> {
        keep.iter().flat_map(|&i| (0..self.l()).map(move |k| self.index(i, k))).collect()
    }
}

fn augmentation_pairs(lp: &LiftedPatch, z: usize, lambda: &LinearFunctional) -> Result<Vec<(usize, usize)>, LiftError> {
    let l = lp.l();
    if l.is_multiple_of(2) {
        return Err(LiftError::OddDimensionRequired(l));
    }
    if z >= lp.n() {
        return Err(LiftError::MatchingImpossible(format!("no base coordinate with index {z}")));
    }
    if lambda.algebra() != lp.algebra() {
        return Err(LiftError::Mismatch);
    }
    if !lambda.is_nondegenerate() || !lambda.is_normalized() {
        return Err(LiftError::Functional(format!(
            "augmentation needs a nondegenerate functional with λ(1) = 1, got {lambda:?}"
        )));
    }
    Ok((1..l).step_by(2).map(|k| (lp.index(z, k), lp.index(z, k + 1))).collect())
}

/// `σ = Σ dz_k ∧ dz_{k+1}` over `k = 2, 4, …, l − 1`.
pub fn augmentation_form(lp: &LiftedPatch, z: usize, lambda: &LinearFunctional) -> Result<KForm, LiftError> {
    let pairs = augmentation_pairs(lp, z, lambda)?;
    Ok(KForm::from_terms(lp.patch(), 2, pairs.into_iter().map(|(a, b)| (vec![a, b], Expr::one())))?)
}

/// Adds `σ` to a lifted 2-form so the pair with the lifted 1-form becomes maximally nondegenerate.
pub fn augment_odd(lp: &LiftedPatch, omega: &KForm, z: usize, lambda: &LinearFunctional) -> Result<KForm, LiftError> {
    ensure_same(lp.patch(), omega.patch())?;
    if omega.degree() != 2 {
        return Err(LiftError::Geometry(crate::geometry::GeometryError::Degree { degree: omega.degree(), dim: 2 }));
    }
    Ok(omega.add(&augmentation_form(lp, z, lambda)?)?)
}

/// Adds `τ = Σ z_k dz_{k+1}` (so `dτ = σ`) to a lifted contact form.
pub fn augment_contact(lp: &LiftedPatch, beta: &KForm, z: usize, lambda: &LinearFunctional) -> Result<KForm, LiftError> {
    ensure_same(lp.patch(), beta.patch())?;
    if beta.degree() != 1 {
        return Err(LiftError::Geometry(crate::geometry::GeometryError::Degree { degree: beta.degree(), dim: 1 }));
    }
    let pairs = augmentation_pairs(lp, z, lambda)?;
    let tau = KForm::from_terms(lp.patch(), 1, pairs.into_iter().map(|(a, b)| (vec![b], lp.patch().coord_expr(a))))?;
    Ok(beta.add(&tau)?)
}

/// `p^*ω + p^*η ∧ du` on the patch extended by `u`.
pub fn suspension(omega: &KForm, eta: &KForm, u: &str) -> Result<(Patch, KForm), LiftError> {
    ensure_same(omega.patch(), eta.patch())?;
    let p = omega.patch();
    if omega.degree() != 2 || eta.degree() != 1 {
        return Err(LiftError::Geometry(crate::geometry::GeometryError::Shape(
            "suspension takes a 2-form and a 1-form".into(),
        )));
    }
    let ext = p.extend(u)?;
    let n = p.dim();
    let w = omega.embed(&ext, |i| i)?;
    let e = eta.embed(&ext, |i| i)?;
    Ok((ext.clone(), w.add(&e.wedge(&KForm::dx(&ext, n))?)?))
}
