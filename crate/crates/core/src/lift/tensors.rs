use super::{tuples, LiftError, LiftedPatch};
use crate::expr::{Expr, Ring};
use crate::geometry::{ensure_same, Bivector, Connection, KForm, Tensor02, Tensor11, VectorField};
use crate::weil::{LinearFunctional, WeilElement};

type Matrix = Vec<Vec<Expr>>;

impl LiftedPatch {
    fn check_functional(&self, lambda: &LinearFunctional) -> Result<(), LiftError> {
        if lambda.algebra() != self.algebra() {
            return Err(LiftError::Mismatch);
        }
        Ok(())
    }

    fn lift_matrix(&self, m: &Matrix) -> Result<Vec<Vec<WeilElement<Expr>>>, LiftError> {
        let flat: Vec<Expr> = m.iter().flatten().cloned().collect();
        let lifted = self.lift_elements(&flat)?;
        let cols = m.first().map_or(0, Vec::len);
        Ok(lifted.chunks(cols.max(1)).map(<[_]>::to_vec).collect())
    }

    /// `X^A = Σ_{i,k} [(X^i)^A]_k ∂/∂x^{i,k}`.
    pub fn lift_vector_field(&self, x: &VectorField) -> Result<VectorField, LiftError> {
        ensure_same(self.base(), x.patch())?;
        let comps = self.lift_elements(x.comps())?.into_iter().flat_map(WeilElement::into_coeffs).collect();
        Ok(VectorField::new(self.patch(), comps)?)
    }

    /// The `A`-valued lift as its `a_s`-components.
    ///
    /// Each `dx^i` becomes `Σ_k a_k dx^{i,k}`; the coefficient of
    /// `dx^{(i_1,k_1)} ∧ ⋯` is `ω_I^A · a_{k_1} ⋯ a_{k_p}`.
    pub fn lift_form_valued(&self, omega: &KForm) -> Result<Vec<KForm>, LiftError> {
        ensure_same(self.base(), omega.patch())?;
        let (l, p) = (self.l(), omega.degree());
        let ring = self.ring();
        let ks = tuples(l, p);
        let products: Vec<WeilElement<Expr>> = ks.iter().map(|t| self.basis_product(&ring, t)).collect();
        let (idx, coeffs): (Vec<&Vec<usize>>, Vec<Expr>) =
            omega.components().iter().map(|(i, c)| (i, c.clone())).unzip();
        let lifted = self.lift_elements(&coeffs)?;
        let mut out = vec![KForm::zero(self.patch(), p)?; l];
        for (base_idx, c) in idx.iter().zip(&lifted) {
            for (t, prod) in ks.iter().zip(&products) {
                if prod.coeffs().iter().all(Expr::is_zero) {
                    continue;
                }
                let e = ring.mul(c, prod);
                let lifted_idx: Vec<usize> = base_idx.iter().zip(t).map(|(&i, &k)| self.index(i, k)).collect();
                for (s, cs) in e.coeffs().iter().enumerate() {
                    out[s].add_term(lifted_idx.clone(), cs.clone());
                }
            }
        }
        Ok(out)
    }

    /// Wedge of `A`-valued forms given by components.
    pub fn wedge_valued(&self, a: &[KForm], b: &[KForm]) -> Result<Vec<KForm>, LiftError> {
        let l = self.l();
        if a.len() != l || b.len() != l {
            return Err(LiftError::Mismatch);
        }
        let degree = a[0].degree() + b[0].degree();
        let mut out = vec![KForm::zero(self.patch(), degree)?; l];
        for (p, ap) in a.iter().enumerate() {
            for (q, bq) in b.iter().enumerate() {
                let terms = self.algebra().product_terms(p, q);
                if terms.is_empty() || ap.is_structurally_zero() || bq.is_structurally_zero() {
                    continue;
                }
                let w = ap.wedge(bq)?;
                for (s, c) in terms {
                    out[*s] = out[*s].add(&w.scale(&Expr::constant(c.clone())))?;
                }
            }
        }
        Ok(out)
    }

    /// `λ` applied to `A`-valued components.
    pub fn apply_functional(&self, lambda: &LinearFunctional, valued: &[KForm]) -> Result<KForm, LiftError> {
        self.check_functional(lambda)?;
        let mut out = KForm::zero(self.patch(), valued.first().map_or(0, KForm::degree))?;
        for (v, f) in lambda.values().iter().zip(valued) {
            if !v.is_zero_ratio() {
                out = out.add(&f.scale(&Expr::constant(v.clone())))?;
            }
        }
        Ok(out)
    }

    /// Real-valued lift `λ ∘ ω^A`.
    pub fn lift_form(&self, omega: &KForm, lambda: &LinearFunctional) -> Result<KForm, LiftError> {
        self.check_functional(lambda)?;
        let valued = self.lift_form_valued(omega)?;
        self.apply_functional(lambda, &valued)
    }

    /// `g^λ_{(i,k),(j,m)} = λ(g_ij^A a_k a_m)`.
    pub fn lift_metric(&self, g: &Tensor02, lambda: &LinearFunctional) -> Result<Tensor02, LiftError> {
        ensure_same(self.base(), g.patch())?;
        self.check_functional(lambda)?;
        let ring = self.ring();
        let lifted = self.lift_matrix(g.comps())?;
        let pair_products: Vec<Vec<WeilElement<Expr>>> =
            (0..self.l()).map(|k| (0..self.l()).map(|m| self.basis_product(&ring, &[k, m])).collect()).collect();
        let dim = self.patch().dim();
        let mut comps = vec![vec![Expr::zero(); dim]; dim];
        for a in 0..dim {
            let (i, k) = self.split(a);
            for b in 0..dim {
                let (j, m) = self.split(b);
                let e = ring.mul(&lifted[i][j], &pair_products[k][m]);
                comps[a][b] = lambda.apply(ring.base(), &e);
            }
        }
        Ok(Tensor02::new(self.patch(), comps)?)
    }

    /// `J^A_{(i,s),(j,m)} = [J^A_ij a_m]_s`, so that `J^A X^A = (JX)^A`.
    pub fn lift_tensor11(&self, t: &Tensor11) -> Result<Tensor11, LiftError> {
        ensure_same(self.base(), t.patch())?;
        let ring = self.ring();
        let lifted = self.lift_matrix(t.comps())?;
        let dim = self.patch().dim();
        let mut comps = vec![vec![Expr::zero(); dim]; dim];
        for b in 0..dim {
            let (j, m) = self.split(b);
            for i in 0..self.n() {
                let e = ring.mul(&lifted[i][j], &ring.basis(m));
                for (s, c) in e.into_coeffs().into_iter().enumerate() {
                    comps[self.index(i, s)][b] = c;
                }
            }
        }
        Ok(Tensor11::new(self.patch(), comps)?)
    }

    /// `Λ^λ_{(i,k),(j,m)} = Σ_s [Λ^A_ij a_s]_k (B_λ^{-1})_{sm}`.
    ///
    /// For `Λ = ω^{-1}` this is the inverse of the matrix of `lift_form(ω, λ)`.
    pub fn lift_bivector(&self, lambda_bv: &Bivector, lambda: &LinearFunctional) -> Result<Bivector, LiftError> {
        ensure_same(self.base(), lambda_bv.patch())?;
        self.check_functional(lambda)?;
        let binv = lambda
            .gram_inverse()
            .ok_or_else(|| LiftError::Functional("bivector lift needs a nondegenerate Gram form".into()))?;
        let ring = self.ring();
        let l = self.l();
        let lifted = self.lift_matrix(lambda_bv.comps())?;
        let dim = self.patch().dim();
        let mut comps = vec![vec![Expr::zero(); dim]; dim];
        for i in 0..self.n() {
            for j in 0..self.n() {
                let columns: Vec<Vec<Expr>> =
                    (0..l).map(|s| ring.mul(&lifted[i][j], &ring.basis(s)).into_coeffs()).collect();
                for k in 0..l {
                    for m in 0..l {
                        let terms: Vec<Expr> = (0..l)
                            .filter(|&s| !binv[s][m].is_zero_ratio() && !columns[s][k].is_zero())
                            .map(|s| columns[s][k].mul(&Expr::constant(binv[s][m].clone())))
                            .collect();
                        comps[self.index(i, k)][self.index(j, m)] = Expr::sum(&terms);
                    }
                }
            }
        }
        Ok(Bivector::new(self.patch(), comps)?)
    }

    /// `Γ^{(r,s)}_{(i,k),(j,m)} = [Γ^{r,A}_{ij} a_k a_m]_s`.
    pub fn lift_connection(&self, conn: &Connection) -> Result<Connection, LiftError> {
        ensure_same(self.base(), conn.patch())?;
        let ring = self.ring();
        let n = self.n();
        let flat: Vec<Expr> = conn.entries();
        let lifted = self.lift_elements(&flat)?;
        let at = |r: usize, i: usize, j: usize| &lifted[(r * n + i) * n + j];
        let dim = self.patch().dim();
        let mut gamma = vec![vec![vec![Expr::zero(); dim]; dim]; dim];
        for a in 0..dim {
            let (i, k) = self.split(a);
            for b in 0..dim {
                let (j, m) = self.split(b);
                let prod = self.basis_product(&ring, &[k, m]);
                if prod.coeffs().iter().all(Expr::is_zero) {
                    continue;
                }
                for r in 0..n {
                    let e = ring.mul(at(r, i, j), &prod);
                    for (s, c) in e.into_coeffs().into_iter().enumerate() {
                        gamma[self.index(r, s)][a][b] = c;
                    }
                }
            }
        }
        Ok(Connection::new(self.patch(), gamma)?)
    }
}

trait RatioExt {
    fn is_zero_ratio(&self) -> bool;
}

impl RatioExt for num_rational::BigRational {
    fn is_zero_ratio(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::{identity_check, zero_check};
    use crate::expr::{parse, SamplingPolicy};
    use crate::geometry::{levi_civita, Patch};
    use crate::weil::{FunctionalPreset, WeilAlgebra};

    fn pol() -> SamplingPolicy {
        SamplingPolicy::default()
    }

    fn pairs(a: Vec<Expr>, b: Vec<Expr>) -> Vec<(Expr, Expr)> {
        assert_eq!(a.len(), b.len());
        a.into_iter().zip(b).collect()
    }

    fn r2() -> Patch {
        Patch::new(&["x", "y"]).unwrap()
    }

    #[test]
    fn vector_lift_examples() {
        let p = Patch::new(&["x"]).unwrap();
        let lp = LiftedPatch::new(&p, &WeilAlgebra::dual()).unwrap();
        let dx = lp.lift_vector_field(&VectorField::coordinate(&p, 0)).unwrap();
        assert_eq!(dx.comps(), &[Expr::one(), Expr::zero()]);
        let euler = lp.lift_vector_field(&VectorField::parse(&p, &["x"]).unwrap()).unwrap();
        assert_eq!(euler.comps(), &[Expr::var("x_1"), Expr::var("x_2")]);
    }

    #[test]
    fn bracket_and_module_laws() {
        let p = r2();
        let lp = LiftedPatch::new(&p, &WeilAlgebra::truncated(2, 2).unwrap()).unwrap();
        let x = VectorField::parse(&p, &["x*y", "sin(x)"]).unwrap();
        let y = VectorField::parse(&p, &["y^2", "x + 1"]).unwrap();
        let (xa, ya) = (lp.lift_vector_field(&x).unwrap(), lp.lift_vector_field(&y).unwrap());
        let lhs = xa.bracket(&ya).unwrap();
        let rhs = lp.lift_vector_field(&x.bracket(&y).unwrap()).unwrap();
        assert!(identity_check("bracket", &pairs(lhs.comps().to_vec(), rhs.comps().to_vec()), &pol()).passed());
        let f = parse("exp(x)*y").unwrap();
        let fa = lp.lift_function(&f).unwrap();
        let xf = lp.lift_function(&x.apply(&f)).unwrap();
        let applied: Vec<Expr> = fa.coeffs.iter().map(|c| xa.apply(c)).collect();
        assert!(identity_check("module", &pairs(applied, xf.coeffs), &pol()).passed());
    }

    #[test]
    fn form_lift_examples() {
        let p = r2();
        let lp = LiftedPatch::new(&p, &WeilAlgebra::dual()).unwrap();
        let w = KForm::dx(&p, 0).wedge(&KForm::dx(&p, 1)).unwrap();
        let real = LinearFunctional::preset(lp.algebra(), FunctionalPreset::Real);
        let top = LinearFunctional::preset(lp.algebra(), FunctionalPreset::Top);
        let wr = lp.lift_form(&w, &real).unwrap();
        assert_eq!(wr.components().len(), 1);
        assert_eq!(wr.get(&[0, 2]), Expr::one());
        let wt = lp.lift_form(&w, &top).unwrap();
        assert_eq!(wt.get(&[0, 3]), Expr::one());
        assert_eq!(wt.get(&[1, 2]), Expr::one());
        assert_eq!(wt.components().len(), 2);
        let f = KForm::function(&p, parse("x*y").unwrap());
        let ft = lp.lift_form(&f, &top).unwrap();
        assert!(identity_check("deg0", &[(ft.get(&[]), parse("x_1*y_2 + x_2*y_1").unwrap())], &pol()).passed());
    }

    #[test]
    fn d_commutes_with_form_lift() {
        let p = r2();
        let lp = LiftedPatch::new(&p, &WeilAlgebra::jet(2).unwrap()).unwrap();
        let w = KForm::from_terms(&p, 1, [(vec![0], parse("x*y^2").unwrap()), (vec![1], parse("sin(x)").unwrap())]).unwrap();
        for preset in FunctionalPreset::ALL {
            let lambda = LinearFunctional::preset(lp.algebra(), preset);
            let lhs = lp.lift_form(&w, &lambda).unwrap().d().unwrap();
            let rhs = lp.lift_form(&w.d().unwrap(), &lambda).unwrap();
            let diff = lhs.sub(&rhs).unwrap();
            assert!(zero_check("d", &diff.coefficients(), &pol()).passed(), "{preset:?}");
        }
    }

    #[test]
    fn valued_wedge_and_interior() {
        let p = r2();
        let lp = LiftedPatch::new(&p, &WeilAlgebra::dual()).unwrap();
        let a = KForm::from_terms(&p, 1, [(vec![0], parse("y").unwrap()), (vec![1], parse("x^2").unwrap())]).unwrap();
        let b = KForm::from_terms(&p, 1, [(vec![1], parse("exp(x)").unwrap())]).unwrap();
        let lhs = lp.lift_form_valued(&a.wedge(&b).unwrap()).unwrap();
        let rhs = lp.wedge_valued(&lp.lift_form_valued(&a).unwrap(), &lp.lift_form_valued(&b).unwrap()).unwrap();
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!(zero_check("wedge", &l.sub(r).unwrap().coefficients(), &pol()).passed());
        }
        let x = VectorField::parse(&p, &["x", "1"]).unwrap();
        let w = a.wedge(&b).unwrap();
        let top = LinearFunctional::preset(lp.algebra(), FunctionalPreset::Top);
        let lhs = lp.lift_form(&w, &top).unwrap().interior(&lp.lift_vector_field(&x).unwrap()).unwrap();
        let rhs = lp.lift_form(&w.interior(&x).unwrap(), &top).unwrap();
        assert!(zero_check("interior", &lhs.sub(&rhs).unwrap().coefficients(), &pol()).passed());
    }

    #[test]
    fn metric_and_tensor_lifts() {
        let p = Patch::new(&["x"]).unwrap();
        let lp = LiftedPatch::new(&p, &WeilAlgebra::dual()).unwrap();
        let g = Tensor02::euclidean(&p);
        let top = LinearFunctional::preset(lp.algebra(), FunctionalPreset::Top);
        let gt = lp.lift_metric(&g, &top).unwrap();
        assert_eq!(gt.comps(), &vec![vec![Expr::zero(), Expr::one()], vec![Expr::one(), Expr::zero()]]);
        let real = LinearFunctional::preset(lp.algebra(), FunctionalPreset::Real);
        let gr = lp.lift_metric(&g, &real).unwrap();
        assert_eq!(gr.comps(), &vec![vec![Expr::one(), Expr::zero()], vec![Expr::zero(), Expr::zero()]]);

        let q = r2();
        let lq = LiftedPatch::new(&q, &WeilAlgebra::jet(2).unwrap()).unwrap();
        let j = Tensor11::parse(&q, &[&["0", "-1"], &["1", "0"]]).unwrap();
        let ja = lq.lift_tensor11(&j).unwrap();
        let sq = ja.compose(&ja).unwrap();
        let id = Tensor11::identity(lq.patch());
        let neg: Vec<Expr> = id.entries().iter().map(Expr::neg).collect();
        assert!(identity_check("J^2", &pairs(sq.entries(), neg), &pol()).passed());
        let t = Tensor11::parse(&q, &[&["x*y", "1"], &["sin(y)", "x"]]).unwrap();
        let v = VectorField::parse(&q, &["y", "x^2"]).unwrap();
        let lhs = lq.lift_tensor11(&t).unwrap().apply(&lq.lift_vector_field(&v).unwrap());
        let rhs = lq.lift_vector_field(&t.apply(&v)).unwrap();
        assert!(identity_check("JX", &pairs(lhs.comps().to_vec(), rhs.comps().to_vec()), &pol()).passed());
    }

    #[test]
    fn bivector_lift_inverts_form_lift() {
        let p = r2();
        let lp = LiftedPatch::new(&p, &WeilAlgebra::jet(2).unwrap()).unwrap();
        let f = parse("exp(x*y)").unwrap();
        let w = KForm::from_terms(&p, 2, [(vec![0, 1], f.clone())]).unwrap();
        let bv = Bivector::from_upper(&p, [(0, 1, Expr::one().div(&f).neg())]).unwrap();
        let mixed = LinearFunctional::preset(lp.algebra(), FunctionalPreset::Mixed);
        let wm = lp.lift_form(&w, &mixed).unwrap().matrix().unwrap();
        let bm = lp.lift_bivector(&bv, &mixed).unwrap();
        let dim = lp.patch().dim();
        let mut prod = Vec::new();
        for a in 0..dim {
            for c in 0..dim {
                let terms: Vec<Expr> = (0..dim).map(|b| bm.get(a, b).mul(&wm[b][c])).collect();
                let want = if a == c { Expr::one() } else { Expr::zero() };
                prod.push((Expr::sum(&terms), want));
            }
        }
        assert!(identity_check("inverse", &prod, &pol()).passed());
        assert!(identity_check("antisym", &bm.antisymmetry_pairs(), &pol()).passed());
    }

    #[test]
    fn connection_lift_is_levi_civita_of_lifted_metric() {
        let p = r2();
        let lp = LiftedPatch::new(&p, &WeilAlgebra::dual()).unwrap();
        let g = Tensor02::parse(&p, &[&["exp(2*x)", "0"], &["0", "exp(2*x)"]]).unwrap();
        let top = LinearFunctional::preset(lp.algebra(), FunctionalPreset::Top);
        let lhs = lp.lift_connection(&levi_civita(&g).unwrap()).unwrap();
        let rhs = levi_civita(&lp.lift_metric(&g, &top).unwrap()).unwrap();
        assert!(identity_check("LC", &pairs(lhs.entries(), rhs.entries()), &pol()).passed());
        assert!(identity_check("torsion", &lhs.torsion_pairs(), &pol()).passed());
    }
}
