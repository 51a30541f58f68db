use std::collections::HashMap;

use super::{ensure_same, GeometryError, KForm, Patch, VectorField};
use crate::expr::{parse, Expr, ParseError};

type Matrix = Vec<Vec<Expr>>;

fn square(patch: &Patch, comps: &Matrix, what: &str) -> Result<(), GeometryError> {
    let n = patch.dim();
    if comps.len() != n || comps.iter().any(|r| r.len() != n) {
        return Err(GeometryError::Shape(format!("{what} must be {n}x{n}")));
    }
    Ok(())
}

fn parse_matrix(rows: &[&[&str]]) -> Result<Matrix, ParseError> {
    rows.iter().map(|r| r.iter().map(|s| parse(s)).collect()).collect()
}

fn zeros(n: usize) -> Matrix {
    vec![vec![Expr::zero(); n]; n]
}

fn dot(a: &[Expr], b: &[Expr]) -> Expr {
    let terms: Vec<Expr> = a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x.mul(y)).collect();
    Expr::sum(&terms)
}

/// A covariant 2-tensor `g_ij dx^i ⊗ dx^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor02 {
    patch: Patch,
    comps: Matrix,
}

impl Tensor02 {
    pub fn new(patch: &Patch, comps: Matrix) -> Result<Self, GeometryError> {
        square(patch, &comps, "(0,2)-tensor")?;
        Ok(Tensor02 { patch: patch.clone(), comps })
    }

    pub fn parse(patch: &Patch, rows: &[&[&str]]) -> Result<Self, ParseError> {
        Ok(Self::new(patch, parse_matrix(rows)?).expect("shape checked by caller"))
    }

    pub fn zero(patch: &Patch) -> Self {
        Tensor02 { patch: patch.clone(), comps: zeros(patch.dim()) }
    }

    pub fn euclidean(patch: &Patch) -> Self {
        let mut g = Self::zero(patch);
        for i in 0..patch.dim() {
            g.comps[i][i] = Expr::one();
        }
        g
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn comps(&self) -> &Matrix {
        &self.comps
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.comps[i][j]
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Tensor02 {
        Tensor02 { patch: self.patch.clone(), comps: self.comps.iter().map(|r| r.iter().map(&f).collect()).collect() }
    }

    pub fn scale(&self, f: &Expr) -> Tensor02 {
        self.map(|c| f.mul(c))
    }

    pub fn add(&self, other: &Tensor02) -> Result<Tensor02, GeometryError> {
        ensure_same(&self.patch, &other.patch)?;
        let n = self.patch.dim();
        let comps = (0..n).map(|i| (0..n).map(|j| self.comps[i][j].add(&other.comps[i][j])).collect()).collect();
        Ok(Tensor02 { patch: self.patch.clone(), comps })
    }

    pub fn sub(&self, other: &Tensor02) -> Result<Tensor02, GeometryError> {
        self.add(&other.map(Expr::neg))
    }

    /// Symmetric product `α ⊙ β = ½(α⊗β + β⊗α)` of two 1-forms.
    pub fn symmetric_product(a: &KForm, b: &KForm) -> Result<Tensor02, GeometryError> {
        ensure_same(a.patch(), b.patch())?;
        let (u, v) = (a.covector()?, b.covector()?);
        let n = a.patch().dim();
        let half = Expr::ratio(1, 2);
        let comps = (0..n)
            .map(|i| (0..n).map(|j| half.mul(&u[i].mul(&v[j]).add(&u[j].mul(&v[i])))).collect())
            .collect();
        Ok(Tensor02 { patch: a.patch().clone(), comps })
    }

    /// `g(X, Y)`.
    pub fn apply(&self, x: &VectorField, y: &VectorField) -> Expr {
        let gy: Vec<Expr> = self.comps.iter().map(|row| dot(row, y.comps())).collect();
        dot(x.comps(), &gy)
    }

    /// The 1-form `g(·, X)`.
    pub fn flat(&self, x: &VectorField) -> KForm {
        let terms = (0..self.patch.dim()).map(|i| (vec![i], dot(&self.comps[i], x.comps())));
        KForm::from_terms(&self.patch, 1, terms).expect("1-form")
    }

    /// `g(T·, T·)`, i.e. `Tᵀ g T`.
    pub fn pullback_by(&self, t: &Tensor11) -> Tensor02 {
        let n = self.patch.dim();
        let gt: Matrix = (0..n)
            .map(|k| (0..n).map(|j| dot(&self.comps[k], &t.column(j))).collect())
            .collect();
        let comps = (0..n)
            .map(|i| {
                let ti = t.column(i);
                (0..n).map(|j| dot(&ti, &gt.iter().map(|r| r[j].clone()).collect::<Vec<_>>())).collect()
            })
            .collect();
        Tensor02 { patch: self.patch.clone(), comps }
    }

    /// Antisymmetric part as a 2-form: `Σ_{i<j} (t_ij − t_ji) dx^i ∧ dx^j`.
    pub fn antisymmetrize(&self) -> KForm {
        let n = self.patch.dim();
        let terms = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| {
            (vec![i, j], self.comps[i][j].sub(&self.comps[j][i]))
        });
        KForm::from_terms(&self.patch, 2, terms).expect("2-form")
    }

    /// Component pairs `(t_ij, t_ji)` for `i < j`.
    pub fn symmetry_pairs(&self) -> Vec<(Expr, Expr)> {
        let n = self.patch.dim();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (self.comps[i][j].clone(), self.comps[j][i].clone()))
            .collect()
    }

    /// `(L_X g)_ij = X(g_ij) + g_kj ∂_i X^k + g_ik ∂_j X^k`.
    pub fn lie_derivative(&self, x: &VectorField) -> Result<Tensor02, GeometryError> {
        ensure_same(&self.patch, x.patch())?;
        let n = self.patch.dim();
        let dx: Matrix = (0..n).map(|k| (0..n).map(|i| self.patch.partial(x.comp(k), i)).collect()).collect();
        let comps = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut terms = vec![x.apply(&self.comps[i][j])];
                        for k in 0..n {
                            if !dx[k][i].is_zero() {
                                terms.push(self.comps[k][j].mul(&dx[k][i]));
                            }
                            if !dx[k][j].is_zero() {
                                terms.push(self.comps[i][k].mul(&dx[k][j]));
                            }
                        }
                        Expr::sum(&terms)
                    })
                    .collect()
            })
            .collect();
        Ok(Tensor02 { patch: self.patch.clone(), comps })
    }

    pub fn substitute(&self, map: &HashMap<String, Expr>) -> Tensor02 {
        self.map(|c| c.substitute(map))
    }

    pub fn entries(&self) -> Vec<Expr> {
        self.comps.iter().flatten().cloned().collect()
    }
}

/// A (1,1)-tensor with `comps[i][j] = T^i_j`, acting on vectors by `(TX)^i = T^i_j X^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor11 {
    patch: Patch,
    comps: Matrix,
}

impl Tensor11 {
    pub fn new(patch: &Patch, comps: Matrix) -> Result<Self, GeometryError> {
        square(patch, &comps, "(1,1)-tensor")?;
        Ok(Tensor11 { patch: patch.clone(), comps })
    }

    pub fn parse(patch: &Patch, rows: &[&[&str]]) -> Result<Self, ParseError> {
        Ok(Self::new(patch, parse_matrix(rows)?).expect("shape checked by caller"))
    }

    pub fn identity(patch: &Patch) -> Self {
        let n = patch.dim();
        let mut comps = zeros(n);
        for (i, row) in comps.iter_mut().enumerate() {
            row[i] = Expr::one();
        }
        Tensor11 { patch: patch.clone(), comps }
    }

    /// `X ⊗ α` with components `X^i α_j`.
    pub fn outer(x: &VectorField, alpha: &KForm) -> Result<Self, GeometryError> {
        ensure_same(x.patch(), alpha.patch())?;
        let a = alpha.covector()?;
        let comps = x.comps().iter().map(|xi| a.iter().map(|aj| xi.mul(aj)).collect()).collect();
        Ok(Tensor11 { patch: x.patch().clone(), comps })
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn comps(&self) -> &Matrix {
        &self.comps
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.comps[i][j]
    }

    /// Image of `∂_j`.
    pub fn column(&self, j: usize) -> Vec<Expr> {
        self.comps.iter().map(|r| r[j].clone()).collect()
    }

    pub fn apply(&self, x: &VectorField) -> VectorField {
        let comps = self.comps.iter().map(|row| dot(row, x.comps())).collect();
        VectorField::new(&self.patch, comps).expect("shape")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Tensor11) -> Result<Tensor11, GeometryError> {
        ensure_same(&self.patch, &other.patch)?;
        let n = self.patch.dim();
        let comps = (0..n).map(|i| (0..n).map(|j| dot(&self.comps[i], &other.column(j))).collect()).collect();
        Ok(Tensor11 { patch: self.patch.clone(), comps })
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Tensor11 {
        Tensor11 { patch: self.patch.clone(), comps: self.comps.iter().map(|r| r.iter().map(&f).collect()).collect() }
    }

    pub fn add(&self, other: &Tensor11) -> Result<Tensor11, GeometryError> {
        ensure_same(&self.patch, &other.patch)?;
        let n = self.patch.dim();
        let comps = (0..n).map(|i| (0..n).map(|j| self.comps[i][j].add(&other.comps[i][j])).collect()).collect();
        Ok(Tensor11 { patch: self.patch.clone(), comps })
    }

    pub fn sub(&self, other: &Tensor11) -> Result<Tensor11, GeometryError> {
        self.add(&other.map(Expr::neg))
    }

    /// `(L_X T)^i_j = X(T^i_j) − T^k_j ∂_k X^i + T^i_k ∂_j X^k`.
    pub fn lie_derivative(&self, x: &VectorField) -> Result<Tensor11, GeometryError> {
        ensure_same(&self.patch, x.patch())?;
        let n = self.patch.dim();
        let dx: Matrix = (0..n).map(|k| (0..n).map(|i| self.patch.partial(x.comp(k), i)).collect()).collect();
        let comps = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = x.apply(&self.comps[i][j]);
                        for k in 0..n {
                            if !dx[i][k].is_zero() {
                                acc = acc.sub(&self.comps[k][j].mul(&dx[i][k]));
                            }
                            if !dx[k][j].is_zero() {
                                acc = acc.add(&self.comps[i][k].mul(&dx[k][j]));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(Tensor11 { patch: self.patch.clone(), comps })
    }

    pub fn entries(&self) -> Vec<Expr> {
        self.comps.iter().flatten().cloned().collect()
    }
}

/// A bivector `Λ = ½ Λ^{ij} ∂_i ∧ ∂_j` with antisymmetric components.
#[derive(Debug, Clone, PartialEq)]
pub struct Bivector {
    patch: Patch,
    comps: Matrix,
}

impl Bivector {
    pub fn new(patch: &Patch, comps: Matrix) -> Result<Self, GeometryError> {
        square(patch, &comps, "bivector")?;
        Ok(Bivector { patch: patch.clone(), comps })
    }

    /// Builds from upper-triangular entries `(i, j, Λ^{ij})` with `i ≠ j`, mirroring with a sign.
    pub fn from_upper<I: IntoIterator<Item = (usize, usize, Expr)>>(patch: &Patch, entries: I) -> Result<Self, GeometryError> {
        let mut comps = zeros(patch.dim());
        for (i, j, c) in entries {
            if i == j || i >= patch.dim() || j >= patch.dim() {
                return Err(GeometryError::Shape(format!("bivector entry ({i}, {j})")));
            }
            comps[j][i] = c.neg();
            comps[i][j] = c;
        }
        Ok(Bivector { patch: patch.clone(), comps })
    }

    pub fn zero(patch: &Patch) -> Self {
        Bivector { patch: patch.clone(), comps: zeros(patch.dim()) }
    }

    /// `X ∧ Y` with `Λ^{ij} = X^i Y^j − X^j Y^i`.
    pub fn wedge(x: &VectorField, y: &VectorField) -> Result<Self, GeometryError> {
        ensure_same(x.patch(), y.patch())?;
        let n = x.patch().dim();
        let comps = (0..n)
            .map(|i| (0..n).map(|j| x.comp(i).mul(y.comp(j)).sub(&x.comp(j).mul(y.comp(i)))).collect())
            .collect();
        Ok(Bivector { patch: x.patch().clone(), comps })
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn comps(&self) -> &Matrix {
        &self.comps
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.comps[i][j]
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Bivector {
        Bivector { patch: self.patch.clone(), comps: self.comps.iter().map(|r| r.iter().map(&f).collect()).collect() }
    }

    pub fn add(&self, other: &Bivector) -> Result<Bivector, GeometryError> {
        ensure_same(&self.patch, &other.patch)?;
        let n = self.patch.dim();
        let comps = (0..n).map(|i| (0..n).map(|j| self.comps[i][j].add(&other.comps[i][j])).collect()).collect();
        Ok(Bivector { patch: self.patch.clone(), comps })
    }

    /// Component pairs `(Λ^{ij}, −Λ^{ji})` for `i ≤ j`.
    pub fn antisymmetry_pairs(&self) -> Vec<(Expr, Expr)> {
        let n = self.patch.dim();
        (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .map(|(i, j)| (self.comps[i][j].clone(), self.comps[j][i].neg()))
            .collect()
    }

    /// `(L_X Λ)^{ij} = X(Λ^{ij}) − Λ^{kj} ∂_k X^i − Λ^{ik} ∂_k X^j`.
    pub fn lie_derivative(&self, x: &VectorField) -> Result<Bivector, GeometryError> {
        ensure_same(&self.patch, x.patch())?;
        let n = self.patch.dim();
        let dx: Matrix = (0..n).map(|k| (0..n).map(|i| self.patch.partial(x.comp(k), i)).collect()).collect();
        let comps = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = x.apply(&self.comps[i][j]);
                        for k in 0..n {
                            if !dx[i][k].is_zero() {
                                acc = acc.sub(&self.comps[k][j].mul(&dx[i][k]));
                            }
                            if !dx[j][k].is_zero() {
                                acc = acc.sub(&self.comps[i][k].mul(&dx[j][k]));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(Bivector { patch: self.patch.clone(), comps })
    }

    pub fn entries(&self) -> Vec<Expr> {
        self.comps.iter().flatten().cloned().collect()
    }
}

/// A 3-vector, stored on increasing index triples.
#[derive(Debug, Clone, PartialEq)]
pub struct Trivector {
    patch: Patch,
    comps: HashMap<[usize; 3], Expr>,
}

impl Trivector {
    fn from_fn(patch: &Patch, f: impl Fn(usize, usize, usize) -> Expr) -> Self {
        let n = patch.dim();
        let mut comps = HashMap::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    comps.insert([i, j, k], f(i, j, k));
                }
            }
        }
        Trivector { patch: patch.clone(), comps }
    }

    /// `(Ξ ∧ Λ)^{ijk} = Ξ^i Λ^{jk} + Ξ^j Λ^{ki} + Ξ^k Λ^{ij}`.
    pub fn vector_wedge_bivector(xi: &VectorField, lambda: &Bivector) -> Result<Self, GeometryError> {
        ensure_same(xi.patch(), lambda.patch())?;
        Ok(Self::from_fn(xi.patch(), |i, j, k| {
            let l = lambda.comps();
            Expr::sum(&[xi.comp(i).mul(&l[j][k]), xi.comp(j).mul(&l[k][i]), xi.comp(k).mul(&l[i][j])])
        }))
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    /// Component on an increasing triple.
    pub fn get(&self, i: usize, j: usize, k: usize) -> Expr {
        self.comps.get(&[i, j, k]).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn scale(&self, f: &Expr) -> Trivector {
        Trivector { patch: self.patch.clone(), comps: self.comps.iter().map(|(k, v)| (*k, f.mul(v))).collect() }
    }

    /// Increasing triples in lexicographic order.
    pub fn triples(&self) -> Vec<[usize; 3]> {
        let mut t: Vec<[usize; 3]> = self.comps.keys().copied().collect();
        t.sort();
        t
    }
}

/// `[Λ,Λ]^{ijk} = 2 Σ_m (Λ^{mi} ∂_m Λ^{jk} + Λ^{mj} ∂_m Λ^{ki} + Λ^{mk} ∂_m Λ^{ij})`.
pub fn schouten_ll(lambda: &Bivector) -> Trivector {
    let p = lambda.patch();
    let n = p.dim();
    let l = lambda.comps();
    let dl: Vec<Matrix> = (0..n).map(|m| l.iter().map(|r| r.iter().map(|c| p.partial(c, m)).collect()).collect()).collect();
    Trivector::from_fn(p, |i, j, k| {
        let mut terms = Vec::new();
        for m in 0..n {
            for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                if !l[m][a].is_zero() && !dl[m][b][c].is_zero() {
                    terms.push(l[m][a].mul(&dl[m][b][c]));
                }
            }
        }
        Expr::int(2).mul(&Expr::sum(&terms))
    })
}

/// Vector-valued 2-form with `comps[i][j][k] = N^i_{jk}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Nijenhuis {
    pub comps: Vec<Matrix>,
}

impl Nijenhuis {
    pub fn entries(&self) -> Vec<Expr> {
        self.comps.iter().flatten().flatten().cloned().collect()
    }
}

/// `N^i_{jk} = J^l_j ∂_l J^i_k − J^l_k ∂_l J^i_j − J^i_l (∂_j J^l_k − ∂_k J^l_j)`,
/// the components of `[JX,JY] − J[JX,Y] − J[X,JY] + J²[X,Y]` on coordinate fields.
pub fn nijenhuis(j: &Tensor11) -> Nijenhuis {
    let p = j.patch();
    let n = p.dim();
    let c = j.comps();
    // dj[l][i][k] = ∂_l J^i_k
    let dj: Vec<Matrix> = (0..n).map(|l| c.iter().map(|r| r.iter().map(|e| p.partial(e, l)).collect()).collect()).collect();
    let comps = (0..n)
        .map(|i| {
            (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| {
                            let mut terms = Vec::new();
                            for l in 0..n {
                                if !c[l][a].is_zero() && !dj[l][i][b].is_zero() {
                                    terms.push(c[l][a].mul(&dj[l][i][b]));
                                }
                                if !c[l][b].is_zero() && !dj[l][i][a].is_zero() {
                                    terms.push(c[l][b].mul(&dj[l][i][a]).neg());
                                }
                                if !c[i][l].is_zero() {
                                    let inner = dj[a][l][b].sub(&dj[b][l][a]);
                                    if !inner.is_zero() {
                                        terms.push(c[i][l].mul(&inner).neg());
                                    }
                                }
                            }
                            Expr::sum(&terms)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Nijenhuis { comps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::{identity_check, zero_check};
    use crate::expr::SamplingPolicy;

    fn pol() -> SamplingPolicy {
        SamplingPolicy::default()
    }

    #[test]
    fn flat_and_identity_are_integrable() {
        let p = Patch::new(&["x", "y"]).unwrap();
        let j = Tensor11::parse(&p, &[&["0", "-1"], &["1", "0"]]).unwrap();
        assert!(nijenhuis(&j).entries().iter().all(Expr::is_zero));
        assert!(nijenhuis(&Tensor11::identity(&p)).entries().iter().all(Expr::is_zero));
    }

    #[test]
    fn nijenhuis_matches_bracket_oracle() {
        let p = Patch::new(&["x", "y", "z", "w"]).unwrap();
        let j = Tensor11::parse(
            &p,
            &[&["0", "-(1 + x^2)", "0", "0"], &["1", "y", "0", "0"], &["0", "0", "z", "-1"], &["x*w", "0", "1", "0"]],
        )
        .unwrap();
        let n = nijenhuis(&j);
        let e = |i| VectorField::coordinate(&p, i);
        let mut pairs = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                let (ja, jb) = (j.apply(&e(a)), j.apply(&e(b)));
                let t1 = ja.bracket(&jb).unwrap();
                let t2 = j.apply(&ja.bracket(&e(b)).unwrap());
                let t3 = j.apply(&e(a).bracket(&jb).unwrap());
                let oracle = t1.sub(&t2).unwrap().sub(&t3).unwrap();
                for i in 0..4 {
                    pairs.push((n.comps[i][a][b].clone(), oracle.comp(i).clone()));
                }
            }
        }
        assert!(identity_check("nijenhuis", &pairs, &pol()).passed());
        assert!(!zero_check("nonzero", &n.entries(), &pol()).passed());
    }

    #[test]
    fn schouten_of_contact_pair() {
        let p = Patch::new(&["x", "y", "z"]).unwrap();
        let lam = Bivector::wedge(
            &VectorField::coordinate(&p, 0),
            &VectorField::parse(&p, &["0", "1", "-x"]).unwrap(),
        )
        .unwrap();
        let xi = VectorField::coordinate(&p, 2);
        let lhs = schouten_ll(&lam);
        let rhs = Trivector::vector_wedge_bivector(&xi, &lam).unwrap().scale(&Expr::int(2));
        assert_eq!(lhs.get(0, 1, 2), Expr::int(2));
        assert_eq!(rhs.get(0, 1, 2), Expr::int(2));
        assert!(lam.lie_derivative(&xi).unwrap().entries().iter().all(Expr::is_zero));
        let poisson = Bivector::from_upper(&p, [(0, 1, Expr::one())]).unwrap();
        assert!(schouten_ll(&poisson).get(0, 1, 2).is_zero());
    }

    #[test]
    fn metric_lie_derivative_killing() {
        let p = Patch::new(&["x", "y"]).unwrap();
        let g = Tensor02::euclidean(&p);
        let rot = VectorField::parse(&p, &["-y", "x"]).unwrap();
        assert!(zero_check("killing", &g.lie_derivative(&rot).unwrap().entries(), &pol()).passed());
        let dil = VectorField::parse(&p, &["x", "0"]).unwrap();
        assert!(!zero_check("dilation", &g.lie_derivative(&dil).unwrap().entries(), &pol()).passed());
    }
}
