use num_traits::Zero;

use super::{ensure_same, GeometryError, Patch, Tensor02, Tensor11, VectorField};
use crate::expr::{rational_to_f64, Env, Evaluator, Expr, F64Ring};
use crate::linalg::{self, expr_adjugate, expr_det};

type Matrix = Vec<Vec<Expr>>;

/// Largest dimension for which metric inverses are formed symbolically.
pub const SYMBOLIC_INVERSE_MAX_DIM: usize = 4;

/// An affine connection with `gamma[i][j][k] = Γ^i_{jk}`, so `∇_{∂_j} ∂_k = Γ^i_{jk} ∂_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    patch: Patch,
    gamma: Vec<Matrix>,
}

/// Riemann tensor `R^i_{jkl}` stored as `r[i][j][k][l]`.
#[derive(Debug, Clone)]
pub struct Curvature {
    patch: Patch,
    pub r: Vec<Vec<Matrix>>,
}

impl Connection {
    pub fn new(patch: &Patch, gamma: Vec<Matrix>) -> Result<Self, GeometryError> {
        let n = patch.dim();
        if gamma.len() != n || gamma.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
            return Err(GeometryError::Shape(format!("Christoffel symbols must be {n}x{n}x{n}")));
        }
        Ok(Connection { patch: patch.clone(), gamma })
    }

    pub fn flat(patch: &Patch) -> Self {
        let n = patch.dim();
        Connection { patch: patch.clone(), gamma: vec![vec![vec![Expr::zero(); n]; n]; n] }
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn gamma(&self) -> &[Matrix] {
        &self.gamma
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Expr {
        &self.gamma[i][j][k]
    }

    pub fn entries(&self) -> Vec<Expr> {
        self.gamma.iter().flatten().flatten().cloned().collect()
    }

    /// Pairs `(Γ^i_{jk}, Γ^i_{kj})` whose equality is torsion-freeness.
    pub fn torsion_pairs(&self) -> Vec<(Expr, Expr)> {
        let n = self.patch.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in j + 1..n {
                    out.push((self.gamma[i][j][k].clone(), self.gamma[i][k][j].clone()));
                }
            }
        }
        out
    }

    /// `(∇_X Y)^i = X(Y^i) + Γ^i_{jk} X^j Y^k`.
    pub fn covariant_vector(&self, x: &VectorField, y: &VectorField) -> Result<VectorField, GeometryError> {
        ensure_same(&self.patch, x.patch())?;
        ensure_same(&self.patch, y.patch())?;
        let n = self.patch.dim();
        let comps = (0..n)
            .map(|i| {
                let mut terms = vec![x.apply(y.comp(i))];
                for j in 0..n {
                    if x.comp(j).is_zero() {
                        continue;
                    }
                    for k in 0..n {
                        let g = &self.gamma[i][j][k];
                        if !g.is_zero() && !y.comp(k).is_zero() {
                            terms.push(g.mul(x.comp(j)).mul(y.comp(k)));
                        }
                    }
                }
                Expr::sum(&terms)
            })
            .collect();
        VectorField::new(&self.patch, comps)
    }

    /// `out[k][i][j] = (∇_k g)_{ij} = ∂_k g_ij − Γ^l_{ki} g_lj − Γ^l_{kj} g_il`.
    pub fn covariant_02(&self, g: &Tensor02) -> Result<Vec<Matrix>, GeometryError> {
        ensure_same(&self.patch, g.patch())?;
        let n = self.patch.dim();
        let c = g.comps();
        Ok((0..n)
            .map(|k| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let mut acc = self.patch.partial(&c[i][j], k);
                                for l in 0..n {
                                    if !self.gamma[l][k][i].is_zero() && !c[l][j].is_zero() {
                                        acc = acc.sub(&self.gamma[l][k][i].mul(&c[l][j]));
                                    }
                                    if !self.gamma[l][k][j].is_zero() && !c[i][l].is_zero() {
                                        acc = acc.sub(&self.gamma[l][k][j].mul(&c[i][l]));
                                    }
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect())
    }

    /// `out[k][i][j] = (∇_k T)^i_j = ∂_k T^i_j + Γ^i_{kl} T^l_j − Γ^l_{kj} T^i_l`.
    pub fn covariant_11(&self, t: &Tensor11) -> Result<Vec<Matrix>, GeometryError> {
        ensure_same(&self.patch, t.patch())?;
        let n = self.patch.dim();
        let c = t.comps();
        Ok((0..n)
            .map(|k| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let mut acc = self.patch.partial(&c[i][j], k);
                                for l in 0..n {
                                    if !self.gamma[i][k][l].is_zero() && !c[l][j].is_zero() {
                                        acc = acc.add(&self.gamma[i][k][l].mul(&c[l][j]));
                                    }
                                    if !self.gamma[l][k][j].is_zero() && !c[i][l].is_zero() {
                                        acc = acc.sub(&self.gamma[l][k][j].mul(&c[i][l]));
                                    }
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect())
    }

    /// `R^i_{jkl} = ∂_k Γ^i_{lj} − ∂_l Γ^i_{kj} + Γ^i_{km} Γ^m_{lj} − Γ^i_{lm} Γ^m_{kj}`.
    pub fn riemann(&self) -> Curvature {
        let n = self.patch.dim();
        let g = &self.gamma;
        let r = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| {
                                (0..n)
                                    .map(|l| {
                                        let mut terms = vec![
                                            self.patch.partial(&g[i][l][j], k),
                                            self.patch.partial(&g[i][k][j], l).neg(),
                                        ];
                                        for m in 0..n {
                                            if !g[i][k][m].is_zero() && !g[m][l][j].is_zero() {
                                                terms.push(g[i][k][m].mul(&g[m][l][j]));
                                            }
                                            if !g[i][l][m].is_zero() && !g[m][k][j].is_zero() {
                                                terms.push(g[i][l][m].mul(&g[m][k][j]).neg());
                                            }
                                        }
                                        Expr::sum(&terms)
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Curvature { patch: self.patch.clone(), r }
    }
}

impl Curvature {
    pub fn entries(&self) -> Vec<Expr> {
        self.r.iter().flatten().flatten().flatten().cloned().collect()
    }

    /// `Ric_{jl} = R^i_{jil}`.
    pub fn ricci(&self) -> Tensor02 {
        let n = self.patch.dim();
        let comps = (0..n)
            .map(|j| (0..n).map(|l| Expr::sum(&(0..n).map(|i| self.r[i][j][i][l].clone()).collect::<Vec<_>>())).collect())
            .collect();
        Tensor02::new(&self.patch, comps).expect("shape")
    }
}

fn metric_inverse(g: &Tensor02) -> Result<Matrix, GeometryError> {
    let n = g.patch().dim();
    let c = g.comps();
    if c.iter().flatten().all(|e| e.as_const().is_some()) {
        let q: linalg::QMatrix = c.iter().map(|r| r.iter().map(|e| e.as_const().unwrap().clone()).collect()).collect();
        let inv = linalg::inverse(&q).ok_or(GeometryError::DegenerateMetric)?;
        return Ok(inv.into_iter().map(|r| r.into_iter().map(Expr::constant).collect()).collect());
    }
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || c[i][j].is_zero()));
    if diagonal {
        let mut inv = vec![vec![Expr::zero(); n]; n];
        for i in 0..n {
            if c[i][i].is_zero() {
                return Err(GeometryError::DegenerateMetric);
            }
            inv[i][i] = Expr::one().div(&c[i][i]);
        }
        return Ok(inv);
    }
    if n > SYMBOLIC_INVERSE_MAX_DIM {
        return Err(GeometryError::TooLargeForSymbolic { max: SYMBOLIC_INVERSE_MAX_DIM });
    }
    let det = expr_det(c);
    if det.is_zero() {
        return Err(GeometryError::DegenerateMetric);
    }
    Ok(expr_adjugate(c).into_iter().map(|r| r.into_iter().map(|e| e.div(&det)).collect()).collect())
}

/// Symbolic Levi-Civita connection `Γ^i_{jk} = ½ g^{il}(∂_j g_lk + ∂_k g_lj − ∂_l g_jk)`.
///
/// Constant and diagonal metrics are handled in any dimension; other metrics
/// need `n ≤ SYMBOLIC_INVERSE_MAX_DIM`.
pub fn levi_civita(g: &Tensor02) -> Result<Connection, GeometryError> {
    let p = g.patch();
    let n = p.dim();
    let c = g.comps();
    if c.iter().flatten().all(|e| e.as_const().is_some()) {
        if linalg::det(&c.iter().map(|r| r.iter().map(|e| e.as_const().unwrap().clone()).collect()).collect()).is_zero() {
            return Err(GeometryError::DegenerateMetric);
        }
        return Ok(Connection::flat(p));
    }
    let inv = metric_inverse(g)?;
    let dg: Vec<Matrix> = (0..n).map(|m| c.iter().map(|r| r.iter().map(|e| p.partial(e, m)).collect()).collect()).collect();
    let half = Expr::ratio(1, 2);
    // lowered[l][j][k] = ½(∂_j g_lk + ∂_k g_lj − ∂_l g_jk)
    let lowered: Vec<Matrix> = (0..n)
        .map(|l| {
            (0..n)
                .map(|j| (0..n).map(|k| half.mul(&dg[j][l][k].add(&dg[k][l][j]).sub(&dg[l][j][k]))).collect())
                .collect()
        })
        .collect();
    let gamma = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|k| {
                            let terms: Vec<Expr> = (0..n)
                                .filter(|&l| !inv[i][l].is_zero() && !lowered[l][j][k].is_zero())
                                .map(|l| inv[i][l].mul(&lowered[l][j][k]))
                                .collect();
                            Expr::sum(&terms)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Connection::new(p, gamma)
}

/// Numeric Levi-Civita symbols at one point.
pub fn levi_civita_at(g: &Tensor02, dg: &[Matrix], env: &Env<f64>) -> Result<Vec<Vec<Vec<f64>>>, GeometryError> {
    let n = g.patch().dim();
    let mut ev = Evaluator::new(&F64Ring, env);
    let mut num = |e: &Expr| -> Result<f64, GeometryError> {
        if let Some(q) = e.as_const() {
            return Ok(rational_to_f64(q));
        }
        ev.eval(e).map_err(|_| GeometryError::DegenerateMetric)
    };
    let gv: Vec<Vec<f64>> = g.comps().iter().map(|r| r.iter().map(&mut num).collect()).collect::<Result<_, _>>()?;
    let dgv: Vec<Vec<Vec<f64>>> = dg
        .iter()
        .map(|m| m.iter().map(|r| r.iter().map(&mut num).collect()).collect())
        .collect::<Result<_, _>>()?;
    if linalg::conditioning_f64(&gv) < 1e-12 {
        return Err(GeometryError::DegenerateMetric);
    }
    let inv = linalg::inverse_f64(&gv).ok_or(GeometryError::DegenerateMetric)?;
    let mut out = vec![vec![vec![0.0; n]; n]; n];
    for (i, oi) in out.iter_mut().enumerate() {
        for (j, oij) in oi.iter_mut().enumerate() {
            for (k, v) in oij.iter_mut().enumerate() {
                *v = (0..n)
                    .map(|l| 0.5 * inv[i][l] * (dgv[j][l][k] + dgv[k][l][j] - dgv[l][j][k]))
                    .sum();
            }
        }
    }
    Ok(out)
}

/// Christoffel symbols either as expressions or evaluated per point.
#[derive(Debug, Clone)]
pub enum ChristoffelProvider {
    Symbolic(Connection),
    Pointwise { metric: Tensor02, dg: Vec<Matrix> },
}

impl ChristoffelProvider {
    /// Symbolic when the metric inverse is tractable, otherwise pointwise.
    pub fn for_metric(g: &Tensor02) -> Result<Self, GeometryError> {
        match levi_civita(g) {
            Ok(c) => Ok(ChristoffelProvider::Symbolic(c)),
            Err(GeometryError::TooLargeForSymbolic { .. }) => Ok(Self::pointwise(g)),
            Err(e) => Err(e),
        }
    }

    pub fn pointwise(g: &Tensor02) -> Self {
        let p = g.patch();
        let n = p.dim();
        let dg = (0..n)
            .map(|m| g.comps().iter().map(|r| r.iter().map(|e| p.partial(e, m)).collect()).collect())
            .collect();
        ChristoffelProvider::Pointwise { metric: g.clone(), dg }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, ChristoffelProvider::Symbolic(_))
    }

    pub fn at(&self, env: &Env<f64>) -> Result<Vec<Vec<Vec<f64>>>, GeometryError> {
        match self {
            ChristoffelProvider::Symbolic(c) => {
                let mut ev = Evaluator::new(&F64Ring, env);
                c.gamma
                    .iter()
                    .map(|m| {
                        m.iter()
                            .map(|r| r.iter().map(|e| ev.eval(e).map_err(|_| GeometryError::DegenerateMetric)).collect())
                            .collect()
                    })
                    .collect()
            }
            ChristoffelProvider::Pointwise { metric, dg } => levi_civita_at(metric, dg, env),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::{identity_check, zero_check};
    use crate::expr::{parse, SamplingPolicy};

    fn r2() -> Patch {
        Patch::new(&["x", "y"]).unwrap()
    }

    fn pol() -> SamplingPolicy {
        SamplingPolicy::default()
    }

    #[test]
    fn flat_metrics_have_zero_symbols() {
        let p = r2();
        assert!(levi_civita(&Tensor02::euclidean(&p)).unwrap().entries().iter().all(Expr::is_zero));
        let split = Tensor02::parse(&p, &[&["0", "1"], &["1", "0"]]).unwrap();
        assert!(levi_civita(&split).unwrap().entries().iter().all(Expr::is_zero));
        let degenerate = Tensor02::parse(&p, &[&["1", "0"], &["0", "0"]]).unwrap();
        assert_eq!(levi_civita(&degenerate), Err(GeometryError::DegenerateMetric));
    }

    // Koszul oracle for a conformally flat metric e^{2f}(dx² + dy²):
    // Γ^x_xx = f_x, Γ^x_yy = −f_x, Γ^y_xy = f_x, Γ^y_xx = −f_y, Γ^x_xy = f_y, Γ^y_yy = f_y.
    #[test]
    fn conformal_metric_symbols_and_flatness() {
        let p = r2();
        let g = Tensor02::parse(&p, &[&["exp(2*x)", "0"], &["0", "exp(2*x)"]]).unwrap();
        let lc = levi_civita(&g).unwrap();
        let one = Expr::one();
        let pairs = vec![
            (lc.get(0, 0, 0).clone(), one.clone()),
            (lc.get(0, 1, 1).clone(), one.neg()),
            (lc.get(1, 0, 1).clone(), one.clone()),
            (lc.get(1, 1, 0).clone(), one.clone()),
            (lc.get(1, 0, 0).clone(), Expr::zero()),
        ];
        assert!(identity_check("koszul", &pairs, &pol()).passed());
        assert!(identity_check("torsion", &lc.torsion_pairs(), &pol()).passed());
        let nabla_g = lc.covariant_02(&g).unwrap();
        assert!(zero_check("compatible", &nabla_g.into_iter().flatten().flatten().collect::<Vec<_>>(), &pol()).passed());
        // harmonic conformal factor: flat
        let ric = lc.riemann().ricci();
        assert!(zero_check("flat", &ric.entries(), &pol()).passed());
    }

    #[test]
    fn hyperbolic_plane_is_einstein() {
        let p = r2();
        let g = Tensor02::parse(&p, &[&["y^(-2)", "0"], &["0", "y^(-2)"]]).unwrap();
        let ric = levi_civita(&g).unwrap().riemann().ricci();
        let pairs: Vec<(Expr, Expr)> =
            ric.entries().into_iter().zip(g.entries()).map(|(r, gg)| (r, gg.neg())).collect();
        assert!(identity_check("ric = -g", &pairs, &pol()).passed());
    }

    #[test]
    fn pointwise_agrees_with_symbolic() {
        let p = r2();
        let g = Tensor02::parse(&p, &[&["1 + x^2", "x*y"], &["x*y", "2 + y^2"]]).unwrap();
        let sym = ChristoffelProvider::Symbolic(levi_civita(&g).unwrap());
        let pw = ChristoffelProvider::pointwise(&g);
        let env = Env::new().with("x", 0.3).with("y", -1.1);
        let (a, b) = (sym.at(&env).unwrap(), pw.at(&env).unwrap());
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert!((a[i][j][k] - b[i][j][k]).abs() < 1e-12);
                }
            }
        }
        let _ = parse("x").unwrap();
    }
}
