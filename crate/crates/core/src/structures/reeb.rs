//! Reeb fields of contact and cosymplectic data.
//!
//! Both reduce to the bordered system `[[Ωᵀ, βᵀ], [β, 0]] (ξ, μ) = (0, 1)`,
//! where `Ω` is the 2-form matrix (`dβ` or `ω`) and `β` the 1-form. The
//! multiplier `μ` vanishes at a solution and the system is invertible exactly
//! when the Reeb field is unique.

use crate::checks::{identity_check, sample_values_over};
use crate::expr::{rational_to_f64, Env, Expr, Sampler, SamplingPolicy};
use crate::geometry::{KForm, Patch, VectorField, RANK_TOL};
use crate::lift::LiftedPatch;
use crate::linalg::{expr_adjugate, expr_det, rank_f64, solve, solve_f64, QMatrix};
use crate::report::{Check, Residual};

use super::{check_degree, StructureError};

/// Largest bordered system solved through the symbolic adjugate.
const SYMBOLIC_MAX: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum ReebMethod {
    Exact,
    Symbolic,
    Pointwise,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReebSolution {
    /// Closed form, when one was found or a candidate was confirmed.
    pub field: Option<VectorField>,
    pub residual: Residual,
    pub unique: bool,
    /// Largest kernel dimension of the bordered system over the samples.
    pub kernel_dim: usize,
    pub method: ReebMethod,
    /// Sample coordinates and the solved components there.
    pub samples: Vec<(Vec<f64>, Vec<f64>)>,
}

pub fn reeb_contact(beta: &KForm, candidate: Option<&VectorField>, policy: &SamplingPolicy) -> Result<ReebSolution, StructureError> {
    check_degree(beta, 1, "beta")?;
    solve_bordered(&beta.d()?, beta, candidate, policy)
}

pub fn reeb_cosymplectic(
    omega: &KForm,
    eta: &KForm,
    candidate: Option<&VectorField>,
    policy: &SamplingPolicy,
) -> Result<ReebSolution, StructureError> {
    check_degree(omega, 2, "omega")?;
    check_degree(eta, 1, "eta")?;
    solve_bordered(omega, eta, candidate, policy)
}

fn bordered(two: &KForm, one: &KForm) -> Result<Vec<Vec<Expr>>, StructureError> {
    let om = two.matrix()?;
    let b = one.covector()?;
    let n = b.len();
    let mut m = vec![vec![Expr::zero(); n + 1]; n + 1];
    for j in 0..n {
        for i in 0..n {
            m[j][i] = om[i][j].clone();
        }
        m[j][n] = b[j].clone();
        m[n][j] = b[j].clone();
    }
    Ok(m)
}

fn defining_pairs(two: &KForm, one: &KForm, xi: &VectorField) -> Result<Vec<(Expr, Expr)>, StructureError> {
    let mut pairs: Vec<(Expr, Expr)> = two.interior(xi)?.coefficients().into_iter().map(|c| (c, Expr::zero())).collect();
    pairs.push((one.interior(xi)?.get(&[]), Expr::one()));
    Ok(pairs)
}

fn solve_bordered(
    two: &KForm,
    one: &KForm,
    candidate: Option<&VectorField>,
    policy: &SamplingPolicy,
) -> Result<ReebSolution, StructureError> {
    let patch = one.patch();
    let n = patch.dim();
    let m = bordered(two, one)?;
    let mut rhs = vec![Expr::zero(); n + 1];
    rhs[n] = Expr::one();

    if let Some(q) = m.iter().map(|r| r.iter().map(|e| e.as_const().cloned()).collect::<Option<Vec<_>>>()).collect::<Option<QMatrix>>() {
        let b: Vec<_> = rhs.iter().map(|e| e.as_const().cloned().expect("constant")).collect();
        let kernel = n + 1 - crate::linalg::rank(&q);
        return Ok(match solve(&q, &b) {
            Some(x) if kernel == 0 => {
                let field = VectorField::new(patch, x[..n].iter().map(|c| Expr::constant(c.clone())).collect())?;
                let samples = vec![(vec![0.0; n], x[..n].iter().map(rational_to_f64).collect())];
                ReebSolution { field: Some(field), residual: Residual::Exact, unique: true, kernel_dim: 0, method: ReebMethod::Exact, samples }
            }
            _ => ReebSolution {
                field: None,
                residual: Residual::Exact,
                unique: false,
                kernel_dim: kernel,
                method: ReebMethod::Exact,
                samples: vec![],
            },
        });
    }

    if n < SYMBOLIC_MAX {
        let det = expr_det(&m);
        let dets = sample_values_over(patch.coords(), std::slice::from_ref(&det), policy)?;
        let singular = dets.iter().any(|d| d[0].abs() <= policy.tol);
        if !singular {
            return symbolic(two, one, &m, patch, policy);
        }
    }
    pointwise(&m, patch, candidate, policy)
}

fn symbolic(two: &KForm, one: &KForm, m: &[Vec<Expr>], patch: &Patch, policy: &SamplingPolicy) -> Result<ReebSolution, StructureError> {
    let n = patch.dim();
    let det = expr_det(m);
    let adj = expr_adjugate(m);
    let comps: Vec<Expr> = (0..n).map(|i| adj[i][n].div(&det)).collect();
    let field = VectorField::new(patch, comps)?;
    let check = identity_check("reeb", &defining_pairs(two, one, &field)?, policy);
    let coords: Vec<Expr> = patch.coords().iter().map(|c| Expr::var(c)).collect();
    let values = sample_values_over(patch.coords(), &[coords, field.comps().to_vec()].concat(), policy)?;
    let samples = values.into_iter().map(|v| (v[..n].to_vec(), v[n..].to_vec())).collect();
    Ok(ReebSolution {
        unique: true,
        kernel_dim: 0,
        residual: check.max_residual,
        field: check.passed().then_some(field),
        method: ReebMethod::Symbolic,
        samples,
    })
}

fn pointwise(m: &[Vec<Expr>], patch: &Patch, candidate: Option<&VectorField>, policy: &SamplingPolicy) -> Result<ReebSolution, StructureError> {
    let n = patch.dim();
    let mut watch: Vec<Expr> = m.iter().flatten().cloned().collect();
    if let Some(c) = candidate {
        watch.extend(c.comps().iter().cloned());
    }
    let points = Sampler::new(policy).points(patch.coords(), &watch)?;
    let mut samples = Vec::with_capacity(points.len());
    let mut worst = 0.0f64;
    let mut kernel = 0;
    let b: Vec<f64> = (0..=n).map(|i| if i == n { 1.0 } else { 0.0 }).collect();
    for p in &points {
        let rows: Vec<Vec<f64>> = p.values[..(n + 1) * (n + 1)].chunks(n + 1).map(<[f64]>::to_vec).collect();
        let scale = rows.iter().flatten().fold(1.0f64, |a, v| a.max(v.abs()));
        kernel = kernel.max(n + 1 - rank_f64(&rows, RANK_TOL));
        if kernel > 0 {
            continue;
        }
        let Some(x) = solve_f64(&rows, &b) else {
            kernel = kernel.max(1);
            continue;
        };
        if candidate.is_some() {
            let c = &p.values[(n + 1) * (n + 1)..];
            for i in 0..n {
                worst = worst.max((c[i] - x[i]).abs() / scale.max(x[i].abs()));
            }
        }
        samples.push((p.coords.clone(), x[..n].to_vec()));
    }
    if kernel > 0 {
        return Ok(ReebSolution {
            field: None,
            residual: Residual::None,
            unique: false,
            kernel_dim: kernel,
            method: ReebMethod::Pointwise,
            samples: vec![],
        });
    }
    let field = candidate.filter(|_| worst <= policy.tol).cloned();
    Ok(ReebSolution { field, residual: Residual::Numeric(worst), unique: true, kernel_dim: 0, method: ReebMethod::Pointwise, samples })
}

/// Whether the lifted Reeb field pushes forward to `base_xi` under the
/// canonical projection.
pub fn reeb_projection_check(sol: &ReebSolution, lp: &LiftedPatch, base_xi: &VectorField, policy: &SamplingPolicy) -> Check {
    let name = "Reeb field projects";
    if let Some(f) = &sol.field {
        return match lp.projection_pushforward(f) {
            Ok(v) => {
                let pairs: Vec<(Expr, Expr)> = v.comps().iter().cloned().zip(base_xi.comps().iter().cloned()).collect();
                identity_check(name, &pairs, policy)
            }
            Err(e) => Check::fail(name).with_detail(e.to_string()),
        };
    }
    if sol.samples.is_empty() {
        return Check::fail(name).with_detail("no Reeb field");
    }
    let n = lp.n();
    let mut worst = 0.0f64;
    for (coords, xi) in &sol.samples {
        let env: Env<f64> = (0..n).map(|i| (lp.base().coord(i).to_string(), coords[lp.index(i, 0)])).collect();
        for i in 0..n {
            match crate::expr::eval(base_xi.comp(i), &env, &crate::expr::F64Ring) {
                Ok(v) => worst = worst.max((v - xi[lp.index(i, 0)]).abs() / v.abs().max(1.0)),
                Err(e) => return Check::fail(name).with_detail(e.to_string()),
            }
        }
    }
    Check::from_bool(name, worst <= policy.tol)
        .with_residual(Residual::Numeric(worst))
        .with_samples(sol.samples.len())
        .with_detail("pointwise Reeb solve")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::geometry::Patch;

    fn contact(p: &Patch) -> KForm {
        KForm::from_terms(p, 1, [(vec![2], Expr::one()), (vec![0], parse("-y").unwrap())]).unwrap()
    }

    #[test]
    fn heisenberg_reeb_is_dz() {
        let p = Patch::new(&["x", "y", "z"]).unwrap();
        let sol = reeb_contact(&contact(&p), None, &SamplingPolicy::default()).unwrap();
        assert_eq!(sol.method, ReebMethod::Symbolic);
        let xi = sol.field.unwrap();
        let want = VectorField::coordinate(&p, 2);
        let pairs: Vec<_> = xi.comps().iter().cloned().zip(want.comps().iter().cloned()).collect();
        assert!(identity_check("dz", &pairs, &SamplingPolicy::default()).passed());
    }

    #[test]
    fn constant_cosymplectic_is_exact() {
        let p = Patch::new(&["x", "y", "z"]).unwrap();
        let om = KForm::dx(&p, 0).wedge(&KForm::dx(&p, 1)).unwrap();
        let sol = reeb_cosymplectic(&om, &KForm::dx(&p, 2), None, &SamplingPolicy::default()).unwrap();
        assert_eq!(sol.method, ReebMethod::Exact);
        assert_eq!(sol.field.unwrap(), VectorField::coordinate(&p, 2));
        let degenerate = reeb_cosymplectic(&KForm::zero(&p, 2).unwrap(), &KForm::dx(&p, 2), None, &SamplingPolicy::default()).unwrap();
        assert!(!degenerate.unique);
    }

    #[test]
    fn pointwise_confirms_candidate() {
        // dz - y dx + dw - u dv on R^5: bordered size 6 forces the numeric path
        let p = Patch::new(&["x", "y", "z", "u", "v"]).unwrap();
        let beta = KForm::from_terms(&p, 1, [
            (vec![2], Expr::one()),
            (vec![0], parse("-y").unwrap()),
            (vec![4], parse("-u*exp(x)").unwrap()),
        ])
        .unwrap();
        let pol = SamplingPolicy::default();
        let sol = reeb_contact(&beta, Some(&VectorField::coordinate(&p, 2)), &pol).unwrap();
        assert_eq!(sol.method, ReebMethod::Pointwise);
        assert!(sol.unique);
        let wrong = reeb_contact(&beta, Some(&VectorField::coordinate(&p, 0)), &pol).unwrap();
        assert!(wrong.field.is_none());
    }
}
