//! Identities involving Christoffel symbols, evaluated either on symbolic
//! symbols or pointwise when the metric inverse is not formed symbolically.

use std::collections::BTreeSet;

use crate::checks::zero_check;
use crate::expr::{Expr, ExprRing, F64Ring, Ring, Sampler, SamplingPolicy};
use crate::geometry::{ChristoffelProvider, Patch};
use crate::report::{Check, Residual};

pub(crate) type G3<T> = Vec<Vec<Vec<T>>>;

/// An identity `residuals(Γ, inputs) = 0` written once for every scalar ring.
pub(crate) trait Formula {
    fn residuals<R: Ring>(&self, ring: &R, gamma: &G3<R::Elem>, vals: &[R::Elem]) -> Vec<R::Elem>;
}

pub(crate) fn connection_check<F: Formula>(
    name: &str,
    patch: &Patch,
    provider: &ChristoffelProvider,
    inputs: &[Expr],
    formula: &F,
    policy: &SamplingPolicy,
) -> Check {
    match provider {
        ChristoffelProvider::Symbolic(c) => {
            let res = formula.residuals(&ExprRing, &c.gamma().to_vec(), inputs);
            zero_check(name, &res, policy)
        }
        ChristoffelProvider::Pointwise { .. } => pointwise(name, patch, provider, inputs, formula, policy),
    }
}

fn pointwise<F: Formula>(
    name: &str,
    patch: &Patch,
    provider: &ChristoffelProvider,
    inputs: &[Expr],
    formula: &F,
    policy: &SamplingPolicy,
) -> Check {
    let mut vars: Vec<String> = patch.coords().to_vec();
    let extra: BTreeSet<String> = inputs.iter().flat_map(Expr::free_vars).collect();
    vars.extend(extra.into_iter().filter(|v| patch.index_of(v).is_none()));
    let points = match Sampler::new(policy).points(&vars, inputs) {
        Ok(p) => p,
        Err(e) => return Check::fail(name).with_detail(e.to_string()),
    };
    let mut worst = 0.0f64;
    for p in &points {
        let gamma = match provider.at(&p.env) {
            Ok(g) => g,
            Err(e) => return Check::fail(name).with_detail(e.to_string()),
        };
        let scale = p.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for r in formula.residuals(&F64Ring, &gamma, &p.values) {
            worst = worst.max(r.abs() / scale);
        }
    }
    Check::from_bool(name, worst <= policy.tol)
        .with_residual(Residual::Numeric(worst))
        .with_samples(points.len())
        .with_detail("pointwise Christoffel symbols")
}

fn sum<R: Ring>(ring: &R, terms: impl IntoIterator<Item = R::Elem>) -> R::Elem {
    terms.into_iter().fold(ring.zero(), |a, b| if ring.is_zero(&b) { a } else { ring.add(&a, &b) })
}

fn prod<R: Ring>(ring: &R, a: &R::Elem, b: &R::Elem) -> R::Elem {
    if ring.is_zero(a) || ring.is_zero(b) {
        ring.zero()
    } else {
        ring.mul(a, b)
    }
}

/// `Φ = ∇ξ`, i.e. `Φ^i_j = ∂_j ξ^i + Γ^i_{jk} ξ^k`.
///
/// Inputs: `ξ` (n), `∂_j ξ^i` at `n + j·n + i`, `Φ^i_j` at `n + n² + i·n + j`.
pub(crate) struct PhiIsNablaXi {
    pub n: usize,
}

impl PhiIsNablaXi {
    pub fn inputs(patch: &Patch, xi: &[Expr], phi: &[Vec<Expr>]) -> Vec<Expr> {
        let n = patch.dim();
        let mut v = xi.to_vec();
        for j in 0..n {
            for x in xi {
                v.push(patch.partial(x, j));
            }
        }
        v.extend(phi.iter().flatten().cloned());
        v
    }
}

impl Formula for PhiIsNablaXi {
    fn residuals<R: Ring>(&self, ring: &R, gamma: &G3<R::Elem>, vals: &[R::Elem]) -> Vec<R::Elem> {
        let n = self.n;
        let xi = &vals[..n];
        let dxi = |j: usize, i: usize| &vals[n + j * n + i];
        let phi = |i: usize, j: usize| &vals[n + n * n + i * n + j];
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let nabla = sum(ring, std::iter::once(dxi(j, i).clone()).chain((0..n).map(|k| prod(ring, &gamma[i][j][k], &xi[k]))));
                out.push(ring.sub(phi(i, j), &nabla));
            }
        }
        out
    }
}

/// `(∇_k T)^i_j = ∂_k T^i_j + Γ^i_{kl} T^l_j − Γ^l_{kj} T^i_l`.
///
/// Inputs: `T^i_j` at `i·n + j`, `∂_k T^i_j` at `n² + (k·n + i)·n + j`,
/// followed by whatever the wrapping formula needs.
fn nabla_11<R: Ring>(ring: &R, gamma: &G3<R::Elem>, vals: &[R::Elem], n: usize, k: usize, i: usize, j: usize) -> R::Elem {
    let t = |a: usize, b: usize| &vals[a * n + b];
    let dt = &vals[n * n + (k * n + i) * n + j];
    let plus = (0..n).map(|l| prod(ring, &gamma[i][k][l], t(l, j)));
    let minus = (0..n).map(|l| ring.neg(&prod(ring, &gamma[l][k][j], t(i, l))));
    sum(ring, std::iter::once(dt.clone()).chain(plus).chain(minus))
}

pub(crate) fn tensor11_inputs(patch: &Patch, t: &[Vec<Expr>]) -> Vec<Expr> {
    let n = patch.dim();
    let mut v: Vec<Expr> = t.iter().flatten().cloned().collect();
    for k in 0..n {
        for row in t {
            for e in row {
                v.push(patch.partial(e, k));
            }
        }
    }
    v
}

/// `∇T = 0` for a (1,1)-tensor.
pub(crate) struct ParallelTensor11 {
    pub n: usize,
}

impl Formula for ParallelTensor11 {
    fn residuals<R: Ring>(&self, ring: &R, gamma: &G3<R::Elem>, vals: &[R::Elem]) -> Vec<R::Elem> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out.push(nabla_11(ring, gamma, vals, n, k, i, j));
                }
            }
        }
        out
    }
}

/// `(∇_{∂_k} Φ) ∂_j = η_j ∂_k − g_kj ξ`.
///
/// Inputs: [`tensor11_inputs`] of `Φ`, then `η` (n), `g` (n²), `ξ` (n).
pub(crate) struct SasakianCovariant {
    pub n: usize,
}

impl Formula for SasakianCovariant {
    fn residuals<R: Ring>(&self, ring: &R, gamma: &G3<R::Elem>, vals: &[R::Elem]) -> Vec<R::Elem> {
        let n = self.n;
        let base = n * n + n * n * n;
        let eta = |j: usize| &vals[base + j];
        let g = |k: usize, j: usize| &vals[base + n + k * n + j];
        let xi = |i: usize| &vals[base + n + n * n + i];
        let mut out = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let lhs = nabla_11(ring, gamma, vals, n, k, i, j);
                    let mut rhs = ring.neg(&prod(ring, g(k, j), xi(i)));
                    if i == k {
                        rhs = ring.add(&rhs, eta(j));
                    }
                    out.push(ring.sub(&lhs, &rhs));
                }
            }
        }
        out
    }
}

/// `Γ` and input values at one sample point.
type GammaSample = (G3<f64>, Vec<f64>);

/// Numeric `Γ` and input values at each sample point, for rank-type tests.
pub(crate) fn sample_with_gamma(
    patch: &Patch,
    provider: &ChristoffelProvider,
    inputs: &[Expr],
    policy: &SamplingPolicy,
) -> Result<Vec<GammaSample>, String> {
    let points = Sampler::new(policy).points(patch.coords(), inputs).map_err(|e| e.to_string())?;
    points
        .into_iter()
        .map(|p| provider.at(&p.env).map(|g| (g, p.values)).map_err(|e| e.to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{levi_civita, Tensor02, Tensor11};

    #[test]
    fn parallel_tensor_symbolic_and_pointwise_agree() {
        let p = Patch::new(&["x", "y"]).unwrap();
        let g = Tensor02::parse(&p, &[&["y^(-2)", "0"], &["0", "y^(-2)"]]).unwrap();
        let j = Tensor11::parse(&p, &[&["0", "-1"], &["1", "0"]]).unwrap();
        let pol = SamplingPolicy::default();
        let inputs = tensor11_inputs(&p, j.comps());
        let sym = ChristoffelProvider::Symbolic(levi_civita(&g).unwrap());
        let pw = ChristoffelProvider::pointwise(&g);
        let f = ParallelTensor11 { n: 2 };
        assert!(connection_check("sym", &p, &sym, &inputs, &f, &pol).passed());
        assert!(connection_check("pw", &p, &pw, &inputs, &f, &pol).passed());
        let bent = Tensor11::parse(&p, &[&["0", "-x"], &["1/x", "0"]]).unwrap();
        let inputs = tensor11_inputs(&p, bent.comps());
        assert!(!connection_check("pw", &p, &pw, &inputs, &f, &pol).passed());
    }
}
