//! Canonical flat models for every kind and one planted single-axiom defect each.

use super::{Kind, Structure, SubRiemannianData};
use crate::expr::{parse, Expr};
use crate::geometry::{levi_civita, Bivector, Distribution, KForm, Patch, Tensor02, Tensor11, VectorField};

fn patch(names: &[&str]) -> Patch {
    Patch::new(names).expect("fixture coordinates")
}

fn e(s: &str) -> Expr {
    parse(s).expect("fixture expression")
}

fn two_form(p: &Patch, terms: &[(usize, usize, &str)]) -> KForm {
    KForm::from_terms(p, 2, terms.iter().map(|(i, j, c)| (vec![*i, *j], e(c)))).expect("2-form")
}

fn one_form(p: &Patch, terms: &[(usize, &str)]) -> KForm {
    KForm::from_terms(p, 1, terms.iter().map(|(i, c)| (vec![*i], e(c)))).expect("1-form")
}

/// `Σ dx_i ∧ dy_i` on coordinates `x1, y1, …, xn, yn`.
pub fn standard_symplectic(n: usize) -> Structure {
    let names: Vec<String> = (1..=n).flat_map(|i| [format!("x{i}"), format!("y{i}")]).collect();
    let p = Patch::new(&names).expect("coordinates");
    let terms: Vec<(usize, usize, &str)> = (0..n).map(|i| (2 * i, 2 * i + 1, "1")).collect();
    Structure::Symplectic { omega: two_form(&p, &terms) }
}

/// `dz + x dy` on ℝ³, Reeb field `∂z`.
pub fn contact_r3() -> Structure {
    let p = patch(&["x", "y", "z"]);
    Structure::Contact { beta: one_form(&p, &[(2, "1"), (1, "x")]) }
}

pub fn cosymplectic_r3() -> Structure {
    let p = patch(&["x", "y", "z"]);
    Structure::Cosymplectic { omega: two_form(&p, &[(0, 1, "1")]), eta: one_form(&p, &[(2, "1")]) }
}

/// `ω = e^{−x1}(dx1∧dy1 + dx2∧dy2)`, `θ = dx1`.
pub fn lcs_r4() -> Structure {
    let p = patch(&["x1", "y1", "x2", "y2"]);
    Structure::Lcs {
        omega: two_form(&p, &[(0, 1, "exp(-x1)"), (2, 3, "exp(-x1)")]),
        theta: one_form(&p, &[(0, "1")]),
    }
}

/// Conformal rescaling of `(dx∧dy, dz)` by `f = x + z`.
pub fn lcc_r3() -> Structure {
    let p = patch(&["x", "y", "z"]);
    Structure::Lcc {
        omega: two_form(&p, &[(0, 1, "exp(2*(x + z))")]),
        eta: one_form(&p, &[(2, "exp(x + z)")]),
        theta: one_form(&p, &[(0, "-1"), (2, "-1")]),
    }
}

pub fn euclidean(names: &[&str]) -> Structure {
    Structure::Riemannian { g: Tensor02::euclidean(&patch(names)) }
}

pub fn flat_kahler_r2() -> Structure {
    let p = patch(&["x", "y"]);
    Structure::Kahler {
        g: Tensor02::euclidean(&p),
        omega: two_form(&p, &[(0, 1, "1")]),
        j: Tensor11::parse(&p, &[&["0", "-1"], &["1", "0"]]).expect("J"),
    }
}

/// Heisenberg model: `η = ½(dz − y dx)`, `ξ = 2∂z`, `g = ¼(dx² + dy²) + η⊗η`, `Φ = ∇ξ`.
pub fn sasakian_r3() -> Structure {
    let p = patch(&["x", "y", "z"]);
    let eta = one_form(&p, &[(2, "1/2"), (0, "-y/2")]);
    let g = Tensor02::parse(&p, &[&["1/4", "0", "0"], &["0", "1/4", "0"], &["0", "0", "0"]])
        .expect("g")
        .add(&Tensor02::symmetric_product(&eta, &eta).expect("η⊗η"))
        .expect("g");
    let xi = VectorField::parse(&p, &["0", "0", "2"]).expect("ξ");
    Structure::Sasakian { phi: nabla_xi(&g, &xi), g, eta, xi }
}

/// `Φ^i_j = ∂_j ξ^i + Γ^i_{jk} ξ^k`.
fn nabla_xi(g: &Tensor02, xi: &VectorField) -> Tensor11 {
    let c = levi_civita(g).expect("Levi-Civita");
    let p = g.patch();
    let n = p.dim();
    let comps = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut terms = vec![p.partial(xi.comp(i), j)];
                    terms.extend((0..n).map(|k| c.get(i, j, k).mul(xi.comp(k))));
                    Expr::sum(&terms)
                })
                .collect()
        })
        .collect();
    Tensor11::new(p, comps).expect("Φ")
}

/// Jacobi pair of the contact form `dz − y dx`: `Λ = (∂x + y∂z) ∧ ∂y`, `Ξ = ∂z`.
pub fn jacobi_contact_r3() -> Structure {
    let p = patch(&["x", "y", "z"]);
    let lambda = Bivector::wedge(&VectorField::parse(&p, &["1", "0", "y"]).expect("X"), &VectorField::coordinate(&p, 1))
        .expect("Λ");
    Structure::Jacobi { lambda, xi: VectorField::coordinate(&p, 2) }
}

/// `2 dx·dy` with `𝒟 = span{∂x}`.
pub fn walker_r2() -> Structure {
    let p = patch(&["x", "y"]);
    Structure::Walker {
        g: Tensor02::parse(&p, &[&["0", "1"], &["1", "0"]]).expect("g"),
        distribution: Distribution::spanned_by(&p, vec![VectorField::coordinate(&p, 0)]).expect("𝒟"),
    }
}

/// `{∂x, ∂y + x∂z}` with unit Gram matrix and rigging `∂z`.
pub fn heisenberg() -> Structure {
    let p = patch(&["x", "y", "z"]);
    let gens = vec![VectorField::coordinate(&p, 0), VectorField::parse(&p, &["0", "1", "x"]).expect("Y")];
    Structure::SubRiemannian(SubRiemannianData {
        distribution: Distribution::spanned_by(&p, gens).expect("𝒟"),
        metric: Some(vec![vec![Expr::one(), Expr::zero()], vec![Expr::zero(), Expr::one()]]),
        rigging: vec![VectorField::coordinate(&p, 2)],
        depth: super::DEFAULT_BRACKET_DEPTH,
    })
}

pub fn volume_r2() -> Structure {
    let p = patch(&["x", "y"]);
    Structure::Orientation { volume: two_form(&p, &[(0, 1, "exp(x)")]) }
}

pub fn canonical(kind: Kind) -> Structure {
    match kind {
        Kind::Symplectic => standard_symplectic(2),
        Kind::Contact => contact_r3(),
        Kind::Cosymplectic => cosymplectic_r3(),
        Kind::Lcs => lcs_r4(),
        Kind::Lcc => lcc_r3(),
        Kind::Riemannian => euclidean(&["x", "y"]),
        Kind::Kahler => flat_kahler_r2(),
        Kind::Sasakian => sasakian_r3(),
        Kind::Jacobi => jacobi_contact_r3(),
        Kind::Walker => walker_r2(),
        Kind::SubRiemannian => heisenberg(),
        Kind::Orientation => volume_r2(),
    }
}

/// A structure violating exactly one axiom, and the check expected to fail.
#[derive(Debug, Clone)]
pub struct Planted {
    pub structure: Structure,
    pub defect: &'static str,
}

/// `J = A J₀ A⁻¹` with `A = [[I, 0], [S, I]]`, `S = diag(x2, 0)`: compatible
/// with `ω₀` but not integrable.
fn nonintegrable_kahler() -> Structure {
    let p = patch(&["x1", "x2", "y1", "y2"]);
    let j = Tensor11::parse(&p, &[
        &["x2", "0", "-1", "0"],
        &["0", "0", "0", "-1"],
        &["1 + x2^2", "0", "-x2", "0"],
        &["0", "1", "0", "0"],
    ])
    .expect("J");
    let g = Tensor02::parse(&p, &[
        &["1 + x2^2", "0", "-x2", "0"],
        &["0", "1", "0", "0"],
        &["-x2", "0", "1", "0"],
        &["0", "0", "0", "1"],
    ])
    .expect("g");
    Structure::Kahler { g, omega: two_form(&p, &[(0, 2, "1"), (1, 3, "1")]), j }
}

pub fn planted(kind: Kind) -> Planted {
    let (structure, defect) = match kind {
        Kind::Symplectic => {
            let p = patch(&["x1", "y1", "x2", "y2"]);
            (Structure::Symplectic { omega: two_form(&p, &[(0, 1, "exp(x2)"), (2, 3, "1")]) }, "closed")
        }
        Kind::Contact => {
            let p = patch(&["x", "y", "z"]);
            (Structure::Contact { beta: one_form(&p, &[(2, "1")]) }, "nondegenerate")
        }
        Kind::Cosymplectic => {
            let p = patch(&["x", "y", "z"]);
            (Structure::Cosymplectic { omega: two_form(&p, &[(0, 1, "1")]), eta: one_form(&p, &[(2, "exp(x)")]) }, "eta closed")
        }
        Kind::Lcs => {
            let p = patch(&["x1", "y1", "x2", "y2"]);
            (
                Structure::Lcs { omega: two_form(&p, &[(0, 1, "exp(-x1)")]), theta: one_form(&p, &[(0, "1")]) },
                "nondegenerate",
            )
        }
        Kind::Lcc => {
            let p = patch(&["x", "y", "z"]);
            (
                Structure::Lcc {
                    omega: two_form(&p, &[(0, 1, "exp(2*(x + z))")]),
                    eta: one_form(&p, &[(0, "exp(x + z)")]),
                    theta: one_form(&p, &[(0, "-1"), (2, "-1")]),
                },
                "nondegenerate",
            )
        }
        Kind::Riemannian => {
            let p = patch(&["x", "y"]);
            (Structure::Riemannian { g: Tensor02::parse(&p, &[&["1", "1"], &["0", "1"]]).expect("g") }, "symmetric")
        }
        Kind::Kahler => (nonintegrable_kahler(), "Nijenhuis = 0"),
        Kind::Sasakian => {
            let Structure::Sasakian { g, eta, xi, phi } = sasakian_r3() else { unreachable!() };
            let g2 = g.add(&Tensor02::symmetric_product(&eta, &eta).expect("η⊗η")).expect("g");
            (Structure::Sasakian { g: g2, eta, xi, phi }, "g(xi,xi) = 1")
        }
        Kind::Jacobi => {
            let p = patch(&["x", "y", "z"]);
            let lambda = Bivector::from_upper(&p, [(1, 2, Expr::one())]).expect("Λ");
            (Structure::Jacobi { lambda, xi: VectorField::coordinate(&p, 0) }, "[L,L] = 2 Xi ^ L")
        }
        Kind::Walker => {
            let p = patch(&["x", "y"]);
            let d = Distribution::spanned_by(&p, vec![VectorField::coordinate(&p, 0)]).expect("𝒟");
            (Structure::Walker { g: Tensor02::euclidean(&p), distribution: d }, "null")
        }
        Kind::SubRiemannian => {
            let p = patch(&["x", "y", "z"]);
            let d = Distribution::spanned_by(&p, vec![VectorField::coordinate(&p, 0), VectorField::coordinate(&p, 1)]).expect("𝒟");
            (
                Structure::SubRiemannian(SubRiemannianData { distribution: d, metric: None, rigging: vec![], depth: super::DEFAULT_BRACKET_DEPTH }),
                "bracket generating",
            )
        }
        Kind::Orientation => {
            let p = patch(&["x", "y"]);
            (Structure::Orientation { volume: two_form(&p, &[(0, 1, "x")]) }, "nonvanishing")
        }
    };
    Planted { structure, defect }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::zero_check;
    use crate::expr::SamplingPolicy;
    use crate::geometry::nijenhuis;

    #[test]
    fn canonical_models_pass() {
        let pol = SamplingPolicy::default();
        for k in Kind::ALL {
            let r = canonical(k).verify(&pol).unwrap();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn planted_kahler_is_nonintegrable() {
        let Structure::Kahler { j, .. } = nonintegrable_kahler() else { unreachable!() };
        assert!(!zero_check("N", &nijenhuis(&j).entries(), &SamplingPolicy::default()).passed());
    }

    #[test]
    fn single_defects_except_sasakian() {
        let pol = SamplingPolicy::default();
        for k in Kind::ALL.into_iter().filter(|k| *k != Kind::Sasakian) {
            let pl = planted(k);
            let r = pl.structure.verify(&pol).unwrap();
            assert_eq!(r.failing(), vec![pl.defect], "{k}: {r}");
        }
    }

    #[test]
    fn sasakian_rescaling_breaks_more_than_one_axiom() {
        let pl = planted(Kind::Sasakian);
        let r = pl.structure.verify(&SamplingPolicy::default()).unwrap();
        let failing = r.failing();
        assert!(failing.contains(&pl.defect) && failing.len() > 1, "{r}");
    }
}
