use std::collections::BTreeSet;

use super::reeb::{reeb_contact, reeb_cosymplectic, reeb_projection_check, ReebSolution};
use super::verify::metric_signatures;
use super::{check_parity, Structure, StructureError, SubRiemannianData};
use crate::checks::{identity_check, sample_values_over, zero_check};
use crate::expr::{Expr, Ring, SamplingPolicy};
use crate::geometry::{Distribution, KForm, SmoothMap, VectorField};
use crate::lift::{augment_contact, augment_odd, LiftError, LiftedPatch, SectionFamily};
use crate::linalg::expr_det;
use crate::report::{Check, Residual, VerificationReport};
use crate::weil::{LinearFunctional, WeilAlgebra};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Augmentation {
    #[default]
    Auto,
    Off,
}

#[derive(Debug, Clone)]
pub struct LiftConfig {
    pub algebra: WeilAlgebra,
    pub functional: LinearFunctional,
    /// Sections for averaged lifts; the basis sections when `None`.
    pub sections: Option<Vec<SmoothMap>>,
    pub augmentation: Augmentation,
    /// Base coordinate carrying the augmentation; the last one when `None`.
    pub z: Option<usize>,
    pub policy: SamplingPolicy,
}

impl LiftConfig {
    pub fn new(algebra: &WeilAlgebra, functional: &LinearFunctional) -> Self {
        LiftConfig {
            algebra: algebra.clone(),
            functional: functional.clone(),
            sections: None,
            augmentation: Augmentation::Auto,
            z: None,
            policy: SamplingPolicy::default(),
        }
    }

    pub fn with_policy(mut self, policy: SamplingPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_augmentation(mut self, a: Augmentation) -> Self {
        self.augmentation = a;
        self
    }
}

#[derive(Debug, Clone)]
pub struct LiftedStructure {
    pub lifted: LiftedPatch,
    pub structure: Structure,
    pub report: VerificationReport,
    pub reeb: Option<ReebSolution>,
}

/// The fields `Y^{(s)}` with components `[(Y^i)^A a_s]_k`, spanning the
/// `A`-module generated by `Y^A`.
pub fn module_lifts(lp: &LiftedPatch, y: &VectorField) -> Result<Vec<VectorField>, LiftError> {
    let ring = lp.ring();
    let lifted = lp.lift_elements(y.comps())?;
    (0..lp.l())
        .map(|s| {
            let b = ring.basis(s);
            let comps = lifted.iter().flat_map(|c| ring.mul(c, &b).into_coeffs()).collect();
            Ok(VectorField::new(lp.patch(), comps)?)
        })
        .collect()
}

/// Fibers of the projection: `span{∂x^{i,k} : k ≥ 2}`.
pub fn vertical_distribution(lp: &LiftedPatch) -> Result<Distribution, LiftError> {
    let gens = (0..lp.n())
        .flat_map(|i| (1..lp.l()).map(move |k| (i, k)))
        .map(|(i, k)| VectorField::coordinate(lp.patch(), lp.index(i, k)))
        .collect();
    Ok(Distribution::spanned_by(lp.patch(), gens)?)
}

fn lift_distribution(lp: &LiftedPatch, d: &Distribution) -> Result<Distribution, StructureError> {
    let mut gens = Vec::new();
    for y in d.generators() {
        gens.extend(module_lifts(lp, y)?);
    }
    let rank = d.rank() * lp.l();
    Ok(Distribution::new(lp.patch(), gens, rank)?)
}

/// `G_{(a,s),(b,t)} = λ(m_ab^A a_s a_t)` for a Gram matrix on generators.
fn lift_gram(lp: &LiftedPatch, m: &[Vec<Expr>], lambda: &LinearFunctional) -> Result<Vec<Vec<Expr>>, StructureError> {
    let ring = lp.ring();
    let l = lp.l();
    let r = m.len();
    let mut out = vec![vec![Expr::zero(); r * l]; r * l];
    for a in 0..r {
        let row = lp.lift_elements(&m[a])?;
        for (b, e) in row.iter().enumerate() {
            for s in 0..l {
                for t in 0..l {
                    let prod = ring.mul(&ring.mul(e, &ring.basis(s)), &ring.basis(t));
                    out[a * l + s][b * l + t] = lambda.apply(ring.base(), &prod);
                }
            }
        }
    }
    Ok(out)
}

fn product_signature(base: (usize, usize, usize), gram: (usize, usize, usize)) -> (usize, usize, usize) {
    let (p, q, z) = base;
    let (p2, q2, z2) = gram;
    let (pos, neg) = (p * p2 + q * q2, p * q2 + q * p2);
    (pos, neg, (p + q + z) * (p2 + q2 + z2) - pos - neg)
}

fn uniqueness_check(sol: &ReebSolution) -> Check {
    Check::from_bool("Reeb field unique", sol.unique)
        .with_residual(sol.residual)
        .with_samples(sol.samples.len())
        .with_detail(format!("solve kernel dimension {}", sol.kernel_dim))
}

/// Lifts `s` along `cfg` and re-runs the verifier for its kind on the lift.
pub fn lift_structure(s: &Structure, cfg: &LiftConfig) -> Result<LiftedStructure, StructureError> {
    let kind = s.kind();
    let base = s.patch();
    check_parity(kind, base)?;
    let lp = LiftedPatch::new(base, &cfg.algebra)?;
    let l = lp.l();
    if kind.odd_lift() && l % 2 == 0 {
        return Err(LiftError::OddDimensionRequired(l).into());
    }
    let lam = &cfg.functional;
    let pol = &cfg.policy;
    let z = cfg.z.unwrap_or(base.dim().saturating_sub(1));
    let augment = cfg.augmentation == Augmentation::Auto;
    let mut reeb = None;
    let mut extra: Vec<Check> = Vec::new();
    let mut notes: Vec<String> = Vec::new();

    let structure = match s {
        Structure::Symplectic { omega } => Structure::Symplectic { omega: lp.lift_form(omega, lam)? },
        Structure::Contact { beta } => {
            let mut b = lp.lift_form(beta, lam)?;
            if augment {
                b = augment_contact(&lp, &b, z, lam)?;
            }
            let base_sol = reeb_contact(beta, None, pol)?;
            let candidate = base_sol.field.as_ref().map(|f| lp.lift_vector_field(f)).transpose()?;
            let sol = reeb_contact(&b, candidate.as_ref(), pol)?;
            extra.push(uniqueness_check(&sol));
            match &base_sol.field {
                Some(xi) => extra.push(reeb_projection_check(&sol, &lp, xi, pol)),
                None => extra.push(Check::skipped("Reeb field projects", "base Reeb field has no closed form")),
            }
            reeb = Some(sol);
            Structure::Contact { beta: b }
        }
        Structure::Cosymplectic { omega, eta } => {
            let mut w = lp.lift_form(omega, lam)?;
            if augment {
                w = augment_odd(&lp, &w, z, lam)?;
            }
            let e = lp.lift_form(eta, lam)?;
            let base_sol = reeb_cosymplectic(omega, eta, None, pol)?;
            let candidate = base_sol.field.as_ref().map(|f| lp.lift_vector_field(f)).transpose()?;
            let sol = reeb_cosymplectic(&w, &e, candidate.as_ref(), pol)?;
            extra.push(uniqueness_check(&sol));
            match &base_sol.field {
                Some(xi) => extra.push(reeb_projection_check(&sol, &lp, xi, pol)),
                None => extra.push(Check::skipped("Reeb field projects", "base Reeb field has no closed form")),
            }
            reeb = Some(sol);
            Structure::Cosymplectic { omega: w, eta: e }
        }
        Structure::Lcs { omega, theta } => Structure::Lcs { omega: lp.lift_form(omega, lam)?, theta: lp.lift_form(theta, lam)? },
        Structure::Lcc { omega, eta, theta } => {
            let mut w = lp.lift_form(omega, lam)?;
            if augment {
                w = augment_odd(&lp, &w, z, lam)?;
            }
            Structure::Lcc { omega: w, eta: lp.lift_form(eta, lam)?, theta: lp.lift_form(theta, lam)? }
        }
        Structure::Riemannian { g } => {
            let gl = lp.lift_metric(g, lam)?;
            let base_sig = metric_signatures(g, pol)?;
            let lifted_sig = metric_signatures(&gl, pol)?;
            let gram = lam.gram_signature();
            let predicted: BTreeSet<_> = base_sig.iter().map(|b| product_signature(*b, gram)).collect();
            let fmt = |s: &BTreeSet<(usize, usize, usize)>| s.iter().map(|(p, q, z)| format!("({p},{q},{z})")).collect::<Vec<_>>().join(" ");
            extra.push(
                Check::from_bool("signature = base x Gram", predicted == lifted_sig)
                    .informational()
                    .with_samples(pol.samples)
                    .with_detail(format!("lifted {}, predicted {}", fmt(&lifted_sig), fmt(&predicted))),
            );
            if gram.1 > 0 || gram.2 > 0 {
                notes.push(format!(
                    "Gram form of the functional has signature ({},{},{}), so the lifted metric is not positive definite",
                    gram.0, gram.1, gram.2
                ));
            }
            Structure::Riemannian { g: gl }
        }
        Structure::Kahler { g, omega, j } => Structure::Kahler {
            g: lp.lift_metric(g, lam)?,
            omega: lp.lift_form(omega, lam)?,
            j: lp.lift_tensor11(j)?,
        },
        Structure::Sasakian { g, eta, xi, phi } => {
            let mut e = lp.lift_form(eta, lam)?;
            if augment {
                e = augment_contact(&lp, &e, z, lam)?;
            }
            Structure::Sasakian { g: lp.lift_metric(g, lam)?, eta: e, xi: lp.lift_vector_field(xi)?, phi: lp.lift_tensor11(phi)? }
        }
        Structure::Jacobi { lambda, xi } => {
            let fam = match &cfg.sections {
                Some(ss) => SectionFamily::new(&lp, ss.clone())?,
                None => lp.basis_sections(),
            };
            notes.push(format!("averaged over {} sections", fam.sections().len()));
            Structure::Jacobi { lambda: fam.averaged_lift_bivector(lambda)?, xi: fam.averaged_lift_vector(xi)? }
        }
        Structure::Walker { g, distribution } => {
            Structure::Walker { g: lp.lift_metric(g, lam)?, distribution: lift_distribution(&lp, distribution)? }
        }
        Structure::SubRiemannian(d) => {
            let metric = d.metric.as_ref().map(|m| lift_gram(&lp, m, lam)).transpose()?;
            let mut rigging = Vec::new();
            for r in &d.rigging {
                rigging.extend(module_lifts(&lp, r)?);
            }
            Structure::SubRiemannian(SubRiemannianData {
                distribution: lift_distribution(&lp, &d.distribution)?,
                metric,
                rigging,
                depth: d.depth,
            })
        }
        Structure::Orientation { volume } => {
            let f = volume.top_coefficient()?.substitute(&base_to_first(&lp));
            let idx: Vec<usize> = (0..lp.patch().dim()).collect();
            let nu = KForm::from_terms(lp.patch(), idx.len(), [(idx, f.powi(l as i32))])?;
            Structure::Orientation { volume: nu }
        }
    };

    let mut report = structure.verify(pol)?;
    report.subject = format!("{} lifted to {} ({} dims)", kind, cfg.algebra.name(), lp.patch().dim());
    for c in extra {
        report.push(c);
    }
    for n in notes {
        report.note(n);
    }
    Ok(LiftedStructure { lifted: lp, structure, report, reeb })
}

fn base_to_first(lp: &LiftedPatch) -> std::collections::HashMap<String, Expr> {
    (0..lp.n()).map(|i| (lp.base().coord(i).to_string(), lp.coord_expr(i, 0))).collect()
}

/// `dθ = 0` exactly when `d(θ^λ) = 0`.
pub fn lee_closedness(theta: &KForm, lp: &LiftedPatch, lambda: &LinearFunctional, policy: &SamplingPolicy) -> Result<VerificationReport, StructureError> {
    let lifted = lp.lift_form(theta, lambda)?;
    let base = zero_check("d theta = 0", &theta.d()?.coefficients(), policy).informational();
    let up = zero_check("d theta^lambda = 0", &lifted.d()?.coefficients(), policy).informational();
    let agree = Check::from_bool("closedness agrees", base.passed() == up.passed()).with_residual(Residual::None);
    let mut r = VerificationReport::new("lee form closedness");
    r.push(base);
    r.push(up);
    r.push(agree);
    Ok(r)
}

/// `det J(φ^A) = (det Jφ ∘ π)^l`, checked symbolically and by sign at samples.
pub fn verify_orientation_lift(phi: &SmoothMap, algebra: &WeilAlgebra, policy: &SamplingPolicy) -> Result<VerificationReport, StructureError> {
    let src = LiftedPatch::new(phi.source(), algebra)?;
    let tgt = LiftedPatch::new(phi.target(), algebra)?;
    let lifted = src.lift_map(&tgt, phi)?;
    let l = src.l();
    let det_up = expr_det(&lifted.jacobian());
    let det_base = expr_det(&phi.jacobian()).substitute(&base_to_first(&src));
    let want = det_base.powi(l as i32);
    let mut r = VerificationReport::new(format!("orientation lift over {}", algebra.name()));
    r.push(identity_check("det J(phi^A) = (det J phi)^l", &[(det_up.clone(), want.clone())], policy));
    let rows = sample_values_over(src.patch().coords(), &[det_up, det_base], policy)?;
    if rows.iter().any(|v| v[1].abs() <= policy.tol) {
        return Err(StructureError::SingularJacobian);
    }
    let agree = rows.iter().all(|v| v[0].signum() == v[1].powi(l as i32).signum());
    r.push(Check::from_bool("signs agree", agree).with_samples(rows.len()));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::geometry::Patch;
    use crate::weil::FunctionalPreset;

    fn cfg(alg: &WeilAlgebra, p: FunctionalPreset) -> LiftConfig {
        LiftConfig::new(alg, &LinearFunctional::preset(alg, p))
    }

    #[test]
    fn symplectic_plane_lifts() {
        let p = Patch::new(&["x", "y"]).unwrap();
        let w = KForm::dx(&p, 0).wedge(&KForm::dx(&p, 1)).unwrap();
        let d = WeilAlgebra::dual();
        let out = lift_structure(&Structure::Symplectic { omega: w }, &cfg(&d, FunctionalPreset::Top)).unwrap();
        assert!(out.report.passed(), "{}", out.report);
        assert_eq!(out.lifted.patch().dim(), 4);
    }

    #[test]
    fn even_algebra_rejected_for_cosymplectic() {
        let p = Patch::new(&["x", "y", "z"]).unwrap();
        let s = Structure::Cosymplectic { omega: KForm::dx(&p, 0).wedge(&KForm::dx(&p, 1)).unwrap(), eta: KForm::dx(&p, 2) };
        let d = WeilAlgebra::dual();
        assert!(matches!(
            lift_structure(&s, &cfg(&d, FunctionalPreset::Top)),
            Err(StructureError::Lift(LiftError::OddDimensionRequired(2)))
        ));
    }

    #[test]
    fn module_lifts_of_coordinate_field() {
        let p = Patch::new(&["x"]).unwrap();
        let lp = LiftedPatch::new(&p, &WeilAlgebra::jet(2).unwrap()).unwrap();
        let ys = module_lifts(&lp, &VectorField::coordinate(&p, 0)).unwrap();
        for (s, y) in ys.iter().enumerate() {
            assert_eq!(y, &VectorField::coordinate(lp.patch(), s));
        }
    }

    #[test]
    fn lee_form_closedness_transfers() {
        let p = Patch::new(&["x", "y"]).unwrap();
        let lp = LiftedPatch::new(&p, &WeilAlgebra::dual()).unwrap();
        let lam = LinearFunctional::preset(lp.algebra(), FunctionalPreset::Top);
        let pol = SamplingPolicy::default();
        let closed = lee_closedness(&KForm::dx(&p, 0), &lp, &lam, &pol).unwrap();
        assert!(closed.passed() && closed.check("d theta^lambda = 0").unwrap().passed());
        let open = KForm::from_terms(&p, 1, [(vec![1], parse("x").unwrap())]).unwrap();
        let r = lee_closedness(&open, &lp, &lam, &pol).unwrap();
        assert!(r.passed() && !r.check("d theta^lambda = 0").unwrap().passed());
    }

    #[test]
    fn swap_lifts_to_positive_determinant() {
        let p = Patch::new(&["x", "y"]).unwrap();
        let swap = SmoothMap::parse(&p, &p, &["y", "x"]).unwrap();
        let r = verify_orientation_lift(&swap, &WeilAlgebra::dual(), &SamplingPolicy::default()).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn product_signature_counts() {
        assert_eq!(product_signature((2, 0, 0), (1, 1, 0)), (2, 2, 0));
        assert_eq!(product_signature((1, 1, 0), (2, 1, 0)), (3, 3, 0));
    }
}
