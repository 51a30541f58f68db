use std::collections::BTreeSet;

use super::local::{
    connection_check, sample_with_gamma, tensor11_inputs, ParallelTensor11, PhiIsNablaXi, SasakianCovariant,
};
use super::{check_degree, check_parity, Kind, StructureError, SubRiemannianData};
use crate::checks::{identity_check, sample_values_over, zero_check};
use crate::expr::{Expr, SamplingPolicy};
use crate::geometry::{
    nijenhuis, pointwise_rank, schouten_ll, Bivector, ChristoffelProvider, Distribution, KForm, Patch, Tensor02,
    Tensor11, Trivector, VectorField, RANK_TOL,
};
use crate::linalg::{rank_f64, signature_f64};
use crate::report::{Check, Residual, VerificationReport};

/// Smallest absolute value accepted for a top-degree coefficient at a sample.
pub const NONVANISHING_THRESHOLD: f64 = 1e-6;

/// Default iterated-bracket depth for bracket generation.
pub const DEFAULT_BRACKET_DEPTH: usize = 4;

fn full_rank_check(name: &str, rows: &[Vec<Expr>], patch: &Patch, policy: &SamplingPolicy) -> Check {
    let n = rows.len();
    match pointwise_rank(rows, patch, policy) {
        Ok(r) => Check::from_bool(name, *r.start() == n && *r.end() == n)
            .with_samples(policy.samples)
            .with_detail(format!("rank {}..={} of {n}", r.start(), r.end())),
        Err(e) => Check::fail(name).with_detail(e.to_string()),
    }
}

/// `|c| > NONVANISHING_THRESHOLD` with one sign at every sample.
fn top_form_check(name: &str, top: &KForm, policy: &SamplingPolicy) -> Check {
    let c = match top.top_coefficient() {
        Ok(c) => c,
        Err(e) => return Check::fail(name).with_detail(e.to_string()),
    };
    if let Some(q) = c.as_const() {
        let v = crate::expr::rational_to_f64(q);
        return Check::from_bool(name, v.abs() > NONVANISHING_THRESHOLD)
            .with_residual(Residual::Exact)
            .with_detail(format!("constant top coefficient {c}"));
    }
    match sample_values_over(top.patch().coords(), std::slice::from_ref(&c), policy) {
        Ok(rows) => {
            let min = rows.iter().map(|r| r[0].abs()).fold(f64::INFINITY, f64::min);
            let signs: BTreeSet<bool> = rows.iter().map(|r| r[0] > 0.0).collect();
            Check::from_bool(name, min > NONVANISHING_THRESHOLD && signs.len() == 1)
                .with_samples(rows.len())
                .with_detail(format!("min |top coefficient| = {min:.3e}, signs seen = {}", signs.len()))
        }
        Err(e) => Check::fail(name).with_detail(e.to_string()),
    }
}

fn top_degree(form: &KForm) -> bool {
    form.degree() >= form.patch().dim()
}

fn closed_check(name: &str, form: &KForm, policy: &SamplingPolicy) -> Result<Check, StructureError> {
    if top_degree(form) {
        return Ok(Check::pass(name).with_residual(Residual::Exact).with_detail("top degree"));
    }
    Ok(zero_check(name, &form.d()?.coefficients(), policy))
}

fn form_identity(name: &str, lhs: &KForm, rhs: &KForm, policy: &SamplingPolicy) -> Result<Check, StructureError> {
    Ok(zero_check(name, &lhs.sub(rhs)?.coefficients(), policy))
}

fn pairs(a: Vec<Expr>, b: Vec<Expr>) -> Vec<(Expr, Expr)> {
    a.into_iter().zip(b).collect()
}

pub fn verify_symplectic(omega: &KForm, policy: &SamplingPolicy) -> Result<VerificationReport, StructureError> {
    check_parity(Kind::Symplectic, omega.patch())?;
    check_degree(omega, 2, "omega")?;
    let mut r = VerificationReport::new("symplectic");
    r.push(closed_check("closed", omega, policy)?);
    r.push(full_rank_check("nondegenerate", &omega.matrix()?, omega.patch(), policy));
    Ok(r)
}

pub fn verify_contact(beta: &KForm, policy: &SamplingPolicy) -> Result<VerificationReport, StructureError> {
    check_parity(Kind::Contact, beta.patch())?;
    check_degree(beta, 1, "beta")?;
    let n = beta.patch().dim() / 2;
    let top = beta.wedge(&beta.d()?.power(n)?)?;
    let mut r = VerificationReport::new("contact");
    r.push(top_form_check("nondegenerate", &top, policy));
    Ok(r)
}

pub fn verify_cosymplectic(omega: &KForm, eta: &KForm, policy: &SamplingPolicy) -> Result<VerificationReport, StructureError> {
    check_parity(Kind::Cosymplectic, omega.patch())?;
    check_degree(omega, 2, "omega")?;
    check_degree(eta, 1, "eta")?;
    let n = omega.patch().dim() / 2;
    let mut r = VerificationReport::new("cosymplectic");
    r.push(closed_check("omega closed", omega, policy)?);
    r.push(closed_check("eta closed", eta, policy)?);
    r.push(top_form_check("nondegenerate", &eta.wedge(&omega.power(n)?)?, policy));
    Ok(r)
}

pub fn verify_lcs(omega: &KForm, theta: &KForm, policy: &SamplingPolicy) -> Result<VerificationReport, StructureError> {
    check_parity(Kind::Lcs, omega.patch())?;
    check_degree(omega, 2, "omega")?;
    check_degree(theta, 1, "theta")?;
    let mut r = VerificationReport::new("lcs");
    r.push(closed_check("theta closed", theta, policy)?);
    if top_degree(omega) {
        r.push(Check::pass("d omega = -theta ^ omega").with_residual(Residual::Exact).with_detail("top degree"));
    } else {
        r.push(form_identity("d omega = -theta ^ omega", &omega.d()?, &theta.wedge(omega)?.neg(), policy)?);
    }
    r.push(full_rank_check("nondegenerate", &omega.matrix()?, omega.patch(), policy));
    Ok(r)
}

pub fn verify_lcc(omega: &KForm, eta: &KForm, theta: &KForm, policy: &SamplingPolicy) -> Result<VerificationReport, StructureError> {
    check_parity(Kind::Lcc, omega.patch())?;
    check_degree(omega, 2, "omega")?;
    check_degree(eta, 1, "eta")?;
    check_degree(theta, 1, "theta")?;
    let n = omega.patch().dim() / 2;
    let mut r = VerificationReport::new("lcc");
    r.push(closed_check("theta closed", theta, policy)?);
    let two = Expr::int(-2);
    r.push(form_identity("d omega = -2 theta ^ omega", &omega.d()?, &theta.wedge(omega)?.scale(&two), policy)?);
    r.push(form_identity("d eta = -theta ^ eta", &eta.d()?, &theta.wedge(eta)?.neg(), policy)?);
    r.push(top_form_check("nondegenerate", &eta.wedge(&omega.power(n)?)?, policy));
    Ok(r)
}

/// Distinct `(positive, negative, zero)` counts of `g` over the samples.
pub fn metric_signatures(g: &Tensor02, policy: &SamplingPolicy) -> Result<BTreeSet<(usize, usize, usize)>, StructureError> {
    let n = g.patch().dim();
    let rows = sample_values_over(g.patch().coords(), &g.entries(), policy)?;
    Ok(rows
        .iter()
        .map(|v| {
            let m: Vec<Vec<f64>> = v.chunks(n).map(|c| c.to_vec()).collect();
            let sym: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| 0.5 * (m[i][j] + m[j][i])).collect()).collect();
            signature_f64(&sym, RANK_TOL)
        })
        .collect())
}

fn signature_checks(g: &Tensor02, policy: &SamplingPolicy) -> Vec<Check> {
    match metric_signatures(g, policy) {
        Ok(sigs) => {
            let text: Vec<String> = sigs.iter().map(|(p, q, z)| format!("({p},{q},{z})")).collect();
            let n = g.patch().dim();
            vec![
                Check::from_bool("signature constant", sigs.len() == 1)
                    .informational()
                    .with_samples(policy.samples)
                    .with_detail(format!("signatures (+,-,0): {}", text.join(" "))),
                Check::from_bool("positive definite", sigs.len() == 1 && sigs.contains(&(n, 0, 0)))
                    .informational()
                    .with_samples(policy.samples),
            ]
        }
        Err(e) => vec![Check::fail("signature constant").informational().with_detail(e.to_string())],
    }
}

pub fn verify_riemannian(g: &Tensor02, policy: &SamplingPolicy) -> Result<VerificationReport, StructureError> {
    let mut r = VerificationReport::new("riemannian");
    r.push(identity_check("symmetric", &g.symmetry_pairs(), policy));
    let sym: Vec<Vec<Expr>> = {
        let c = g.comps();
        let half = Expr::ratio(1, 2);
        (0..c.len()).map(|i| (0..c.len()).map(|j| half.mul(&c[i][j].add(&c[j][i]))).collect()).collect()
    };
    r.push(full_rank_check("nondegenerate", &sym, g.patch(), policy));
    for c in signature_checks(g, policy) {
        r.push(c);
    }
    Ok(r)
}

fn nabla_check(
    name: &str,
    g: &Tensor02,
    t: &Tensor11,
    policy: &SamplingPolicy,
) -> Check {
    match ChristoffelProvider::for_metric(g) {
        Ok(provider) => {
            let inputs = tensor11_inputs(g.patch(), t.comps());
            connection_check(name, g.patch(), &provider, &inputs, &ParallelTensor11 { n: g.patch().dim() }, policy)
        }
        Err(e) => Check::fail(name).with_detail(e.to_string()),
    }
}

pub fn verify_kahler(g: &Tensor02, omega: &KForm, j: &Tensor11, policy: &SamplingPolicy) -> Result<VerificationReport, StructureError> {
    check_parity(Kind::Kahler, g.patch())?;
    check_degree(omega, 2, "omega")?;
    let p = g.patch();
    let n = p.dim();
    let mut r = VerificationReport::new("kahler");
    let minus_id: Vec<Expr> = Tensor11::identity(p).entries().iter().map(Expr::neg).collect();
    r.push(identity_check("J^2 = -Id", &pairs(j.compose(j)?.entries(), minus_id), policy));
    r.push(identity_check("g(J.,J.) = g", &pairs(g.pullback_by(j).entries(), g.entries()), policy));
    let om = omega.matrix()?;
    let mut assoc = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let terms: Vec<Expr> = (0..n).map(|l| j.get(l, a).mul(g.get(l, b))).collect();
            assoc.push((om[a][b].clone(), Expr::sum(&terms)));
        }
    }
    r.push(identity_check("omega = g(J.,.)", &assoc, policy));
    r.push(closed_check("omega closed", omega, policy)?);
    r.push(zero_check("Nijenhuis = 0", &nijenhuis(j).entries(), policy));
    r.push(nabla_check("nabla J = 0", g, j, policy).informational());
    Ok(r)
}

pub fn verify_sasakian(
    g: &Tensor02,
    eta: &KForm,
    xi: &VectorField,
    phi: &Tensor11,
    policy: &SamplingPolicy,
) -> Result<VerificationReport, StructureError> {
    check_parity(Kind::Sasakian, g.patch())?;
    check_degree(eta, 1, "eta")?;
    let p = g.patch();
    let n = p.dim();
    let e = eta.covector()?;
    let mut r = VerificationReport::new("sasakian");
    r.push(zero_check("xi Killing", &g.lie_derivative(xi)?.entries(), policy));
    r.push(identity_check("g(xi,xi) = 1", &[(g.apply(xi, xi), Expr::one())], policy));
    let dual: Vec<(Expr, Expr)> = (0..n)
        .map(|i| (e[i].clone(), Expr::sum(&(0..n).map(|j| g.get(i, j).mul(xi.comp(j))).collect::<Vec<_>>())))
        .collect();
    r.push(identity_check("eta = g(.,xi)", &dual, policy));
    let provider = ChristoffelProvider::for_metric(g);
    match &provider {
        Ok(pr) => {
            let inputs = PhiIsNablaXi::inputs(p, xi.comps(), phi.comps());
            r.push(connection_check("Phi = nabla xi", p, pr, &inputs, &PhiIsNablaXi { n }, policy));
        }
        Err(err) => r.push(Check::fail("Phi = nabla xi").with_detail(err.to_string())),
    }
    let mut sq = Vec::with_capacity(n * n);
    let phi2 = phi.compose(phi)?;
    for i in 0..n {
        for j in 0..n {
            let mut rhs = xi.comp(i).mul(&e[j]);
            if i == j {
                rhs = rhs.sub(&Expr::one());
            }
            sq.push((phi2.get(i, j).clone(), rhs));
        }
    }
    r.push(identity_check("Phi^2 = -Id + eta (x) xi", &sq, policy));
    let eta_eta = Tensor02::symmetric_product(eta, eta)?;
    r.push(identity_check(
        "g(Phi.,Phi.) = g - eta (x) eta",
        &pairs(g.pullback_by(phi).entries(), g.sub(&eta_eta)?.entries()),
        policy,
    ));
    match &provider {
        Ok(pr) => {
            let mut inputs = tensor11_inputs(p, phi.comps());
            inputs.extend(e.iter().cloned());
            inputs.extend(g.entries());
            inputs.extend(xi.comps().iter().cloned());
            r.push(connection_check(
                "(nabla_X Phi)Y = eta(Y)X - g(X,Y)xi",
                p,
                pr,
                &inputs,
                &SasakianCovariant { n },
                policy,
            ));
        }
        Err(err) => r.push(Check::fail("(nabla_X Phi)Y = eta(Y)X - g(X,Y)xi").with_detail(err.to_string())),
    }
    Ok(r)
}

pub fn verify_jacobi(lambda: &Bivector, xi: &VectorField, policy: &SamplingPolicy) -> Result<VerificationReport, StructureError> {
    let mut r = VerificationReport::new("jacobi");
    r.push(identity_check("antisymmetric", &lambda.antisymmetry_pairs(), policy));
    let lhs = schouten_ll(lambda);
    let rhs = Trivector::vector_wedge_bivector(xi, lambda)?.scale(&Expr::int(2));
    let mut triples: BTreeSet<[usize; 3]> = lhs.triples().into_iter().collect();
    triples.extend(rhs.triples());
    let pairs: Vec<(Expr, Expr)> = triples.iter().map(|[a, b, c]| (lhs.get(*a, *b, *c), rhs.get(*a, *b, *c))).collect();
    r.push(identity_check("[L,L] = 2 Xi ^ L", &pairs, policy));
    r.push(zero_check("L_Xi L = 0", &lambda.lie_derivative(xi)?.entries(), policy));
    Ok(r)
}

fn parallel_check(g: &Tensor02, d: &Distribution, policy: &SamplingPolicy) -> Check {
    let name = "parallel";
    let p = g.patch();
    let n = p.dim();
    let provider = match ChristoffelProvider::for_metric(g) {
        Ok(pr) => pr,
        Err(e) => return Check::fail(name).with_detail(e.to_string()),
    };
    let gens = d.generators();
    let mut inputs: Vec<Expr> = gens.iter().flat_map(|y| y.comps().to_vec()).collect();
    for y in gens {
        for k in 0..n {
            inputs.extend(y.comps().iter().map(|c| p.partial(c, k)));
        }
    }
    let samples = match sample_with_gamma(p, &provider, &inputs, policy) {
        Ok(s) => s,
        Err(e) => return Check::fail(name).with_detail(e),
    };
    let m = gens.len();
    let mut bad = 0;
    for (gamma, vals) in &samples {
        let y: Vec<Vec<f64>> = (0..m).map(|a| vals[a * n..(a + 1) * n].to_vec()).collect();
        let base_rank = rank_f64(&y, RANK_TOL);
        let mut rows = y.clone();
        for a in 0..m {
            for k in 0..n {
                let off = m * n + (a * n + k) * n;
                let v: Vec<f64> = (0..n)
                    .map(|i| vals[off + i] + (0..n).map(|l| gamma[i][k][l] * y[a][l]).sum::<f64>())
                    .collect();
                rows.push(v);
            }
        }
        if rank_f64(&rows, RANK_TOL) != base_rank {
            bad += 1;
        }
    }
    Check::from_bool(name, bad == 0)
        .with_samples(samples.len())
        .with_detail(format!("{bad} samples with nabla D outside D"))
}

pub fn verify_walker(g: &Tensor02, d: &Distribution, policy: &SamplingPolicy) -> Result<VerificationReport, StructureError> {
    crate::geometry::ensure_same(g.patch(), d.patch())?;
    let mut r = VerificationReport::new("walker");
    r.push(identity_check("symmetric", &g.symmetry_pairs(), policy));
    r.push(full_rank_check("nondegenerate", g.comps(), g.patch(), policy));
    let gens = d.generators();
    let mut null = Vec::new();
    for (a, ya) in gens.iter().enumerate() {
        for yb in &gens[a..] {
            null.push(g.apply(ya, yb));
        }
    }
    r.push(zero_check("null", &null, policy));
    r.push(parallel_check(g, d, policy));
    Ok(r)
}

fn rank_equals(name: &str, rows: &[Vec<Expr>], patch: &Patch, want: usize, policy: &SamplingPolicy) -> Check {
    match pointwise_rank(rows, patch, policy) {
        Ok(r) => Check::from_bool(name, *r.start() == want && *r.end() == want)
            .with_samples(policy.samples)
            .with_detail(format!("rank {}..={}, expected {want}", r.start(), r.end())),
        Err(e) => Check::fail(name).with_detail(e.to_string()),
    }
}

pub fn verify_subriemannian(data: &SubRiemannianData, policy: &SamplingPolicy) -> Result<VerificationReport, StructureError> {
    let d = &data.distribution;
    let p = d.patch();
    let n = p.dim();
    let mut r = VerificationReport::new("subriemannian");
    r.push(rank_equals("rank", &d.rows(), p, d.rank(), policy));
    let depth = data.depth.max(1);
    let mut reached = None;
    for k in 1..=depth {
        let span: Vec<Vec<Expr>> = d.bracket_span(k).iter().map(|v| v.comps().to_vec()).collect();
        if let Ok(range) = pointwise_rank(&span, p, policy) {
            if *range.start() == n {
                reached = Some(k);
                break;
            }
        }
    }
    r.push(match reached {
        Some(k) => Check::pass("bracket generating").with_samples(policy.samples).with_detail(format!("full rank at depth {k}")),
        None => Check::fail("bracket generating").with_samples(policy.samples).with_detail(format!("depth cap {depth} exceeded")),
    });
    if let Some(m) = &data.metric {
        let sym: Vec<(Expr, Expr)> = (0..m.len())
            .flat_map(|a| ((a + 1)..m.len()).map(move |b| (a, b)))
            .map(|(a, b)| (m[a][b].clone(), m[b][a].clone()))
            .collect();
        r.push(identity_check("metric symmetric", &sym, policy));
        r.push(full_rank_check("metric nondegenerate", m, p, policy));
    }
    if !data.rigging.is_empty() {
        let mut rows = d.rows();
        rows.extend(data.rigging.iter().map(|z| z.comps().to_vec()));
        r.push(rank_equals("rigging complements", &rows, p, n, policy));
    }
    Ok(r)
}

pub fn verify_orientation(volume: &KForm, policy: &SamplingPolicy) -> Result<VerificationReport, StructureError> {
    let n = volume.patch().dim();
    let mut r = VerificationReport::new("orientation");
    r.push(Check::from_bool("top degree", volume.degree() == n).with_residual(Residual::Exact));
    if volume.degree() == n {
        r.push(top_form_check("nonvanishing", volume, policy));
    } else {
        r.push(Check::skipped("nonvanishing", "not a top-degree form"));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn pol() -> SamplingPolicy {
        SamplingPolicy::default()
    }

    #[test]
    fn symplectic_examples() {
        let p = Patch::new(&["x1", "y1", "x2", "y2"]).unwrap();
        let std = KForm::dx(&p, 0).wedge(&KForm::dx(&p, 1)).unwrap().add(&KForm::dx(&p, 2).wedge(&KForm::dx(&p, 3)).unwrap()).unwrap();
        assert!(verify_symplectic(&std, &pol()).unwrap().passed());
        let half = KForm::dx(&p, 0).wedge(&KForm::dx(&p, 1)).unwrap();
        assert_eq!(verify_symplectic(&half, &pol()).unwrap().failing(), vec!["nondegenerate"]);
        let q = Patch::new(&["x", "y", "z"]).unwrap();
        assert!(verify_symplectic(&half.on_patch(&p).unwrap(), &pol()).is_ok());
        assert!(matches!(verify_symplectic(&KForm::zero(&q, 2).unwrap(), &pol()), Err(StructureError::Parity { .. })));
    }

    #[test]
    fn contact_and_cosymplectic() {
        let q = Patch::new(&["x", "y", "z"]).unwrap();
        let beta = KForm::from_terms(&q, 1, [(vec![2], Expr::one()), (vec![1], Expr::var("x"))]).unwrap();
        assert!(verify_contact(&beta, &pol()).unwrap().passed());
        assert!(!verify_contact(&KForm::dx(&q, 2), &pol()).unwrap().passed());
        let w = KForm::dx(&q, 0).wedge(&KForm::dx(&q, 1)).unwrap();
        assert!(verify_cosymplectic(&w, &KForm::dx(&q, 2), &pol()).unwrap().passed());
    }

    #[test]
    fn riemannian_signatures() {
        let p = Patch::new(&["x", "y"]).unwrap();
        let r = verify_riemannian(&Tensor02::euclidean(&p), &pol()).unwrap();
        assert!(r.passed() && r.check("positive definite").unwrap().passed());
        let split = Tensor02::parse(&p, &[&["0", "1"], &["1", "0"]]).unwrap();
        assert_eq!(metric_signatures(&split, &pol()).unwrap().into_iter().collect::<Vec<_>>(), vec![(1, 1, 0)]);
    }

    #[test]
    fn jacobi_contact_pair() {
        let q = Patch::new(&["x", "y", "z"]).unwrap();
        let poisson = Bivector::from_upper(&q, [(0, 1, Expr::one())]).unwrap();
        assert!(verify_jacobi(&poisson, &VectorField::zero(&q), &pol()).unwrap().passed());
        // contact form dz - y dx: Reeb ∂z, Λ = (∂x + y∂z) ∧ ∂y
        let lam = Bivector::wedge(&VectorField::parse(&q, &["1", "0", "y"]).unwrap(), &VectorField::coordinate(&q, 1)).unwrap();
        let r = verify_jacobi(&lam, &VectorField::coordinate(&q, 2), &pol()).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn walker_and_subriemannian() {
        let p = Patch::new(&["x", "y"]).unwrap();
        let g = Tensor02::parse(&p, &[&["0", "1"], &["1", "0"]]).unwrap();
        let d = Distribution::spanned_by(&p, vec![VectorField::coordinate(&p, 0)]).unwrap();
        assert!(verify_walker(&g, &d, &pol()).unwrap().passed());
        assert_eq!(verify_walker(&Tensor02::euclidean(&p), &d, &pol()).unwrap().failing(), vec!["null"]);
        let q = Patch::new(&["x", "y", "z"]).unwrap();
        let heis = Distribution::spanned_by(&q, vec![
            VectorField::coordinate(&q, 0),
            VectorField::parse(&q, &["0", "1", "x"]).unwrap(),
        ])
        .unwrap();
        let data = SubRiemannianData { distribution: heis, metric: None, rigging: vec![], depth: 2 };
        assert!(verify_subriemannian(&data, &pol()).unwrap().passed());
    }

    #[test]
    fn orientation_sign() {
        let p = Patch::new(&["x", "y"]).unwrap();
        let vol = KForm::from_terms(&p, 2, [(vec![0, 1], parse("exp(x)").unwrap())]).unwrap();
        assert!(verify_orientation(&vol, &pol()).unwrap().passed());
        let flip = KForm::from_terms(&p, 2, [(vec![0, 1], parse("x").unwrap())]).unwrap();
        assert!(!verify_orientation(&flip, &pol()).unwrap().passed());
    }
}
