//! The fixed demo scenarios, each run end to end into a [`RunReport`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::render::{structure_components, Component, Expect, RunReport};
use super::CliError;
use crate::checks::{identity_check, zero_check};
use crate::expr::{parse, Expr, SamplingPolicy};
use crate::geometry::{levi_civita, Patch, SmoothMap, Tensor02, VectorField};
use crate::lift::{suspension, LiftedPatch};
use crate::report::{Check, Residual, VerificationReport};
use crate::structures::{
    einstein_report, fixtures, geodesic_check, killing_check, lee_closedness, lift_structure, verify_orientation_lift,
    verify_symplectic, verify_walker, vertical_distribution, Augmentation, EinsteinFit, LiftConfig, Structure,
};
use crate::weil::{FunctionalPreset, LinearFunctional, WeilAlgebra};

pub const DEMOS: [&str; 13] = [
    "symplectic-r2n",
    "cosymplectic-r2n1",
    "contact-r3",
    "orientation",
    "metric-flat",
    "walker-dual",
    "heisenberg-subriemannian",
    "sasakian-r3",
    "jacobi-contact",
    "lcs-r4",
    "lagrangian",
    "suspension",
    "einstein-remark",
];

pub fn run_demo(name: &str, seed: Option<u64>, slow: bool) -> Result<RunReport, CliError> {
    let policy = match seed {
        Some(s) => SamplingPolicy::default().with_seed(s),
        None => SamplingPolicy::default(),
    };
    let mut r = RunReport::new(format!("demo {name}"), json!({ "demo": name, "seed": policy.seed, "slow": slow }));
    match name {
        "symplectic-r2n" => symplectic(&mut r, &policy)?,
        "cosymplectic-r2n1" => cosymplectic(&mut r, &policy)?,
        "contact-r3" => contact(&mut r, &policy)?,
        "orientation" => orientation(&mut r, &policy)?,
        "metric-flat" => metric_flat(&mut r, &policy)?,
        "walker-dual" => walker(&mut r, &policy)?,
        "heisenberg-subriemannian" => heisenberg(&mut r, &policy)?,
        "sasakian-r3" => sasakian(&mut r, &policy, slow)?,
        "jacobi-contact" => jacobi(&mut r, &policy)?,
        "lcs-r4" => lcs(&mut r, &policy)?,
        "lagrangian" => lagrangian(&mut r, &policy)?,
        "suspension" => suspension_demo(&mut r, &policy)?,
        "einstein-remark" => einstein(&mut r, &policy)?,
        _ => return Err(CliError::UnknownDemo(name.into())),
    }
    Ok(r)
}

fn config(alg: &WeilAlgebra, preset: FunctionalPreset, policy: &SamplingPolicy) -> LiftConfig {
    LiftConfig::new(alg, &LinearFunctional::preset(alg, preset)).with_policy(policy.clone())
}

fn jet2() -> WeilAlgebra {
    WeilAlgebra::jet(2).expect("jet(2)")
}

fn base(r: &mut RunReport, s: &Structure, policy: &SamplingPolicy) -> Result<(), CliError> {
    r.section("base", Expect::Pass, s.verify(policy)?);
    Ok(())
}

fn symplectic(r: &mut RunReport, policy: &SamplingPolicy) -> Result<(), CliError> {
    let s = fixtures::standard_symplectic(2);
    base(r, &s, policy)?;
    for (alg, preset) in [(WeilAlgebra::dual(), FunctionalPreset::Top), (jet2(), FunctionalPreset::Top)] {
        let out = lift_structure(&s, &config(&alg, preset, policy))?;
        r.section(format!("lift ({}, {})", alg.name(), preset.name()), Expect::Pass, out.report);
        if alg.dim() == 2 {
            r.components.extend(structure_components(&out.structure, "^lambda"));
        }
    }
    Ok(())
}

fn cosymplectic(r: &mut RunReport, policy: &SamplingPolicy) -> Result<(), CliError> {
    let s = fixtures::cosymplectic_r3();
    base(r, &s, policy)?;
    let cfg = config(&jet2(), FunctionalPreset::Mixed, policy);
    let out = lift_structure(&s, &cfg)?;
    r.section("lift (jet(2), mixed, augmented)", Expect::Pass, out.report);
    r.components.extend(structure_components(&out.structure, "^lambda"));
    if let Some(xi) = out.reeb.as_ref().and_then(|s| s.field.as_ref()) {
        r.component(Component::vector("xi^lambda", xi));
    }
    let plain = lift_structure(&s, &cfg.with_augmentation(Augmentation::Off))?;
    r.section("lift (jet(2), mixed, unaugmented)", Expect::Fail, plain.report);
    let kernel = plain.reeb.map_or(0, |s| s.kernel_dim);
    let mut k = VerificationReport::new("unaugmented Reeb system");
    k.push(Check::from_bool("kernel dimension 2", kernel == 2).with_detail(format!("kernel dimension {kernel}")));
    r.section("unaugmented kernel", Expect::Pass, k);
    Ok(())
}

fn contact(r: &mut RunReport, policy: &SamplingPolicy) -> Result<(), CliError> {
    let policy = policy.clone().with_samples(20);
    let s = fixtures::contact_r3();
    base(r, &s, &policy)?;
    let out = lift_structure(&s, &config(&jet2(), FunctionalPreset::Mixed, &policy))?;
    r.section("lift (jet(2), mixed, augmented)", Expect::Pass, out.report);
    r.components.extend(structure_components(&out.structure, "^lambda"));
    Ok(())
}

/// `x + p(x, y)/10`, `y + q(x, y)/10` with small random quadratic `p`, `q`.
pub fn perturbed_identity(p: &Patch, rng: &mut impl Rng) -> SmoothMap {
    let monomials = ["1", "x", "y", "x^2", "x*y", "y^2"];
    let comps = (0..2)
        .map(|i| {
            let mut terms = vec![p.coord_expr(i)];
            for m in monomials {
                let c: i64 = rng.gen_range(-3..=3);
                if c != 0 {
                    terms.push(Expr::ratio(c, 10).mul(&parse(m).expect("monomial")));
                }
            }
            Expr::sum(&terms)
        })
        .collect();
    SmoothMap::new(p, p, comps).expect("planar map")
}

fn orientation(r: &mut RunReport, policy: &SamplingPolicy) -> Result<(), CliError> {
    let p = Patch::new(&["x", "y"]).expect("patch");
    // keep samples where the perturbed Jacobian is close to the identity
    let pol = SamplingPolicy { half_width: 0.5, ..policy.clone() };
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    for m in 0..10 {
        let phi = perturbed_identity(&p, &mut rng);
        for alg in [WeilAlgebra::dual(), jet2()] {
            r.section(format!("map {} over {}", m + 1, alg.name()), Expect::Pass, verify_orientation_lift(&phi, &alg, &pol)?);
        }
        if m == 0 {
            r.component(Component::vector("phi", &VectorField::new(&p, phi.comps().to_vec())?));
        }
    }
    let out = lift_structure(&fixtures::volume_r2(), &config(&WeilAlgebra::dual(), FunctionalPreset::Top, policy))?;
    r.section("volume form lift (dual)", Expect::Pass, out.report);
    Ok(())
}

fn conformal_flat() -> Tensor02 {
    let p = Patch::new(&["x", "y"]).expect("patch");
    Tensor02::parse(&p, &[&["exp(2*x)", "0"], &["0", "exp(2*x)"]]).expect("metric")
}

fn metric_checks(name: &str, g: &Tensor02, alg: &WeilAlgebra, policy: &SamplingPolicy) -> Result<VerificationReport, CliError> {
    let lam = LinearFunctional::preset(alg, FunctionalPreset::Top);
    let lp = LiftedPatch::new(g.patch(), alg)?;
    let gl = lp.lift_metric(g, &lam)?;
    let mut rep = VerificationReport::new(format!("{name} metric over {}", alg.name()));
    let up = levi_civita(&gl)?;
    let down = lp.lift_connection(&levi_civita(g)?)?;
    let pairs: Vec<(Expr, Expr)> = up.entries().into_iter().zip(down.entries()).collect();
    rep.push(identity_check("levi-civita of lift = lift of levi-civita", &pairs, policy));
    // rotation for the flat metric, translation along y for the conformal one
    let comps: [&str; 2] = if name == "euclidean" { ["-y", "x"] } else { ["0", "1"] };
    let killing = VectorField::parse(g.patch(), &comps).expect("field");
    let mut base_k = killing_check(g, &killing, policy)?;
    base_k.name = "base field Killing".into();
    rep.push(base_k);
    let mut lifted_k = killing_check(&gl, &lp.lift_vector_field(&killing)?, policy)?;
    lifted_k.name = "lifted field Killing".into();
    rep.push(lifted_k);
    if name == "euclidean" {
        let line = [parse("1 + 2*t").expect("line"), parse("-1/2 + 3*t").expect("line")];
        let curve: Vec<Expr> = line
            .iter()
            .flat_map(|c| (0..lp.l()).map(move |k| if k == 0 { c.clone() } else { Expr::zero() }))
            .collect();
        let mut geo = geodesic_check(&up, &curve, "t", policy)?;
        geo.name = "straight line lifted by the canonical section is a geodesic".into();
        rep.push(geo);
    }
    Ok(rep)
}

fn metric_flat(r: &mut RunReport, policy: &SamplingPolicy) -> Result<(), CliError> {
    let euclid = Tensor02::euclidean(&Patch::new(&["x", "y"]).expect("patch"));
    for (name, g) in [("euclidean", euclid), ("conformal", conformal_flat())] {
        let s = Structure::Riemannian { g: g.clone() };
        r.section(format!("{name} base"), Expect::Pass, s.verify(policy)?);
        let out = lift_structure(&s, &config(&WeilAlgebra::dual(), FunctionalPreset::Top, policy))?;
        r.section(format!("{name} lift (dual, top)"), Expect::Pass, out.report);
        r.section(format!("{name} lifted geometry"), Expect::Pass, metric_checks(name, &g, &WeilAlgebra::dual(), policy)?);
        if name == "conformal" {
            r.components.extend(structure_components(&out.structure, "^lambda"));
        }
    }
    Ok(())
}

fn walker(r: &mut RunReport, policy: &SamplingPolicy) -> Result<(), CliError> {
    base(r, &fixtures::walker_r2(), policy)?;
    let line = Patch::new(&["x"]).expect("patch");
    let alg = WeilAlgebra::dual();
    let lp = LiftedPatch::new(&line, &alg)?;
    let gl = lp.lift_metric(&Tensor02::euclidean(&line), &LinearFunctional::preset(&alg, FunctionalPreset::Top))?;
    let mut rep = verify_walker(&gl, &vertical_distribution(&lp)?, policy)?;
    rep.subject = "euclidean line lifted to dual with vertical distribution".into();
    r.section("lift (dual, top)", Expect::Pass, rep);
    r.component(Component::matrix("g^lambda", lp.patch(), gl.comps()));
    Ok(())
}

fn heisenberg(r: &mut RunReport, policy: &SamplingPolicy) -> Result<(), CliError> {
    let policy = policy.clone().with_samples(20);
    let s = fixtures::heisenberg();
    base(r, &s, &policy)?;
    let out = lift_structure(&s, &config(&jet2(), FunctionalPreset::Mixed, &policy))?;
    let mut rig = VerificationReport::new(out.report.subject.clone());
    if let Some(c) = out.report.check("rigging complements") {
        rig.push(c.clone());
    }
    r.section("lift (jet(2), mixed)", Expect::Any, out.report);
    r.section("lifted rigging", Expect::Pass, rig);
    Ok(())
}

fn sasakian(r: &mut RunReport, policy: &SamplingPolicy, slow: bool) -> Result<(), CliError> {
    let s = fixtures::sasakian_r3();
    base(r, &s, policy)?;
    if slow {
        let out = lift_structure(&s, &config(&jet2(), FunctionalPreset::Mixed, policy))?;
        r.section("lift (jet(2), mixed, augmented)", Expect::Any, out.report);
    } else {
        let mut skip = VerificationReport::new("sasakian lifted to jet(2)");
        skip.push(Check::skipped("lifted checks", "pass --slow to run the lifted verification"));
        r.section("lift (jet(2), mixed, augmented)", Expect::Any, skip);
    }
    Ok(())
}

fn jacobi(r: &mut RunReport, policy: &SamplingPolicy) -> Result<(), CliError> {
    let s = fixtures::jacobi_contact_r3();
    base(r, &s, policy)?;
    let out = lift_structure(&s, &config(&WeilAlgebra::dual(), FunctionalPreset::Top, policy))?;
    r.section("averaged lift (dual, basis sections)", Expect::Any, out.report);
    r.components.extend(structure_components(&out.structure, "~"));
    Ok(())
}

fn lcs(r: &mut RunReport, policy: &SamplingPolicy) -> Result<(), CliError> {
    let s = fixtures::lcs_r4();
    base(r, &s, policy)?;
    let alg = WeilAlgebra::dual();
    let cfg = config(&alg, FunctionalPreset::Top, policy);
    let out = lift_structure(&s, &cfg)?;
    r.section("lift (dual, top)", Expect::Pass, out.report);
    r.components.extend(structure_components(&out.structure, "^lambda"));
    if let Structure::Lcs { theta, .. } = &s {
        r.section("Lee form", Expect::Pass, lee_closedness(theta, &out.lifted, &cfg.functional, policy)?);
    }
    Ok(())
}

fn lagrangian(r: &mut RunReport, policy: &SamplingPolicy) -> Result<(), CliError> {
    let s = fixtures::standard_symplectic(2);
    let Structure::Symplectic { omega } = &s else { unreachable!("symplectic fixture") };
    let keep = [0, 2];
    let mut b = VerificationReport::new("x1, x2 coordinate plane");
    b.push(zero_check("restriction vanishes", &omega.restrict_to_coordinate_subspace(&keep).coefficients(), policy));
    r.section("base", Expect::Pass, b);
    for (alg, preset) in [(WeilAlgebra::dual(), FunctionalPreset::Top), (jet2(), FunctionalPreset::Mixed)] {
        let lp = LiftedPatch::new(omega.patch(), &alg)?;
        let wl = lp.lift_form(omega, &LinearFunctional::preset(&alg, preset))?;
        let idx = lp.submanifold_indices(&keep);
        let mut rep = VerificationReport::new(format!("lifted plane in {} ({} dims)", alg.name(), idx.len()));
        rep.push(zero_check("restriction vanishes", &wl.restrict_to_coordinate_subspace(&idx).coefficients(), policy));
        rep.push(Check::from_bool("half dimension", 2 * idx.len() == lp.patch().dim()).with_residual(Residual::Exact));
        r.section(format!("lift ({}, {})", alg.name(), preset.name()), Expect::Pass, rep);
    }
    Ok(())
}

fn suspension_demo(r: &mut RunReport, policy: &SamplingPolicy) -> Result<(), CliError> {
    let s = fixtures::cosymplectic_r3();
    let Structure::Cosymplectic { omega, eta } = &s else { unreachable!("cosymplectic fixture") };
    let (_, w) = suspension(omega, eta, "u")?;
    let mut rep = verify_symplectic(&w, policy)?;
    rep.subject = "suspension on R^3 x R".into();
    r.section("base suspension", Expect::Pass, rep);
    r.component(Component::form("Omega", &w));
    let out = lift_structure(&s, &config(&jet2(), FunctionalPreset::Mixed, policy))?;
    if let Structure::Cosymplectic { omega, eta } = &out.structure {
        let (p, wl) = suspension(omega, eta, "u")?;
        let mut rep = verify_symplectic(&wl, policy)?;
        rep.subject = format!("suspension of the jet(2) lift ({} dims)", p.dim());
        r.section("lifted suspension", Expect::Pass, rep);
    }
    Ok(())
}

fn einstein_check(name: &str, fit: &EinsteinFit, tol: f64) -> Check {
    Check::from_bool(name, fit.is_einstein(tol))
        .with_residual(Residual::Numeric(fit.residual))
        .with_samples(fit.samples)
        .with_detail(format!("best constant {:.9}", fit.lambda))
}

fn einstein(r: &mut RunReport, policy: &SamplingPolicy) -> Result<(), CliError> {
    let p = Patch::new(&["x", "y"]).expect("patch");
    let g = Tensor02::parse(&p, &[&["y^(-2)", "0"], &["0", "y^(-2)"]]).expect("hyperbolic metric");
    let pol = SamplingPolicy { half_width: 1.0, ..policy.clone() };
    let shifted = g.substitute(&[("y".to_string(), parse("y + 2").expect("shift"))].into_iter().collect());
    let mut b = VerificationReport::new("hyperbolic half plane");
    b.push(einstein_check("Ric = c g", &einstein_report(&shifted, &pol)?, policy.tol));
    r.section("base", Expect::Pass, b);
    let alg = WeilAlgebra::dual();
    let lp = LiftedPatch::new(&p, &alg)?;
    let gl = lp.lift_metric(&shifted, &LinearFunctional::preset(&alg, FunctionalPreset::Top))?;
    let mut l = VerificationReport::new("hyperbolic half plane lifted to dual");
    l.push(einstein_check("Ric = c g", &einstein_report(&gl, &pol)?, policy.tol));
    l.note("lifts of Einstein metrics are generally not Einstein; the residual is recorded");
    r.section("lift (dual, top)", Expect::Any, l);
    r.component(Component::matrix("g^lambda", lp.patch(), gl.comps()));
    Ok(())
}
