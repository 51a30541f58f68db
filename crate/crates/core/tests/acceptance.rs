use std::io::Write;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weil::cli::demos::{run_demo, DEMOS};
use weil::cli::render::RunReport;
use weil::expr::{eval, expand_polynomial, parse, Env, Expr, F64Ring, RationalRing, Ring, SamplingPolicy};
use weil::geometry::{KForm, Patch, VectorField};
use weil::lift::LiftedPatch;
use weil::report::{Residual, Status, VerificationReport};
use weil::structures::fixtures::{flat_kahler_r2, planted};
use weil::structures::{lift_structure, Kind, LiftConfig};
use weil::weil::{FunctionalPreset, LinearFunctional, WeilAlgebra, WeilRing};

type Outcome = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn random_poly(rng: &mut ChaCha8Rng, x: &str, y: &str) -> Expr {
    let monos = ["1", "X", "Y", "X^2", "X*Y", "Y^2", "X^3", "X^2*Y", "X*Y^2", "Y^3"];
    let terms: Vec<Expr> = monos
        .iter()
        .filter_map(|m| {
            let c = rng.gen_range(-4i64..=4);
            (c != 0).then(|| Expr::int(c).mul(&parse(&m.replace('X', x).replace('Y', y)).unwrap()))
        })
        .collect();
    Expr::sum(&terms)
}

fn random_rationals(rng: &mut ChaCha8Rng, l: usize) -> Vec<BigRational> {
    (0..l).map(|_| q(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect()
}

fn poly_eq(a: &Expr, b: &Expr) -> bool {
    match (expand_polynomial(a), expand_polynomial(b)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

fn demo(name: &str, slow: bool) -> Result<RunReport, String> {
    run_demo(name, None, slow).map_err(|e| e.to_string())
}

fn section<'a>(r: &'a RunReport, label: &str) -> Result<&'a VerificationReport, String> {
    r.sections.iter().find(|s| s.label == label).map(|s| &s.report).ok_or_else(|| format!("no section `{label}`"))
}

fn passes(rep: &VerificationReport, check: &str) -> Outcome {
    match rep.check(check) {
        Some(c) if c.status == Status::Pass => Ok(()),
        Some(c) => Err(format!("`{check}` is {:?}", c.status)),
        None => Err(format!("no check `{check}`")),
    }
}

fn demo_passes(name: &str) -> Outcome {
    let r = demo(name, false)?;
    let bad: Vec<&str> = r.sections.iter().filter(|s| !s.ok).map(|s| s.label.as_str()).collect();
    ensure(r.passed, || format!("sections not as expected: {}", bad.join(", ")))
}

fn algebra_axioms() -> Outcome {
    let algebras = [
        WeilAlgebra::dual(),
        WeilAlgebra::jet(2).unwrap(),
        WeilAlgebra::jet(3).unwrap(),
        WeilAlgebra::jet(4).unwrap(),
        WeilAlgebra::truncated(2, 2).unwrap(),
        WeilAlgebra::truncated(3, 1).unwrap(),
    ];
    for a in &algebras {
        let rep = a.verify_axioms();
        ensure(rep.passed(), || format!("{}: {}", a.name(), rep.failing().join(", ")))?;
    }
    Ok(())
}

fn homomorphism_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let algebras = ["dual", "jet(2)", "jet(3)", "truncated(2,2)", "truncated(3,1)"].map(|s| s.parse::<WeilAlgebra>().unwrap());
    for case in 0..200 {
        let a = &algebras[rng.gen_range(0..algebras.len())];
        let (px, py) = (random_rationals(&mut rng, a.dim()), random_rationals(&mut rng, a.dim()));
        let (f, g) = (random_poly(&mut rng, "x", "y"), random_poly(&mut rng, "x", "y"));

        let ring = WeilRing::new(a, RationalRing);
        let env: Env<_> = [("x".to_string(), ring.element(px.clone()).unwrap()), ("y".to_string(), ring.element(py.clone()).unwrap())]
            .into_iter()
            .collect();
        let ev = |e: &Expr| eval(e, &env, &ring).unwrap();
        let (fv, gv) = (ev(&f), ev(&g));
        ensure(ev(&f.mul(&g)) == ring.mul(&fv, &gv) && ev(&f.add(&g)) == ring.add(&fv, &gv), || format!("rational case {case} over {}", a.name()))?;

        let floats = |v: &[BigRational]| v.iter().map(|c| weil::expr::rational_to_f64(c) / 4.0).collect::<Vec<f64>>();
        let ring = WeilRing::new(a, F64Ring);
        let env: Env<_> = [("x".to_string(), ring.element(floats(&px)).unwrap()), ("y".to_string(), ring.element(floats(&py)).unwrap())]
            .into_iter()
            .collect();
        let (fa, ga) = (f.mul(&Expr::ratio(1, 8)).sin(), g.mul(&Expr::ratio(1, 8)).exp());
        let ev = |e: &Expr| eval(e, &env, &ring).unwrap();
        let (fv, gv) = (ev(&fa), ev(&ga));
        for (lhs, rhs) in [(ev(&fa.mul(&ga)), ring.mul(&fv, &gv)), (ev(&fa.add(&ga)), ring.add(&fv, &gv))] {
            let worst = lhs.coeffs().iter().zip(rhs.coeffs()).map(|(u, v)| (u - v).abs() / (1.0 + v.abs())).fold(0.0, f64::max);
            ensure(worst <= 1e-9, || format!("analytic case {case} over {}: residual {worst:e}", a.name()))?;
        }
    }
    Ok(())
}

fn vector_field_lifts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let p = Patch::new(&["x", "y"]).unwrap();
    for a in [WeilAlgebra::dual(), WeilAlgebra::jet(2).unwrap()] {
        let lp = LiftedPatch::new(&p, &a).unwrap();
        for case in 0..50 {
            let field = |rng: &mut ChaCha8Rng| VectorField::new(&p, vec![random_poly(rng, "x", "y"), random_poly(rng, "x", "y")]).unwrap();
            let (x, y) = (field(&mut rng), field(&mut rng));
            let f = random_poly(&mut rng, "x", "y");
            let (xa, ya) = (lp.lift_vector_field(&x).unwrap(), lp.lift_vector_field(&y).unwrap());
            let tag = || format!("pair {case} over {}", a.name());

            let down = lp.projection_pushforward(&xa).unwrap();
            ensure(down.comps().iter().zip(x.comps()).all(|(u, v)| poly_eq(u, v)), || format!("projection, {}", tag()))?;

            let lhs = lp.lift_vector_field(&x.bracket(&y).unwrap()).unwrap();
            let rhs = xa.bracket(&ya).unwrap();
            ensure(lhs.comps().iter().zip(rhs.comps()).all(|(u, v)| poly_eq(u, v)), || format!("bracket, {}", tag()))?;

            let fa = lp.lift_function(&f).unwrap();
            let xfa = lp.lift_function(&x.apply(&f)).unwrap();
            ensure(fa.coeffs.iter().zip(&xfa.coeffs).all(|(c, want)| poly_eq(&xa.apply(c), want)), || format!("derivation, {}", tag()))?;
        }
    }
    Ok(())
}

fn d_commutation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let p = Patch::new(&["x", "y", "z"]).unwrap();
    let forms: Vec<KForm> = (0..50)
        .map(|i| {
            let mut c = || random_poly(&mut rng, if i % 3 == 0 { "x" } else { "z" }, "y");
            if i % 2 == 0 {
                KForm::from_terms(&p, 1, [(vec![0], c()), (vec![1], c()), (vec![2], c())]).unwrap()
            } else {
                KForm::from_terms(&p, 2, [(vec![0, 1], c()), (vec![0, 2], c()), (vec![1, 2], c())]).unwrap()
            }
        })
        .collect();
    for a in [WeilAlgebra::dual(), WeilAlgebra::jet(2).unwrap()] {
        let lp = LiftedPatch::new(&p, &a).unwrap();
        for preset in FunctionalPreset::ALL {
            let lam = LinearFunctional::preset(&a, preset);
            for (i, w) in forms.iter().enumerate() {
                let lhs = lp.lift_form(w, &lam).unwrap().d().unwrap();
                let rhs = lp.lift_form(&w.d().unwrap(), &lam).unwrap();
                let diff = lhs.sub(&rhs).unwrap();
                ensure(diff.coefficients().iter().all(|c| poly_eq(c, &Expr::zero())), || {
                    format!("form {i} ({}-form) over {}, {}", w.degree(), a.name(), preset.name())
                })?;
            }
        }
    }
    Ok(())
}

fn lcs_fixture() -> Outcome {
    let r = demo("lcs-r4", false)?;
    let rep = section(&r, "lift (dual, top)")?;
    ensure(rep.passed(), || format!("lifted lcs fails: {}", rep.failing().join(", ")))
}

fn cosymplectic_fixture() -> Outcome {
    let r = demo("cosymplectic-r2n1", false)?;
    let rep = section(&r, "lift (jet(2), mixed, augmented)")?;
    ensure(rep.passed(), || format!("augmented lift fails: {}", rep.failing().join(", ")))?;
    passes(rep, "Reeb field unique")?;
    passes(rep, "Reeb field projects")?;
    let plain = section(&r, "lift (jet(2), mixed, unaugmented)")?;
    ensure(plain.check("nondegenerate").map(|c| c.status) == Some(Status::Fail), || "unaugmented pair reported cosymplectic".into())?;
    passes(section(&r, "unaugmented kernel")?, "kernel dimension 2")
}

fn metric_fixtures() -> Outcome {
    let r = demo("metric-flat", false)?;
    ensure(r.passed, || "metric demo failed".into())?;
    let flat = section(&r, "euclidean lifted geometry")?;
    for c in ["levi-civita of lift = lift of levi-civita", "base field Killing", "lifted field Killing", "straight line lifted by the canonical section is a geodesic"] {
        passes(flat, c)?;
    }
    let curved = section(&r, "conformal lifted geometry")?;
    passes(curved, "levi-civita of lift = lift of levi-civita")?;
    for label in ["euclidean lift (dual, top)", "conformal lift (dual, top)"] {
        let rep = section(&r, label)?;
        passes(rep, "signature = base x Gram")?;
        ensure(rep.notes.iter().any(|n| n.contains("not positive definite")), || format!("{label}: no signature note"))?;
    }
    Ok(())
}

fn kahler_fixture() -> Outcome {
    let a = WeilAlgebra::dual();
    let cfg = LiftConfig::new(&a, &LinearFunctional::preset(&a, FunctionalPreset::Top));
    let out = lift_structure(&flat_kahler_r2(), &cfg).map_err(|e| e.to_string())?;
    ensure(out.report.passed(), || format!("lifted Kähler fails: {}", out.report.failing().join(", ")))?;
    passes(&out.report, "Nijenhuis = 0")?;
    let bad = planted(Kind::Kahler).structure.verify(&SamplingPolicy::default()).map_err(|e| e.to_string())?;
    ensure(bad.failing() == ["Nijenhuis = 0"], || format!("planted J fails {:?}", bad.failing()))
}

fn contact_fixture() -> Outcome {
    let r = demo("contact-r3", false)?;
    let rep = section(&r, "lift (jet(2), mixed, augmented)")?;
    ensure(rep.passed(), || format!("lifted contact fails: {}", rep.failing().join(", ")))?;
    passes(rep, "nondegenerate")?;
    let reeb = rep.check("Reeb field unique").ok_or("no Reeb check")?;
    ensure(reeb.status == Status::Pass && reeb.samples_used >= 20, || "Reeb solve".into())?;
    ensure(matches!(reeb.max_residual, Residual::Exact) || matches!(reeb.max_residual, Residual::Numeric(x) if x < 1e-9), || {
        format!("Reeb residual {}", reeb.max_residual)
    })?;
    passes(rep, "Reeb field projects")
}

fn orientation_law() -> Outcome {
    let r = demo("orientation", false)?;
    let maps = r.sections.iter().filter(|s| s.label.starts_with("map ")).count();
    ensure(maps == 20, || format!("{maps} map sections"))?;
    ensure(r.passed, || "sign law violated".into())
}

fn jacobi_fixture() -> Outcome {
    let r = demo("jacobi-contact", false)?;
    let base = section(&r, "base")?;
    ensure(base.passed() && base.checks.iter().all(|c| c.max_residual == Residual::Exact), || "base Jacobi pair".into())?;
    let lifted = section(&r, "averaged lift (dual, basis sections)")?;
    ensure(lifted.checks.iter().all(|c| c.status != Status::Skipped && c.max_residual != Residual::None), || "averaged lift report incomplete".into())
}

fn sasakian_fixture() -> Outcome {
    let r = demo("sasakian-r3", true)?;
    let base = section(&r, "base")?;
    ensure(base.passed() && base.checks.len() == 7, || format!("base fails: {}", base.failing().join(", ")))?;
    let lifted = section(&r, "lift (jet(2), mixed, augmented)")?;
    ensure(lifted.checks.len() == 7 && lifted.checks.iter().all(|c| c.status != Status::Skipped), || "lifted checks not run".into())
}

fn heisenberg_fixture() -> Outcome {
    let r = demo("heisenberg-subriemannian", false)?;
    let base = section(&r, "base")?;
    passes(base, "bracket generating")?;
    ensure(base.check("bracket generating").and_then(|c| c.detail.as_deref()) == Some("full rank at depth 2"), || "depth".into())?;
    let rig = section(&r, "lifted rigging")?;
    passes(rig, "rigging complements")?;
    ensure(rig.check("rigging complements").unwrap().samples_used == 20, || "sample count".into())
}

fn negative_matrix() -> Outcome {
    let policy = SamplingPolicy::default();
    let mut wrong = Vec::new();
    for kind in Kind::ALL {
        let p = planted(kind);
        let rep = p.structure.verify(&policy).map_err(|e| e.to_string())?;
        if rep.failing() != [p.defect] {
            wrong.push(format!("{} fails {:?}, planted `{}`", kind.name(), rep.failing(), p.defect));
        }
    }
    ensure(wrong.is_empty(), || wrong.join("; "))
}

fn determinism() -> Outcome {
    for seed in [0x5eed, 17] {
        for name in DEMOS {
            let a = run_demo(name, Some(seed), true).map_err(|e| e.to_string())?.to_json();
            let b = run_demo(name, Some(seed), true).map_err(|e| e.to_string())?.to_json();
            ensure(a == b, || format!("{name} with seed {seed} differs between runs"))?;
        }
    }
    Ok(())
}

type Criterion = (&'static str, u64, fn() -> Outcome);

const CRITERIA: [Criterion; 18] = [
    ("algebra axioms", 5, algebra_axioms),
    ("infinitely near points give homomorphisms", 30, homomorphism_suite),
    ("vector field lifts", 60, vector_field_lifts),
    ("lifting commutes with d", 60, d_commutation),
    ("lcs on R^4 lifts under (dual, top)", 30, lcs_fixture),
    ("cosymplectic R^3 over jet(2), augmented and unaugmented", 60, cosymplectic_fixture),
    ("lifted metrics, connections, Killing fields, geodesics", 120, metric_fixtures),
    ("flat Kähler lift and planted non-integrable J", 60, kahler_fixture),
    ("contact R^3 over jet(2)", 60, contact_fixture),
    ("orientation sign law", 60, orientation_law),
    ("Jacobi pair and its averaged lift", 120, jacobi_fixture),
    ("Sasakian R^3, base and lifted", 600, sasakian_fixture),
    ("Heisenberg distribution and lifted rigging", 60, heisenberg_fixture),
    ("Walker structures", 30, || demo_passes("walker-dual")),
    ("lifted Lagrangian restriction", 30, || demo_passes("lagrangian")),
    ("suspension is symplectic", 10, || demo_passes("suspension")),
    ("every verifier rejects its single planted defect", 120, negative_matrix),
    ("demo reports are reproducible", 600, determinism),
];

fn main() -> ExitCode {
    let mut out = std::io::stdout();
    let mut failed = 0;
    for (i, (name, budget, run)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            ensure(elapsed <= Duration::from_secs(*budget), || format!("took {elapsed:.1?}, budget {budget}s"))
        });
        let line = match &outcome {
            Ok(()) => format!("AC{:<2} PASS  {name} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                format!("AC{:<2} FAIL  {name} ({elapsed:.2?}): {why}", i + 1)
            }
        };
        writeln!(out, "{line}").unwrap();
    }
    writeln!(out, "{} of {} criteria pass", CRITERIA.len() - failed, CRITERIA.len()).unwrap();
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
