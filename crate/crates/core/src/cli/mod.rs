//! Command-line front end. [`run`] parses arguments, executes one command and
//! returns the process exit code: 0 pass, 1 fail, 2 input error.

pub mod demos;
pub mod manifest;
pub mod render;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

use crate::checks::identity_check;
use crate::expr::{Expr, SamplingPolicy};
use crate::geometry::{GeometryError, VectorField};
use crate::lift::{LiftError, LiftedPatch};
use crate::linalg::QMatrix;
use crate::report::VerificationReport;
use crate::structures::{lift_structure, StructureError};
use crate::weil::{FunctionalPreset, LinearFunctional, WeilAlgebra, WeilError};

pub use demos::{run_demo, DEMOS};
pub use manifest::{Manifest, ManifestError};
pub use render::{Component, Expect, Format, RunReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Weil(#[from] WeilError),
    #[error("unknown demo `{0}`; available: {list}", list = DEMOS.join(", "))]
    UnknownDemo(String),
    #[error("manifest has no `vector_field` entry")]
    NoVectorField,
}

#[derive(Debug, Parser)]
#[command(name = "weil", version, about = "Lift geometric structures to Weil bundles and verify them")]
pub struct Cli {
    /// Seed for sample points, overriding any manifest seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect a Weil algebra.
    Algebra {
        #[command(subcommand)]
        action: AlgebraAction,
    },
    /// Verify the base structure of a manifest.
    Verify {
        #[arg(short, long)]
        manifest: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Lift the structure of a manifest and verify the lift.
    Lift {
        #[arg(short, long)]
        manifest: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Compare the canonical and averaged lifts of the manifest's vector field.
    CompareLifts {
        #[arg(short, long)]
        manifest: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Run a named demo scenario.
    Demo {
        name: String,
        /// Include checks that take minutes.
        #[arg(long)]
        slow: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Subcommand)]
pub enum AlgebraAction {
    /// Print dimension, basis, multiplication table, nilpotency order and Gram matrices.
    Info { spec: String },
}

/// Runs the CLI on `args` (including the program name), writing to the given streams.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok((text, out, passed)) => {
            let written = match out {
                Some(path) => std::fs::write(&path, text.as_bytes()),
                None => stdout.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                return 2;
            }
            if passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

type Outcome = (String, Option<PathBuf>, bool);

fn finish(report: RunReport, output: &Output) -> Outcome {
    let passed = report.passed;
    (report.render(output.format), output.out.clone(), passed)
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Algebra { action: AlgebraAction::Info { spec } } => Ok((algebra_info(&spec.parse()?), None, true)),
        Command::Verify { manifest, output } => Ok(finish(verify(&load(manifest)?, cli.seed)?, output)),
        Command::Lift { manifest, output } => Ok(finish(lift(&load(manifest)?, cli.seed)?, output)),
        Command::CompareLifts { manifest, output } => Ok(finish(compare_lifts(&load(manifest)?, cli.seed)?, output)),
        Command::Demo { name, slow, output } => Ok(finish(run_demo(name, cli.seed, *slow)?, output)),
    }
}

pub fn load(path: &Path) -> Result<Manifest, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    Ok(Manifest::from_json(&text)?)
}

fn echo(m: &Manifest, seed: Option<u64>) -> serde_json::Value {
    let mut v = serde_json::to_value(m).expect("manifest serializes");
    v["resolved_seed"] = json!(m.policy(seed).seed);
    v
}

pub fn verify(m: &Manifest, seed: Option<u64>) -> Result<RunReport, CliError> {
    let s = m.structure()?;
    let report = s.verify(&m.policy(seed))?;
    let mut r = RunReport::new("verify", echo(m, seed));
    r.section("base", Expect::Pass, report);
    r.components = render::structure_components(&s, "");
    Ok(r)
}

pub fn lift(m: &Manifest, seed: Option<u64>) -> Result<RunReport, CliError> {
    let s = m.structure()?;
    let cfg = m.lift_config(seed)?;
    let out = lift_structure(&s, &cfg)?;
    let mut r = RunReport::new("lift", echo(m, seed));
    r.section("lift", Expect::Pass, out.report);
    r.components = render::structure_components(&out.structure, "^lambda");
    if let Some(xi) = out.reeb.as_ref().and_then(|s| s.field.as_ref()) {
        r.component(Component::vector("xi^lambda", xi));
    }
    Ok(r)
}

/// `[X, Y]` lifted against `[lift X, lift Y]` for each `Y` in `others`.
fn bracket_report(
    name: &str,
    x: &VectorField,
    others: &[VectorField],
    lift: impl Fn(&VectorField) -> Result<VectorField, LiftError>,
    policy: &SamplingPolicy,
) -> Result<VerificationReport, CliError> {
    let mut rep = VerificationReport::new(format!("{name} lift brackets"));
    let xl = lift(x)?;
    for (j, y) in others.iter().enumerate() {
        let lhs = xl.bracket(&lift(y)?)?;
        let rhs = lift(&x.bracket(y)?)?;
        let pairs: Vec<(Expr, Expr)> = lhs.comps().iter().cloned().zip(rhs.comps().iter().cloned()).collect();
        rep.push(identity_check(&format!("[X, Y{}] lifts", j + 1), &pairs, policy));
    }
    Ok(rep)
}

fn projection_report(name: &str, lp: &LiftedPatch, lifted: &VectorField, x: &VectorField, policy: &SamplingPolicy) -> Result<VerificationReport, CliError> {
    let down = lp.projection_pushforward(lifted)?;
    let pairs: Vec<(Expr, Expr)> = down.comps().iter().cloned().zip(x.comps().iter().cloned()).collect();
    let mut rep = VerificationReport::new(format!("{name} lift projection"));
    rep.push(identity_check("projects to X", &pairs, policy));
    Ok(rep)
}

pub fn compare_lifts(m: &Manifest, seed: Option<u64>) -> Result<RunReport, CliError> {
    let x = m.vector_field()?.ok_or(CliError::NoVectorField)?;
    let cfg = m.lift_config(seed)?;
    let policy = &cfg.policy;
    let p = x.patch().clone();
    let lp = LiftedPatch::new(&p, &cfg.algebra)?;
    let fam = match &cfg.sections {
        Some(ss) => crate::lift::SectionFamily::new(&lp, ss.clone())?,
        None => lp.basis_sections(),
    };
    let canonical = lp.lift_vector_field(&x)?;
    let averaged = fam.averaged_lift_vector(&x)?;
    let diff = canonical.sub(&averaged)?;
    let mut r = RunReport::new("compare-lifts", echo(m, seed));
    let mut d = VerificationReport::new("canonical against averaged");
    d.push(
        crate::checks::zero_check("lifts agree", diff.comps(), policy)
            .informational()
            .with_detail("the two lifts need not agree"),
    );
    r.section("difference", Expect::Any, d);
    r.section("canonical projection", Expect::Pass, projection_report("canonical", &lp, &canonical, &x, policy)?);
    r.section("averaged projection", Expect::Pass, projection_report("averaged", &lp, &averaged, &x, policy)?);
    // brackets against the coordinate fields and the Euler field
    let mut others: Vec<VectorField> = (0..p.dim()).map(|i| VectorField::coordinate(&p, i)).collect();
    others.push(VectorField::new(&p, (0..p.dim()).map(|i| p.coord_expr(i)).collect())?);
    r.section("canonical brackets", Expect::Any, bracket_report("canonical", &x, &others, |v| lp.lift_vector_field(v), policy)?);
    r.section("averaged brackets", Expect::Any, bracket_report("averaged", &x, &others, |v| fam.averaged_lift_vector(v), policy)?);
    r.component(Component::vector("X", &x));
    r.component(Component::vector("X^A", &canonical));
    r.component(Component::vector("X~", &averaged));
    r.component(Component::vector("X^A - X~", &diff));
    Ok(r)
}

fn fmt_matrix(out: &mut String, m: &QMatrix) {
    let cells: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|q| q.to_string()).collect()).collect();
    let w = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    for row in cells {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>w$}")).collect();
        out.push_str(&format!("  [{}]\n", line.join(" ")));
    }
}

pub fn algebra_info(a: &WeilAlgebra) -> String {
    let mut out = String::new();
    let labels = a.labels();
    out.push_str(&format!("algebra {}\ndimension {}\nbasis {}\n", a.name(), a.dim(), labels.join(", ")));
    match a.try_nilpotency_order() {
        Some(k) => out.push_str(&format!("nilpotency order {k}\n")),
        None => out.push_str("nilpotency order: ideal is not nilpotent\n"),
    }
    out.push_str("multiplication table\n");
    let cells: Vec<Vec<String>> = (0..a.dim())
        .map(|i| {
            (0..a.dim())
                .map(|j| {
                    let terms: Vec<String> = a
                        .product_terms(i, j)
                        .iter()
                        .map(|(k, q)| if q == &num_rational::BigRational::from_integer(1.into()) { labels[*k].clone() } else { format!("{q}*{}", labels[*k]) })
                        .collect();
                    if terms.is_empty() {
                        "0".into()
                    } else {
                        terms.join(" + ")
                    }
                })
                .collect()
        })
        .collect();
    let w = cells.iter().flatten().chain(labels.iter()).map(String::len).max().unwrap_or(1);
    out.push_str(&format!("  {:>w$} |", ""));
    for l in labels {
        out.push_str(&format!(" {l:>w$}"));
    }
    out.push('\n');
    for (i, row) in cells.iter().enumerate() {
        out.push_str(&format!("  {:>w$} |", labels[i]));
        for c in row {
            out.push_str(&format!(" {c:>w$}"));
        }
        out.push('\n');
    }
    for preset in FunctionalPreset::ALL {
        let lam = LinearFunctional::preset(a, preset);
        let (p, q, z) = lam.gram_signature();
        let vals: Vec<String> = lam.values().iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("gram matrix, {} functional ({}), signature ({p},{q},{z})\n", preset.name(), vals.join(", ")));
        fmt_matrix(&mut out, &lam.gram());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("weil").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn dual_info() {
        let (code, out, _) = run_args(&["algebra", "info", "dual"]);
        assert_eq!(code, 0);
        assert!(out.contains("dimension 2") && out.contains("nilpotency order 2"), "{out}");
        assert!(out.contains("gram matrix, top"));
    }

    #[test]
    fn bad_algebra_is_input_error() {
        let (code, out, err) = run_args(&["algebra", "info", "jet(x)"]);
        assert_eq!((code, out.as_str()), (2, ""));
        assert!(err.contains("unknown algebra"));
    }

    #[test]
    fn unknown_demo_is_input_error() {
        let (code, out, err) = run_args(&["demo", "nope"]);
        assert_eq!((code, out.as_str()), (2, ""));
        assert!(err.contains("symplectic-r2n"));
    }

    #[test]
    fn missing_manifest_is_input_error() {
        assert_eq!(run_args(&["verify", "-m", "/nonexistent/weil.json"]).0, 2);
    }
}
