//! Run reports and their text, JSON and LaTeX renderings.

use std::fmt::Write as _;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::expr::{tidy, to_latex, Expr, Node};
use crate::geometry::{Bivector, KForm, Patch, Tensor02, Tensor11, VectorField};
use crate::report::VerificationReport;
use crate::structures::Structure;

pub const REPORT_SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Latex,
}

/// What a section's verdict is supposed to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Pass,
    Fail,
    /// Recorded either way.
    Any,
}

#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub label: String,
    pub expect: Expect,
    pub ok: bool,
    pub report: VerificationReport,
}

impl Section {
    pub fn new(label: impl Into<String>, expect: Expect, report: VerificationReport) -> Self {
        let ok = match expect {
            Expect::Pass => report.passed(),
            Expect::Fail => !report.passed(),
            Expect::Any => true,
        };
        Section { label: label.into(), expect, ok, report }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentValue {
    Scalar(Expr),
    Vector(Vec<Expr>),
    Matrix(Vec<Vec<Expr>>),
    Form(Vec<(Vec<usize>, Expr)>),
}

/// A named tensor component list on a patch, stored in display form.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub name: String,
    pub coords: Vec<String>,
    pub value: ComponentValue,
}

impl Component {
    pub fn form(name: impl Into<String>, w: &KForm) -> Self {
        let terms = w.components().iter().map(|(i, c)| (i.clone(), tidy(c))).filter(|(_, c)| !c.is_zero()).collect();
        Component { name: name.into(), coords: w.patch().coords().to_vec(), value: ComponentValue::Form(terms) }
    }

    pub fn vector(name: impl Into<String>, x: &VectorField) -> Self {
        Component { name: name.into(), coords: x.patch().coords().to_vec(), value: ComponentValue::Vector(x.comps().iter().map(tidy).collect()) }
    }

    pub fn matrix(name: impl Into<String>, p: &Patch, m: &[Vec<Expr>]) -> Self {
        Component { name: name.into(), coords: p.coords().to_vec(), value: ComponentValue::Matrix(m.iter().map(|r| r.iter().map(tidy).collect()).collect()) }
    }

    pub fn scalar(name: impl Into<String>, p: &Patch, e: &Expr) -> Self {
        Component { name: name.into(), coords: p.coords().to_vec(), value: ComponentValue::Scalar(tidy(e)) }
    }

    fn to_json(&self) -> Value {
        let s = |e: &Expr| Value::String(e.to_string());
        let value = match &self.value {
            ComponentValue::Scalar(e) => json!({ "scalar": s(e) }),
            ComponentValue::Vector(v) => json!({ "vector": v.iter().map(s).collect::<Vec<_>>() }),
            ComponentValue::Matrix(m) => json!({ "matrix": m.iter().map(|r| r.iter().map(s).collect::<Vec<_>>()).collect::<Vec<_>>() }),
            ComponentValue::Form(t) => json!({
                "form": t.iter().map(|(i, c)| json!({ "indices": i, "coeff": s(c) })).collect::<Vec<_>>()
            }),
        };
        json!({ "name": self.name, "coords": self.coords, "value": value })
    }

    fn text(&self) -> String {
        let c = &self.coords;
        let coeff = |e: &Expr| match e.kind() {
            Node::Add(..) | Node::Sub(..) => format!("({e}) "),
            _ if e.is_one() => String::new(),
            _ => format!("{e} "),
        };
        match &self.value {
            ComponentValue::Scalar(e) => e.to_string(),
            ComponentValue::Vector(v) => {
                let terms: Vec<String> = v.iter().zip(c).filter(|(e, _)| !e.is_zero()).map(|(e, x)| format!("{}d/d{x}", coeff(e))).collect();
                join_or_zero(terms, " + ")
            }
            ComponentValue::Matrix(m) => {
                let rows: Vec<String> = m.iter().map(|r| format!("[{}]", r.iter().map(Expr::to_string).collect::<Vec<_>>().join(", "))).collect();
                format!("[{}]", rows.join(", "))
            }
            ComponentValue::Form(t) => {
                let terms: Vec<String> = t
                    .iter()
                    .map(|(idx, e)| {
                        let d: Vec<String> = idx.iter().map(|&i| format!("d{}", c[i])).collect();
                        if idx.is_empty() {
                            e.to_string()
                        } else {
                            format!("{}{}", coeff(e), d.join("^"))
                        }
                    })
                    .collect();
                join_or_zero(terms, " + ")
            }
        }
    }

    fn latex(&self) -> String {
        let var = |i: usize| to_latex(&Expr::var(&self.coords[i]));
        let coeff = |e: &Expr| match e.kind() {
            Node::Add(..) | Node::Sub(..) => format!("\\left({}\\right)", to_latex(e)),
            _ if e.is_one() => String::new(),
            _ => to_latex(e),
        };
        match &self.value {
            ComponentValue::Scalar(e) => to_latex(e),
            ComponentValue::Vector(v) => {
                let terms = v
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| !e.is_zero())
                    .map(|(i, e)| format!("{} \\, \\partial_{{{}}}", coeff(e), var(i)).trim_start_matches(" \\, ").to_string())
                    .collect();
                join_or_zero(terms, " + ")
            }
            ComponentValue::Matrix(m) => {
                let rows: Vec<String> = m.iter().map(|r| r.iter().map(to_latex).collect::<Vec<_>>().join(" & ")).collect();
                format!("\\begin{{pmatrix}} {} \\end{{pmatrix}}", rows.join(" \\\\ "))
            }
            ComponentValue::Form(t) => {
                let terms = t
                    .iter()
                    .map(|(idx, e)| {
                        let d: Vec<String> = idx.iter().map(|&i| format!("d{}", var(i))).collect();
                        if idx.is_empty() {
                            to_latex(e)
                        } else {
                            let c = coeff(e);
                            let sep = if c.is_empty() { "" } else { " \\, " };
                            format!("{c}{sep}{}", d.join(" \\wedge "))
                        }
                    })
                    .collect();
                join_or_zero(terms, " + ")
            }
        }
    }
}

impl Serialize for Component {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

fn join_or_zero(terms: Vec<String>, sep: &str) -> String {
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(sep)
    }
}

fn bivector_matrix(b: &Bivector) -> Vec<Vec<Expr>> {
    b.comps().to_vec()
}

fn t02(name: &str, t: &Tensor02) -> Component {
    Component::matrix(name, t.patch(), t.comps())
}

fn t11(name: &str, t: &Tensor11) -> Component {
    Component::matrix(name, t.patch(), t.comps())
}

/// The defining tensors of a structure, with `suffix` appended to each name.
pub fn structure_components(s: &Structure, suffix: &str) -> Vec<Component> {
    let n = |base: &str| format!("{base}{suffix}");
    match s {
        Structure::Symplectic { omega } => vec![Component::form(n("omega"), omega)],
        Structure::Contact { beta } => vec![Component::form(n("beta"), beta)],
        Structure::Cosymplectic { omega, eta } => vec![Component::form(n("omega"), omega), Component::form(n("eta"), eta)],
        Structure::Lcs { omega, theta } => vec![Component::form(n("omega"), omega), Component::form(n("theta"), theta)],
        Structure::Lcc { omega, eta, theta } => {
            vec![Component::form(n("omega"), omega), Component::form(n("eta"), eta), Component::form(n("theta"), theta)]
        }
        Structure::Riemannian { g } => vec![t02(&n("g"), g)],
        Structure::Kahler { g, omega, j } => vec![t02(&n("g"), g), Component::form(n("omega"), omega), t11(&n("J"), j)],
        Structure::Sasakian { g, eta, xi, phi } => {
            vec![t02(&n("g"), g), Component::form(n("eta"), eta), Component::vector(n("xi"), xi), t11(&n("Phi"), phi)]
        }
        Structure::Jacobi { lambda, xi } => {
            vec![Component::matrix(n("Lambda"), lambda.patch(), &bivector_matrix(lambda)), Component::vector(n("Xi"), xi)]
        }
        Structure::Walker { g, distribution } => {
            let mut out = vec![t02(&n("g"), g)];
            out.extend(distribution.generators().iter().enumerate().map(|(i, v)| Component::vector(n(&format!("D{}", i + 1)), v)));
            out
        }
        Structure::SubRiemannian(d) => {
            let p = d.distribution.patch();
            let mut out: Vec<Component> =
                d.distribution.generators().iter().enumerate().map(|(i, v)| Component::vector(n(&format!("X{}", i + 1)), v)).collect();
            if let Some(m) = &d.metric {
                out.push(Component::matrix(n("h"), p, m));
            }
            out.extend(d.rigging.iter().enumerate().map(|(i, v)| Component::vector(n(&format!("R{}", i + 1)), v)));
            out
        }
        Structure::Orientation { volume } => vec![Component::form(n("vol"), volume)],
    }
}

/// Everything one command produced. Contains no timing so that reruns with
/// the same seed are byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: &'static str,
    pub command: String,
    pub input: Value,
    pub sections: Vec<Section>,
    pub components: Vec<Component>,
    pub passed: bool,
}

impl RunReport {
    pub fn new(command: impl Into<String>, input: Value) -> Self {
        RunReport {
            schema_version: REPORT_SCHEMA_VERSION,
            command: command.into(),
            input,
            sections: Vec::new(),
            components: Vec::new(),
            passed: true,
        }
    }

    pub fn section(&mut self, label: impl Into<String>, expect: Expect, report: VerificationReport) {
        let s = Section::new(label, expect, report);
        self.passed &= s.ok;
        self.sections.push(s);
    }

    pub fn component(&mut self, c: Component) {
        self.components.push(c);
    }

    /// Canonical document: keys sorted, two-space indent, trailing newline.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.command);
        for s in &self.sections {
            let expect = match s.expect {
                Expect::Pass => "",
                Expect::Fail => " (expected to fail)",
                Expect::Any => " (recorded)",
            };
            let _ = writeln!(out, "\n== {}{expect}", s.label);
            let _ = write!(out, "{}", s.report);
        }
        if !self.components.is_empty() {
            let _ = writeln!(out, "\n== components");
            for c in &self.components {
                let _ = writeln!(out, "{} = {}", c.name, c.text());
            }
        }
        let _ = writeln!(out, "\n{}", if self.passed { "PASS" } else { "FAIL" });
        out
    }

    /// An `aligned` block with one equation per component.
    pub fn to_latex(&self) -> String {
        let mut out = String::from("\\begin{aligned}\n");
        let lines: Vec<String> = self.components.iter().map(|c| format!("  {} &= {}", latex_name(&c.name), c.latex())).collect();
        out.push_str(&lines.join(" \\\\\n"));
        if !lines.is_empty() {
            out.push('\n');
        }
        out.push_str("\\end{aligned}\n");
        out
    }

    pub fn render(&self, f: Format) -> String {
        match f {
            Format::Text => self.to_text(),
            Format::Json => self.to_json(),
            Format::Latex => self.to_latex(),
        }
    }
}

fn latex_name(name: &str) -> String {
    let (base, sup) = match name.split_once('^') {
        Some((b, s)) => (b, Some(s)),
        None => (name, None),
    };
    let greek = ["omega", "beta", "eta", "theta", "xi", "Xi", "Lambda", "Phi", "lambda"];
    let b = if greek.contains(&base) { format!("\\{base}") } else { format!("\\mathrm{{{base}}}") };
    match sup {
        Some(s) if greek.contains(&s) => format!("{b}^{{\\{s}}}"),
        Some(s) => format!("{b}^{{{s}}}"),
        None => b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Check;
    use crate::structures::fixtures;

    #[test]
    fn json_keys_are_sorted_and_stable() {
        let mut r = RunReport::new("verify", json!({ "z": 1, "a": 2 }));
        let mut v = VerificationReport::new("t");
        v.push(Check::pass("c"));
        r.section("base", Expect::Pass, v);
        let s = r.to_json();
        assert!(s.find("\"a\"").unwrap() < s.find("\"z\"").unwrap());
        assert!(s.find("\"command\"").unwrap() < s.find("\"passed\"").unwrap());
        assert_eq!(s, r.clone().to_json());
    }

    #[test]
    fn expectations_drive_the_verdict() {
        let mut bad = VerificationReport::new("t");
        bad.push(Check::fail("c"));
        let mut r = RunReport::new("demo", Value::Null);
        r.section("negative", Expect::Fail, bad.clone());
        r.section("recorded", Expect::Any, bad.clone());
        assert!(r.passed);
        r.section("positive", Expect::Pass, bad);
        assert!(!r.passed);
    }

    #[test]
    fn latex_fragment_is_aligned() {
        let mut r = RunReport::new("lift", Value::Null);
        r.components = structure_components(&fixtures::contact_r3(), "^lambda");
        let tex = r.to_latex();
        assert!(tex.starts_with("\\begin{aligned}") && tex.ends_with("\\end{aligned}\n"));
        assert!(tex.contains("\\beta^{\\lambda} &="), "{tex}");
        assert!(tex.contains("dz"), "{tex}");
    }

    #[test]
    fn text_lists_components() {
        let mut r = RunReport::new("lift", Value::Null);
        r.components = structure_components(&fixtures::contact_r3(), "");
        assert!(r.to_text().contains("beta = "));
    }
}
