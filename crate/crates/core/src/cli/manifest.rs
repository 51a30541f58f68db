//! JSON manifests: a patch, one structure, and the lift and sampling settings.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse, Expr, ParseError, SamplingPolicy};
use crate::geometry::{Bivector, Distribution, GeometryError, KForm, Patch, SmoothMap, Tensor02, Tensor11, VectorField};
use crate::structures::{Augmentation, Kind, LiftConfig, Structure, SubRiemannianData, DEFAULT_BRACKET_DEPTH};
use crate::weil::{FunctionalPreset, LinearFunctional, WeilAlgebra, WeilError};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest is not valid JSON for schema {SCHEMA_VERSION}: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version `{0}` (expected \"{SCHEMA_VERSION}\")")]
    Version(String),
    #[error("in `{field}`: {source} in `{text}`")]
    Expr { field: String, text: String, source: ParseError },
    #[error("missing `{field}` for a {kind} structure")]
    Missing { field: &'static str, kind: Kind },
    #[error("`{field}` is not used by a {kind} structure")]
    Unused { field: &'static str, kind: Kind },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Weil(#[from] WeilError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema_version: String,
    pub patch: PatchSpec,
    pub structure: StructureSpec,
    #[serde(default)]
    pub algebra: AlgebraSpec,
    #[serde(default)]
    pub functional: FunctionalSpec,
    #[serde(default)]
    pub sections: SectionsSpec,
    #[serde(default)]
    pub verification: VerificationSpec,
    #[serde(default)]
    pub augmentation: AugmentationSpec,
    /// Vector field for `compare-lifts`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector_field: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraSpec {
    /// `dual`, `jet(k)` or `truncated(n,k)`.
    Preset(String),
    /// Structure constants: `table[i][j][k]` is the `a_k` coefficient of `a_i a_j`.
    Table {
        labels: Vec<String>,
        table: Vec<Vec<Vec<String>>>,
    },
}

impl Default for AlgebraSpec {
    fn default() -> Self {
        AlgebraSpec::Preset("dual".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub coords: Vec<String>,
}

/// A form as `(indices, coefficient)` terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub indices: Vec<usize>,
    pub coeff: String,
}

type MatrixSpec = Vec<Vec<String>>;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<TermSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<TermSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<TermSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<TermSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<Vec<TermSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<String>>,
    /// Bivector entries `(i, j)` with `i < j`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<TermSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rigging: Option<MatrixSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionalSpec {
    Preset(String),
    Values {
        values: Vec<String>,
    },
}

impl Default for FunctionalSpec {
    fn default() -> Self {
        FunctionalSpec::Preset("top".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SectionsSpec {
    Default(String),
    /// Each section as its `n·l` component expressions in the base coordinates.
    Custom(Vec<Vec<String>>),
}

impl Default for SectionsSpec {
    fn default() -> Self {
        SectionsSpec::Default("default".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationSpec {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_depth")]
    pub depth_cap: usize,
}

fn default_samples() -> usize {
    SamplingPolicy::default().samples
}

fn default_tol() -> f64 {
    SamplingPolicy::default().tol
}

fn default_depth() -> usize {
    DEFAULT_BRACKET_DEPTH
}

impl Default for VerificationSpec {
    fn default() -> Self {
        VerificationSpec { samples: default_samples(), tol: default_tol(), seed: None, depth_cap: default_depth() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AugmentationSpec {
    Mode(String),
    /// Augment on the named base coordinate.
    Explicit {
        coordinate: String,
    },
}

impl Default for AugmentationSpec {
    fn default() -> Self {
        AugmentationSpec::Mode("auto".into())
    }
}

fn expr(field: &str, text: &str) -> Result<Expr, ManifestError> {
    parse(text).map_err(|source| ManifestError::Expr { field: field.into(), text: text.into(), source })
}

fn rational(field: &str, text: &str) -> Result<BigRational, ManifestError> {
    expr(field, text)?
        .as_const()
        .cloned()
        .ok_or_else(|| ManifestError::Invalid(format!("`{field}` value `{text}` is not a rational constant")))
}

fn exprs(field: &str, texts: &[String]) -> Result<Vec<Expr>, ManifestError> {
    texts.iter().map(|t| expr(field, t)).collect()
}

fn matrix(field: &str, rows: &MatrixSpec) -> Result<Vec<Vec<Expr>>, ManifestError> {
    rows.iter().map(|r| exprs(field, r)).collect()
}

fn form(field: &str, p: &Patch, terms: &[TermSpec]) -> Result<KForm, ManifestError> {
    let degree = terms.first().map_or(0, |t| t.indices.len());
    if terms.iter().any(|t| t.indices.len() != degree) {
        return Err(ManifestError::Invalid(format!("`{field}` mixes terms of different degrees")));
    }
    let parsed = terms.iter().map(|t| Ok((t.indices.clone(), expr(field, &t.coeff)?))).collect::<Result<Vec<_>, ManifestError>>()?;
    Ok(KForm::from_terms(p, degree, parsed)?)
}

fn field(p: &Patch, name: &str, comps: &[String]) -> Result<VectorField, ManifestError> {
    Ok(VectorField::new(p, exprs(name, comps)?)?)
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Manifest, ManifestError> {
        let m: Manifest = serde_json::from_str(text)?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(ManifestError::Version(m.schema_version));
        }
        Ok(m)
    }

    pub fn patch(&self) -> Result<Patch, ManifestError> {
        if let Some(d) = self.patch.dim {
            if d != self.patch.coords.len() {
                return Err(ManifestError::Invalid(format!("patch.dim = {d} but {} coordinates given", self.patch.coords.len())));
            }
        }
        Ok(Patch::new(&self.patch.coords)?)
    }

    pub fn kind(&self) -> Result<Kind, ManifestError> {
        self.structure.kind.parse().map_err(ManifestError::Invalid)
    }

    pub fn policy(&self, seed_override: Option<u64>) -> SamplingPolicy {
        let mut p = SamplingPolicy { samples: self.verification.samples, tol: self.verification.tol, ..SamplingPolicy::default() };
        if let Some(s) = seed_override.or(self.verification.seed) {
            p.seed = s;
        }
        p
    }

    pub fn structure(&self) -> Result<Structure, ManifestError> {
        let kind = self.kind()?;
        let p = self.patch()?;
        let s = &self.structure;
        let used: &[&'static str] = match kind {
            Kind::Symplectic => &["omega"],
            Kind::Contact => &["beta"],
            Kind::Cosymplectic => &["omega", "eta"],
            Kind::Lcs => &["omega", "theta"],
            Kind::Lcc => &["omega", "eta", "theta"],
            Kind::Riemannian => &["g"],
            Kind::Kahler => &["g", "omega", "j"],
            Kind::Sasakian => &["g", "eta", "xi", "phi"],
            Kind::Jacobi => &["lambda", "xi"],
            Kind::Walker => &["g", "generators"],
            Kind::SubRiemannian => &["generators", "metric", "rigging"],
            Kind::Orientation => &["volume"],
        };
        let present = [
            ("omega", s.omega.is_some()),
            ("beta", s.beta.is_some()),
            ("eta", s.eta.is_some()),
            ("theta", s.theta.is_some()),
            ("volume", s.volume.is_some()),
            ("g", s.g.is_some()),
            ("j", s.j.is_some()),
            ("phi", s.phi.is_some()),
            ("xi", s.xi.is_some()),
            ("lambda", s.lambda.is_some()),
            ("generators", s.generators.is_some()),
            ("metric", s.metric.is_some()),
            ("rigging", s.rigging.is_some()),
        ];
        if let Some((f, _)) = present.iter().find(|(f, there)| *there && !used.contains(f)) {
            return Err(ManifestError::Unused { field: f, kind });
        }
        fn need<'a, T>(v: &'a Option<T>, field: &'static str, kind: Kind) -> Result<&'a T, ManifestError> {
            v.as_ref().ok_or(ManifestError::Missing { field, kind })
        }
        let tensor02 = |m: &MatrixSpec| -> Result<Tensor02, ManifestError> { Ok(Tensor02::new(&p, matrix("g", m)?)?) };
        let tensor11 = |name: &str, m: &MatrixSpec| -> Result<Tensor11, ManifestError> { Ok(Tensor11::new(&p, matrix(name, m)?)?) };
        let gens = |m: &MatrixSpec| -> Result<Vec<VectorField>, ManifestError> {
            m.iter().map(|c| field(&p, "generators", c)).collect()
        };
        Ok(match kind {
            Kind::Symplectic => Structure::Symplectic { omega: form("omega", &p, need(&s.omega, "omega", kind)?)? },
            Kind::Contact => Structure::Contact { beta: form("beta", &p, need(&s.beta, "beta", kind)?)? },
            Kind::Cosymplectic => Structure::Cosymplectic {
                omega: form("omega", &p, need(&s.omega, "omega", kind)?)?,
                eta: form("eta", &p, need(&s.eta, "eta", kind)?)?,
            },
            Kind::Lcs => Structure::Lcs {
                omega: form("omega", &p, need(&s.omega, "omega", kind)?)?,
                theta: form("theta", &p, need(&s.theta, "theta", kind)?)?,
            },
            Kind::Lcc => Structure::Lcc {
                omega: form("omega", &p, need(&s.omega, "omega", kind)?)?,
                eta: form("eta", &p, need(&s.eta, "eta", kind)?)?,
                theta: form("theta", &p, need(&s.theta, "theta", kind)?)?,
            },
            Kind::Riemannian => Structure::Riemannian { g: tensor02(need(&s.g, "g", kind)?)? },
            Kind::Kahler => Structure::Kahler {
                g: tensor02(need(&s.g, "g", kind)?)?,
                omega: form("omega", &p, need(&s.omega, "omega", kind)?)?,
                j: tensor11("j", need(&s.j, "j", kind)?)?,
            },
            Kind::Sasakian => Structure::Sasakian {
                g: tensor02(need(&s.g, "g", kind)?)?,
                eta: form("eta", &p, need(&s.eta, "eta", kind)?)?,
                xi: field(&p, "xi", need(&s.xi, "xi", kind)?)?,
                phi: tensor11("phi", need(&s.phi, "phi", kind)?)?,
            },
            Kind::Jacobi => {
                let terms = need(&s.lambda, "lambda", kind)?;
                let entries = terms
                    .iter()
                    .map(|t| match t.indices[..] {
                        [i, j] if i < j => Ok((i, j, expr("lambda", &t.coeff)?)),
                        _ => Err(ManifestError::Invalid(format!("lambda entry {:?} must be a pair i < j", t.indices))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Structure::Jacobi { lambda: Bivector::from_upper(&p, entries)?, xi: field(&p, "xi", need(&s.xi, "xi", kind)?)? }
            }
            Kind::Walker => Structure::Walker {
                g: tensor02(need(&s.g, "g", kind)?)?,
                distribution: Distribution::spanned_by(&p, gens(need(&s.generators, "generators", kind)?)?)?,
            },
            Kind::SubRiemannian => Structure::SubRiemannian(SubRiemannianData {
                distribution: Distribution::spanned_by(&p, gens(need(&s.generators, "generators", kind)?)?)?,
                metric: s.metric.as_ref().map(|m| matrix("metric", m)).transpose()?,
                rigging: s.rigging.as_ref().map(|m| m.iter().map(|c| field(&p, "rigging", c)).collect()).transpose()?.unwrap_or_default(),
                depth: self.verification.depth_cap,
            }),
            Kind::Orientation => Structure::Orientation { volume: form("volume", &p, need(&s.volume, "volume", kind)?)? },
        })
    }

    pub fn algebra(&self) -> Result<WeilAlgebra, ManifestError> {
        match &self.algebra {
            AlgebraSpec::Preset(s) => Ok(s.parse()?),
            AlgebraSpec::Table { labels, table } => {
                let t = table
                    .iter()
                    .map(|row| row.iter().map(|cell| cell.iter().map(|q| rational("algebra.table", q)).collect()).collect())
                    .collect::<Result<Vec<Vec<Vec<_>>>, ManifestError>>()?;
                Ok(WeilAlgebra::from_table(labels.clone(), t)?)
            }
        }
    }

    pub fn functional(&self, a: &WeilAlgebra) -> Result<LinearFunctional, ManifestError> {
        match &self.functional {
            FunctionalSpec::Preset(name) => Ok(LinearFunctional::preset(a, name.parse::<FunctionalPreset>()?)),
            FunctionalSpec::Values { values } => {
                let qs = values.iter().map(|v| rational("functional", v)).collect::<Result<Vec<_>, _>>()?;
                Ok(LinearFunctional::new(a, qs)?)
            }
        }
    }

    pub fn lift_config(&self, seed_override: Option<u64>) -> Result<LiftConfig, ManifestError> {
        let a = self.algebra()?;
        let lam = self.functional(&a)?;
        let p = self.patch()?;
        let mut cfg = LiftConfig::new(&a, &lam).with_policy(self.policy(seed_override));
        match &self.augmentation {
            AugmentationSpec::Mode(m) if m == "auto" => {}
            AugmentationSpec::Mode(m) if m == "off" => cfg.augmentation = Augmentation::Off,
            AugmentationSpec::Mode(m) => return Err(ManifestError::Invalid(format!("augmentation `{m}`; expected auto, off or {{\"coordinate\": name}}"))),
            AugmentationSpec::Explicit { coordinate } => {
                cfg.z = Some(p.index_of(coordinate).ok_or_else(|| ManifestError::Invalid(format!("no coordinate `{coordinate}` to augment")))?);
            }
        }
        match &self.sections {
            SectionsSpec::Default(d) if d == "default" => {}
            SectionsSpec::Default(d) => return Err(ManifestError::Invalid(format!("sections `{d}`; expected \"default\" or a list"))),
            SectionsSpec::Custom(list) => {
                let lp = crate::lift::LiftedPatch::new(&p, &a).map_err(|e| ManifestError::Invalid(e.to_string()))?;
                let maps = list
                    .iter()
                    .map(|comps| Ok(SmoothMap::new(&p, lp.patch(), exprs("sections", comps)?)?))
                    .collect::<Result<Vec<_>, ManifestError>>()?;
                cfg.sections = Some(maps);
            }
        }
        Ok(cfg)
    }

    pub fn vector_field(&self) -> Result<Option<VectorField>, ManifestError> {
        let p = self.patch()?;
        self.vector_field.as_ref().map(|c| field(&p, "vector_field", c)).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONTACT: &str = r#"{
        "schema_version": "1",
        "patch": {"coords": ["x", "y", "z"]},
        "structure": {"kind": "contact", "beta": [{"indices": [2], "coeff": "1"}, {"indices": [1], "coeff": "x"}]},
        "algebra": "jet(2)",
        "functional": "mixed"
    }"#;

    #[test]
    fn reads_contact_manifest() {
        let m = Manifest::from_json(CONTACT).unwrap();
        assert_eq!(m.kind().unwrap(), Kind::Contact);
        assert!(m.structure().unwrap().verify(&m.policy(None)).unwrap().passed());
        assert_eq!(m.lift_config(Some(7)).unwrap().policy.seed, 7);
    }

    #[test]
    fn rejects_unknown_keys_and_versions() {
        let extra = CONTACT.replace("\"algebra\"", "\"colour\": 3, \"algebra\"");
        assert!(matches!(Manifest::from_json(&extra), Err(ManifestError::Json(_))));
        let v2 = CONTACT.replace("\"1\"", "\"2\"");
        assert!(matches!(Manifest::from_json(&v2), Err(ManifestError::Version(_))));
    }

    #[test]
    fn reports_expression_position() {
        let bad = CONTACT.replace("\"coeff\": \"x\"", "\"coeff\": \"x +* 2\"");
        let err = Manifest::from_json(&bad).unwrap().structure().unwrap_err();
        assert!(err.to_string().contains("byte"), "{err}");
    }

    #[test]
    fn unused_components_are_errors() {
        let m = Manifest::from_json(&CONTACT.replace("\"kind\": \"contact\"", "\"kind\": \"symplectic\"")).unwrap();
        assert!(matches!(m.structure(), Err(ManifestError::Unused { field: "beta", .. })));
    }
}
