//! Geometric structures on a patch, their verifiers, and lift-and-reverify.

pub mod fixtures;
mod lifting;
mod local;
mod metric;
mod reeb;
mod verify;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::expr::{Expr, SampleError, SamplingPolicy};
use crate::geometry::{Bivector, Distribution, GeometryError, KForm, Patch, Tensor02, Tensor11, VectorField};
use crate::lift::LiftError;
use crate::report::VerificationReport;

pub use lifting::{
    lee_closedness, lift_structure, module_lifts, verify_orientation_lift, vertical_distribution, Augmentation, LiftConfig,
    LiftedStructure,
};
pub use metric::{einstein_report, geodesic_check, killing_check, EinsteinFit};
pub use reeb::{reeb_contact, reeb_cosymplectic, reeb_projection_check, ReebMethod, ReebSolution};
pub use verify::*;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("{kind} structures need {parity} dimension, got {dim}")]
    Parity { kind: Kind, parity: &'static str, dim: usize },
    #[error("ingredient shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("Reeb system is singular at a sample point")]
    SingularReebSystem,
    #[error("Jacobian is singular at a sample point")]
    SingularJacobian,
}

impl From<crate::expr::EvalError> for StructureError {
    fn from(e: crate::expr::EvalError) -> Self {
        StructureError::Lift(LiftError::Eval(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Symplectic,
    Contact,
    Cosymplectic,
    Lcs,
    Lcc,
    Riemannian,
    Kahler,
    Sasakian,
    Jacobi,
    Walker,
    SubRiemannian,
    Orientation,
}

impl Kind {
    pub const ALL: [Kind; 12] = [
        Kind::Symplectic,
        Kind::Contact,
        Kind::Cosymplectic,
        Kind::Lcs,
        Kind::Lcc,
        Kind::Riemannian,
        Kind::Kahler,
        Kind::Sasakian,
        Kind::Jacobi,
        Kind::Walker,
        Kind::SubRiemannian,
        Kind::Orientation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Symplectic => "symplectic",
            Kind::Contact => "contact",
            Kind::Cosymplectic => "cosymplectic",
            Kind::Lcs => "lcs",
            Kind::Lcc => "lcc",
            Kind::Riemannian => "riemannian",
            Kind::Kahler => "kahler",
            Kind::Sasakian => "sasakian",
            Kind::Jacobi => "jacobi",
            Kind::Walker => "walker",
            Kind::SubRiemannian => "subriemannian",
            Kind::Orientation => "orientation",
        }
    }

    /// Required parity of the patch dimension, if any.
    pub fn parity(self) -> Option<usize> {
        match self {
            Kind::Symplectic | Kind::Lcs | Kind::Kahler => Some(0),
            Kind::Contact | Kind::Cosymplectic | Kind::Lcc | Kind::Sasakian => Some(1),
            _ => None,
        }
    }

    /// Kinds whose lifts need an odd algebra dimension and use augmentation.
    pub fn odd_lift(self) -> bool {
        matches!(self, Kind::Contact | Kind::Cosymplectic | Kind::Lcc | Kind::Sasakian)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown structure kind `{s}`"))
    }
}

/// Sub-Riemannian data: a distribution, an optional Gram matrix on its
/// generators, optional rigging fields and a bracket depth cap.
#[derive(Debug, Clone, PartialEq)]
pub struct SubRiemannianData {
    pub distribution: Distribution,
    pub metric: Option<Vec<Vec<Expr>>>,
    pub rigging: Vec<VectorField>,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    Symplectic { omega: KForm },
    Contact { beta: KForm },
    Cosymplectic { omega: KForm, eta: KForm },
    Lcs { omega: KForm, theta: KForm },
    Lcc { omega: KForm, eta: KForm, theta: KForm },
    Riemannian { g: Tensor02 },
    Kahler { g: Tensor02, omega: KForm, j: Tensor11 },
    Sasakian { g: Tensor02, eta: KForm, xi: VectorField, phi: Tensor11 },
    Jacobi { lambda: Bivector, xi: VectorField },
    Walker { g: Tensor02, distribution: Distribution },
    SubRiemannian(SubRiemannianData),
    Orientation { volume: KForm },
}

impl Structure {
    pub fn kind(&self) -> Kind {
        match self {
            Structure::Symplectic { .. } => Kind::Symplectic,
            Structure::Contact { .. } => Kind::Contact,
            Structure::Cosymplectic { .. } => Kind::Cosymplectic,
            Structure::Lcs { .. } => Kind::Lcs,
            Structure::Lcc { .. } => Kind::Lcc,
            Structure::Riemannian { .. } => Kind::Riemannian,
            Structure::Kahler { .. } => Kind::Kahler,
            Structure::Sasakian { .. } => Kind::Sasakian,
            Structure::Jacobi { .. } => Kind::Jacobi,
            Structure::Walker { .. } => Kind::Walker,
            Structure::SubRiemannian(_) => Kind::SubRiemannian,
            Structure::Orientation { .. } => Kind::Orientation,
        }
    }

    pub fn patch(&self) -> &Patch {
        match self {
            Structure::Symplectic { omega }
            | Structure::Cosymplectic { omega, .. }
            | Structure::Lcs { omega, .. }
            | Structure::Lcc { omega, .. } => omega.patch(),
            Structure::Contact { beta } => beta.patch(),
            Structure::Riemannian { g } | Structure::Kahler { g, .. } | Structure::Sasakian { g, .. } => g.patch(),
            Structure::Walker { g, .. } => g.patch(),
            Structure::Jacobi { lambda, .. } => lambda.patch(),
            Structure::SubRiemannian(d) => d.distribution.patch(),
            Structure::Orientation { volume } => volume.patch(),
        }
    }

    /// Runs the verifier for this structure's kind.
    pub fn verify(&self, policy: &SamplingPolicy) -> Result<VerificationReport, StructureError> {
        match self {
            Structure::Symplectic { omega } => verify_symplectic(omega, policy),
            Structure::Contact { beta } => verify_contact(beta, policy),
            Structure::Cosymplectic { omega, eta } => verify_cosymplectic(omega, eta, policy),
            Structure::Lcs { omega, theta } => verify_lcs(omega, theta, policy),
            Structure::Lcc { omega, eta, theta } => verify_lcc(omega, eta, theta, policy),
            Structure::Riemannian { g } => verify_riemannian(g, policy),
            Structure::Kahler { g, omega, j } => verify_kahler(g, omega, j, policy),
            Structure::Sasakian { g, eta, xi, phi } => verify_sasakian(g, eta, xi, phi, policy),
            Structure::Jacobi { lambda, xi } => verify_jacobi(lambda, xi, policy),
            Structure::Walker { g, distribution } => verify_walker(g, distribution, policy),
            Structure::SubRiemannian(d) => verify_subriemannian(d, policy),
            Structure::Orientation { volume } => verify_orientation(volume, policy),
        }
    }
}

pub(crate) fn check_parity(kind: Kind, patch: &Patch) -> Result<(), StructureError> {
    if let Some(p) = kind.parity() {
        if patch.dim() % 2 != p {
            return Err(StructureError::Parity {
                kind,
                parity: if p == 0 { "even" } else { "odd" },
                dim: patch.dim(),
            });
        }
    }
    Ok(())
}

pub(crate) fn check_degree(form: &KForm, degree: usize, what: &str) -> Result<(), StructureError> {
    if form.degree() != degree {
        return Err(StructureError::Shape(format!("{what} must be a {degree}-form, got degree {}", form.degree())));
    }
    Ok(())
}
