use std::collections::HashMap;

use crate::checks::{sample_values_over, zero_check};
use crate::expr::{Expr, SamplingPolicy};
use crate::geometry::{levi_civita, Connection, Tensor02, VectorField};
use crate::report::Check;

use super::StructureError;

/// `L_X g = 0`.
pub fn killing_check(g: &Tensor02, x: &VectorField, policy: &SamplingPolicy) -> Result<Check, StructureError> {
    Ok(zero_check("Killing", &g.lie_derivative(x)?.entries(), policy))
}

/// `γ̈^i + Γ^i_{jk}(γ) γ̇^j γ̇^k = 0` for a curve given by coordinate
/// expressions in the parameter `t`.
pub fn geodesic_check(conn: &Connection, curve: &[Expr], t: &str, policy: &SamplingPolicy) -> Result<Check, StructureError> {
    let p = conn.patch();
    let n = p.dim();
    if curve.len() != n {
        return Err(StructureError::Shape(format!("curve has {} components on a {n}-dimensional patch", curve.len())));
    }
    let subst: HashMap<String, Expr> = p.coords().iter().cloned().zip(curve.iter().cloned()).collect();
    let vel: Vec<Expr> = curve.iter().map(|c| c.diff(t)).collect();
    let eqs: Vec<Expr> = (0..n)
        .map(|i| {
            let mut terms = vec![vel[i].diff(t)];
            for j in 0..n {
                for k in 0..n {
                    let gm = conn.get(i, j, k);
                    if !gm.is_zero() {
                        terms.push(gm.substitute(&subst).mul(&vel[j]).mul(&vel[k]));
                    }
                }
            }
            Expr::sum(&terms)
        })
        .collect();
    Ok(zero_check("geodesic", &eqs, policy))
}

/// Least-squares Einstein constant `Ric ≈ λ g` over the samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EinsteinFit {
    pub lambda: f64,
    /// Largest `|Ric − λ g|` entry relative to `max(1, |Ric|)`.
    pub residual: f64,
    pub samples: usize,
}

impl EinsteinFit {
    pub fn is_einstein(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

pub fn einstein_report(g: &Tensor02, policy: &SamplingPolicy) -> Result<EinsteinFit, StructureError> {
    let ric = levi_civita(g)?.riemann().ricci();
    let ge = g.entries();
    let re = ric.entries();
    let m = ge.len();
    let rows = sample_values_over(g.patch().coords(), &[ge, re].concat(), policy)?;
    let (mut num, mut den) = (0.0, 0.0);
    for r in &rows {
        for a in 0..m {
            num += r[m + a] * r[a];
            den += r[a] * r[a];
        }
    }
    let lambda = if den == 0.0 { 0.0 } else { num / den };
    let mut residual = 0.0f64;
    for r in &rows {
        let scale = r[m..].iter().fold(1.0f64, |s, v| s.max(v.abs()));
        for a in 0..m {
            residual = residual.max((r[m + a] - lambda * r[a]).abs() / scale);
        }
    }
    Ok(EinsteinFit { lambda, residual, samples: rows.len() })
}
