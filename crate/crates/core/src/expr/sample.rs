use std::collections::BTreeSet;

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Env, Evaluator, Expr, F64Ring};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("no admissible sample point after {attempts} attempts")]
    UnsampleablePoint { attempts: usize },
}

/// Parameters of randomized identity testing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingPolicy {
    pub seed: u64,
    pub samples: usize,
    /// Relative tolerance, scaled by `max(1, |a|, |b|)`.
    pub tol: f64,
    /// Coordinates are drawn uniformly from `[-half_width, half_width]`.
    pub half_width: f64,
    /// Rejected draws allowed per accepted point.
    pub retries_per_sample: usize,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        SamplingPolicy { seed: 0x5eed, samples: 24, tol: 1e-9, half_width: 2.0, retries_per_sample: 50 }
    }
}

impl SamplingPolicy {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    /// Scaled comparison used for every numerical identity.
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.tol * 1f64.max(a.abs()).max(b.abs())
    }
}

/// A point together with the values of the watched expressions there.
#[derive(Debug, Clone)]
pub struct SamplePoint {
    pub env: Env<f64>,
    pub coords: Vec<f64>,
    pub values: Vec<f64>,
}

/// Deterministic source of sample points.
pub struct Sampler {
    policy: SamplingPolicy,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(policy: &SamplingPolicy) -> Self {
        Sampler { policy: policy.clone(), rng: ChaCha8Rng::seed_from_u64(policy.seed) }
    }

    pub fn policy(&self) -> &SamplingPolicy {
        &self.policy
    }

    fn draw(&mut self, vars: &[String]) -> (Env<f64>, Vec<f64>) {
        let w = self.policy.half_width;
        let coords: Vec<f64> = vars.iter().map(|_| self.rng.gen_range(-w..=w)).collect();
        let env = vars.iter().cloned().zip(coords.iter().copied()).collect();
        (env, coords)
    }

    /// Draws one point at which every expression in `watch` evaluates to a finite value.
    pub fn admissible_point(&mut self, vars: &[String], watch: &[Expr]) -> Result<SamplePoint, SampleError> {
        let cap = self.policy.retries_per_sample.max(1);
        for _ in 0..cap {
            let (env, coords) = self.draw(vars);
            let mut ev = Evaluator::new(&F64Ring, &env);
            let values: Option<Vec<f64>> = watch
                .iter()
                .map(|e| ev.eval(e).ok().filter(|v| v.is_finite()))
                .collect();
            if let Some(values) = values {
                return Ok(SamplePoint { env, coords, values });
            }
        }
        Err(SampleError::UnsampleablePoint { attempts: cap })
    }

    /// Draws `policy.samples` admissible points.
    pub fn points(&mut self, vars: &[String], watch: &[Expr]) -> Result<Vec<SamplePoint>, SampleError> {
        (0..self.policy.samples).map(|_| self.admissible_point(vars, watch)).collect()
    }
}

fn vars_of(exprs: &[&Expr]) -> Vec<String> {
    let mut all = BTreeSet::new();
    for e in exprs {
        all.extend(e.free_vars());
    }
    all.into_iter().collect()
}

/// Largest `|a - b| / max(1, |a|, |b|)` over sampled points.
pub fn max_scaled_difference(a: &Expr, b: &Expr, policy: &SamplingPolicy) -> Result<f64, SampleError> {
    let vars = vars_of(&[a, b]);
    let mut sampler = Sampler::new(policy);
    let pts = sampler.points(&vars, &[a.clone(), b.clone()])?;
    Ok(pts
        .iter()
        .map(|p| {
            let (x, y) = (p.values[0], p.values[1]);
            (x - y).abs() / 1f64.max(x.abs()).max(y.abs())
        })
        .fold(0.0, f64::max))
}

/// Randomized equivalence test at the policy's scaled tolerance.
pub fn expr_equiv(a: &Expr, b: &Expr, policy: &SamplingPolicy) -> Result<bool, SampleError> {
    if a == b {
        return Ok(true);
    }
    Ok(max_scaled_difference(a, b, policy)? <= policy.tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn trig_identity_holds() {
        let a = parse("sin(x)^2 + cos(x)^2").unwrap();
        assert!(expr_equiv(&a, &Expr::one(), &SamplingPolicy::default()).unwrap());
        assert!(!expr_equiv(&parse("x*y").unwrap(), &parse("x + y").unwrap(), &SamplingPolicy::default()).unwrap());
    }

    #[test]
    fn rejects_points_outside_the_domain() {
        let a = parse("log(x)").unwrap();
        let b = parse("2*log(sqrt(x))").unwrap();
        assert!(expr_equiv(&a, &b, &SamplingPolicy::default()).unwrap());
    }

    #[test]
    fn gives_up_on_empty_domain() {
        let a = parse("log(-x^2 - 1)").unwrap();
        assert!(matches!(
            expr_equiv(&a, &Expr::zero(), &SamplingPolicy::default()),
            Err(SampleError::UnsampleablePoint { .. })
        ));
    }

    #[test]
    fn same_seed_same_points() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let p = SamplingPolicy::default();
        let a = Sampler::new(&p).points(&vars, &[]).unwrap();
        let b = Sampler::new(&p).points(&vars, &[]).unwrap();
        assert!(a.iter().zip(&b).all(|(u, v)| u.coords == v.coords));
    }
}
