//! Identity and nondegeneracy checks over seeded sample points.

use std::collections::BTreeSet;

use crate::expr::{Expr, SampleError, Sampler, SamplingPolicy};
use crate::report::{Check, Residual};

fn union_vars(exprs: &[Expr]) -> Vec<String> {
    let mut all = BTreeSet::new();
    for e in exprs {
        all.extend(e.free_vars());
    }
    all.into_iter().collect()
}

/// Values of `exprs` at `policy.samples` admissible points (one row per point).
pub fn sample_values(exprs: &[Expr], policy: &SamplingPolicy) -> Result<Vec<Vec<f64>>, SampleError> {
    sample_values_over(&union_vars(exprs), exprs, policy)
}

/// As [`sample_values`] with an explicit coordinate list.
pub fn sample_values_over(
    vars: &[String],
    exprs: &[Expr],
    policy: &SamplingPolicy,
) -> Result<Vec<Vec<f64>>, SampleError> {
    let mut vars: Vec<String> = vars.to_vec();
    for v in union_vars(exprs) {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let mut sampler = Sampler::new(policy);
    Ok(sampler.points(&vars, exprs)?.into_iter().map(|p| p.values).collect())
}

/// Largest scaled difference over pairs; `Exact` when every pair is structurally equal.
pub fn max_pair_residual(pairs: &[(Expr, Expr)], policy: &SamplingPolicy) -> Result<Residual, SampleError> {
    let open: Vec<&(Expr, Expr)> = pairs.iter().filter(|(a, b)| a != b).collect();
    if open.is_empty() {
        return Ok(Residual::Exact);
    }
    let exprs: Vec<Expr> = open.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let rows = sample_values(&exprs, policy)?;
    let mut worst = 0.0f64;
    for row in &rows {
        for pair in row.chunks(2) {
            let (a, b) = (pair[0], pair[1]);
            worst = worst.max((a - b).abs() / 1f64.max(a.abs()).max(b.abs()));
        }
    }
    Ok(Residual::Numeric(worst))
}

/// Check that each `lhs == rhs` as functions, by sampling.
pub fn identity_check(name: &str, pairs: &[(Expr, Expr)], policy: &SamplingPolicy) -> Check {
    match max_pair_residual(pairs, policy) {
        Ok(Residual::Exact) => Check::pass(name).with_residual(Residual::Exact),
        Ok(Residual::Numeric(r)) => Check::from_bool(name, r <= policy.tol)
            .with_residual(Residual::Numeric(r))
            .with_samples(policy.samples),
        Ok(Residual::None) => unreachable!("pair residuals are exact or numeric"),
        Err(e) => Check::fail(name).with_detail(e.to_string()),
    }
}

/// Check that every expression vanishes identically.
pub fn zero_check(name: &str, exprs: &[Expr], policy: &SamplingPolicy) -> Check {
    let pairs: Vec<(Expr, Expr)> = exprs.iter().map(|e| (e.clone(), Expr::zero())).collect();
    identity_check(name, &pairs, policy)
}

/// Check that `e` stays away from zero: `min |e| > threshold` at every sample.
pub fn nonvanishing_check(name: &str, e: &Expr, threshold: f64, policy: &SamplingPolicy) -> Check {
    if let Some(q) = e.as_const() {
        let v = crate::expr::rational_to_f64(q);
        return Check::from_bool(name, v.abs() > threshold)
            .with_residual(Residual::Exact)
            .with_detail(format!("constant {e}"));
    }
    match sample_values(std::slice::from_ref(e), policy) {
        Ok(rows) => {
            let min = rows.iter().map(|r| r[0].abs()).fold(f64::INFINITY, f64::min);
            Check::from_bool(name, min > threshold)
                .with_samples(rows.len())
                .with_detail(format!("min |value| = {min:.3e}"))
        }
        Err(err) => Check::fail(name).with_detail(err.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn identity_and_zero_checks() {
        let p = SamplingPolicy::default();
        let a = parse("(x+y)^2").unwrap();
        let b = parse("x^2 + 2*x*y + y^2").unwrap();
        assert!(identity_check("square", &[(a.clone(), b)], &p).passed());
        assert!(!zero_check("nonzero", std::slice::from_ref(&a), &p).passed());
        assert_eq!(zero_check("empty", &[], &p).max_residual, Residual::Exact);
        assert!(!identity_check("shift", &[(parse("x").unwrap(), parse("x + 0.000001").unwrap())], &p).passed());
    }

    #[test]
    fn nonvanishing() {
        let p = SamplingPolicy::default();
        assert!(nonvanishing_check("exp", &parse("exp(x)").unwrap(), 1e-6, &p).passed());
        assert!(!nonvanishing_check("zero", &Expr::zero(), 1e-6, &p).passed());
        assert!(nonvanishing_check("const", &Expr::int(-2), 1e-6, &p).passed());
    }
}
