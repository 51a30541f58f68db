use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{EvalError, Func, Ring};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Taylor coefficients `f^(m)(c) / m!` for `m = 0..=order`, computed in `ring`.
pub fn taylor_coefficients<R: Ring>(
    ring: &R,
    func: Func,
    c: &R::Elem,
    order: usize,
) -> Result<Vec<R::Elem>, EvalError> {
    let mut out = Vec::with_capacity(order + 1);
    let mut inv_fact = BigRational::one();
    match func {
        Func::Exp => {
            let e = ring.apply(Func::Exp, c)?;
            for m in 0..=order {
                if m > 0 {
                    inv_fact /= BigRational::from_integer(m.into());
                }
                out.push(ring.scale(&inv_fact, &e)?);
            }
        }
        Func::Sin | Func::Cos => {
            let s = ring.apply(Func::Sin, c)?;
            let co = ring.apply(Func::Cos, c)?;
            // derivatives of sin cycle through sin, cos, -sin, -cos
            let cycle = [s.clone(), co.clone(), ring.neg(&s), ring.neg(&co)];
            let shift = if func == Func::Sin { 0 } else { 1 };
            for m in 0..=order {
                if m > 0 {
                    inv_fact /= BigRational::from_integer(m.into());
                }
                out.push(ring.scale(&inv_fact, &cycle[(m + shift) % 4])?);
            }
        }
        Func::Log => {
            out.push(ring.apply(Func::Log, c)?);
            let inv_c = ring.div(&ring.one(), c)?;
            let mut pow = ring.one();
            for m in 1..=order {
                pow = ring.mul(&pow, &inv_c);
                let sign = if m % 2 == 1 { 1 } else { -1 };
                out.push(ring.scale(&q(sign, m as i64), &pow)?);
            }
        }
        Func::Sqrt => {
            let root = ring.apply(Func::Sqrt, c)?;
            out.push(root.clone());
            if order > 0 {
                let inv_c = ring.div(&ring.one(), c)?;
                let mut binom = BigRational::one();
                let mut term = root;
                for m in 1..=order {
                    binom = binom * (q(1, 2) - BigRational::from_integer((m as i64 - 1).into()))
                        / BigRational::from_integer(m.into());
                    term = ring.mul(&term, &inv_c);
                    out.push(ring.scale(&binom, &term)?);
                }
            }
        }
        Func::Tan => {
            // d^m tan = P_m(tan) with P_0 = t and P_{m+1} = P_m'(t) (1 + t^2)
            let t = ring.apply(Func::Tan, c)?;
            let mut poly: Vec<BigRational> = vec![BigRational::from_integer(0.into()), BigRational::one()];
            for m in 0..=order {
                if m > 0 {
                    inv_fact /= BigRational::from_integer(m.into());
                }
                let mut acc = ring.zero();
                for coef in poly.iter().rev() {
                    acc = ring.mul(&acc, &t);
                    acc = ring.add(&acc, &ring.constant(coef)?);
                }
                out.push(ring.scale(&inv_fact, &acc)?);
                poly = next_tan_poly(&poly);
            }
        }
    }
    Ok(out)
}

fn next_tan_poly(p: &[BigRational]) -> Vec<BigRational> {
    let deriv: Vec<BigRational> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(i.into()))
        .collect();
    let mut out = vec![BigRational::from_integer(0.into()); deriv.len() + 2];
    for (i, c) in deriv.iter().enumerate() {
        out[i] += c;
        out[i + 2] += c;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::F64Ring;

    fn factorial(m: usize) -> f64 {
        (1..=m).map(|i| i as f64).product()
    }

    // Oracle: central finite differences of the native function.
    fn fd_derivative(f: fn(f64) -> f64, c: f64, m: usize) -> f64 {
        let h: f64 = 1e-2;
        let mut s = 0.0;
        for j in 0..=m {
            let binom = factorial(m) / (factorial(j) * factorial(m - j));
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * binom * f(c + (m as f64 / 2.0 - j as f64) * h);
        }
        s / h.powi(m as i32)
    }

    #[test]
    fn matches_finite_differences() {
        type Case = (Func, fn(f64) -> f64, f64);
        let cases: [Case; 6] = [
            (Func::Exp, f64::exp, 0.3),
            (Func::Sin, f64::sin, 0.7),
            (Func::Cos, f64::cos, -0.4),
            (Func::Tan, f64::tan, 0.2),
            (Func::Log, f64::ln, 1.7),
            (Func::Sqrt, f64::sqrt, 2.5),
        ];
        for (func, f, c) in cases {
            let coeffs = taylor_coefficients(&F64Ring, func, &c, 3).unwrap();
            for (m, t) in coeffs.iter().enumerate() {
                let expected = fd_derivative(f, c, m) / factorial(m);
                assert!((t - expected).abs() < 1e-3, "{func:?} m={m}: {t} vs {expected}");
            }
        }
    }

    #[test]
    fn tan_polynomials() {
        let p2 = next_tan_poly(&next_tan_poly(&[q(0, 1), q(1, 1)]));
        // tan'' = 2t + 2t^3
        assert_eq!(p2, vec![q(0, 1), q(2, 1), q(0, 1), q(2, 1)]);
    }
}
