//! Small dense linear algebra over rationals, expressions and floats.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::expr::Expr;

pub type QMatrix = Vec<Vec<BigRational>>;

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut QMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = BigRational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMatrix) -> usize {
    rref(&mut m.clone()).len()
}

pub fn det(m: &QMatrix) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut d = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                for j in c..n {
                    let delta = &f * &a[c][j];
                    a[i][j] -= delta;
                }
            }
        }
    }
    d
}

/// Unique solution of the square system `m x = b`, if `m` is invertible.
pub fn solve(m: &QMatrix, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut aug: QMatrix = m.iter().zip(b).map(|(row, bi)| {
        let mut r = row.clone();
        r.push(bi.clone());
        r
    }).collect();
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n].clone()).collect())
}

pub fn inverse(m: &QMatrix) -> Option<QMatrix> {
    let n = m.len();
    let mut aug: QMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Counts of positive, negative and zero eigenvalues of a symmetric rational matrix,
/// by Sylvester's law via symmetric Gaussian elimination.
pub fn signature(m: &QMatrix) -> (usize, usize, usize) {
    let n = m.len();
    let mut a = m.clone();
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        // prefer a nonzero diagonal pivot; otherwise combine two rows to make one
        let piv = active.iter().copied().find(|&i| !a[i][i].is_zero());
        let p = match piv {
            Some(p) => p,
            None => {
                let pair = active.iter().copied().find_map(|i| {
                    active.iter().copied().find(|&j| j != i && !a[i][j].is_zero()).map(|j| (i, j))
                });
                let Some((i, j)) = pair else { break };
                // congruence by e_i -> e_i + e_j makes a[i][i] = 2 a[i][j] != 0
                for k in 0..n {
                    let v = a[j][k].clone();
                    a[i][k] += v;
                }
                for k in 0..n {
                    let v = a[k][j].clone();
                    a[k][i] += v;
                }
                i
            }
        };
        let d = a[p][p].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        active.retain(|&i| i != p);
        for &i in &active {
            if a[i][p].is_zero() {
                continue;
            }
            let f = &a[i][p] / &d;
            for &j in &active {
                let delta = &f * &a[p][j];
                a[i][j] -= delta;
            }
        }
        for &i in &active {
            a[i][p] = BigRational::zero();
            a[p][i] = BigRational::zero();
        }
    }
    (pos, neg, n - pos - neg)
}

/// Determinant of a symbolic matrix by cofactor expansion, skipping zero entries.
pub fn expr_det(m: &[Vec<Expr>]) -> Expr {
    let cols: Vec<usize> = (0..m.len()).collect();
    det_rec(m, 0, &cols)
}

fn det_rec(m: &[Vec<Expr>], row: usize, cols: &[usize]) -> Expr {
    match cols.len() {
        0 => Expr::one(),
        1 => m[row][cols[0]].clone(),
        _ => {
            let mut acc = Expr::zero();
            for (pos, &c) in cols.iter().enumerate() {
                let entry = &m[row][c];
                if entry.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let term = entry.mul(&det_rec(m, row + 1, &rest));
                acc = if pos % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

/// Classical adjugate: `adj(m) · m = det(m) · I`.
pub fn expr_adjugate(m: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    let n = m.len();
    let mut adj = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<Expr>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c].clone()).collect())
                .collect();
            let d = expr_det(&minor);
            adj[j][i] = if (i + j) % 2 == 0 { d } else { d.neg() };
        }
    }
    adj
}

pub fn to_dmatrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(r, c, |i, j| rows[i][j])
}

/// Numerical rank with tolerance relative to the largest singular value.
pub fn rank_f64(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let sv = to_dmatrix(rows).singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * max.max(1.0)).count()
}

/// Smallest singular value divided by the largest.
pub fn conditioning_f64(rows: &[Vec<f64>]) -> f64 {
    let sv = to_dmatrix(rows).singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

pub fn det_f64(rows: &[Vec<f64>]) -> f64 {
    to_dmatrix(rows).determinant()
}

pub fn solve_f64(rows: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let a = to_dmatrix(rows);
    let rhs = nalgebra::DVector::from_column_slice(b);
    a.lu().solve(&rhs).map(|x| x.iter().copied().collect())
}

pub fn inverse_f64(rows: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let inv = to_dmatrix(rows).try_inverse()?;
    Some((0..inv.nrows()).map(|i| (0..inv.ncols()).map(|j| inv[(i, j)]).collect()).collect())
}

/// Signature of a symmetric float matrix with relative zero tolerance.
pub fn signature_f64(rows: &[Vec<f64>], rel_tol: f64) -> (usize, usize, usize) {
    let eig = to_dmatrix(rows).symmetric_eigen().eigenvalues;
    let scale = eig.iter().map(|e| e.abs()).fold(1.0, f64::max);
    let pos = eig.iter().filter(|e| **e > rel_tol * scale).count();
    let neg = eig.iter().filter(|e| **e < -rel_tol * scale).count();
    (pos, neg, eig.len() - pos - neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{expr_equiv, parse, SamplingPolicy};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn qm(rows: &[&[i64]]) -> QMatrix {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn rational_basics() {
        let m = qm(&[&[1, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
        assert_eq!(det(&m), q(-1));
        assert_eq!(rank(&m), 3);
        let inv = inverse(&m).unwrap();
        let x = solve(&m, &[q(1), q(2), q(3)]).unwrap();
        assert_eq!(x, vec![q(3), q(2), q(-2)]);
        assert_eq!(inv[0], vec![q(0), q(0), q(1)]);
        assert_eq!(rank(&qm(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn signatures() {
        assert_eq!(signature(&qm(&[&[0, 1], &[1, 0]])), (1, 1, 0));
        assert_eq!(signature(&qm(&[&[1, 0], &[0, 0]])), (1, 0, 1));
        assert_eq!(signature(&qm(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]])), (2, 1, 0));
        assert_eq!(signature_f64(&[vec![0.0, 1.0], vec![1.0, 0.0]], 1e-12), (1, 1, 0));
    }

    #[test]
    fn symbolic_adjugate() {
        let m: Vec<Vec<Expr>> = [["x", "y", "0"], ["1", "x", "z"], ["y", "0", "1"]]
            .iter()
            .map(|r| r.iter().map(|s| parse(s).unwrap()).collect())
            .collect();
        let adj = expr_adjugate(&m);
        let d = expr_det(&m);
        for i in 0..3 {
            for j in 0..3 {
                let prod = Expr::sum((0..3).map(|k| adj[i][k].mul(&m[k][j])).collect::<Vec<_>>().iter());
                let target = if i == j { d.clone() } else { Expr::zero() };
                assert!(expr_equiv(&prod, &target, &SamplingPolicy::default()).unwrap());
            }
        }
    }
}
