//! Jacobi methods: cyclic two-sided for symmetric eigenproblems and
//! one-sided (Hestenes) for the SVD. Both are slow-ish but resolve tiny
//! eigen/singular values to high relative accuracy, which matters for
//! numerically rank-deficient Gramians.

use alloc::vec::Vec;

// Shadowed by std's inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use super::matrix::{dot, norm2};
use super::Matrix;
use crate::{Error, Result};

/// Eigen-decomposition `S = V diag(values) Vᵀ` of a symmetric matrix,
/// eigenvalues sorted in decreasing order.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// `M = U diag(sigma) Vᵀ` (thin: `U` is `m × k`, `V` is `n × k`,
/// `k = min(m, n)`), `sigma` nonincreasing.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

pub fn symmetric_eigen(s: &Matrix) -> Result<SymmetricEigen> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch {
            expected: s.rows(),
            found: s.cols(),
        });
    }
    if !s.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = s.rows();
    let mut a = s.clone();
    a.symmetrize();
    let mut v = Matrix::identity(n);
    let eps = f64::EPSILON;
    let floor = eps * eps * a.frobenius_norm();
    let budget = 100 * n.max(1);
    let mut converged = false;
    for _ in 0..budget {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                if apq.abs() <= floor || apq.abs() <= eps * (app * aqq).abs().sqrt() {
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = c * arp - sn * arq;
                    a[(r, q)] = sn * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[(p, r)];
                    let aqr = a[(q, r)];
                    a[(p, r)] = c * apr - sn * aqr;
                    a[(q, r)] = sn * apr + c * aqr;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - sn * vrq;
                    v[(r, q)] = sn * vrp + c * vrq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "Jacobi eigenvalue sweeps",
            iterations: budget,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    Ok(SymmetricEigen { values, vectors })
}

pub fn svd(m: &Matrix) -> Result<SvdResult> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    if m.rows() < m.cols() {
        let t = svd_tall(&m.transpose())?;
        return Ok(SvdResult {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    svd_tall(m)
}

fn svd_tall(m: &Matrix) -> Result<SvdResult> {
    let (rows, cols) = (m.rows(), m.cols());
    // columns stored contiguously
    let mut u: Vec<Vec<f64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..cols).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let eps = f64::EPSILON;
    let budget = 100 * cols.max(1);
    let mut converged = false;
    for _ in 0..budget {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = dot(&u[p], &u[p]);
                let beta = dot(&u[q], &u[q]);
                let gamma = dot(&u[p], &u[q]);
                if alpha == 0.0 || beta == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut u, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "one-sided Jacobi SVD",
            iterations: budget,
        });
    }
    let norms: Vec<f64> = u.iter().map(|c| norm2(c)).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let largest = sigma.first().copied().unwrap_or(0.0);
    let mut ucols: Vec<Vec<f64>> = Vec::with_capacity(cols);
    let mut missing = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        if s > 0.0 && s > largest * eps * eps {
            ucols.push(u[j].iter().map(|x| x / s).collect());
        } else {
            ucols.push(alloc::vec![0.0; rows]);
            missing.push(k);
        }
    }
    complete_orthonormal(&mut ucols, &missing);
    let u = Matrix::from_fn(rows, cols, |i, k| ucols[k][i]);
    let v = Matrix::from_fn(cols, cols, |i, k| v[order[k]][i]);
    Ok(SvdResult { u, sigma, v })
}

fn rotate_columns(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
        let x = *a;
        let y = *b;
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// Fills the listed (zero) columns with unit vectors orthogonal to all others.
fn complete_orthonormal(cols: &mut [Vec<f64>], missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let rows = cols[0].len();
    let mut candidate = 0;
    for &k in missing {
        while candidate < rows {
            let mut e = alloc::vec![0.0; rows];
            e[candidate] = 1.0;
            candidate += 1;
            // two passes of Gram-Schmidt
            for _ in 0..2 {
                for (j, c) in cols.iter().enumerate() {
                    if j == k {
                        continue;
                    }
                    let d = dot(c, &e);
                    for (ei, ci) in e.iter_mut().zip(c) {
                        *ei -= d * ci;
                    }
                }
            }
            let nrm = norm2(&e);
            if nrm > 1e-8 {
                cols[k] = e.iter().map(|x| x / nrm).collect();
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn diagonal_svd() {
        let r = svd(&Matrix::from_diagonal(&[3.0, 1.0])).unwrap();
        assert_eq!(r.sigma, vec![3.0, 1.0]);
        let r = svd(&Matrix::from_diagonal(&[1.0, 3.0])).unwrap();
        assert_eq!(r.sigma, vec![3.0, 1.0]);
    }

    #[test]
    fn zero_svd_has_orthonormal_factors() {
        let r = svd(&Matrix::zeros(2, 2)).unwrap();
        assert_eq!(r.sigma, vec![0.0, 0.0]);
        let utu = r.u.tr_matmul(&r.u);
        assert!(utu.sub(&Matrix::identity(2)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn wide_matrix_svd() {
        let m = Matrix::from_rows(&[[1.0, 2.0, 0.0], [0.0, 1.0, 1.0]]);
        let r = svd(&m).unwrap();
        assert_eq!(
            (r.u.rows(), r.u.cols(), r.v.rows(), r.v.cols()),
            (2, 2, 3, 2)
        );
        let rec = r.u.scale_columns(&r.sigma).matmul(&r.v.transpose());
        assert!(rec.sub(&m).frobenius_norm() < 1e-14);
    }

    #[test]
    fn symmetric_eigen_two_by_two() {
        let s = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]);
        let e = symmetric_eigen(&s).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }
}
