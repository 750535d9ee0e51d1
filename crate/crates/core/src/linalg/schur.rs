//! Real Schur decomposition by Householder reduction to Hessenberg form
//! followed by Francis double-shift QR iterations.

use alloc::vec::Vec;

use num_complex::Complex64;
// Shadowed by std's inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use super::Matrix;
use crate::{Error, Result};

/// `A = Q T Qᵀ` with `Q` orthogonal and `T` upper quasi-triangular.
///
/// Diagonal blocks of `T` are 1×1 (real eigenvalues) or 2×2 (complex
/// conjugate pairs). Real eigenvalue pairs are always split into 1×1 blocks.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: Matrix,
    pub t: Matrix,
}

/// A diagonal block of a quasi-triangular matrix: start index and size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagBlock {
    pub start: usize,
    pub size: usize,
}

impl SchurForm {
    pub fn blocks(&self) -> Vec<DiagBlock> {
        diagonal_blocks(&self.t)
    }

    /// Eigenvalues read from the diagonal blocks, in block order.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let t = &self.t;
        let mut out = Vec::with_capacity(t.rows());
        for b in self.blocks() {
            let k = b.start;
            if b.size == 1 {
                out.push(Complex64::new(t[(k, k)], 0.0));
            } else {
                let (l1, l2) =
                    block_eigenvalues(t[(k, k)], t[(k, k + 1)], t[(k + 1, k)], t[(k + 1, k + 1)]);
                out.push(l1);
                out.push(l2);
            }
        }
        out
    }
}

pub fn diagonal_blocks(t: &Matrix) -> Vec<DiagBlock> {
    let n = t.rows();
    let mut blocks = Vec::new();
    let mut k = 0;
    while k < n {
        if k + 1 < n && t[(k + 1, k)] != 0.0 {
            blocks.push(DiagBlock { start: k, size: 2 });
            k += 2;
        } else {
            blocks.push(DiagBlock { start: k, size: 1 });
            k += 1;
        }
    }
    blocks
}

fn block_eigenvalues(a: f64, b: f64, c: f64, d: f64) -> (Complex64, Complex64) {
    let p = 0.5 * (a - d);
    let disc = p * p + b * c;
    let mid = 0.5 * (a + d);
    if disc >= 0.0 {
        let s = disc.sqrt();
        (Complex64::new(mid + s, 0.0), Complex64::new(mid - s, 0.0))
    } else {
        let s = (-disc).sqrt();
        (Complex64::new(mid, s), Complex64::new(mid, -s))
    }
}

pub fn real_schur(a: &Matrix) -> Result<SchurForm> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.rows();
    let mut h = a.clone();
    let mut q = Matrix::identity(n);
    hessenberg(&mut h, &mut q);
    francis_qr(&mut h, &mut q)?;
    Ok(SchurForm { q, t: h })
}

/// Eigenvalues of a square matrix (conjugate pairs adjacent).
pub fn eigenvalues(a: &Matrix) -> Result<Vec<Complex64>> {
    Ok(real_schur(a)?.eigenvalues())
}

/// Householder vector `v` (with `v[0] = 1`) and `tau` such that
/// `(I − tau v vᵀ) x = (beta, 0, …)`.
fn householder(x: &[f64]) -> (Vec<f64>, f64) {
    let alpha = x[0];
    let sigma: f64 = x[1..].iter().map(|v| v * v).sum();
    let mut v = x.to_vec();
    v[0] = 1.0;
    if sigma == 0.0 {
        return (v, 0.0);
    }
    let mu = (alpha * alpha + sigma).sqrt();
    let v0 = if alpha <= 0.0 {
        alpha - mu
    } else {
        -sigma / (alpha + mu)
    };
    let tau = 2.0 * v0 * v0 / (sigma + v0 * v0);
    for vi in v[1..].iter_mut() {
        *vi /= v0;
    }
    (v, tau)
}

/// Applies `(I − tau v vᵀ)` from the left to rows `r0..r0+len(v)`,
/// columns `c0..c1`.
fn reflect_rows(m: &mut Matrix, v: &[f64], tau: f64, r0: usize, c0: usize, c1: usize) {
    if tau == 0.0 {
        return;
    }
    for j in c0..c1 {
        let s: f64 = v
            .iter()
            .enumerate()
            .map(|(k, vk)| vk * m[(r0 + k, j)])
            .sum();
        let s = tau * s;
        for (k, vk) in v.iter().enumerate() {
            m[(r0 + k, j)] -= s * vk;
        }
    }
}

/// Applies `(I − tau v vᵀ)` from the right to columns `c0..c0+len(v)`,
/// rows `r0..r1`.
fn reflect_cols(m: &mut Matrix, v: &[f64], tau: f64, c0: usize, r0: usize, r1: usize) {
    if tau == 0.0 {
        return;
    }
    for i in r0..r1 {
        let row = m.row_mut(i);
        let s: f64 = v.iter().enumerate().map(|(k, vk)| vk * row[c0 + k]).sum();
        let s = tau * s;
        for (k, vk) in v.iter().enumerate() {
            row[c0 + k] -= s * vk;
        }
    }
}

fn hessenberg(h: &mut Matrix, q: &mut Matrix) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x: Vec<f64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let (v, tau) = householder(&x);
        reflect_rows(h, &v, tau, k + 1, k, n);
        reflect_cols(h, &v, tau, k + 1, 0, n);
        reflect_cols(q, &v, tau, k + 1, 0, n);
        for i in (k + 2)..n {
            h[(i, k)] = 0.0;
        }
    }
}

/// Givens rotation `(c, s)` with `[c s; −s c]ᵀ [a; b] = [r; 0]`.
fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        return (1.0, 0.0);
    }
    let r = a.hypot(b);
    (a / r, b / r)
}

/// Rotates rows `i, i+1` by `Gᵀ` on columns `c0..n` and columns `i, i+1` by
/// `G` on rows `0..r1`, and accumulates into `q`.
fn rotate_pair(h: &mut Matrix, q: &mut Matrix, i: usize, c: f64, s: f64, c0: usize, r1: usize) {
    let n = h.cols();
    for j in c0..n {
        let a = h[(i, j)];
        let b = h[(i + 1, j)];
        h[(i, j)] = c * a + s * b;
        h[(i + 1, j)] = -s * a + c * b;
    }
    for r in 0..r1 {
        let a = h[(r, i)];
        let b = h[(r, i + 1)];
        h[(r, i)] = c * a + s * b;
        h[(r, i + 1)] = -s * a + c * b;
    }
    for r in 0..q.rows() {
        let a = q[(r, i)];
        let b = q[(r, i + 1)];
        q[(r, i)] = c * a + s * b;
        q[(r, i + 1)] = -s * a + c * b;
    }
}

/// Splits a 2×2 diagonal block at `i` with real eigenvalues into two 1×1
/// blocks. Leaves complex blocks untouched.
fn standardize_block(h: &mut Matrix, q: &mut Matrix, i: usize) {
    let (a, b, c, d) = (h[(i, i)], h[(i, i + 1)], h[(i + 1, i)], h[(i + 1, i + 1)]);
    if c == 0.0 {
        return;
    }
    let p = 0.5 * (a - d);
    let disc = p * p + b * c;
    if disc < 0.0 {
        return;
    }
    // eigenvalue farther from d first for a well-conditioned eigenvector
    let s = disc.sqrt();
    let lambda = 0.5 * (a + d) + if p >= 0.0 { s } else { -s };
    let (x1, y1) = (b, lambda - a);
    let (x2, y2) = (lambda - d, c);
    let (x, y) = if x1.hypot(y1) >= x2.hypot(y2) {
        (x1, y1)
    } else {
        (x2, y2)
    };
    let (cs, sn) = givens(x, y);
    let n = h.rows();
    rotate_pair(h, q, i, cs, sn, i, (i + 2).min(n));
    h[(i + 1, i)] = 0.0;
}

fn francis_qr(h: &mut Matrix, q: &mut Matrix) -> Result<()> {
    let n = h.rows();
    if n == 0 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let budget = 100 * n.max(1);
    let mut total_iter = 0usize;
    let mut iter_since_deflation = 0usize;
    let mut hi = n - 1;
    let anorm = h.max_abs();
    loop {
        // deflate negligible subdiagonals in the active window
        for i in 1..=hi {
            let scale = h[(i, i)].abs() + h[(i - 1, i - 1)].abs();
            let scale = if scale == 0.0 { anorm } else { scale };
            if h[(i, i - 1)].abs() <= eps * scale {
                h[(i, i - 1)] = 0.0;
            }
        }
        // find start of the unreduced block ending at hi
        let mut lo = hi;
        while lo > 0 && h[(lo, lo - 1)] != 0.0 {
            lo -= 1;
        }
        let size = hi - lo + 1;
        if size == 1 {
            if hi == 0 {
                break;
            }
            hi -= 1;
            iter_since_deflation = 0;
            continue;
        }
        if size == 2 {
            standardize_block(h, q, lo);
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            iter_since_deflation = 0;
            continue;
        }
        total_iter += 1;
        iter_since_deflation += 1;
        if total_iter > budget {
            return Err(Error::NonConvergence {
                what: "Francis QR",
                iterations: budget,
            });
        }
        francis_step(h, q, lo, hi, iter_since_deflation);
    }
    // clean round-off below the quasi-triangular structure
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            h[(i, j)] = 0.0;
        }
    }
    Ok(())
}

fn francis_step(h: &mut Matrix, q: &mut Matrix, lo: usize, hi: usize, iter: usize) {
    let n = h.rows();
    let (s, t) = if iter % 11 == 10 {
        // exceptional shift to break cycles
        let w = h[(hi, hi - 1)].abs() + h[(hi - 1, hi - 2)].abs();
        let s = 1.5 * w + h[(hi, hi)];
        (2.0 * s, s * s)
    } else {
        let (a, b, c, d) = (
            h[(hi - 1, hi - 1)],
            h[(hi - 1, hi)],
            h[(hi, hi - 1)],
            h[(hi, hi)],
        );
        (a + d, a * d - b * c)
    };
    let h11 = h[(lo, lo)];
    let h12 = h[(lo, lo + 1)];
    let h21 = h[(lo + 1, lo)];
    let h22 = h[(lo + 1, lo + 1)];
    let h32 = h[(lo + 2, lo + 1)];
    let mut x = h11 * h11 + h12 * h21 - s * h11 + t;
    let mut y = h21 * (h11 + h22 - s);
    let mut z = h21 * h32;
    for k in lo..=(hi - 2) {
        let (v, tau) = householder(&[x, y, z]);
        let c0 = if k > lo { k - 1 } else { lo };
        reflect_rows(h, &v, tau, k, c0, n);
        let r1 = (k + 4).min(hi + 1);
        reflect_cols(h, &v, tau, k, 0, r1);
        reflect_cols(q, &v, tau, k, 0, n);
        x = h[(k + 1, k)];
        y = h[(k + 2, k)];
        if k + 3 <= hi {
            z = h[(k + 3, k)];
        }
        if k > lo {
            h[(k + 1, k - 1)] = 0.0;
            h[(k + 2, k - 1)] = 0.0;
        }
    }
    let (c, s) = givens(x, y);
    rotate_pair(h, q, hi - 1, c, s, hi - 2, hi + 1);
    h[(hi, hi - 2)] = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn check_schur(a: &Matrix, f: &SchurForm) {
        let n = a.rows();
        let qtq = f.q.tr_matmul(&f.q);
        let orth = qtq.sub(&Matrix::identity(n)).frobenius_norm();
        assert!(orth <= 1e-12 * n as f64, "orthogonality {orth}");
        let rec = f.q.matmul(&f.t).matmul(&f.q.transpose());
        let err = rec.sub(a).frobenius_norm() / a.frobenius_norm().max(1e-300);
        assert!(err <= 1e-10, "reconstruction {err}");
        for i in 0..n {
            for j in 0..i.saturating_sub(1) {
                assert_eq!(f.t[(i, j)], 0.0);
            }
        }
        // no two consecutive nonzero subdiagonals
        for i in 2..n {
            assert!(f.t[(i, i - 1)] == 0.0 || f.t[(i - 1, i - 2)] == 0.0);
        }
    }

    #[test]
    fn diagonal_is_fixed_point() {
        let a = Matrix::from_diagonal(&[-1.0, -2.0]);
        let f = real_schur(&a).unwrap();
        assert_eq!(f.t, a);
        assert_eq!(f.q, Matrix::identity(2));
    }

    #[test]
    fn rotation_gives_complex_block() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]);
        let f = real_schur(&a).unwrap();
        assert_eq!(f.blocks(), vec![DiagBlock { start: 0, size: 2 }]);
        let mut ev = f.eigenvalues();
        ev.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((ev[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn real_pair_is_split() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        let f = real_schur(&a).unwrap();
        check_schur(&a, &f);
        assert_eq!(f.t[(1, 0)], 0.0);
    }

    #[test]
    fn structured_matrices() {
        let n = 12;
        // shift matrix plus a corner: eigenvalues on a circle
        let a = Matrix::from_fn(n, n, |i, j| if j == (i + 1) % n { 1.0 } else { 0.0 });
        check_schur(&a, &real_schur(&a).unwrap());
        let z = Matrix::zeros(5, 5);
        check_schur(
            &Matrix::identity(5),
            &real_schur(&Matrix::identity(5)).unwrap(),
        );
        let f = real_schur(&z).unwrap();
        assert_eq!(f.t, z);
    }
}
