//! LU factorizations with partial pivoting: dense real, banded real and
//! dense complex.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use super::Matrix;
use crate::{Error, Result};

/// Dense `PA = LU` factorization.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: a.cols(),
            });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if pmax == 0.0 || !pmax.is_finite() {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        let v = lu[(k, j)];
                        lu[(i, j)] -= f * v;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Solves `A x = b` in place.
    #[allow(clippy::needless_range_loop)]
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = row[..i].iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .map(|(u, v)| u * v)
                .sum();
            x[i] = (x[i] - s) / row[i];
        }
        b.copy_from_slice(&x);
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Banded `PA = LU` with partial pivoting (LAPACK `gbtrf` layout idea:
/// `kl` extra super-diagonals absorb pivoting fill-in).
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row `i` stores columns `i - kl ..= i + kl + ku` at offsets `0..width`.
    band: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    /// Factors the `n × n` matrix with entries `entry(i, j)` for
    /// `j ∈ [i − kl, i + ku]`; all other entries are taken to be zero.
    pub fn factor(
        n: usize,
        kl: usize,
        ku: usize,
        mut entry: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let width = 2 * kl + ku + 1;
        let mut band = vec![0.0; n * width];
        let at = |i: usize, j: usize| i * width + (j + kl - i);
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            for j in lo..=hi {
                band[at(i, j)] = entry(i, j);
            }
        }
        let mut pivots = vec![0; n];
        let ucols = kl + ku;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut pmax = band[at(k, k)].abs();
            for i in (k + 1)..=last {
                let v = band[at(i, k)].abs();
                if v > pmax {
                    pmax = v;
                    p = i;
                }
            }
            if pmax == 0.0 || !pmax.is_finite() {
                return Err(Error::Singular);
            }
            pivots[k] = p;
            let jmax = (k + ucols).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    band.swap(at(k, j), at(p, j));
                }
            }
            let pivot = band[at(k, k)];
            for i in (k + 1)..=last {
                let f = band[at(i, k)] / pivot;
                band[at(i, k)] = f;
                if f != 0.0 {
                    for j in (k + 1)..=jmax {
                        let v = band[at(k, j)];
                        band[at(i, j)] -= f * v;
                    }
                }
            }
        }
        Ok(Self {
            n,
            kl,
            ku,
            band,
            pivots,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        let width = 2 * self.kl + self.ku + 1;
        let kl = self.kl;
        let at = |i: usize, j: usize| i * width + (j + kl - i);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for i in (k + 1)..=(k + kl).min(n - 1) {
                    b[i] -= self.band[at(i, k)] * bk;
                }
            }
        }
        let ucols = self.kl + self.ku;
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in (i + 1)..=(i + ucols).min(n - 1) {
                s -= self.band[at(i, j)] * b[j];
            }
            b[i] = s / self.band[at(i, i)];
        }
    }
}

/// Dense complex LU, used for frequency responses `(sI − A)⁻¹ B`.
#[derive(Debug, Clone)]
pub struct ComplexLu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl ComplexLu {
    /// Factors the row-major `n × n` complex matrix.
    pub fn factor(n: usize, mut a: Vec<Complex64>) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut pmax = a[k * n + k].norm();
            for i in (k + 1)..n {
                let v = a[i * n + k].norm();
                if v > pmax {
                    pmax = v;
                    p = i;
                }
            }
            if pmax == 0.0 || !pmax.is_finite() {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in (k + 1)..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                if !f.is_zero() {
                    for j in (k + 1)..n {
                        let v = a[k * n + j];
                        a[i * n + j] -= f * v;
                    }
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = Complex64::zero();
            for j in 0..i {
                s += self.lu[i * n + j] * x[j];
            }
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let mut s = Complex64::zero();
            for j in (i + 1)..n {
                s += self.lu[i * n + j] * x[j];
            }
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }
}
