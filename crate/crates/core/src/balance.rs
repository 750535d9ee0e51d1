//! Gramians, Hankel singular values and square-root balanced truncation.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Shadowed by std's inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{psd_factor, solve_lyapunov, svd, ComplexLu, Matrix};
use crate::model::StateSpaceSystem;
use crate::{Error, Result};

/// Hankel singular values at or below this fraction of the largest one are
/// treated as zero when deciding the numerical rank.
pub const HSV_RANK_TOL: f64 = 1e-10;

/// Two consecutive Hankel singular values closer than this (relative to the
/// larger) form a plateau that truncation refuses to split.
pub const PLATEAU_TOL: f64 = 1e-9;

/// Output of the square-root algorithm.
#[derive(Debug, Clone)]
pub struct BalanceResult {
    pub p: Matrix,
    pub q: Matrix,
    /// All Hankel singular values, nonincreasing, padded with zeros to the
    /// state dimension.
    pub hsv: Vec<f64>,
    /// Right projection, `N × r`.
    pub tr: Matrix,
    /// Left projection, `r × N`, with `Sr · Tr = I_r`.
    pub sr: Matrix,
    pub r: usize,
}

impl BalanceResult {
    pub fn retained_hsv(&self) -> &[f64] {
        &self.hsv[..self.r]
    }

    pub fn error_bound(&self) -> f64 {
        error_bound(&self.hsv, self.r)
    }
}

/// The projected linear part plus the two weight vectors needed to evaluate
/// the cubic term in `O(r)`.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub ar: Matrix,
    pub br: Matrix,
    pub cr: Matrix,
    /// Row of `Sr` hit by the nonlinearity, one weight per reduced state.
    pub nl_out_weights: Vec<f64>,
    /// Row of `Tr` that reconstructs the nonlinear state coordinate.
    pub nl_in_weights: Vec<f64>,
    pub nl_coeff: f64,
}

impl ReducedSystem {
    pub fn order(&self) -> usize {
        self.ar.rows()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TruncationOptions {
    /// Truncate even if `σ_r ≈ σ_{r+1}`.
    pub allow_plateau_split: bool,
}

/// Controllability and observability Gramians of `(A, B, C)`.
pub fn gramians_of(a: &Matrix, b: &Matrix, c: &Matrix) -> Result<(Matrix, Matrix)> {
    if b.rows() != a.rows() || c.cols() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: if b.rows() != a.rows() {
                b.rows()
            } else {
                c.cols()
            },
        });
    }
    let bbt = b.matmul(&b.transpose());
    let ctc = c.tr_matmul(c);
    let p = solve_lyapunov(a, &bbt)?;
    let q = solve_lyapunov(&a.transpose(), &ctc)?;
    Ok((p, q))
}

pub fn gramians(sys: &StateSpaceSystem) -> Result<(Matrix, Matrix)> {
    gramians_of(&sys.a, &sys.b, &sys.c)
}

/// Relative residual `‖A X + X Aᵀ + W‖_F / (2‖A‖_F‖X‖_F + ‖W‖_F)`.
pub fn lyapunov_residual(a: &Matrix, x: &Matrix, w: &Matrix) -> f64 {
    let ax = a.matmul(x);
    let res = ax.add(&ax.transpose()).add(w);
    let scale = 2.0 * a.frobenius_norm() * x.frobenius_norm() + w.frobenius_norm();
    if scale == 0.0 {
        0.0
    } else {
        res.frobenius_norm() / scale
    }
}

fn check_pair(p: &Matrix, q: &Matrix) -> Result<()> {
    if !p.is_square() || !q.is_square() || p.rows() != q.rows() {
        return Err(Error::DimensionMismatch {
            expected: p.rows(),
            found: q.rows(),
        });
    }
    Ok(())
}

/// Factors and SVD shared by [`hankel_values`] and the square-root algorithm.
struct CrossSvd {
    u_fac: Matrix,
    l_fac: Matrix,
    z: Matrix,
    sigma: Vec<f64>,
    y: Matrix,
}

fn cross_svd(p: &Matrix, q: &Matrix) -> Result<CrossSvd> {
    check_pair(p, q)?;
    let u_fac = psd_factor(p)?;
    let l_fac = psd_factor(q)?;
    let m = l_fac.tr_matmul(&u_fac);
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(CrossSvd {
            z: Matrix::zeros(m.rows(), 0),
            y: Matrix::zeros(m.cols(), 0),
            sigma: Vec::new(),
            u_fac,
            l_fac,
        });
    }
    let s = svd(&m)?;
    Ok(CrossSvd {
        u_fac,
        l_fac,
        z: s.u,
        sigma: s.sigma,
        y: s.v,
    })
}

fn padded(mut sigma: Vec<f64>, n: usize) -> Vec<f64> {
    sigma.resize(n.max(sigma.len()), 0.0);
    sigma
}

/// Hankel singular values: singular values of `Lᵀ U` for `P = U Uᵀ`,
/// `Q = L Lᵀ`, padded with zeros to the state dimension.
pub fn hankel_values(p: &Matrix, q: &Matrix) -> Result<Vec<f64>> {
    let cs = cross_svd(p, q)?;
    Ok(padded(cs.sigma, p.rows()))
}

/// Number of Hankel singular values above `HSV_RANK_TOL · σ₁`.
pub fn numerical_rank(hsv: &[f64]) -> usize {
    let largest = hsv.first().copied().unwrap_or(0.0);
    hsv.iter()
        .take_while(|&&s| s > 0.0 && s > HSV_RANK_TOL * largest)
        .count()
}

pub fn square_root_transform(p: &Matrix, q: &Matrix, r: usize) -> Result<BalanceResult> {
    square_root_transform_with(p, q, r, TruncationOptions::default())
}

/// Square-root balancing: with `Lᵀ U = Z Σ Yᵀ`,
/// `Tr = U Y_r Σ_r^{-1/2}` and `Sr = Σ_r^{-1/2} Z_rᵀ Lᵀ`.
pub fn square_root_transform_with(
    p: &Matrix,
    q: &Matrix,
    r: usize,
    opts: TruncationOptions,
) -> Result<BalanceResult> {
    let cs = cross_svd(p, q)?;
    let rank = numerical_rank(&cs.sigma);
    if r == 0 || r > rank {
        return Err(Error::RankDeficient { r, rank });
    }
    if !opts.allow_plateau_split && r < cs.sigma.len() {
        let (hi, lo) = (cs.sigma[r - 1], cs.sigma[r]);
        if hi - lo <= PLATEAU_TOL * hi {
            return Err(Error::PlateauSplit { r });
        }
    }
    let inv_roots: Vec<f64> = cs.sigma[..r].iter().map(|s| 1.0 / s.sqrt()).collect();
    let tr = cs
        .u_fac
        .matmul(&cs.y.leading_columns(r))
        .scale_columns(&inv_roots);
    let sr =
        cs.z.leading_columns(r)
            .tr_matmul(&cs.l_fac.transpose())
            .scale_rows(&inv_roots);
    Ok(BalanceResult {
        p: p.clone(),
        q: q.clone(),
        hsv: padded(cs.sigma, p.rows()),
        tr,
        sr,
        r,
    })
}

/// Gramians followed by the square-root algorithm.
pub fn balance(sys: &StateSpaceSystem, r: usize) -> Result<BalanceResult> {
    let (p, q) = gramians(sys)?;
    square_root_transform(&p, &q, r)
}

/// Projects the system with the balancing pair.
pub fn reduce(sys: &StateSpaceSystem, bal: &BalanceResult) -> Result<ReducedSystem> {
    project(sys, &bal.tr, &bal.sr)
}

/// Petrov-Galerkin projection `Ar = Sr A Tr`, `Br = Sr B`, `Cr = C Tr` for
/// any pair with `Sr Tr = I`.
pub fn project(sys: &StateSpaceSystem, tr: &Matrix, sr: &Matrix) -> Result<ReducedSystem> {
    let dim = sys.dim();
    if tr.rows() != dim || sr.cols() != dim || sr.rows() != tr.cols() || sys.a.rows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: if tr.rows() != dim {
                tr.rows()
            } else {
                sr.cols()
            },
        });
    }
    let ar = sr.matmul(&sys.a).matmul(tr);
    let br = sr.matmul(&sys.b);
    let cr = sys.c.matmul(tr);
    let nl_out_weights = sr.column(sys.nl_target_index);
    let nl_in_weights = tr.row(sys.nl_state_index).to_vec();
    Ok(ReducedSystem {
        ar,
        br,
        cr,
        nl_out_weights,
        nl_in_weights,
        nl_coeff: sys.nl_coeff,
    })
}

/// `2 Σ_{i>r} σ_i`.
pub fn error_bound(hsv: &[f64], r: usize) -> f64 {
    2.0 * hsv.iter().skip(r).sum::<f64>()
}

/// Smallest `r ≥ 1` whose error bound is at most `tol`.
pub fn suggest_r(hsv: &[f64], tol: f64) -> usize {
    (1..=hsv.len())
        .find(|&r| error_bound(hsv, r) <= tol)
        .unwrap_or(hsv.len())
}

/// Complex `p × m` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl FrequencyResponse {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Largest singular value, via the real embedding `[[Re, −Im], [Im, Re]]`
    /// whose singular values are those of the complex matrix, each twice.
    pub fn spectral_norm(&self) -> Result<f64> {
        let (p, m) = (self.rows, self.cols);
        let real = Matrix::from_fn(2 * p, 2 * m, |i, j| {
            let z = self.get(i % p, j % m);
            match (i < p, j < m) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        });
        Ok(svd(&real)?.sigma.first().copied().unwrap_or(0.0))
    }
}

/// `G(s) = C (sI − A)⁻¹ B` by one complex LU solve per input column.
pub fn transfer_function(
    a: &Matrix,
    b: &Matrix,
    c: &Matrix,
    s: Complex64,
) -> Result<FrequencyResponse> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n || c.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if b.rows() != n { b.rows() } else { c.cols() },
        });
    }
    let mut shifted = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let diag = if i == j { s } else { Complex64::new(0.0, 0.0) };
            shifted[i * n + j] = diag - a[(i, j)];
        }
    }
    let lu = ComplexLu::factor(n, shifted).map_err(|_| Error::SingularShift)?;
    let (p, m) = (c.rows(), b.cols());
    let mut data = vec![Complex64::new(0.0, 0.0); p * m];
    for j in 0..m {
        let rhs: Vec<Complex64> = (0..n).map(|i| Complex64::new(b[(i, j)], 0.0)).collect();
        let x = lu.solve(&rhs);
        for i in 0..p {
            data[i * m + j] = (0..n).map(|k| x[k] * c[(i, k)]).sum();
        }
    }
    Ok(FrequencyResponse {
        rows: p,
        cols: m,
        data,
    })
}

/// `n` points `10^lo ..= 10^hi`, evenly spaced in the exponent.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![10f64.powf(lo)],
        _ => (0..n)
            .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (n - 1) as f64))
            .collect(),
    }
}

/// `max_ω ‖G(iω) − G_r(iω)‖₂` over the given frequencies.
pub fn max_frequency_error(
    sys: &StateSpaceSystem,
    red: &ReducedSystem,
    omegas: &[f64],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &w in omegas {
        let s = Complex64::new(0.0, w);
        let g = transfer_function(&sys.a, &sys.b, &sys.c, s)?;
        let gr = transfer_function(&red.ar, &red.br, &red.cr, s)?;
        worst = worst.max(g.sub(&gr).spectral_norm()?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar() -> (Matrix, Matrix, Matrix) {
        let one = Matrix::from_rows(&[[1.0]]);
        (Matrix::from_rows(&[[-1.0]]), one.clone(), one)
    }

    #[test]
    fn scalar_gramians() {
        let (a, b, c) = scalar();
        let (p, q) = gramians_of(&a, &b, &c).unwrap();
        assert!((p[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((q[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unforced_gramian_is_zero() {
        let a = Matrix::from_rows(&[[-1.0, 1.0], [0.0, -2.0]]);
        let b = Matrix::zeros(2, 1);
        let c = Matrix::from_rows(&[[1.0, 0.0]]);
        let (p, _) = gramians_of(&a, &b, &c).unwrap();
        assert_eq!(p.max_abs(), 0.0);
        assert_eq!(
            hankel_values(&p, &Matrix::identity(2)).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn hankel_values_of_diagonal_pairs() {
        let i2 = Matrix::identity(2);
        let hsv = hankel_values(&i2, &i2).unwrap();
        assert!((hsv[0] - 1.0).abs() < 1e-15 && (hsv[1] - 1.0).abs() < 1e-15);
        let hsv = hankel_values(&Matrix::from_diagonal(&[4.0, 1.0]), &i2).unwrap();
        assert!((hsv[0] - 2.0).abs() < 1e-15 && (hsv[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn truncating_a_diagonal_pair() {
        let p = Matrix::from_diagonal(&[4.0, 1.0]);
        let bal = square_root_transform(&p, &Matrix::identity(2), 1).unwrap();
        assert_eq!(bal.retained_hsv().len(), 1);
        assert!((bal.retained_hsv()[0] - 2.0).abs() < 1e-15);
        assert!((bal.error_bound() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn balanced_input_selects_leading_coordinates() {
        let sigma = Matrix::from_diagonal(&[3.0, 2.0, 1.0]);
        let bal = square_root_transform(&sigma, &sigma, 2).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((bal.tr[(i, j)].abs() - expected).abs() < 1e-14);
                assert!((bal.sr[(j, i)].abs() - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn plateau_and_rank_guards() {
        let i2 = Matrix::identity(2);
        assert_eq!(
            square_root_transform(&i2, &i2, 1).unwrap_err(),
            Error::PlateauSplit { r: 1 }
        );
        let forced = TruncationOptions {
            allow_plateau_split: true,
        };
        assert!(square_root_transform_with(&i2, &i2, 1, forced).is_ok());
        let p = Matrix::from_diagonal(&[1.0, 0.0]);
        assert_eq!(
            square_root_transform(&p, &i2, 2).unwrap_err(),
            Error::RankDeficient { r: 2, rank: 1 }
        );
    }

    #[test]
    fn bound_arithmetic() {
        assert_eq!(error_bound(&[2.0, 1.0, 0.5], 1), 3.0);
        assert_eq!(error_bound(&[2.0, 1.0, 0.5], 3), 0.0);
        assert_eq!(suggest_r(&[2.0, 1.0, 0.5], 1.0), 2);
        assert_eq!(suggest_r(&[2.0, 1.0, 0.5], 0.0), 3);
    }

    #[test]
    fn scalar_transfer_function() {
        let (a, b, c) = scalar();
        let g = transfer_function(&a, &b, &c, Complex64::new(0.0, 0.0)).unwrap();
        assert!((g.get(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let g = transfer_function(&a, &b, &c, Complex64::new(0.0, 1e6)).unwrap();
        assert!(g.get(0, 0).norm() < 1e-5);
        assert_eq!(
            transfer_function(&a, &b, &c, Complex64::new(-1.0, 0.0)).unwrap_err(),
            Error::SingularShift
        );
    }

    #[test]
    fn spectral_norm_of_column() {
        let g = FrequencyResponse {
            rows: 2,
            cols: 1,
            data: vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)],
        };
        assert!((g.spectral_norm().unwrap() - 5.0).abs() < 1e-14);
    }
}
