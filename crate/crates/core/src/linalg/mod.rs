//! Dense real linear algebra used by the balancing pipeline.

mod jacobi;
mod lu;
mod lyapunov;
mod matrix;
mod schur;

pub use jacobi::{svd, symmetric_eigen, SvdResult, SymmetricEigen};
pub use lu::{BandedLu, ComplexLu, Lu};
pub use lyapunov::solve_lyapunov;
pub use matrix::{dot, norm2, Matrix};
pub use schur::{eigenvalues, real_schur, DiagBlock, SchurForm};

// Shadowed by std's inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Eigenvalues below this fraction of the largest are treated as zero when
/// factoring a PSD matrix.
pub const PSD_RANK_TOL: f64 = 1e-12;

/// Negative eigenvalues larger in magnitude than this fraction of the
/// largest eigenvalue make a matrix "not PSD".
pub const PSD_NEGATIVE_TOL: f64 = 1e-8;

/// Rank-revealing factor `F` with `F Fᵀ = P` for a symmetric PSD `P`.
///
/// Columns are ordered by decreasing eigenvalue; eigenvalues at or below
/// `PSD_RANK_TOL · λ_max` are dropped, so `F` may have fewer columns than
/// `P` (zero columns for `P = 0`).
pub fn psd_factor(p: &Matrix) -> Result<Matrix> {
    if p.asymmetry() > 1e-10 {
        return Err(Error::InvalidArgument(
            "PSD factor of a non-symmetric matrix",
        ));
    }
    let eig = symmetric_eigen(p)?;
    let largest = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let smallest = eig.values.last().copied().unwrap_or(0.0);
    let scale = largest.max(smallest.abs());
    if smallest < -PSD_NEGATIVE_TOL * scale {
        return Err(Error::NotPsd {
            eigenvalue: smallest,
        });
    }
    let rank = eig
        .values
        .iter()
        .take_while(|&&l| l > PSD_RANK_TOL * largest && l > 0.0)
        .count();
    let roots: alloc::vec::Vec<f64> = eig.values[..rank].iter().map(|l| l.sqrt()).collect();
    Ok(eig.vectors.leading_columns(rank).scale_columns(&roots))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_factor() {
        let f = psd_factor(&Matrix::identity(3)).unwrap();
        let rec = f.matmul(&f.transpose());
        assert!(rec.sub(&Matrix::identity(3)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn semidefinite_factor_is_rank_one() {
        let p = Matrix::from_diagonal(&[4.0, 0.0]);
        let f = psd_factor(&p).unwrap();
        assert_eq!(f.cols(), 1);
        assert!(f.matmul(&f.transpose()).sub(&p).frobenius_norm() < 1e-15);
    }

    #[test]
    fn zero_matrix_factor_is_empty() {
        let f = psd_factor(&Matrix::zeros(3, 3)).unwrap();
        assert_eq!((f.rows(), f.cols()), (3, 0));
    }

    #[test]
    fn indefinite_is_rejected() {
        let p = Matrix::from_diagonal(&[1.0, -0.5]);
        assert!(matches!(psd_factor(&p), Err(Error::NotPsd { .. })));
    }
}
