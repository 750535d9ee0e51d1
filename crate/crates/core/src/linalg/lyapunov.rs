//! Bartels-Stewart solver for `A X + X Aᵀ + W = 0`.

use super::lu::Lu;
use super::schur::{diagonal_blocks, real_schur, DiagBlock};
use super::Matrix;
use crate::{Error, Result};

/// Solves the continuous Lyapunov equation `A X + X Aᵀ + W = 0` for a
/// Hurwitz `A` and symmetric `W`.
///
/// The returned solution is exactly symmetric.
pub fn solve_lyapunov(a: &Matrix, w: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.cols(),
        });
    }
    if w.rows() != n || w.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w.rows(),
        });
    }
    if w.asymmetry() > 1e-10 {
        return Err(Error::InvalidArgument(
            "Lyapunov right-hand side is not symmetric",
        ));
    }
    let schur = real_schur(a)?;
    let max_re = schur
        .eigenvalues()
        .iter()
        .fold(f64::NEG_INFINITY, |m, l| m.max(l.re));
    if max_re >= 0.0 {
        return Err(Error::UnstableSystem {
            max_real_part: max_re,
        });
    }
    let q = &schur.q;
    let t = &schur.t;
    let c = q.tr_matmul(w).matmul(q);
    let y = solve_quasi_triangular(t, &c)?;
    let mut x = q.matmul(&y).matmul(&q.transpose());
    x.symmetrize();
    Ok(x)
}

/// Solves `T Y + Y Tᵀ = −C` for upper quasi-triangular `T`.
fn solve_quasi_triangular(t: &Matrix, c: &Matrix) -> Result<Matrix> {
    let n = t.rows();
    let blocks = diagonal_blocks(t);
    let mut y = Matrix::zeros(n, n);
    for bi in blocks.iter().rev() {
        for bj in blocks.iter().rev() {
            solve_block(t, c, &mut y, *bi, *bj)?;
        }
    }
    Ok(y)
}

fn solve_block(t: &Matrix, c: &Matrix, y: &mut Matrix, bi: DiagBlock, bj: DiagBlock) -> Result<()> {
    let n = t.rows();
    let (p, q) = (bi.size, bj.size);
    let mut rhs = [0.0f64; 4];
    for a in 0..p {
        for b in 0..q {
            let (ra, cb) = (bi.start + a, bj.start + b);
            let mut s = -c[(ra, cb)];
            for k in (bi.start + p)..n {
                s -= t[(ra, k)] * y[(k, cb)];
            }
            for l in (bj.start + q)..n {
                s -= y[(ra, l)] * t[(cb, l)];
            }
            rhs[a * q + b] = s;
        }
    }
    // Kronecker system for the p×q block, unknown y[a][b] at a*q + b
    let dim = p * q;
    let mut m = Matrix::zeros(dim, dim);
    for a in 0..p {
        for b in 0..q {
            let row = a * q + b;
            for a2 in 0..p {
                m[(row, a2 * q + b)] += t[(bi.start + a, bi.start + a2)];
            }
            for b2 in 0..q {
                m[(row, a * q + b2)] += t[(bj.start + b, bj.start + b2)];
            }
        }
    }
    let lu = Lu::factor(&m).map_err(|_| Error::SingularBlock)?;
    let sol = lu.solve(&rhs[..dim]);
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularBlock);
    }
    for a in 0..p {
        for b in 0..q {
            y[(bi.start + a, bj.start + b)] = sol[a * q + b];
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_equation() {
        let p =
            solve_lyapunov(&Matrix::from_rows(&[[-1.0]]), &Matrix::from_rows(&[[2.0]])).unwrap();
        assert!((p[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decoupled_scalars() {
        let a = Matrix::from_diagonal(&[-1.0, -2.0]);
        let w = Matrix::from_diagonal(&[2.0, 4.0]);
        let p = solve_lyapunov(&a, &w).unwrap();
        assert!(p.sub(&Matrix::identity(2)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn rejects_unstable_and_marginal() {
        let w = Matrix::identity(2);
        let a = Matrix::from_diagonal(&[-1.0, 0.5]);
        assert!(matches!(
            solve_lyapunov(&a, &w),
            Err(Error::UnstableSystem { .. })
        ));
        let rot = Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]);
        assert!(matches!(
            solve_lyapunov(&rot, &w),
            Err(Error::UnstableSystem { .. })
        ));
    }

    #[test]
    fn complex_pair_block() {
        // damped oscillator
        let a = Matrix::from_rows(&[[0.0, 1.0], [-4.0, -0.3]]);
        let w = Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0]]);
        let p = solve_lyapunov(&a, &w).unwrap();
        let r = a.matmul(&p).add(&p.matmul(&a.transpose())).add(&w);
        assert!(r.frobenius_norm() < 1e-13);
    }
}
