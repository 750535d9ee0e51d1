#![allow(dead_code)]

use cablemor::linalg::Matrix;
use cablemor::model::PhysicalParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

/// `M − (‖M‖_F + 0.5) I`: every eigenvalue has real part ≤ −0.5.
pub fn random_stable(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let m = random_matrix(rng, n, n);
    let shift = m.frobenius_norm() + 0.5;
    m.sub(&Matrix::identity(n).scale(shift))
}

pub fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let g = random_matrix(rng, n, n);
    g.matmul(&g.transpose())
        .add(&Matrix::identity(n).scale(0.1))
}

pub fn rel_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.sub(b).frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
}

/// γ = α_l = 0.1, k0 = kl = 1, α = α0 = 0 with the fixed parameters.
pub fn example1() -> PhysicalParams {
    PhysicalParams::default()
}

pub fn linear(p: PhysicalParams) -> PhysicalParams {
    PhysicalParams { k3: 0.0, ..p }
}
