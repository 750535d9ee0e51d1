mod common;

use cablemor::balance::*;
use cablemor::linalg::{eigenvalues, solve_lyapunov, Matrix};
use cablemor::model::*;
use common::*;
use num_complex::Complex64;

#[test]
fn hankel_values_match_gramian_product_spectrum() {
    let mut rng = rng(20);
    let p = random_psd(&mut rng, 8);
    let q = random_psd(&mut rng, 8);
    let hsv = hankel_values(&p, &q).unwrap();
    let mut oracle: Vec<f64> = eigenvalues(&p.matmul(&q))
        .unwrap()
        .iter()
        .map(|l| l.re.sqrt())
        .collect();
    oracle.sort_by(|a, b| b.total_cmp(a));
    for (got, want) in hsv.iter().zip(&oracle) {
        assert!((got - want).abs() <= 1e-9 * want.max(1.0));
    }
}

#[test]
fn gramians_of_example1() {
    let sys = build_system(&example1(), 20).unwrap();
    let (p, q) = gramians(&sys).unwrap();
    let bbt = sys.b.matmul(&sys.b.transpose());
    let ctc = sys.c.tr_matmul(&sys.c);
    assert!(lyapunov_residual(&sys.a, &p, &bbt) <= 1e-10);
    assert!(lyapunov_residual(&sys.a.transpose(), &q, &ctc) <= 1e-10);
}

fn random_system(seed: u64, n: usize) -> (Matrix, Matrix, Matrix) {
    let mut rng = rng(seed);
    let a = random_stable(&mut rng, n);
    let b = random_matrix(&mut rng, n, 2);
    let c = random_matrix(&mut rng, 2, n);
    (a, b, c)
}

#[test]
fn full_order_transform_balances_random_system() {
    let (a, b, c) = random_system(21, 10);
    let (p, q) = gramians_of(&a, &b, &c).unwrap();
    let hsv = hankel_values(&p, &q).unwrap();
    let r = numerical_rank(&hsv);
    assert_eq!(r, 10);
    let bal = square_root_transform(&p, &q, r).unwrap();
    let sigma = Matrix::from_diagonal(&hsv);
    let p_hat = bal.sr.matmul(&p).matmul(&bal.sr.transpose());
    let q_hat = bal.tr.tr_matmul(&q).matmul(&bal.tr);
    assert!(rel_diff(&p_hat, &sigma) <= 1e-8);
    assert!(rel_diff(&q_hat, &sigma) <= 1e-8);
    for (x, y) in bal.hsv.iter().zip(&hsv) {
        assert!((x - y).abs() <= 1e-9 * hsv[0]);
    }
}

#[test]
fn projection_is_biorthogonal_and_reproducible() {
    let sys = build_system(&example1(), 20).unwrap();
    let (p, q) = gramians(&sys).unwrap();
    for r in [2, 4, 6, 8] {
        let bal = square_root_transform(&p, &q, r).unwrap();
        let id = bal.sr.matmul(&bal.tr).sub(&Matrix::identity(r));
        assert!(id.max_abs() <= 1e-10);
        let red = reduce(&sys, &bal).unwrap();
        let ar = bal.sr.matmul(&sys.a).matmul(&bal.tr);
        assert!(red.ar.sub(&ar).max_abs() <= 1e-12 * ar.max_abs());
        assert_eq!(red.nl_in_weights.len(), r);
        assert_eq!(red.nl_out_weights.len(), r);
    }
}

#[test]
fn reduced_example1_is_stable() {
    let sys = build_system(&example1(), 100).unwrap();
    let red = reduce(&sys, &balance(&sys, 4).unwrap()).unwrap();
    assert!(eigenvalues(&red.ar).unwrap().iter().all(|l| l.re < 0.0));
}

#[test]
fn bound_decreases_with_order() {
    let sys = build_system(&example1(), 100).unwrap();
    let (p, q) = gramians(&sys).unwrap();
    let hsv = hankel_values(&p, &q).unwrap();
    let bounds: Vec<f64> = (0..=hsv.len()).map(|r| error_bound(&hsv, r)).collect();
    assert!(bounds.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(*bounds.last().unwrap(), 0.0);
    let r = suggest_r(&hsv, 1e-3);
    assert!(error_bound(&hsv, r) <= 1e-3 && error_bound(&hsv, r - 1) > 1e-3);
}

#[test]
fn minimal_order_rom_matches_transfer_function() {
    let sys = build_system(&example1(), 20).unwrap();
    let (p, q) = gramians(&sys).unwrap();
    let r = numerical_rank(&hankel_values(&p, &q).unwrap());
    let red = reduce(&sys, &square_root_transform(&p, &q, r).unwrap()).unwrap();
    // relative to the peak gain: G has near-zeros on the grid
    let mut peak: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for w in log_space(-2.0, 2.0, 20) {
        let s = Complex64::new(0.0, w);
        let g = transfer_function(&sys.a, &sys.b, &sys.c, s).unwrap();
        let gr = transfer_function(&red.ar, &red.br, &red.cr, s).unwrap();
        peak = peak.max(g.spectral_norm().unwrap());
        worst = worst.max(g.sub(&gr).spectral_norm().unwrap());
    }
    assert!(worst <= 1e-8 * peak, "{:e}", worst / peak);
}

#[test]
fn frequency_error_respects_bound_on_random_system() {
    let (a, b, c) = random_system(22, 12);
    let (p, q) = gramians_of(&a, &b, &c).unwrap();
    let omegas = log_space(-2.0, 2.0, 50);
    for r in 1..12 {
        let bal = match square_root_transform(&p, &q, r) {
            Ok(bal) => bal,
            Err(cablemor::Error::PlateauSplit { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        let ar = bal.sr.matmul(&a).matmul(&bal.tr);
        let br = bal.sr.matmul(&b);
        let cr = c.matmul(&bal.tr);
        let mut worst: f64 = 0.0;
        for &w in &omegas {
            let s = Complex64::new(0.0, w);
            let g = transfer_function(&a, &b, &c, s).unwrap();
            let gr = transfer_function(&ar, &br, &cr, s).unwrap();
            worst = worst.max(g.sub(&gr).spectral_norm().unwrap());
        }
        assert!(worst <= bal.error_bound() + 1e-6, "r = {r}");
    }
}

#[test]
fn unforced_system_has_zero_controllability_gramian() {
    let mut sys = build_system(&example1(), 10).unwrap();
    sys.b = Matrix::zeros(20, 1);
    let (p, _) = gramians(&sys).unwrap();
    assert_eq!(p.max_abs(), 0.0);
    let w = Matrix::identity(20);
    assert!(solve_lyapunov(&sys.a, &w).is_ok());
}
