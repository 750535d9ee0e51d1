mod common;

use cablemor::analysis::output_error;
use cablemor::balance::*;
use cablemor::linalg::{Lu, Matrix};
use cablemor::model::*;
use cablemor::rom::*;
use cablemor::signals::InputSpec;
use common::*;
use rand::Rng;

fn reduced(
    p: PhysicalParams,
    n: usize,
    r: usize,
) -> (StateSpaceSystem, BalanceResult, ReducedSystem) {
    let sys = build_system(&p, n).unwrap();
    let bal = balance(&sys, r).unwrap();
    let red = reduce(&sys, &bal).unwrap();
    (sys, bal, red)
}

#[test]
fn low_order_nonlinearity_equals_projection() {
    let (sys, bal, red) = reduced(example1(), 100, 4);
    let mut rng = rng(30);
    for _ in 0..200 {
        let a: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let fast = rom_nonlinear(&red, &a).unwrap();
        let full = sys.eval_nonlinearity(&bal.tr.mul_vec(&a)).unwrap();
        let oracle = bal.sr.mul_vec(&full);
        let scale = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (x, y) in fast.iter().zip(&oracle) {
            assert!((x - y).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
        }
    }
}

#[test]
fn linear_reduced_rhs_is_matrix_product() {
    let (_, _, red) = reduced(linear(example1()), 30, 4);
    assert!(rom_nonlinear(&red, &[1.0, -2.0, 0.5, 3.0])
        .unwrap()
        .iter()
        .all(|v| *v == 0.0));
    let a = [0.3, -0.1, 0.7, 0.2];
    let got = rom_rhs(&red, &a, 0.4).unwrap();
    let ar = red.ar.mul_vec(&a);
    for i in 0..4 {
        assert!((got[i] - (ar[i] + red.br[(i, 0)] * 0.4)).abs() <= 1e-15);
    }
}

/// A full-order similarity transform `x = T a` with a well-conditioned `T`.
fn similarity(sys: &StateSpaceSystem, seed: u64) -> (Matrix, ReducedSystem) {
    let dim = sys.dim();
    let mut g = rng(seed);
    let t = random_matrix(&mut g, dim, dim).add(&Matrix::identity(dim).scale(4.0));
    let lu = Lu::factor(&t).unwrap();
    let mut t_inv = Matrix::zeros(dim, dim);
    for j in 0..dim {
        let col = lu.solve(&Matrix::identity(dim).column(j));
        for i in 0..dim {
            t_inv[(i, j)] = col[i];
        }
    }
    let red = project(sys, &t, &t_inv).unwrap();
    (t, red)
}

#[test]
fn similarity_rom_vector_field_is_exact() {
    let sys = build_system(&example1(), 20).unwrap();
    let (t, red) = similarity(&sys, 31);
    let mut g = rng(32);
    for _ in 0..50 {
        let a: Vec<f64> = (0..40).map(|_| g.gen_range(-1.0..1.0)).collect();
        let u = g.gen_range(-1.0..1.0);
        let lifted = t.mul_vec(&rom_rhs(&red, &a, u).unwrap());
        let full = sys.fom_rhs(&t.mul_vec(&a), u).unwrap();
        let scale = full.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (x, y) in lifted.iter().zip(&full) {
            assert!((x - y).abs() <= 1e-12 * scale);
        }
    }
}

/// ROM outputs agree with the FOM up to a small multiple of the FOM's own
/// integration error (measured against a 1000x tighter reference run).
fn assert_within_integration_error(sys: &StateSpaceSystem, red: &ReducedSystem) {
    let rtol = 1e-6;
    let opts = SimulationOptions::with_tolerances(rtol, 1e-3 * rtol);
    let reference = SimulationOptions::with_tolerances(1e-3 * rtol, 1e-6 * rtol);
    for input in [InputSpec::input1(), InputSpec::input4()] {
        let fom = simulate_fom(sys, input, 0.0, 50.0, &opts).unwrap();
        let exact = simulate_fom(sys, input, 0.0, 50.0, &reference).unwrap();
        let rom = simulate_rom(red, input, 0.0, 50.0, &opts).unwrap();
        let integration = output_error(&exact.outputs, &fom.outputs).unwrap().rel_l2;
        let err = output_error(&fom.outputs, &rom.outputs).unwrap().rel_l2;
        assert!(
            err <= 5.0 * integration,
            "{:?}: {err:e} vs integration error {integration:e}",
            input.kind
        );
    }
}

#[test]
fn similarity_rom_tracks_fom() {
    let sys = build_system(&example1(), 20).unwrap();
    let (_, red) = similarity(&sys, 33);
    assert_within_integration_error(&sys, &red);
}

#[test]
fn minimal_order_linear_rom_tracks_fom() {
    let sys = build_system(&linear(example1()), 20).unwrap();
    let (p, q) = gramians(&sys).unwrap();
    let r = numerical_rank(&hankel_values(&p, &q).unwrap());
    let red = reduce(&sys, &square_root_transform(&p, &q, r).unwrap()).unwrap();
    assert_within_integration_error(&sys, &red);
}

#[test]
fn linear_fom_scales_with_input() {
    let sys = build_system(&linear(example1()), 40).unwrap();
    let opts = SimulationOptions::with_tolerances(1e-8, 1e-12);
    let y1 = simulate_fom(&sys, InputSpec::input1(), 0.0, 30.0, &opts).unwrap();
    let y2 = simulate_fom(&sys, InputSpec::input1().with_scale(2.0), 0.0, 30.0, &opts).unwrap();
    let err = output_error(&y1.outputs.scaled(2.0), &y2.outputs).unwrap();
    assert!(err.rel_l2 <= 1e-6, "{:e}", err.rel_l2);
}

#[test]
fn output_grid_has_requested_samples() {
    let (sys, _, red) = reduced(example1(), 20, 4);
    let opts = SimulationOptions {
        samples: 137,
        ..SimulationOptions::default()
    };
    let fom = simulate_fom(&sys, InputSpec::input1(), 0.0, 10.0, &opts).unwrap();
    let rom = simulate_rom(&red, InputSpec::input1(), 0.0, 10.0, &opts).unwrap();
    assert_eq!(fom.outputs.len(), 137);
    assert_eq!(fom.outputs.times, rom.outputs.times);
    assert_eq!(*fom.outputs.times.last().unwrap(), 10.0);
}
