mod common;

use cablemor::analysis::*;
use cablemor::model::*;
use cablemor::ode::OdeOptions;
use common::*;

#[test]
fn undamped_linear_spectrum_is_on_the_axis() {
    let p = PhysicalParams {
        gamma: 0.0,
        alpha: 0.0,
        alpha0: 0.0,
        alphal: 0.0,
        k3: 0.0,
        ..example1()
    };
    let sys = build_system(&p, 20).unwrap();
    assert!(stability_margin(&sys.a).unwrap() >= -1e-8);
}

#[test]
fn example1_energy_decays() {
    let p = example1();
    let sys = build_system(&p, 60).unwrap();
    let forms = quadratic_forms(&p, 60).unwrap();
    let x0 =
        sample_initial_data(&p, 60, |x: f64| x.exp() * (1.0 - x).sin(), |x: f64| x.cos()).unwrap();
    let rep = energy_decay(
        &sys,
        &forms,
        &x0,
        20.0,
        &OdeOptions::with_tolerances(1e-6, 1e-9),
        400,
    )
    .unwrap();
    assert!(rep.is_nonincreasing(1e-6 * rep.total[0]));
    assert!(rep.fitted_rate < 0.0 && !rep.degenerate);
    for k in 0..rep.times.len() {
        let sum = rep.kinetic[k] + rep.potential[k];
        assert!((rep.total[k] - sum).abs() <= 1e-12 * rep.total[k].abs());
    }
}
