//! The grid propagator is an independent oracle for the closed-form
//! contractive-state formulas.

use num_complex::Complex64;
use proptest::prelude::*;
use qmeas::{Grid, GridState, TcsParams};

fn state(xi: f64, omega: f64, x0: f64, p0: f64) -> TcsParams {
    TcsParams::from_xi(xi, omega, 1.0, 1.0).unwrap().with_center(x0, p0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn discretized_moments_match(xi in -2.0..2.0f64, omega in 0.6..1.6f64, x0 in -2.0..2.0f64, p0 in -1.0..1.0f64) {
        let params = state(xi, omega, x0, p0);
        let grid = Grid::auto_for(&params, 0.0);
        let m = GridState::discretize(&params, grid).unwrap().quadrature_moments();
        let c = params.moments();
        prop_assert!((m.mean_x - c.mean_x).abs() < 1e-9);
        prop_assert!((m.mean_p - c.mean_p).abs() < 1e-9);
        prop_assert!((m.var_x - c.var_x).abs() < 1e-9 * c.var_x.max(1.0));
        prop_assert!((m.var_p - c.var_p).abs() < 1e-9 * c.var_p.max(1.0));
        prop_assert!((m.correlation - c.correlation).abs() < 1e-9 * c.var_x.max(1.0));
    }

    #[test]
    fn evolved_variance_follows_quadratic(xi in 0.1..3.0f64, frac in 0.0..2.0f64) {
        let params = state(xi, 1.0, 0.0, 0.0);
        let t = frac * params.contraction_time().unwrap();
        let grid = Grid::auto_for(&params, t);
        let evolved = GridState::discretize(&params, grid).unwrap().free_evolve(t).unwrap();
        let (_, var) = evolved.position_stats();
        let expected = params.position_variance_at(t);
        prop_assert!((var - expected).abs() < 1e-8 * expected, "t = {}: {} vs {}", t, var, expected);
    }
}

#[test]
fn minimum_width_is_reached_at_contraction_time() {
    for xi in [0.5, 1.0, std::f64::consts::SQRT_2, 5.0] {
        let params = state(xi, 1.0, 0.0, 0.0);
        let tc = params.contraction_time().unwrap();
        let grid = Grid::auto_for(&params, 2.0 * tc);
        let psi = GridState::discretize(&params, grid).unwrap();
        let var = |t: f64| psi.free_evolve(t).unwrap().position_stats().1;
        let at = var(tc);
        assert!((at.sqrt() - params.min_position_uncertainty().unwrap()).abs() < 1e-9);
        assert!(var(0.9 * tc) > at && var(1.1 * tc) > at);
    }
}

#[test]
fn evolved_state_is_the_closed_form_state() {
    // free evolution keeps a twisted coherent state Gaussian: compare the whole
    // wavefunction with one rebuilt from the evolved moments
    let params = TcsParams::new(Complex64::new(2f64.sqrt(), 0.0), Complex64::new(0.0, 1.0), 0.5, 0.3, 1.0, 1.0, 1.0).unwrap();
    let grid = Grid::standard();
    let t = 0.4;
    let evolved = GridState::discretize(&params, grid).unwrap().free_evolve(t).unwrap();
    let m = evolved.quadrature_moments();
    let c = params.moments();
    assert!((m.mean_x - (c.mean_x + c.mean_p * t)).abs() < 1e-10);
    assert!((m.var_x - c.free_position_variance(t, 1.0)).abs() < 1e-10);
    assert!((m.var_p - c.var_p).abs() < 1e-10);
    assert!((m.correlation - (c.correlation + 2.0 * c.var_p * t)).abs() < 1e-10);
}
