//! Monte Carlo estimates against the analytic quadrature.

use qmeas::experiment::{self, ExperimentConfig, ExperimentReport};

fn run(text: &str) -> ExperimentReport {
    experiment::run(&ExperimentConfig::parse(text, None).unwrap()).unwrap()
}

fn von_neumann(trials: u64, seed: u64) -> String {
    format!(
        "[system]\ntau = 1\n[model]\nkind = von_neumann\ndelta_q = 0.5\n\
         [grid]\nx_min = -20\nx_max = 20\nn = 1024\n[run]\ntrials = {trials}\nseed = {seed}\n"
    )
}

fn z_score(r: &ExperimentReport) -> f64 {
    let mc = r.monte_carlo.as_ref().unwrap();
    (mc.predictive_variance - r.predictive_variance).abs() / mc.stderr
}

#[test]
fn von_neumann_monte_carlo_agrees_with_quadrature() {
    let r = run(&von_neumann(3000, 17));
    assert!(z_score(&r) < 3.0, "z = {}", z_score(&r));
    assert!(r.decomposition_residual().abs() < 1e-6);
    assert!(r.sql_ratio >= 1.0);
    assert_eq!(r.trials.len(), 3000);
}

#[test]
fn breach_monte_carlo_agrees_with_quadrature() {
    let text = "[system]\ntau = contraction\n[model]\nkind = contractive\nmu_re = 1.4142135623730951\nnu_im = 1\n\
                [run]\ntrials = 20000\nseed = 5\n";
    let r = run(text);
    assert!((r.predictive_variance - 1.0 / 6.0).abs() < 1e-9);
    assert!(z_score(&r) < 3.0);
    // the mean-value prediction is the first readout itself
    assert!(r.trials.iter().all(|t| (t.prediction - t.first_readout).abs() < 1e-9));
}

#[test]
fn standard_error_scales_as_inverse_root_trials() {
    let text = |trials: u64| {
        format!("[system]\ntau = 0.5\n[model]\nkind = contractive\nxi = 0.8\n[run]\ntrials = {trials}\nseed = 11\n")
    };
    let small = run(&text(2000)).monte_carlo.unwrap().stderr;
    let large = run(&text(20000)).monte_carlo.unwrap().stderr;
    let ratio = small / large / 10f64.sqrt();
    assert!((1.0 / 1.5..1.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn seeds_change_trials_but_not_the_analytic_part() {
    let a = run(&von_neumann(200, 1));
    let b = run(&von_neumann(200, 2));
    assert_ne!(a.trials, b.trials);
    assert_eq!(a.predictive_variance, b.predictive_variance);
    let again = run(&von_neumann(200, 1));
    assert_eq!(a.to_text(), again.to_text());
}
