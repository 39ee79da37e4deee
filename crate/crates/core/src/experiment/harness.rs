use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use super::report::{ExperimentReport, MonteCarloSummary, SweepRow, TrialRecord};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridState};
use crate::models::{ContractiveGLModel, MeasurementModel};
use crate::tcs::{sql_bound, Moments, TcsParams};

/// Generator used for Monte Carlo trials; each trial gets its own stream.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng(rand_chacha 0.9) seed_from_u64(seed), stream = trial index";

/// Mean-value prediction `h(a) = ⟨x̂⟩ + ⟨p̂⟩τ/m` for the posterior.
pub fn predict(posterior: &GridState, tau: f64) -> f64 {
    let (x, p) = posterior.mean_position_momentum();
    x + p * tau / posterior.mass()
}

#[derive(Debug, Clone, Copy)]
struct ReadoutEntry {
    weight: f64,
    moments: Moments,
}

/// First-measurement data that does not depend on the waiting time: the
/// weighted readouts and the moments of their posteriors.
#[derive(Debug, Clone)]
pub struct ReadoutAnalysis {
    model: String,
    mass: f64,
    hbar: f64,
    precision_sq: f64,
    entries: Vec<ReadoutEntry>,
    excluded: usize,
}

impl ReadoutAnalysis {
    /// `readout_bins` = 0 integrates over every grid node, otherwise over
    /// every `n / readout_bins`-th node.
    pub fn new(model: &MeasurementModel, prior: &GridState, readout_bins: usize) -> Result<Self> {
        let kernel = model.noise_kernel()?;
        // the implemented kernels are translation invariant, so ε(x) is constant
        let precision_sq = kernel.precision_sq_at(0.0);
        let density = model.probability(prior)?;
        let grid = *prior.grid();
        let stride = match readout_bins {
            0 => 1,
            b if b.is_power_of_two() && b <= grid.len() => grid.len() / b,
            b => return Err(Error::Config(format!("readout_bins = {b} is not a power of two <= {}", grid.len()))),
        };
        let significant = density.significant_readouts();
        let excluded = grid.len() - significant.len();
        let shape = model.translated_posterior_shape(&grid).transpose()?.map(|s| s.quadrature_moments());

        let mut entries = Vec::new();
        for (i, w) in significant.into_iter().filter(|(i, _)| i % stride == 0) {
            let a = grid.x(i);
            let moments = match shape {
                Some(m) => Moments { mean_x: m.mean_x + a, ..m },
                None => match model.posterior(prior, a) {
                    Ok(post) => post.quadrature_moments(),
                    Err(Error::ZeroProbabilityReadout(_)) => continue,
                    Err(e) => return Err(e),
                },
            };
            entries.push(ReadoutEntry { weight: w * stride as f64, moments });
        }
        let total: f64 = entries.iter().map(|e| e.weight).sum();
        if !(total > 0.0) {
            return Err(Error::ZeroProbabilityReadout(f64::NAN));
        }
        entries.iter_mut().for_each(|e| e.weight /= total);
        Ok(Self {
            model: model.name().to_string(),
            mass: prior.mass(),
            hbar: prior.hbar(),
            precision_sq,
            entries,
            excluded,
        })
    }

    pub fn readouts_used(&self) -> usize {
        self.entries.len()
    }

    fn average(&self, f: impl Fn(&Moments) -> f64) -> f64 {
        self.entries.iter().map(|e| e.weight * f(&e.moments)).sum()
    }

    /// Analytic report for waiting time `tau`.
    pub fn report(&self, tau: f64) -> Result<ExperimentReport> {
        let bound = sql_bound(self.mass, tau, self.hbar)?;
        let posterior_variance_avg = self.average(|m| m.free_position_variance(tau, self.mass));
        let predictive_variance = self.precision_sq + posterior_variance_avg;
        Ok(ExperimentReport {
            model: self.model.clone(),
            mass: self.mass,
            hbar: self.hbar,
            tau,
            predictive_variance,
            sql_bound: bound,
            sql_ratio: predictive_variance / bound,
            precision_avg: self.precision_sq,
            posterior_variance_avg,
            readouts_used: self.entries.len(),
            excluded_readouts: self.excluded,
            prior_independence_residual: None,
            monte_carlo: None,
            trials: Vec::new(),
        })
    }

    /// Sufficient condition for the SQL and the commutator chain.
    pub fn caves(&self, tau: f64) -> Result<CavesReport> {
        let bound = sql_bound(self.mass, tau, self.hbar)?;
        let posterior_variance_avg = self.average(|m| m.var_x);
        let half = 0.5 * bound;
        let min_product_margin = self
            .entries
            .iter()
            .map(|e| (e.moments.var_x * e.moments.free_position_variance(tau, self.mass)).sqrt() - half)
            .fold(f64::INFINITY, f64::min);
        let predictive_variance = self.precision_sq + self.average(|m| m.free_position_variance(tau, self.mass));
        Ok(CavesReport {
            posterior_variance_avg,
            precision_avg: self.precision_sq,
            condition_holds: posterior_variance_avg <= self.precision_sq * (1.0 + 1e-12),
            min_product_margin,
            chain_holds: min_product_margin >= -1e-9 * half,
            sql_holds: predictive_variance >= bound * (1.0 - 1e-6),
        })
    }
}

/// Both sides of the SQL-sufficient condition `[Δx(ψ_a)²] ≤ [ε(Û_τψ_a)²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavesReport {
    /// `[Δx(ψ_a)²]` right after the first measurement.
    pub posterior_variance_avg: f64,
    /// `[ε(Û_τψ_a)²]`.
    pub precision_avg: f64,
    pub condition_holds: bool,
    /// `min_a Δx(0)(ψ_a)·Δx(τ)(ψ_a) − ħτ/2m`.
    pub min_product_margin: f64,
    pub chain_holds: bool,
    /// `Δ(τ, ψ)² ≥ ħτ/m` within 1e-6 relative.
    pub sql_holds: bool,
}

fn reference_prior(grid: Grid, mass: f64, hbar: f64) -> Result<GridState> {
    let one = num_complex::Complex64::new(1.0, 0.0);
    let zero = num_complex::Complex64::new(0.0, 0.0);
    GridState::discretize(&TcsParams::new(one, zero, 0.0, 0.0, 1.0, mass, hbar)?, grid)
}

/// `Δ(τ, ψ)²` and its decomposition by quadrature over first readouts.
/// For prior-independent models the result is also compared with a coherent
/// reference prior.
pub fn predictive_uncertainty_analytic(
    model: &MeasurementModel,
    prior: &GridState,
    tau: f64,
    readout_bins: usize,
) -> Result<ExperimentReport> {
    let mut report = ReadoutAnalysis::new(model, prior, readout_bins)?.report(tau)?;
    if model.is_prior_independent() {
        let reference = reference_prior(*prior.grid(), prior.mass(), prior.hbar())?;
        let other = ReadoutAnalysis::new(model, &reference, readout_bins)?.report(tau)?;
        report.prior_independence_residual = Some((other.predictive_variance - report.predictive_variance).abs());
    }
    Ok(report)
}

pub fn caves_bound_check(model: &MeasurementModel, prior: &GridState, tau: f64) -> Result<CavesReport> {
    ReadoutAnalysis::new(model, prior, 0)?.caves(tau)
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Analytic report plus `config.trials` simulated measurement pairs.
pub fn predictive_uncertainty_monte_carlo(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.trials < 100 {
        return Err(Error::Config(format!("Monte Carlo needs at least 100 trials, got {}", config.trials)));
    }
    let model = config.build_model()?;
    let prior = config.build_prior()?;
    let tau = config.resolved_tau()?;
    let mut report = predictive_uncertainty_analytic(&model, &prior, tau, config.readout_bins)?;

    let records: Vec<TrialRecord> = match &model {
        MeasurementModel::Contractive(m) => {
            // posteriors are translates of one shape, so evolve it once
            let shape = m.posterior(prior.grid(), 0.0)?;
            let h0 = predict(&shape, tau);
            let evolved = shape.free_evolve(tau)?.sampler();
            let prior_sampler = prior.sampler();
            (0..config.trials)
                .map(|trial| {
                    let mut rng = trial_rng(config.seed, trial);
                    let a = prior_sampler.sample(rng.random());
                    let prediction = a + h0;
                    let second = a + evolved.sample_node(rng.random());
                    TrialRecord { trial, first_readout: a, prediction, second_readout: second }
                })
                .collect()
        }
        MeasurementModel::VonNeumann(vn) => {
            let first = vn.probability(&prior)?.sampler();
            let probe = vn.probe().sampler();
            (0..config.trials)
                .map(|trial| {
                    let mut rng = trial_rng(config.seed, trial);
                    let a = first.sample_node(rng.random());
                    let post = vn.posterior(&prior, a)?;
                    let prediction = predict(&post, tau);
                    let evolved = post.free_evolve(tau)?;
                    let second = evolved.sampler().sample_node(rng.random()) + probe.sample_node(rng.random());
                    Ok(TrialRecord { trial, first_readout: a, prediction, second_readout: second })
                })
                .collect::<Result<_>>()?
        }
        MeasurementModel::GordonLouisell(gl) => {
            let first = gl.probability(&prior)?.sampler();
            (0..config.trials)
                .map(|trial| {
                    let mut rng = trial_rng(config.seed, trial);
                    let a = first.sample_node(rng.random());
                    let post = gl.posterior(prior.grid(), a)?;
                    let prediction = predict(&post, tau);
                    let evolved = post.free_evolve(tau)?;
                    let second = gl.probability(&evolved)?.sampler().sample_node(rng.random());
                    Ok(TrialRecord { trial, first_readout: a, prediction, second_readout: second })
                })
                .collect::<Result<_>>()?
        }
    };

    let n = records.len() as f64;
    let mean = records.iter().map(TrialRecord::squared_error).sum::<f64>() / n;
    let var = records.iter().map(|r| (r.squared_error() - mean).powi(2)).sum::<f64>() / (n - 1.0);
    report.monte_carlo = Some(MonteCarloSummary {
        trials: config.trials,
        seed: config.seed,
        rng: RNG_ALGORITHM,
        predictive_variance: mean,
        stderr: (var / n).sqrt(),
        sql_ratio: mean / report.sql_bound,
    });
    report.trials = records;
    Ok(report)
}

/// Runs a config: analytic only when `trials` is 0.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.trials > 0 {
        return predictive_uncertainty_monte_carlo(config);
    }
    let model = config.build_model()?;
    let prior = config.build_prior()?;
    predictive_uncertainty_analytic(&model, &prior, config.resolved_tau()?, config.readout_bins)
}

/// Waiting times used by [`sweep`].
#[derive(Debug, Clone, PartialEq)]
pub enum SweepTimes {
    ContractionTime,
    Fixed(Vec<f64>),
}

/// Grid holding a unit-width prior and posteriors of `shape` centred
/// anywhere the prior puts readouts.
fn sweep_grid(shape: &TcsParams) -> Result<Grid> {
    let m = shape.moments();
    let half = 14.0 * m.var_x.sqrt() + 8.0;
    let k_needed = 14.0 * m.var_p.sqrt() / shape.hbar();
    let dx = (0.9 * std::f64::consts::PI / k_needed).min(0.05);
    let n = ((2.0 * half / dx).ceil() as usize).next_power_of_two().max(16);
    Grid::new(-half, half, n)
}

/// Analytic `sql_ratio` of the contractive model along the canonical family
/// `ν = i·s`, for each `ξ` and waiting time, with a coherent prior.
pub fn sweep(xis: &[f64], times: &SweepTimes, omega: f64, mass: f64, hbar: f64) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &xi in xis {
        let shape = TcsParams::from_xi(xi, omega, mass, hbar)?;
        let model: MeasurementModel = ContractiveGLModel::from_params(shape)?.into();
        let grid = sweep_grid(&shape)?;
        let analysis = ReadoutAnalysis::new(&model, &reference_prior(grid, mass, hbar)?, 0)?;
        let taus = match times {
            SweepTimes::ContractionTime => vec![shape.contraction_time()?],
            SweepTimes::Fixed(t) => t.clone(),
        };
        for tau in taus {
            let r = analysis.report(tau)?;
            rows.push(SweepRow {
                xi,
                tau,
                predictive_variance: r.predictive_variance,
                sql_bound: r.sql_bound,
                sql_ratio: r.sql_ratio,
            });
        }
    }
    Ok(rows)
}
