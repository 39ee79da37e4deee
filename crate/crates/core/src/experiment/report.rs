use std::fmt::Write as _;
use std::io::Write;

/// One simulated pair of measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub first_readout: f64,
    pub prediction: f64,
    pub second_readout: f64,
}

impl TrialRecord {
    pub fn squared_error(&self) -> f64 {
        (self.second_readout - self.prediction).powi(2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub trials: u64,
    pub seed: u64,
    pub rng: &'static str,
    /// Sample mean of the squared prediction error.
    pub predictive_variance: f64,
    pub stderr: f64,
    pub sql_ratio: f64,
}

/// Results of a repeated-measurement experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub model: String,
    pub mass: f64,
    pub hbar: f64,
    pub tau: f64,
    /// `Δ(τ, ψ)²` by quadrature over readouts.
    pub predictive_variance: f64,
    /// `ħτ/m`.
    pub sql_bound: f64,
    pub sql_ratio: f64,
    /// `[ε(Û_τψ_a)²]`.
    pub precision_avg: f64,
    /// `[Δx(τ)(ψ_a)²]`.
    pub posterior_variance_avg: f64,
    pub readouts_used: usize,
    pub excluded_readouts: usize,
    /// `|Δ² − Δ²_ref|` against a coherent reference prior, for models whose
    /// posterior ignores the prior.
    pub prior_independence_residual: Option<f64>,
    pub monte_carlo: Option<MonteCarloSummary>,
    pub trials: Vec<TrialRecord>,
}

/// Limit on [`ExperimentReport::prior_independence_residual`].
pub const PRIOR_INDEPENDENCE_TOLERANCE: f64 = 1e-9;

impl ExperimentReport {
    pub fn monte_carlo_stderr(&self) -> Option<f64> {
        self.monte_carlo.as_ref().map(|m| m.stderr)
    }

    /// `Δ² − ([ε²] + [Δx(τ)²])`.
    pub fn decomposition_residual(&self) -> f64 {
        self.predictive_variance - (self.precision_avg + self.posterior_variance_avg)
    }

    pub fn prior_independent(&self) -> Option<bool> {
        self.prior_independence_residual.map(|r| r <= PRIOR_INDEPENDENCE_TOLERANCE)
    }

    /// `key = value` lines, numbers with 12 significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        let num = |x: f64| format!("{x:.11e}");
        line("model", self.model.clone());
        line("mass", num(self.mass));
        line("hbar", num(self.hbar));
        line("tau", num(self.tau));
        line("predictive_variance", num(self.predictive_variance));
        line("sql_bound", num(self.sql_bound));
        line("sql_ratio", num(self.sql_ratio));
        line("precision_avg", num(self.precision_avg));
        line("posterior_variance_avg", num(self.posterior_variance_avg));
        line("decomposition_residual", num(self.decomposition_residual()));
        line("readouts_used", self.readouts_used.to_string());
        line("excluded_readouts", self.excluded_readouts.to_string());
        if let Some(r) = self.prior_independence_residual {
            line("prior_independence_residual", num(r));
            line("prior_independent", (r <= PRIOR_INDEPENDENCE_TOLERANCE).to_string());
        }
        match &self.monte_carlo {
            Some(mc) => {
                line("monte_carlo_trials", mc.trials.to_string());
                line("monte_carlo_seed", mc.seed.to_string());
                line("monte_carlo_rng", mc.rng.to_string());
                line("monte_carlo_predictive_variance", num(mc.predictive_variance));
                line("monte_carlo_stderr", num(mc.stderr));
                line("monte_carlo_sql_ratio", num(mc.sql_ratio));
            }
            None => line("monte_carlo_trials", "0".into()),
        }
        s
    }

    /// CSV: `trial,first_readout,prediction,second_readout,squared_error`.
    pub fn write_trial_log<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "trial,first_readout,prediction,second_readout,squared_error")?;
        for t in &self.trials {
            writeln!(
                out,
                "{},{:.11e},{:.11e},{:.11e},{:.11e}",
                t.trial,
                t.first_readout,
                t.prediction,
                t.second_readout,
                t.squared_error()
            )?;
        }
        Ok(())
    }
}

/// One row of a `(ξ, τ)` sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub xi: f64,
    pub tau: f64,
    pub predictive_variance: f64,
    pub sql_bound: f64,
    pub sql_ratio: f64,
}

/// CSV: `xi,tau,predictive_variance,sql_bound,sql_ratio`.
pub fn write_sweep_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(out, "xi,tau,predictive_variance,sql_bound,sql_ratio")?;
    for r in rows {
        writeln!(
            out,
            "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
            r.xi, r.tau, r.predictive_variance, r.sql_bound, r.sql_ratio
        )?;
    }
    Ok(())
}
