//! Repeated position measurements of a free mass: a first measurement with
//! readout `a`, free evolution for `τ`, a second identical measurement, and
//! the mean-value prediction of the second readout from the first.

pub mod config;
pub mod harness;
pub mod report;

pub use config::{ExperimentConfig, ModelSpec, PriorSpec, ShapeSpec, TauSpec};
pub use harness::{
    caves_bound_check, predict, predictive_uncertainty_analytic, predictive_uncertainty_monte_carlo, run, sweep,
    CavesReport, ReadoutAnalysis, SweepTimes, RNG_ALGORITHM,
};
pub use report::{write_sweep_csv, ExperimentReport, MonteCarloSummary, SweepRow, TrialRecord};
