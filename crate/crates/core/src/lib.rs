//! Numerical toolkit for repeated position measurements of a free mass.
//!
//! The crate is organised bottom-up:
//!
//! * [`tcs`]: closed-form twisted coherent (contractive) states.
//! * [`grid`]: uniform-grid wavefunctions with spectral free evolution,
//!   used as an independent oracle for the closed forms.
//! * [`models`]: continuous position-measurement models: von Neumann linear
//!   coupling and Gordon–Louisell measure-and-prepare families.
//! * [`opmeasure`]: finite-dimensional operation measures (Kraus form),
//!   complete-positivity certification and unitary dilation.
//! * [`experiment`]: the repeated-measurement harness: predictive
//!   uncertainty, standard-quantum-limit ratios, config and reports.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod grid;
pub mod models;
pub mod opmeasure;
pub mod tcs;

pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, ExperimentReport};
pub use grid::{Grid, GridState, PositionSampler};
pub use models::{
    ContractiveGLModel, GordonLouisellModel, MeasurementModel, NoiseKernel, ReadoutDensity,
    VonNeumannModel, Wavefunction,
};
pub use num_complex::Complex64;
pub use opmeasure::{DensityOperator, EffectMeasure, FiniteOperationMeasure, Realization};
pub use tcs::{sql_bound, Moments, TcsParams};
