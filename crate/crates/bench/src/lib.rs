//! Fixtures shared by the criterion benchmarks.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qmeas::{ContractiveGLModel, FiniteOperationMeasure, Grid, GridState, MeasurementModel, TcsParams, VonNeumannModel};

/// Contractive state with `μ = √2, ν = i` on the standard grid.
pub fn breach_state() -> GridState {
    let shape = TcsParams::from_xi(std::f64::consts::SQRT_2, 1.0, 1.0, 1.0).expect("valid shape");
    GridState::discretize(&shape, Grid::standard()).expect("fits the standard grid")
}

pub fn breach_model() -> MeasurementModel {
    let shape = TcsParams::from_xi(std::f64::consts::SQRT_2, 1.0, 1.0, 1.0).expect("valid shape");
    ContractiveGLModel::from_params(shape).expect("contractive").into()
}

/// Coherent prior and Gaussian-probe von Neumann model on `[−20, 20]`.
pub fn von_neumann_fixture(n: usize, delta_q: f64) -> (GridState, MeasurementModel) {
    let grid = Grid::new(-20.0, 20.0, n).expect("valid grid");
    let prior = GridState::discretize(&TcsParams::coherent(), grid).expect("fits");
    let model = VonNeumannModel::gaussian(grid, delta_q, 0.0, 1.0, 1.0).expect("valid probe").into();
    (prior, model)
}

/// Seeded random operation measure with rank-2 Kraus families.
pub fn random_measure(dim: usize, outcomes: usize, seed: u64) -> FiniteOperationMeasure {
    FiniteOperationMeasure::random(dim, outcomes, 2, &mut ChaCha8Rng::seed_from_u64(seed))
}
