//! Continuous position-measurement models of a free mass.
//!
//! Every model here is *compatible* with position: its effects are
//! multiplication operators in the position representation, so the readout
//! statistics are governed by a noise kernel `G(a, x)` with
//! `P(a|ψ) = ∫dx G(a,x)|ψ(x)|²`. Readouts live on the nodes of the state's
//! grid and integrals over readouts use the trapezoid rule.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridState, PositionSampler};
use crate::tcs::TcsParams;

/// Readouts whose probability density falls below this fraction of the
/// maximum are excluded from conditional averages.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Tolerance on `∫da |Φ_a⟩⟨Φ_a| = 1` for explicit effect families.
pub const COMPLETENESS_TOLERANCE: f64 = 1e-6;

/// Tolerance used when checking that a readout is unbiased.
pub const UNBIASED_TOLERANCE: f64 = 1e-7;

/// Anything that can be evaluated as a position-space amplitude.
pub trait Wavefunction {
    fn amplitude(&self, x: f64) -> Complex64;
}

impl Wavefunction for TcsParams {
    fn amplitude(&self, x: f64) -> Complex64 {
        self.wavefunction_at(x)
    }
}

impl Wavefunction for GridState {
    fn amplitude(&self, x: f64) -> Complex64 {
        self.amplitude_at(x)
    }
}

impl<W: Wavefunction + ?Sized> Wavefunction for &W {
    fn amplitude(&self, x: f64) -> Complex64 {
        (**self).amplitude(x)
    }
}

/// Object–probe wavefunction `Ψ(x, Q)` given in closed form.
pub trait TwoBodyState {
    fn amplitude(&self, x: f64, q: f64) -> Complex64;

    /// `∫dx |Ψ(x, Q̄)|²` by quadrature over the nodes of `object_grid`.
    fn readout_density(&self, q_bar: f64, object_grid: &Grid) -> f64 {
        object_grid.points().map(|x| self.amplitude(x, q_bar).norm_sqr()).sum::<f64>() * object_grid.dx()
    }

    /// Normalised conditional object state `Ψ(·, Q̄)/√P(Q̄)`.
    fn conditional_state(&self, q_bar: f64, object_grid: Grid, mass: f64, hbar: f64) -> Result<GridState> {
        if self.readout_density(q_bar, &object_grid) <= 1e-300 {
            return Err(Error::ZeroProbabilityReadout(q_bar));
        }
        GridState::from_fn(object_grid, mass, hbar, |x| self.amplitude(x, q_bar))
    }
}

/// Probability density over readouts sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutDensity {
    grid: Grid,
    values: Vec<f64>,
}

impl ReadoutDensity {
    pub fn new(grid: Grid, values: Vec<f64>) -> Self {
        assert_eq!(grid.len(), values.len(), "readout density must match its grid");
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn trapezoid(&self, f: impl Fn(f64) -> f64) -> f64 {
        let n = self.values.len();
        let dx = self.grid.dx();
        let inner: f64 = self.values.iter().enumerate().map(|(i, p)| p * f(self.grid.x(i))).sum();
        let ends = self.values[0] * f(self.grid.x(0)) + self.values[n - 1] * f(self.grid.x(n - 1));
        dx * (inner - 0.5 * ends)
    }

    pub fn integral(&self) -> f64 {
        self.trapezoid(|_| 1.0)
    }

    pub fn mean(&self) -> f64 {
        self.trapezoid(|a| a) / self.integral()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.trapezoid(|a| (a - m).powi(2)) / self.integral()
    }

    /// Nodes whose density clears [`PROBABILITY_FLOOR`] relative to the peak,
    /// with their trapezoid weights `P(a)·da`.
    pub fn significant_readouts(&self) -> Vec<(usize, f64)> {
        let peak = self.values.iter().copied().fold(0.0, f64::max);
        let n = self.values.len();
        let dx = self.grid.dx();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &p)| p >= PROBABILITY_FLOOR * peak && p > 0.0)
            .map(|(i, &p)| (i, if i == 0 || i == n - 1 { 0.5 * p * dx } else { p * dx }))
            .collect()
    }

    /// Number of nodes below the probability floor.
    pub fn excluded_count(&self) -> usize {
        self.values.len() - self.significant_readouts().len()
    }

    pub fn sampler(&self) -> PositionSampler {
        PositionSampler::new(&self.grid, &self.values)
    }
}

/// Readout noise kernel `G(a, x)` of a position-compatible model.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseKernel {
    /// `G(a, x) = δ(a − x)`: the readout is the exact position.
    ExactPosition,
    /// `G(a, x) = g(a − x)` with the profile `g` sampled on `grid`.
    Displacement { grid: Grid, profile: Vec<f64> },
}

impl NoiseKernel {
    pub fn is_exact(&self) -> bool {
        matches!(self, NoiseKernel::ExactPosition)
    }

    /// `G(a, x)` for the smooth kernels; `None` for the exact-position tag.
    pub fn density(&self, a: f64, x: f64) -> Option<f64> {
        match self {
            NoiseKernel::ExactPosition => None,
            NoiseKernel::Displacement { grid, profile } => Some(interp(grid, profile, a - x)),
        }
    }

    /// `∫da G(a, x)`.
    pub fn normalization_at(&self, _x: f64) -> f64 {
        match self {
            NoiseKernel::ExactPosition => 1.0,
            NoiseKernel::Displacement { grid, profile } => profile.iter().sum::<f64>() * grid.dx(),
        }
    }

    /// `ε(x)² = ∫da (a − x)² G(a, x)`.
    pub fn precision_sq_at(&self, _x: f64) -> f64 {
        match self {
            NoiseKernel::ExactPosition => 0.0,
            NoiseKernel::Displacement { grid, profile } => {
                profile.iter().enumerate().map(|(i, g)| g * grid.x(i).powi(2)).sum::<f64>() * grid.dx()
            }
        }
    }

    /// `∫da (a − x) G(a, x)`: the systematic readout offset.
    pub fn mean_offset(&self) -> f64 {
        match self {
            NoiseKernel::ExactPosition => 0.0,
            NoiseKernel::Displacement { grid, profile } => {
                profile.iter().enumerate().map(|(i, g)| g * grid.x(i)).sum::<f64>() * grid.dx()
            }
        }
    }

    /// Readout density `∫dx G(a, x)|ψ(x)|²` on the nodes of `psi`'s grid.
    pub fn readout_density(&self, psi: &GridState) -> Result<ReadoutDensity> {
        let grid = *psi.grid();
        let density = psi.density();
        let values = match self {
            NoiseKernel::ExactPosition => density,
            NoiseKernel::Displacement { grid: kgrid, profile } => {
                let n = grid.len();
                let dx = grid.dx();
                // g at displacements m·dx, m in −(n−1)..=(n−1)
                let g: Vec<f64> =
                    (0..2 * n - 1).map(|m| interp(kgrid, profile, (m as f64 - (n - 1) as f64) * dx)).collect();
                let mut out = vec![0.0; n];
                for (i, &w) in density.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let w = w * dx;
                    let row = &g[n - 1 - i..2 * n - 1 - i];
                    out.iter_mut().zip(row).for_each(|(o, gk)| *o += w * gk);
                }
                out
            }
        };
        let rd = ReadoutDensity::new(grid, values);
        let escaped = self.normalization_at(0.0) - rd.values.iter().sum::<f64>() * grid.dx();
        if escaped > 1e-9 {
            return Err(Error::GridTooNarrow(format!("readout probability {escaped:e} falls outside the readout window")));
        }
        Ok(rd)
    }

    /// `ε(ψ) = (∫dx ε(x)²|ψ(x)|²)^{1/2}`.
    pub fn precision(&self, psi: &GridState) -> f64 {
        let dx = psi.grid().dx();
        let grid = psi.grid();
        psi.density().iter().enumerate().map(|(i, w)| w * self.precision_sq_at(grid.x(i))).sum::<f64>().mul_add(dx, 0.0).sqrt()
    }
}

fn interp(grid: &Grid, values: &[f64], x: f64) -> f64 {
    let mut f = (x - grid.x_min()) / grid.dx();
    if (f - f.round()).abs() < 1e-9 {
        f = f.round();
    }
    if !(f >= 0.0) {
        return 0.0;
    }
    let i = f.floor() as usize;
    let n = values.len();
    if i >= n {
        return 0.0;
    }
    let w = f - i as f64;
    if i == n - 1 || w < 1e-12 {
        return values[i] * (1.0 - w);
    }
    values[i] * (1.0 - w) + values[i + 1] * w
}

/// Von Neumann's linear-coupling model: interaction `K x̂ P̂` acting for a
/// time `τ̃` with `K τ̃ = 1`, probe prepared in `Φ(Q)` and read out in `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct VonNeumannModel {
    probe: GridState,
    coupling_checked: bool,
}

impl VonNeumannModel {
    /// Wraps a prepared probe. `coupling_checked` records whether
    /// `⟨Q̂⟩ = ⟨P̂⟩ = 0` held to 1e-8.
    pub fn new(probe: GridState) -> Self {
        let (q, p) = probe.mean_position_momentum();
        let coupling_checked = q.abs() < 1e-8 && p.abs() < 1e-8;
        Self { probe, coupling_checked }
    }

    /// Real Gaussian probe with spread `delta_q`, centred at `offset`.
    pub fn gaussian(grid: Grid, delta_q: f64, offset: f64, mass: f64, hbar: f64) -> Result<Self> {
        Ok(Self::new(GridState::gaussian(grid, offset, delta_q, mass, hbar)?))
    }

    pub fn probe(&self) -> &GridState {
        &self.probe
    }

    pub fn coupling_checked(&self) -> bool {
        self.coupling_checked
    }

    /// Standard deviation `ΔQ` of the prepared probe.
    pub fn delta_q(&self) -> f64 {
        self.probe.position_stats().1.sqrt()
    }

    /// `Ψ(x, Q) = ψ(x) Φ(Q − x)` after the interaction.
    pub fn joint_state<'a, W: Wavefunction>(&'a self, psi: &'a W) -> VonNeumannJoint<'a, W> {
        VonNeumannJoint { psi, probe: &self.probe }
    }

    /// `P(Q̄) = ∫dx |ψ(x)|² |Φ(Q̄ − x)|²` on the nodes of `psi`'s grid.
    pub fn probability(&self, psi: &GridState) -> Result<ReadoutDensity> {
        self.noise_kernel().readout_density(psi)
    }

    /// `ψ(x|Q̄) = ψ(x) Φ(Q̄ − x)/√P(Q̄)`.
    pub fn posterior(&self, psi: &GridState, q_bar: f64) -> Result<GridState> {
        let grid = *psi.grid();
        let amps: Vec<Complex64> =
            psi.amplitudes().iter().enumerate().map(|(i, a)| a * self.probe.amplitude_at(q_bar - grid.x(i))).collect();
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.dx();
        if !(p > 1e-300) {
            return Err(Error::ZeroProbabilityReadout(q_bar));
        }
        GridState::from_amplitudes(grid, amps, psi.mass(), psi.hbar())
    }

    /// `G(Q̄, x) = |Φ(Q̄ − x)|²`.
    pub fn noise_kernel(&self) -> NoiseKernel {
        NoiseKernel::Displacement { grid: *self.probe.grid(), profile: self.probe.density() }
    }
}

/// Closed-form joint state of the von Neumann model.
pub struct VonNeumannJoint<'a, W> {
    psi: &'a W,
    probe: &'a GridState,
}

impl<W: Wavefunction> TwoBodyState for VonNeumannJoint<'_, W> {
    fn amplitude(&self, x: f64, q: f64) -> Complex64 {
        self.psi.amplitude(x) * self.probe.amplitude_at(q - x)
    }
}

/// A family of normalised states indexed by a real readout, built on demand
/// for a given grid.
pub type StateFamily = Arc<dyn Fn(&Grid, f64) -> Result<GridState> + Send + Sync>;

/// Effect vectors `Φ_a(x)` sampled on a grid. They are not normalised:
/// completeness `∫da |Φ_a⟩⟨Φ_a| = 1` forces `⟨Φ_a|Φ_a⟩ = 1/da` on a lattice.
pub type EffectVectors = Arc<dyn Fn(&Grid, f64) -> Vec<Complex64> + Send + Sync>;

/// Effects `F(da)` of a Gordon–Louisell measurement.
#[derive(Clone)]
pub enum EffectFamily {
    /// `|a⟩⟨a|`: position eigen-effects.
    ExactPosition,
    /// Rank-one effects `|Φ_a⟩⟨Φ_a|` from an explicit family.
    States(EffectVectors),
    /// Position-diagonal effects `∫dx G(a, x)|x⟩⟨x|`.
    Kernel(NoiseKernel),
}

impl fmt::Debug for EffectFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EffectFamily::ExactPosition => f.write_str("ExactPosition"),
            EffectFamily::States(_) => f.write_str("States(..)"),
            EffectFamily::Kernel(k) => f.debug_tuple("Kernel").field(k).finish(),
        }
    }
}

/// Measure-and-prepare measurement `{|Ψ_a⟩⟨Φ_a|}`: the posterior depends only
/// on the readout.
#[derive(Clone)]
pub struct GordonLouisellModel {
    posterior_family: StateFamily,
    effect: EffectFamily,
}

impl fmt::Debug for GordonLouisellModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GordonLouisellModel").field("effect", &self.effect).finish_non_exhaustive()
    }
}

impl GordonLouisellModel {
    pub fn new(posterior_family: StateFamily, effect: EffectFamily) -> Self {
        Self { posterior_family, effect }
    }

    pub fn effect(&self) -> &EffectFamily {
        &self.effect
    }

    /// `P(a|ψ) = |⟨Φ_a|ψ⟩|²` (or its kernel form) on the nodes of `psi`'s grid.
    pub fn probability(&self, psi: &GridState) -> Result<ReadoutDensity> {
        match &self.effect {
            EffectFamily::ExactPosition => NoiseKernel::ExactPosition.readout_density(psi),
            EffectFamily::Kernel(k) => k.readout_density(psi),
            EffectFamily::States(family) => {
                let grid = *psi.grid();
                let effects: Vec<Vec<Complex64>> = grid.points().map(|a| family(&grid, a)).collect();
                if let Some(bad) = effects.iter().find(|v| v.len() != grid.len()) {
                    return Err(Error::Domain(format!("effect vector has {} samples on a {}-node grid", bad.len(), grid.len())));
                }
                check_completeness(&effects, psi)?;
                let values = effects.iter().map(|phi| inner(phi, psi.amplitudes(), grid.dx()).norm_sqr()).collect();
                Ok(ReadoutDensity::new(grid, values))
            }
        }
    }

    pub fn posterior(&self, grid: &Grid, a: f64) -> Result<GridState> {
        (self.posterior_family)(grid, a)
    }

    pub fn noise_kernel(&self) -> Result<NoiseKernel> {
        match &self.effect {
            EffectFamily::ExactPosition => Ok(NoiseKernel::ExactPosition),
            EffectFamily::Kernel(k) => Ok(k.clone()),
            EffectFamily::States(_) => {
                Err(Error::IncompatibleModel("rank-one effect family is not diagonal in position".into()))
            }
        }
    }
}

fn inner(phi: &[Complex64], v: &[Complex64], dx: f64) -> Complex64 {
    phi.iter().zip(v).map(|(p, x)| p.conj() * x).sum::<Complex64>() * dx
}

/// Checks `Σ_a da |⟨Φ_a|v⟩|² = ⟨v|v⟩` on `psi` and on seeded random vectors.
fn check_completeness(effects: &[Vec<Complex64>], psi: &GridState) -> Result<()> {
    let grid = *psi.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut probes = vec![psi.clone()];
    for _ in 0..3 {
        let amps = (0..grid.len()).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        probes.push(GridState::from_amplitudes(grid, amps, psi.mass(), psi.hbar())?);
    }
    let dx = grid.dx();
    let worst = probes
        .iter()
        .map(|v| (effects.iter().map(|phi| inner(phi, v.amplitudes(), dx).norm_sqr()).sum::<f64>() * dx - 1.0).abs())
        .fold(0.0, f64::max);
    if worst > COMPLETENESS_TOLERANCE {
        return Err(Error::CompletenessViolation(worst));
    }
    Ok(())
}

/// Gordon–Louisell measurement `{|μ ν a ω⟩⟨a|}`: exact position readout that
/// leaves the mass in the contractive state centred on the readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractiveGLModel {
    shape: TcsParams,
}

impl ContractiveGLModel {
    pub fn new(mu: Complex64, nu: Complex64, omega: f64, mass: f64, hbar: f64) -> Result<Self> {
        Self::from_params(TcsParams::new(mu, nu, 0.0, 0.0, omega, mass, hbar)?)
    }

    /// Uses the shape of `params`; its centre is discarded.
    pub fn from_params(params: TcsParams) -> Result<Self> {
        if params.xi() <= 0.0 {
            return Err(Error::NotContractive(params.xi()));
        }
        Ok(Self { shape: params.with_center(0.0, 0.0) })
    }

    /// `|μ ν 0 ω⟩`.
    pub fn shape(&self) -> &TcsParams {
        &self.shape
    }

    /// `P(a|ψ) = |ψ(a)|²`.
    pub fn probability(&self, psi: &GridState) -> Result<ReadoutDensity> {
        NoiseKernel::ExactPosition.readout_density(psi)
    }

    /// `|μ ν a ω⟩` sampled on `grid`.
    pub fn posterior(&self, grid: &Grid, a: f64) -> Result<GridState> {
        let s = self.shape.with_center(a, 0.0);
        GridState::from_fn(*grid, s.mass(), s.hbar(), |x| s.wavefunction_at(x))
    }

    pub fn to_gordon_louisell(&self) -> GordonLouisellModel {
        let model = *self;
        GordonLouisellModel::new(Arc::new(move |g: &Grid, a| model.posterior(g, a)), EffectFamily::ExactPosition)
    }
}

/// Any of the implemented position-measurement models.
#[derive(Debug, Clone)]
pub enum MeasurementModel {
    VonNeumann(VonNeumannModel),
    GordonLouisell(GordonLouisellModel),
    Contractive(ContractiveGLModel),
}

/// Terms of the resolution decomposition, each averaged over `P(a|ψ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    /// `σ(ψ)² = [∫dx (a − x)²|ψ_a(x)|²]`.
    pub sigma_sq: f64,
    /// `[Δx(ψ_a)²]`.
    pub posterior_spread: f64,
    /// `[(a − ⟨ψ_a|x̂|ψ_a⟩)²]`.
    pub posterior_offset: f64,
    pub excluded_readouts: usize,
}

impl Resolution {
    pub fn sigma(&self) -> f64 {
        self.sigma_sq.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnbiasednessReport {
    /// `∫da a P(a|ψ) − ⟨ψ|x̂|ψ⟩` per test state.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub passed: bool,
}

impl From<VonNeumannModel> for MeasurementModel {
    fn from(m: VonNeumannModel) -> Self {
        MeasurementModel::VonNeumann(m)
    }
}

impl From<GordonLouisellModel> for MeasurementModel {
    fn from(m: GordonLouisellModel) -> Self {
        MeasurementModel::GordonLouisell(m)
    }
}

impl From<ContractiveGLModel> for MeasurementModel {
    fn from(m: ContractiveGLModel) -> Self {
        MeasurementModel::Contractive(m)
    }
}

impl MeasurementModel {
    pub fn name(&self) -> &'static str {
        match self {
            MeasurementModel::VonNeumann(_) => "von_neumann",
            MeasurementModel::GordonLouisell(_) => "gordon_louisell",
            MeasurementModel::Contractive(_) => "contractive",
        }
    }

    pub fn probability(&self, psi: &GridState) -> Result<ReadoutDensity> {
        match self {
            MeasurementModel::VonNeumann(m) => m.probability(psi),
            MeasurementModel::GordonLouisell(m) => m.probability(psi),
            MeasurementModel::Contractive(m) => m.probability(psi),
        }
    }

    pub fn posterior(&self, psi: &GridState, a: f64) -> Result<GridState> {
        match self {
            MeasurementModel::VonNeumann(m) => m.posterior(psi, a),
            MeasurementModel::GordonLouisell(m) => m.posterior(psi.grid(), a),
            MeasurementModel::Contractive(m) => m.posterior(psi.grid(), a),
        }
    }

    pub fn noise_kernel(&self) -> Result<NoiseKernel> {
        match self {
            MeasurementModel::VonNeumann(m) => Ok(m.noise_kernel()),
            MeasurementModel::GordonLouisell(m) => m.noise_kernel(),
            MeasurementModel::Contractive(_) => Ok(NoiseKernel::ExactPosition),
        }
    }

    /// Whether the posterior ignores the prior state.
    pub fn is_prior_independent(&self) -> bool {
        !matches!(self, MeasurementModel::VonNeumann(_))
    }

    /// For models whose posteriors are translates of one another, the
    /// posterior for readout 0 on `grid`.
    pub fn translated_posterior_shape(&self, grid: &Grid) -> Option<Result<GridState>> {
        match self {
            MeasurementModel::Contractive(m) => Some(m.posterior(grid, 0.0)),
            _ => None,
        }
    }

    /// `ε(ψ)`; zero for exact-position models.
    pub fn precision(&self, psi: &GridState) -> Result<f64> {
        Ok(self.noise_kernel()?.precision(psi))
    }

    /// Terms of `σ(ψ)² = [Δx(ψ_a)²] + [(a − ⟨x⟩_a)²]` by quadrature.
    pub fn resolution_terms(&self, psi: &GridState) -> Result<Resolution> {
        let density = self.probability(psi)?;
        let readouts = density.significant_readouts();
        let grid = *psi.grid();
        let (mut total, mut sigma_sq, mut spread, mut offset) = (0.0, 0.0, 0.0, 0.0);
        for &(i, w) in &readouts {
            let a = grid.x(i);
            let post = match self.posterior(psi, a) {
                Ok(p) => p,
                Err(Error::ZeroProbabilityReadout(_)) => continue,
                Err(e) => return Err(e),
            };
            let dx = grid.dx();
            let sq: f64 = post.density().iter().enumerate().map(|(j, d)| d * (a - grid.x(j)).powi(2)).sum::<f64>() * dx;
            let (mean, var) = post.position_stats();
            total += w;
            sigma_sq += w * sq;
            spread += w * var;
            offset += w * (a - mean).powi(2);
        }
        Ok(Resolution {
            sigma_sq: sigma_sq / total,
            posterior_spread: spread / total,
            posterior_offset: offset / total,
            excluded_readouts: density.excluded_count(),
        })
    }

    /// `σ(ψ)`.
    pub fn resolution(&self, psi: &GridState) -> Result<f64> {
        Ok(self.resolution_terms(psi)?.sigma())
    }

    /// Compares the readout mean with `⟨x̂⟩` for each test state.
    pub fn check_unbiasedness(&self, test_states: &[GridState]) -> Result<UnbiasednessReport> {
        let deviations = test_states
            .iter()
            .map(|psi| Ok(self.probability(psi)?.mean() - psi.position_stats().0))
            .collect::<Result<Vec<f64>>>()?;
        let max_deviation = deviations.iter().map(|d| d.abs()).fold(0.0, f64::max);
        Ok(UnbiasednessReport { passed: max_deviation <= UNBIASED_TOLERANCE, deviations, max_deviation })
    }
}

/// Object–probe state under the contractive coupling Hamiltonian
/// `(Kπ/3√3){2(x̂P̂ − Q̂p̂) + (x̂p̂ − Q̂P̂)}` at reduced time `Kt ∈ [0, 1]`,
/// starting from `ψ(x)Φ(Q)`.
pub struct InteractionState<'a, A, B> {
    psi: &'a A,
    probe: &'a B,
    coeff: [f64; 3],
}

impl<A, B> InteractionState<'_, A, B> {
    /// Coefficients `(2/√3)·(sin((1−Kt)π/3), sin(Ktπ/3), sin((1+Kt)π/3))`.
    pub fn coefficients(&self) -> [f64; 3] {
        self.coeff
    }
}

impl<A: Wavefunction, B: Wavefunction> TwoBodyState for InteractionState<'_, A, B> {
    fn amplitude(&self, x: f64, q: f64) -> Complex64 {
        let [c0, c1, c2] = self.coeff;
        self.psi.amplitude(c0 * x + c1 * q) * self.probe.amplitude(-c1 * x + c2 * q)
    }
}

pub fn contractive_interaction<'a, A: Wavefunction, B: Wavefunction>(
    psi: &'a A,
    probe: &'a B,
    kt: f64,
) -> Result<InteractionState<'a, A, B>> {
    if !(0.0..=1.0).contains(&kt) {
        return Err(Error::Domain(format!("reduced interaction time Kt must lie in [0, 1], got {kt}")));
    }
    let s = 2.0 / 3f64.sqrt();
    let coeff = [s * ((1.0 - kt) * PI / 3.0).sin(), s * (kt * PI / 3.0).sin(), s * ((1.0 + kt) * PI / 3.0).sin()];
    Ok(InteractionState { psi, probe, coeff })
}
