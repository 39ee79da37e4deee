//! Wavefunctions sampled on a uniform periodic position grid.
//!
//! Momentum-space quantities use the discrete Fourier transform with the
//! standard wavenumber ordering, so free evolution is exact up to aliasing.

use std::cell::RefCell;
use std::f64::consts::{PI, TAU};
use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::tcs::{Moments, TcsParams};

/// Probability allowed in the outer boundary cells before a state is
/// considered to be cut off by the grid.
pub const BOUNDARY_MASS_LIMIT: f64 = 1e-10;

/// Momentum probability allowed in the outer 10% of the band.
pub const ALIASING_LIMIT: f64 = 1e-8;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

fn fft(buf: &mut [Complex64]) {
    plans(buf.len()).0.process(buf);
}

fn ifft(buf: &mut [Complex64]) {
    let n = buf.len();
    plans(n).1.process(buf);
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|z| *z *= s);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid {
    /// Periodic grid with nodes `x_min + i·dx`, `dx = (x_max − x_min)/n`.
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::Domain(format!("grid needs x_max > x_min, got [{x_min}, {x_max}]")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Domain(format!("grid size must be a power of two >= 16, got {n}")));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// `[−40, 40]` with 4096 nodes; adequate for unit-scale states.
    pub fn standard() -> Self {
        Self { x_min: -40.0, x_max: 40.0, n: 4096 }
    }

    /// Symmetric grid wide enough to hold `params` over `[0, t_max]` of free
    /// evolution with momentum bandwidth to spare.
    pub fn auto_for(params: &TcsParams, t_max: f64) -> Self {
        let m = params.moments();
        let sigma_x = [0.0, 0.5, 1.0]
            .iter()
            .map(|f| params.position_variance_at(f * t_max.max(0.0)))
            .fold(m.var_x, f64::max)
            .sqrt();
        let drift = m.mean_p.abs() * t_max.max(0.0) / params.mass();
        let half = m.mean_x.abs() + drift + 14.0 * sigma_x;
        let k_needed = (m.mean_p.abs() + 14.0 * m.var_p.sqrt()) / params.hbar();
        // k_max = π/dx must exceed k_needed with the outer 10% left empty
        let dx_max = 0.9 * PI / k_needed;
        let n = ((2.0 * half / dx_max).ceil() as usize).next_power_of_two().max(16);
        Self { x_min: -half, x_max: half, n }
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Wavenumber of FFT bin `j` in standard ordering; the Nyquist bin is
    /// assigned the negative frequency.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let dk = TAU / (self.x_max - self.x_min);
        let j = j as isize;
        let n = self.n as isize;
        (if j < n / 2 { j } else { j - n }) as f64 * dk
    }

    pub fn k_max(&self) -> f64 {
        PI / self.dx()
    }

    /// Index of the node equal to `x`, if `x` lies on the lattice.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let f = (x - self.x_min) / self.dx();
        let r = f.round();
        ((f - r).abs() < 1e-9 && r >= 0.0 && (r as usize) < self.n).then_some(r as usize)
    }

    /// Cells counted as boundary for the truncation guard.
    fn boundary_cells(&self) -> usize {
        (self.n / 64).max(1)
    }
}

/// Normalised wavefunction on a [`Grid`], tagged with the mass and `ħ` that
/// govern its dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    grid: Grid,
    amplitudes: Vec<Complex64>,
    mass: f64,
    hbar: f64,
}

impl GridState {
    /// Normalises `amplitudes` so that `Σ|ψ|²dx = 1`.
    pub fn from_amplitudes(grid: Grid, mut amplitudes: Vec<Complex64>, mass: f64, hbar: f64) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::Domain(format!(
                "expected {} amplitudes, got {}",
                grid.len(),
                amplitudes.len()
            )));
        }
        if !(mass > 0.0 && hbar > 0.0) {
            return Err(Error::Domain("mass and hbar must be positive".into()));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.dx();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("wavefunction has zero or non-finite norm".into()));
        }
        let s = norm.sqrt().recip();
        amplitudes.iter_mut().for_each(|a| *a *= s);
        Ok(Self { grid, amplitudes, mass, hbar })
    }

    /// Samples `f` at the grid nodes and normalises, without a boundary check.
    pub fn from_fn(grid: Grid, mass: f64, hbar: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let amps = grid.points().map(f).collect();
        Self::from_amplitudes(grid, amps, mass, hbar)
    }

    /// Samples a twisted coherent state, rejecting grids that cut it off.
    pub fn discretize(params: &TcsParams, grid: Grid) -> Result<Self> {
        let state = Self::from_fn(grid, params.mass(), params.hbar(), |x| params.wavefunction_at(x))?;
        let edge = state.boundary_mass();
        if edge > BOUNDARY_MASS_LIMIT {
            return Err(Error::GridTooNarrow(format!(
                "boundary cells of [{}, {}] hold probability {edge:e}",
                grid.x_min, grid.x_max
            )));
        }
        Ok(state)
    }

    /// Real Gaussian `exp(−(x−c)²/4σ²)` with position spread `sigma`.
    pub fn gaussian(grid: Grid, center: f64, sigma: f64, mass: f64, hbar: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Domain(format!("gaussian width must be positive, got {sigma}")));
        }
        Self::from_fn(grid, mass, hbar, |x| {
            let d = (x - center) / sigma;
            Complex64::new((-0.25 * d * d).exp(), 0.0)
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// `|ψ(x_i)|²` at every node.
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩ = Σ ψ* φ dx`.
    pub fn overlap(&self, other: &GridState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.dx()
    }

    /// Linear interpolation between nodes (exact on nodes); zero outside
    /// `[x_min, x_max]`.
    pub fn amplitude_at(&self, x: f64) -> Complex64 {
        let mut f = (x - self.grid.x_min) / self.grid.dx();
        if (f - f.round()).abs() < 1e-9 {
            f = f.round();
        }
        if !(f >= 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        let i = f.floor() as usize;
        let w = f - i as f64;
        let n = self.grid.n;
        if i >= n {
            return Complex64::new(0.0, 0.0);
        }
        if i == n - 1 || w < 1e-12 {
            return self.amplitudes[i] * (1.0 - w);
        }
        self.amplitudes[i] * (1.0 - w) + self.amplitudes[i + 1] * w
    }

    /// Probability held by the outer boundary cells on both ends.
    pub fn boundary_mass(&self) -> f64 {
        let b = self.grid.boundary_cells();
        let n = self.grid.n;
        let dx = self.grid.dx();
        self.amplitudes[..b]
            .iter()
            .chain(&self.amplitudes[n - b..])
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            * dx
    }

    /// Mean and variance of `|ψ(x)|²` by quadrature.
    pub fn position_stats(&self) -> (f64, f64) {
        let (mut s0, mut s1) = (0.0, 0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            let w = a.norm_sqr();
            s0 += w;
            s1 += w * self.grid.x(i);
        }
        let mean = s1 / s0;
        let var = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * (self.grid.x(i) - mean).powi(2))
            .sum::<f64>()
            / s0;
        (mean, var)
    }

    fn spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.amplitudes.clone();
        fft(&mut buf);
        buf
    }

    /// `(⟨x⟩, ⟨p⟩)` without the second moments.
    pub fn mean_position_momentum(&self) -> (f64, f64) {
        let (mean_x, _) = self.position_stats();
        let k_space = self.spectrum();
        let (mut w, mut wk) = (0.0, 0.0);
        for (j, z) in k_space.iter().enumerate() {
            let p = z.norm_sqr();
            w += p;
            wk += p * self.grid.wavenumber(j);
        }
        (mean_x, self.hbar * wk / w)
    }

    /// Position moments by quadrature, momentum moments from the discrete
    /// spectrum and the symmetrised correlation via spectral differentiation.
    pub fn quadrature_moments(&self) -> Moments {
        let (mean_x, var_x) = self.position_stats();
        let mut k_space = self.spectrum();
        let (mut w, mut wk, mut wk2) = (0.0, 0.0, 0.0);
        for (j, z) in k_space.iter().enumerate() {
            let p = z.norm_sqr();
            let k = self.grid.wavenumber(j);
            w += p;
            wk += p * k;
            wk2 += p * k * k;
        }
        let hbar = self.hbar;
        let mean_p = hbar * wk / w;
        let var_p = hbar * hbar * (wk2 / w - (wk / w).powi(2));

        // ψ' = IFFT(i k ψ̂), Nyquist bin dropped
        let n = self.grid.n;
        for (j, z) in k_space.iter_mut().enumerate() {
            *z *= if j == n / 2 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, self.grid.wavenumber(j)) };
        }
        ifft(&mut k_space);
        let dx = self.grid.dx();
        // ⟨x p⟩ = Σ ψ* x (−iħ ψ') dx
        let xp: Complex64 = self
            .amplitudes
            .iter()
            .zip(&k_space)
            .enumerate()
            .map(|(i, (a, d))| a.conj() * self.grid.x(i) * d)
            .sum::<Complex64>()
            * Complex64::new(0.0, -hbar)
            * dx;
        let norm = self.norm_sqr();
        let correlation = 2.0 * xp.re / norm - 2.0 * mean_x * mean_p;
        Moments {
            mean_x,
            mean_p,
            var_x,
            var_p,
            correlation,
            mean_energy: (mean_p * mean_p + var_p) / (2.0 * self.mass),
        }
    }

    /// Fraction of momentum probability with `|k| > 0.9 k_max`.
    pub fn momentum_edge_fraction(&self) -> f64 {
        let k_space = self.spectrum();
        let cut = 0.9 * self.grid.k_max();
        let (mut total, mut edge) = (0.0, 0.0);
        for (j, z) in k_space.iter().enumerate() {
            let p = z.norm_sqr();
            total += p;
            if self.grid.wavenumber(j).abs() > cut {
                edge += p;
            }
        }
        edge / total
    }

    /// Exact free evolution under `p²/2m` for time `t ≥ 0`.
    pub fn free_evolve(&self, t: f64) -> Result<GridState> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("evolution time must be finite and >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(self.clone());
        }
        let mut k_space = self.spectrum();
        let cut = 0.9 * self.grid.k_max();
        let (mut total, mut edge) = (0.0, 0.0);
        let c = self.hbar * t / (2.0 * self.mass);
        for (j, z) in k_space.iter_mut().enumerate() {
            let k = self.grid.wavenumber(j);
            let p = z.norm_sqr();
            total += p;
            if k.abs() > cut {
                edge += p;
            }
            *z *= Complex64::from_polar(1.0, -c * k * k);
        }
        let frac = edge / total;
        if frac > ALIASING_LIMIT {
            return Err(Error::AliasingRisk(frac));
        }
        ifft(&mut k_space);
        let out = GridState { grid: self.grid, amplitudes: k_space, mass: self.mass, hbar: self.hbar };
        let (before, after) = (self.boundary_mass(), out.boundary_mass());
        if after > BOUNDARY_MASS_LIMIT && after > before {
            return Err(Error::GridTooNarrow(format!(
                "free evolution for t = {t} spreads probability {after:e} into the boundary cells"
            )));
        }
        Ok(out)
    }

    pub fn sampler(&self) -> PositionSampler {
        PositionSampler::new(&self.grid, &self.density())
    }

    /// Inverse-CDF position sample for a uniform draw in `[0, 1)`.
    pub fn sample_position(&self, uniform_draw: f64) -> f64 {
        self.sampler().sample(uniform_draw)
    }

    /// Writes `x,re,im` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,re,im")?;
        for (i, a) in self.amplitudes.iter().enumerate() {
            writeln!(out, "{:.17e},{:.17e},{:.17e}", self.grid.x(i), a.re, a.im)?;
        }
        Ok(())
    }

    /// Reads a state written by [`GridState::write_csv`]; the nodes must
    /// coincide with `grid`.
    pub fn read_csv<R: BufRead>(input: R, grid: Grid, mass: f64, hbar: f64) -> Result<Self> {
        let mut amps = Vec::with_capacity(grid.len());
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (lineno == 0 && line.starts_with('x')) {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(Error::parse(lineno + 1, format!("expected 3 columns, found {}", cols.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| Error::parse(lineno + 1, format!("`{s}`: {e}")));
            let (x, re, im) = (num(cols[0])?, num(cols[1])?, num(cols[2])?);
            let idx = amps.len();
            if idx >= grid.len() || (x - grid.x(idx)).abs() > 1e-9 * grid.dx().max(1.0) {
                return Err(Error::parse(lineno + 1, format!("x = {x} does not match grid node {idx}")));
            }
            amps.push(Complex64::new(re, im));
        }
        if amps.len() != grid.len() {
            return Err(Error::Config(format!("state file has {} rows, grid has {} nodes", amps.len(), grid.len())));
        }
        Self::from_amplitudes(grid, amps, mass, hbar)
    }
}

/// Inverse-CDF sampler over `|ψ|²` with cells centred on the grid nodes and
/// a linear CDF inside each cell.
#[derive(Debug, Clone)]
pub struct PositionSampler {
    first_edge: f64,
    dx: f64,
    cdf: Vec<f64>,
}

impl PositionSampler {
    pub fn new(grid: &Grid, weights: &[f64]) -> Self {
        let mut cdf = Vec::with_capacity(weights.len() + 1);
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in weights {
            acc += w.max(0.0);
            cdf.push(acc);
        }
        Self { first_edge: grid.x_min() - 0.5 * grid.dx(), dx: grid.dx(), cdf }
    }

    pub fn sample(&self, uniform_draw: f64) -> f64 {
        let n = self.cdf.len() - 1;
        let total = self.cdf[n];
        let target = uniform_draw.clamp(0.0, 1.0) * total;
        let i = self.cdf[1..].partition_point(|&c| c <= target).min(n - 1);
        let width = self.cdf[i + 1] - self.cdf[i];
        let frac = if width > 0.0 { ((target - self.cdf[i]) / width).clamp(0.0, 1.0) } else { 0.5 };
        self.first_edge + (i as f64 + frac) * self.dx
    }

    /// Node drawn with probability proportional to its weight: the cell
    /// containing [`sample`](Self::sample), reduced to its centre.
    pub fn sample_node(&self, uniform_draw: f64) -> f64 {
        let n = self.cdf.len() - 1;
        let target = uniform_draw.clamp(0.0, 1.0) * self.cdf[n];
        let i = self.cdf[1..].partition_point(|&c| c <= target).min(n - 1);
        self.first_edge + (i as f64 + 0.5) * self.dx
    }

    /// Piecewise-linear CDF the sampler inverts.
    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.cdf.len() - 1;
        let f = (x - self.first_edge) / self.dx;
        if f <= 0.0 {
            return 0.0;
        }
        if f >= n as f64 {
            return 1.0;
        }
        let i = f.floor() as usize;
        let w = f - i as f64;
        (self.cdf[i] + w * (self.cdf[i + 1] - self.cdf[i])) / self.cdf[n]
    }
}
