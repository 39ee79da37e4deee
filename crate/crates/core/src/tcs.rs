//! Twisted coherent states of a free mass.
//!
//! A twisted coherent state `|μ ν α ω⟩` is the eigenstate of `μâ + νâ†` with
//! `|μ|² − |ν|² = 1`, where `â` is the annihilation operator built from an
//! arbitrary reference frequency `ω`. Its wavefunction is a Gaussian whose
//! position-dependent phase is controlled by `ξ = Im(μ*ν)`. States with
//! `ξ > 0` narrow under free evolution before spreading again; these are the
//! *contractive* states.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance on `|μ|² − |ν|² = 1` accepted at construction.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Parameters of a twisted coherent state.
///
/// The displacement `α` is stored through its real coordinates `(x0, p0)`;
/// see [`TcsParams::alpha`] for the conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcsParams {
    mu: Complex64,
    nu: Complex64,
    x0: f64,
    p0: f64,
    omega: f64,
    mass: f64,
    hbar: f64,
}

/// First and second moments of a one-dimensional state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// `⟨Δx̂Δp̂ + Δp̂Δx̂⟩`.
    pub correlation: f64,
    /// `⟨p̂²⟩/2m`.
    pub mean_energy: f64,
}

impl Moments {
    /// `var_x·var_p − (correlation/2)² − (ħ/2)²`; nonnegative for every
    /// physical state (Robertson–Schrödinger relation).
    pub fn uncertainty_slack(&self, hbar: f64) -> f64 {
        self.var_x * self.var_p - 0.25 * self.correlation.powi(2) - 0.25 * hbar * hbar
    }

    /// Position variance after free evolution for time `t`:
    /// `Δx² + (t/m)·⟨ΔxΔp+ΔpΔx⟩ + (t/m)²·Δp²`.
    pub fn free_position_variance(&self, t: f64, mass: f64) -> f64 {
        let s = t / mass;
        self.var_x + s * self.correlation + s * s * self.var_p
    }
}

impl TcsParams {
    /// Validates and builds a parameter record.
    ///
    /// Inputs within [`NORMALIZATION_TOLERANCE`] of the constraint are
    /// rescaled so that `|μ|² − |ν|² = 1` holds to rounding.
    pub fn new(
        mu: Complex64,
        nu: Complex64,
        x0: f64,
        p0: f64,
        omega: f64,
        mass: f64,
        hbar: f64,
    ) -> Result<Self> {
        for (name, v) in [("omega", omega), ("mass", mass), ("hbar", hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(x0.is_finite() && p0.is_finite()) {
            return Err(Error::Domain("x0 and p0 must be finite".into()));
        }
        let norm = mu.norm_sqr() - nu.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NormalizationViolation(norm));
        }
        let scale = norm.sqrt().recip();
        Ok(Self { mu: mu * scale, nu: nu * scale, x0, p0, omega, mass, hbar })
    }

    /// Minimum-uncertainty (coherent) state in units `ħ = m = ω = 1`.
    pub fn coherent() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 0.0, 0.0, 1.0, 1.0, 1.0)
            .expect("unit coherent state is valid")
    }

    /// Canonical state with a prescribed `ξ`: `ν = i·s`, `μ = √(1+s²)` with
    /// `s² = (√(1+4ξ²) − 1)/2`, so that `Im(μ*ν) = ξ` and `|μ−ν| = |μ+ν|`.
    /// Negative `ξ` flips the sign of `ν`.
    pub fn from_xi(xi: f64, omega: f64, mass: f64, hbar: f64) -> Result<Self> {
        if !xi.is_finite() {
            return Err(Error::Domain(format!("xi must be finite, got {xi}")));
        }
        let s2 = 0.5 * ((1.0 + 4.0 * xi * xi).sqrt() - 1.0);
        let s = s2.sqrt().copysign(xi);
        let mu = Complex64::new((1.0 + s2).sqrt(), 0.0);
        let nu = Complex64::new(0.0, s);
        Self::new(mu, nu, 0.0, 0.0, omega, mass, hbar)
    }

    /// Same state shape displaced to mean position `x0` and mean momentum `p0`.
    pub fn with_center(self, x0: f64, p0: f64) -> Self {
        Self { x0, p0, ..self }
    }

    pub fn mu(&self) -> Complex64 {
        self.mu
    }
    pub fn nu(&self) -> Complex64 {
        self.nu
    }
    pub fn x0(&self) -> f64 {
        self.x0
    }
    pub fn p0(&self) -> f64 {
        self.p0
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `α = (mω/2ħ)^{1/2} x0 + i (2ħmω)^{-1/2} p0`.
    pub fn alpha(&self) -> Complex64 {
        let mw = self.mass * self.omega;
        Complex64::new((mw / (2.0 * self.hbar)).sqrt() * self.x0, self.p0 / (2.0 * self.hbar * mw).sqrt())
    }

    /// `ξ = Im(μ*ν)`; positive iff the state is contractive.
    pub fn xi(&self) -> f64 {
        (self.mu.conj() * self.nu).im
    }

    pub fn is_contractive(&self) -> bool {
        self.xi() > 0.0
    }

    fn minus_sq(&self) -> f64 {
        (self.mu - self.nu).norm_sqr()
    }

    fn plus_sq(&self) -> f64 {
        (self.mu + self.nu).norm_sqr()
    }

    pub fn moments(&self) -> Moments {
        let mw = self.mass * self.omega;
        let var_x = self.hbar * self.minus_sq() / (2.0 * mw);
        let var_p = self.hbar * mw * self.plus_sq() / 2.0;
        Moments {
            mean_x: self.x0,
            mean_p: self.p0,
            var_x,
            var_p,
            correlation: -2.0 * self.hbar * self.xi(),
            mean_energy: (self.p0 * self.p0 + var_p) / (2.0 * self.mass),
        }
    }

    /// `⟨x|μ ν α ω⟩` with a positive real prefactor.
    ///
    /// The momentum phase is `p0 (x − x0)/ħ`, so that `⟨p̂⟩ = p0` for any `ħ`.
    pub fn wavefunction_at(&self, x: f64) -> Complex64 {
        let d2 = self.minus_sq();
        let mw_h = self.mass * self.omega / self.hbar;
        let prefactor = (mw_h / (PI * d2)).powf(0.25);
        let dx = x - self.x0;
        let width = Complex64::new(1.0, 2.0 * self.xi()) * (mw_h / (2.0 * d2));
        let exponent = -width * dx * dx + Complex64::new(0.0, self.p0 * dx / self.hbar);
        exponent.exp() * prefactor
    }

    /// Position variance after free evolution for time `t ≥ 0`:
    /// `(ħ/2mω)(|μ−ν|² − 4ξωt + |μ+ν|²(ωt)²)`.
    pub fn position_variance_at(&self, t: f64) -> f64 {
        let wt = self.omega * t;
        self.hbar / (2.0 * self.mass * self.omega)
            * (self.minus_sq() - 4.0 * self.xi() * wt + self.plus_sq() * wt * wt)
    }

    /// Time `τ = 2ξ/(ω|μ+ν|²)` at which the free-evolution variance is minimal.
    pub fn contraction_time(&self) -> Result<f64> {
        let xi = self.xi();
        if xi <= 0.0 {
            return Err(Error::NotContractive(xi));
        }
        Ok(2.0 * xi / (self.omega * self.plus_sq()))
    }

    /// Minimal position uncertainty reached at the contraction time, `ħ/2Δp(0)`.
    pub fn min_position_uncertainty(&self) -> Result<f64> {
        let tau = self.contraction_time()?;
        let m = self.moments();
        let value = self.hbar / (2.0 * m.var_p.sqrt());
        debug_assert!({
            let xi = self.xi();
            let via_dx0 = m.var_x.sqrt() / (1.0 + 4.0 * xi * xi).sqrt();
            let via_tau = (self.hbar * tau / (4.0 * xi * self.mass)).sqrt();
            (via_dx0 - value).abs() <= 1e-9 * value && (via_tau - value).abs() <= 1e-9 * value
        });
        Ok(value)
    }
}

/// Squared standard-quantum-limit uncertainty `ħτ/m`.
pub fn sql_bound(mass: f64, tau: f64, hbar: f64) -> Result<f64> {
    for (name, v) in [("mass", mass), ("tau", tau), ("hbar", hbar)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
        }
    }
    Ok(hbar * tau / mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn breach() -> TcsParams {
        TcsParams::new(c(SQRT2, 0.0), c(0.0, 1.0), 0.0, 0.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn construction() {
        let p = TcsParams::new(c(1.0, 0.0), c(0.0, 0.0), 0.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.xi(), 0.0);
        assert!(breach().mu().re > 0.0);
        assert!(matches!(
            TcsParams::new(c(1.0, 0.0), c(1.0, 0.0), 0.0, 0.0, 1.0, 1.0, 1.0),
            Err(Error::NormalizationViolation(v)) if v == 0.0
        ));
        assert!(matches!(
            TcsParams::new(c(1.0, 0.0), c(0.0, 0.0), 0.0, 0.0, 0.0, 1.0, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            TcsParams::new(c(1.0, 0.0), c(0.0, 0.0), 0.0, 0.0, 1.0, -1.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn rounded_literals_are_renormalized() {
        let p = TcsParams::new(c(1.41421356237, 0.0), c(0.0, 1.0), 0.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert!((p.mu().norm_sqr() - p.nu().norm_sqr() - 1.0).abs() < 1e-15);
        assert!(TcsParams::new(c(1.4142, 0.0), c(0.0, 1.0), 0.0, 0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn xi_values() {
        assert_eq!(TcsParams::coherent().xi(), 0.0);
        assert!((breach().xi() - SQRT2).abs() < 1e-15);
        let anti = TcsParams::new(c(SQRT2, 0.0), c(0.0, -1.0), 0.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert!((anti.xi() + SQRT2).abs() < 1e-15);
        assert!(!anti.is_contractive());
    }

    #[test]
    fn from_xi_recovers_the_breach_state() {
        let p = TcsParams::from_xi(SQRT2, 1.0, 1.0, 1.0).unwrap();
        assert!((p.mu().re - SQRT2).abs() < 1e-14);
        assert!((p.nu().im - 1.0).abs() < 1e-14);
        for xi in [-3.0, 0.0, 0.5, 25.0] {
            assert!((TcsParams::from_xi(xi, 1.0, 1.0, 1.0).unwrap().xi() - xi).abs() < 1e-12 * (1.0 + xi.abs()));
        }
    }

    #[test]
    fn moments_examples() {
        let m = TcsParams::coherent().moments();
        assert_eq!((m.var_x, m.var_p, m.correlation), (0.5, 0.5, 0.0));
        let m = breach().moments();
        assert!((m.var_x - 1.5).abs() < 1e-14);
        assert!((m.var_p - 1.5).abs() < 1e-14);
        assert!((m.correlation + 2.0 * SQRT2).abs() < 1e-14);
        let m = breach().with_center(0.0, 2.0).moments();
        assert!((m.mean_energy - 2.75).abs() < 1e-14);
        assert_eq!(m.mean_p, 2.0);
    }

    #[test]
    fn alpha_conversion() {
        let p = TcsParams::coherent().with_center(2.0, 4.0);
        let a = p.alpha();
        assert!((a.re - 2.0 / SQRT2).abs() < 1e-15);
        assert!((a.im - 4.0 / SQRT2).abs() < 1e-15);
    }

    #[test]
    fn variance_curve_examples() {
        let p = breach();
        assert!((p.position_variance_at(0.0) - p.moments().var_x).abs() < 1e-15);
        assert!((p.position_variance_at(2.0 * SQRT2 / 3.0) - 1.0 / 6.0).abs() < 1e-14);
        assert!((TcsParams::coherent().position_variance_at(1.0) - 1.0).abs() < 1e-15);
    }

    // golden-section search, independent of the closed-form minimiser
    fn argmin(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if f(a) < f(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn contraction_time_examples() {
        let p = breach();
        let tau = p.contraction_time().unwrap();
        assert!((tau - 2.0 * SQRT2 / 3.0).abs() < 1e-15);
        let numeric = argmin(|t| p.position_variance_at(t), 0.0, 5.0);
        assert!((numeric - tau).abs() < 1e-7);
        assert!(matches!(TcsParams::coherent().contraction_time(), Err(Error::NotContractive(_))));
    }

    #[test]
    fn min_uncertainty_examples() {
        let p = breach();
        let v = p.min_position_uncertainty().unwrap();
        assert!((v - (1.0f64 / 6.0).sqrt()).abs() < 1e-14);
        assert!((1.5f64.sqrt() / 3.0 - v).abs() < 1e-14);
        assert!(matches!(TcsParams::coherent().min_position_uncertainty(), Err(Error::NotContractive(_))));
        let nearly = TcsParams::from_xi(1e-7, 1.0, 1.0, 1.0).unwrap();
        let dx0 = nearly.moments().var_x.sqrt();
        assert!((nearly.min_position_uncertainty().unwrap() - dx0).abs() < 1e-12);
    }

    #[test]
    fn sql_bound_examples() {
        assert_eq!(sql_bound(1.0, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(sql_bound(2.0, 1.0, 1.0).unwrap(), 0.5);
        assert_eq!(sql_bound(1.0, 0.9428, 1.0).unwrap(), 0.9428);
        assert!(sql_bound(0.0, 1.0, 1.0).is_err());
        assert!(sql_bound(1.0, -1.0, 1.0).is_err());
    }

    fn arb_params() -> impl Strategy<Value = TcsParams> {
        (0.0..3.0f64, 0.0..std::f64::consts::TAU, 0.0..std::f64::consts::TAU, -5.0..5.0f64, -5.0..5.0f64,
            0.2..5.0f64, 0.2..5.0f64, 0.2..3.0f64)
            .prop_map(|(r, phase_mu, phase_nu, x0, p0, omega, mass, hbar)| {
                let mu = Complex64::from_polar(r.cosh(), phase_mu);
                let nu = Complex64::from_polar(r.sinh(), phase_nu);
                TcsParams::new(mu, nu, x0, p0, omega, mass, hbar).unwrap()
            })
    }

    proptest! {
        #[test]
        fn uncertainty_product_identity(p in arb_params()) {
            let m = p.moments();
            let xi = p.xi();
            let expected = 0.25 * p.hbar() * p.hbar() * (1.0 + 4.0 * xi * xi);
            prop_assert!((m.var_x * m.var_p - expected).abs() <= 1e-9 * expected);
            prop_assert!(m.uncertainty_slack(p.hbar()) >= -1e-12 * expected);
        }

        #[test]
        fn contraction_time_second_form(p in arb_params()) {
            prop_assume!(p.xi() > 1e-6);
            let tau = p.contraction_time().unwrap();
            let alt = p.xi() * p.hbar() * p.mass() / p.moments().var_p;
            prop_assert!((tau - alt).abs() <= 1e-10 * tau);
        }

        #[test]
        fn minimum_of_variance_curve(p in arb_params()) {
            prop_assume!(p.xi() > 1e-6);
            let tau = p.contraction_time().unwrap();
            let min = p.position_variance_at(tau);
            let closed = p.hbar() * tau / (4.0 * p.xi() * p.mass());
            prop_assert!((min - closed).abs() <= 1e-9 * closed.max(1e-300) + 1e-13);
            prop_assert!(p.position_variance_at(0.9 * tau) >= min);
            prop_assert!(p.position_variance_at(1.1 * tau) >= min);
            let dxm = p.min_position_uncertainty().unwrap();
            prop_assert!((dxm * dxm - min).abs() <= 1e-9 * min + 1e-13);
        }

        #[test]
        fn matches_free_evolution_of_moments(p in arb_params(), t in 0.0..4.0f64) {
            let from_moments = p.moments().free_position_variance(t, p.mass());
            let direct = p.position_variance_at(t);
            prop_assert!((from_moments - direct).abs() <= 1e-10 * direct.max(1.0));
        }

        #[test]
        fn coherent_family_never_contracts(x0 in -3.0..3.0f64, t1 in 0.0..5.0f64, dt in 0.0..5.0f64) {
            let p = TcsParams::coherent().with_center(x0, 0.0);
            prop_assert_eq!(p.moments().correlation, 0.0);
            prop_assert!(p.position_variance_at(t1 + dt) >= p.position_variance_at(t1));
        }
    }
}
