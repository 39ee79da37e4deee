//! Finite-dimensional operation measures.
//!
//! An operation measure on a finite outcome alphabet is stored in Kraus form
//! `I(a)ρ = Σ_k M_{a,k} ρ M_{a,k}†`, which makes it completely positive by
//! construction. Maps that may fail complete positivity are handled through
//! the separate [`LinearMap`] trait in [`choi`].

pub mod choi;
pub mod dilation;
pub mod io;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub use choi::{choi_matrix, quadratic_form, CpCertificate, KrausMap, LinearMap, TransposeMap};
pub use dilation::{Realization, RealizationStatistics};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues above `-PSD_TOLERANCE` count as non-negative.
pub const PSD_TOLERANCE: f64 = 1e-10;
/// Allowed deviation of `Σ M†M` from the identity.
pub const COMPLETENESS_TOLERANCE: f64 = 1e-10;
/// Allowed weak-repeatability violation.
pub const REPEATABILITY_TOLERANCE: f64 = 1e-9;
/// Probabilities at or below this are treated as zero when conditioning.
pub const ZERO_PROBABILITY: f64 = 1e-14;

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn real_trace(m: &CMatrix) -> f64 {
    m.trace().re
}

/// Smallest eigenvalue of the Hermitian part of `m` and its eigenvector.
pub(crate) fn min_eigen(m: &CMatrix) -> (f64, CVector) {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let (idx, &val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("matrix has at least one eigenvalue");
    (val, eig.eigenvectors.column(idx).into_owned())
}

/// Unit-trace positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::Domain("density operator must be a non-empty square matrix".into()));
        }
        let herm = max_abs(&(&matrix - matrix.adjoint()));
        if herm > 1e-12 {
            return Err(Error::Domain(format!("density operator is not Hermitian (deviation {herm:e})")));
        }
        let tr = real_trace(&matrix);
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::NormalizationViolation(tr));
        }
        let (min, _) = min_eigen(&matrix);
        if min < -PSD_TOLERANCE {
            return Err(Error::Domain(format!("density operator has negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    /// `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let n = psi.norm();
        if !(n > 0.0) {
            return Err(Error::NormalizationViolation(0.0));
        }
        let v = psi.unscale(n);
        Ok(Self { matrix: &v * v.adjoint() })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim).unscale(dim as f64) }
    }

    /// `Σ w_i ρ_i` for weights summing to one.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Domain("empty mixture".into()))?;
        let d = first.1.dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, rho) in parts {
            if *w < 0.0 || rho.dim() != d {
                return Err(Error::Domain("mixture needs non-negative weights over equal dimensions".into()));
            }
            m += &rho.matrix * Complex64::new(*w, 0.0);
        }
        Self::new(m)
    }

    /// Random mixed state `AA†/Tr(AA†)` with uniform entries in A.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let a = random_matrix(dim, dim, rng);
        let m = &a * a.adjoint();
        let tr = real_trace(&m);
        Self { matrix: m.unscale(tr) }
    }

    pub(crate) fn from_unnormalized(m: CMatrix) -> Self {
        let tr = real_trace(&m);
        let m = m.unscale(tr);
        Self { matrix: (&m + m.adjoint()) * Complex64::new(0.5, 0.0) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn purity(&self) -> f64 {
        real_trace(&(&self.matrix * &self.matrix))
    }

    /// Largest entrywise distance to another operator.
    pub fn distance(&self, other: &DensityOperator) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }
}

pub(crate) fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Random unit vector with uniform entries before normalisation.
pub fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(dim, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let n = v.norm();
    v.unscale(n)
}

/// Positive-operator-valued measure on a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectMeasure {
    labels: Vec<String>,
    effects: Vec<CMatrix>,
}

impl EffectMeasure {
    pub fn new(labels: Vec<String>, effects: Vec<CMatrix>) -> Result<Self> {
        if labels.len() != effects.len() || effects.is_empty() {
            return Err(Error::InvalidMeasure("one effect per outcome is required".into()));
        }
        let d = effects[0].nrows();
        let mut total = CMatrix::zeros(d, d);
        for (label, f) in labels.iter().zip(&effects) {
            if f.shape() != (d, d) {
                return Err(Error::InvalidMeasure(format!("effect {label} has the wrong shape")));
            }
            let (lo, _) = min_eigen(f);
            let (hi, _) = min_eigen(&(CMatrix::identity(d, d) - f));
            if lo < -PSD_TOLERANCE || hi < -PSD_TOLERANCE {
                return Err(Error::InvalidMeasure(format!("effect {label} is not between 0 and 1")));
            }
            total += f;
        }
        let dev = max_abs(&(total - CMatrix::identity(d, d)));
        if dev > COMPLETENESS_TOLERANCE {
            return Err(Error::CompletenessViolation(dev));
        }
        Ok(Self { labels, effects })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn effect(&self, label: &str) -> Result<&CMatrix> {
        let i = index_of(&self.labels, label)?;
        Ok(&self.effects[i])
    }

    /// `Tr[F(a)ρ]`.
    pub fn probability(&self, label: &str, rho: &DensityOperator) -> Result<f64> {
        Ok(real_trace(&(self.effect(label)? * rho.matrix())))
    }
}

fn index_of(labels: &[String], label: &str) -> Result<usize> {
    labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownOutcome(label.to_string()))
}

/// Outcome of [`FiniteOperationMeasure::check_weak_repeatability`].
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatabilityReport {
    /// Largest `|Tr[I(B∩C)ρ] − Tr[I(B)I(C)ρ]|` found.
    pub max_violation: f64,
    /// Subsets `(B, C)` and test-state index attaining it.
    pub worst_case: Option<(Vec<String>, Vec<String>, usize)>,
    pub pairs_checked: usize,
    pub passed: bool,
}

/// Completely positive operation measure on a finite outcome alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteOperationMeasure {
    dim: usize,
    labels: Vec<String>,
    kraus: Vec<Vec<CMatrix>>,
}

impl FiniteOperationMeasure {
    /// Validates shapes, label uniqueness and `Σ M†M = 1`.
    pub fn new(dim: usize, outcomes: Vec<(String, Vec<CMatrix>)>) -> Result<Self> {
        if dim == 0 || outcomes.is_empty() {
            return Err(Error::InvalidMeasure("need a positive dimension and at least one outcome".into()));
        }
        let mut total = CMatrix::zeros(dim, dim);
        let mut labels = Vec::with_capacity(outcomes.len());
        let mut kraus = Vec::with_capacity(outcomes.len());
        for (label, ops) in outcomes {
            if labels.contains(&label) {
                return Err(Error::InvalidMeasure(format!("duplicate outcome {label}")));
            }
            if ops.is_empty() {
                return Err(Error::InvalidMeasure(format!("outcome {label} has no Kraus operators")));
            }
            for m in &ops {
                if m.shape() != (dim, dim) {
                    return Err(Error::InvalidMeasure(format!(
                        "Kraus operator for {label} is {}x{}, expected {dim}x{dim}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                total += m.adjoint() * m;
            }
            labels.push(label);
            kraus.push(ops);
        }
        let dev = max_abs(&(total - CMatrix::identity(dim, dim)));
        if dev > COMPLETENESS_TOLERANCE {
            return Err(Error::CompletenessViolation(dev));
        }
        Ok(Self { dim, labels, kraus })
    }

    /// Projective measurement in the computational basis, outcomes `x0, x1, …`.
    pub fn von_neumann_discrete(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!("discrete von Neumann measure needs dim >= 2, got {dim}")));
        }
        let outcomes = (0..dim)
            .map(|i| {
                let mut p = CMatrix::zeros(dim, dim);
                p[(i, i)] = Complex64::new(1.0, 0.0);
                (format!("x{i}"), vec![p])
            })
            .collect();
        Self::new(dim, outcomes)
    }

    /// Position-diagonal smeared measure with Kraus operators
    /// `√G(a, x)|x⟩⟨x|`. `kernel[a][x]` must sum to one over `a`.
    pub fn smeared(kernel: &[Vec<f64>]) -> Result<Self> {
        let dim = kernel.first().map_or(0, Vec::len);
        let outcomes = kernel
            .iter()
            .enumerate()
            .map(|(a, row)| {
                if row.len() != dim || row.iter().any(|g| *g < 0.0) {
                    return Err(Error::InvalidMeasure("kernel rows must be non-negative and of equal length".into()));
                }
                let m = CMatrix::from_diagonal(&CVector::from_iterator(dim, row.iter().map(|g| Complex64::new(g.sqrt(), 0.0))));
                Ok((format!("a{a}"), vec![m]))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, outcomes)
    }

    /// Random measure with `outcomes` outcomes of Kraus rank `rank`:
    /// random `A_{a,k}` rescaled by `S^{-1/2}`, `S = Σ A†A`.
    pub fn random<R: Rng + ?Sized>(dim: usize, outcomes: usize, rank: usize, rng: &mut R) -> Self {
        let raw: Vec<Vec<CMatrix>> =
            (0..outcomes).map(|_| (0..rank).map(|_| random_matrix(dim, dim, rng)).collect()).collect();
        let s: CMatrix = raw.iter().flatten().map(|a| a.adjoint() * a).fold(CMatrix::zeros(dim, dim), |acc, x| acc + x);
        let eig = s.symmetric_eigen();
        let inv_sqrt = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.sqrt().recip(), 0.0)));
        let s_inv_sqrt = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
        let ops = raw
            .into_iter()
            .enumerate()
            .map(|(a, family)| (format!("a{a}"), family.into_iter().map(|m| m * &s_inv_sqrt).collect()))
            .collect();
        Self::new(dim, ops).expect("normalised random Kraus family is complete")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[String] {
        &self.labels
    }

    pub fn kraus(&self, label: &str) -> Result<&[CMatrix]> {
        Ok(&self.kraus[index_of(&self.labels, label)?])
    }

    /// Largest number of Kraus operators attached to one outcome.
    pub fn max_rank(&self) -> usize {
        self.kraus.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn indices(&self, set: &[&str]) -> Result<Vec<usize>> {
        let mut idx = set.iter().map(|l| index_of(&self.labels, l)).collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }

    fn apply_indices(&self, idx: &[usize], x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for &a in idx {
            for m in &self.kraus[a] {
                out += m * x * m.adjoint();
            }
        }
        out
    }

    /// `I(B)X = Σ_{a∈B,k} M_{a,k} X M_{a,k}†` for an arbitrary operator.
    pub fn apply_operator(&self, set: &[&str], x: &CMatrix) -> Result<CMatrix> {
        Ok(self.apply_indices(&self.indices(set)?, x))
    }

    /// `I(B)ρ`.
    pub fn apply(&self, set: &[&str], rho: &DensityOperator) -> Result<CMatrix> {
        self.apply_operator(set, rho.matrix())
    }

    /// `Tr[I(a)ρ]`.
    pub fn probability(&self, label: &str, rho: &DensityOperator) -> Result<f64> {
        Ok(real_trace(&self.apply(&[label], rho)?))
    }

    /// `I(a)ρ / Tr[I(a)ρ]`.
    pub fn posterior(&self, label: &str, rho: &DensityOperator) -> Result<DensityOperator> {
        let m = self.apply(&[label], rho)?;
        if real_trace(&m) <= ZERO_PROBABILITY {
            return Err(Error::ZeroProbabilityOutcome(label.to_string()));
        }
        Ok(DensityOperator::from_unnormalized(m))
    }

    /// `I(B)ρ / Tr[I(B)ρ]`.
    pub fn subensemble_state(&self, set: &[&str], rho: &DensityOperator) -> Result<DensityOperator> {
        let m = self.apply(set, rho)?;
        if real_trace(&m) <= ZERO_PROBABILITY {
            return Err(Error::ZeroProbabilitySet);
        }
        Ok(DensityOperator::from_unnormalized(m))
    }

    /// `F(a) = Σ_k M_{a,k}† M_{a,k}`.
    pub fn effect_measure(&self) -> EffectMeasure {
        let effects = self
            .kraus
            .iter()
            .map(|ops| ops.iter().map(|m| m.adjoint() * m).fold(CMatrix::zeros(self.dim, self.dim), |acc, x| acc + x))
            .collect();
        EffectMeasure::new(self.labels.clone(), effects).expect("Kraus completeness implies a valid effect measure")
    }

    /// Choi-matrix certificate, taking the worst outcome.
    pub fn is_completely_positive(&self) -> CpCertificate {
        self.labels
            .iter()
            .zip(&self.kraus)
            .map(|(label, ops)| CpCertificate::for_map(&KrausMap::new(ops)).with_outcome(label))
            .min_by(|a, b| a.min_eigenvalue.total_cmp(&b.min_eigenvalue))
            .expect("measure has at least one outcome")
    }

    /// Compares `Tr[I(B∩C)ρ]` with `Tr[I(B)I(C)ρ]` over every pair of
    /// outcome subsets (singletons and their complements when there are more
    /// than ten outcomes).
    pub fn check_weak_repeatability(&self, test_densities: &[DensityOperator]) -> Result<RepeatabilityReport> {
        let k = self.labels.len();
        let subsets: Vec<Vec<usize>> = if k <= 10 {
            (0u32..1 << k).map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect()).collect()
        } else {
            (0..k).flat_map(|i| [vec![i], (0..k).filter(|&j| j != i).collect()]).collect()
        };
        let mut report = RepeatabilityReport { max_violation: 0.0, worst_case: None, pairs_checked: 0, passed: true };
        for (t, rho) in test_densities.iter().enumerate() {
            if rho.dim() != self.dim {
                return Err(Error::Domain(format!("test density {t} has dimension {}, expected {}", rho.dim(), self.dim)));
            }
            let applied: Vec<CMatrix> = subsets.iter().map(|c| self.apply_indices(c, rho.matrix())).collect();
            for b in &subsets {
                for (c, ic_rho) in subsets.iter().zip(&applied) {
                    let cap: Vec<usize> = b.iter().copied().filter(|i| c.contains(i)).collect();
                    let lhs = real_trace(&self.apply_indices(&cap, rho.matrix()));
                    let rhs = real_trace(&self.apply_indices(b, ic_rho));
                    let v = (lhs - rhs).abs();
                    report.pairs_checked += 1;
                    if v > report.max_violation {
                        let names = |s: &[usize]| s.iter().map(|&i| self.labels[i].clone()).collect();
                        report.max_violation = v;
                        report.worst_case = Some((names(b), names(c), t));
                    }
                }
            }
        }
        report.passed = report.max_violation <= REPEATABILITY_TOLERANCE;
        Ok(report)
    }

    /// Probe-based realization of this measure.
    pub fn dilate(&self) -> Result<Realization> {
        Realization::from_measure(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus() -> DensityOperator {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityOperator::pure(&CVector::from_vec(vec![c(s, 0.0), c(s, 0.0)])).unwrap()
    }

    #[test]
    fn density_operator_validation() {
        assert!(DensityOperator::new(CMatrix::identity(2, 2)).is_err());
        let bad = CMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!(DensityOperator::new(bad).is_err());
        let nonherm = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(DensityOperator::new(nonherm).is_err());
        assert!((DensityOperator::maximally_mixed(3).purity() - 1.0 / 3.0).abs() < 1e-15);
        assert!((plus().purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn apply_examples() {
        let vn = FiniteOperationMeasure::von_neumann_discrete(2).unwrap();
        let rho = plus();
        let all = vn.apply(&["x0", "x1"], &rho).unwrap();
        assert!((all.trace().re - 1.0).abs() < 1e-10);
        assert_eq!(vn.apply(&[], &rho).unwrap(), CMatrix::zeros(2, 2));
        let x0 = vn.apply(&["x0"], &rho).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(max_abs(&(x0 - expected)) < 1e-15);
        assert!(matches!(vn.apply(&["nope"], &rho), Err(Error::UnknownOutcome(_))));
    }

    #[test]
    fn probability_posterior_examples() {
        let vn = FiniteOperationMeasure::von_neumann_discrete(2).unwrap();
        let (c0, c1) = (c(0.6, 0.0), c(0.0, 0.8));
        let rho = DensityOperator::pure(&CVector::from_vec(vec![c0, c1])).unwrap();
        assert!((vn.probability("x0", &rho).unwrap() - 0.36).abs() < 1e-15);
        assert!((vn.probability("x1", &rho).unwrap() - 0.64).abs() < 1e-15);
        let post = vn.posterior("x1", &rho).unwrap();
        assert!((post.matrix()[(1, 1)].re - 1.0).abs() < 1e-15 && post.matrix()[(0, 0)].norm() < 1e-15);

        let up = DensityOperator::pure(&CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])).unwrap();
        assert!(matches!(vn.posterior("x1", &up), Err(Error::ZeroProbabilityOutcome(_))));

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let om = FiniteOperationMeasure::random(3, 3, 2, &mut rng);
        let (r1, r2) = (DensityOperator::random(3, &mut rng), DensityOperator::random(3, &mut rng));
        let mix = DensityOperator::mixture(&[(0.5, &r1), (0.5, &r2)]).unwrap();
        for a in om.outcomes() {
            let lhs = om.probability(a, &mix).unwrap();
            let rhs = 0.5 * (om.probability(a, &r1).unwrap() + om.probability(a, &r2).unwrap());
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn subensemble_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let om = FiniteOperationMeasure::random(3, 4, 2, &mut rng);
        let rho = DensityOperator::random(3, &mut rng);
        let single = om.subensemble_state(&["a2"], &rho).unwrap();
        assert!(single.distance(&om.posterior("a2", &rho).unwrap()) < 1e-14);

        // subensemble is the probability-weighted mixture of posteriors
        let set = ["a0", "a3"];
        let sub = om.subensemble_state(&set, &rho).unwrap();
        let (p0, p3) = (om.probability("a0", &rho).unwrap(), om.probability("a3", &rho).unwrap());
        let (q0, q3) = (om.posterior("a0", &rho).unwrap(), om.posterior("a3", &rho).unwrap());
        let mix = DensityOperator::mixture(&[(p0 / (p0 + p3), &q0), (p3 / (p0 + p3), &q3)]).unwrap();
        assert!(sub.distance(&mix) < 1e-13);

        let vn = FiniteOperationMeasure::von_neumann_discrete(3).unwrap();
        let psi = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.48), c(0.64, 0.0)]);
        let full = vn.subensemble_state(&["x0", "x1", "x2"], &DensityOperator::pure(&psi).unwrap()).unwrap();
        let decohered = CMatrix::from_diagonal(&psi.map(|z| c(z.norm_sqr(), 0.0)));
        assert!(max_abs(&(full.matrix() - decohered)) < 1e-15);

        let up = DensityOperator::pure(&CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])).unwrap();
        assert!(matches!(vn.subensemble_state(&["x1", "x2"], &up), Err(Error::ZeroProbabilitySet)));
    }

    #[test]
    fn effect_measure_examples() {
        let vn = FiniteOperationMeasure::von_neumann_discrete(3).unwrap();
        let eff = vn.effect_measure();
        for i in 0..3 {
            let f = eff.effect(&format!("x{i}")).unwrap();
            let mut p = CMatrix::zeros(3, 3);
            p[(i, i)] = c(1.0, 0.0);
            assert_eq!(f, &p);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let om = FiniteOperationMeasure::random(4, 3, 2, &mut rng);
            let eff = om.effect_measure();
            let rho = DensityOperator::random(4, &mut rng);
            for a in om.outcomes() {
                assert!((eff.probability(a, &rho).unwrap() - om.probability(a, &rho).unwrap()).abs() < 1e-12);
            }
        }
        let not_complete = vec![CMatrix::identity(2, 2), CMatrix::identity(2, 2)];
        assert!(EffectMeasure::new(vec!["a".into(), "b".into()], not_complete).is_err());
    }

    #[test]
    fn construction_rejects_incomplete_families() {
        let half = CMatrix::identity(2, 2) * c(0.5, 0.0);
        let err = FiniteOperationMeasure::new(2, vec![("a".into(), vec![half])]).unwrap_err();
        assert!(matches!(err, Error::CompletenessViolation(_)));
        assert!(FiniteOperationMeasure::von_neumann_discrete(1).is_err());
    }

    #[test]
    fn weak_repeatability_examples() {
        let vn = FiniteOperationMeasure::von_neumann_discrete(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let states: Vec<_> = (0..4).map(|_| DensityOperator::random(3, &mut rng)).collect();
        let report = vn.check_weak_repeatability(&states).unwrap();
        assert!(report.passed && report.max_violation < 1e-15);
        assert_eq!(report.pairs_checked, 4 * 64);

        let smeared = FiniteOperationMeasure::smeared(&[
            vec![0.8, 0.1, 0.0],
            vec![0.2, 0.8, 0.2],
            vec![0.0, 0.1, 0.8],
        ])
        .unwrap();
        let report = smeared.check_weak_repeatability(&states).unwrap();
        assert!(!report.passed && report.max_violation > 1e-3);

        // disjoint sets of orthogonal projectors give zero on both sides
        let rho = &states[0];
        let both = vn.apply_operator(&["x0"], &vn.apply(&["x1"], rho).unwrap()).unwrap();
        assert!(max_abs(&both) < 1e-16);
    }
}
