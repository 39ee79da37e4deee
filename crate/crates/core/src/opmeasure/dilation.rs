//! Probe realizations of finite operation measures.
//!
//! The object space is tensored with a probe space spanned by `|a,k⟩`, one
//! slot per (outcome, Kraus index). Tensor index of `|i⟩⊗|a,k⟩` is
//! `i·P + a·r + k`, where `P = K·r` and `r` is the largest Kraus rank.

use num_complex::Complex64;

use super::{max_abs, CMatrix, CVector, DensityOperator, FiniteOperationMeasure, ZERO_PROBABILITY};
use crate::error::{Error, Result};

/// Probe preparation, unitary coupling and probe observable reproducing an
/// operation measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    dim: usize,
    probe_dim: usize,
    probe_state: CVector,
    unitary: CMatrix,
    labels: Vec<String>,
    projectors: Vec<CMatrix>,
}

/// Outcome probabilities and posteriors read off a realization.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationStatistics {
    pub probabilities: Vec<f64>,
    /// `None` for outcomes with zero probability.
    pub posteriors: Vec<Option<DensityOperator>>,
}

impl Realization {
    pub(crate) fn from_measure(om: &FiniteOperationMeasure) -> Result<Self> {
        let d = om.dim();
        let r = om.max_rank();
        let k = om.outcomes().len();
        let probe_dim = k * r;
        let n = d * probe_dim;

        for (label, ops) in om.outcomes().iter().zip(&om.kraus) {
            if ops.iter().all(|m| max_abs(m) == 0.0) {
                return Err(Error::DegenerateKraus(label.clone()));
            }
        }

        // isometry columns V e_i = Σ_{a,k} (M_{a,k} e_i) ⊗ |a,k⟩
        let mut columns: Vec<Option<CVector>> = vec![None; n];
        for i in 0..d {
            let mut v = CVector::zeros(n);
            for (a, ops) in om.kraus.iter().enumerate() {
                for (kk, m) in ops.iter().enumerate() {
                    for j in 0..d {
                        v[j * probe_dim + a * r + kk] = m[(j, i)];
                    }
                }
            }
            columns[i * probe_dim] = Some(v);
        }
        let mut basis: Vec<CVector> = columns.iter().flatten().cloned().collect();
        for slot in columns.iter_mut().filter(|c| c.is_none()) {
            let next = complete_one(&basis, n);
            basis.push(next.clone());
            *slot = Some(next);
        }
        let cols: Vec<CVector> = columns.into_iter().map(|c| c.expect("every column filled")).collect();
        let unitary = CMatrix::from_columns(&cols);

        let mut probe_state = CVector::zeros(probe_dim);
        probe_state[0] = Complex64::new(1.0, 0.0);
        let projectors = (0..k)
            .map(|a| {
                let mut p = CMatrix::zeros(probe_dim, probe_dim);
                for kk in 0..r {
                    p[(a * r + kk, a * r + kk)] = Complex64::new(1.0, 0.0);
                }
                p
            })
            .collect();
        Ok(Self { dim: d, probe_dim, probe_state, unitary, labels: om.outcomes().to_vec(), projectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn probe_dim(&self) -> usize {
        self.probe_dim
    }

    pub fn probe_state(&self) -> &CVector {
        &self.probe_state
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Probe projector `Π_a` for each outcome, in outcome order.
    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    /// `‖U†U − 1‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.unitary.nrows();
        max_abs(&(self.unitary.adjoint() * &self.unitary - CMatrix::identity(n, n)))
    }

    /// `U(ψ⊗φ)`.
    pub fn output_state(&self, psi: &CVector) -> Result<CVector> {
        if psi.len() != self.dim {
            return Err(Error::Domain(format!("input has dimension {}, expected {}", psi.len(), self.dim)));
        }
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NormalizationViolation(norm * norm));
        }
        Ok(&self.unitary * psi.kronecker(&self.probe_state))
    }

    /// `⟨Ω|(|j⟩⟨i| ⊗ Π_a)|Ω⟩`: unnormalised object state after outcome `a`.
    fn conditioned(&self, omega: &CVector, a: usize) -> CMatrix {
        let p = self.probe_dim;
        let proj = &self.projectors[a];
        CMatrix::from_fn(self.dim, self.dim, |i, j| {
            let mut s = Complex64::new(0.0, 0.0);
            for q in 0..p {
                for r in 0..p {
                    let pi = proj[(q, r)];
                    if pi != Complex64::new(0.0, 0.0) {
                        s += omega[i * p + r] * pi * omega[j * p + q].conj();
                    }
                }
            }
            s
        })
    }

    /// Probabilities `⟨Ω|1⊗Π_a|Ω⟩` and partial-trace posteriors.
    pub fn statistics(&self, psi: &CVector) -> Result<RealizationStatistics> {
        let omega = self.output_state(psi)?;
        let mut probabilities = Vec::with_capacity(self.labels.len());
        let mut posteriors = Vec::with_capacity(self.labels.len());
        for a in 0..self.labels.len() {
            let m = self.conditioned(&omega, a);
            let pr = m.trace().re;
            probabilities.push(pr);
            posteriors.push((pr > ZERO_PROBABILITY).then(|| DensityOperator::from_unnormalized(m)));
        }
        Ok(RealizationStatistics { probabilities, posteriors })
    }

    /// Posterior for one outcome.
    pub fn posterior(&self, label: &str, psi: &CVector) -> Result<DensityOperator> {
        let a = self.labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownOutcome(label.into()))?;
        self.statistics(psi)?.posteriors.swap_remove(a).ok_or_else(|| Error::ZeroProbabilityOutcome(label.into()))
    }

    /// `P(X = b_j, A = a)` for a second observer reading the object in the
    /// orthonormal basis `basis` after the probe reads `a`; rows indexed by `j`.
    pub fn joint_distribution(&self, psi: &CVector, basis: &[CVector]) -> Result<Vec<Vec<f64>>> {
        let omega = self.output_state(psi)?;
        let conditioned: Vec<CMatrix> = (0..self.labels.len()).map(|a| self.conditioned(&omega, a)).collect();
        Ok(basis
            .iter()
            .map(|b| conditioned.iter().map(|m| (b.adjoint() * m * b)[(0, 0)].re).collect())
            .collect())
    }

    /// Largest discrepancy in probability or posterior between the
    /// realization and `om`, over basis vectors and their pairwise
    /// superpositions.
    pub fn round_trip_residual(&self, om: &FiniteOperationMeasure) -> Result<f64> {
        let d = self.dim;
        let e = |i: usize| {
            let mut v = CVector::zeros(d);
            v[i] = Complex64::new(1.0, 0.0);
            v
        };
        let mut inputs: Vec<CVector> = (0..d).map(e).collect();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..d {
            for j in i + 1..d {
                inputs.push((e(i) + e(j)) * Complex64::new(h, 0.0));
                inputs.push((e(i) + e(j) * Complex64::new(0.0, 1.0)) * Complex64::new(h, 0.0));
            }
        }
        let mut worst: f64 = 0.0;
        for psi in &inputs {
            let stats = self.statistics(psi)?;
            let rho = DensityOperator::pure(psi)?;
            for (a, label) in om.outcomes().iter().enumerate() {
                let p = om.probability(label, &rho)?;
                worst = worst.max((p - stats.probabilities[a]).abs());
                if let Some(post) = &stats.posteriors[a] {
                    if p > 1e-6 {
                        worst = worst.max(post.distance(&om.posterior(label, &rho)?));
                    }
                }
            }
        }
        Ok(worst)
    }
}

/// Next orthonormal vector extending `basis`: the standard basis vector with
/// the largest residual (lowest index on ties), orthogonalised twice.
fn complete_one(basis: &[CVector], n: usize) -> CVector {
    let residual = |mut v: CVector| {
        for _ in 0..2 {
            for b in basis {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        v
    };
    let mut best: Option<CVector> = None;
    let mut best_norm = -1.0;
    for i in 0..n {
        let mut e = CVector::zeros(n);
        e[i] = Complex64::new(1.0, 0.0);
        let r = residual(e);
        let norm = r.norm();
        if norm > best_norm + 1e-12 {
            best_norm = norm;
            best = Some(r);
        }
    }
    let r = best.expect("n > 0");
    let r = r.unscale(best_norm);
    // one more pass after normalising guards against cancellation
    let r = residual(r);
    let norm = r.norm();
    r.unscale(norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opmeasure::random_vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_measure_has_trivial_dilation() {
        let om = FiniteOperationMeasure::new(3, vec![("all".into(), vec![CMatrix::identity(3, 3)])]).unwrap();
        let r = om.dilate().unwrap();
        assert_eq!(r.probe_dim(), 1);
        assert_eq!(r.unitary(), &CMatrix::identity(3, 3));
    }

    #[test]
    fn discrete_von_neumann_dilation() {
        let om = FiniteOperationMeasure::von_neumann_discrete(2).unwrap();
        let r = om.dilate().unwrap();
        assert_eq!(r.probe_dim(), 2);
        assert!(r.unitarity_defect() < 1e-14);
        // U|ψ⊗φ0⟩ = Σ c_k |x_k⟩⊗|φ_k⟩
        let psi = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let omega = r.output_state(&psi).unwrap();
        let expected = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.8)]);
        assert!((omega - expected).norm() < 1e-15);
        let stats = r.statistics(&psi).unwrap();
        assert!((stats.probabilities[0] - 0.36).abs() < 1e-15 && (stats.probabilities[1] - 0.64).abs() < 1e-15);
    }

    #[test]
    fn random_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let om = FiniteOperationMeasure::random(3, 3, 2, &mut rng);
        let r = om.dilate().unwrap();
        assert_eq!(r.probe_dim(), 6);
        assert!(r.unitarity_defect() < 1e-12);
        assert!(r.round_trip_residual(&om).unwrap() < 1e-12);
        let psi = random_vector(3, &mut rng);
        let stats = r.statistics(&psi).unwrap();
        assert!((stats.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_posteriors_are_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let om = FiniteOperationMeasure::random(4, 3, 1, &mut rng);
        let r = om.dilate().unwrap();
        let psi = random_vector(4, &mut rng);
        for post in r.statistics(&psi).unwrap().posteriors.into_iter().flatten() {
            assert!((post.purity() - 1.0).abs() < 1e-12);
            let eig = post.matrix().clone().symmetric_eigen();
            let nonzero = eig.eigenvalues.iter().filter(|l| l.abs() > 1e-10).count();
            assert_eq!(nonzero, 1);
        }
    }

    #[test]
    fn degenerate_family_rejected() {
        let zero = CMatrix::zeros(2, 2);
        let om = FiniteOperationMeasure::new(
            2,
            vec![("one".into(), vec![CMatrix::identity(2, 2)]), ("none".into(), vec![zero])],
        )
        .unwrap();
        assert!(matches!(om.dilate(), Err(Error::DegenerateKraus(l)) if l == "none"));
    }
}
