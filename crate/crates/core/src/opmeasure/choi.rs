//! Complete-positivity certification through the Choi matrix.

use num_complex::Complex64;

use super::{min_eigen, CMatrix, CVector, PSD_TOLERANCE};

/// A linear map on `d×d` operators, not assumed to be completely positive.
pub trait LinearMap {
    fn dim(&self) -> usize;
    fn apply(&self, x: &CMatrix) -> CMatrix;
}

/// `X ↦ Σ_k M_k X M_k†`.
#[derive(Debug, Clone, Copy)]
pub struct KrausMap<'a> {
    ops: &'a [CMatrix],
}

impl<'a> KrausMap<'a> {
    pub fn new(ops: &'a [CMatrix]) -> Self {
        assert!(!ops.is_empty(), "Kraus map needs at least one operator");
        Self { ops }
    }
}

impl LinearMap for KrausMap<'_> {
    fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    fn apply(&self, x: &CMatrix) -> CMatrix {
        self.ops.iter().fold(CMatrix::zeros(x.nrows(), x.ncols()), |acc, m| acc + m * x * m.adjoint())
    }
}

/// `X ↦ Xᵀ`: positive but not completely positive.
#[derive(Debug, Clone, Copy)]
pub struct TransposeMap {
    pub dim: usize,
}

impl LinearMap for TransposeMap {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &CMatrix) -> CMatrix {
        x.transpose()
    }
}

/// `Σ_{ij} |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`, indexed `(i·d + r, j·d + c)`.
pub fn choi_matrix(map: &dyn LinearMap) -> CMatrix {
    let d = map.dim();
    let mut choi = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut unit = CMatrix::zeros(d, d);
            unit[(i, j)] = Complex64::new(1.0, 0.0);
            let image = map.apply(&unit);
            choi.view_mut((i * d, j * d), (d, d)).copy_from(&image);
        }
    }
    choi
}

/// `Σ_{ij} ⟨ψ_i| Φ(|φ_i⟩⟨φ_j|) |ψ_j⟩`, non-negative for every family when
/// `Φ` is completely positive.
pub fn quadratic_form(map: &dyn LinearMap, phis: &[CVector], psis: &[CVector]) -> Complex64 {
    assert_eq!(phis.len(), psis.len(), "vector families must have equal length");
    let mut total = Complex64::new(0.0, 0.0);
    for (phi_i, psi_i) in phis.iter().zip(psis) {
        for (phi_j, psi_j) in phis.iter().zip(psis) {
            let image = map.apply(&(phi_i * phi_j.adjoint()));
            total += (psi_i.adjoint() * image * psi_j)[(0, 0)];
        }
    }
    total
}

/// Result of a Choi-spectrum test.
#[derive(Debug, Clone, PartialEq)]
pub struct CpCertificate {
    pub is_cp: bool,
    pub min_eigenvalue: f64,
    /// Eigenvector of the Choi matrix for `min_eigenvalue` when the test fails.
    pub witness: Option<CVector>,
    /// Outcome whose map was certified, when known.
    pub outcome: Option<String>,
}

impl CpCertificate {
    pub fn for_map(map: &dyn LinearMap) -> Self {
        let (min_eigenvalue, vec) = min_eigen(&choi_matrix(map));
        let is_cp = min_eigenvalue >= -PSD_TOLERANCE;
        Self { is_cp, min_eigenvalue, witness: (!is_cp).then_some(vec), outcome: None }
    }

    pub(crate) fn with_outcome(mut self, label: &str) -> Self {
        self.outcome = Some(label.to_string());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opmeasure::{random_vector, DensityOperator, FiniteOperationMeasure};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kraus_measures_are_cp() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let om = FiniteOperationMeasure::random(3, 2, 2, &mut rng);
            let cert = om.is_completely_positive();
            assert!(cert.is_cp && cert.witness.is_none());
        }
    }

    #[test]
    fn transpose_fails_with_witness() {
        let t = TransposeMap { dim: 2 };
        let cert = CpCertificate::for_map(&t);
        assert!(!cert.is_cp);
        assert!((cert.min_eigenvalue + 1.0).abs() < 1e-12);
        // the witness is the antisymmetric vector (|01⟩ − |10⟩)/√2
        let w = cert.witness.unwrap();
        let choi = choi_matrix(&t);
        let rayleigh = (w.adjoint() * &choi * &w)[(0, 0)].re;
        assert!((rayleigh + 1.0).abs() < 1e-12);
        assert!(w[0].norm() < 1e-12 && w[3].norm() < 1e-12);
        assert!((w[1] + w[2]).norm() < 1e-12);
    }

    #[test]
    fn transpose_is_positive_on_states() {
        let t = TransposeMap { dim: 2 };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let rho = DensityOperator::random(2, &mut rng);
            let (min, _) = min_eigen(&t.apply(rho.matrix()));
            assert!(min > -1e-14);
        }
    }

    #[test]
    fn quadratic_form_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let om = FiniteOperationMeasure::random(3, 2, 2, &mut rng);
        for _ in 0..30 {
            let phis: Vec<_> = (0..3).map(|_| random_vector(3, &mut rng)).collect();
            let psis: Vec<_> = (0..3).map(|_| random_vector(3, &mut rng)).collect();
            for a in om.outcomes() {
                let q = quadratic_form(&KrausMap::new(om.kraus(a).unwrap()), &phis, &psis);
                assert!(q.re >= -1e-12 && q.im.abs() < 1e-12);
            }
        }
        // transpose: φ = (e0, e1), ψ = (e1, e0) gives a negative value
        let e = |i: usize| {
            let mut v = CVector::zeros(2);
            v[i] = Complex64::new(1.0, 0.0);
            v
        };
        let q = quadratic_form(&TransposeMap { dim: 2 }, &[e(0), e(1)], &[e(1), -e(0)]);
        assert!(q.re < -0.5);
    }
}
