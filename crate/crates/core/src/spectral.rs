//! Spectral observables and operator-level conditioning.
//!
//! A self-adjoint operator `T` determines a unique sharp observable whose
//! effects are the projections onto its eigenspaces and whose outcome
//! values are the distinct eigenvalues, so `Σ x P_x` rebuilds `T`.
//! Conditioning one operator on another pinches it by the second
//! operator's eigenspaces: `(T|S) = Σ_y Q_y T Q_y`. The pinching fixes `T`
//! exactly when the two operators commute, and it depends only on the
//! eigenspaces of `S`, not on the eigenvalues attached to them.
//!
//! Floating point forces one rule the exact theory never needs: eigenvalues
//! closer than `cluster_tol` are merged into a single outcome with a
//! higher-rank projection. `(T|S)` is therefore stable under perturbations
//! of `S` smaller than `cluster_tol` but discontinuous where a perturbation
//! splits or merges a cluster.

use crate::effects::Effect;
use crate::error::{Error, Result};
use crate::numerics::{spectral_projections, tolerance, ComplexMatrix};
use crate::observables::{Observable, Outcome};

/// Hermitian matrix, symmetrized on construction.
#[derive(Clone, Debug)]
pub struct SelfAdjointOperator {
    matrix: ComplexMatrix,
}

impl SelfAdjointOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.hermitian_deviation();
        if deviation > tolerance().atol * (1.0 + matrix.frobenius_norm()) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(SelfAdjointOperator { matrix: matrix.symmetrized() })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// The sharp observable `{(x, P_x)}` over the distinct eigenvalues of
    /// this operator, clustered at `cluster_tol`.
    pub fn spectral_observable(&self) -> Result<SpectralObservable> {
        let parts = spectral_projections(&self.matrix, tolerance().cluster_tol)?;
        let mut entries = Vec::with_capacity(parts.len());
        for (k, (value, projection)) in parts.into_iter().enumerate() {
            let outcome = Outcome::with_value(format!("e{}", k + 1), value);
            entries.push((outcome, Effect::new(projection)?));
        }
        Ok(SpectralObservable { observable: Observable::new(entries)? })
    }

    /// `(T|S) = Σ_y Q_y T Q_y`, the pinching of `self` by the eigenspace
    /// projections of `s`.
    pub fn condition_on(&self, s: &SelfAdjointOperator) -> Result<SelfAdjointOperator> {
        if s.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: s.dim() });
        }
        let projections = spectral_projections(&s.matrix, tolerance().cluster_tol)?;
        let mut sum = ComplexMatrix::zeros(self.dim());
        for (_, q) in &projections {
            sum = &sum + &(&(q * &self.matrix) * q);
        }
        Ok(SelfAdjointOperator { matrix: sum.symmetrized() })
    }

    /// Whether `‖TS − ST‖_F ≤ atol·(1 + ‖T‖_F·‖S‖_F)`.
    pub fn commutes_with(&self, other: &SelfAdjointOperator) -> Result<bool> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let commutator =
            &(&self.matrix * &other.matrix) - &(&other.matrix * &self.matrix);
        let scale = 1.0 + self.matrix.frobenius_norm() * other.matrix.frobenius_norm();
        Ok(commutator.frobenius_norm() <= tolerance().atol * scale)
    }
}

/// Sharp observable carrying the distinct eigenvalues of a self-adjoint
/// operator: idempotent, pairwise-orthogonal effects with `Σ x P_x`
/// reconstructing the operator.
#[derive(Clone, Debug)]
pub struct SpectralObservable {
    observable: Observable,
}

impl SpectralObservable {
    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn into_observable(self) -> Observable {
        self.observable
    }

    pub fn dim(&self) -> usize {
        self.observable.dim()
    }

    /// `Σ x P_x` over the outcome values.
    pub fn operator(&self) -> ComplexMatrix {
        self.observable.operator().expect("spectral outcomes carry eigenvalue values")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{approx_equal, hermitian_eig, Complex64};

    fn op(matrix: ComplexMatrix) -> SelfAdjointOperator {
        SelfAdjointOperator::new(matrix).unwrap()
    }

    fn pauli_x() -> SelfAdjointOperator {
        op(ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap())
    }

    fn sample_hermitian() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4);
        let entries = [
            (0, 0, 1.5, 0.0),
            (1, 1, -0.25, 0.0),
            (2, 2, 0.75, 0.0),
            (3, 3, 2.0, 0.0),
            (0, 1, 0.3, -0.4),
            (0, 2, -0.1, 0.2),
            (0, 3, 0.05, 0.0),
            (1, 2, 0.6, 0.1),
            (1, 3, -0.2, 0.3),
            (2, 3, 0.4, -0.5),
        ];
        for &(i, j, re, im) in &entries {
            m[(i, j)] = Complex64::new(re, im);
            if i != j {
                m[(j, i)] = Complex64::new(re, -im);
            }
        }
        m
    }

    fn from_eigenbasis(basis: &ComplexMatrix, values: &[f64]) -> ComplexMatrix {
        let eig = hermitian_eig(basis).unwrap();
        let mut m = ComplexMatrix::zeros(basis.dim());
        for (k, &v) in values.iter().enumerate() {
            let vec = eig.eigenvector(k);
            m = &m + &vec.outer(&vec).scale(v);
        }
        m.symmetrized()
    }

    #[test]
    fn identity_has_a_single_spectral_outcome() {
        let t = op(ComplexMatrix::identity(3));
        let p = t.spectral_observable().unwrap();
        assert_eq!(p.observable().outcome_count(), 1);
        let (outcome, effect) = &p.observable().entries()[0];
        assert!((outcome.value.unwrap() - 1.0).abs() < 1e-14);
        assert!((effect.matrix() - &ComplexMatrix::identity(3)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn repeated_diagonal_entries_cluster() {
        let t = op(ComplexMatrix::diag_real(&[2.0, 2.0, 5.0]));
        let p = t.spectral_observable().unwrap();
        assert_eq!(p.observable().outcome_count(), 2);
        let entries = p.observable().entries();
        assert!((entries[0].0.value.unwrap() - 2.0).abs() < 1e-12);
        let expected = ComplexMatrix::diag_real(&[1.0, 1.0, 0.0]);
        assert!((entries[0].1.matrix() - &expected).frobenius_norm() < 1e-12);
        assert!((entries[1].0.value.unwrap() - 5.0).abs() < 1e-12);
        let expected = ComplexMatrix::diag_real(&[0.0, 0.0, 1.0]);
        assert!((entries[1].1.matrix() - &expected).frobenius_norm() < 1e-12);
    }

    #[test]
    fn spectral_observable_reconstructs_its_operator() {
        let t = op(sample_hermitian());
        let p = t.spectral_observable().unwrap();
        assert!(p.observable().is_sharp());
        assert!((&p.operator() - t.matrix()).frobenius_norm() < 1e-9);
    }

    #[test]
    fn conditioning_on_the_identity_changes_nothing() {
        let t = op(sample_hermitian());
        let s = op(ComplexMatrix::identity(4));
        let pinched = t.condition_on(&s).unwrap();
        assert!(approx_equal(pinched.matrix(), t.matrix()).unwrap());
    }

    #[test]
    fn pinching_by_pauli_x_kills_the_traceless_diagonal_part() {
        let t = op(ComplexMatrix::diag_real(&[1.0, 2.0]));
        let pinched = t.condition_on(&pauli_x()).unwrap();
        let expected = ComplexMatrix::identity(2).scale(1.5);
        assert!((pinched.matrix() - &expected).frobenius_norm() < 1e-12);
    }

    #[test]
    fn nondegenerate_pinching_is_the_diagonal_expectation_sum() {
        let t = op(sample_hermitian());
        let s_matrix = from_eigenbasis(&sample_hermitian(), &[-1.0, 0.5, 2.0, 3.25]);
        let s = op(s_matrix.clone());
        let pinched = t.condition_on(&s).unwrap();

        let eig = hermitian_eig(&s_matrix).unwrap();
        let mut expected = ComplexMatrix::zeros(4);
        for k in 0..4 {
            let psi = eig.eigenvector(k);
            let weight = psi.inner(&t.matrix().matvec(&psi)).re;
            expected = &expected + &psi.outer(&psi).scale(weight);
        }
        assert!((pinched.matrix() - &expected).frobenius_norm() < 1e-10);
    }

    #[test]
    fn pinching_preserves_the_trace() {
        let t = op(sample_hermitian());
        let s = pauli_x();
        let s4 = op(from_eigenbasis(&sample_hermitian(), &[1.0, 1.0, -2.0, 0.5]));
        let pinched = t.condition_on(&s4).unwrap();
        assert!((pinched.matrix().trace_re() - t.matrix().trace_re()).abs() < 1e-10);
        let t2 = op(ComplexMatrix::diag_real(&[1.0, 2.0]));
        let pinched = t2.condition_on(&s).unwrap();
        assert!((pinched.matrix().trace_re() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn commutation_detection() {
        let t = op(ComplexMatrix::diag_real(&[1.0, 2.0]));
        assert!(t.commutes_with(&t).unwrap());
        assert!(!t.commutes_with(&pauli_x()).unwrap());

        let base = sample_hermitian();
        let a = op(from_eigenbasis(&base, &[1.0, 2.0, 3.0, 4.0]));
        let b = op(from_eigenbasis(&base, &[5.0, -1.0, 2.0, 0.0]));
        assert!(a.commutes_with(&b).unwrap());
        let pinched = a.condition_on(&b).unwrap();
        assert!((pinched.matrix() - a.matrix()).frobenius_norm() < 1e-9);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let t = op(ComplexMatrix::identity(2));
        let s = op(ComplexMatrix::identity(3));
        assert!(matches!(
            t.condition_on(&s),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
        assert!(matches!(
            t.commutes_with(&s),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn operator_conditioning_matches_observable_conditioning() {
        let t = op(sample_hermitian());
        let s = op(from_eigenbasis(&sample_hermitian(), &[-0.5, 0.25, 1.0, 2.0]));
        let direct = t.condition_on(&s).unwrap();
        let p = t.spectral_observable().unwrap().into_observable();
        let q = s.spectral_observable().unwrap().into_observable();
        let conditioned = p.conditioned_on(&q).unwrap();
        let via_observables = conditioned.operator().unwrap();
        assert!((direct.matrix() - &via_observables).frobenius_norm() < 1e-9);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            SelfAdjointOperator::new(m),
            Err(Error::NotHermitian { .. })
        ));
    }
}
