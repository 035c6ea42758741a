//! Effects, states, and the sequential product.
//!
//! An effect is a Hermitian matrix with spectrum in [0, 1]; a partial state
//! is a positive matrix with trace at most 1. The sequential product
//! `a ∘ b = a^{1/2} b a^{1/2}` represents measuring `b` directly after `a`,
//! and the same sandwich applied to a state is the update it undergoes when
//! `a` occurs.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numerics::{
    approx_equal, hermitian_eig, psd_sqrt, tolerance, Complex64, ComplexMatrix, ComplexVector,
};

/// Hermitian matrix with eigenvalues in [0, 1].
///
/// Validation tolerates eigenvalue excursions of at most `eig_clamp` beyond
/// either end; the stored matrix is kept bit-for-bit (after symmetrization)
/// and any excursion is clamped where it matters, inside [`Effect::sqrt`]
/// and the probability formulas. The square root is computed once on first
/// use and cached.
#[derive(Clone, Debug)]
pub struct Effect {
    matrix: ComplexMatrix,
    sqrt_cache: OnceLock<ComplexMatrix>,
}

impl Effect {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let tol = tolerance();
        let deviation = matrix.hermitian_deviation();
        if deviation > tol.atol * (1.0 + matrix.frobenius_norm()) {
            return Err(Error::NotHermitian { deviation });
        }
        let matrix = matrix.symmetrized();
        let eig = hermitian_eig(&matrix)?;
        for &lambda in &eig.eigenvalues {
            if lambda < -tol.eig_clamp || lambda > 1.0 + tol.eig_clamp {
                return Err(Error::NotEffect { eigenvalue: lambda });
            }
        }
        Ok(Effect { matrix, sqrt_cache: OnceLock::new() })
    }

    /// Wraps a matrix already known to be a valid effect, skipping the
    /// spectral check. For internal constructions whose validity is an
    /// algebraic identity (complements, convex combinations).
    pub(crate) fn from_valid(matrix: ComplexMatrix) -> Self {
        Effect { matrix, sqrt_cache: OnceLock::new() }
    }

    pub fn zero(dim: usize) -> Self {
        Effect::from_valid(ComplexMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Effect::from_valid(ComplexMatrix::identity(dim))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// The PSD square root `a^{1/2}`, cached after the first call.
    pub fn sqrt(&self) -> &ComplexMatrix {
        self.sqrt_cache
            .get_or_init(|| psd_sqrt(&self.matrix).expect("validated effect has a PSD matrix"))
    }

    /// Sequential product `a ∘ b = a^{1/2} b a^{1/2}`, the effect of
    /// observing `b` immediately after this effect occurred. Equivalently
    /// written `(b | a)`, `b` conditioned on `a`.
    pub fn seq_product(&self, b: &Effect) -> Result<Effect> {
        if self.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: b.dim() });
        }
        let root = self.sqrt();
        Effect::new(&(root * b.matrix()) * root)
    }

    /// Complement `a' = I − a`, computed entrywise so that no validation
    /// noise is introduced.
    pub fn complement(&self) -> Effect {
        Effect::from_valid(&ComplexMatrix::identity(self.dim()) - &self.matrix)
    }

    /// Whether the effect is a projection, `a² = a` within `atol`.
    pub fn is_sharp(&self) -> bool {
        approx_equal(&(&self.matrix * &self.matrix), &self.matrix)
            .expect("squaring preserves dimension")
    }

    pub fn approx_eq(&self, other: &Effect) -> Result<bool> {
        approx_equal(&self.matrix, &other.matrix)
    }
}

/// Positive matrix with trace at most 1; the trace is the probability that
/// the preparation it describes occurred at all.
#[derive(Clone, Debug)]
pub struct PartialState {
    matrix: ComplexMatrix,
    trace: f64,
}

impl PartialState {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let tol = tolerance();
        let deviation = matrix.hermitian_deviation();
        if deviation > tol.atol * (1.0 + matrix.frobenius_norm()) {
            return Err(Error::NotHermitian { deviation });
        }
        let matrix = matrix.symmetrized();
        let eig = hermitian_eig(&matrix)?;
        if let Some(&min) = eig.eigenvalues.first() {
            if min < -tol.eig_clamp {
                return Err(Error::NotPSD { min_eigenvalue: min });
            }
        }
        let trace = matrix.trace_re();
        if trace > 1.0 + tol.atol {
            return Err(Error::NotPartialState { trace });
        }
        Ok(PartialState { matrix, trace })
    }

    pub(crate) fn from_valid(matrix: ComplexMatrix) -> Self {
        let trace = matrix.trace_re();
        PartialState { matrix, trace }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    /// Probability `tr(ρ a)` that effect `a` occurs, clamped into [0, 1].
    pub fn probability(&self, a: &Effect) -> Result<f64> {
        if self.dim() != a.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: a.dim() });
        }
        let p = (&self.matrix * a.matrix()).trace_re();
        Ok(p.clamp(0.0, 1.0))
    }

    /// Post-measurement partial state `a^{1/2} ρ a^{1/2}` after `a` occurs;
    /// its trace is the probability of `a`.
    pub fn condition(&self, a: &Effect) -> Result<PartialState> {
        if self.dim() != a.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: a.dim() });
        }
        let root = a.sqrt();
        PartialState::new(&(root * &self.matrix) * root)
    }
}

/// Partial state with trace 1.
#[derive(Clone, Debug)]
pub struct State {
    inner: PartialState,
}

impl State {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let inner = PartialState::new(matrix)?;
        let trace = inner.trace();
        if (trace - 1.0).abs() > tolerance().atol {
            return Err(Error::NotState { trace });
        }
        Ok(State { inner })
    }

    pub(crate) fn from_valid(matrix: ComplexMatrix) -> Self {
        State { inner: PartialState::from_valid(matrix) }
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        State::from_valid(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.inner.matrix()
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }

    pub fn as_partial(&self) -> &PartialState {
        &self.inner
    }

    pub fn probability(&self, a: &Effect) -> Result<f64> {
        self.inner.probability(a)
    }

    pub fn condition(&self, a: &Effect) -> Result<PartialState> {
        self.inner.condition(a)
    }

    /// Conditional probability of `b` given that `a` occurred first:
    /// `tr(ρ (a ∘ b)) / tr(ρ a)`. Fails when `a` has numerically zero
    /// probability in `ρ`.
    pub fn conditional_probability(&self, b: &Effect, a: &Effect) -> Result<f64> {
        let p_a = self.probability(a)?;
        if p_a <= tolerance().atol {
            return Err(Error::ConditionOnNull { probability: p_a });
        }
        let joint = self.probability(&a.seq_product(b)?)?;
        Ok((joint / p_a).clamp(0.0, 1.0))
    }
}

/// Unit vector, stored exactly normalized.
#[derive(Clone, Debug)]
pub struct PureState {
    vector: ComplexVector,
}

impl PureState {
    /// Accepts a vector whose norm is within `atol` of 1 and rescales it to
    /// machine-precision unit norm.
    pub fn new(vector: ComplexVector) -> Result<Self> {
        let norm = vector.norm();
        if (norm - 1.0).abs() > tolerance().atol {
            return Err(Error::NotUnitVector { norm });
        }
        Ok(PureState { vector: vector.scale(Complex64::new(1.0 / norm, 0.0)) })
    }

    /// Normalizes any numerically nonzero vector.
    pub fn normalized(vector: ComplexVector) -> Result<Self> {
        Ok(PureState { vector: vector.normalized()? })
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.vector
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    /// Rank-one projection `|φ⟩⟨φ|` as an effect.
    pub fn projector(&self) -> Effect {
        Effect::from_valid(self.vector.outer(&self.vector))
    }

    /// The same projection as a density matrix.
    pub fn to_state(&self) -> State {
        State::from_valid(self.vector.outer(&self.vector))
    }

    /// Transition probability `|⟨φ, ψ⟩|²`.
    pub fn transition_probability(&self, other: &PureState) -> f64 {
        self.vector.inner(&other.vector).norm_sqr()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn basis_projector(dim: usize, i: usize) -> Effect {
        PureState::new(ComplexVector::basis(dim, i)).unwrap().projector()
    }

    fn plus_projector() -> Effect {
        let s = 1.0 / 2.0_f64.sqrt();
        PureState::new(ComplexVector::from_real(&[s, s])).unwrap().projector()
    }

    #[test]
    fn seq_product_of_orthogonal_axis_projectors() {
        let a = basis_projector(2, 0);
        let b = plus_projector();
        let ab = a.seq_product(&b).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 0.0]]).unwrap();
        assert!((ab.matrix() - &expected).frobenius_norm() < 1e-12);

        let ba = b.seq_product(&a).unwrap();
        let expected =
            ComplexMatrix::from_real_rows(&[&[0.25, 0.25], &[0.25, 0.25]]).unwrap();
        assert!((ba.matrix() - &expected).frobenius_norm() < 1e-12);
    }

    #[test]
    fn seq_product_with_identity_and_zero() {
        let b = plus_projector();
        let id = Effect::identity(2);
        let zero = Effect::zero(2);
        assert!(id.seq_product(&b).unwrap().approx_eq(&b).unwrap());
        assert!(b.seq_product(&id).unwrap().approx_eq(&b).unwrap());
        assert!(zero.seq_product(&b).unwrap().approx_eq(&zero).unwrap());
        assert!(b.seq_product(&zero).unwrap().approx_eq(&zero).unwrap());
    }

    #[test]
    fn seq_product_checks_dimensions() {
        let a = basis_projector(2, 0);
        let b = basis_projector(3, 0);
        assert!(matches!(a.seq_product(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn complement_swaps_diagonal_weights() {
        let a = Effect::new(ComplexMatrix::diag_real(&[0.3, 0.7])).unwrap();
        let expected = ComplexMatrix::diag_real(&[0.7, 0.3]);
        assert!(approx_equal(a.complement().matrix(), &expected).unwrap());
        assert!(Effect::zero(2)
            .complement()
            .approx_eq(&Effect::identity(2))
            .unwrap());
        assert!(Effect::identity(2).complement().approx_eq(&Effect::zero(2)).unwrap());
    }

    #[test]
    fn complement_is_involutive() {
        // Dyadic entries make the float subtractions exact, so the round
        // trip is bit-for-bit.
        let a = Effect::new(
            ComplexMatrix::from_rows(&[
                vec![c(0.25, 0.0), c(0.125, 0.0625)],
                vec![c(0.125, -0.0625), c(0.75, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        assert_eq!(a.complement().complement().matrix(), a.matrix());
    }

    #[test]
    fn effect_rejects_out_of_range_spectrum() {
        assert!(matches!(
            Effect::new(ComplexMatrix::diag_real(&[1.5, 0.0])),
            Err(Error::NotEffect { .. })
        ));
        assert!(matches!(
            Effect::new(ComplexMatrix::diag_real(&[-0.2, 0.5])),
            Err(Error::NotEffect { .. })
        ));
        let skew = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(Effect::new(skew), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn effect_tolerates_clamp_scale_excursions() {
        let eps = tolerance().eig_clamp * 0.5;
        let a = Effect::new(ComplexMatrix::diag_real(&[-eps, 1.0 + eps])).unwrap();
        // The square root clamps the stray negative to zero.
        let root = a.sqrt();
        assert!(root[(0, 0)].re >= 0.0);
    }

    #[test]
    fn sharpness_detects_projections() {
        assert!(basis_projector(2, 0).is_sharp());
        assert!(plus_projector().is_sharp());
        assert!(Effect::identity(3).is_sharp());
        assert!(Effect::zero(3).is_sharp());
        let fuzzy = Effect::new(ComplexMatrix::diag_real(&[0.5, 1.0])).unwrap();
        assert!(!fuzzy.is_sharp());
    }

    #[test]
    fn state_probability_and_conditioning() {
        let rho = State::maximally_mixed(2);
        let a = basis_projector(2, 0);
        assert!((rho.probability(&a).unwrap() - 0.5).abs() < 1e-12);

        let conditioned = rho.condition(&a).unwrap();
        assert!((conditioned.trace() - 0.5).abs() < 1e-12);
        let expected = ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 0.0]]).unwrap();
        assert!((conditioned.matrix() - &expected).frobenius_norm() < 1e-12);
    }

    #[test]
    fn conditional_probability_of_plus_after_axis() {
        let rho = State::maximally_mixed(2);
        let a = basis_projector(2, 0);
        let b = plus_projector();
        let p = rho.conditional_probability(&b, &a).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn conditional_probability_rejects_null_condition() {
        let rho = PureState::new(ComplexVector::basis(2, 0)).unwrap().to_state();
        let a = basis_projector(2, 1);
        let b = plus_projector();
        assert!(matches!(
            rho.conditional_probability(&b, &a),
            Err(Error::ConditionOnNull { .. })
        ));
    }

    #[test]
    fn partial_state_validation() {
        assert!(matches!(
            PartialState::new(ComplexMatrix::diag_real(&[0.9, 0.3])),
            Err(Error::NotPartialState { .. })
        ));
        assert!(matches!(
            PartialState::new(ComplexMatrix::diag_real(&[-0.1, 0.5])),
            Err(Error::NotPSD { .. })
        ));
        assert!(matches!(
            State::new(ComplexMatrix::diag_real(&[0.5, 0.3])),
            Err(Error::NotState { .. })
        ));
    }

    #[test]
    fn pure_state_normalization_rules() {
        let near = ComplexVector::from_real(&[1.0 + 1e-12, 0.0]);
        let phi = PureState::new(near).unwrap();
        assert!((phi.vector().norm() - 1.0).abs() < 1e-15);

        let off = ComplexVector::from_real(&[2.0, 0.0]);
        assert!(matches!(PureState::new(off.clone()), Err(Error::NotUnitVector { .. })));
        let renorm = PureState::normalized(off).unwrap();
        assert!((renorm.vector().norm() - 1.0).abs() < 1e-15);
        assert!(matches!(
            PureState::normalized(ComplexVector::from_real(&[0.0, 0.0])),
            Err(Error::ZeroVector { .. })
        ));
    }

    #[test]
    fn transition_probability_between_bases() {
        let phi = PureState::new(ComplexVector::basis(2, 0)).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        let psi = PureState::new(ComplexVector::from_real(&[s, s])).unwrap();
        assert!((phi.transition_probability(&psi) - 0.5).abs() < 1e-12);
        assert!((phi.transition_probability(&phi) - 1.0).abs() < 1e-12);
    }
}
