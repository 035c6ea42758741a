//! Complements of n-outcome observables.
//!
//! For an observable with n ≥ 2 nonzero effects, the complement swaps each
//! effect `a_x` for `(I − a_x)/(n−1)`, the uniform redistribution of "not
//! x". Iterating the complement contracts toward the uniform observable
//! `I_A` along an affine path with an explicit closed form, except in the
//! dichotomic case, where it is an involution.

use crate::effects::Effect;
use crate::error::{Error, Result};
use crate::numerics::{tolerance, ComplexMatrix};
use crate::observables::{mixture, ClassicalChannel, Observable, Outcome};

/// Observable with at least two outcomes and no numerically zero effect,
/// the domain on which complementation is defined.
#[derive(Clone, Debug)]
pub struct NObservable {
    obs: Observable,
}

impl NObservable {
    pub fn new(obs: Observable) -> Result<Self> {
        if obs.outcome_count() < 2 {
            return Err(Error::TooFewOutcomes { got: obs.outcome_count() });
        }
        let atol = tolerance().atol;
        for (outcome, effect) in obs.entries() {
            if effect.matrix().frobenius_norm() <= atol {
                return Err(Error::ZeroEffect { label: outcome.label.clone() });
            }
        }
        Ok(NObservable { obs })
    }

    pub fn as_observable(&self) -> &Observable {
        &self.obs
    }

    pub fn into_observable(self) -> Observable {
        self.obs
    }

    pub fn n(&self) -> usize {
        self.obs.outcome_count()
    }

    pub fn dim(&self) -> usize {
        self.obs.dim()
    }

    /// The uniform observable `I_A = {I/n}` on the same outcome list.
    pub fn uniform(&self) -> NObservable {
        let share = ComplexMatrix::identity(self.dim()).scale(1.0 / self.n() as f64);
        let entries = self
            .obs
            .outcomes()
            .map(|o| (o.clone(), Effect::from_valid(share.clone())))
            .collect();
        NObservable {
            obs: Observable::new(entries).expect("uniform effects form a resolution"),
        }
    }

    /// `λ I_A + (1−λ) A`: the observable degraded by noise content `λ`.
    pub fn add_noise(&self, lambda: f64) -> Result<NObservable> {
        let mixed = mixture(
            &[lambda, 1.0 - lambda],
            &[self.uniform().into_observable(), self.obs.clone()],
        )?;
        NObservable::new(mixed)
    }

    /// The complement `A' = {(I − a_x)/(n−1)}`.
    pub fn complement(&self) -> Result<NObservable> {
        let n = self.n();
        let scale = 1.0 / (n as f64 - 1.0);
        let identity = ComplexMatrix::identity(self.dim());
        let atol = tolerance().atol;
        let mut entries = Vec::with_capacity(n);
        for (outcome, effect) in self.obs.entries() {
            let flipped = (&identity - effect.matrix()).scale(scale);
            if flipped.frobenius_norm() <= atol {
                return Err(Error::DegenerateComplement { label: outcome.label.clone() });
            }
            entries.push((outcome.clone(), Effect::from_valid(flipped)));
        }
        Ok(NObservable {
            obs: Observable::new(entries).expect("complement effects form a resolution"),
        })
    }

    /// Applies [`NObservable::complement`] `m` times; `m = 0` returns the
    /// observable unchanged.
    pub fn iterate_complement(&self, m: u32) -> Result<NObservable> {
        let mut current = self.clone();
        for _ in 0..m {
            current = current.complement()?;
        }
        Ok(current)
    }

    /// The m-th complement in closed form:
    /// `[1 − (n−1)^{−m}] I_A + (n−1)^{−m} A` for even `m`, and the same
    /// with `A'` and exponent `m−1` for odd `m`. Computed directly rather
    /// than by iterating, so the two routes cross-check each other.
    pub fn closed_form_complement(&self, m: u32) -> Result<NObservable> {
        let base = (self.n() - 1) as f64;
        let (coefficient, tail) = if m.is_multiple_of(2) {
            (base.powi(-(m as i32)), self.obs.clone())
        } else {
            (base.powi(-(m as i32 - 1)), self.complement()?.into_observable())
        };
        let mixed = mixture(
            &[1.0 - coefficient, coefficient],
            &[self.uniform().into_observable(), tail],
        )?;
        NObservable::new(mixed)
    }
}

/// The channel implementing complementation classically: zero diagonal,
/// `1/(n−1)` everywhere else, on the given outcome list.
pub fn complement_channel(outcomes: &[Outcome]) -> Result<ClassicalChannel> {
    let n = outcomes.len();
    if n < 2 {
        return Err(Error::TooFewOutcomes { got: n });
    }
    let share = 1.0 / (n as f64 - 1.0);
    let probs = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { share }).collect())
        .collect();
    ClassicalChannel::new(
        outcomes.iter().map(|o| o.label.clone()).collect(),
        outcomes.to_vec(),
        probs,
    )
}
