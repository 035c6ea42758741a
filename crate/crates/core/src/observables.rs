//! Finite-outcome observables and their calculus.
//!
//! An observable is an ordered family of effects summing to the identity,
//! each tagged with an outcome label and optionally a real value. Measuring
//! `A` and then `B` yields the product observable `A ∘ B` on the pair
//! outcome space; summing its columns gives `B` conditioned on `A`. A
//! classical channel post-processes outcomes without touching the quantum
//! side, and the observable operator `Â = Σ x a_x` condenses a real-valued
//! observable into a single Hermitian matrix.

use crate::effects::{Effect, State};
use crate::error::{Error, Result};
use crate::numerics::{tolerance, ComplexMatrix};

/// Measurement outcome: a label unique within its observable, plus an
/// optional real value for when the outcome space lives in ℝ.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub value: Option<f64>,
}

impl Outcome {
    pub fn labeled(label: impl Into<String>) -> Self {
        Outcome { label: label.into(), value: None }
    }

    pub fn with_value(label: impl Into<String>, value: f64) -> Self {
        Outcome { label: label.into(), value: Some(value) }
    }
}

fn check_unique_labels<'a>(labels: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for label in labels {
        if seen.contains(&label) {
            return Err(Error::DuplicateLabel { label: label.to_string() });
        }
        seen.push(label);
    }
    Ok(())
}

fn check_resolution(effects: impl Iterator<Item = ComplexMatrix>, dim: usize) -> Result<()> {
    let mut sum = ComplexMatrix::zeros(dim);
    for m in effects {
        sum = &sum + &m;
    }
    let deviation = (&sum - &ComplexMatrix::identity(dim)).frobenius_norm();
    if deviation > tolerance().atol * dim as f64 {
        return Err(Error::NotResolution { deviation });
    }
    Ok(())
}

/// Finite observable: labeled effects that sum to the identity.
#[derive(Clone, Debug)]
pub struct Observable {
    dim: usize,
    entries: Vec<(Outcome, Effect)>,
    sharp: bool,
    atomic: bool,
}

impl Observable {
    pub fn new(entries: Vec<(Outcome, Effect)>) -> Result<Self> {
        let Some(dim) = entries.first().map(|(_, e)| e.dim()) else {
            return Err(Error::EmptyOutcomeSet);
        };
        for (_, effect) in &entries {
            if effect.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: effect.dim() });
            }
        }
        check_unique_labels(entries.iter().map(|(o, _)| o.label.as_str()))?;
        check_resolution(entries.iter().map(|(_, e)| e.matrix().clone()), dim)?;

        let sharp = entries.iter().all(|(_, e)| e.is_sharp());
        let atol = tolerance().atol;
        let atomic =
            sharp && entries.iter().all(|(_, e)| (e.matrix().trace_re() - 1.0).abs() <= atol);
        Ok(Observable { dim, entries, sharp, atomic })
    }

    /// The trivial observable `{I}` with a single outcome.
    pub fn trivial(dim: usize, outcome: Outcome) -> Self {
        Observable {
            dim,
            entries: vec![(outcome, Effect::identity(dim))],
            sharp: true,
            atomic: dim == 1,
        }
    }

    /// Two-outcome observable `{a, a'}`.
    pub fn dichotomic(a: Effect, yes: Outcome, no: Outcome) -> Result<Self> {
        let complement = a.complement();
        Observable::new(vec![(yes, a), (no, complement)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcome_count(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(Outcome, Effect)] {
        &self.entries
    }

    pub fn outcome(&self, i: usize) -> &Outcome {
        &self.entries[i].0
    }

    pub fn effect(&self, i: usize) -> &Effect {
        &self.entries[i].1
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &Outcome> {
        self.entries.iter().map(|(o, _)| o)
    }

    pub fn effects(&self) -> impl Iterator<Item = &Effect> {
        self.entries.iter().map(|(_, e)| e)
    }

    /// All outcome values, failing on the first outcome without one.
    pub fn values(&self) -> Result<Vec<f64>> {
        self.entries
            .iter()
            .map(|(o, _)| {
                o.value.ok_or_else(|| Error::MissingOutcomeValues { label: o.label.clone() })
            })
            .collect()
    }

    /// Whether every effect is a projection.
    pub fn is_sharp(&self) -> bool {
        self.sharp
    }

    /// Whether every effect is a rank-one projection.
    pub fn is_atomic(&self) -> bool {
        self.atomic
    }

    /// Whether both observables list the same outcomes in the same order,
    /// labels and values alike.
    pub fn same_outcomes(&self, other: &Observable) -> bool {
        self.outcome_count() == other.outcome_count()
            && self.outcomes().zip(other.outcomes()).all(|(a, b)| a == b)
    }

    /// Sequential product `A ∘ B`: measure `self`, then `other`, keeping
    /// both outcomes.
    pub fn seq_product(&self, other: &Observable) -> Result<PairObservable> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut effects = Vec::with_capacity(self.outcome_count() * other.outcome_count());
        for (_, a) in &self.entries {
            for (_, b) in &other.entries {
                effects.push(a.seq_product(b)?);
            }
        }
        PairObservable::new(
            self.outcomes().cloned().collect(),
            other.outcomes().cloned().collect(),
            effects,
        )
    }

    /// `self` conditioned on `a`: the observable `(B|A)` with effects
    /// `Σ_x a_x^{1/2} b_y a_x^{1/2}`, keeping `self`'s outcome space.
    pub fn conditioned_on(&self, a: &Observable) -> Result<Observable> {
        if self.dim != a.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: a.dim });
        }
        let mut entries = Vec::with_capacity(self.outcome_count());
        for (outcome, b) in &self.entries {
            let mut sum = ComplexMatrix::zeros(self.dim);
            for (_, ax) in &a.entries {
                let root = ax.sqrt();
                sum = &sum + &(&(root * b.matrix()) * root);
            }
            entries.push((outcome.clone(), Effect::new(sum)?));
        }
        Observable::new(entries)
    }

    /// State update when `self` is measured but the outcome is not read:
    /// `(ρ|A) = Σ_x a_x^{1/2} ρ a_x^{1/2}`.
    pub fn condition_state(&self, rho: &State) -> Result<State> {
        if self.dim != rho.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim, got: rho.dim() });
        }
        let mut sum = ComplexMatrix::zeros(self.dim);
        for (_, ax) in &self.entries {
            let root = ax.sqrt();
            sum = &sum + &(&(root * rho.matrix()) * root);
        }
        State::new(sum)
    }

    /// Expected value `Σ x · tr(ρ a_x)`.
    pub fn expectation(&self, rho: &State) -> Result<f64> {
        if self.dim != rho.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim, got: rho.dim() });
        }
        let values = self.values()?;
        let mut acc = 0.0;
        for (x, (_, effect)) in values.iter().zip(&self.entries) {
            acc += x * (rho.matrix() * effect.matrix()).trace_re();
        }
        Ok(acc)
    }

    /// Observable operator `Â = Σ x a_x`.
    pub fn operator(&self) -> Result<ComplexMatrix> {
        let values = self.values()?;
        let mut sum = ComplexMatrix::zeros(self.dim);
        for (x, (_, effect)) in values.iter().zip(&self.entries) {
            sum = &sum + &effect.matrix().scale(*x);
        }
        Ok(sum)
    }

    /// `f̂(Â) = Σ f(x) a_x` for a function given as a finite table over the
    /// outcome set. Distinct from `f(Â)` unless the observable is sharp.
    pub fn function_operator(&self, f: &FunctionTable) -> Result<ComplexMatrix> {
        self.values()?;
        let mut sum = ComplexMatrix::zeros(self.dim);
        for (outcome, effect) in &self.entries {
            let fx = f
                .get(&outcome.label)
                .ok_or_else(|| Error::FunctionDomainError { label: outcome.label.clone() })?;
            sum = &sum + &effect.matrix().scale(fx);
        }
        Ok(sum)
    }
}

/// Convex combination `Σ λ_i B^{(i)}` of observables sharing one outcome
/// list.
pub fn mixture(weights: &[f64], components: &[Observable]) -> Result<Observable> {
    let atol = tolerance().atol;
    if weights.is_empty() || weights.len() != components.len() {
        return Err(Error::WeightError {
            reason: format!("{} weights for {} observables", weights.len(), components.len()),
        });
    }
    for &w in weights {
        if !w.is_finite() || !(-atol..=1.0 + atol).contains(&w) {
            return Err(Error::WeightError { reason: format!("weight {w:e} outside [0, 1]") });
        }
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > atol {
        return Err(Error::WeightError { reason: format!("weights sum to {total}") });
    }

    let first = &components[0];
    for b in &components[1..] {
        if b.dim() != first.dim() {
            return Err(Error::DimensionMismatch { expected: first.dim(), got: b.dim() });
        }
        if !first.same_outcomes(b) {
            return Err(Error::OutcomeMismatch {
                reason: "mixture components must share one outcome list".into(),
            });
        }
    }

    let mut entries = Vec::with_capacity(first.outcome_count());
    for y in 0..first.outcome_count() {
        let mut sum = ComplexMatrix::zeros(first.dim());
        for (&w, b) in weights.iter().zip(components) {
            sum = &sum + &b.effect(y).matrix().scale(w);
        }
        entries.push((first.outcome(y).clone(), Effect::from_valid(sum)));
    }
    Observable::new(entries)
}

/// Observable on a product outcome space `Ω_A × Ω_B`, stored row-major with
/// the left factor as the row index.
#[derive(Clone, Debug)]
pub struct PairObservable {
    dim: usize,
    rows: Vec<Outcome>,
    cols: Vec<Outcome>,
    effects: Vec<Effect>,
}

impl PairObservable {
    pub fn new(rows: Vec<Outcome>, cols: Vec<Outcome>, effects: Vec<Effect>) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() || effects.len() != rows.len() * cols.len() {
            return Err(Error::ShapeMismatch {
                reason: format!(
                    "{} effects for a {}x{} outcome grid",
                    effects.len(),
                    rows.len(),
                    cols.len()
                ),
            });
        }
        check_unique_labels(rows.iter().map(|o| o.label.as_str()))?;
        check_unique_labels(cols.iter().map(|o| o.label.as_str()))?;
        let dim = effects[0].dim();
        for effect in &effects {
            if effect.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: effect.dim() });
            }
        }
        check_resolution(effects.iter().map(|e| e.matrix().clone()), dim)?;
        Ok(PairObservable { dim, rows, cols, effects })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Outcome] {
        &self.rows
    }

    pub fn cols(&self) -> &[Outcome] {
        &self.cols
    }

    pub fn effect(&self, row: usize, col: usize) -> &Effect {
        &self.effects[row * self.cols.len() + col]
    }

    /// Flattens to a plain observable in row-major (left-factor-major)
    /// order. Pair labels are `x⊗y`; a pair carries the product value when
    /// both halves have one.
    pub fn to_observable(&self) -> Observable {
        let mut entries = Vec::with_capacity(self.effects.len());
        for (i, x) in self.rows.iter().enumerate() {
            for (j, y) in self.cols.iter().enumerate() {
                let label = format!("{}⊗{}", x.label, y.label);
                let value = match (x.value, y.value) {
                    (Some(a), Some(b)) => Some(a * b),
                    _ => None,
                };
                entries.push((Outcome { label, value }, self.effect(i, j).clone()));
            }
        }
        Observable::new(entries).expect("pair observable already validated")
    }

    /// Sums out the right factor; recovers the first-measured observable.
    pub fn marginal_left(&self) -> Observable {
        let mut entries = Vec::with_capacity(self.rows.len());
        for (i, x) in self.rows.iter().enumerate() {
            let mut sum = ComplexMatrix::zeros(self.dim);
            for j in 0..self.cols.len() {
                sum = &sum + self.effect(i, j).matrix();
            }
            entries.push((x.clone(), Effect::from_valid(sum)));
        }
        Observable::new(entries).expect("marginal of a resolution is a resolution")
    }

    /// Sums out the left factor; yields the second observable conditioned
    /// on the first.
    pub fn marginal_right(&self) -> Observable {
        let mut entries = Vec::with_capacity(self.cols.len());
        for (j, y) in self.cols.iter().enumerate() {
            let mut sum = ComplexMatrix::zeros(self.dim);
            for i in 0..self.rows.len() {
                sum = &sum + self.effect(i, j).matrix();
            }
            entries.push((y.clone(), Effect::from_valid(sum)));
        }
        Observable::new(entries).expect("marginal of a resolution is a resolution")
    }

    /// Pair observable operator `Σ_{x,y} x·y · a_{(x,y)}`.
    pub fn operator(&self) -> Result<ComplexMatrix> {
        self.to_observable().operator()
    }
}

/// Row-stochastic matrix transporting outcome probabilities of `Ω_A` (rows)
/// to `Ω_B` (columns).
#[derive(Clone, Debug)]
pub struct ClassicalChannel {
    rows: Vec<String>,
    cols: Vec<Outcome>,
    probs: Vec<Vec<f64>>,
}

impl ClassicalChannel {
    pub fn new(rows: Vec<String>, cols: Vec<Outcome>, probs: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() || probs.len() != rows.len() {
            return Err(Error::ShapeMismatch {
                reason: format!("{} probability rows for {} row labels", probs.len(), rows.len()),
            });
        }
        check_unique_labels(rows.iter().map(|s| s.as_str()))?;
        check_unique_labels(cols.iter().map(|o| o.label.as_str()))?;
        let atol = tolerance().atol;
        for (i, row) in probs.iter().enumerate() {
            if row.len() != cols.len() {
                return Err(Error::ShapeMismatch {
                    reason: format!("row {i} has {} entries for {} columns", row.len(), cols.len()),
                });
            }
            for (j, &p) in row.iter().enumerate() {
                if !p.is_finite() || !(-atol..=1.0 + atol).contains(&p) {
                    return Err(Error::ProbabilityRange { row: i, col: j, value: p });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > atol {
                return Err(Error::NotStochastic { row: i, sum });
            }
        }
        Ok(ClassicalChannel { rows, cols, probs })
    }

    /// Identity channel on one outcome list.
    pub fn identity(outcomes: &[Outcome]) -> Self {
        let n = outcomes.len();
        let probs = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        ClassicalChannel {
            rows: outcomes.iter().map(|o| o.label.clone()).collect(),
            cols: outcomes.to_vec(),
            probs,
        }
    }

    pub fn row_labels(&self) -> &[String] {
        &self.rows
    }

    pub fn cols(&self) -> &[Outcome] {
        &self.cols
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn prob(&self, row: usize, col: usize) -> f64 {
        self.probs[row][col]
    }

    /// Whether every column also sums to 1, i.e. the channel is doubly
    /// stochastic.
    pub fn is_bistochastic(&self) -> bool {
        let atol = tolerance().atol;
        (0..self.cols.len()).all(|j| {
            let sum: f64 = self.probs.iter().map(|row| row[j]).sum();
            (sum - 1.0).abs() <= atol
        })
    }

    /// Matrix product: this channel followed by `next`.
    pub fn compose(&self, next: &ClassicalChannel) -> Result<ClassicalChannel> {
        if self.cols.len() != next.rows.len()
            || self.cols.iter().zip(&next.rows).any(|(c, r)| &c.label != r)
        {
            return Err(Error::ShapeMismatch {
                reason: "channel composition needs matching inner outcome lists".into(),
            });
        }
        let mut probs = vec![vec![0.0; next.cols.len()]; self.rows.len()];
        for (i, row) in self.probs.iter().enumerate() {
            for (k, &p) in row.iter().enumerate() {
                for (j, &q) in next.probs[k].iter().enumerate() {
                    probs[i][j] += p * q;
                }
            }
        }
        ClassicalChannel::new(self.rows.clone(), next.cols.clone(), probs)
    }

    /// Post-processing `ν • A`: the observable on this channel's column
    /// outcomes with effects `b_y = Σ_x ν_{xy} a_x`.
    pub fn post_process(&self, a: &Observable) -> Result<Observable> {
        if self.rows.len() != a.outcome_count()
            || self.rows.iter().zip(a.outcomes()).any(|(r, o)| r != &o.label)
        {
            return Err(Error::OutcomeMismatch {
                reason: "channel rows must match the observable's outcome labels".into(),
            });
        }
        let mut entries = Vec::with_capacity(self.cols.len());
        for (j, y) in self.cols.iter().enumerate() {
            let mut sum = ComplexMatrix::zeros(a.dim());
            for (i, (_, ax)) in a.entries().iter().enumerate() {
                sum = &sum + &ax.matrix().scale(self.probs[i][j]);
            }
            entries.push((y.clone(), Effect::from_valid(sum)));
        }
        Observable::new(entries)
    }

    /// The function `f_ν(x) = Σ_y y·ν_{xy}`: the expected column value on
    /// each row, as a table over the row labels.
    pub fn induced_function(&self) -> Result<FunctionTable> {
        let col_values: Vec<f64> = self
            .cols
            .iter()
            .map(|o| o.value.ok_or_else(|| Error::MissingOutcomeValues { label: o.label.clone() }))
            .collect::<Result<_>>()?;
        let entries = self
            .rows
            .iter()
            .zip(&self.probs)
            .map(|(label, row)| {
                let avg = row.iter().zip(&col_values).map(|(p, y)| p * y).sum();
                (label.clone(), avg)
            })
            .collect();
        FunctionTable::new(entries)
    }
}

/// Finite real-valued function, keyed by outcome label.
#[derive(Clone, Debug)]
pub struct FunctionTable {
    entries: Vec<(String, f64)>,
}

impl FunctionTable {
    pub fn new(entries: Vec<(String, f64)>) -> Result<Self> {
        check_unique_labels(entries.iter().map(|(l, _)| l.as_str()))?;
        Ok(FunctionTable { entries })
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, v)| *v)
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }
}

/// Hermitian sandwich `(T|a) = a^{1/2} T a^{1/2}`, conditioning an operator
/// on a single effect.
pub fn condition_operator_on_effect(t: &ComplexMatrix, a: &Effect) -> Result<ComplexMatrix> {
    if t.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: t.dim() });
    }
    let deviation = t.hermitian_deviation();
    if deviation > tolerance().atol * (1.0 + t.frobenius_norm()) {
        return Err(Error::NotHermitian { deviation });
    }
    let root = a.sqrt();
    Ok((&(root * t) * root).symmetrized())
}

/// Order of nested conditioning in [`bicondition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grouping {
    /// `((B|A)|C)`: condition on `A` first, then on `C`.
    Left,
    /// `(B|(A|C))`: condition on `A`-conditioned-on-`C`.
    Right,
}

/// The two inequivalent ways of conditioning `B` on both `A` and `C`.
/// Their disagreement witnesses that conditioning is not associative.
pub fn bicondition(
    b: &Observable,
    a: &Observable,
    c: &Observable,
    grouping: Grouping,
) -> Result<Observable> {
    match grouping {
        Grouping::Left => b.conditioned_on(a)?.conditioned_on(c),
        Grouping::Right => b.conditioned_on(&a.conditioned_on(c)?),
    }
}
