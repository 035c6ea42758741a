//! Seeded random generators and the identity-check registry.
//!
//! Every algebraic identity the library claims is registered here under a
//! stable id and evaluated over many random instances: effects from
//! normalized Gram matrices, observables from sandwiched positive sums,
//! sharp observables from rotated basis partitions, channels from
//! normalized rows or Birkhoff combinations of permutations. A check runs
//! `trials` independent instances and reports the worst deviation seen.
//!
//! Each trial draws from its own counter-derived stream
//! (`ChaCha8Rng::set_stream(trial + 1)` on the shared seed), so reports are
//! bit-stable for a fixed seed regardless of execution order, and trials
//! could run concurrently without changing any report.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complement::NObservable;
use crate::effects::{Effect, PureState, State};
use crate::error::{Error, Result};
use crate::numerics::{
    hermitian_eig, relative_deviation, tolerance, Complex64, ComplexMatrix, ComplexVector,
};
use crate::observables::{
    condition_operator_on_effect, mixture, ClassicalChannel, Observable, Outcome,
};
use crate::spectral::SelfAdjointOperator;

/// Regularizer folded into the last effect of a random observable so the
/// normalizing sum is invertible.
const RESOLUTION_FLOOR: f64 = 1e-6;

/// Sampling plan for one check: base seed, inclusive dimension and outcome
/// count ranges, and the number of independent trials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomSpec {
    pub seed: u64,
    pub dims: (usize, usize),
    pub outcomes: (usize, usize),
    pub trials: usize,
}

impl RandomSpec {
    pub fn new(
        seed: u64,
        dims: (usize, usize),
        outcomes: (usize, usize),
        trials: usize,
    ) -> Result<Self> {
        let spec = RandomSpec { seed, dims, outcomes, trials };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.0 < 1 || self.dims.1 < self.dims.0 {
            return Err(Error::EmptyRange {
                what: format!("dimension range {}..={}", self.dims.0, self.dims.1),
            });
        }
        if self.outcomes.0 < 1 || self.outcomes.1 < self.outcomes.0 {
            return Err(Error::EmptyRange {
                what: format!("outcome range {}..={}", self.outcomes.0, self.outcomes.1),
            });
        }
        if self.trials < 1 {
            return Err(Error::EmptyRange { what: "trial count 0".into() });
        }
        Ok(())
    }
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec { seed: 7, dims: (2, 5), outcomes: (2, 4), trials: 200 }
    }
}

/// Result of one registry check: the worst deviation across all trials and
/// the stream index that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub theorem_id: String,
    pub trials: usize,
    pub max_deviation: f64,
    pub worst_case_seed: u64,
    pub tolerance: f64,
    pub passed: bool,
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial + 1);
    rng
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Standard normal via Box–Muller on (0,1] uniforms.
fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn gaussian_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}

fn ginibre(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = gaussian_complex(rng);
        }
    }
    m
}

/// Gram matrix `G†G` of a complex Gaussian draw: positive semidefinite,
/// almost surely full rank.
fn gram(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(dim, rng);
    (&g.adjoint() * &g).symmetrized()
}

pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(dim, rng);
    (&g + &g.adjoint()).scale(0.5).symmetrized()
}

/// Random effect with spectrum strictly inside [0, 1): a Gram matrix scaled
/// by its largest eigenvalue plus a uniform margin.
pub fn random_effect(dim: usize, rng: &mut impl Rng) -> Effect {
    let h = gram(dim, rng);
    let eig = hermitian_eig(&h).expect("gram matrix is Hermitian");
    let top = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let margin: f64 = rng.gen::<f64>() + 1e-6;
    Effect::new(h.scale(1.0 / (top + margin))).expect("scaled gram has spectrum in [0, 1)")
}

pub fn random_pure_state(dim: usize, rng: &mut impl Rng) -> PureState {
    let v = ComplexVector::new((0..dim).map(|_| gaussian_complex(rng)).collect());
    PureState::normalized(v).expect("gaussian vector has positive norm")
}

pub fn random_state(dim: usize, rng: &mut impl Rng) -> State {
    let h = gram(dim, rng);
    State::new(h.scale(1.0 / h.trace_re())).expect("normalized gram is a state")
}

/// `k` effects summing to the identity: positive parts `H_i` sandwiched by
/// `S^{-1/2}` where `S = Σ H_i + εI`, with the `εS^{-1}` remainder folded
/// into the last effect.
pub fn random_resolution(dim: usize, k: usize, rng: &mut impl Rng) -> Vec<Effect> {
    let parts: Vec<ComplexMatrix> = (0..k).map(|_| gram(dim, rng)).collect();
    let mut total = ComplexMatrix::identity(dim).scale(RESOLUTION_FLOOR);
    for h in &parts {
        total = &total + h;
    }
    let eig = hermitian_eig(&total).expect("sum of gram matrices is Hermitian");
    let mut inv_root = ComplexMatrix::zeros(dim);
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvector(i);
        inv_root = &inv_root + &v.outer(&v).scale(1.0 / lambda.sqrt());
    }
    inv_root = inv_root.symmetrized();
    let remainder = (&inv_root * &inv_root).scale(RESOLUTION_FLOOR);

    parts
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let mut m = (&(&inv_root * h) * &inv_root).symmetrized();
            if i == k - 1 {
                m = (&m + &remainder).symmetrized();
            }
            Effect::new(m).expect("sandwiched positive part is an effect")
        })
        .collect()
}

fn labeled_outcomes(k: usize, rng: &mut impl Rng) -> Vec<Outcome> {
    (1..=k)
        .map(|i| Outcome::with_value(format!("x{i}"), rng.gen_range(-2.0..2.0)))
        .collect()
}

/// Random `k`-outcome observable with outcome values uniform in [−2, 2).
pub fn random_observable(dim: usize, k: usize, rng: &mut impl Rng) -> Observable {
    let outcomes = labeled_outcomes(k, rng);
    let effects = random_resolution(dim, k, rng);
    Observable::new(outcomes.into_iter().zip(effects).collect())
        .expect("random resolution sums to the identity")
}

/// Observable with the given outcome list and fresh random effects; used to
/// build mixture components that must share an outcome set.
pub fn random_observable_like(template: &Observable, rng: &mut impl Rng) -> Observable {
    let effects = random_resolution(template.dim(), template.outcome_count(), rng);
    Observable::new(template.outcomes().cloned().zip(effects).collect())
        .expect("random resolution sums to the identity")
}

/// Sharp observable from a random-unitary rotation of a random partition of
/// the computational basis into `k ≤ dim` nonempty groups.
pub fn random_sharp_observable(dim: usize, k: usize, rng: &mut impl Rng) -> Observable {
    assert!(k >= 1 && k <= dim, "need 1 <= k <= dim basis groups");
    let basis = hermitian_eig(&random_hermitian(dim, rng))
        .expect("random Hermitian decomposes")
        .eigenvectors;
    let mut assignment: Vec<usize> =
        (0..dim).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect();
    assignment.shuffle(rng);

    let outcomes = labeled_outcomes(k, rng);
    let entries = (0..k)
        .map(|g| {
            let mut p = ComplexMatrix::zeros(dim);
            for (i, &a) in assignment.iter().enumerate() {
                if a == g {
                    let col = ComplexVector::new((0..dim).map(|r| basis[(r, i)]).collect());
                    p = &p + &col.outer(&col);
                }
            }
            (outcomes[g].clone(), Effect::from_valid(p.symmetrized()))
        })
        .collect();
    Observable::new(entries).expect("rotated basis partition resolves the identity")
}

/// Atomic observable: every effect a rank-one projection.
pub fn random_atomic_observable(dim: usize, rng: &mut impl Rng) -> Observable {
    random_sharp_observable(dim, dim, rng)
}

pub fn random_nobservable(dim: usize, k: usize, rng: &mut impl Rng) -> NObservable {
    NObservable::new(random_observable(dim, k, rng))
        .expect("gram-based effects have positive norm")
}

/// Row-stochastic channel with the given row labels and column outcomes;
/// rows are normalized positive uniforms.
pub fn random_channel_between(
    rows: Vec<String>,
    cols: Vec<Outcome>,
    rng: &mut impl Rng,
) -> ClassicalChannel {
    let mut probs = Vec::with_capacity(rows.len());
    for _ in 0..rows.len() {
        let raw: Vec<f64> = (0..cols.len()).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        probs.push(raw.into_iter().map(|p| p / total).collect());
    }
    ClassicalChannel::new(rows, cols, probs).expect("normalized rows are stochastic")
}

/// Channel with rows `x1..xn` (matching [`random_observable`] labels) and
/// valued columns `y1..ym`.
pub fn random_channel(n_rows: usize, n_cols: usize, rng: &mut impl Rng) -> ClassicalChannel {
    let rows = (1..=n_rows).map(|i| format!("x{i}")).collect();
    let cols = (1..=n_cols)
        .map(|j| Outcome::with_value(format!("y{j}"), rng.gen_range(-2.0..2.0)))
        .collect();
    random_channel_between(rows, cols, rng)
}

/// Doubly stochastic square channel on the given outcome list: a convex
/// combination of random permutation matrices.
pub fn random_bistochastic(outcomes: &[Outcome], rng: &mut impl Rng) -> ClassicalChannel {
    let n = outcomes.len();
    let mut weights: Vec<f64> = (0..n + 1).map(|_| rng.gen::<f64>() + 0.1).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut probs = vec![vec![0.0; n]; n];
    for &w in &weights {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        for (i, &j) in perm.iter().enumerate() {
            probs[i][j] += w;
        }
    }
    ClassicalChannel::new(
        outcomes.iter().map(|o| o.label.clone()).collect(),
        outcomes.to_vec(),
        probs,
    )
    .expect("convex combination of permutations is stochastic")
}

/// Two Hermitian matrices diagonal in one shared random eigenbasis.
pub fn random_commuting_pair(
    dim: usize,
    rng: &mut impl Rng,
) -> (SelfAdjointOperator, SelfAdjointOperator) {
    let basis = hermitian_eig(&random_hermitian(dim, rng)).expect("random Hermitian decomposes");
    let vals_t: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let vals_s: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let assemble = |values: &[f64]| {
        let mut m = ComplexMatrix::zeros(dim);
        for (i, &v) in values.iter().enumerate() {
            let vec = basis.eigenvector(i);
            m = &m + &vec.outer(&vec).scale(v);
        }
        SelfAdjointOperator::new(m.symmetrized()).expect("eigenbasis sum is Hermitian")
    };
    (assemble(&vals_t), assemble(&vals_s))
}

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

type Runner = fn(&mut ChaCha8Rng, &RandomSpec) -> f64;

struct RegistryEntry {
    id: &'static str,
    tolerance: f64,
    runner: Runner,
}

fn draw_dim(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> usize {
    rng.gen_range(spec.dims.0..=spec.dims.1)
}

fn draw_outcome_count(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> usize {
    rng.gen_range(spec.outcomes.0..=spec.outcomes.1)
}

/// Worst per-effect deviation between two observables on one outcome list.
fn observable_deviation(a: &Observable, b: &Observable) -> f64 {
    a.effects()
        .zip(b.effects())
        .map(|(x, y)| relative_deviation(x.matrix(), y.matrix()))
        .fold(0.0, f64::max)
}

fn check_trace_symmetry(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let a = random_effect(dim, rng);
    let b = random_effect(dim, rng);
    let ab = a.seq_product(&b).expect("same dimension");
    let ba = b.seq_product(&a).expect("same dimension");
    (ab.matrix().trace_re() - ba.matrix().trace_re()).abs()
}

fn check_atomic_left(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let b = random_effect(dim, rng);
    let phi = random_pure_state(dim, rng);
    let lhs = phi.projector().seq_product(&b).expect("same dimension");
    let weight = phi.vector().inner(&b.matrix().matvec(phi.vector())).re;
    let rhs = phi.projector().matrix().scale(weight);
    relative_deviation(lhs.matrix(), &rhs)
}

fn check_atomic_right(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let a = random_effect(dim, rng);
    let phi = random_pure_state(dim, rng);
    let image = a.sqrt().matvec(phi.vector());
    if image.norm() <= tolerance().atol {
        return 0.0;
    }
    let lhs = a.seq_product(&phi.projector()).expect("same dimension");
    let weight = phi.vector().inner(&a.matrix().matvec(phi.vector())).re;
    let unit = image.normalized().expect("norm checked above");
    let rhs = unit.outer(&unit).scale(weight);
    relative_deviation(lhs.matrix(), &rhs)
}

fn check_atomic_pair(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let phi = random_pure_state(dim, rng);
    let psi = random_pure_state(dim, rng);
    let lhs = phi.projector().seq_product(&psi.projector()).expect("same dimension");
    let rhs = phi.projector().matrix().scale(phi.transition_probability(&psi));
    relative_deviation(lhs.matrix(), &rhs)
}

fn check_lemma_3_1(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let ka = draw_outcome_count(rng, spec);
    let kb = draw_outcome_count(rng, spec);
    let rho = random_state(dim, rng);
    let a = random_observable(dim, ka, rng);
    let b = random_observable(dim, kb, rng);
    let lhs = b
        .conditioned_on(&a)
        .expect("same dimension")
        .expectation(&rho)
        .expect("valued outcomes");
    let conditioned = a.condition_state(&rho).expect("same dimension");
    let rhs = b.expectation(&conditioned).expect("valued outcomes");
    (lhs - rhs).abs()
}

fn check_thm_3_2_i(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let ka = draw_outcome_count(rng, spec);
    let kb = draw_outcome_count(rng, spec);
    let a = random_observable(dim, ka, rng);
    let b1 = random_observable(dim, kb, rng);
    let b2 = random_observable_like(&b1, rng);
    let lambda: f64 = rng.gen();
    let weights = [lambda, 1.0 - lambda];

    let mixed = mixture(&weights, &[b1.clone(), b2.clone()]).expect("shared outcomes");
    let lhs = a.seq_product(&mixed).expect("same dimension").to_observable();
    let rhs = mixture(
        &weights,
        &[
            a.seq_product(&b1).expect("same dimension").to_observable(),
            a.seq_product(&b2).expect("same dimension").to_observable(),
        ],
    )
    .expect("pair outcomes agree");
    observable_deviation(&lhs, &rhs)
}

fn check_thm_3_2_ii(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let ka = draw_outcome_count(rng, spec);
    let kb = draw_outcome_count(rng, spec);
    let a = random_observable(dim, ka, rng);
    let b1 = random_observable(dim, kb, rng);
    let b2 = random_observable_like(&b1, rng);
    let lambda: f64 = rng.gen();
    let weights = [lambda, 1.0 - lambda];

    let mixed = mixture(&weights, &[b1.clone(), b2.clone()]).expect("shared outcomes");
    let lhs = mixed.conditioned_on(&a).expect("same dimension");
    let rhs = mixture(
        &weights,
        &[
            b1.conditioned_on(&a).expect("same dimension"),
            b2.conditioned_on(&a).expect("same dimension"),
        ],
    )
    .expect("conditioning keeps outcomes");
    observable_deviation(&lhs, &rhs)
}

fn check_thm_3_2_iii(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let ka = draw_outcome_count(rng, spec);
    let kc = draw_outcome_count(rng, spec);
    let m = draw_outcome_count(rng, spec);
    let a = random_observable(dim, ka, rng);
    let c = random_observable(dim, kc, rng);
    let nu = random_channel(ka, m, rng);

    let lhs = nu
        .post_process(&a)
        .expect("rows match labels")
        .conditioned_on(&c)
        .expect("same dimension");
    let rhs = nu
        .post_process(&a.conditioned_on(&c).expect("same dimension"))
        .expect("conditioning keeps labels");
    observable_deviation(&lhs, &rhs)
}

fn check_lemma_4_1(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let ka = draw_outcome_count(rng, spec);
    let m = draw_outcome_count(rng, spec);
    let p = draw_outcome_count(rng, spec);
    let a = random_observable(dim, ka, rng);
    let nu = random_channel(ka, m, rng);
    let mu_rows = nu.cols().iter().map(|o| o.label.clone()).collect();
    let mu_cols = (1..=p)
        .map(|j| Outcome::with_value(format!("z{j}"), rng.gen_range(-2.0..2.0)))
        .collect();
    let mu = random_channel_between(mu_rows, mu_cols, rng);

    let lhs = mu
        .post_process(&nu.post_process(&a).expect("rows match labels"))
        .expect("rows match inner labels");
    let rhs = nu
        .compose(&mu)
        .expect("inner outcome lists match")
        .post_process(&a)
        .expect("rows match labels");
    observable_deviation(&lhs, &rhs)
}

fn check_thm_4_2_i(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let ka = draw_outcome_count(rng, spec);
    let m = draw_outcome_count(rng, spec);
    let a = random_observable(dim, ka, rng);
    let nu = random_channel(ka, m, rng);

    let lhs = nu.post_process(&a).expect("rows match").operator().expect("valued columns");
    let table = nu.induced_function().expect("valued columns");
    let rhs = a.function_operator(&table).expect("table covers labels");
    relative_deviation(&lhs, &rhs)
}

fn check_thm_4_2_ii(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let ka = draw_outcome_count(rng, spec);
    let m = draw_outcome_count(rng, spec);
    let p = draw_outcome_count(rng, spec);
    let a = random_observable(dim, ka, rng);
    let nu = random_channel(ka, m, rng);
    let mu_rows = nu.cols().iter().map(|o| o.label.clone()).collect();
    let mu_cols = (1..=p)
        .map(|j| Outcome::with_value(format!("z{j}"), rng.gen_range(-2.0..2.0)))
        .collect();
    let mu = random_channel_between(mu_rows, mu_cols, rng);

    let lhs = mu
        .post_process(&nu.post_process(&a).expect("rows match"))
        .expect("rows match")
        .operator()
        .expect("valued columns");
    let table = nu.compose(&mu).expect("inner lists match").induced_function().expect("values");
    let rhs = a.function_operator(&table).expect("table covers labels");
    relative_deviation(&lhs, &rhs)
}

fn check_thm_4_2_iii(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let kb = draw_outcome_count(rng, spec);
    let b1 = random_observable(dim, kb, rng);
    let b2 = random_observable_like(&b1, rng);
    let lambda: f64 = rng.gen();
    let weights = [lambda, 1.0 - lambda];

    let mixed = mixture(&weights, &[b1.clone(), b2.clone()]).expect("shared outcomes");
    let lhs = mixed.operator().expect("valued outcomes");
    let op1 = b1.operator().expect("valued outcomes");
    let op2 = b2.operator().expect("valued outcomes");
    let rhs = &op1.scale(lambda) + &op2.scale(1.0 - lambda);
    relative_deviation(&lhs, &rhs)
}

fn check_thm_4_3_i(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let ka = draw_outcome_count(rng, spec);
    let kb = draw_outcome_count(rng, spec);
    let a = random_observable(dim, ka, rng);
    let b = random_observable(dim, kb, rng);

    let lhs = b
        .conditioned_on(&a)
        .expect("same dimension")
        .operator()
        .expect("valued outcomes");
    let bhat = b.operator().expect("valued outcomes");
    let mut rhs = ComplexMatrix::zeros(dim);
    for effect in a.effects() {
        rhs = &rhs + &condition_operator_on_effect(&bhat, effect).expect("Hermitian operator");
    }
    relative_deviation(&lhs, &rhs)
}

fn check_thm_4_3_ii(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let ka = draw_outcome_count(rng, spec);
    let kb = draw_outcome_count(rng, spec);
    let a = random_observable(dim, ka, rng);
    let b = random_observable(dim, kb, rng);

    let lhs = a
        .seq_product(&b)
        .expect("same dimension")
        .operator()
        .expect("valued outcomes");
    let bhat = b.operator().expect("valued outcomes");
    let values = a.values().expect("valued outcomes");
    let mut rhs = ComplexMatrix::zeros(dim);
    for (x, effect) in values.iter().zip(a.effects()) {
        let sandwich = condition_operator_on_effect(&bhat, effect).expect("Hermitian operator");
        rhs = &rhs + &sandwich.scale(*x);
    }
    relative_deviation(&lhs, &rhs)
}

fn check_marginal_left(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let ka = draw_outcome_count(rng, spec);
    let kb = draw_outcome_count(rng, spec);
    let a = random_observable(dim, ka, rng);
    let b = random_observable(dim, kb, rng);
    let pair = a.seq_product(&b).expect("same dimension");
    observable_deviation(&pair.marginal_left(), &a)
}

fn check_marginal_right(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let ka = draw_outcome_count(rng, spec);
    let kb = draw_outcome_count(rng, spec);
    let a = random_observable(dim, ka, rng);
    let b = random_observable(dim, kb, rng);
    let pair = a.seq_product(&b).expect("same dimension");
    let conditioned = b.conditioned_on(&a).expect("same dimension");
    observable_deviation(&pair.marginal_right(), &conditioned)
}

fn check_sharp_orthogonality(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let k = draw_outcome_count(rng, spec).min(dim);
    let sharp = random_sharp_observable(dim, k, rng);
    let effects: Vec<&Effect> = sharp.effects().collect();
    let mut worst: f64 = 0.0;
    for (i, x) in effects.iter().enumerate() {
        for (j, y) in effects.iter().enumerate() {
            if i != j {
                worst = worst.max((x.matrix() * y.matrix()).frobenius_norm());
            }
        }
    }
    worst
}

fn check_lemma_5_1(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let k = draw_outcome_count(rng, spec).max(2);
    let a = random_nobservable(dim, k, rng);
    let complemented = a.complement().expect("random effects stay below identity");
    let n = a.n() as f64;
    let uniform_share = ComplexMatrix::identity(dim).scale(1.0 / n);

    // Fixed-point distance obeys ‖A'_x − a_x‖ = n/(n−1)·‖a_x − I/n‖, so the
    // complement is a fixed point exactly on the uniform observable.
    let mut worst: f64 = 0.0;
    for (orig, comp) in a.as_observable().effects().zip(complemented.as_observable().effects()) {
        let moved = (comp.matrix() - orig.matrix()).frobenius_norm();
        let from_uniform = (orig.matrix() - &uniform_share).frobenius_norm();
        worst = worst.max((moved - n / (n - 1.0) * from_uniform).abs());
    }

    let uniform = a.uniform();
    let fixed = uniform.complement().expect("uniform effects stay below identity");
    worst.max(observable_deviation(uniform.as_observable(), fixed.as_observable()))
}

fn check_thm_5_2_i(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let ka = draw_outcome_count(rng, spec);
    let kb = draw_outcome_count(rng, spec).max(2);
    let a = random_observable(dim, ka, rng);
    let b = random_nobservable(dim, kb, rng);

    let conditioned = NObservable::new(b.as_observable().conditioned_on(&a).expect("same dim"))
        .expect("conditioned effects keep positive norm");
    let lhs = conditioned.complement().expect("below identity");
    let rhs = b
        .complement()
        .expect("below identity")
        .as_observable()
        .conditioned_on(&a)
        .expect("same dim");
    observable_deviation(lhs.as_observable(), &rhs)
}

fn check_thm_5_2_ii(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let k = draw_outcome_count(rng, spec).max(2);
    let a1 = random_observable(dim, k, rng);
    let a2 = random_observable_like(&a1, rng);
    let lambda: f64 = rng.gen();
    let weights = [lambda, 1.0 - lambda];

    let mixed = NObservable::new(mixture(&weights, &[a1.clone(), a2.clone()]).expect("shared"))
        .expect("mixture of full-rank effects is nonzero");
    let lhs = mixed.complement().expect("below identity");
    let c1 = NObservable::new(a1).expect("nonzero").complement().expect("below identity");
    let c2 = NObservable::new(a2).expect("nonzero").complement().expect("below identity");
    let rhs = mixture(&weights, &[c1.into_observable(), c2.into_observable()])
        .expect("complements keep outcomes");
    observable_deviation(lhs.as_observable(), &rhs)
}

fn check_lemma_5_3(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let k = draw_outcome_count(rng, spec).max(2);
    let a = random_observable(dim, k, rng);
    let outcomes: Vec<Outcome> = a.outcomes().cloned().collect();
    let n = k as f64;

    // Sufficiency: bistochastic channels commute with complementation.
    let bistochastic = random_bistochastic(&outcomes, rng);
    let processed = NObservable::new(bistochastic.post_process(&a).expect("rows match"))
        .expect("bistochastic mix of full-rank effects is nonzero");
    let lhs = processed.complement().expect("below identity");
    let a_complement = NObservable::new(a.clone()).expect("nonzero").complement().expect("ok");
    let rhs = bistochastic
        .post_process(a_complement.as_observable())
        .expect("rows match");
    let mut worst = observable_deviation(lhs.as_observable(), &rhs);

    // Necessity: for any channel the two sides differ by exactly
    // (1 − Σ_x ν_{xy}) I/(n−1) at column y, independent of A.
    let generic = random_channel_between(
        outcomes.iter().map(|o| o.label.clone()).collect(),
        outcomes.clone(),
        rng,
    );
    let processed = NObservable::new(generic.post_process(&a).expect("rows match"))
        .expect("channel mix of full-rank effects is nonzero");
    let lhs = processed.complement().expect("below identity");
    let rhs = generic.post_process(a_complement.as_observable()).expect("rows match");
    for (y, (le, re)) in lhs.as_observable().effects().zip(rhs.effects()).enumerate() {
        let column_sum: f64 = (0..k).map(|x| generic.prob(x, y)).sum();
        let gap = le.matrix() - re.matrix();
        let predicted =
            ComplexMatrix::identity(dim).scale((1.0 - column_sum) / (n - 1.0));
        worst = worst.max(relative_deviation(&gap, &predicted));
    }
    worst
}

fn check_thm_5_4(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let k = draw_outcome_count(rng, spec).max(2);
    let m: u32 = rng.gen_range(1..=8);
    let a = random_nobservable(dim, k, rng);
    let iterated = a.iterate_complement(m).expect("below identity throughout");
    let closed = a.closed_form_complement(m).expect("below identity");
    observable_deviation(iterated.as_observable(), closed.as_observable())
}

fn check_lemma_6_1(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);

    // Commuting pairs are fixed by conditioning.
    let (t, s) = random_commuting_pair(dim, rng);
    let pinched = t.condition_on(&s).expect("same dimension");
    let mut worst = relative_deviation(pinched.matrix(), t.matrix());

    // Generic pairs with a visible commutator must move.
    let t = SelfAdjointOperator::new(random_hermitian(dim, rng)).expect("Hermitian");
    let s = SelfAdjointOperator::new(random_hermitian(dim, rng)).expect("Hermitian");
    let commutator = &(t.matrix() * s.matrix()) - &(s.matrix() * t.matrix());
    if commutator.frobenius_norm() > 1e-3 {
        let moved = (t.condition_on(&s).expect("same dim").matrix() - t.matrix())
            .frobenius_norm();
        worst = worst.max((1e-6_f64 - moved).max(0.0));
    }
    worst
}

fn check_thm_6_2_i(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let t = SelfAdjointOperator::new(gram(dim, rng)).expect("gram is Hermitian");
    let s = SelfAdjointOperator::new(random_hermitian(dim, rng)).expect("Hermitian");
    let pinched = t.condition_on(&s).expect("same dimension");
    let eig = hermitian_eig(pinched.matrix()).expect("pinched matrix is Hermitian");
    (-eig.eigenvalues.first().copied().unwrap_or(0.0)).max(0.0)
}

fn check_thm_6_2_ii(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let t = SelfAdjointOperator::new(random_hermitian(dim, rng)).expect("Hermitian");
    let s = SelfAdjointOperator::new(random_hermitian(dim, rng)).expect("Hermitian");
    let pinched = t.condition_on(&s).expect("same dimension");
    (pinched.matrix().trace_re() - t.matrix().trace_re()).abs()
}

fn check_thm_6_2_iii(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> f64 {
    let dim = draw_dim(rng, spec);
    let rho = random_state(dim, rng);
    let s = SelfAdjointOperator::new(random_hermitian(dim, rng)).expect("Hermitian");
    let t = SelfAdjointOperator::new(random_hermitian(dim, rng)).expect("Hermitian");

    let rho_op = SelfAdjointOperator::new(rho.matrix().clone()).expect("states are Hermitian");
    let conditioned = rho_op.condition_on(&s).expect("same dimension");

    let mut worst = (conditioned.matrix().trace_re() - 1.0).abs();
    let eig = hermitian_eig(conditioned.matrix()).expect("Hermitian");
    worst = worst.max((-eig.eigenvalues.first().copied().unwrap_or(0.0)).max(0.0));

    let pinched_t = t.condition_on(&s).expect("same dimension");
    let lhs = (rho.matrix() * pinched_t.matrix()).trace_re();
    let rhs = (conditioned.matrix() * t.matrix()).trace_re();
    worst.max((lhs - rhs).abs())
}

const REGISTRY: &[RegistryEntry] = &[
    RegistryEntry { id: "sec2_trace_symmetry", tolerance: 1e-8, runner: check_trace_symmetry },
    RegistryEntry { id: "sec2_atomic_left", tolerance: 1e-8, runner: check_atomic_left },
    RegistryEntry { id: "sec2_atomic_right", tolerance: 1e-8, runner: check_atomic_right },
    RegistryEntry { id: "sec2_atomic_pair", tolerance: 1e-8, runner: check_atomic_pair },
    RegistryEntry { id: "lemma_3_1", tolerance: 1e-8, runner: check_lemma_3_1 },
    RegistryEntry { id: "thm_3_2_i", tolerance: 1e-8, runner: check_thm_3_2_i },
    RegistryEntry { id: "thm_3_2_ii", tolerance: 1e-8, runner: check_thm_3_2_ii },
    RegistryEntry { id: "thm_3_2_iii", tolerance: 1e-8, runner: check_thm_3_2_iii },
    RegistryEntry { id: "sec3_marginal_left", tolerance: 1e-8, runner: check_marginal_left },
    RegistryEntry { id: "sec3_marginal_right", tolerance: 1e-8, runner: check_marginal_right },
    RegistryEntry {
        id: "sec3_sharp_orthogonality",
        tolerance: 1e-8,
        runner: check_sharp_orthogonality,
    },
    RegistryEntry { id: "lemma_4_1", tolerance: 1e-8, runner: check_lemma_4_1 },
    RegistryEntry { id: "thm_4_2_i", tolerance: 1e-8, runner: check_thm_4_2_i },
    RegistryEntry { id: "thm_4_2_ii", tolerance: 1e-8, runner: check_thm_4_2_ii },
    RegistryEntry { id: "thm_4_2_iii", tolerance: 1e-8, runner: check_thm_4_2_iii },
    RegistryEntry { id: "thm_4_3_i", tolerance: 1e-8, runner: check_thm_4_3_i },
    RegistryEntry { id: "thm_4_3_ii", tolerance: 1e-8, runner: check_thm_4_3_ii },
    RegistryEntry { id: "lemma_5_1", tolerance: 1e-8, runner: check_lemma_5_1 },
    RegistryEntry { id: "thm_5_2_i", tolerance: 1e-8, runner: check_thm_5_2_i },
    RegistryEntry { id: "thm_5_2_ii", tolerance: 1e-8, runner: check_thm_5_2_ii },
    RegistryEntry { id: "lemma_5_3", tolerance: 1e-8, runner: check_lemma_5_3 },
    RegistryEntry { id: "thm_5_4", tolerance: 1e-8, runner: check_thm_5_4 },
    RegistryEntry { id: "lemma_6_1", tolerance: 1e-8, runner: check_lemma_6_1 },
    RegistryEntry { id: "thm_6_2_i", tolerance: 1e-8, runner: check_thm_6_2_i },
    RegistryEntry { id: "thm_6_2_ii", tolerance: 1e-8, runner: check_thm_6_2_ii },
    RegistryEntry { id: "thm_6_2_iii", tolerance: 1e-8, runner: check_thm_6_2_iii },
];

/// Ids of every registered identity, in registry order.
pub fn theorem_ids() -> Vec<&'static str> {
    REGISTRY.iter().map(|e| e.id).collect()
}

/// Runs one registered check over `spec.trials` random instances.
pub fn run_check(theorem_id: &str, spec: &RandomSpec) -> Result<CheckReport> {
    spec.validate()?;
    let entry = REGISTRY
        .iter()
        .find(|e| e.id == theorem_id)
        .ok_or_else(|| Error::UnknownTheorem { id: theorem_id.to_string() })?;

    let mut max_deviation = 0.0_f64;
    let mut worst_case_seed = 0_u64;
    for trial in 0..spec.trials {
        let mut rng = trial_rng(spec.seed, trial as u64);
        let deviation = (entry.runner)(&mut rng, spec);
        if deviation > max_deviation {
            max_deviation = deviation;
            worst_case_seed = trial as u64;
        }
    }
    Ok(CheckReport {
        theorem_id: entry.id.to_string(),
        trials: spec.trials,
        max_deviation,
        worst_case_seed,
        tolerance: entry.tolerance,
        passed: max_deviation <= entry.tolerance,
    })
}

/// Runs every registered check in order.
pub fn run_all(spec: &RandomSpec) -> Result<Vec<CheckReport>> {
    REGISTRY.iter().map(|e| run_check(e.id, spec)).collect()
}
