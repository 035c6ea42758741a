//! Deterministic fixtures for the benchmark suite: every helper draws from
//! a fixed seed so runs are comparable across machines and commits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sequens::harness::{random_effect, random_hermitian, random_observable};
use sequens::{ComplexMatrix, Effect, Observable};

pub fn bench_rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(90_210)
}

pub fn hermitian(dim: usize) -> ComplexMatrix {
    random_hermitian(dim, &mut bench_rng())
}

pub fn positive_semidefinite(dim: usize) -> ComplexMatrix {
    let h = hermitian(dim);
    &h * &h
}

pub fn effect_pair(dim: usize) -> (Effect, Effect) {
    let mut rng = bench_rng();
    (random_effect(dim, &mut rng), random_effect(dim, &mut rng))
}

pub fn observable_pair(dim: usize, outcomes: usize) -> (Observable, Observable) {
    let mut rng = bench_rng();
    (random_observable(dim, outcomes, &mut rng), random_observable(dim, outcomes, &mut rng))
}
