//! Sweeps over the linear-algebra substrate: eigendecomposition residuals,
//! square-root round trips, and spectral projection algebra on random
//! Hermitian matrices.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sequens::harness::random_hermitian;
use sequens::{
    hermitian_eig, psd_sqrt, spectral_projections, tolerance, Complex64, ComplexMatrix,
};

fn rng_for(case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(1701);
    rng.set_stream(case);
    rng
}

fn random_psd(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let h = random_hermitian(dim, rng);
    (&h * &h).symmetrized()
}

fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    let gram = &u.adjoint() * u;
    (&gram - &ComplexMatrix::identity(u.dim())).frobenius_norm()
}

#[test]
fn eigendecomposition_is_unitary_and_reconstructs() {
    let mut case = 0;
    for dim in 2..=6 {
        for _ in 0..100 {
            let mut rng = rng_for(case);
            case += 1;
            let m = random_hermitian(dim, &mut rng);
            let eig = hermitian_eig(&m).unwrap();
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            assert!(unitarity_deviation(&eig.eigenvectors) < 1e-12, "dim {dim}");
            let residual = (&eig.reconstruct() - &m).frobenius_norm();
            assert!(residual < 1e-10 * (1.0 + m.frobenius_norm()), "dim {dim}: {residual:e}");
        }
    }
}

#[test]
fn psd_sqrt_squares_back_and_stays_psd() {
    let mut case = 1000;
    for dim in 2..=6 {
        for _ in 0..60 {
            let mut rng = rng_for(case);
            case += 1;
            let m = random_psd(dim, &mut rng);
            let root = psd_sqrt(&m).unwrap();
            let back = (&root * &root).symmetrized();
            let residual = (&back - &m).frobenius_norm();
            assert!(residual < 1e-9 * (1.0 + m.frobenius_norm()), "dim {dim}: {residual:e}");
            let eig = hermitian_eig(&root).unwrap();
            assert!(*eig.eigenvalues.first().unwrap() > -1e-12);
        }
    }
}

#[test]
fn psd_sqrt_fixes_projections() {
    let mut case = 2000;
    for dim in 2..=5 {
        for rank in 1..dim {
            let mut rng = rng_for(case);
            case += 1;
            let basis = hermitian_eig(&random_hermitian(dim, &mut rng)).unwrap();
            let mut p = ComplexMatrix::zeros(dim);
            for k in 0..rank {
                let v = basis.eigenvector(k);
                p = &p + &v.outer(&v);
            }
            let p = p.symmetrized();
            let root = psd_sqrt(&p).unwrap();
            assert!(
                (&root - &p).frobenius_norm() < 1e-12,
                "dim {dim} rank {rank}"
            );
        }
    }
}

#[test]
fn spectral_projections_form_an_orthogonal_resolution() {
    let cluster_tol = tolerance().cluster_tol;
    let mut case = 3000;
    for dim in 2..=6 {
        for _ in 0..100 {
            let mut rng = rng_for(case);
            case += 1;
            let m = random_hermitian(dim, &mut rng);
            let parts = spectral_projections(&m, cluster_tol).unwrap();

            let mut sum = ComplexMatrix::zeros(dim);
            let mut reconstruction = ComplexMatrix::zeros(dim);
            for (x, p) in &parts {
                let idem = (&(p * p) - p).frobenius_norm();
                assert!(idem < 1e-12, "dim {dim}: idempotency {idem:e}");
                sum = &sum + p;
                reconstruction = &reconstruction + &p.scale(*x);
            }
            for (i, (_, p)) in parts.iter().enumerate() {
                for (_, q) in parts.iter().skip(i + 1) {
                    let cross = (p * q).frobenius_norm();
                    assert!(cross < 1e-12, "dim {dim}: orthogonality {cross:e}");
                }
            }
            let resolution = (&sum - &ComplexMatrix::identity(dim)).frobenius_norm();
            assert!(resolution < 1e-12, "dim {dim}: resolution {resolution:e}");
            let residual = (&reconstruction - &m).frobenius_norm();
            assert!(
                residual < 1e-9 * (1.0 + m.frobenius_norm()),
                "dim {dim}: reconstruction {residual:e}"
            );
        }
    }
}

#[test]
fn degenerate_spectra_cluster_to_matching_rank() {
    let mut rng = rng_for(4000);
    let basis = hermitian_eig(&random_hermitian(4, &mut rng)).unwrap();
    // Two doubly degenerate eigenvalues, rotated away from the standard axes.
    let mut m = ComplexMatrix::zeros(4);
    for (k, &lambda) in [1.0, 1.0, 3.0, 3.0].iter().enumerate() {
        let v = basis.eigenvector(k);
        m = &m + &v.outer(&v).scale(lambda);
    }
    let parts = spectral_projections(&m.symmetrized(), tolerance().cluster_tol).unwrap();
    assert_eq!(parts.len(), 2);
    for (_, p) in &parts {
        assert!((p.trace_re() - 2.0).abs() < 1e-10);
    }
}

fn hermitian_from_triangle(dim: usize, diag: &[f64], upper: &[(f64, f64)]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    let mut idx = 0;
    for i in 0..dim {
        m[(i, i)] = Complex64::new(diag[i], 0.0);
        for j in (i + 1)..dim {
            let (re, im) = upper[idx];
            idx += 1;
            m[(i, j)] = Complex64::new(re, im);
            m[(j, i)] = Complex64::new(re, -im);
        }
    }
    m
}

proptest! {
    #[test]
    fn arbitrary_hermitian_matrices_decompose(
        diag in prop::collection::vec(-10.0..10.0f64, 3),
        upper in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 3),
    ) {
        let m = hermitian_from_triangle(3, &diag, &upper);
        let eig = hermitian_eig(&m).unwrap();
        let residual = (&eig.reconstruct() - &m).frobenius_norm();
        prop_assert!(residual < 1e-9 * (1.0 + m.frobenius_norm()));
        let trace: f64 = diag.iter().sum();
        let spectral_sum: f64 = eig.eigenvalues.iter().sum();
        prop_assert!((trace - spectral_sum).abs() < 1e-9 * (1.0 + trace.abs()));
    }

    #[test]
    fn square_roots_of_diagonal_scalings_match_entrywise(
        entries in prop::collection::vec(0.0..4.0f64, 4),
    ) {
        let m = ComplexMatrix::diag_real(&entries);
        let root = psd_sqrt(&m).unwrap();
        for (i, &x) in entries.iter().enumerate() {
            prop_assert!((root[(i, i)].re - x.sqrt()).abs() < 1e-12);
        }
    }
}
