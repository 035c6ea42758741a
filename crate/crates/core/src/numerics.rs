//! Dense complex linear algebra sized for small Hilbert spaces.
//!
//! Everything downstream works with square matrices of dimension at most a
//! few dozen, so the representation is a flat row-major `Vec<Complex64>` and
//! the eigensolver is a cyclic Jacobi iteration rather than a binding to an
//! external LAPACK. Jacobi on Hermitian input is unconditionally stable,
//! deterministic, and accurate to a few ulps at these sizes, which is what
//! the identity checks in the rest of the crate rely on.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex;

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

/// Comparison and validation thresholds shared by the whole process.
///
/// `atol` is the general absolute tolerance, `eig_clamp` bounds how far an
/// eigenvalue may stray outside its admissible interval before the input is
/// rejected, and `cluster_tol` is the gap below which eigenvalues are
/// considered degenerate when grouping spectral projections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy {
    pub atol: f64,
    pub eig_clamp: f64,
    pub cluster_tol: f64,
}

impl TolerancePolicy {
    pub fn new(atol: f64, eig_clamp: f64, cluster_tol: f64) -> Result<Self> {
        let policy = TolerancePolicy { atol, eig_clamp, cluster_tol };
        policy.validate()?;
        Ok(policy)
    }

    /// Policy with `atol` replaced, keeping `eig_clamp` no larger than a
    /// tenth of it so validation slack stays below comparison slack.
    pub fn with_atol(atol: f64) -> Result<Self> {
        let base = TolerancePolicy::default();
        TolerancePolicy::new(atol, base.eig_clamp.min(atol * 0.1), base.cluster_tol)
    }

    fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("atol", self.atol),
            ("eig_clamp", self.eig_clamp),
            ("cluster_tol", self.cluster_tol),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidTolerance {
                    reason: format!("{name} must be a finite positive number, got {value:e}"),
                });
            }
        }
        if self.eig_clamp > self.atol {
            return Err(Error::InvalidTolerance {
                reason: format!(
                    "eig_clamp ({:e}) must not exceed atol ({:e})",
                    self.eig_clamp, self.atol
                ),
            });
        }
        Ok(())
    }
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy { atol: 1e-9, eig_clamp: 1e-10, cluster_tol: 1e-8 }
    }
}

static GLOBAL_TOLERANCE: OnceLock<TolerancePolicy> = OnceLock::new();

/// The process-wide tolerance policy, fixing the defaults on first use.
pub fn tolerance() -> TolerancePolicy {
    *GLOBAL_TOLERANCE.get_or_init(TolerancePolicy::default)
}

/// Installs a policy for the whole process. Must happen before anything else
/// reads [`tolerance`], and at most once.
pub fn install_tolerance(policy: TolerancePolicy) -> Result<()> {
    policy.validate()?;
    GLOBAL_TOLERANCE.set(policy).map_err(|_| Error::ToleranceAlreadyInstalled)
}

/// Column vector over `Complex64`.
#[derive(Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Self {
        ComplexVector { data }
    }

    pub fn from_real(values: &[f64]) -> Self {
        ComplexVector { data: values.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    /// Standard basis vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim];
        data[i] = Complex64::new(1.0, 0.0);
        ComplexVector { data }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inner product, conjugate-linear in `self`.
    pub fn inner(&self, other: &ComplexVector) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// Rank-one matrix `|self⟩⟨other|`.
    pub fn outer(&self, other: &ComplexVector) -> ComplexMatrix {
        let dim = self.dim();
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = self.data[i] * other.data[j].conj();
            }
        }
        m
    }

    pub fn scale(&self, factor: Complex64) -> ComplexVector {
        ComplexVector { data: self.data.iter().map(|z| z * factor).collect() }
    }

    /// Unit vector along `self`; fails on numerically zero input.
    pub fn normalized(&self) -> Result<ComplexVector> {
        let norm = self.norm();
        if norm <= tolerance().atol {
            return Err(Error::ZeroVector { norm });
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.data[i]
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexVector[")?;
        for (i, z) in self.data.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
        }
        write!(f, "]")
    }
}

/// Square matrix over `Complex64`, stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::ShapeMismatch {
                reason: format!("expected {dim}x{dim} = {} entries, got {}", dim * dim, data.len()),
            });
        }
        let m = ComplexMatrix { dim, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::ShapeMismatch { reason: "matrix rows have unequal lengths".into() });
        }
        ComplexMatrix::new(dim, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let converted: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        ComplexMatrix::from_rows(&converted)
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let dim = values.len();
        let mut m = ComplexMatrix::zeros(dim);
        for (i, &x) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_finite(&self) -> Result<()> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NotFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn trace_re(&self) -> f64 {
        self.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance from `self` to its adjoint.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                sum += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// Hermitian part `(M + M†)/2`. Leaves a matrix that is already
    /// entrywise Hermitian bit-for-bit unchanged.
    pub fn symmetrized(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim);
        for i in 0..self.dim {
            m[(i, i)] = Complex64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..self.dim {
                let avg = (self[(i, j)] + self[(j, i)].conj()).scale(0.5);
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        m
    }

    pub fn scale(&self, factor: f64) -> ComplexMatrix {
        self.scale_complex(Complex64::new(factor, 0.0))
    }

    pub fn scale_complex(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn matvec(&self, v: &ComplexVector) -> ComplexVector {
        debug_assert_eq!(self.dim, v.dim());
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for i in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.dim {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        ComplexVector::new(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions must agree");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions must agree");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions must agree");
        let dim = self.dim;
        let mut out = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for k in 0..dim {
                let aik = self[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..dim {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:>12.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// the matching orthonormal eigenvectors as matrix columns.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn eigenvector(&self, i: usize) -> ComplexVector {
        let dim = self.eigenvectors.dim();
        ComplexVector::new((0..dim).map(|r| self.eigenvectors[(r, i)]).collect())
    }

    /// `U diag(λ) U†`, for checking residuals.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.eigenvectors.dim();
        let mut m = ComplexMatrix::zeros(dim);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvector(k);
            m = &m + &v.outer(&v).scale(lambda);
        }
        m
    }
}

const MAX_JACOBI_SWEEPS: usize = 64;

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let dim = m.dim();
    let mut sum = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                sum += m[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input must be Hermitian within `atol`; it is symmetrized before the
/// iteration so the rotations see an exactly Hermitian matrix. Eigenvalues
/// come back sorted ascending with ties broken by original diagonal order,
/// which keeps the decomposition deterministic.
pub fn hermitian_eig(matrix: &ComplexMatrix) -> Result<HermitianEig> {
    let deviation = matrix.hermitian_deviation();
    let scale = 1.0 + matrix.frobenius_norm();
    if deviation > tolerance().atol * scale {
        return Err(Error::NotHermitian { deviation });
    }

    let dim = matrix.dim();
    let mut a = matrix.symmetrized();
    let mut v = ComplexMatrix::identity(dim);

    if dim > 1 {
        let target = (dim as f64) * f64::EPSILON * scale;
        let mut converged = false;
        for _ in 0..MAX_JACOBI_SWEEPS {
            if off_diagonal_norm(&a) <= target {
                converged = true;
                break;
            }
            for p in 0..dim - 1 {
                for q in p + 1..dim {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
        if !converged && off_diagonal_norm(&a) > target {
            return Err(Error::DidNotConverge { sweeps: MAX_JACOBI_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues").then(i.cmp(&j))
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(dim);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..dim {
            eigenvectors[(row, col)] = v[(row, src)];
        }
    }

    Ok(HermitianEig { eigenvalues, eigenvectors })
}

/// One Jacobi rotation zeroing the (p, q) entry of the Hermitian matrix `a`,
/// accumulating the rotation into `v`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let beta = a[(p, q)];
    let mag = beta.norm();
    if mag == 0.0 {
        return;
    }
    let alpha = a[(p, p)].re;
    let gamma = a[(q, q)].re;
    let phase = beta / mag;

    // Classic symmetric Jacobi angle for the 2x2 block, with the complex
    // phase of the pivot folded into the sine.
    let tau = (gamma - alpha) / (2.0 * mag);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = phase * (t * c);

    let dim = a.dim();
    for r in 0..dim {
        if r == p || r == q {
            continue;
        }
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        let new_rp = arp * c - arq * s.conj();
        let new_rq = arp * s + arq * c;
        a[(r, p)] = new_rp;
        a[(r, q)] = new_rq;
        a[(p, r)] = new_rp.conj();
        a[(q, r)] = new_rq.conj();
    }
    a[(p, p)] = Complex64::new(alpha - t * mag, 0.0);
    a[(q, q)] = Complex64::new(gamma + t * mag, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);

    for r in 0..dim {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * c - vrq * s.conj();
        v[(r, q)] = vrp * s + vrq * c;
    }
}

/// Positive-semidefinite square root `M^{1/2}`.
///
/// Eigenvalues may dip below zero by at most `eig_clamp`; they are clamped
/// to zero before the root is assembled, and anything lower is rejected.
/// Positive eigenvalues at the eigensolver's noise floor are also snapped
/// to zero: the square root is not Lipschitz at 0, so a 1e−16 eigenvalue
/// that should be exactly zero would otherwise inject a 1e−8 component
/// into the root.
pub fn psd_sqrt(matrix: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(matrix)?;
    let clamp = tolerance().eig_clamp;
    if let Some(&min) = eig.eigenvalues.first() {
        if min < -clamp {
            return Err(Error::NotPSD { min_eigenvalue: min });
        }
    }
    let dim = matrix.dim();
    let noise_floor = dim as f64 * f64::EPSILON * (1.0 + matrix.frobenius_norm());
    let mut root = ComplexMatrix::zeros(dim);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= noise_floor {
            continue;
        }
        let v = eig.eigenvector(k);
        root = &root + &v.outer(&v).scale(lambda.sqrt());
    }
    Ok(root.symmetrized())
}

/// Spectral decomposition as (eigenvalue, orthogonal projection) pairs in
/// ascending eigenvalue order.
///
/// Eigenvalues closer than `cluster_tol` to their neighbor are merged into
/// one projection onto the combined eigenspace, reported at the cluster
/// mean. This keeps nearly-degenerate spectra from splitting into spurious
/// rank-one pieces.
pub fn spectral_projections(
    matrix: &ComplexMatrix,
    cluster_tol: f64,
) -> Result<Vec<(f64, ComplexMatrix)>> {
    let eig = hermitian_eig(matrix)?;
    let dim = matrix.dim();
    let mut result = Vec::new();
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && eig.eigenvalues[end] - eig.eigenvalues[end - 1] <= cluster_tol {
            end += 1;
        }
        let mean =
            eig.eigenvalues[start..end].iter().sum::<f64>() / ((end - start) as f64);
        let mut projection = ComplexMatrix::zeros(dim);
        for k in start..end {
            let v = eig.eigenvector(k);
            projection = &projection + &v.outer(&v);
        }
        result.push((mean, projection.symmetrized()));
        start = end;
    }
    Ok(result)
}

/// Whether two matrices agree within `atol`, scaled by their magnitude:
/// `‖M − N‖_F ≤ atol · (1 + max(‖M‖_F, ‖N‖_F))`.
pub fn approx_equal(m: &ComplexMatrix, n: &ComplexMatrix) -> Result<bool> {
    if m.dim() != n.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), got: n.dim() });
    }
    let diff = (m - n).frobenius_norm();
    let scale = 1.0 + m.frobenius_norm().max(n.frobenius_norm());
    Ok(diff <= tolerance().atol * scale)
}

/// Frobenius distance normalized by `1 + max(‖M‖_F, ‖N‖_F)`, the deviation
/// metric used by the identity checks.
pub fn relative_deviation(m: &ComplexMatrix, n: &ComplexMatrix) -> f64 {
    let diff = (m - n).frobenius_norm();
    diff / (1.0 + m.frobenius_norm().max(n.frobenius_norm()))
}
