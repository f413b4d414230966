//! Complex dense-matrix substrate: Hermitian/PSD predicates, log-determinants,
//! principal submatrices and the determinant identities used by the rate
//! functionals and solvers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Absolute per-entry tolerance for the Hermitian / symmetric predicates.
pub const TOL_HERM: f64 = 1e-12;

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidMatrix)
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A square complex matrix validated to equal its own conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        ensure_finite(&m)?;
        if !m.is_square() {
            return Err(Error::DimensionError(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let asym = max_abs(&(&m - m.adjoint()));
        if asym > TOL_HERM {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self { m })
    }

    /// Symmetrize by averaging with the conjugate transpose. Used to clean
    /// products that are Hermitian in exact arithmetic.
    pub fn hermitize(m: ComplexMatrix) -> Result<Self> {
        ensure_finite(&m)?;
        if !m.is_square() {
            return Err(Error::DimensionError(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(Self { m: h })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: ComplexMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            m: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        Self {
            m: ComplexMatrix::identity(n, n) * Complex64::new(s, 0.0),
        }
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self {
            m: ComplexMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(d[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.m
    }

    pub fn trace_real(&self) -> f64 {
        self.m.trace().re
    }
}

impl std::ops::Deref for HermitianMatrix {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.m
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues(h: &HermitianMatrix) -> Vec<f64> {
    if h.dim() == 0 {
        return Vec::new();
    }
    let eig = h.matrix().clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

pub fn min_eigenvalue(h: &HermitianMatrix) -> f64 {
    extreme_eigenvalues(h).0
}

/// (smallest, largest) eigenvalue.
pub fn extreme_eigenvalues(h: &HermitianMatrix) -> (f64, f64) {
    let vals = eigenvalues(h);
    (vals[0], vals[vals.len() - 1])
}

pub fn spectral_norm(h: &HermitianMatrix) -> f64 {
    let (lo, hi) = extreme_eigenvalues(h);
    lo.abs().max(hi.abs())
}

/// Definiteness tolerance, scaled by the spectral norm so near-singular
/// random matrices classify stably: 1e-10 * max(1, ||M||_2).
pub fn psd_tolerance(h: &HermitianMatrix) -> f64 {
    1e-10 * spectral_norm(h).max(1.0)
}

pub fn is_psd(h: &HermitianMatrix) -> bool {
    min_eigenvalue(h) >= -psd_tolerance(h)
}

pub fn is_pd(h: &HermitianMatrix) -> bool {
    min_eigenvalue(h) > psd_tolerance(h)
}

/// Natural-log determinant of a positive definite Hermitian matrix via
/// Cholesky factorization.
pub fn logdet_pd(h: &HermitianMatrix) -> Result<f64> {
    // the complex Cholesky can "succeed" on an indefinite matrix by taking
    // complex square roots, so validate that the pivots are essentially real
    // and positive (a complex pivot has modulus dominated by its imaginary part)
    if let Some(chol) = h.matrix().clone().cholesky() {
        let diag = chol.l().diagonal();
        if diag
            .iter()
            .all(|z| z.re.is_finite() && z.re > 0.0 && z.im.abs() <= 1e-8 * z.norm())
        {
            return Ok(2.0 * diag.iter().map(|z| z.re.ln()).sum::<f64>());
        }
    }
    Err(Error::NotPositiveDefinite(min_eigenvalue(h)))
}

/// Hermitian principal square root via unitary eigendecomposition.
/// Eigenvalues slightly below zero (within the PSD tolerance) are clipped.
pub fn hermitian_sqrt(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let tol = psd_tolerance(h);
    let eig = h.matrix().clone().symmetric_eigen();
    let mut d = Vec::with_capacity(h.dim());
    for &l in eig.eigenvalues.iter() {
        if l < -tol {
            return Err(Error::NotPositiveSemidefinite(l));
        }
        d.push(l.max(0.0).sqrt());
    }
    let v = &eig.eigenvectors;
    let root = v * ComplexMatrix::from_fn(h.dim(), h.dim(), |i, j| {
        if i == j {
            Complex64::new(d[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }) * v.adjoint();
    HermitianMatrix::hermitize(root)
}

/// Submatrix with rows and columns restricted to `idx` (0-based), in order.
pub fn principal_submatrix(m: &ComplexMatrix, idx: &[usize]) -> Result<ComplexMatrix> {
    submatrix(m, idx, idx)
}

/// Submatrix with rows from `rows` and columns from `cols` (0-based).
pub fn submatrix(m: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> Result<ComplexMatrix> {
    for &i in rows {
        if i >= m.nrows() {
            return Err(Error::IndexError { index: i, dim: m.nrows() });
        }
    }
    for &j in cols {
        if j >= m.ncols() {
            return Err(Error::IndexError { index: j, dim: m.ncols() });
        }
    }
    Ok(ComplexMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])]))
}

/// Determinant via LU.
pub fn determinant(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::DimensionError(format!(
            "determinant of non-square {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    ensure_finite(m)?;
    Ok(m.determinant())
}

/// Both sides of det(I_m + AB) = det(I_n + BA), as moduli.
pub fn check_sylvester_identity(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<(f64, f64)> {
    if a.ncols() != b.nrows() || a.nrows() != b.ncols() {
        return Err(Error::DimensionError(format!(
            "sylvester pair {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let m = a.nrows();
    let n = a.ncols();
    let lhs = determinant(&(ComplexMatrix::identity(m, m) + a * b))?.norm();
    let rhs = determinant(&(ComplexMatrix::identity(n, n) + b * a))?.norm();
    Ok((lhs, rhs))
}

/// Sequential four-block partition of `[0:k)` with cut points `k1 < k2 < k3 < k`.
/// All four blocks are non-empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionSpec {
    k1: usize,
    k2: usize,
    k3: usize,
    k: usize,
}

impl PartitionSpec {
    pub fn new(k1: usize, k2: usize, k3: usize, k: usize) -> Result<Self> {
        if !(0 < k1 && k1 < k2 && k2 < k3 && k3 < k) {
            return Err(Error::PartitionError(format!(
                "cut points must satisfy 0 < {k1} < {k2} < {k3} < {k}"
            )));
        }
        Ok(Self { k1, k2, k3, k })
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn s1(&self) -> Vec<usize> {
        (0..self.k1).collect()
    }

    pub fn s2(&self) -> Vec<usize> {
        (self.k1..self.k2).collect()
    }

    pub fn s3(&self) -> Vec<usize> {
        (self.k2..self.k3).collect()
    }

    pub fn s4(&self) -> Vec<usize> {
        (self.k3..self.k).collect()
    }

    pub fn union(parts: &[Vec<usize>]) -> Vec<usize> {
        parts.iter().flatten().copied().collect()
    }
}

/// Swap block-rows 2 and 3 and block-columns 2 and 3 of a square matrix
/// partitioned by `part`. A symmetric permutation, so the determinant is
/// unchanged.
pub fn symmetric_block_permute(m: &ComplexMatrix, part: &PartitionSpec) -> Result<ComplexMatrix> {
    if m.nrows() != part.dim() || m.ncols() != part.dim() {
        return Err(Error::PartitionError(format!(
            "partition of dimension {} applied to {}x{} matrix",
            part.dim(),
            m.nrows(),
            m.ncols()
        )));
    }
    let perm = PartitionSpec::union(&[part.s1(), part.s3(), part.s2(), part.s4()]);
    submatrix(m, &perm, &perm)
}
