//! Second-order representations of complex signals: augmented covariance
//! feasibility, channel augmentation, the real-composite transform, and a
//! seeded Gaussian sampler for empirical validation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::{self, ComplexMatrix, HermitianMatrix, TOL_HERM};

/// The two channel matrices, with unit-covariance proper Gaussian noise
/// assumed at both receivers.
#[derive(Debug, Clone)]
pub struct ChannelPair {
    h_r: ComplexMatrix,
    h_e: ComplexMatrix,
}

impl ChannelPair {
    pub fn new(h_r: ComplexMatrix, h_e: ComplexMatrix) -> Result<Self> {
        matrix::ensure_finite(&h_r)?;
        matrix::ensure_finite(&h_e)?;
        if h_r.ncols() != h_e.ncols() {
            return Err(Error::DimensionError(format!(
                "transmit dimension mismatch: H_r has {} columns, H_e has {}",
                h_r.ncols(),
                h_e.ncols()
            )));
        }
        Ok(Self { h_r, h_e })
    }

    pub fn h_r(&self) -> &ComplexMatrix {
        &self.h_r
    }

    pub fn h_e(&self) -> &ComplexMatrix {
        &self.h_e
    }

    pub fn nt(&self) -> usize {
        self.h_r.ncols()
    }

    pub fn nr(&self) -> usize {
        self.h_r.nrows()
    }

    pub fn ne(&self) -> usize {
        self.h_e.nrows()
    }

    pub fn augmented_r(&self) -> ComplexMatrix {
        augment_channel(&self.h_r)
    }

    pub fn augmented_e(&self) -> ComplexMatrix {
        augment_channel(&self.h_e)
    }

    /// Stacked receiver matrix [H_r; H_e].
    pub fn stacked(&self) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(self.nr() + self.ne(), self.nt());
        h.view_mut((0, 0), (self.nr(), self.nt())).copy_from(&self.h_r);
        h.view_mut((self.nr(), 0), (self.ne(), self.nt())).copy_from(&self.h_e);
        h
    }
}

/// blockdiag(H, H*): the channel seen by the augmented signal (X, X*).
pub fn augment_channel(h: &ComplexMatrix) -> ComplexMatrix {
    let (r, c) = (h.nrows(), h.ncols());
    let mut out = ComplexMatrix::zeros(2 * r, 2 * c);
    out.view_mut((0, 0), (r, c)).copy_from(h);
    out.view_mut((r, c), (r, c)).copy_from(&h.conjugate());
    out
}

/// Covariance and pseudo-covariance of a complex signal, validated jointly
/// feasible: the assembled block matrix [[K, K~], [K~*, K*]] must be PSD.
#[derive(Debug, Clone)]
pub struct AugmentedCovariance {
    k: HermitianMatrix,
    k_tilde: ComplexMatrix,
}

impl AugmentedCovariance {
    pub fn new(k: HermitianMatrix, k_tilde: ComplexMatrix) -> Result<Self> {
        matrix::ensure_finite(&k_tilde)?;
        let n = k.dim();
        if k_tilde.nrows() != n || k_tilde.ncols() != n {
            return Err(Error::DimensionError(format!(
                "covariance is {}x{} but pseudo-covariance is {}x{}",
                n,
                n,
                k_tilde.nrows(),
                k_tilde.ncols()
            )));
        }
        let asym = matrix::max_abs(&(&k_tilde - k_tilde.transpose()));
        if asym > TOL_HERM {
            return Err(Error::NotSymmetric(asym));
        }
        let out = Self { k, k_tilde };
        let assembled = HermitianMatrix::hermitize(out.assembled())?;
        let min_eig = matrix::min_eigenvalue(&assembled);
        if min_eig < -matrix::psd_tolerance(&assembled) {
            return Err(Error::InfeasibleSecondOrder(min_eig));
        }
        Ok(out)
    }

    /// Proper signal: zero pseudo-covariance. Feasible iff K is PSD.
    pub fn proper(k: HermitianMatrix) -> Result<Self> {
        let n = k.dim();
        Self::new(k, ComplexMatrix::zeros(n, n))
    }

    /// Read the blocks back out of an assembled 2n x 2n matrix, averaging the
    /// conjugate-redundant blocks to suppress floating-point drift, then
    /// validate feasibility.
    pub fn from_assembled(m: &ComplexMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() % 2 != 0 {
            return Err(Error::DimensionError(format!(
                "assembled augmented matrix must be square with even dimension, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows() / 2;
        let b11 = m.view((0, 0), (n, n)).into_owned();
        let b12 = m.view((0, n), (n, n)).into_owned();
        let b21 = m.view((n, 0), (n, n)).into_owned();
        let b22 = m.view((n, n), (n, n)).into_owned();
        let k = HermitianMatrix::hermitize((b11 + b22.conjugate()) * Complex64::new(0.5, 0.0))?;
        let kt = (b12 + b21.conjugate()) * Complex64::new(0.5, 0.0);
        let kt = (&kt + kt.transpose()) * Complex64::new(0.5, 0.0);
        Self::new(k, kt)
    }

    pub fn k(&self) -> &HermitianMatrix {
        &self.k
    }

    pub fn k_tilde(&self) -> &ComplexMatrix {
        &self.k_tilde
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    /// [[K, K~], [K~*, K*]].
    pub fn assembled(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(2 * n, 2 * n);
        out.view_mut((0, 0), (n, n)).copy_from(self.k.matrix());
        out.view_mut((0, n), (n, n)).copy_from(&self.k_tilde);
        out.view_mut((n, 0), (n, n)).copy_from(&self.k_tilde.conjugate());
        out.view_mut((n, n), (n, n)).copy_from(&self.k.conjugate());
        out
    }

    pub fn pseudo_norm(&self) -> f64 {
        self.k_tilde.norm()
    }

    pub fn is_proper(&self, tol: f64) -> bool {
        self.pseudo_norm() <= tol
    }
}

/// Validate a (K, K~) pair against the second-order feasibility condition.
pub fn validate_augmented(k: HermitianMatrix, k_tilde: ComplexMatrix) -> Result<AugmentedCovariance> {
    AugmentedCovariance::new(k, k_tilde)
}

/// M_n = [[I, iI], [I, -iI]], satisfying M M^H = M^H M = 2I.
pub fn factor_two_unitary(n: usize) -> ComplexMatrix {
    let i = Complex64::new(0.0, 1.0);
    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(k, k)] = Complex64::new(1.0, 0.0);
        m[(k, n + k)] = i;
        m[(n + k, k)] = Complex64::new(1.0, 0.0);
        m[(n + k, n + k)] = -i;
    }
    m
}

/// The real channel seen by the stacked (Re X, Im X) signal, with the sqrt(2)
/// scaling that keeps the real-composite noises at identity covariance.
#[derive(Debug, Clone)]
pub struct RealCompositeChannel {
    pub h_r: DMatrix<f64>,
    pub h_e: DMatrix<f64>,
}

/// sqrt(2) * [[Re H, -Im H], [Im H, Re H]].
pub fn real_composite(h: &ComplexMatrix) -> DMatrix<f64> {
    let (r, c) = (h.nrows(), h.ncols());
    let s = std::f64::consts::SQRT_2;
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = h[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) => s * z.re,
            (true, false) => -s * z.im,
            (false, true) => s * z.im,
            (false, false) => s * z.re,
        }
    })
}

pub fn to_real_composite(ch: &ChannelPair) -> RealCompositeChannel {
    RealCompositeChannel {
        h_r: real_composite(ch.h_r()),
        h_e: real_composite(ch.h_e()),
    }
}

/// Covariance of the stacked real vector (Re X, Im X): (1/4) M^H K_aug M.
/// Symmetric PSD, with trace equal to trace(K).
pub fn composite_covariance(aug: &AugmentedCovariance) -> DMatrix<f64> {
    let n = aug.dim();
    let m = factor_two_unitary(n);
    let kbar = m.adjoint() * aug.assembled() * &m * Complex64::new(0.25, 0.0);
    let kbar = DMatrix::from_fn(2 * n, 2 * n, |i, j| kbar[(i, j)].re);
    (&kbar + kbar.transpose()) * 0.5
}

/// Zero-mean complex Gaussian draws with the requested second-order
/// statistics, stored column-wise.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    samples: ComplexMatrix,
}

impl SampleBatch {
    pub fn dim(&self) -> usize {
        self.samples.nrows()
    }

    pub fn count(&self) -> usize {
        self.samples.ncols()
    }

    pub fn samples(&self) -> &ComplexMatrix {
        &self.samples
    }
}

/// Draw `count` vectors whose population covariance is exactly (K, K~).
/// The real-composite covariance is factored through its eigendecomposition
/// with small negative eigenvalues clipped, so boundary-feasible rank
/// deficient covariances (the maximally improper case) are sampleable.
/// Deterministic given `seed` (ChaCha8 stream, standard normal draws).
pub fn sample_gaussian(aug: &AugmentedCovariance, count: usize, seed: u64) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::CountError("sample count must be at least 1".into()));
    }
    let n = aug.dim();
    let kbar = composite_covariance(aug);
    let eig = kbar.clone().symmetric_eigen();
    let dims = 2 * n;
    let mut factor = DMatrix::<f64>::zeros(dims, dims);
    for j in 0..dims {
        let l = eig.eigenvalues[j].max(0.0);
        let col = eig.eigenvectors.column(j) * l.sqrt();
        factor.column_mut(j).copy_from(&col);
    }
    let mut rng = crate::instances::rng(seed);
    let mut samples = ComplexMatrix::zeros(n, count);
    let mut z = DVector::<f64>::zeros(dims);
    for c in 0..count {
        for zi in z.iter_mut() {
            *zi = rng.sample::<f64, _>(StandardNormal);
        }
        let xbar = &factor * &z;
        for r in 0..n {
            samples[(r, c)] = Complex64::new(xbar[r], xbar[n + r]);
        }
    }
    Ok(SampleBatch { samples })
}

/// Sample second moments: (1/count) sum x x^H and (1/count) sum x x^T.
/// The covariance estimate is Hermitized by averaging with its adjoint.
pub fn estimate_augmented(batch: &SampleBatch) -> Result<(HermitianMatrix, ComplexMatrix)> {
    if batch.count() < 2 {
        return Err(Error::CountError(format!(
            "need at least 2 samples to estimate, got {}",
            batch.count()
        )));
    }
    let x = batch.samples();
    let scale = Complex64::new(1.0 / batch.count() as f64, 0.0);
    let k_raw = x * x.adjoint() * scale;
    let asym = matrix::max_abs(&(&k_raw - k_raw.adjoint()));
    debug_assert!(asym < 1e-8, "sample covariance asymmetry {asym} indicates a generator bug");
    let k = HermitianMatrix::hermitize(k_raw)?;
    let kt = x * x.transpose() * scale;
    let kt = (&kt + kt.transpose()) * Complex64::new(0.5, 0.0);
    Ok((k, kt))
}

/// The bundled 2x2 example channel used by the comparison experiment, the
/// `reproduce-table` command, and the acceptance suite.
pub fn reference_channel() -> ChannelPair {
    let c = Complex64::new;
    let h_r = ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(1.8, 0.2), c(0.8, 0.0), c(1.5, -0.4), c(-0.8, 1.1)],
    );
    let h_e = ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(0.9, -0.7), c(-1.2, 1.4), c(-0.3, 0.0), c(-1.1, -0.3)],
    );
    ChannelPair::new(h_r, h_e).expect("static channel is valid")
}
