//! Rate functionals and theorem-level checkers: proper and general secrecy
//! rates, degradedness, the four-block determinant inequality, pointwise
//! dominance of proper signaling in degraded channels, and the min-max
//! objective with its UDL-factorized noise-covariance inverse.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{self, ComplexMatrix, HermitianMatrix, PartitionSpec};
use crate::signal::{AugmentedCovariance, ChannelPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateUnit {
    Nats,
    Bits,
}

impl RateUnit {
    pub fn label(&self) -> &'static str {
        match self {
            RateUnit::Nats => "nats",
            RateUnit::Bits => "bits",
        }
    }
}

impl std::str::FromStr for RateUnit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nats" => Ok(RateUnit::Nats),
            "bits" => Ok(RateUnit::Bits),
            other => Err(Error::ConfigError(format!("unknown rate unit '{other}'"))),
        }
    }
}

/// A rate with its reporting unit. Internal computation is always in nats;
/// conversion to bits happens once, at the reporting layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateValue {
    value: f64,
    unit: RateUnit,
}

impl RateValue {
    pub fn nats(value: f64) -> Self {
        Self {
            value,
            unit: RateUnit::Nats,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn unit(&self) -> RateUnit {
        self.unit
    }

    pub fn in_nats(&self) -> f64 {
        match self.unit {
            RateUnit::Nats => self.value,
            RateUnit::Bits => self.value * std::f64::consts::LN_2,
        }
    }

    pub fn in_bits(&self) -> f64 {
        self.in_nats() / std::f64::consts::LN_2
    }

    pub fn in_unit(&self, unit: RateUnit) -> f64 {
        match unit {
            RateUnit::Nats => self.in_nats(),
            RateUnit::Bits => self.in_bits(),
        }
    }
}

/// ln det(I + H K H^H), evaluated through the Hermitized product.
pub(crate) fn logdet_i_plus_hkh(h: &ComplexMatrix, k: &ComplexMatrix) -> f64 {
    let m = h.nrows();
    let prod = ComplexMatrix::identity(m, m) + h * k * h.adjoint();
    let herm = HermitianMatrix::hermitize(prod).expect("I + HKH^H is finite");
    matrix::logdet_pd(&herm).expect("I + PSD is positive definite")
}

/// ln |det(M)| for a general square complex matrix.
pub(crate) fn logdet_modulus(m: &ComplexMatrix) -> f64 {
    matrix::determinant(m).expect("square by construction").norm().ln()
}

fn check_input_covariance(ch: &ChannelPair, k: &HermitianMatrix) -> Result<()> {
    if k.dim() != ch.nt() {
        return Err(Error::DimensionError(format!(
            "covariance is {}x{} but the channel has {} transmit antennas",
            k.dim(),
            k.dim(),
            ch.nt()
        )));
    }
    if !matrix::is_psd(k) {
        return Err(Error::NotPositiveSemidefinite(matrix::min_eigenvalue(k)));
    }
    Ok(())
}

/// Secrecy rate of a proper Gaussian signal with covariance K, in nats:
/// ln det(I + H_r K H_r^H) - ln det(I + H_e K H_e^H).
pub fn proper_rate(ch: &ChannelPair, k: &HermitianMatrix) -> Result<RateValue> {
    check_input_covariance(ch, k)?;
    let val = logdet_i_plus_hkh(ch.h_r(), k.matrix()) - logdet_i_plus_hkh(ch.h_e(), k.matrix());
    Ok(RateValue::nats(val))
}

/// Secrecy rate of a general complex Gaussian signal, via the augmented
/// representation: half the difference of the augmented log-determinants.
/// Coincides with `proper_rate` whenever the pseudo-covariance is zero.
pub fn general_rate(ch: &ChannelPair, aug: &AugmentedCovariance) -> Result<RateValue> {
    if aug.dim() != ch.nt() {
        return Err(Error::DimensionError(format!(
            "augmented covariance dimension {} does not match {} transmit antennas",
            aug.dim(),
            ch.nt()
        )));
    }
    let ku = aug.assembled();
    let val = 0.5
        * (logdet_i_plus_hkh(&ch.augmented_r(), &ku) - logdet_i_plus_hkh(&ch.augmented_e(), &ku));
    Ok(RateValue::nats(val))
}

/// The channel gap H_r^H H_r - H_e^H H_e with its extreme eigenvalues.
/// Degraded means the gap is strictly positive definite.
#[derive(Debug, Clone)]
pub struct DegradednessReport {
    pub delta: HermitianMatrix,
    pub min_eig: f64,
    pub max_eig: f64,
    pub is_degraded: bool,
}

pub fn degradedness(ch: &ChannelPair) -> DegradednessReport {
    let delta = HermitianMatrix::hermitize(
        ch.h_r().adjoint() * ch.h_r() - ch.h_e().adjoint() * ch.h_e(),
    )
    .expect("channel matrices are finite");
    let (min_eig, max_eig) = matrix::extreme_eigenvalues(&delta);
    let is_degraded = min_eig > matrix::psd_tolerance(&delta);
    DegradednessReport {
        delta,
        min_eig,
        max_eig,
        is_degraded,
    }
}

/// Verdict on the four-block determinant-ratio inequality
/// det(K)/det(K(S2 u S4)) <= det(K(S1 u S2))/det(K(S2)) * det(K(S3 u S4))/det(K(S4)),
/// with equality iff the cross block K(S1 u S2, S3 u S4) vanishes.
#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// log(rhs) - log(lhs); zero at equality, positive when strict.
    pub equality_gap: f64,
    /// Frobenius norm of the cross block K(S1 u S2, S3 u S4).
    pub cross_block_norm: f64,
}

pub fn fischer_like(k: &HermitianMatrix, part: &PartitionSpec) -> Result<InequalityReport> {
    if part.dim() != k.dim() {
        return Err(Error::PartitionError(format!(
            "partition of dimension {} applied to {}x{} matrix",
            part.dim(),
            k.dim(),
            k.dim()
        )));
    }
    if !matrix::is_pd(k) {
        return Err(Error::NotPositiveDefinite(matrix::min_eigenvalue(k)));
    }
    let logdet_sub = |idx: &[usize]| -> Result<f64> {
        let sub = matrix::principal_submatrix(k.matrix(), idx)?;
        matrix::logdet_pd(&HermitianMatrix::hermitize(sub)?)
    };
    let s12 = PartitionSpec::union(&[part.s1(), part.s2()]);
    let s34 = PartitionSpec::union(&[part.s3(), part.s4()]);
    let s24 = PartitionSpec::union(&[part.s2(), part.s4()]);
    let lhs_log = matrix::logdet_pd(k)? - logdet_sub(&s24)?;
    let rhs_log = logdet_sub(&s12)? - logdet_sub(&part.s2())? + logdet_sub(&s34)? - logdet_sub(&part.s4())?;
    let lhs = lhs_log.exp();
    let rhs = rhs_log.exp();
    let cross = matrix::submatrix(k.matrix(), &s12, &s34)?;
    Ok(InequalityReport {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9 * rhs.abs().max(1.0),
        equality_gap: rhs_log - lhs_log,
        cross_block_norm: cross.norm(),
    })
}

/// Pointwise dominance of proper signaling in a degraded channel: returns
/// (general rate at (K, K~), proper rate at the same K). The first never
/// exceeds the second.
pub fn degraded_dominance(
    ch: &ChannelPair,
    aug: &AugmentedCovariance,
) -> Result<(RateValue, RateValue)> {
    let report = degradedness(ch);
    if !report.is_degraded {
        return Err(Error::NotDegraded(report.min_eig));
    }
    let general = general_rate(ch, aug)?;
    let proper = proper_rate(ch, aug.k())?;
    Ok((general, proper))
}

/// Cross-correlation between the two receiver noises: block A (and the
/// pseudo block B, zero for proper noise). Feasible when I - A_aug A_aug^H
/// is strictly positive definite with margin 1e-8.
#[derive(Debug, Clone)]
pub struct NoiseCorrelation {
    a: ComplexMatrix,
    b: ComplexMatrix,
}

/// Open-set margin for the noise-correlation feasibility check.
const NOISE_FEAS_MARGIN: f64 = 1e-8;

impl NoiseCorrelation {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        matrix::ensure_finite(&a)?;
        matrix::ensure_finite(&b)?;
        if a.shape() != b.shape() {
            return Err(Error::DimensionError(format!(
                "A is {}x{} but B is {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        let out = Self { a, b };
        let au = out.assembled();
        let n = au.nrows();
        let gram = HermitianMatrix::hermitize(ComplexMatrix::identity(n, n) - &au * au.adjoint())?;
        let min_eig = matrix::min_eigenvalue(&gram);
        if min_eig < NOISE_FEAS_MARGIN {
            return Err(Error::InfeasibleNoiseCorrelation(min_eig));
        }
        Ok(out)
    }

    /// Proper noise coupling: B = 0.
    pub fn proper(a: ComplexMatrix) -> Result<Self> {
        let b = ComplexMatrix::zeros(a.nrows(), a.ncols());
        Self::new(a, b)
    }

    pub fn independent(nr: usize, ne: usize) -> Self {
        Self {
            a: ComplexMatrix::zeros(nr, ne),
            b: ComplexMatrix::zeros(nr, ne),
        }
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn nr(&self) -> usize {
        self.a.nrows()
    }

    pub fn ne(&self) -> usize {
        self.a.ncols()
    }

    /// A_aug = [[A, B], [B*, A*]].
    pub fn assembled(&self) -> ComplexMatrix {
        let (r, c) = (self.nr(), self.ne());
        let mut out = ComplexMatrix::zeros(2 * r, 2 * c);
        out.view_mut((0, 0), (r, c)).copy_from(&self.a);
        out.view_mut((0, c), (r, c)).copy_from(&self.b);
        out.view_mut((r, 0), (r, c)).copy_from(&self.b.conjugate());
        out.view_mut((r, c), (r, c)).copy_from(&self.a.conjugate());
        out
    }
}

/// Inverse of [[I, A], [A^H, I]] assembled from its UDL factors:
/// [[I, 0], [-A^H, I]] diag((I - A A^H)^-1, I) [[I, -A], [0, I]].
pub(crate) fn udl_inverse_of(a: &ComplexMatrix) -> ComplexMatrix {
    let (r, c) = (a.nrows(), a.ncols());
    let n = r + c;
    let ir = ComplexMatrix::identity(r, r);
    let s = HermitianMatrix::hermitize(&ir - a * a.adjoint()).expect("finite");
    let s_inv = s
        .matrix()
        .clone()
        .cholesky()
        .expect("feasibility was checked")
        .inverse();
    let mut lower = ComplexMatrix::identity(n, n);
    lower.view_mut((r, 0), (c, r)).copy_from(&(-a.adjoint()));
    let mut diag = ComplexMatrix::identity(n, n);
    diag.view_mut((0, 0), (r, r)).copy_from(&s_inv);
    let mut upper = ComplexMatrix::identity(n, n);
    upper.view_mut((0, r), (r, c)).copy_from(&(-a));
    lower * diag * upper
}

/// Inverse of the augmented joint-noise covariance Q_aug via the UDL
/// factorization.
pub fn udl_inverse(nc: &NoiseCorrelation) -> ComplexMatrix {
    udl_inverse_of(&nc.assembled())
}

fn effective_gap(h_r: &ComplexMatrix, h_e: &ComplexMatrix, a: &ComplexMatrix) -> ComplexMatrix {
    let nr = h_r.nrows();
    let s = HermitianMatrix::hermitize(ComplexMatrix::identity(nr, nr) - a * a.adjoint())
        .expect("finite");
    let s_inv = s
        .matrix()
        .clone()
        .cholesky()
        .expect("feasibility was checked")
        .inverse();
    let left = h_r.adjoint() - h_e.adjoint() * a.adjoint();
    let right = h_r - a * h_e;
    left * s_inv * right + h_e.adjoint() * h_e
}

/// The augmented min-max inner objective in nats, for a general signal and a
/// generally coupled noise pair: half of
/// ln det[I + ((H_r' - H_e' A')(I - A A^H)^-1 (H_r - A H_e) + H_e' H_e) K_aug]
/// minus ln det(I + H_e_aug K_aug H_e_aug^H), all in augmented variables.
pub fn minmax_objective(
    ch: &ChannelPair,
    nc: &NoiseCorrelation,
    aug: &AugmentedCovariance,
) -> Result<RateValue> {
    if nc.nr() != ch.nr() || nc.ne() != ch.ne() {
        return Err(Error::DimensionError(format!(
            "noise correlation is {}x{} but the channel has n_r={}, n_e={}",
            nc.nr(),
            nc.ne(),
            ch.nr(),
            ch.ne()
        )));
    }
    if aug.dim() != ch.nt() {
        return Err(Error::DimensionError(format!(
            "augmented covariance dimension {} does not match {} transmit antennas",
            aug.dim(),
            ch.nt()
        )));
    }
    let hr_u = ch.augmented_r();
    let he_u = ch.augmented_e();
    let eff = effective_gap(&hr_u, &he_u, &nc.assembled());
    let ku = aug.assembled();
    let nt2 = 2 * ch.nt();
    let first = logdet_modulus(&(ComplexMatrix::identity(nt2, nt2) + eff * &ku));
    let second = logdet_i_plus_hkh(&he_u, &ku);
    Ok(RateValue::nats(0.5 * (first - second)))
}

/// The proper-signal min-max inner objective in nats:
/// ln det(I + Q^-1 H K H^H) - ln det(I + H_e K H_e^H), with H = [H_r; H_e]
/// and Q = [[I, A], [A^H, I]].
pub fn proper_minmax_objective(
    ch: &ChannelPair,
    a: &ComplexMatrix,
    k: &HermitianMatrix,
) -> Result<RateValue> {
    if a.nrows() != ch.nr() || a.ncols() != ch.ne() {
        return Err(Error::DimensionError(format!(
            "noise correlation is {}x{} but the channel has n_r={}, n_e={}",
            a.nrows(),
            a.ncols(),
            ch.nr(),
            ch.ne()
        )));
    }
    check_input_covariance(ch, k)?;
    let nr = ch.nr();
    let gram = HermitianMatrix::hermitize(ComplexMatrix::identity(nr, nr) - a * a.adjoint())?;
    let min_eig = matrix::min_eigenvalue(&gram);
    if min_eig < NOISE_FEAS_MARGIN {
        return Err(Error::InfeasibleNoiseCorrelation(min_eig));
    }
    let h = ch.stacked();
    let q_inv = udl_inverse_of(a);
    let m = ch.nr() + ch.ne();
    let first = logdet_modulus(&(ComplexMatrix::identity(m, m) + q_inv * &h * k.matrix() * h.adjoint()));
    let second = logdet_i_plus_hkh(ch.h_e(), k.matrix());
    Ok(RateValue::nats(first - second))
}

/// Real-composite secrecy rate: half the difference of the log-determinants
/// through the stacked real channel. Equals the augmented-representation rate
/// for the matching covariance.
pub fn real_composite_rate(
    h_r: &nalgebra::DMatrix<f64>,
    h_e: &nalgebra::DMatrix<f64>,
    kbar: &nalgebra::DMatrix<f64>,
) -> f64 {
    let to_c = |m: &nalgebra::DMatrix<f64>| {
        ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| Complex64::new(m[(i, j)], 0.0))
    };
    let kc = to_c(kbar);
    0.5 * (logdet_i_plus_hkh(&to_c(h_r), &kc) - logdet_i_plus_hkh(&to_c(h_e), &kc))
}
