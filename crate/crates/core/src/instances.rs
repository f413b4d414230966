//! Seeded random instance generators for property sweeps and tests.
//!
//! All randomness flows through an explicit ChaCha8 generator so sweeps are
//! reproducible bit-for-bit on a fixed platform.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{self, ComplexMatrix, HermitianMatrix};
use crate::signal::{AugmentedCovariance, ChannelPair};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent stream for instance `i` of a sweep seeded by `seed`.
pub fn stream(seed: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64))
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    let s = scale / std::f64::consts::SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex64::new(s * normal(rng), s * normal(rng)))
}

pub fn random_real(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| scale * normal(rng))
}

/// Random Hermitian positive definite matrix G G^H + 0.1 I.
pub fn random_pd(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    let g = random_complex(rng, n, n, 1.0);
    HermitianMatrix::hermitize(&g * g.adjoint() + ComplexMatrix::identity(n, n) * Complex64::new(0.1, 0.0))
        .expect("finite by construction")
}

/// Random Hermitian (indefinite) matrix.
pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    let g = random_complex(rng, n, n, 1.0);
    HermitianMatrix::hermitize(&g + g.adjoint()).expect("finite by construction")
}

/// Random PSD matrix scaled so its trace is uniform in (0, p].
pub fn random_psd_trace(rng: &mut ChaCha8Rng, n: usize, p: f64) -> HermitianMatrix {
    let g = random_complex(rng, n, n, 1.0);
    let k = &g * g.adjoint();
    let t = k.trace().re;
    let target: f64 = rng.random::<f64>() * p;
    HermitianMatrix::hermitize(k * Complex64::new(target / t.max(1e-12), 0.0)).expect("finite")
}

pub fn random_channel(rng: &mut ChaCha8Rng, nr: usize, ne: usize, nt: usize) -> ChannelPair {
    ChannelPair::new(
        random_complex(rng, nr, nt, 1.0),
        random_complex(rng, ne, nt, 1.0),
    )
    .expect("finite by construction")
}

/// Random degraded channel: H_e is free, H_r is the Hermitian square root of
/// H_e^H H_e plus a random PD gap, so H_r^H H_r - H_e^H H_e > 0 and n_r = n_t.
pub fn random_degraded_channel(rng: &mut ChaCha8Rng, nt: usize, ne: usize) -> ChannelPair {
    let h_e = random_complex(rng, ne, nt, 0.7);
    let gap = random_pd(rng, nt);
    let gram = HermitianMatrix::hermitize(gap.matrix() + h_e.adjoint() * &h_e).expect("finite");
    let h_r = matrix::hermitian_sqrt(&gram).expect("PD by construction").into_inner();
    ChannelPair::new(h_r, h_e).expect("finite")
}

/// Random feasible augmented covariance with trace(K) <= p, generally
/// improper. Built from a random real 2n x 2n PSD matrix pushed through the
/// real-to-complex change of coordinates, which always lands in the feasible
/// set with the conjugate block pattern intact.
pub fn random_feasible_augmented(rng: &mut ChaCha8Rng, n: usize, p: f64) -> AugmentedCovariance {
    let g = random_real(rng, 2 * n, 2 * n, 1.0);
    let kbar = &g * g.transpose();
    let t = kbar.trace();
    let target: f64 = rng.random::<f64>() * p;
    let kbar = kbar * (target / t.max(1e-12));
    let m = crate::signal::factor_two_unitary(n);
    let kbar_c = ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| Complex64::new(kbar[(i, j)], 0.0));
    let assembled = &m * kbar_c * m.adjoint();
    AugmentedCovariance::from_assembled(&assembled).expect("feasible by construction")
}

/// Random noise-correlation block with spectral norm at most `max_norm` (< 1).
pub fn random_contraction(rng: &mut ChaCha8Rng, nr: usize, ne: usize, max_norm: f64) -> ComplexMatrix {
    let a = random_complex(rng, nr, ne, 1.0);
    let svd = a.clone().svd(false, false);
    let top = svd.singular_values.max();
    if top > 0.0 {
        let scale: f64 = rng.random::<f64>() * max_norm / top;
        a * Complex64::new(scale, 0.0)
    } else {
        a
    }
}
