//! Randomized identity and inequality sweeps with parallel execution.
//!
//! Each sweep draws its instances from per-index seeded streams, so the
//! verdicts are identical whether the indices are mapped sequentially or
//! across threads.

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::instances;
use crate::matrix::{self, ComplexMatrix, HermitianMatrix, PartitionSpec};
use crate::rates;
use crate::signal;
use crate::solver;
use num_complex::Complex64;
use rand::Rng;

/// One property sweep: which identity or inequality to exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// det(I + AB) = det(I + BA) for random rectangular pairs.
    Sylvester,
    /// det(blockdiag(A, B)) = det(A) det(B).
    BlockExpansion,
    /// Symmetric block permutation preserves the determinant and is an involution.
    BlockPermute,
    /// The four-block determinant-ratio inequality on random PD matrices,
    /// with equality at block-diagonal instances.
    DeterminantInequality,
    /// General rate never exceeds the proper rate on degraded channels.
    Dominance,
    /// Analytic rate gradients against central finite differences.
    Gradient,
    /// The UDL-factorized inverse of the joint-noise covariance times the
    /// covariance itself is the identity.
    UdlInverse,
    /// M M^H = M^H M = 2I for the real-to-complex change of coordinates.
    FactorTwo,
    /// The general rate at zero pseudo-covariance equals the proper rate.
    ProperReduction,
    /// The augmented-representation rate equals the real-composite rate.
    RealComposite,
}

impl Scope {
    pub fn all() -> &'static [Scope] {
        &[
            Scope::Sylvester,
            Scope::BlockExpansion,
            Scope::BlockPermute,
            Scope::DeterminantInequality,
            Scope::Dominance,
            Scope::Gradient,
            Scope::UdlInverse,
            Scope::FactorTwo,
            Scope::ProperReduction,
            Scope::RealComposite,
        ]
    }

    pub fn label(&self) -> &'static str {
        match self {
            Scope::Sylvester => "sylvester",
            Scope::BlockExpansion => "block-expansion",
            Scope::BlockPermute => "block-permute",
            Scope::DeterminantInequality => "determinant-inequality",
            Scope::Dominance => "dominance",
            Scope::Gradient => "gradient",
            Scope::UdlInverse => "udl-inverse",
            Scope::FactorTwo => "factor-two",
            Scope::ProperReduction => "proper-reduction",
            Scope::RealComposite => "real-composite",
        }
    }

    /// Default instance count used by `check-properties` and the acceptance
    /// suite.
    pub fn default_instances(&self) -> usize {
        match self {
            Scope::DeterminantInequality => 1000,
            Scope::Dominance => 500,
            Scope::Gradient => 50,
            _ => 200,
        }
    }
}

impl std::str::FromStr for Scope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scope::all()
            .iter()
            .find(|sc| sc.label() == s)
            .copied()
            .ok_or_else(|| Error::ConfigError(format!("unknown property scope '{s}'")))
    }
}

/// Aggregate verdict of one sweep.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub name: &'static str,
    pub instances: usize,
    pub failures: usize,
    /// Largest per-instance residual observed (relative where applicable).
    pub worst_gap: f64,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Per-instance outcome: whether the check held and its residual.
type Verdict = (bool, f64);

fn check_sylvester(rng: &mut ChaCha8Rng) -> Verdict {
    let m = rng.random_range(1..=4usize);
    let n = rng.random_range(1..=4usize);
    let a = instances::random_complex(rng, m, n, 1.0);
    let b = instances::random_complex(rng, n, m, 1.0);
    let (l, r) = matrix::check_sylvester_identity(&a, &b).expect("dimensions match");
    let gap = (l - r).abs() / r.abs().max(1.0);
    (gap <= 1e-9, gap)
}

fn check_block_expansion(rng: &mut ChaCha8Rng) -> Verdict {
    let n1 = rng.random_range(1..=3usize);
    let n2 = rng.random_range(1..=3usize);
    let a = instances::random_complex(rng, n1, n1, 1.0);
    let b = instances::random_complex(rng, n2, n2, 1.0);
    let mut blk = ComplexMatrix::zeros(n1 + n2, n1 + n2);
    blk.view_mut((0, 0), (n1, n1)).copy_from(&a);
    blk.view_mut((n1, n1), (n2, n2)).copy_from(&b);
    let lhs = matrix::determinant(&blk).expect("square");
    let rhs = matrix::determinant(&a).expect("square") * matrix::determinant(&b).expect("square");
    let gap = (lhs - rhs).norm() / rhs.norm().max(1.0);
    (gap <= 1e-10, gap)
}

fn random_partition(rng: &mut ChaCha8Rng, dim: usize) -> PartitionSpec {
    loop {
        let mut cuts = [0usize; 3];
        for c in cuts.iter_mut() {
            *c = rng.random_range(1..dim);
        }
        cuts.sort_unstable();
        if cuts[0] < cuts[1] && cuts[1] < cuts[2] {
            return PartitionSpec::new(cuts[0], cuts[1], cuts[2], dim).expect("valid cuts");
        }
    }
}

fn check_block_permute(rng: &mut ChaCha8Rng) -> Verdict {
    let dim = rng.random_range(4..=8usize);
    let part = random_partition(rng, dim);
    let m = instances::random_complex(rng, dim, dim, 1.0);
    let p = matrix::symmetric_block_permute(&m, &part).expect("dimensions match");
    let d0 = matrix::determinant(&m).expect("square");
    let d1 = matrix::determinant(&p).expect("square");
    let gap = (d0 - d1).norm() / d0.norm().max(1.0);
    // the permuted matrix must relate to the original entry-for-entry
    let perm = PartitionSpec::union(&[part.s1(), part.s3(), part.s2(), part.s4()]);
    let entries_ok = (0..dim).all(|i| (0..dim).all(|j| p[(i, j)] == m[(perm[i], perm[j])]));
    (gap <= 1e-9 && entries_ok, gap)
}

fn check_determinant_inequality(rng: &mut ChaCha8Rng) -> Verdict {
    let dim = rng.random_range(4..=8usize);
    let part = random_partition(rng, dim);
    // alternate dense and block-diagonal instances so the equality case is
    // exercised alongside the strict one
    let block_diagonal = rng.random::<f64>() < 0.25;
    let k = if block_diagonal {
        let s12 = PartitionSpec::union(&[part.s1(), part.s2()]);
        let dense = instances::random_pd(rng, dim);
        let mut m = dense.matrix().clone();
        let s34 = PartitionSpec::union(&[part.s3(), part.s4()]);
        for &i in &s12 {
            for &j in &s34 {
                m[(i, j)] = Complex64::new(0.0, 0.0);
                m[(j, i)] = Complex64::new(0.0, 0.0);
            }
        }
        HermitianMatrix::hermitize(m).expect("finite")
    } else {
        instances::random_pd(rng, dim)
    };
    let rep = rates::fischer_like(&k, &part).expect("PD by construction");
    let violation = ((rep.lhs - rep.rhs) / rep.rhs.abs().max(1.0)).max(0.0);
    let mut ok = rep.holds;
    if rep.cross_block_norm < 1e-12 {
        ok &= rep.equality_gap.abs() < 1e-9;
    }
    (ok, violation.max(if ok { 0.0 } else { 1.0 }))
}

fn check_dominance(rng: &mut ChaCha8Rng) -> Verdict {
    let nt = rng.random_range(2..=3usize);
    let ne = rng.random_range(1..=3usize);
    let ch = instances::random_degraded_channel(rng, nt, ne);
    let aug = instances::random_feasible_augmented(rng, nt, 4.0);
    let (g, p) = rates::degraded_dominance(&ch, &aug).expect("degraded by construction");
    let gap = (g.in_nats() - p.in_nats()).max(0.0);
    (gap <= 1e-9, gap)
}

fn check_gradient(rng: &mut ChaCha8Rng) -> Verdict {
    let nt = rng.random_range(2..=3usize);
    let ch = instances::random_channel(rng, 2, 2, nt);
    let k = instances::random_psd_trace(rng, nt, 2.0);
    let g = solver::proper_gradient(&ch, k.matrix());
    let e = instances::random_hermitian(rng, nt);
    let h = 1e-6;
    let obj = |m: &ComplexMatrix| {
        rates::proper_rate(&ch, &HermitianMatrix::hermitize(m.clone()).expect("finite"))
            .map(|r| r.in_nats())
    };
    // shift slightly inside the cone so both finite-difference points are valid
    let base = k.matrix() + ComplexMatrix::identity(nt, nt) * Complex64::new(1e-3, 0.0);
    let fp = obj(&(&base + e.matrix() * Complex64::new(h, 0.0)));
    let fm = obj(&(&base - e.matrix() * Complex64::new(h, 0.0)));
    let (Ok(fp), Ok(fm)) = (fp, fm) else {
        return (true, 0.0);
    };
    let fd = (fp - fm) / (2.0 * h);
    let g_base = solver::proper_gradient(&ch, &base);
    let an: f64 = g_base
        .iter()
        .zip(e.matrix().iter())
        .map(|(x, y)| (x.conj() * y).re)
        .sum();
    let gap = (fd - an).abs() / an.abs().max(1.0);
    let _ = g;
    (gap <= 1e-5, gap)
}

fn check_udl_inverse(rng: &mut ChaCha8Rng) -> Verdict {
    let nr = rng.random_range(1..=3usize);
    let ne = rng.random_range(1..=3usize);
    let a = instances::random_contraction(rng, nr, ne, 0.9);
    let b = instances::random_contraction(rng, nr, ne, 0.15);
    let nc = rates::NoiseCorrelation::new(a.clone(), b)
        .or_else(|_| rates::NoiseCorrelation::proper(a))
        .expect("a strict contraction with zero pseudo block is feasible");
    let au = nc.assembled();
    let (r, c) = au.shape();
    let n = r + c;
    let mut q = ComplexMatrix::identity(n, n);
    q.view_mut((0, r), (r, c)).copy_from(&au);
    q.view_mut((r, 0), (c, r)).copy_from(&au.adjoint());
    let prod = &q * rates::udl_inverse(&nc);
    let gap = matrix::max_abs(&(&prod - ComplexMatrix::identity(n, n)));
    (gap <= 1e-10, gap)
}

fn check_factor_two(rng: &mut ChaCha8Rng) -> Verdict {
    let n = rng.random_range(1..=6usize);
    let m = signal::factor_two_unitary(n);
    let two_i = ComplexMatrix::identity(2 * n, 2 * n) * Complex64::new(2.0, 0.0);
    let gap = matrix::max_abs(&(&m * m.adjoint() - &two_i))
        .max(matrix::max_abs(&(m.adjoint() * &m - &two_i)));
    (gap <= 1e-12, gap)
}

fn check_proper_reduction(rng: &mut ChaCha8Rng) -> Verdict {
    let nt = rng.random_range(1..=3usize);
    let ch = instances::random_channel(rng, 2, 2, nt);
    let k = instances::random_psd_trace(rng, nt, 4.0);
    let aug = signal::AugmentedCovariance::proper(k.clone()).expect("PSD");
    let rg = rates::general_rate(&ch, &aug).expect("valid").in_nats();
    let rp = rates::proper_rate(&ch, &k).expect("valid").in_nats();
    let gap = (rg - rp).abs();
    (gap <= 1e-10, gap)
}

fn check_real_composite(rng: &mut ChaCha8Rng) -> Verdict {
    let nt = rng.random_range(1..=3usize);
    let ch = instances::random_channel(rng, 2, 2, nt);
    let aug = instances::random_feasible_augmented(rng, nt, 4.0);
    let rg = rates::general_rate(&ch, &aug).expect("valid").in_nats();
    let rc = signal::to_real_composite(&ch);
    let kbar = signal::composite_covariance(&aug);
    let rr = rates::real_composite_rate(&rc.h_r, &rc.h_e, &kbar);
    let gap = (rg - rr).abs() / rg.abs().max(1.0);
    (gap <= 1e-9, gap)
}

fn check(scope: Scope, rng: &mut ChaCha8Rng) -> Verdict {
    match scope {
        Scope::Sylvester => check_sylvester(rng),
        Scope::BlockExpansion => check_block_expansion(rng),
        Scope::BlockPermute => check_block_permute(rng),
        Scope::DeterminantInequality => check_determinant_inequality(rng),
        Scope::Dominance => check_dominance(rng),
        Scope::Gradient => check_gradient(rng),
        Scope::UdlInverse => check_udl_inverse(rng),
        Scope::FactorTwo => check_factor_two(rng),
        Scope::ProperReduction => check_proper_reduction(rng),
        Scope::RealComposite => check_real_composite(rng),
    }
}

fn aggregate(scope: Scope, verdicts: Vec<Verdict>) -> SweepReport {
    let instances = verdicts.len();
    let failures = verdicts.iter().filter(|(ok, _)| !ok).count();
    let worst_gap = verdicts.iter().map(|&(_, g)| g).fold(0.0, f64::max);
    SweepReport {
        name: scope.label(),
        instances,
        failures,
        worst_gap,
    }
}

/// Run a sweep with the crate's default execution strategy (parallel when the
/// `parallel` feature is enabled). `inject_fault` forces one synthetic
/// failure; it exists so failure reporting and exit codes can be exercised
/// end to end.
pub fn run_scope(scope: Scope, n: usize, seed: u64, inject_fault: bool) -> SweepReport {
    let verdicts = exec::map_indexed(n, |i| {
        let mut rng = instances::stream(seed, i);
        let (ok, gap) = check(scope, &mut rng);
        if inject_fault && i == 0 {
            (false, gap.max(1.0))
        } else {
            (ok, gap)
        }
    });
    aggregate(scope, verdicts)
}

/// Sequential twin of `run_scope`, used as the benchmark baseline.
pub fn run_scope_seq(scope: Scope, n: usize, seed: u64) -> SweepReport {
    let verdicts = exec::map_indexed_seq(n, |i| {
        let mut rng = instances::stream(seed, i);
        check(scope, &mut rng)
    });
    aggregate(scope, verdicts)
}

/// Run every sweep at its default instance count.
pub fn run_all(seed: u64) -> Vec<SweepReport> {
    Scope::all()
        .iter()
        .map(|&s| run_scope(s, s.default_instances(), seed, false))
        .collect()
}
