//! Optimizers over the input covariance: projected gradient ascent and a
//! difference-of-convex iteration for the proper and general secrecy-rate
//! problems, plus the min-max saddle solver over the joint-noise correlation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::instances;
use crate::matrix::{self, ComplexMatrix, HermitianMatrix};
use crate::rates::{self, RateValue};
use crate::signal::{AugmentedCovariance, ChannelPair};

/// Armijo sufficient-increase coefficient.
const ARMIJO_C: f64 = 1e-4;
/// Backtracking shrink factor.
const STEP_SHRINK: f64 = 0.5;
/// Upper bound on the trial step after growth.
const STEP_MAX: f64 = 1e8;
/// A step below this means the iterate is stationary to machine precision.
const STEP_MIN: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Projected gradient ascent with Armijo backtracking and step growth.
    ProjectedGradient,
    /// Difference-of-convex iteration: linearize the eavesdropper term and
    /// maximize the concave surrogate to high accuracy each outer step.
    DcIteration,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::ProjectedGradient => "pg",
            Method::DcIteration => "dc",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pg" => Ok(Method::ProjectedGradient),
            "dc" => Ok(Method::DcIteration),
            other => Err(Error::ConfigError(format!("unknown solver method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub method: Method,
    pub max_iters: usize,
    /// Stop when the objective increase of one (outer) iteration falls below
    /// this threshold, in nats.
    pub tol_increase: f64,
    pub step_init: f64,
    pub seed: u64,
    /// Start from a seeded random feasible point instead of the white signal.
    pub random_start: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::ProjectedGradient,
            max_iters: 20_000,
            tol_increase: 1e-5,
            step_init: 1.0,
            seed: 0,
            random_start: false,
        }
    }
}

/// Transmit power budget P: trace(K) <= P, and trace(K_aug) <= 2P in the
/// augmented representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBudget {
    p: f64,
}

impl PowerBudget {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::ConfigError(format!("power budget must be positive, got {p}")));
        }
        Ok(Self { p })
    }

    /// Budget from per-real-dimension SNR in dB: P = 2 * 10^(snr/10).
    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        Self::new(2.0 * 10f64.powf(snr_db / 10.0))
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn augmented(&self) -> f64 {
        2.0 * self.p
    }
}

/// Objective values of the accepted iterates, in nats, starting with the
/// initial point.
#[derive(Debug, Clone)]
pub struct ConvergenceTrace {
    pub objectives: Vec<f64>,
    pub converged: bool,
}

impl ConvergenceTrace {
    pub fn iterations(&self) -> usize {
        self.objectives.len().saturating_sub(1)
    }

    pub fn terminal(&self) -> f64 {
        *self.objectives.last().expect("trace records the initial point")
    }
}

#[derive(Debug, Clone)]
pub struct ProperSolution {
    pub k: HermitianMatrix,
    pub rate: RateValue,
    pub trace: ConvergenceTrace,
}

#[derive(Debug, Clone)]
pub struct GeneralSolution {
    pub aug: AugmentedCovariance,
    pub rate: RateValue,
    pub trace: ConvergenceTrace,
}

#[derive(Debug, Clone)]
pub struct SaddleSolution {
    pub a: ComplexMatrix,
    pub k: HermitianMatrix,
    pub value: RateValue,
    pub trace: ConvergenceTrace,
}

/// Euclidean projection onto {K >= 0, trace(K) <= p}: clip negative
/// eigenvalues, then shift the spectrum down uniformly (rescanning the active
/// set by bisection) until the trace budget is met.
pub fn project_to_budget(h: &HermitianMatrix, p: f64) -> HermitianMatrix {
    let n = h.dim();
    let eig = h.matrix().clone().symmetric_eigen();
    let lambda: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let clipped_sum: f64 = lambda.iter().map(|l| l.max(0.0)).sum();
    let mu = if clipped_sum <= p {
        0.0
    } else {
        let mut lo = 0.0_f64;
        let mut hi = lambda.iter().copied().fold(0.0, f64::max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let s: f64 = lambda.iter().map(|l| (l - mid).max(0.0)).sum();
            if s > p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let v = &eig.eigenvectors;
    let d = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new((lambda[i] - mu).max(0.0), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    HermitianMatrix::hermitize(v * d * v.adjoint()).expect("projection of a finite matrix")
}

/// Project an assembled augmented matrix onto the feasible set: PSD with
/// augmented trace at most `budget_aug`, with the conjugate block pattern
/// restored by averaging.
pub fn project_augmented(m: &ComplexMatrix, budget_aug: f64) -> Result<AugmentedCovariance> {
    let h = HermitianMatrix::hermitize(m.clone())?;
    let projected = project_to_budget(&h, budget_aug);
    AugmentedCovariance::from_assembled(projected.matrix())
}

fn real_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// (I + H K H^H)^-1 via Cholesky of the Hermitized sum.
fn gram_inverse(h: &ComplexMatrix, k: &ComplexMatrix) -> ComplexMatrix {
    let m = h.nrows();
    let a = HermitianMatrix::hermitize(ComplexMatrix::identity(m, m) + h * k * h.adjoint())
        .expect("finite iterate");
    a.matrix()
        .clone()
        .cholesky()
        .expect("I + H K H^H is positive definite for PSD K")
        .inverse()
}

struct AscentOutcome {
    x: ComplexMatrix,
    objectives: Vec<f64>,
    converged: bool,
}

/// Projected gradient ascent with Armijo backtracking. The accepted step is
/// doubled (within [1, 1e8]) to seed the next line search, so the method
/// recovers long steps on flat ridges instead of stalling at the paper-thin
/// per-iteration increase threshold.
fn projected_ascent(
    x0: ComplexMatrix,
    objective: &dyn Fn(&ComplexMatrix) -> f64,
    gradient: &dyn Fn(&ComplexMatrix) -> ComplexMatrix,
    project: &dyn Fn(&ComplexMatrix) -> ComplexMatrix,
    max_iters: usize,
    tol: f64,
    step_init: f64,
) -> AscentOutcome {
    let mut x = project(&x0);
    let mut f0 = objective(&x);
    let mut objectives = vec![f0];
    let mut last_step: Option<f64> = None;
    for _ in 0..max_iters {
        let g = gradient(&x);
        let mut t = last_step
            .map(|s| (2.0 * s).clamp(1.0, STEP_MAX))
            .unwrap_or(step_init);
        let t_first = t;
        let mut accepted = None;
        while t >= STEP_MIN {
            let cand = project(&(&x + &g * Complex64::new(t, 0.0)));
            let delta = &cand - &x;
            let f1 = objective(&cand);
            if f1.is_finite() && f1 >= f0 + ARMIJO_C * real_inner(&g, &delta) {
                accepted = Some((cand, f1, t));
                break;
            }
            t *= STEP_SHRINK;
        }
        // forward-track: if the first trial step already satisfied Armijo,
        // keep doubling while the objective keeps improving, so the search
        // does not stall on a conservative step at a flat region
        if let Some((_, f1, t1)) = &accepted {
            if *t1 == t_first {
                let (mut f1, mut t1) = (*f1, *t1);
                while 2.0 * t1 <= STEP_MAX {
                    let t2 = 2.0 * t1;
                    let cand2 = project(&(&x + &g * Complex64::new(t2, 0.0)));
                    let delta2 = &cand2 - &x;
                    let f2 = objective(&cand2);
                    if f2.is_finite()
                        && f2 > f1
                        && f2 >= f0 + ARMIJO_C * real_inner(&g, &delta2)
                    {
                        accepted = Some((cand2, f2, t2));
                        f1 = f2;
                        t1 = t2;
                    } else {
                        break;
                    }
                }
            }
        }
        let Some((cand, f1, t)) = accepted else {
            // stationary: no feasible ascent direction at machine precision
            return AscentOutcome { x, objectives, converged: true };
        };
        let gain = f1 - f0;
        x = cand;
        f0 = f1;
        objectives.push(f1);
        last_step = Some(t);
        if gain < tol {
            return AscentOutcome { x, objectives, converged: true };
        }
    }
    AscentOutcome { x, objectives, converged: false }
}

fn proper_objective(ch: &ChannelPair, k: &ComplexMatrix) -> f64 {
    rates::logdet_i_plus_hkh(ch.h_r(), k) - rates::logdet_i_plus_hkh(ch.h_e(), k)
}

/// Gradient of the proper rate at K:
/// H_r^H (I + H_r K H_r^H)^-1 H_r - H_e^H (I + H_e K H_e^H)^-1 H_e.
pub fn proper_gradient(ch: &ChannelPair, k: &ComplexMatrix) -> ComplexMatrix {
    let wr = gram_inverse(ch.h_r(), k);
    let we = gram_inverse(ch.h_e(), k);
    let g = ch.h_r().adjoint() * wr * ch.h_r() - ch.h_e().adjoint() * we * ch.h_e();
    HermitianMatrix::hermitize(g).expect("finite iterate").into_inner()
}

/// Gradient of the general rate with respect to the assembled augmented
/// covariance (half the augmented channel difference).
pub fn general_gradient(ch: &ChannelPair, ku: &ComplexMatrix) -> ComplexMatrix {
    let hr = ch.augmented_r();
    let he = ch.augmented_e();
    let wr = gram_inverse(&hr, ku);
    let we = gram_inverse(&he, ku);
    let g = (hr.adjoint() * wr * hr - he.adjoint() * we * he) * Complex64::new(0.5, 0.0);
    HermitianMatrix::hermitize(g).expect("finite iterate").into_inner()
}

fn initial_proper(ch: &ChannelPair, budget: &PowerBudget, cfg: &SolverConfig) -> ComplexMatrix {
    if cfg.random_start {
        let mut rng = instances::rng(cfg.seed);
        instances::random_psd_trace(&mut rng, ch.nt(), budget.p()).into_inner()
    } else {
        ComplexMatrix::identity(ch.nt(), ch.nt()) * Complex64::new(budget.p() / ch.nt() as f64, 0.0)
    }
}

fn initial_augmented(ch: &ChannelPair, budget: &PowerBudget, cfg: &SolverConfig) -> ComplexMatrix {
    if cfg.random_start {
        let mut rng = instances::rng(cfg.seed);
        instances::random_feasible_augmented(&mut rng, ch.nt(), budget.p()).assembled()
    } else {
        AugmentedCovariance::proper(HermitianMatrix::scaled_identity(
            ch.nt(),
            budget.p() / ch.nt() as f64,
        ))
        .expect("white start is feasible")
        .assembled()
    }
}

/// Difference-of-convex outer loop: at each outer iterate, freeze the
/// eavesdropper log-determinant at its tangent and maximize the resulting
/// concave surrogate with the inner ascent engine to a tenth of the outer
/// tolerance.
#[allow(clippy::too_many_arguments)]
fn dc_iterate(
    x0: ComplexMatrix,
    true_objective: &dyn Fn(&ComplexMatrix) -> f64,
    eve_tangent: &dyn Fn(&ComplexMatrix) -> ComplexMatrix,
    concave_logdet: &dyn Fn(&ComplexMatrix) -> f64,
    concave_gradient: &dyn Fn(&ComplexMatrix) -> ComplexMatrix,
    project: &dyn Fn(&ComplexMatrix) -> ComplexMatrix,
    cfg: &SolverConfig,
) -> AscentOutcome {
    let mut x = project(&x0);
    let mut f0 = true_objective(&x);
    let mut objectives = vec![f0];
    for _ in 0..cfg.max_iters {
        let ge = eve_tangent(&x);
        let surrogate = |k: &ComplexMatrix| concave_logdet(k) - real_inner(&ge, k);
        let surrogate_grad = |k: &ComplexMatrix| concave_gradient(k) - &ge;
        let inner = projected_ascent(
            x.clone(),
            &surrogate,
            &surrogate_grad,
            project,
            2_000,
            cfg.tol_increase / 10.0,
            cfg.step_init,
        );
        x = inner.x;
        let f1 = true_objective(&x);
        let gain = f1 - f0;
        f0 = f1;
        objectives.push(f1);
        if gain < cfg.tol_increase {
            return AscentOutcome { x, objectives, converged: true };
        }
    }
    AscentOutcome { x, objectives, converged: false }
}

/// Maximize the proper-signal secrecy rate over {K >= 0, trace(K) <= P}.
pub fn maximize_proper(
    ch: &ChannelPair,
    budget: &PowerBudget,
    cfg: &SolverConfig,
) -> Result<ProperSolution> {
    let p = budget.p();
    let project = |k: &ComplexMatrix| {
        project_to_budget(
            &HermitianMatrix::hermitize(k.clone()).expect("finite iterate"),
            p,
        )
        .into_inner()
    };
    let objective = |k: &ComplexMatrix| proper_objective(ch, k);
    let x0 = initial_proper(ch, budget, cfg);
    let outcome = match cfg.method {
        Method::ProjectedGradient => projected_ascent(
            x0,
            &objective,
            &|k| proper_gradient(ch, k),
            &project,
            cfg.max_iters,
            cfg.tol_increase,
            cfg.step_init,
        ),
        Method::DcIteration => dc_iterate(
            x0,
            &objective,
            &|k| {
                let we = gram_inverse(ch.h_e(), k);
                HermitianMatrix::hermitize(ch.h_e().adjoint() * we * ch.h_e())
                    .expect("finite iterate")
                    .into_inner()
            },
            &|k| rates::logdet_i_plus_hkh(ch.h_r(), k),
            &|k| {
                let wr = gram_inverse(ch.h_r(), k);
                HermitianMatrix::hermitize(ch.h_r().adjoint() * wr * ch.h_r())
                    .expect("finite iterate")
                    .into_inner()
            },
            &project,
            cfg,
        ),
    };
    let k = HermitianMatrix::hermitize(outcome.x)?;
    let rate = RateValue::nats(outcome.objectives.last().copied().unwrap_or(0.0));
    Ok(ProperSolution {
        k,
        rate,
        trace: ConvergenceTrace {
            objectives: outcome.objectives,
            converged: outcome.converged,
        },
    })
}

/// Maximize the general-signal secrecy rate over feasible (K, K~) with
/// trace(K) <= P, working in the assembled augmented representation.
pub fn maximize_general(
    ch: &ChannelPair,
    budget: &PowerBudget,
    cfg: &SolverConfig,
) -> Result<GeneralSolution> {
    let budget_aug = budget.augmented();
    let project = |ku: &ComplexMatrix| {
        project_augmented(ku, budget_aug)
            .expect("projection lands in the feasible set")
            .assembled()
    };
    let hr = ch.augmented_r();
    let he = ch.augmented_e();
    let objective = |ku: &ComplexMatrix| {
        0.5 * (rates::logdet_i_plus_hkh(&hr, ku) - rates::logdet_i_plus_hkh(&he, ku))
    };
    let x0 = initial_augmented(ch, budget, cfg);
    let outcome = match cfg.method {
        Method::ProjectedGradient => projected_ascent(
            x0,
            &objective,
            &|ku| general_gradient(ch, ku),
            &project,
            cfg.max_iters,
            cfg.tol_increase,
            cfg.step_init,
        ),
        Method::DcIteration => dc_iterate(
            x0,
            &objective,
            &|ku| {
                let we = gram_inverse(&he, ku);
                HermitianMatrix::hermitize(he.adjoint() * we * &he)
                    .expect("finite iterate")
                    .into_inner()
                    * Complex64::new(0.5, 0.0)
            },
            &|ku| 0.5 * rates::logdet_i_plus_hkh(&hr, ku),
            &|ku| {
                let wr = gram_inverse(&hr, ku);
                HermitianMatrix::hermitize(hr.adjoint() * wr * &hr)
                    .expect("finite iterate")
                    .into_inner()
                    * Complex64::new(0.5, 0.0)
            },
            &project,
            cfg,
        ),
    };
    let aug = AugmentedCovariance::from_assembled(&outcome.x)?;
    let rate = RateValue::nats(outcome.objectives.last().copied().unwrap_or(0.0));
    Ok(GeneralSolution {
        aug,
        rate,
        trace: ConvergenceTrace {
            objectives: outcome.objectives,
            converged: outcome.converged,
        },
    })
}

/// Clip the singular values of A so that I - A A^H stays positive definite
/// with margin 1e-6 on the squared singular values.
fn project_contraction(a: &ComplexMatrix) -> ComplexMatrix {
    let cap = (1.0 - 1e-6_f64).sqrt();
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let r = svd.singular_values.len();
    let d = ComplexMatrix::from_fn(r, r, |i, j| {
        if i == j {
            Complex64::new(svd.singular_values[i].min(cap), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    u * d * v_t
}

fn noise_q(a: &ComplexMatrix) -> ComplexMatrix {
    let (nr, ne) = (a.nrows(), a.ncols());
    let n = nr + ne;
    let mut q = ComplexMatrix::identity(n, n);
    q.view_mut((0, nr), (nr, ne)).copy_from(a);
    q.view_mut((nr, 0), (ne, nr)).copy_from(&a.adjoint());
    q
}

/// Solve the min-max problem min_A max_K of the joint-noise inner objective,
/// with A ranging over strict contractions and K over the power-budget set.
/// Outer: projected gradient descent on A with the envelope gradient at the
/// inner maximizer. Inner: full projected-gradient maximization over K.
pub fn saddle_solve(
    ch: &ChannelPair,
    budget: &PowerBudget,
    cfg: &SolverConfig,
) -> Result<SaddleSolution> {
    let p = budget.p();
    let h = ch.stacked();
    let project_k = |k: &ComplexMatrix| {
        project_to_budget(
            &HermitianMatrix::hermitize(k.clone()).expect("finite iterate"),
            p,
        )
        .into_inner()
    };
    // inner maximization of ln det(Q + H K H^H) - ln det(Q) - eavesdropper term
    let inner_max = |a: &ComplexMatrix, k_start: &ComplexMatrix| -> (ComplexMatrix, f64) {
        let q = noise_q(a);
        let logdet_q = matrix::logdet_pd(
            &HermitianMatrix::hermitize(q.clone()).expect("finite"),
        )
        .expect("Q is positive definite for a strict contraction");
        let objective = |k: &ComplexMatrix| {
            let s = HermitianMatrix::hermitize(&q + &h * k * h.adjoint()).expect("finite iterate");
            matrix::logdet_pd(&s).expect("Q + H K H^H is positive definite")
                - logdet_q
                - rates::logdet_i_plus_hkh(ch.h_e(), k)
        };
        let gradient = |k: &ComplexMatrix| {
            let s = HermitianMatrix::hermitize(&q + &h * k * h.adjoint()).expect("finite iterate");
            let s_inv = s.matrix().clone().cholesky().expect("positive definite").inverse();
            let we = gram_inverse(ch.h_e(), k);
            HermitianMatrix::hermitize(
                h.adjoint() * s_inv * &h - ch.h_e().adjoint() * we * ch.h_e(),
            )
            .expect("finite iterate")
            .into_inner()
        };
        let out = projected_ascent(
            k_start.clone(),
            &objective,
            &gradient,
            &project_k,
            cfg.max_iters,
            cfg.tol_increase / 10.0,
            cfg.step_init,
        );
        let value = out.objectives.last().copied().unwrap_or(0.0);
        (out.x, value)
    };
    // envelope gradient of the outer value with respect to A: the off-diagonal
    // block of (Q + H K H^H)^-1 - Q^-1 at the inner maximizer
    let outer_gradient = |a: &ComplexMatrix, k: &ComplexMatrix| -> ComplexMatrix {
        let q = noise_q(a);
        let s = HermitianMatrix::hermitize(&q + &h * k * h.adjoint()).expect("finite iterate");
        let s_inv = s.matrix().clone().cholesky().expect("positive definite").inverse();
        let q_inv = HermitianMatrix::hermitize(q)
            .expect("finite")
            .matrix()
            .clone()
            .cholesky()
            .expect("positive definite")
            .inverse();
        let d = s_inv - q_inv;
        d.view((0, ch.nr()), (ch.nr(), ch.ne())).into_owned() * Complex64::new(2.0, 0.0)
    };

    let mut a = ComplexMatrix::zeros(ch.nr(), ch.ne());
    let mut k = initial_proper(ch, budget, cfg);
    let (k_new, mut phi) = inner_max(&a, &k);
    k = k_new;
    let mut objectives = vec![phi];
    let mut converged = false;
    let mut last_step: Option<f64> = None;
    for _ in 0..cfg.max_iters {
        let g = outer_gradient(&a, &k);
        let mut t = last_step
            .map(|s| (2.0 * s).clamp(1e-3, 1.0))
            .unwrap_or(0.25);
        let mut accepted = None;
        while t >= STEP_MIN {
            let cand = project_contraction(&(&a - &g * Complex64::new(t, 0.0)));
            let delta = &cand - &a;
            let (k_cand, phi_cand) = inner_max(&cand, &k);
            if phi_cand.is_finite() && phi_cand <= phi + ARMIJO_C * real_inner(&g, &delta) {
                accepted = Some((cand, k_cand, phi_cand, t));
                break;
            }
            t *= STEP_SHRINK;
        }
        let Some((a_new, k_new, phi_new, t)) = accepted else {
            converged = true;
            break;
        };
        let drop = phi - phi_new;
        a = a_new;
        k = k_new;
        phi = phi_new;
        objectives.push(phi);
        last_step = Some(t);
        if drop < cfg.tol_increase {
            converged = true;
            break;
        }
    }
    Ok(SaddleSolution {
        a,
        k: HermitianMatrix::hermitize(k)?,
        value: RateValue::nats(phi),
        trace: ConvergenceTrace { objectives, converged },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::{general_rate, proper_rate};
    use crate::signal::reference_channel;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_channel(h_r: f64, h_e: f64) -> ChannelPair {
        ChannelPair::new(
            ComplexMatrix::from_row_slice(1, 1, &[c(h_r, 0.0)]),
            ComplexMatrix::from_row_slice(1, 1, &[c(h_e, 0.0)]),
        )
        .unwrap()
    }

    #[test]
    fn budget_from_snr() {
        let b = PowerBudget::from_snr_db(6.0).unwrap();
        assert_relative_eq!(b.p(), 2.0 * 10f64.powf(0.6), epsilon = 1e-12);
        assert_relative_eq!(b.augmented(), 2.0 * b.p(), epsilon = 1e-12);
        assert!(PowerBudget::new(0.0).is_err());
        assert!(PowerBudget::new(f64::NAN).is_err());
    }

    #[test]
    fn projection_clip_and_shift_example() {
        // diag(3, -1) with budget 2: clip to diag(3, 0), shift by 1 -> diag(2, 0)
        let h = HermitianMatrix::from_real_diagonal(&[3.0, -1.0]);
        let p = project_to_budget(&h, 2.0);
        assert_relative_eq!(p.matrix()[(0, 0)].re, 2.0, epsilon = 1e-9);
        assert!(p.matrix()[(1, 1)].norm() < 1e-9);
        assert!(p.matrix()[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn projection_feasible_point_is_fixed() {
        let mut rng = instances::rng(51);
        for _ in 0..50 {
            let k = instances::random_psd_trace(&mut rng, 3, 2.0);
            let p = project_to_budget(&k, 2.5);
            assert!(matrix::max_abs(&(p.matrix() - k.matrix())) < 1e-9);
        }
    }

    #[test]
    fn projection_is_idempotent_and_feasible() {
        let mut rng = instances::rng(52);
        for _ in 0..50 {
            let g = instances::random_hermitian(&mut rng, 3);
            let p1 = project_to_budget(&g, 1.5);
            assert!(matrix::is_psd(&p1));
            assert!(p1.trace_real() <= 1.5 + 1e-9);
            let p2 = project_to_budget(&p1, 1.5);
            assert!(matrix::max_abs(&(p2.matrix() - p1.matrix())) < 1e-9);
        }
    }

    #[test]
    fn projection_optimality_spot_check() {
        // the projection must be the closest feasible point in Frobenius norm:
        // compare against feasible perturbations of the projected point
        let mut rng = instances::rng(53);
        let g = instances::random_hermitian(&mut rng, 3);
        let p = project_to_budget(&g, 1.0);
        let d0 = (g.matrix() - p.matrix()).norm();
        for _ in 0..200 {
            let q = instances::random_psd_trace(&mut rng, 3, 1.0);
            let d = (g.matrix() - q.matrix()).norm();
            assert!(d >= d0 - 1e-9, "found closer feasible point: {d} < {d0}");
        }
    }

    #[test]
    fn augmented_projection_respects_pattern_and_budget() {
        let mut rng = instances::rng(54);
        for _ in 0..25 {
            let g = instances::random_hermitian(&mut rng, 4);
            let aug = project_augmented(g.matrix(), 3.0).unwrap();
            assert!(aug.k().trace_real() <= 1.5 + 1e-8);
        }
    }

    #[test]
    fn proper_gradient_matches_finite_differences() {
        let mut rng = instances::rng(55);
        for _ in 0..50 {
            let ch = instances::random_channel(&mut rng, 2, 2, 3);
            let k = instances::random_psd_trace(&mut rng, 3, 2.0);
            let g = proper_gradient(&ch, k.matrix());
            let e = instances::random_hermitian(&mut rng, 3);
            let h = 1e-6;
            let fp = proper_objective(&ch, &(k.matrix() + e.matrix() * c(h, 0.0)));
            let fm = proper_objective(&ch, &(k.matrix() - e.matrix() * c(h, 0.0)));
            let fd = (fp - fm) / (2.0 * h);
            let an = real_inner(&g, e.matrix());
            assert!(
                (fd - an).abs() <= 1e-5 * an.abs().max(1.0),
                "finite difference {fd} vs analytic {an}"
            );
        }
    }

    #[test]
    fn general_gradient_matches_finite_differences() {
        let mut rng = instances::rng(56);
        for _ in 0..50 {
            let ch = instances::random_channel(&mut rng, 2, 2, 2);
            let aug = instances::random_feasible_augmented(&mut rng, 2, 3.0);
            let ku = aug.assembled();
            let hr = ch.augmented_r();
            let he = ch.augmented_e();
            let obj = |m: &ComplexMatrix| {
                0.5 * (rates::logdet_i_plus_hkh(&hr, m) - rates::logdet_i_plus_hkh(&he, m))
            };
            let g = general_gradient(&ch, &ku);
            let e = instances::random_hermitian(&mut rng, 4);
            let h = 1e-6;
            // keep the perturbed point PD-friendly by shifting slightly inside
            let base = &ku + ComplexMatrix::identity(4, 4) * c(1e-3, 0.0);
            let fp = obj(&(&base + e.matrix() * c(h, 0.0)));
            let fm = obj(&(&base - e.matrix() * c(h, 0.0)));
            let fd = (fp - fm) / (2.0 * h);
            let g_base = general_gradient(&ch, &base);
            let an = real_inner(&g_base, e.matrix());
            assert!(
                (fd - an).abs() <= 1e-5 * an.abs().max(1.0),
                "finite difference {fd} vs analytic {an}"
            );
            let _ = g;
        }
    }

    #[test]
    fn scalar_maximum_is_full_power() {
        // h_r=2, h_e=1, P=1: rate is increasing in k, optimum k=1, ln(5/2)
        let ch = scalar_channel(2.0, 1.0);
        let budget = PowerBudget::new(1.0).unwrap();
        for method in [Method::ProjectedGradient, Method::DcIteration] {
            let cfg = SolverConfig { method, ..Default::default() };
            let sol = maximize_proper(&ch, &budget, &cfg).unwrap();
            assert!(sol.trace.converged);
            assert_relative_eq!(sol.rate.in_nats(), 2.5f64.ln(), epsilon = 1e-6);
            assert_relative_eq!(sol.k.matrix()[(0, 0)].re, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn reversed_scalar_channel_yields_zero() {
        // h_r=1, h_e=2: the rate is maximized by sending nothing
        let ch = scalar_channel(1.0, 2.0);
        let budget = PowerBudget::new(1.0).unwrap();
        let sol = maximize_proper(&ch, &budget, &SolverConfig::default()).unwrap();
        assert!(sol.rate.in_nats().abs() < 1e-8);
    }

    #[test]
    fn identical_channels_give_zero_rate() {
        let h = instances::random_complex(&mut instances::rng(57), 2, 2, 1.0);
        let ch = ChannelPair::new(h.clone(), h).unwrap();
        let budget = PowerBudget::new(4.0).unwrap();
        for method in [Method::ProjectedGradient, Method::DcIteration] {
            let cfg = SolverConfig { method, ..Default::default() };
            let sol = maximize_proper(&ch, &budget, &cfg).unwrap();
            assert!(sol.rate.in_nats().abs() < 1e-6);
            let sol_g = maximize_general(&ch, &budget, &cfg).unwrap();
            assert!(sol_g.rate.in_nats().abs() < 1e-6);
        }
    }

    #[test]
    fn objective_traces_are_monotone() {
        let ch = reference_channel();
        let budget = PowerBudget::from_snr_db(6.0).unwrap();
        for method in [Method::ProjectedGradient, Method::DcIteration] {
            let cfg = SolverConfig { method, ..Default::default() };
            let sol = maximize_general(&ch, &budget, &cfg).unwrap();
            for w in sol.trace.objectives.windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "objective decreased: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn solution_is_feasible_and_consistent_with_rate() {
        let ch = reference_channel();
        let budget = PowerBudget::from_snr_db(6.0).unwrap();
        let sol = maximize_proper(&ch, &budget, &SolverConfig::default()).unwrap();
        assert!(matrix::is_psd(&sol.k));
        assert!(sol.k.trace_real() <= budget.p() + 1e-8);
        let recomputed = proper_rate(&ch, &sol.k).unwrap().in_nats();
        assert_relative_eq!(recomputed, sol.rate.in_nats(), epsilon = 1e-10);

        let sol_g = maximize_general(&ch, &budget, &SolverConfig::default()).unwrap();
        assert!(sol_g.aug.k().trace_real() <= budget.p() + 1e-8);
        let recomputed = general_rate(&ch, &sol_g.aug).unwrap().in_nats();
        assert_relative_eq!(recomputed, sol_g.rate.in_nats(), epsilon = 1e-10);
    }

    #[test]
    fn general_never_loses_to_proper() {
        let mut rng = instances::rng(58);
        let budget = PowerBudget::new(4.0).unwrap();
        let cfg = SolverConfig::default();
        for _ in 0..10 {
            let ch = instances::random_channel(&mut rng, 2, 2, 2);
            let rp = maximize_proper(&ch, &budget, &cfg).unwrap().rate.in_nats();
            let rg = maximize_general(&ch, &budget, &cfg).unwrap().rate.in_nats();
            assert!(rg >= rp - 1e-4, "general {rg} below proper {rp}");
        }
    }

    #[test]
    fn degraded_channel_drives_pseudo_covariance_to_zero() {
        // from an improper random start on a degraded channel, the optimizer
        // must land on an (effectively) proper solution
        let mut rng = instances::rng(59);
        let ch = instances::random_degraded_channel(&mut rng, 2, 2);
        let budget = PowerBudget::new(4.0).unwrap();
        let cfg = SolverConfig {
            tol_increase: 1e-10,
            random_start: true,
            seed: 7,
            ..Default::default()
        };
        let sol = maximize_general(&ch, &budget, &cfg).unwrap();
        assert!(sol.trace.converged);
        let rp = maximize_proper(&ch, &budget, &SolverConfig::default())
            .unwrap()
            .rate
            .in_nats();
        assert!((sol.rate.in_nats() - rp).abs() < 1e-4);
    }

    #[test]
    fn runs_are_deterministic() {
        let ch = reference_channel();
        let budget = PowerBudget::from_snr_db(6.0).unwrap();
        let cfg = SolverConfig { random_start: true, seed: 11, ..Default::default() };
        let a = maximize_general(&ch, &budget, &cfg).unwrap();
        let b = maximize_general(&ch, &budget, &cfg).unwrap();
        assert_eq!(a.trace.objectives, b.trace.objectives);
        assert_eq!(a.aug.assembled(), b.aug.assembled());
    }

    #[test]
    fn contraction_projection_caps_singular_values() {
        let a = ComplexMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.3, 0.0)]);
        let p = project_contraction(&a);
        let svd = p.clone().svd(false, false);
        let top = svd.singular_values.max();
        assert!(top <= 1.0 - 1e-7);
        assert_relative_eq!(p[(1, 1)].re, 0.3, epsilon = 1e-12);
    }

    #[test]
    fn saddle_scalar_degraded_matches_proper_capacity() {
        let ch = scalar_channel(2.0, 1.0);
        let budget = PowerBudget::new(1.0).unwrap();
        let sol = saddle_solve(&ch, &budget, &SolverConfig::default()).unwrap();
        assert!((sol.value.in_nats() - 2.5f64.ln()).abs() < 1e-3, "saddle {}", sol.value.in_nats());
    }

    #[test]
    fn saddle_value_upper_bounds_proper_capacity() {
        let mut rng = instances::rng(60);
        let budget = PowerBudget::new(2.0).unwrap();
        let cfg = SolverConfig::default();
        for _ in 0..5 {
            let ch = instances::random_channel(&mut rng, 2, 2, 2);
            let cp = maximize_proper(&ch, &budget, &cfg).unwrap().rate.in_nats();
            let sv = saddle_solve(&ch, &budget, &cfg).unwrap().value.in_nats();
            // the outer minimization can only bring the value down toward the
            // saddle, and every A gives an upper bound on the proper capacity
            assert!(sv >= cp - 1e-3, "saddle {sv} below proper capacity {cp}");
        }
    }
}
