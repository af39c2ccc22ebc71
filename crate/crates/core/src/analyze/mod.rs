//! Closed-form contraction rates.
//!
//! For damped HMC on a quadratic the coupled difference evolves through the
//! per-coordinate block `A(σ)`; everything here is a function of `σ` that is
//! then maximized over the eigenvalues or over a dense grid of `[μ, L]`.
//! Lyapunov certificates for the continuous-time jump process live in
//! [`certificate`].

pub mod certificate;

use serde::Serialize;

use crate::error::{ensure, Result};
use crate::flow::transition_block;
use crate::linalg::Mat2;
use crate::Scalar;

pub use certificate::{
    check_certificate, search_certificate, search_certificate_with, CertificateCheck,
    LyapunovCertificate, RateMap, SearchOptions, Weighting,
};

/// Default number of points when an interval stands in for the spectrum.
pub const DEFAULT_GRID: usize = 10_000;

/// Where to take the worst case over `σ`.
#[derive(Debug, Clone, Copy)]
pub enum Support<'a, T> {
    Eigenvalues(&'a [T]),
    /// `points` evenly spaced values including both endpoints.
    Interval { mu: T, l: T, points: usize },
}

impl<'a, T: Scalar> Support<'a, T> {
    pub fn interval(mu: T, l: T) -> Self {
        Support::Interval {
            mu,
            l,
            points: DEFAULT_GRID,
        }
    }

    pub fn points(&self) -> Vec<T> {
        match *self {
            Support::Eigenvalues(s) => s.to_vec(),
            Support::Interval { mu, l, points } => grid(mu, l, points),
        }
    }
}

/// `n ≥ 2` evenly spaced points on `[lo, hi]`, endpoints exact.
pub fn grid<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    if n <= 1 || hi == lo {
        return if hi == lo { vec![lo] } else { vec![lo, hi] };
    }
    let step = (hi - lo) / T::from_usize_lossy(n - 1);
    let mut g: Vec<T> = (0..n).map(|i| lo + step * T::from_usize_lossy(i)).collect();
    g[n - 1] = hi;
    g
}

/// Eigen-structure of `AᵀA` for one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralReport<T> {
    /// Trace of `AᵀA`.
    pub b: T,
    /// Largest eigenvalue of `AᵀA`.
    pub rho: T,
    /// Smallest eigenvalue of `AᵀA`.
    pub rho_minor: T,
    /// `det AᵀA = η⁴`.
    pub det: T,
    /// `√rho`, the per-step W2 factor.
    pub per_step_w2_factor: T,
}

pub fn spectral_radius<T: Scalar>(sigma: T, t: T, eta: T) -> SpectralReport<T> {
    let (s, c) = (sigma.sqrt() * t).sin_cos();
    let e2 = eta * eta;
    let det = e2 * e2;
    let b = s * s * e2 * (sigma + sigma.recip()) + c * c * (T::one() + det);
    let mut disc = b * b - T::lit(4.0) * det;
    if disc < T::zero() && disc > T::lit(-1e-12) {
        disc = T::zero();
    }
    let rho = (b + disc.max(T::zero()).sqrt()) * T::lit(0.5);
    // the small root from the product avoids cancellation
    let rho_minor = if rho > T::zero() { det / rho } else { T::zero() };
    SpectralReport {
        b,
        rho,
        rho_minor,
        det,
        per_step_w2_factor: rho.sqrt(),
    }
}

/// `max_σ ρ(A(σ)ᵀA(σ))`: the squared per-step W2 factor of the Lipschitz bound.
pub fn worst_case_rate<T: Scalar>(support: Support<'_, T>, t: T, eta: T) -> T {
    support
        .points()
        .into_iter()
        .map(|s| spectral_radius(s, t, eta).rho)
        .fold(T::zero(), T::max)
}

fn block<T: Scalar>(sigma: T, t: T, eta: T) -> Result<Mat2<T>> {
    Ok(transition_block(sigma, t, eta)?.a)
}

/// `max_σ` of the spectral radius of `A(σ)` itself: the asymptotic
/// per-step decay of the coupled difference.
pub fn asymptotic_rate<T: Scalar>(support: Support<'_, T>, t: T, eta: T) -> Result<T> {
    let mut worst = T::zero();
    for s in support.points() {
        worst = worst.max(block(s, t, eta)?.spectral_radius());
    }
    Ok(worst)
}

fn mat_pow<T: Scalar>(a: &Mat2<T>, mut k: u64) -> Mat2<T> {
    let mut out = Mat2::identity();
    let mut base = *a;
    while k > 0 {
        if k & 1 == 1 {
            out = out.mul(&base);
        }
        base = base.mul(&base);
        k >>= 1;
    }
    out
}

/// Smallest `K` with `‖A(σ)^K‖ ≤ eps`, located by doubling then bisection.
fn iterations_for_block<T: Scalar>(a: &Mat2<T>, eps: T, cap: u64) -> Option<u64> {
    if T::one() <= eps {
        return Some(0);
    }
    if a.spectral_radius() >= T::one() {
        return None;
    }
    let mut hi = 1u64;
    while mat_pow(a, hi).op_norm() > eps {
        hi *= 2;
        if hi > cap {
            return None;
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if mat_pow(a, mid).op_norm() <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(if lo == 0 && a.op_norm() <= eps { 1 } else { hi })
}

/// Iterations until the coupling bound `max_σ ‖A(σ)^K‖` drops to `eps`.
///
/// `A(σ)` is non-normal when `η > 0`, so this matrix-power bound is much
/// tighter than `ρ(AᵀA)^{K/2}`; it converges to the [`asymptotic_rate`].
/// Returns `None` when some block does not contract within `2³²` steps.
pub fn iterations_to_tolerance<T: Scalar>(
    support: Support<'_, T>,
    t: T,
    eta: T,
    eps: T,
) -> Result<Option<u64>> {
    ensure(eps > T::zero(), "eps", eps, "must be positive")?;
    let mut worst = 0;
    for s in support.points() {
        match iterations_for_block(&block(s, t, eta)?, eps, 1 << 32) {
            Some(k) => worst = worst.max(k),
            None => return Ok(None),
        }
    }
    Ok(Some(worst))
}

/// `E[cos²(√σ T)]` for `T ~ Exp(mean λ)`.
pub fn expected_cos2<T: Scalar>(sigma: T, lambda: T) -> T {
    let q = lambda * lambda * sigma;
    T::one() - T::lit(2.0) * q / (T::one() + T::lit(4.0) * q)
}

/// Bound on the expected time for randomized HMC to reach W2 ≤ eps:
/// `max_{σ∈{μ,L}} (1/(λσ) + 4λ) log(1/eps)`.
pub fn rhmc_expected_time<T: Scalar>(mu: T, l: T, lambda: T, eps: T) -> Result<T> {
    ensure(mu > T::zero(), "mu", mu, "must be positive")?;
    ensure(l >= mu, "L", l, "must be at least mu")?;
    ensure(lambda > T::zero(), "lambda", lambda, "must be positive")?;
    ensure(eps > T::zero() && eps < T::one(), "eps", eps, "must lie in (0, 1)")?;
    let per = |s: T| (lambda * s).recip() + T::lit(4.0) * lambda;
    Ok(per(mu).max(per(l)) * eps.recip().ln())
}

/// Chebyshev durations `π/(2√r_k)` in root order, where
/// `r_k = ((L+μ) − (L−μ)cos((k−½)π/K))/2` are the Chebyshev roots on `[μ, L]`.
///
/// Each duration makes `cos(√σ T_k)` vanish at `σ = r_k`.
pub fn chebyshev_schedule<T: Scalar>(mu: T, l: T, k: usize) -> Result<Vec<T>> {
    ensure(mu > T::zero(), "mu", mu, "must be positive")?;
    ensure(l >= mu, "L", l, "must be at least mu")?;
    if k == 0 {
        return Err(crate::Error::invalid("K", 0.0, "must be at least 1"));
    }
    let kk = T::from_usize_lossy(k);
    let half = T::lit(0.5);
    Ok((1..=k)
        .map(|i| {
            let ang = (T::from_usize_lossy(i) - half) * T::PI() / kk;
            let r = ((l + mu) - (l - mu) * ang.cos()) * half;
            T::PI() / (T::lit(2.0) * r.sqrt())
        })
        .collect())
}

/// `max_σ |∏_k cos(√σ T_k)|` for the length-`k` schedule on `[μ, L]`.
pub fn chebyshev_contraction<T: Scalar>(support: Support<'_, T>, mu: T, l: T, k: usize) -> Result<T> {
    let sched = chebyshev_schedule(mu, l, k)?;
    Ok(support
        .points()
        .into_iter()
        .map(|s| {
            let w = s.sqrt();
            sched.iter().fold(T::one(), |p, &t| p * (w * t).cos()).abs()
        })
        .fold(T::zero(), T::max))
}

/// Total integration time of one pass through the schedule.
pub fn chebyshev_total_time<T: Scalar>(mu: T, l: T, k: usize) -> Result<T> {
    Ok(chebyshev_schedule(mu, l, k)?.into_iter().sum())
}

/// Effective momentum dissipation `λ⁻¹(1 − η²)`.
pub fn dissipation<T: Scalar>(lambda_inv: T, eta: T) -> T {
    lambda_inv * (T::one() - eta * eta)
}
