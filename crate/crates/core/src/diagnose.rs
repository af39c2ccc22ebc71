//! Chain diagnostics: Gaussian W2, effective sample size, covariance error,
//! coupled-chain contraction and the short-time flow inequalities.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::flow::exact_flow_in_place;
use crate::integrate::{velocity_verlet_in_place, Workspace};
use crate::model::{PhaseState, Spectrum, Target};
use crate::rng::{standard_normal, ChainStreams};
use crate::sample::{Chain, ChainRecord, Init, SamplerSpec};
use crate::scalar::{dot, norm_sq};
use crate::Scalar;

/// W2 between two Gaussians with diagonal covariances.
pub fn w2_gaussians<T: Scalar>(mean1: &[T], var1: &[T], mean2: &[T], var2: &[T]) -> Result<T> {
    let d = mean1.len();
    for len in [var1.len(), mean2.len(), var2.len()] {
        if len != d {
            return Err(Error::DimensionMismatch { expected: d, found: len });
        }
    }
    let mut acc = T::zero();
    for i in 0..d {
        ensure(var1[i] > T::zero(), "var1", var1[i], "must be positive")?;
        ensure(var2[i] > T::zero(), "var2", var2[i], "must be positive")?;
        let dm = mean1[i] - mean2[i];
        let ds = var1[i].sqrt() - var2[i].sqrt();
        acc = acc + dm * dm + ds * ds;
    }
    Ok(acc.sqrt())
}

/// Where to cut the autocorrelation sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EssTruncation {
    /// Geyer's initial positive sequence: stop before the first
    /// non-positive pair `γ(2m) + γ(2m+1)`.
    InitialPositive,
    /// Sum lags `1..=m`.
    FixedLag(usize),
}

pub const MIN_ESS_LEN: usize = 10;

/// Biased lag-`k` autocovariance of a centered series.
fn autocov<T: Scalar>(c: &[T], k: usize) -> T {
    let n = c.len();
    dot(&c[..n - k], &c[k..]) / T::from_usize_lossy(n)
}

pub fn ess<T: Scalar>(series: &[T]) -> Result<T> {
    ess_with(series, EssTruncation::InitialPositive)
}

/// `K / (1 + 2Σγ(k))`, clamped to `(0, K]`.
pub fn ess_with<T: Scalar>(series: &[T], rule: EssTruncation) -> Result<T> {
    let n = series.len();
    if n < MIN_ESS_LEN {
        return Err(Error::SeriesTooShort { min: MIN_ESS_LEN, len: n });
    }
    let nn = T::from_usize_lossy(n);
    let mean = series.iter().copied().sum::<T>() / nn;
    let c: Vec<T> = series.iter().map(|&x| x - mean).collect();
    let g0 = autocov(&c, 0);
    if !(g0 > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    let rho = |k: usize| autocov(&c, k) / g0;
    // tau = 1 + 2 Σ_{k≥1} γ(k)
    let tau = match rule {
        EssTruncation::InitialPositive => {
            let mut pairs = T::zero();
            let mut m = 0;
            while 2 * m + 1 < n {
                let g = if m == 0 { T::one() } else { rho(2 * m) } + rho(2 * m + 1);
                if g <= T::zero() {
                    break;
                }
                pairs = pairs + g;
                m += 1;
            }
            T::lit(2.0) * pairs - T::one()
        }
        EssTruncation::FixedLag(lag) => {
            let s: T = (1..=lag.min(n - 1)).map(rho).sum();
            T::one() + T::lit(2.0) * s
        }
    };
    let e = nn / tau;
    Ok(if tau <= T::zero() || e > nn { nn } else { e })
}

/// `‖Σ̂ − diag(1/σ)‖_F / ‖diag(1/σ)‖_F` for row-major `N × d` samples.
pub fn cov_error<T: Scalar>(samples: &[T], d: usize, spectrum: &Spectrum<T>) -> Result<T> {
    if d != spectrum.dim() {
        return Err(Error::DimensionMismatch { expected: spectrum.dim(), found: d });
    }
    if d == 0 || samples.len() % d != 0 {
        return Err(Error::DimensionMismatch { expected: d, found: samples.len() });
    }
    let n = samples.len() / d;
    if n < 2 {
        return Err(Error::SeriesTooShort { min: 2, len: n });
    }
    let nn = T::from_usize_lossy(n);
    let mut mean = vec![T::zero(); d];
    for row in samples.chunks(d) {
        for (m, &x) in mean.iter_mut().zip(row) {
            *m = *m + x;
        }
    }
    mean.iter_mut().for_each(|m| *m = *m / nn);
    let mut cov = vec![T::zero(); d * d];
    for row in samples.chunks(d) {
        for i in 0..d {
            let di = row[i] - mean[i];
            for j in i..d {
                cov[i * d + j] = cov[i * d + j] + di * (row[j] - mean[j]);
            }
        }
    }
    let denom = nn - T::one();
    let target = spectrum.target_variances();
    let mut num = T::zero();
    for i in 0..d {
        for j in i..d {
            let e = cov[i * d + j] / denom - if i == j { target[i] } else { T::zero() };
            num = num + if i == j { e * e } else { T::lit(2.0) * e * e };
        }
    }
    Ok((num / norm_sq(&target)).sqrt())
}

/// Least-squares `(slope, intercept)` of `y` on `x`.
pub fn linear_fit<T: Scalar>(x: &[T], y: &[T]) -> (T, T) {
    let n = T::from_usize_lossy(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        sxy = sxy + (a - mx) * (b - my);
        sxx = sxx + (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of `log y` against `log x`.
pub fn loglog_slope<T: Scalar>(x: &[T], y: &[T]) -> T {
    let lx: Vec<T> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<T> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}

/// Phase-space distance `‖y_k − y′_k‖` for `k = 0..=steps` between two
/// synchronously coupled chains that start at `a` and `b`.
pub fn coupled_distances<T: Scalar>(
    target: &Target<T>,
    spec: &SamplerSpec<T>,
    a: PhaseState<T>,
    b: PhaseState<T>,
    steps: usize,
) -> Result<Vec<T>> {
    let sa = spec.clone().with_init(Init::State(a));
    let sb = spec.clone().with_init(Init::State(b));
    let mut ca = Chain::new(target, &sa)?;
    let mut cb = Chain::new(target, &sb)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(ca.state().distance(cb.state()));
    for _ in 0..steps {
        ca.step(&mut |_| true);
        cb.step(&mut |_| true);
        out.push(ca.state().distance(cb.state()));
    }
    Ok(out)
}

/// First step used by the log-linear fit in [`coupled_rate`].
pub const FIT_FROM: usize = 10;

/// Distances below `FLOOR · d₀` are dropped from the fit: the difference of
/// two O(1) states carries absolute rounding error near machine epsilon.
pub const FLOOR: f64 = 1e-9;

/// Geometric decay per step fitted to `log d_k` over `k ≥ FIT_FROM`, up to
/// the first distance below the rounding floor.
pub fn fitted_decay<T: Scalar>(distances: &[T]) -> T {
    let floor = distances.first().map_or(T::zero(), |&d| d * T::lit(FLOOR));
    let pts: Vec<(T, T)> = distances
        .iter()
        .enumerate()
        .skip(FIT_FROM)
        .take_while(|(_, d)| **d > floor && d.is_finite())
        .map(|(k, d)| (T::from_usize_lossy(k), d.ln()))
        .collect();
    if pts.len() < 2 {
        return T::zero();
    }
    let (x, y): (Vec<T>, Vec<T>) = pts.into_iter().unzip();
    linear_fit(&x, &y).0.exp()
}

/// Per-step contraction of synchronously coupled chains, averaged over
/// `trials`. Trial `i` uses chain stream `i`; both chains share the
/// velocity and every refresh and duration draw, and start from
/// independent stationary positions.
pub fn coupled_rate<T: Scalar>(target: &Target<T>, spec: &SamplerSpec<T>, steps: usize, trials: usize) -> Result<T> {
    if trials == 0 {
        return Err(Error::invalid("trials", 0.0, "must be at least 1"));
    }
    let sigma = target.spectrum().sigma();
    let mut acc = T::zero();
    for trial in 0..trials {
        let mut init = ChainStreams::new(spec.seed, trial as u64).init;
        let mut draw = || -> Vec<T> { sigma.iter().map(|&s| standard_normal::<T, _>(&mut init) / s.sqrt()).collect() };
        let xa = draw();
        let xb = draw();
        let v: Vec<T> = (0..sigma.len()).map(|_| standard_normal(&mut init)).collect();
        let a = PhaseState::new(xa, v.clone())?;
        let b = PhaseState::new(xb, v)?;
        let s = spec.clone().with_chain(trial as u64);
        acc = acc + fitted_decay(&coupled_distances(target, &s, a, b, steps)?);
    }
    Ok(acc / T::from_usize_lossy(trials))
}

/// Resolution of the Verlet reference flow for non-quadratic targets.
pub const FLOW_STEPS: usize = 10_000;

/// Slack of the three short-time coupling inequalities, each divided by
/// `‖x₀ − x₀′‖²`:
///
/// 1. `(1 − μ/(16L))‖x̃₀‖² − ‖x̃_T‖²`
/// 2. `η²(L/4)‖x̃₀‖² − ‖η ṽ_T‖²`
/// 3. `−η μ/(2√L) ‖x̃₀‖² − ⟨x̃_T, η ṽ_T⟩`
///
/// The velocity difference is taken after the shared refresh, which scales
/// it by `η`. Both chains start with velocity `v0`. `(μ, L)` are the
/// target's curvature bounds and `T ≤ 1/(2√L)` is required.
pub fn check_flow_inequalities<T: Scalar>(
    target: &Target<T>,
    x0: &[T],
    x0p: &[T],
    v0: &[T],
    t: T,
    eta: T,
) -> Result<[T; 3]> {
    let (mu, l) = target.curvature_bounds();
    let limit = (T::lit(2.0) * l.sqrt()).recip();
    ensure(t > T::zero() && t <= limit, "T", t, "must lie in (0, 1/(2 sqrt L)]")?;
    ensure(eta >= T::zero() && eta <= T::one(), "eta", eta, "must lie in [0, 1]")?;
    let mut a = PhaseState::new(x0.to_vec(), v0.to_vec())?;
    let mut b = PhaseState::new(x0p.to_vec(), v0.to_vec())?;
    if a.dim() != target.spectrum().dim() || b.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: target.spectrum().dim(), found: b.dim() });
    }
    let dx0: Vec<T> = x0.iter().zip(x0p).map(|(&p, &q)| p - q).collect();
    let n0 = norm_sq(&dx0);
    if n0 == T::zero() {
        return Ok([T::zero(); 3]);
    }
    if target.is_quadratic() {
        exact_flow_in_place(target.spectrum(), &mut a, t);
        exact_flow_in_place(target.spectrum(), &mut b, t);
    } else {
        let h = t / T::from_usize_lossy(FLOW_STEPS);
        let mut ws = Workspace::new(a.dim());
        for _ in 0..FLOW_STEPS {
            velocity_verlet_in_place(target, &mut a, h, &mut ws);
            velocity_verlet_in_place(target, &mut b, h, &mut ws);
        }
    }
    let dx: Vec<T> = a.x.iter().zip(&b.x).map(|(&p, &q)| p - q).collect();
    let dv: Vec<T> = a.v.iter().zip(&b.v).map(|(&p, &q)| eta * (p - q)).collect();
    let one = T::one();
    let m1 = (one - mu / (T::lit(16.0) * l)) - norm_sq(&dx) / n0;
    let m2 = eta * eta * l / T::lit(4.0) - norm_sq(&dv) / n0;
    let m3 = -eta * mu / (T::lit(2.0) * l.sqrt()) - dot(&dx, &dv) / n0;
    Ok([m1, m2, m3])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsReport<T> {
    pub min_ess: T,
    pub mean_ess: T,
    pub cov_error: T,
    /// Gaussian-surrogate W2 between per-coordinate sample moments and the target.
    pub w2_to_target: T,
    /// Largest lag-1 autocorrelation over coordinates.
    pub empirical_rate: T,
}

/// Summarizes one chain against a quadratic target.
pub fn diagnose_chain<T: Scalar>(record: &ChainRecord<T>, spectrum: &Spectrum<T>) -> Result<DiagnosticsReport<T>> {
    diagnose_chain_with(record, spectrum, EssTruncation::InitialPositive)
}

pub fn diagnose_chain_with<T: Scalar>(
    record: &ChainRecord<T>,
    spectrum: &Spectrum<T>,
    rule: EssTruncation,
) -> Result<DiagnosticsReport<T>> {
    let d = record.dim;
    if d != spectrum.dim() {
        return Err(Error::DimensionMismatch { expected: spectrum.dim(), found: d });
    }
    let n = T::from_usize_lossy(record.rows());
    let (mut min_ess, mut sum_ess) = (T::infinity(), T::zero());
    let (mut means, mut vars) = (Vec::with_capacity(d), Vec::with_capacity(d));
    let mut rate = T::zero();
    for j in 0..d {
        let col = record.column(j);
        let e = ess_with(&col, rule)?;
        min_ess = min_ess.min(e);
        sum_ess = sum_ess + e;
        let m = col.iter().copied().sum::<T>() / n;
        let c: Vec<T> = col.iter().map(|&x| x - m).collect();
        let g0 = autocov(&c, 0);
        rate = rate.max((autocov(&c, 1) / g0).abs());
        means.push(m);
        vars.push(norm_sq(&c) / (n - T::one()));
    }
    Ok(DiagnosticsReport {
        min_ess,
        mean_ess: sum_ess / T::from_usize_lossy(d),
        cov_error: cov_error(&record.positions, d, spectrum)?,
        w2_to_target: w2_gaussians(&means, &vars, &vec![T::zero(); d], &spectrum.target_variances())?,
        empirical_rate: rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Spacing;
    use crate::rng::standard_normal_vec;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn w2_examples() {
        assert_eq!(w2_gaussians(&[1.0, 2.0], &[1.0, 3.0], &[1.0, 2.0], &[1.0, 3.0]).unwrap(), 0.0);
        assert_eq!(w2_gaussians(&[1.0, 0.0], &[2.0, 2.0], &[0.0, 0.0], &[2.0, 2.0]).unwrap(), 1.0);
        assert_eq!(w2_gaussians(&[0.0], &[4.0], &[0.0], &[1.0]).unwrap(), 1.0);
        assert!(w2_gaussians(&[0.0], &[0.0], &[0.0], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn w2_metric(m in proptest::collection::vec(-3.0f64..3.0, 6), v in proptest::collection::vec(0.1f64..4.0, 6)) {
            let p = (&m[0..2], &v[0..2]);
            let q = (&m[2..4], &v[2..4]);
            let r = (&m[4..6], &v[4..6]);
            let pq = w2_gaussians(p.0, p.1, q.0, q.1).unwrap();
            let qp = w2_gaussians(q.0, q.1, p.0, p.1).unwrap();
            let qr = w2_gaussians(q.0, q.1, r.0, r.1).unwrap();
            let pr = w2_gaussians(p.0, p.1, r.0, r.1).unwrap();
            prop_assert!((pq - qp).abs() < 1e-12);
            prop_assert!(pr <= pq + qr + 1e-12);
        }

        #[test]
        fn ess_affine_invariant(seed in 0u64..1000, a in 0.1f64..10.0, b in -5.0f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = standard_normal_vec(&mut rng, 200);
            let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let (ex, ey) = (ess(&x).unwrap(), ess(&y).unwrap());
            prop_assert!((ex - ey).abs() < 1e-8 * ex);
        }
    }

    #[test]
    fn ess_iid() {
        let k = 10_000;
        let mut total = 0.0;
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = standard_normal_vec(&mut rng, k);
            total += ess(&x).unwrap();
        }
        let avg = total / 50.0;
        assert!(avg >= 0.8 * k as f64 && avg <= 1.2 * k as f64, "{avg}");
    }

    #[test]
    fn ess_ar1() {
        let k = 100_000;
        let rho = 0.5;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut x = vec![0.0f64; k];
        let s = (1.0 - rho * rho as f64).sqrt();
        x[0] = standard_normal(&mut rng);
        for i in 1..k {
            x[i] = rho * x[i - 1] + s * standard_normal::<f64, _>(&mut rng);
        }
        let e = ess(&x).unwrap();
        let want = k as f64 * (1.0 - rho) / (1.0 + rho);
        assert!((e / want - 1.0).abs() < 0.15, "{e} vs {want}");
    }

    #[test]
    fn ess_alternating_clamps() {
        let x: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(ess(&x).unwrap(), 100.0);
        assert_eq!(ess_with(&x, EssTruncation::FixedLag(1)).unwrap(), 100.0);
    }

    #[test]
    fn ess_errors() {
        assert!(matches!(ess(&[1.0f64; 20]), Err(Error::ZeroVariance)));
        assert!(matches!(ess(&[1.0f64, 2.0]), Err(Error::SeriesTooShort { .. })));
    }

    #[test]
    fn ess_fixed_lag_matches_hand_sum() {
        let x = [1.0f64, 2.0, 0.5, 3.0, -1.0, 0.0, 2.5, 1.5, -0.5, 1.0];
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let g = |k: usize| (0..x.len() - k).map(|i| (x[i] - m) * (x[i + k] - m)).sum::<f64>() / n;
        let tau = 1.0 + 2.0 * (g(1) + g(2)) / g(0);
        let want = if tau <= 0.0 { n } else { (n / tau).min(n) };
        assert!((ess_with(&x, EssTruncation::FixedLag(2)).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn cov_error_cases() {
        let sp = Spectrum::from_eigenvalues(vec![1.0f64, 4.0]).unwrap();
        assert_eq!(cov_error(&[0.0; 8], 2, &sp).unwrap(), 1.0);
        let two = cov_error(&[1.0, 0.0, -1.0, 2.0], 2, &sp).unwrap();
        assert!(two.is_finite() && two >= 0.0);
        assert!(cov_error(&[1.0, 0.0], 2, &sp).is_err());
    }

    #[test]
    fn cov_error_exact_samples() {
        let sp = Spectrum::spaced(10, 1.0f64, 10.0, Spacing::Linear).unwrap();
        let mut total = 0.0;
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = Vec::with_capacity(100_000 * 10);
            for _ in 0..100_000 {
                for &sig in sp.sigma() {
                    s.push(standard_normal::<f64, _>(&mut rng) / sig.sqrt());
                }
            }
            total += cov_error(&s, 10, &sp).unwrap();
        }
        assert!(total / 5.0 <= 0.05, "{}", total / 5.0);
    }

    #[test]
    fn fits() {
        let x = [1.0f64, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v * v).collect();
        assert!((loglog_slope(&x, &y) - 2.0).abs() < 1e-12);
        let (s, c) = linear_fit(&[0.0f64, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((s - 2.0).abs() < 1e-12 && (c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fitted_decay_of_geometric_sequence() {
        let d: Vec<f64> = (0..50).map(|k| 0.7f64.powi(k)).collect();
        assert!((fitted_decay(&d) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn baseline_coupled_rate_is_cosine() {
        let t = Target::quadratic(Spectrum::from_eigenvalues(vec![2.0]).unwrap());
        let tt = 0.8;
        let spec = SamplerSpec::baseline(tt, 1, 3);
        let a = PhaseState::new(vec![1.0f64], vec![0.2]).unwrap();
        let b = PhaseState::new(vec![-0.5], vec![0.2]).unwrap();
        let d = coupled_distances(&t, &spec, a, b, 12).unwrap();
        assert!((d[1] / d[0] - (2f64.sqrt() * tt).cos()).abs() < 1e-14);
        let r = coupled_rate(&t, &spec, 60, 3).unwrap();
        assert!((r - (2f64.sqrt() * tt).cos().abs()).abs() < 1e-7, "{r}");
    }

    #[test]
    fn damped_rate_independent_of_offset_magnitude() {
        let t = Target::quadratic(Spectrum::from_eigenvalues(vec![1.0, 10.0]).unwrap());
        let spec = SamplerSpec::damped(0.5, 0.4, 1, 9);
        let v = vec![0.3, -0.1];
        let rates: Vec<f64> = [1e-3, 1.0, 1e3]
            .iter()
            .map(|&m| {
                let a = PhaseState::new(vec![0.0, 0.0], v.clone()).unwrap();
                let b = PhaseState::new(vec![m, -m], v.clone()).unwrap();
                fitted_decay(&coupled_distances(&t, &spec, a, b, 80).unwrap())
            })
            .collect();
        assert!((rates[0] - rates[1]).abs() < 1e-9 && (rates[1] - rates[2]).abs() < 1e-9);
    }

    #[test]
    fn flow_inequalities_trivial_and_range() {
        let t = Target::quadratic(Spectrum::from_eigenvalues(vec![1.0, 100.0]).unwrap());
        let m = check_flow_inequalities(&t, &[1.0, 2.0], &[1.0, 2.0], &[0.5, 0.5], 0.05, 0.5).unwrap();
        assert_eq!(m, [0.0; 3]);
        assert!(check_flow_inequalities(&t, &[1.0, 2.0], &[0.0, 2.0], &[0.5, 0.5], 0.06, 0.5).is_err());
    }

    #[test]
    fn inequality_three_fails_at_exact_lower_curvature() {
        // with σ = μ exactly and x̃₀ on that coordinate, ⟨x̃_T, ṽ_T⟩ = −√μ sin cos ‖x̃₀‖²,
        // which is slightly above −μ/(2√L) at T = 1/(2√L)
        let (mu, l) = (1.0f64, 100.0);
        let t = Target::quadratic(Spectrum::new(vec![mu, l], mu, l).unwrap());
        let m = check_flow_inequalities(&t, &[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], 0.05, 1.0).unwrap();
        assert!(m[0] >= 0.0 && m[1] >= 0.0);
        assert!(m[2] < 0.0 && m[2] > -1e-3, "{}", m[2]);
    }

    #[test]
    fn report_for_iid_record() {
        let sp = Spectrum::from_eigenvalues(vec![1.0, 4.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut positions = vec![];
        for _ in 0..2000 {
            positions.push(standard_normal::<f64, _>(&mut rng));
            positions.push(standard_normal::<f64, _>(&mut rng) / 2.0);
        }
        let rec = ChainRecord { positions, dim: 2, jump_times: vec![], total_time: 0.0, seed: 0, chain: 0 };
        let r = diagnose_chain(&rec, &sp).unwrap();
        assert!(r.min_ess > 0.0 && r.min_ess <= r.mean_ess && r.mean_ess <= 2000.0);
        assert!(r.cov_error < 0.1 && r.w2_to_target < 0.1 && r.empirical_rate < 0.1);
    }
}
