//! Acceptance checks. Each returns one [`CheckLine`]; none of them panics
//! on a numerical miss, so a failing check still reports what it measured.

use std::fmt;
use std::time::Instant;

use hmclab::analyze::certificate::{search_certificate, RateMap};
use hmclab::analyze::{chebyshev_contraction, chebyshev_total_time, expected_cos2, rhmc_expected_time, spectral_radius, Support};
use hmclab::diagnose::{check_flow_inequalities, coupled_rate, cov_error, loglog_slope};
use hmclab::integrate::{modified_spectrum, velocity_verlet_in_place, Workspace};
use hmclab::rng::{exponential, standard_normal, standard_normal_vec};
use hmclab::sample::run;
use hmclab::{transition_block, Engine, Init, IntegratorKind, PhaseState, SamplerSpec, Spacing, Spectrum, Target, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{default_label, BenchConfig, EngineConfig, InitConfig};
use crate::experiments::{integrators, paper_table1, scaling, table1};

/// Criteria whose thresholds the method provably cannot meet; see README.
pub const KNOWN_UNATTAINABLE: [u32; 3] = [2, 7, 10];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckLine {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {:>2} {}: {} ({:.2} s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

fn timed(id: u32, name: &'static str, limit: f64, body: impl FnOnce() -> (bool, String)) -> CheckLine {
    let start = Instant::now();
    let (ok, detail) = body();
    let seconds = start.elapsed().as_secs_f64();
    let in_time = seconds < limit;
    let detail = if in_time { detail } else { format!("{detail}; over the {limit} s budget") };
    CheckLine { id, name, pass: ok && in_time, detail, seconds }
}

fn failed(e: impl fmt::Display) -> (bool, String) {
    (false, format!("error: {e}"))
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + tag)
}

fn log_uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + r.random::<f64>() * (hi / lo).ln()).exp()
}

/// Closed-form `ρ(AᵀA)` against the eigenvalues of the assembled block.
pub fn criterion_1() -> CheckLine {
    timed(1, "spectral radius vs direct eigenvalues", 1.0, || {
        let mut r = rng(1);
        let (mut worst_rho, mut worst_det) = (0.0f64, 0.0f64);
        for _ in 0..100 {
            let sigma = log_uniform(&mut r, 1e-2, 1e2);
            let t = r.random::<f64>() * 3.0 + 1e-3;
            let eta = r.random::<f64>() * 0.999;
            let g = match transition_block(sigma, t, eta) {
                Ok(b) => b.a.gram(),
                Err(e) => return failed(e),
            };
            let (tr, det) = (g.trace(), g.det());
            let hi = 0.5 * (tr + (tr * tr - 4.0 * det).max(0.0).sqrt());
            let lo = det / hi;
            let rep = spectral_radius(sigma, t, eta);
            worst_rho = worst_rho.max((rep.rho - hi).abs() / hi.max(1.0));
            worst_det = worst_det.max((hi * lo - eta.powi(4)).abs()).max((rep.rho * rep.rho_minor - eta.powi(4)).abs());
        }
        (
            worst_rho <= 1e-10 && worst_det <= 1e-12,
            format!("max rho error {worst_rho:.2e}, max |product - eta^4| {worst_det:.2e}"),
        )
    })
}

/// Coupled damped chains against the `√ρ(AᵀA)` bound.
pub fn criterion_2() -> CheckLine {
    timed(2, "coupled contraction vs sqrt rho", 5.0, || {
        let spectrum = match Spectrum::spaced(10, 1.0, 100.0, Spacing::Log) {
            Ok(s) => s,
            Err(e) => return failed(e),
        };
        let spec = match SamplerSpec::auto(Variant::Damped, &spectrum, 1e-2, 200, 2) {
            Ok(s) => s,
            Err(e) => return failed(e),
        };
        let predicted = spectrum
            .sigma()
            .iter()
            .map(|&s| spectral_radius(s, spec.t, spec.eta).rho)
            .fold(0.0, f64::max)
            .sqrt();
        let target = Target::quadratic(spectrum);
        match coupled_rate(&target, &spec, 200, 10) {
            Ok(fitted) => {
                let rel = (fitted - predicted).abs() / predicted;
                (rel <= 0.05, format!("fitted decay {fitted:.4}, sqrt max rho {predicted:.4}, relative gap {rel:.3}"))
            }
            Err(e) => failed(e),
        }
    })
}

/// Iteration-count exponents in κ from the closed-form bounds.
pub fn criterion_3() -> CheckLine {
    timed(3, "sqrt kappa separation", 1.0, || {
        let cfg = BenchConfig::default();
        match scaling(&cfg) {
            Ok(rep) => {
                let b = rep.exponent(default_label(Variant::Baseline)).unwrap_or(f64::NAN);
                let d = rep.exponent(default_label(Variant::Damped)).unwrap_or(f64::NAN);
                ((b - 1.0).abs() <= 0.1 && (d - 0.5).abs() <= 0.1, format!("baseline exponent {b:.3}, damped exponent {d:.3}"))
            }
            Err(e) => failed(e),
        }
    })
}

/// Monte Carlo `E cos²(√σT)` and the minimizer of the RHMC time bound.
pub fn criterion_4() -> CheckLine {
    timed(4, "randomized duration closed form", 10.0, || {
        let mut r = rng(4);
        let pairs: Vec<(f64, f64, u64)> =
            (0..10).map(|i| (log_uniform(&mut r, 1e-2, 1e2), log_uniform(&mut r, 1e-1, 1e1), i)).collect();
        let n = 1_000_000;
        let zs: Vec<f64> = pairs
            .par_iter()
            .map(|&(sigma, lambda, i)| {
                let mut g = rng(400 + i);
                let (mut s, mut s2) = (0.0, 0.0);
                for _ in 0..n {
                    let c = (sigma.sqrt() * exponential::<f64, _>(&mut g, lambda)).cos();
                    let q = c * c;
                    s += q;
                    s2 += q * q;
                }
                let nf = n as f64;
                let mean = s / nf;
                let se = ((s2 / nf - mean * mean) / (nf - 1.0)).sqrt();
                (mean - expected_cos2(sigma, lambda)).abs() / se
            })
            .collect();
        let worst_z = zs.iter().copied().fold(0.0, f64::max);
        let (mu, l, eps) = (1.0, 100.0, 1e-2);
        let lambdas: Vec<f64> = (0..=10_000).map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 10_000.0)).collect();
        let best = lambdas
            .iter()
            .map(|&lam| (lam, rhmc_expected_time(mu, l, lam, eps).unwrap_or(f64::INFINITY)))
            .fold((f64::NAN, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
            .0;
        let step = 10f64.powf(4.0 / 10_000.0);
        let expect = 1.0 / (2.0 * mu.sqrt());
        let on_grid = best / expect <= step && expect / best <= step;
        (worst_z <= 3.0 && on_grid, format!("max |z| {worst_z:.2}; grid minimizer {best:.5} vs {expect}"))
    })
}

/// Chebyshev schedule contraction and total time.
pub fn criterion_5() -> CheckLine {
    timed(5, "chebyshev schedule", 1.0, || {
        let (mu, l, eps) = (1.0f64, 100.0, 1e-2f64);
        let k = ((l / mu).sqrt() * (1.0 / eps).ln()).ceil() as usize;
        let support = Support::Interval { mu, l, points: 10_000 };
        match (chebyshev_contraction(support, mu, l, k), chebyshev_total_time(mu, l, k)) {
            (Ok(c), Ok(t)) => {
                let cap = 8.0 * (1.0 / eps).ln() / mu.sqrt();
                (c <= eps && t <= cap, format!("K = {k}, max cosine product {c:.3e}, total time {t:.3} (cap {cap:.3})"))
            }
            (Err(e), _) | (_, Err(e)) => failed(e),
        }
    })
}

/// Velocity Verlet conserves the modified energy on a quadratic.
pub fn criterion_6() -> CheckLine {
    timed(6, "shadow hamiltonian", 1.0, || {
        let (sigma, h) = (1.0f64, 0.1);
        let st = match modified_spectrum(sigma, h) {
            Ok(s) => s,
            Err(e) => return failed(e),
        };
        let target = Target::quadratic(Spectrum::from_eigenvalues(vec![sigma]).expect("valid spectrum"));
        let mut s = PhaseState::new(vec![1.0], vec![0.5]).expect("matching lengths");
        let mut ws = Workspace::new(1);
        let shadow = |s: &PhaseState<f64>| 0.5 * st * s.x[0] * s.x[0] + 0.5 * s.v[0] * s.v[0];
        let h0 = shadow(&s);
        let (mut drift, mut gap) = (0.0f64, 0.0f64);
        for _ in 0..100_000 {
            velocity_verlet_in_place(&target, &mut s, h, &mut ws);
            let hs = shadow(&s);
            let full = 0.5 * sigma * s.x[0] * s.x[0] + 0.5 * s.v[0] * s.v[0];
            drift = drift.max((hs - h0).abs() / h0);
            gap = gap.max((full - hs - h * h / 8.0 * sigma * sigma * s.x[0] * s.x[0]).abs());
        }
        (drift < 1e-9 && gap <= 1e-12, format!("relative drift {drift:.2e}, max |H - H~ - h^2 sigma^2 x^2/8| {gap:.2e}"))
    })
}

/// Bias orders of the integrators and the sMC variance oracle.
pub fn criterion_7() -> CheckLine {
    timed(7, "integrator orders", 60.0, || {
        let cfg = BenchConfig::default();
        match integrators(&cfg) {
            Ok(rep) => {
                let vv = rep.order(IntegratorKind::VelocityVerlet);
                let smc = rep.order(IntegratorKind::Smc);
                let worst_z = rep
                    .smc_variance
                    .iter()
                    .map(|r| (r.monte_carlo - r.quadrature).abs() / r.standard_error)
                    .fold(0.0, f64::max);
                let others: Vec<String> = rep.orders.iter().map(|(k, o)| format!("{k} {o:.2}")).collect();
                (
                    (vv - 2.0).abs() <= 0.1 && smc - vv >= 0.5 && worst_z <= 3.0,
                    format!("measured orders [{}]; sMC variance max |z| {worst_z:.2}", others.join(", ")),
                )
            }
            Err(e) => failed(e),
        }
    })
}

/// Certificate search for one clock and for curvature-proportional clocks.
pub fn criterion_8() -> CheckLine {
    timed(8, "lyapunov certificates", 30.0, || {
        let (mu, l) = (1.0f64, 100.0);
        let single = match search_certificate(mu, l, 0.0, RateMap::Constant(2.0 * (l + mu).sqrt())) {
            Ok(c) => c.r,
            Err(e) => return failed(e),
        };
        let need = 0.9 * mu / (2.0 * (l + mu).sqrt());
        let mus = [1e-4f64, 1e-2, 1.0];
        let rs: Result<Vec<f64>, _> = mus
            .par_iter()
            .map(|&m| search_certificate(m, 100.0 * m, 0.0, RateMap::Proportional(1.0 / m.sqrt())).map(|c| c.r))
            .collect();
        let rs = match rs {
            Ok(r) => r,
            Err(e) => return failed(e),
        };
        let slope = loglog_slope(&mus, &rs);
        (
            single >= need && (slope - 0.5).abs() <= 0.1,
            format!("single-clock r {single:.5} (need {need:.5}); coordinate-clock exponent {slope:.3}"),
        )
    })
}

/// The three short-time coupling inequalities on random instances with
/// `μ = 1`, `L = 100` and eigenvalues drawn inside `[μ, L]`. The third
/// bound fails by `O(μ²/L^{3/2})` when mass sits at `σ = μ` exactly.
pub fn criterion_9() -> CheckLine {
    timed(9, "short-time coupling inequalities", 30.0, || {
        let mut r = rng(9);
        let mut worst = f64::INFINITY;
        for i in 0..200 {
            let d = 1 + r.random_range(0..8usize);
            let (mu, l) = (1.0, 100.0);
            let sigma: Vec<f64> = (0..d).map(|_| mu + r.random::<f64>() * (l - mu)).collect();
            let spectrum = match Spectrum::new(sigma, mu, l) {
                Ok(s) => s,
                Err(e) => return failed(e),
            };
            let target = if i < 100 {
                Target::quadratic(spectrum)
            } else {
                match Target::perturbed(spectrum, 0.1) {
                    Ok(t) => t,
                    Err(e) => return failed(e),
                }
            };
            let lb = target.curvature_bounds().1;
            let x0: Vec<f64> = standard_normal_vec(&mut r, d);
            let x1: Vec<f64> = standard_normal_vec(&mut r, d);
            let v0: Vec<f64> = standard_normal_vec(&mut r, d);
            let eta = r.random::<f64>();
            match check_flow_inequalities(&target, &x0, &x1, &v0, 1.0 / (2.0 * lb.sqrt()), eta) {
                Ok(m) => worst = m.iter().copied().fold(worst, f64::min),
                Err(e) => return failed(e),
            }
        }
        (worst >= -1e-10, format!("smallest margin over 200 instances {worst:.3e}"))
    })
}

/// Table 1 ordering and magnitude of averaged min ESS.
pub fn criterion_10() -> CheckLine {
    timed(10, "table 1 ordering", 300.0, || {
        let cfg = BenchConfig::default();
        let rows = match table1(&cfg) {
            Ok(r) => r,
            Err(e) => return failed(e),
        };
        let get = |v: Variant| rows.iter().find(|r| r.variant == v).map_or(f64::NAN, |r| r.min_ess);
        let [b, c, d, h] = [Variant::Baseline, Variant::Chebyshev, Variant::Damped, Variant::Rhmc].map(get);
        let ordered = d > c && c > h && h > b;
        let within = [Variant::Baseline, Variant::Chebyshev, Variant::Damped, Variant::Rhmc]
            .into_iter()
            .all(|v| paper_table1(v).is_some_and(|p| (get(v) - p.0).abs() <= 0.5 * p.0));
        (
            ordered && within,
            format!("min ESS constant {b:.2}, chebyshev {c:.2}, damped {d:.2}, rhmc {h:.2}; ordered {ordered}, within 50% {within}"),
        )
    })
}

/// Chains started at stationarity stay there.
pub fn criterion_11() -> CheckLine {
    timed(11, "stationarity", 120.0, || {
        let (chains, k) = (1000usize, 20usize);
        let cfg = BenchConfig {
            chains,
            k,
            seed: 11,
            engine: EngineConfig::Exact,
            init: InitConfig::Stationary,
            algorithms: Variant::ALL.into_iter().map(crate::config::AlgorithmEntry::Auto).collect(),
            ..BenchConfig::default()
        };
        let target = match cfg.target() {
            Ok(t) => t,
            Err(e) => return failed(e),
        };
        let spectrum = target.spectrum().clone();
        let d = spectrum.dim();
        let n = chains * k;
        // i.i.d. reference: average error of exact draws at the same N
        let reps = 20;
        let iid = (0..reps)
            .into_par_iter()
            .map(|i| {
                let mut g = rng(1100 + i as u64);
                let xs: Vec<f64> =
                    (0..n * d).map(|j| standard_normal::<f64, _>(&mut g) / spectrum.sigma()[j % d].sqrt()).collect();
                cov_error(&xs, d, &spectrum).unwrap_or(f64::NAN)
            })
            .sum::<f64>()
            / reps as f64;
        let mut parts = Vec::new();
        let mut ok = true;
        for entry in &cfg.algorithms {
            let specs: Result<Vec<_>, _> = (0..chains).map(|c| cfg.sampler(entry, &target, c)).collect();
            let specs = match specs {
                Ok(s) => s,
                Err(e) => return failed(e),
            };
            let pooled: Result<Vec<Vec<f64>>, _> = specs
                .par_iter()
                .map(|s| run(&target, &s.clone().with_init(Init::Stationary).with_engine(Engine::Exact)).map(|r| r.positions))
                .collect();
            let pooled: Vec<f64> = match pooled {
                Ok(p) => p.concat(),
                Err(e) => return failed(e),
            };
            let err = match cov_error(&pooled, d, &spectrum) {
                Ok(e) => e,
                Err(e) => return failed(e),
            };
            ok &= err < 3.0 * iid;
            parts.push(format!("{} {err:.4}", entry.label()));
        }
        (ok, format!("i.i.d. baseline {iid:.4} at N = {n}; {}", parts.join(", ")))
    })
}

pub fn all() -> Vec<fn() -> CheckLine> {
    vec![
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
    ]
}
