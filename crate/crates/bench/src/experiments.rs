//! The four experiments: chain sampling, Table 1, condition-number scaling
//! and integrator orders.

use hmclab::analyze::{
    chebyshev_contraction, chebyshev_total_time, expected_cos2, iterations_to_tolerance, rhmc_expected_time, Support,
};
use hmclab::diagnose::{cov_error, diagnose_chain_with, loglog_slope};
use hmclab::integrate::{expected_stationary_variance, smc_in_place, stationary_bias, Workspace};
use hmclab::rng::standard_normal;
use hmclab::sample::{optimal_params, run};
use hmclab::{ChainRecord, ChainStreams, IntegratorKind, PhaseState, Spectrum, Target, Variant};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{default_label, BenchConfig};
use crate::BenchError;

/// One report row per (algorithm, chain).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRow {
    pub algorithm: String,
    pub seed: u64,
    pub min_ess: f64,
    pub mean_ess: f64,
    pub cov_error: f64,
}

#[derive(Debug, Clone)]
pub struct ChainOutput {
    pub row: ChainRow,
    pub record: ChainRecord<f64>,
}

/// Runs every algorithm on every chain. Output is sorted by algorithm
/// label, then seed, whatever order the chains finish in.
pub fn sample(cfg: &BenchConfig) -> Result<Vec<ChainOutput>, BenchError> {
    let target = cfg.target()?;
    let spectrum = target.spectrum();
    let mut tasks = Vec::new();
    for entry in &cfg.algorithms {
        for c in 0..cfg.chains {
            tasks.push((entry.label(), cfg.sampler(entry, &target, c)?));
        }
    }
    let mut out = tasks
        .into_par_iter()
        .map(|(label, spec)| -> Result<ChainOutput, BenchError> {
            let record = run(&target, &spec)?;
            let rep = diagnose_chain_with(&record, spectrum, cfg.ess)?;
            Ok(ChainOutput {
                row: ChainRow {
                    algorithm: label,
                    seed: spec.seed,
                    min_ess: rep.min_ess,
                    mean_ess: rep.mean_ess,
                    cov_error: rep.cov_error,
                },
                record,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    out.sort_by(|a, b| a.row.algorithm.cmp(&b.row.algorithm).then(a.row.seed.cmp(&b.row.seed)));
    Ok(out)
}

/// Published Table 1 values: (min ESS, mean ESS, covariance error).
pub fn paper_table1(v: Variant) -> Option<(f64, f64, f64)> {
    match v {
        Variant::Baseline => Some((12.83, 42.13, 0.43)),
        Variant::Chebyshev => Some((35.78, 124.99, 0.41)),
        Variant::Damped => Some((41.57, 133.03, 0.53)),
        Variant::Rhmc => Some((25.04, 75.82, 0.51)),
        Variant::Coordinate => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub algorithm: String,
    pub variant: Variant,
    pub min_ess: f64,
    pub mean_ess: f64,
    /// From the final state of every chain.
    pub cov_error: f64,
    pub paper_min_ess: Option<f64>,
    pub paper_mean_ess: Option<f64>,
    pub paper_cov_error: Option<f64>,
}

/// Per-algorithm averages over chains, in config order.
pub fn table1(cfg: &BenchConfig) -> Result<Vec<Table1Row>, BenchError> {
    let spectrum = cfg.target()?.spectrum().clone();
    let runs = sample(cfg)?;
    table1_from(cfg, &spectrum, &runs)
}

pub fn table1_from(cfg: &BenchConfig, spectrum: &Spectrum<f64>, runs: &[ChainOutput]) -> Result<Vec<Table1Row>, BenchError> {
    let mut rows = Vec::new();
    for entry in &cfg.algorithms {
        let label = entry.label();
        let mine: Vec<&ChainOutput> = runs.iter().filter(|r| r.row.algorithm == label).collect();
        let n = mine.len() as f64;
        let last: Vec<f64> = mine.iter().flat_map(|r| r.record.last().iter().copied()).collect();
        let cov = if mine.len() >= 2 { cov_error(&last, spectrum.dim(), spectrum)? } else { f64::NAN };
        let paper = paper_table1(entry.variant());
        rows.push(Table1Row {
            algorithm: label,
            variant: entry.variant(),
            min_ess: mine.iter().map(|r| r.row.min_ess).sum::<f64>() / n,
            mean_ess: mine.iter().map(|r| r.row.mean_ess).sum::<f64>() / n,
            cov_error: cov,
            paper_min_ess: paper.map(|p| p.0),
            paper_mean_ess: paper.map(|p| p.1),
            paper_cov_error: paper.map(|p| p.2),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub algorithm: String,
    pub kappa: f64,
    /// Iterations to the tolerance; `None` if the bound never gets there.
    pub iterations: Option<f64>,
    /// Total integration time for those iterations.
    pub total_time: Option<f64>,
    /// Worst-case contraction after `iterations` (Chebyshev only).
    pub contraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// Fitted log-log exponent of iterations in κ, per algorithm.
    pub exponents: Vec<(String, f64)>,
    /// Chebyshev total time at the smallest κ over that at the largest,
    /// each divided by `log κ`.
    pub chebyshev_time_ratio: f64,
}

impl ScalingReport {
    pub fn exponent(&self, algorithm: &str) -> Option<f64> {
        self.exponents.iter().find(|(a, _)| a == algorithm).map(|e| e.1)
    }
}

/// Closed-form cost of reaching the tolerance for each κ.
pub fn scaling(cfg: &BenchConfig) -> Result<ScalingReport, BenchError> {
    let sc = &cfg.scaling;
    if sc.kappas.len() < 2 || sc.kappas.iter().any(|&k| !(k >= 1.0)) {
        return Err(BenchError::Config("scaling needs at least two kappas, each >= 1".into()));
    }
    if !(sc.tolerance > 0.0 && sc.tolerance < 1.0) || !(sc.mu > 0.0) || sc.grid < 2 {
        return Err(BenchError::Config("scaling needs 0 < tolerance < 1, mu > 0 and grid >= 2".into()));
    }
    let eps = sc.tolerance;
    let mut rows = Vec::new();
    for &kappa in &sc.kappas {
        let (mu, l) = (sc.mu, sc.mu * kappa);
        let support = || Support::Interval { mu, l, points: sc.grid };
        for v in [Variant::Baseline, Variant::Damped] {
            let p = optimal_params(v, mu, l, eps)?;
            let it = iterations_to_tolerance(support(), p.t, p.eta, eps)?.map(|k| k as f64);
            rows.push(ScalingRow {
                algorithm: default_label(v).into(),
                kappa,
                iterations: it,
                total_time: it.map(|k| k * p.t),
                contraction: None,
            });
        }
        // Squared W2 contracts by E cos² per iteration in the worst direction.
        let p = optimal_params(Variant::Rhmc, mu, l, eps)?;
        let worst = support().points().into_iter().map(|s| expected_cos2(s, p.lambda)).fold(0.0, f64::max);
        rows.push(ScalingRow {
            algorithm: default_label(Variant::Rhmc).into(),
            kappa,
            iterations: Some((2.0 * (1.0 / eps).ln() / -worst.ln()).ceil()),
            total_time: Some(rhmc_expected_time(mu, l, p.lambda, eps)?),
            contraction: None,
        });
        let p = optimal_params(Variant::Chebyshev, mu, l, eps)?;
        let k = p.k.unwrap_or(1);
        rows.push(ScalingRow {
            algorithm: default_label(Variant::Chebyshev).into(),
            kappa,
            iterations: Some(k as f64),
            total_time: Some(chebyshev_total_time(mu, l, k)?),
            contraction: Some(chebyshev_contraction(support(), mu, l, k)?),
        });
    }
    let kappas = &sc.kappas;
    let mut exponents = Vec::new();
    for v in [Variant::Baseline, Variant::Damped, Variant::Rhmc, Variant::Chebyshev] {
        let name = default_label(v);
        let its: Vec<f64> = rows
            .iter()
            .filter(|r| r.algorithm == name)
            .map(|r| r.iterations.unwrap_or(f64::INFINITY))
            .collect();
        exponents.push((name.to_string(), loglog_slope(kappas, &its)));
    }
    let cheb = |kappa: f64| {
        rows.iter()
            .find(|r| r.algorithm == default_label(Variant::Chebyshev) && r.kappa == kappa)
            .and_then(|r| r.total_time)
            .map(|t| t / kappa.ln().max(1.0))
            .unwrap_or(f64::NAN)
    };
    let lo = kappas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = kappas.iter().copied().fold(0.0, f64::max);
    let chebyshev_time_ratio = cheb(lo) / cheb(hi);
    Ok(ScalingReport { rows, exponents, chebyshev_time_ratio })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasRow {
    pub kind: IntegratorKind,
    pub h: f64,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmcVarianceRow {
    pub h: f64,
    pub monte_carlo: f64,
    pub quadrature: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegratorReport {
    pub sigma: f64,
    pub bias: Vec<BiasRow>,
    /// Fitted log-log slope of bias in `h`, per kind.
    pub orders: Vec<(IntegratorKind, f64)>,
    pub smc_variance: Vec<SmcVarianceRow>,
}

impl IntegratorReport {
    pub fn order(&self, kind: IntegratorKind) -> f64 {
        self.orders.iter().find(|o| o.0 == kind).map_or(f64::NAN, |o| o.1)
    }
}

/// One-step stationary bias per kind, and a Monte Carlo check of the sMC
/// expected variance against quadrature.
pub fn integrators(cfg: &BenchConfig) -> Result<IntegratorReport, BenchError> {
    let ic = &cfg.integrators;
    let sigma = ic.sigma;
    if !(sigma > 0.0) || ic.hs.len() < 2 || ic.samples < 2 {
        return Err(BenchError::Config("integrators needs sigma > 0, two or more h values and samples >= 2".into()));
    }
    if ic.hs.iter().any(|&h| !(h > 0.0 && h * h * sigma < 4.0)) {
        return Err(BenchError::Config("every h must satisfy 0 < h and h^2 sigma < 4".into()));
    }
    let mut bias = Vec::new();
    let mut orders = Vec::new();
    for kind in IntegratorKind::ALL {
        let b: Vec<f64> = ic.hs.iter().map(|&h| stationary_bias(kind, sigma, h)).collect();
        orders.push((kind, loglog_slope(&ic.hs, &b)));
        bias.extend(ic.hs.iter().zip(&b).map(|(&h, &bias)| BiasRow { kind, h, bias }));
    }
    let target = Target::quadratic(Spectrum::from_eigenvalues(vec![sigma])?);
    let smc_variance = ic
        .hs
        .par_iter()
        .enumerate()
        .map(|(i, &h)| smc_variance(&target, h, ic.samples, cfg.seed, i as u64))
        .collect();
    Ok(IntegratorReport { sigma, bias, orders, smc_variance })
}

/// `E[x₁²]` after one sMC step from the stationary law, by simulation.
fn smc_variance(target: &Target<f64>, h: f64, n: usize, seed: u64, stream: u64) -> SmcVarianceRow {
    let sigma = target.spectrum().sigma()[0];
    let mut rng = ChainStreams::new(seed, stream).integrator;
    let mut ws = Workspace::new(1);
    let mut s = PhaseState::zeros(1);
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..n {
        s.x[0] = standard_normal::<f64, _>(&mut rng) / sigma.sqrt();
        s.v[0] = standard_normal(&mut rng);
        let tau = rng.random::<f64>() * h;
        smc_in_place(target, &mut s, h, tau, &mut ws);
        let q = s.x[0] * s.x[0];
        sum += q;
        sum2 += q * q;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = (sum2 / nf - mean * mean) * nf / (nf - 1.0);
    SmcVarianceRow {
        h,
        monte_carlo: mean,
        quadrature: expected_stationary_variance(IntegratorKind::Smc, sigma, h),
        standard_error: (var / nf).sqrt(),
    }
}
