//! Benchmark configuration.
//!
//! Every field has a default, so `{}` is a valid config and reproduces the
//! Table 1 setup: `Σ = diag(1, …, d)` with `d = 10`, 50 chains of 2000
//! recorded leapfrog steps, `eps = 1e-2`.

use std::fs;
use std::path::{Path, PathBuf};

use hmclab::diagnose::EssTruncation;
use hmclab::integrate::leapfrog_stepsize;
use hmclab::{Engine, IntegratorKind, IntegratorSpec, Recording, SamplerSpec, Spacing, Spectrum, Target, Variant};
use serde::{Deserialize, Serialize};

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Eigenvalue rule for the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumRule {
    /// `σᵢ = i` for `i = 1..=d`.
    Index,
    /// `d` evenly spaced values on `[mu, l]`.
    Linear { mu: f64, l: f64 },
    /// `d` log-spaced values on `[mu, l]`.
    Log { mu: f64, l: f64 },
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineConfig {
    Exact,
    /// `h` defaults to the leapfrog rule `√eps/(L d)^{1/4}`.
    Integrator { kind: IntegratorKind, h: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitConfig {
    Default,
    Stationary,
}

/// Overrides applied on top of the tuned parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomAlgorithm {
    pub variant: Variant,
    pub label: Option<String>,
    pub eta: Option<f64>,
    pub t: Option<f64>,
    pub lambda: Option<f64>,
    pub rates: Option<Vec<f64>>,
    pub schedule_len: Option<usize>,
}

/// Either a bare variant name (tuned parameters) or explicit overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgorithmEntry {
    Auto(Variant),
    Custom(CustomAlgorithm),
}

impl AlgorithmEntry {
    pub fn variant(&self) -> Variant {
        match self {
            AlgorithmEntry::Auto(v) => *v,
            AlgorithmEntry::Custom(c) => c.variant,
        }
    }

    pub fn label(&self) -> String {
        match self {
            AlgorithmEntry::Custom(CustomAlgorithm { label: Some(l), .. }) => l.clone(),
            e => default_label(e.variant()).to_string(),
        }
    }
}

/// Names used in reports.
pub fn default_label(v: Variant) -> &'static str {
    match v {
        Variant::Baseline => "constant",
        v => v.name(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    pub kappas: Vec<f64>,
    pub mu: f64,
    pub tolerance: f64,
    pub grid: usize,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            kappas: vec![1e2, 1e3, 1e4],
            mu: 1.0,
            tolerance: 1e-3,
            grid: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorsConfig {
    pub sigma: f64,
    pub hs: Vec<f64>,
    /// Monte Carlo draws per stepsize for the sMC variance check.
    pub samples: usize,
}

impl Default for IntegratorsConfig {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            hs: vec![1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1],
            samples: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub d: usize,
    pub spectrum: SpectrumRule,
    /// Strength of the `log cosh` perturbation; 0 is the plain quadratic.
    pub perturbation: f64,
    pub algorithms: Vec<AlgorithmEntry>,
    pub chains: usize,
    pub k: usize,
    pub eps: f64,
    pub seed: u64,
    pub engine: EngineConfig,
    /// Defaults to per-step recording with an integrator, per-iteration otherwise.
    pub recording: Option<Recording>,
    pub init: InitConfig,
    pub ess: EssTruncation,
    pub output: Option<PathBuf>,
    pub format: Format,
    /// Also write every recorded position next to the report.
    pub positions: bool,
    pub scaling: ScalingConfig,
    pub integrators: IntegratorsConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            d: 10,
            spectrum: SpectrumRule::Index,
            perturbation: 0.0,
            algorithms: vec![
                AlgorithmEntry::Auto(Variant::Baseline),
                AlgorithmEntry::Auto(Variant::Chebyshev),
                AlgorithmEntry::Auto(Variant::Damped),
                AlgorithmEntry::Auto(Variant::Rhmc),
            ],
            chains: 50,
            k: 2000,
            eps: 1e-2,
            seed: 1,
            engine: EngineConfig::Integrator {
                kind: IntegratorKind::PositionVerlet,
                h: None,
            },
            recording: None,
            init: InitConfig::Default,
            ess: EssTruncation::InitialPositive,
            output: None,
            format: Format::Csv,
            positions: true,
            scaling: ScalingConfig::default(),
            integrators: IntegratorsConfig::default(),
        }
    }
}

fn bad(msg: impl Into<String>) -> BenchError {
    BenchError::Config(msg.into())
}

impl BenchConfig {
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.chains == 0 {
            return Err(bad("chains must be at least 1"));
        }
        if self.k < hmclab::diagnose::MIN_ESS_LEN {
            return Err(bad(format!("k must be at least {}", hmclab::diagnose::MIN_ESS_LEN)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(bad("eps must lie in (0, 1)"));
        }
        if self.algorithms.is_empty() {
            return Err(bad("no algorithms"));
        }
        let target = self.target()?;
        for a in &self.algorithms {
            self.sampler(a, &target, 0)?;
        }
        Ok(())
    }

    pub fn spectrum(&self) -> Result<Spectrum<f64>, BenchError> {
        let s = match &self.spectrum {
            SpectrumRule::Index => Spectrum::from_eigenvalues((1..=self.d).map(|i| i as f64).collect()),
            SpectrumRule::Linear { mu, l } => Spectrum::spaced(self.d, *mu, *l, Spacing::Linear),
            SpectrumRule::Log { mu, l } => Spectrum::spaced(self.d, *mu, *l, Spacing::Log),
            SpectrumRule::Explicit(v) => {
                if v.len() != self.d {
                    return Err(bad(format!("spectrum has {} values but d = {}", v.len(), self.d)));
                }
                Spectrum::from_eigenvalues(v.clone())
            }
        };
        s.map_err(|e| bad(format!("spectrum: {e}")))
    }

    pub fn target(&self) -> Result<Target<f64>, BenchError> {
        let s = self.spectrum()?;
        if self.perturbation == 0.0 {
            Ok(Target::quadratic(s))
        } else {
            Target::perturbed(s, self.perturbation).map_err(|e| bad(format!("perturbation: {e}")))
        }
    }

    pub fn engine(&self, target: &Target<f64>) -> Result<Engine<f64>, BenchError> {
        match &self.engine {
            EngineConfig::Exact => Ok(Engine::Exact),
            EngineConfig::Integrator { kind, h } => {
                let l = target.curvature_bounds().1;
                let h = match h {
                    Some(h) => *h,
                    None => leapfrog_stepsize(l, self.d, self.eps).map_err(|e| bad(format!("stepsize: {e}")))?,
                };
                IntegratorSpec::new(*kind, h, 1, l)
                    .map(Engine::Integrator)
                    .map_err(|e| bad(format!("integrator: {e}")))
            }
        }
    }

    pub fn recording(&self) -> Recording {
        self.recording.unwrap_or(match self.engine {
            EngineConfig::Exact => Recording::Iterations,
            EngineConfig::Integrator { .. } => Recording::Steps,
        })
    }

    /// Fully resolved sampler for one chain; chain `c` runs under seed `seed + c`.
    pub fn sampler(&self, entry: &AlgorithmEntry, target: &Target<f64>, chain: usize) -> Result<SamplerSpec<f64>, BenchError> {
        let (mu, l) = target.curvature_bounds();
        let bounds = Spectrum::new(target.spectrum().sigma().to_vec(), mu, l).map_err(|e| bad(e.to_string()))?;
        let seed = self.seed.wrapping_add(chain as u64);
        let mut spec = SamplerSpec::auto(entry.variant(), &bounds, self.eps, self.k, seed)
            .map_err(|e| bad(format!("{}: {e}", entry.label())))?;
        if let AlgorithmEntry::Custom(c) = entry {
            if let Some(v) = c.eta {
                spec.eta = v;
            }
            if let Some(v) = c.t {
                spec.t = v;
            }
            if let Some(v) = c.lambda {
                spec.lambda = v;
            }
            if let Some(v) = &c.rates {
                spec.rates = v.clone();
            }
            if c.schedule_len.is_some() {
                spec.schedule_len = c.schedule_len;
            }
        }
        let init = match self.init {
            InitConfig::Default => hmclab::Init::Default,
            InitConfig::Stationary => hmclab::Init::Stationary,
        };
        let spec = spec
            .with_engine(self.engine(target)?)
            .with_recording(self.recording())
            .with_init(init);
        spec.validate(target).map_err(|e| bad(format!("{}: {e}", entry.label())))?;
        Ok(spec)
    }
}
