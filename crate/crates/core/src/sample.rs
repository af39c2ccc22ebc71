//! The samplers: damped HMC (and its `η = 0` constant-time baseline),
//! randomized-time HMC, Chebyshev-scheduled HMC and coordinate-clock HMC.
//!
//! Each sampler runs either on the exact flow (quadratic targets only) or on
//! a numerical integrator. Randomness comes from [`ChainStreams`] keyed by
//! `(seed, chain)`, so two chains built from the same key but different
//! initial states are synchronously coupled.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::analyze::chebyshev_schedule;
use crate::error::{ensure, Error, Result};
use crate::flow::{exact_flow_in_place, rotate};
use crate::integrate::{IntegratorSpec, Workspace};
use crate::model::{PhaseState, Spectrum, Target};
use crate::rng::{exponential, fill_standard_normal, standard_normal, uniform, ChainStreams};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Baseline,
    Chebyshev,
    Damped,
    Rhmc,
    Coordinate,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Baseline,
        Variant::Chebyshev,
        Variant::Damped,
        Variant::Rhmc,
        Variant::Coordinate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Baseline => "baseline",
            Self::Chebyshev => "chebyshev",
            Self::Damped => "damped",
            Self::Rhmc => "rhmc",
            Self::Coordinate => "coordinate",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "constant" | "constant-time" => Ok(Self::Baseline),
            _ => Self::ALL
                .into_iter()
                .find(|v| v.name() == s)
                .ok_or_else(|| format!("unknown sampler variant '{s}'")),
        }
    }
}

/// How trajectories are computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine<T> {
    /// Closed-form rotation; quadratic targets only.
    Exact,
    Integrator(IntegratorSpec<T>),
}

/// Initial state.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init<T> {
    /// `x ~ N(0, I/L)`, `v ~ N(0, I)`.
    Default,
    /// `x ~ N(0, diag(1/σᵢ))`, `v ~ N(0, I)`; for perturbed targets this is
    /// the law of the quadratic part only.
    Stationary,
    State(PhaseState<T>),
}

/// Which positions end up in the [`ChainRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recording {
    /// One row per iteration, `K` rows.
    Iterations,
    /// One row per integrator step until `K` rows; integrator engine only.
    Steps,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerSpec<T> {
    pub variant: Variant,
    /// Persistence of the velocity refresh; 0 is a full refresh.
    pub eta: T,
    /// Integration time (damped, baseline) or snapshot interval (coordinate).
    pub t: T,
    /// Mean integration time (rhmc).
    pub lambda: T,
    /// Per-coordinate clock rates (coordinate), in 1/time.
    pub rates: Vec<T>,
    /// Iterations, or recorded rows under [`Recording::Steps`].
    pub k: usize,
    pub seed: u64,
    pub chain: u64,
    pub engine: Engine<T>,
    pub init: Init<T>,
    pub recording: Recording,
    /// Chebyshev schedule length; defaults to `k`. Longer runs cycle through
    /// the schedule, reshuffling each pass.
    pub schedule_len: Option<usize>,
}

impl<T: Scalar> SamplerSpec<T> {
    fn blank(variant: Variant, k: usize, seed: u64) -> Self {
        Self {
            variant,
            eta: T::zero(),
            t: T::zero(),
            lambda: T::zero(),
            rates: Vec::new(),
            k,
            seed,
            chain: 0,
            engine: Engine::Exact,
            init: Init::Default,
            recording: Recording::Iterations,
            schedule_len: None,
        }
    }

    pub fn damped(eta: T, t: T, k: usize, seed: u64) -> Self {
        Self {
            eta,
            t,
            ..Self::blank(Variant::Damped, k, seed)
        }
    }

    pub fn baseline(t: T, k: usize, seed: u64) -> Self {
        Self {
            t,
            ..Self::blank(Variant::Baseline, k, seed)
        }
    }

    pub fn rhmc(eta: T, lambda: T, k: usize, seed: u64) -> Self {
        Self {
            eta,
            lambda,
            ..Self::blank(Variant::Rhmc, k, seed)
        }
    }

    pub fn chebyshev(k: usize, seed: u64) -> Self {
        Self::blank(Variant::Chebyshev, k, seed)
    }

    /// `k` snapshots spaced `t` apart.
    pub fn coordinate(eta: T, rates: Vec<T>, t: T, k: usize, seed: u64) -> Self {
        Self {
            eta,
            rates,
            t,
            ..Self::blank(Variant::Coordinate, k, seed)
        }
    }

    /// Parameters from [`optimal_params`] for this spectrum.
    pub fn auto(variant: Variant, spectrum: &Spectrum<T>, eps: T, k: usize, seed: u64) -> Result<Self> {
        let p = optimal_params(variant, spectrum.mu(), spectrum.l(), eps)?;
        let mut s = Self::blank(variant, k, seed);
        s.eta = p.eta;
        s.t = p.t;
        s.lambda = p.lambda;
        if variant == Variant::Coordinate {
            s.rates = p.rates(spectrum.sigma());
        }
        if variant == Variant::Chebyshev {
            s.schedule_len = p.k;
        }
        Ok(s)
    }

    pub fn with_engine(mut self, engine: Engine<T>) -> Self {
        self.engine = engine;
        self
    }

    pub fn with_init(mut self, init: Init<T>) -> Self {
        self.init = init;
        self
    }

    pub fn with_recording(mut self, recording: Recording) -> Self {
        self.recording = recording;
        self
    }

    pub fn with_chain(mut self, chain: u64) -> Self {
        self.chain = chain;
        self
    }

    pub fn validate(&self, target: &Target<T>) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("K", 0.0, "must be at least 1"));
        }
        ensure(
            self.eta >= T::zero() && self.eta < T::one(),
            "eta",
            self.eta,
            "must lie in [0, 1)",
        )?;
        match self.variant {
            Variant::Damped | Variant::Baseline | Variant::Coordinate => {
                ensure(self.t > T::zero(), "T", self.t, "must be positive")?
            }
            Variant::Rhmc => ensure(self.lambda > T::zero(), "lambda", self.lambda, "must be positive")?,
            Variant::Chebyshev => {
                if self.schedule_len == Some(0) {
                    return Err(Error::invalid("schedule_len", 0.0, "must be at least 1"));
                }
            }
        }
        if self.variant == Variant::Baseline && self.eta != T::zero() {
            return Err(Error::invalid("eta", self.eta.as_f64(), "baseline uses a full refresh"));
        }
        if self.variant == Variant::Coordinate {
            if self.rates.len() != target.spectrum().dim() {
                return Err(Error::DimensionMismatch {
                    expected: target.spectrum().dim(),
                    found: self.rates.len(),
                });
            }
            for &r in &self.rates {
                ensure(r >= T::zero() && r.is_finite(), "rate", r, "must be finite and nonnegative")?;
            }
            if self.engine != Engine::Exact {
                return Err(Error::Unsupported("coordinate clocks run on the exact engine only"));
            }
        }
        if self.engine == Engine::Exact && !target.is_quadratic() {
            return Err(Error::Unsupported("the exact engine needs a quadratic target"));
        }
        if self.engine == Engine::Exact && self.recording == Recording::Steps {
            return Err(Error::Unsupported("per-step recording needs an integrator engine"));
        }
        if let Init::State(s) = &self.init {
            if s.dim() != target.spectrum().dim() {
                return Err(Error::DimensionMismatch {
                    expected: target.spectrum().dim(),
                    found: s.dim(),
                });
            }
        }
        Ok(())
    }
}

/// Output of one chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRecord<T> {
    /// Row-major `K × d` positions.
    pub positions: Vec<T>,
    pub dim: usize,
    pub jump_times: Vec<T>,
    pub total_time: T,
    pub seed: u64,
    pub chain: u64,
}

impl<T: Scalar> ChainRecord<T> {
    pub fn rows(&self) -> usize {
        self.positions.len() / self.dim.max(1)
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    pub fn last(&self) -> &[T] {
        self.row(self.rows() - 1)
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.positions.iter().skip(j).step_by(self.dim).copied().collect()
    }
}

/// `ηv + √(1−η²) z`.
pub fn ou_refresh<T: Scalar>(v: &[T], eta: T, z: &[T]) -> Vec<T> {
    let s = (T::one() - eta * eta).sqrt();
    v.iter().zip(z).map(|(&v, &z)| eta * v + s * z).collect()
}

fn refresh_in_place<T: Scalar>(v: &mut [T], eta: T, z: &mut [T], streams: &mut ChainStreams) {
    fill_standard_normal(&mut streams.refresh, z);
    let s = (T::one() - eta * eta).sqrt();
    for (v, &z) in v.iter_mut().zip(z.iter()) {
        *v = eta * *v + s * z;
    }
}

/// One sampler chain advanced an iteration at a time.
#[derive(Debug, Clone)]
pub struct Chain<'a, T: Scalar> {
    target: &'a Target<T>,
    spec: &'a SamplerSpec<T>,
    state: PhaseState<T>,
    streams: ChainStreams,
    ws: Workspace<T>,
    z: Vec<T>,
    schedule: Vec<T>,
    schedule_pos: usize,
    cum_rates: Vec<T>,
    until_event: T,
    jump_times: Vec<T>,
}

impl<'a, T: Scalar> Chain<'a, T> {
    pub fn new(target: &'a Target<T>, spec: &'a SamplerSpec<T>) -> Result<Self> {
        spec.validate(target)?;
        let d = target.spectrum().dim();
        let mut streams = ChainStreams::new(spec.seed, spec.chain);
        let state = match &spec.init {
            Init::State(s) => s.clone(),
            Init::Default => {
                let sd = target.curvature_bounds().1.sqrt().recip();
                let x = (0..d).map(|_| sd * standard_normal::<T, _>(&mut streams.init)).collect();
                let v = (0..d).map(|_| standard_normal(&mut streams.init)).collect();
                PhaseState { x, v }
            }
            Init::Stationary => {
                let x = target
                    .spectrum()
                    .sigma()
                    .iter()
                    .map(|&s| standard_normal::<T, _>(&mut streams.init) / s.sqrt())
                    .collect();
                let v = (0..d).map(|_| standard_normal(&mut streams.init)).collect();
                PhaseState { x, v }
            }
        };
        let schedule = if spec.variant == Variant::Chebyshev {
            let (mu, l) = target.curvature_bounds();
            chebyshev_schedule(mu, l, spec.schedule_len.unwrap_or(spec.k))?
        } else {
            Vec::new()
        };
        let mut cum_rates = Vec::with_capacity(spec.rates.len());
        let mut acc = T::zero();
        for &r in &spec.rates {
            acc = acc + r;
            cum_rates.push(acc);
        }
        let mut chain = Self {
            target,
            spec,
            state,
            streams,
            ws: Workspace::new(d),
            z: vec![T::zero(); d],
            schedule,
            schedule_pos: 0,
            cum_rates,
            until_event: T::zero(),
            jump_times: Vec::new(),
        };
        if spec.variant == Variant::Coordinate {
            chain.until_event = chain.draw_event_gap();
        }
        Ok(chain)
    }

    pub fn state(&self) -> &PhaseState<T> {
        &self.state
    }

    pub fn jump_times(&self) -> &[T] {
        &self.jump_times
    }

    /// Moves along the Hamiltonian flow for time `t`; with an integrator,
    /// `sink` sees every step and may stop the trajectory by returning false.
    /// Returns the time actually integrated and whether to continue.
    fn flow(&mut self, t: T, sink: &mut dyn FnMut(&[T]) -> bool) -> (T, bool) {
        match self.spec.engine {
            Engine::Exact => {
                exact_flow_in_place(self.target.spectrum(), &mut self.state, t);
                (t, true)
            }
            Engine::Integrator(spec) => {
                let n = spec.steps_for(t);
                for i in 0..n {
                    spec.step(
                        self.target,
                        &mut self.state,
                        &mut self.streams.integrator,
                        &mut self.ws,
                    );
                    if !sink(&self.state.x) {
                        return (spec.h * T::from_usize_lossy(i + 1), false);
                    }
                }
                (spec.h * T::from_usize_lossy(n), true)
            }
        }
    }

    fn refresh(&mut self, eta: T) {
        refresh_in_place(&mut self.state.v, eta, &mut self.z, &mut self.streams);
    }

    fn draw_event_gap(&mut self) -> T {
        match self.cum_rates.last() {
            Some(&total) if total > T::zero() => exponential(&mut self.streams.duration, total.recip()),
            _ => T::infinity(),
        }
    }

    fn next_schedule_time(&mut self) -> T {
        if self.schedule_pos == 0 {
            self.schedule.shuffle(&mut self.streams.duration);
        }
        let t = self.schedule[self.schedule_pos];
        self.schedule_pos = (self.schedule_pos + 1) % self.schedule.len();
        t
    }

    /// One coordinate-clock snapshot interval on the exact flow.
    fn coordinate_interval(&mut self) {
        let sigma = self.target.spectrum().sigma();
        let mut remaining = self.spec.t;
        loop {
            let gap = self.until_event;
            if gap > remaining {
                exact_flow_in_place(self.target.spectrum(), &mut self.state, remaining);
                self.jump_times.push(remaining);
                self.until_event = gap - remaining;
                return;
            }
            for i in 0..sigma.len() {
                let (x, v) = rotate(sigma[i], self.state.x[i], self.state.v[i], gap);
                self.state.x[i] = x;
                self.state.v[i] = v;
            }
            self.jump_times.push(gap);
            remaining = remaining - gap;
            let total = *self.cum_rates.last().expect("rates present");
            let u: T = uniform(&mut self.streams.duration, total);
            let i = self
                .cum_rates
                .iter()
                .position(|&c| u < c)
                .unwrap_or(self.cum_rates.len() - 1);
            let z: T = standard_normal(&mut self.streams.refresh);
            let eta = self.spec.eta;
            self.state.v[i] = eta * self.state.v[i] + (T::one() - eta * eta).sqrt() * z;
            self.until_event = self.draw_event_gap();
        }
    }

    /// Runs one iteration. Returns false if `sink` asked to stop.
    pub fn step(&mut self, sink: &mut dyn FnMut(&[T]) -> bool) -> bool {
        let eta = self.spec.eta;
        match self.spec.variant {
            Variant::Damped | Variant::Baseline => {
                self.refresh(eta);
                let (dt, go) = self.flow(self.spec.t, sink);
                self.jump_times.push(dt);
                self.refresh(eta);
                go
            }
            Variant::Rhmc => {
                let t = exponential(&mut self.streams.duration, self.spec.lambda);
                let (dt, go) = self.flow(t, sink);
                self.jump_times.push(dt);
                self.refresh(eta);
                go
            }
            Variant::Chebyshev => {
                let t = self.next_schedule_time();
                let (dt, go) = self.flow(t, sink);
                self.jump_times.push(dt);
                self.refresh(T::zero());
                go
            }
            Variant::Coordinate => {
                self.coordinate_interval();
                true
            }
        }
    }

    fn into_record(self, positions: Vec<T>) -> ChainRecord<T> {
        let total_time = self.jump_times.iter().copied().sum();
        ChainRecord {
            positions,
            dim: self.state.dim(),
            jump_times: self.jump_times,
            total_time,
            seed: self.spec.seed,
            chain: self.spec.chain,
        }
    }
}

/// Runs any variant.
pub fn run<T: Scalar>(target: &Target<T>, spec: &SamplerSpec<T>) -> Result<ChainRecord<T>> {
    let mut chain = Chain::new(target, spec)?;
    let d = target.spectrum().dim();
    let k = spec.k;
    let mut positions = Vec::with_capacity(k * d);
    match spec.recording {
        Recording::Iterations => {
            for _ in 0..k {
                chain.step(&mut |_| true);
                positions.extend_from_slice(&chain.state.x);
            }
        }
        Recording::Steps => {
            let mut rows = 0;
            while rows < k {
                chain.step(&mut |x| {
                    positions.extend_from_slice(x);
                    rows += 1;
                    rows < k
                });
            }
        }
    }
    Ok(chain.into_record(positions))
}

fn expect_variant<T>(spec: &SamplerSpec<T>, allowed: &[Variant]) -> Result<()> {
    if allowed.contains(&spec.variant) {
        Ok(())
    } else {
        Err(Error::Unsupported("sampler variant does not match the runner"))
    }
}

/// Damped HMC: half refresh, flow for `T`, half refresh.
pub fn run_damped<T: Scalar>(target: &Target<T>, spec: &SamplerSpec<T>) -> Result<ChainRecord<T>> {
    expect_variant(spec, &[Variant::Damped, Variant::Baseline])?;
    run(target, spec)
}

/// Randomized-time HMC: flow for `T_k ~ Exp(mean λ)`, then refresh.
pub fn run_rhmc<T: Scalar>(target: &Target<T>, spec: &SamplerSpec<T>) -> Result<ChainRecord<T>> {
    expect_variant(spec, &[Variant::Rhmc])?;
    run(target, spec)
}

/// Chebyshev-scheduled HMC with full refresh.
pub fn run_chebyshev<T: Scalar>(target: &Target<T>, spec: &SamplerSpec<T>) -> Result<ChainRecord<T>> {
    expect_variant(spec, &[Variant::Chebyshev])?;
    run(target, spec)
}

/// Coordinate-clock HMC, snapshotted every `spec.t` for `spec.k` snapshots.
pub fn run_coordinate<T: Scalar>(target: &Target<T>, spec: &SamplerSpec<T>) -> Result<ChainRecord<T>> {
    expect_variant(spec, &[Variant::Coordinate])?;
    run(target, spec)
}

/// Tuned parameters for a variant on `[μ, L]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalParams<T> {
    pub variant: Variant,
    pub eta: T,
    /// Integration time, or snapshot interval for the coordinate variant.
    pub t: T,
    pub lambda: T,
    /// Chebyshev schedule length.
    pub k: Option<usize>,
    /// Chebyshev durations in root order.
    pub schedule: Vec<T>,
    /// Coordinate clock rate per unit curvature: `rateᵢ = σᵢ · rate_scale`.
    pub rate_scale: T,
}

impl<T: Scalar> OptimalParams<T> {
    pub fn rates(&self, sigma: &[T]) -> Vec<T> {
        sigma.iter().map(|&s| s * self.rate_scale).collect()
    }
}

/// Damped friction `cos θ / (1 + sin θ)` with `θ = π/(1+√κ)`; equal to
/// `(1 − sin θ)/cos θ` but finite at `κ = 1`, where it is 0.
pub fn damped_eta<T: Scalar>(kappa: T) -> T {
    if kappa <= T::one() {
        return T::zero();
    }
    let theta = T::PI() / (T::one() + kappa.sqrt());
    let (s, c) = theta.sin_cos();
    c / (T::one() + s)
}

pub fn optimal_params<T: Scalar>(variant: Variant, mu: T, l: T, eps: T) -> Result<OptimalParams<T>> {
    ensure(mu > T::zero(), "mu", mu, "must be positive")?;
    ensure(l >= mu, "L", l, "must be at least mu")?;
    let rmu = mu.sqrt();
    let rl = l.sqrt();
    let mut p = OptimalParams {
        variant,
        eta: T::zero(),
        t: T::zero(),
        lambda: T::zero(),
        k: None,
        schedule: Vec::new(),
        rate_scale: T::zero(),
    };
    match variant {
        Variant::Damped => {
            p.t = T::PI() / (rl + rmu);
            p.eta = damped_eta(l / mu);
        }
        Variant::Baseline => p.t = T::PI() / (T::lit(2.0) * rl),
        Variant::Rhmc => p.lambda = (T::lit(2.0) * rmu).recip(),
        Variant::Chebyshev => {
            ensure(eps > T::zero() && eps < T::one(), "eps", eps, "must lie in (0, 1)")?;
            let k = ((l / mu).sqrt() * eps.recip().ln()).ceil().to_usize().unwrap_or(1).max(1);
            p.k = Some(k);
            p.schedule = chebyshev_schedule(mu, l, k)?;
            p.t = p.schedule.iter().copied().sum();
        }
        Variant::Coordinate => {
            p.rate_scale = rmu.recip();
            p.t = (T::lit(2.0) * rmu).recip();
        }
    }
    Ok(p)
}
