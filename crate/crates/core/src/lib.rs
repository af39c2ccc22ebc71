//! Ideal and discretized Hamiltonian Monte Carlo on Gaussian-like targets.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: spectra, phase states and the quadratic / perturbed targets.
//! * [`flow`]: exact Hamiltonian flow and the 2×2 per-coordinate transition blocks.
//! * [`integrate`]: Verlet and randomized-midpoint (sMC) integrators.
//! * [`sample`]: damped, randomized, Chebyshev and coordinate-clock samplers.
//! * [`analyze`]: closed-form contraction rates and Lyapunov certificates.
//! * [`diagnose`]: ESS, covariance error, coupled-chain rates and flow inequalities.
//!
//! Everything is generic over the floating-point scalar; `*64` aliases at the
//! root fix it to `f64`.

pub mod analyze;
pub mod diagnose;
pub mod error;
pub mod flow;
pub mod integrate;
pub mod linalg;
pub mod model;
pub mod rng;
pub mod sample;
mod scalar;

pub use error::{Error, Result};
pub use flow::{exact_flow, transition_block, TransitionBlock};
pub use integrate::{IntegratorKind, IntegratorSpec};
pub use linalg::Mat2;
pub use model::{PhaseState, Potential, Spacing, Spectrum, Target, TargetKind};
pub use rng::ChainStreams;
pub use sample::{ChainRecord, Engine, Init, Recording, SamplerSpec, Variant};
pub use scalar::Scalar;

pub type Spectrum64 = Spectrum<f64>;
pub type Target64 = Target<f64>;
pub type PhaseState64 = PhaseState<f64>;
pub type SamplerSpec64 = SamplerSpec<f64>;
pub type ChainRecord64 = ChainRecord<f64>;
pub type IntegratorSpec64 = IntegratorSpec<f64>;

pub type Spectrum32 = Spectrum<f32>;
pub type Target32 = Target<f32>;
pub type SamplerSpec32 = SamplerSpec<f32>;
pub type ChainRecord32 = ChainRecord<f32>;
