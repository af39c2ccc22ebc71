//! Exact Hamiltonian flow for quadratic targets and the damped-HMC
//! per-coordinate transition `y₊ = A y + B G`.
//!
//! Each coordinate rotates in its own `(x, v)` plane, so a `d`-dimensional
//! step is `d` independent 2×2 maps and nothing larger is ever formed.

use serde::Serialize;

use crate::error::{ensure, Result};
use crate::linalg::Mat2;
use crate::model::{PhaseState, Spectrum};
use crate::Scalar;

/// Rotates one coordinate by time `t` under curvature `sigma`.
#[inline]
pub fn rotate<T: Scalar>(sigma: T, x: T, v: T, t: T) -> (T, T) {
    let w = sigma.sqrt();
    let (s, c) = (w * t).sin_cos();
    (c * x + s * v / w, -w * s * x + c * v)
}

/// Rotates every coordinate of `state` in place.
pub fn exact_flow_in_place<T: Scalar>(spectrum: &Spectrum<T>, state: &mut PhaseState<T>, t: T) {
    for ((x, v), &sigma) in state.x.iter_mut().zip(state.v.iter_mut()).zip(spectrum.sigma()) {
        let (nx, nv) = rotate(sigma, *x, *v, t);
        *x = nx;
        *v = nv;
    }
}

/// Exact flow of `ẋ = v, v̇ = −Σx` for time `t ≥ 0`.
pub fn exact_flow<T: Scalar>(
    spectrum: &Spectrum<T>,
    state: &PhaseState<T>,
    t: T,
) -> Result<PhaseState<T>> {
    ensure(t >= T::zero(), "t", t, "must be nonnegative")?;
    if state.dim() != spectrum.dim() {
        return Err(crate::Error::DimensionMismatch {
            expected: spectrum.dim(),
            found: state.dim(),
        });
    }
    let mut out = state.clone();
    exact_flow_in_place(spectrum, &mut out, t);
    Ok(out)
}

/// Phase-space rotation matrix of the exact flow.
pub fn flow_matrix<T: Scalar>(sigma: T, t: T) -> Mat2<T> {
    let w = sigma.sqrt();
    let (s, c) = (w * t).sin_cos();
    Mat2::new(c, s / w, -w * s, c)
}

/// One coordinate of damped HMC: refresh, flow for `t`, refresh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionBlock<T> {
    pub a: Mat2<T>,
    pub b: Mat2<T>,
    pub sigma: T,
    pub t: T,
    pub eta: T,
}

pub fn transition_block<T: Scalar>(sigma: T, t: T, eta: T) -> Result<TransitionBlock<T>> {
    ensure(sigma > T::zero(), "sigma", sigma, "must be positive")?;
    ensure(t > T::zero(), "T", t, "must be positive")?;
    ensure(eta >= T::zero() && eta < T::one(), "eta", eta, "must lie in [0, 1)")?;
    let w = sigma.sqrt();
    let (s, c) = (w * t).sin_cos();
    let a = Mat2::new(c, eta * s / w, -eta * w * s, eta * eta * c);
    let k = (T::one() - eta * eta).sqrt();
    let b = Mat2::new(k * s / w, T::zero(), k * eta * c, k);
    Ok(TransitionBlock { a, b, sigma, t, eta })
}

impl<T: Scalar> TransitionBlock<T> {
    /// `A y + B g` with `g = (z, z′)`.
    pub fn apply(&self, y: [T; 2], g: [T; 2]) -> [T; 2] {
        let ay = self.a.apply(y);
        let bg = self.b.apply(g);
        [ay[0] + bg[0], ay[1] + bg[1]]
    }

    /// Stationary covariance `Π = diag(1/σ, 1)`.
    pub fn stationary_cov(&self) -> Mat2<T> {
        Mat2::diag(self.sigma.recip(), T::one())
    }

    /// `A Π Aᵀ + B Bᵀ`, which equals `Π` when the block preserves `N(0, Π)`.
    pub fn propagated_cov(&self) -> Mat2<T> {
        let pi = self.stationary_cov();
        self.a
            .mul(&pi)
            .mul(&self.a.transpose())
            .add(&self.b.mul(&self.b.transpose()))
    }
}
