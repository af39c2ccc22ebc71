//! Target distributions: diagonal quadratics and a log-cosh perturbation.
//!
//! A general SPD precision `Q = UΛUᵀ` reduces to the diagonal case by the
//! rotation `x ↦ Uᵀx`; every sampler here commutes with that rotation (the
//! velocity refresh is isotropic), so only diagonal spectra are modeled.

use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::scalar::{dot, norm_sq};
use crate::Scalar;

/// Hessian eigenvalues `σ₁..σ_d` together with bounds `μ ≤ σᵢ ≤ L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum<T> {
    sigma: Vec<T>,
    mu: T,
    l: T,
}

/// Placement of eigenvalues between `μ` and `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl<T: Scalar> Spectrum<T> {
    /// Builds a spectrum with explicit bounds.
    pub fn new(sigma: Vec<T>, mu: T, l: T) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        ensure(mu > T::zero(), "mu", mu, "must be positive")?;
        ensure(l >= mu, "L", l, "must be at least mu")?;
        for &s in &sigma {
            ensure(s >= mu && s <= l, "sigma", s, "must lie in [mu, L]")?;
        }
        Ok(Self { sigma, mu, l })
    }

    /// Uses the smallest and largest eigenvalue as `μ` and `L`.
    pub fn from_eigenvalues(sigma: Vec<T>) -> Result<Self> {
        let mu = sigma.iter().copied().fold(T::infinity(), T::min);
        let l = sigma.iter().copied().fold(T::neg_infinity(), T::max);
        if sigma.is_empty() {
            return Self::new(sigma, T::one(), T::one());
        }
        Self::new(sigma, mu, l)
    }

    /// `d` eigenvalues from `μ` to `L` inclusive.
    pub fn spaced(d: usize, mu: T, l: T, spacing: Spacing) -> Result<Self> {
        ensure(mu > T::zero(), "mu", mu, "must be positive")?;
        ensure(l >= mu, "L", l, "must be at least mu")?;
        if d == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        let sigma = (0..d)
            .map(|i| {
                if d == 1 {
                    return mu;
                }
                let frac = T::from_usize_lossy(i) / T::from_usize_lossy(d - 1);
                let s = match spacing {
                    Spacing::Linear => mu + (l - mu) * frac,
                    Spacing::Log => (mu.ln() + (l.ln() - mu.ln()) * frac).exp(),
                };
                s.max(mu).min(l)
            })
            .collect();
        Self::new(sigma, mu, l)
    }

    pub fn sigma(&self) -> &[T] {
        &self.sigma
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn l(&self) -> T {
        self.l
    }

    pub fn kappa(&self) -> T {
        self.l / self.mu
    }

    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    /// Stationary position variances `1/σᵢ`.
    pub fn target_variances(&self) -> Vec<T> {
        self.sigma.iter().map(|&s| s.recip()).collect()
    }
}

/// Position/velocity pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseState<T> {
    pub x: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> PhaseState<T> {
    pub fn new(x: Vec<T>, v: Vec<T>) -> Result<Self> {
        if x.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: v.len(),
            });
        }
        Ok(Self { x, v })
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            x: vec![T::zero(); d],
            v: vec![T::zero(); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Euclidean distance in phase space.
    pub fn distance(&self, other: &Self) -> T {
        let dx: T = self.x.iter().zip(&other.x).map(|(&a, &b)| (a - b) * (a - b)).sum();
        let dv: T = self.v.iter().zip(&other.v).map(|(&a, &b)| (a - b) * (a - b)).sum();
        (dx + dv).sqrt()
    }
}

/// A potential `f` with its gradient; integrators are written against this.
pub trait Potential<T: Scalar> {
    fn dim(&self) -> usize;
    fn value(&self, x: &[T]) -> T;
    /// Writes `∇f(x)` into `out`; slices have length [`Potential::dim`].
    fn gradient_into(&self, x: &[T], out: &mut [T]);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    Quadratic,
    PerturbedQuadratic,
}

/// `f(x) = ½ Σ σᵢxᵢ² + eps Σ log cosh xᵢ`; `eps = 0` is the plain quadratic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Target<T> {
    kind: TargetKind,
    spectrum: Spectrum<T>,
    eps: T,
}

/// `log cosh x` without overflow.
fn log_cosh<T: Scalar>(x: T) -> T {
    let a = x.abs();
    a + (-(a + a)).exp().ln_1p() - T::LN_2()
}

impl<T: Scalar> Target<T> {
    pub fn quadratic(spectrum: Spectrum<T>) -> Self {
        Self {
            kind: TargetKind::Quadratic,
            spectrum,
            eps: T::zero(),
        }
    }

    pub fn perturbed(spectrum: Spectrum<T>, eps: T) -> Result<Self> {
        ensure(eps >= T::zero(), "eps", eps, "must be nonnegative")?;
        Ok(Self {
            kind: TargetKind::PerturbedQuadratic,
            spectrum,
            eps,
        })
    }

    pub fn kind(&self) -> TargetKind {
        self.kind
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn is_quadratic(&self) -> bool {
        self.kind == TargetKind::Quadratic || self.eps == T::zero()
    }

    /// Strong convexity and smoothness constants `(μ, L + eps)`.
    pub fn curvature_bounds(&self) -> (T, T) {
        (self.spectrum.mu(), self.spectrum.l() + self.eps)
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n == self.spectrum.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.spectrum.dim(),
                found: n,
            })
        }
    }

    pub fn potential(&self, x: &[T]) -> Result<T> {
        self.check_dim(x.len())?;
        Ok(self.value(x))
    }

    pub fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_dim(x.len())?;
        let mut g = vec![T::zero(); x.len()];
        self.gradient_into(x, &mut g);
        Ok(g)
    }

    /// Diagonal of `∇²f(x)`: `σᵢ + eps·sech²(xᵢ)`.
    pub fn hessian_diag(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_dim(x.len())?;
        Ok(self
            .spectrum
            .sigma()
            .iter()
            .zip(x)
            .map(|(&s, &xi)| {
                let sech = xi.cosh().recip();
                s + self.eps * sech * sech
            })
            .collect())
    }

    /// Hamiltonian `f(x) + ½‖v‖²`.
    pub fn energy(&self, state: &PhaseState<T>) -> Result<T> {
        self.check_dim(state.dim())?;
        Ok(self.value(&state.x) + T::lit(0.5) * norm_sq(&state.v))
    }
}

impl<T: Scalar> Potential<T> for Target<T> {
    fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    fn value(&self, x: &[T]) -> T {
        let half = T::lit(0.5);
        let quad = half
            * self
                .spectrum
                .sigma()
                .iter()
                .zip(x)
                .map(|(&s, &xi)| s * xi * xi)
                .sum::<T>();
        if self.eps == T::zero() {
            quad
        } else {
            quad + self.eps * x.iter().map(|&xi| log_cosh(xi)).sum::<T>()
        }
    }

    fn gradient_into(&self, x: &[T], out: &mut [T]) {
        for ((o, &s), &xi) in out.iter_mut().zip(self.spectrum.sigma()).zip(x) {
            *o = s * xi;
            if self.eps != T::zero() {
                *o = *o + self.eps * xi.tanh();
            }
        }
    }
}

/// `½ Σ wᵢxᵢ²` with arbitrary nonnegative weights; used for shadow energies.
pub fn weighted_quadratic<T: Scalar>(weights: &[T], x: &[T]) -> T {
    let wx: Vec<T> = weights.iter().zip(x).map(|(&w, &xi)| w * xi).collect();
    T::lit(0.5) * dot(&wx, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quad(sigma: &[f64]) -> Target<f64> {
        Target::quadratic(Spectrum::from_eigenvalues(sigma.to_vec()).unwrap())
    }

    #[test]
    fn quadratic_gradient_is_sigma_x() {
        let t = quad(&[1.0, 4.0]);
        assert_eq!(t.gradient(&[1.0, 1.0]).unwrap(), vec![1.0, 4.0]);
    }

    #[test]
    fn gradient_vanishes_at_origin() {
        let t = Target::perturbed(Spectrum::from_eigenvalues(vec![2.0, 3.0]).unwrap(), 0.7).unwrap();
        assert_eq!(t.gradient(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(quad(&[5.0]).gradient(&[0.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn perturbed_gradient_matches_central_difference() {
        let t = Target::perturbed(Spectrum::from_eigenvalues(vec![2.0]).unwrap(), 0.5).unwrap();
        let x = 0.3f64;
        let h = 1e-5;
        let fd = (t.potential(&[x + h]).unwrap() - t.potential(&[x - h]).unwrap()) / (2.0 * h);
        let g = t.gradient(&[x]).unwrap()[0];
        assert!((g - fd).abs() < 1e-6, "grad {g} fd {fd}");
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let t = quad(&[1.0, 2.0]);
        assert_eq!(
            t.gradient(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
        assert!(PhaseState::new(vec![1.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn energy_examples() {
        let t = quad(&[1.0]);
        let e1 = t.energy(&PhaseState::new(vec![2.0], vec![0.0]).unwrap()).unwrap();
        let e2 = t.energy(&PhaseState::new(vec![0.0], vec![2.0]).unwrap()).unwrap();
        assert_eq!((e1, e2), (2.0, 2.0));
        let t = quad(&[1.0, 4.0]);
        let e = t.energy(&PhaseState::new(vec![1.0, 1.0], vec![1.0, 1.0]).unwrap()).unwrap();
        assert!((e - 3.5).abs() < 1e-15);
    }

    #[test]
    fn log_cosh_is_stable_for_large_arguments() {
        assert!((log_cosh(800.0f64) - (800.0 - 2f64.ln())).abs() < 1e-12);
        assert!((log_cosh(0.3f64) - 0.3f64.cosh().ln()).abs() < 1e-15);
    }

    #[test]
    fn spectrum_validation() {
        assert!(Spectrum::new(vec![0.5], 1.0, 2.0).is_err());
        assert!(Spectrum::new(vec![1.0], 0.0, 2.0).is_err());
        assert!(Spectrum::new(vec![1.0], 2.0, 1.0).is_err());
        let s = Spectrum::spaced(5, 1.0, 16.0, Spacing::Log).unwrap();
        assert!((s.sigma()[2] - 4.0f64).abs() < 1e-12);
        assert_eq!(s.kappa(), 16.0);
    }

    proptest! {
        #[test]
        fn quadratic_gradient_is_linear(
            x in prop::collection::vec(-10.0f64..10.0, 3),
            y in prop::collection::vec(-10.0f64..10.0, 3),
            a in -3.0f64..3.0, b in -3.0f64..3.0,
        ) {
            let t = quad(&[0.5, 2.0, 9.0]);
            let z: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
            let gz = t.gradient(&z).unwrap();
            let gx = t.gradient(&x).unwrap();
            let gy = t.gradient(&y).unwrap();
            for i in 0..3 {
                let lin = a * gx[i] + b * gy[i];
                prop_assert!((gz[i] - lin).abs() <= 1e-12 * (1.0 + lin.abs()));
            }
        }

        #[test]
        fn perturbed_curvature_within_bounds(x in prop::collection::vec(-50.0f64..50.0, 4), eps in 0.0f64..2.0) {
            let spec = Spectrum::new(vec![1.0, 3.0, 7.0, 10.0], 1.0, 10.0).unwrap();
            let t = Target::perturbed(spec, eps).unwrap();
            let (mu, l) = t.curvature_bounds();
            for h in t.hessian_diag(&x).unwrap() {
                prop_assert!(h >= mu && h <= l + 1e-12);
            }
        }
    }
}
