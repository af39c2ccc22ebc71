//! Numerical integrators for `ẋ = v, v̇ = −∇f(x)`.
//!
//! Verlet kinds are deterministic. The stratified Monte Carlo (sMC) family
//! evaluates the force at a random point `x₀ + τv₀` with `τ ~ Unif(0, h)`;
//! callers either pass `τ` explicitly or let [`IntegratorSpec::step`] draw it
//! from their own stream.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::model::{PhaseState, Potential};
use crate::rng::uniform;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegratorKind {
    VelocityVerlet,
    PositionVerlet,
    Smc,
    NestedSmc,
    SymSmc,
}

impl IntegratorKind {
    pub const ALL: [IntegratorKind; 5] = [
        IntegratorKind::VelocityVerlet,
        IntegratorKind::PositionVerlet,
        IntegratorKind::Smc,
        IntegratorKind::NestedSmc,
        IntegratorKind::SymSmc,
    ];

    pub fn is_randomized(self) -> bool {
        matches!(self, Self::Smc | Self::NestedSmc | Self::SymSmc)
    }

    pub fn is_verlet(self) -> bool {
        !self.is_randomized()
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::VelocityVerlet => "velocity-verlet",
            Self::PositionVerlet => "position-verlet",
            Self::Smc => "smc",
            Self::NestedSmc => "nested-smc",
            Self::SymSmc => "sym-smc",
        }
    }
}

impl fmt::Display for IntegratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IntegratorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown integrator '{s}'"))
    }
}

/// Scratch buffers reused across steps.
#[derive(Debug, Clone, Default)]
pub struct Workspace<T> {
    g: Vec<T>,
    y: Vec<T>,
    y2: Vec<T>,
}

impl<T: Scalar> Workspace<T> {
    pub fn new(d: usize) -> Self {
        Self {
            g: vec![T::zero(); d],
            y: vec![T::zero(); d],
            y2: vec![T::zero(); d],
        }
    }

    fn fit(&mut self, d: usize) {
        if self.g.len() != d {
            *self = Self::new(d);
        }
    }
}

fn check_tau<T: Scalar>(tau: T, h: T) -> Result<()> {
    ensure(tau >= T::zero() && tau <= h, "tau", tau, "must lie in [0, h]")
}

fn axpy<T: Scalar>(out: &mut [T], a: T, x: &[T]) {
    for (o, &xi) in out.iter_mut().zip(x) {
        *o = *o + a * xi;
    }
}

/// Kick-drift-kick.
pub fn velocity_verlet_in_place<T: Scalar, P: Potential<T> + ?Sized>(
    p: &P,
    s: &mut PhaseState<T>,
    h: T,
    ws: &mut Workspace<T>,
) {
    ws.fit(s.dim());
    let half = h * T::lit(0.5);
    p.gradient_into(&s.x, &mut ws.g);
    axpy(&mut s.v, -half, &ws.g);
    axpy(&mut s.x, h, &s.v);
    p.gradient_into(&s.x, &mut ws.g);
    axpy(&mut s.v, -half, &ws.g);
}

/// Drift-kick-drift (leapfrog in position form).
pub fn position_verlet_in_place<T: Scalar, P: Potential<T> + ?Sized>(
    p: &P,
    s: &mut PhaseState<T>,
    h: T,
    ws: &mut Workspace<T>,
) {
    ws.fit(s.dim());
    let half = h * T::lit(0.5);
    axpy(&mut s.x, half, &s.v);
    p.gradient_into(&s.x, &mut ws.g);
    axpy(&mut s.v, -h, &ws.g);
    axpy(&mut s.x, half, &s.v);
}

/// sMC: force evaluated once at `x₀ + τv₀`.
pub fn smc_in_place<T: Scalar, P: Potential<T> + ?Sized>(
    p: &P,
    s: &mut PhaseState<T>,
    h: T,
    tau: T,
    ws: &mut Workspace<T>,
) {
    ws.fit(s.dim());
    for ((y, &x), &v) in ws.y.iter_mut().zip(&s.x).zip(&s.v) {
        *y = x + tau * v;
    }
    p.gradient_into(&ws.y, &mut ws.g);
    axpy(&mut s.x, h, &s.v);
    axpy(&mut s.x, -h * h * T::lit(0.5), &ws.g);
    axpy(&mut s.v, -h, &ws.g);
}

/// Nested sMC: two Picard sweeps for the midpoint before the update.
///
/// Written with `∇f` in place of the quadratic force `λ²x` at each
/// evaluation point.
pub fn nested_smc_in_place<T: Scalar, P: Potential<T> + ?Sized>(
    p: &P,
    s: &mut PhaseState<T>,
    h: T,
    tau: T,
    ws: &mut Workspace<T>,
) {
    ws.fit(s.dim());
    let c = -tau * tau * T::lit(0.5);
    p.gradient_into(&s.x, &mut ws.g);
    for i in 0..s.dim() {
        ws.y[i] = s.x[i] + tau * s.v[i] + c * ws.g[i];
    }
    p.gradient_into(&ws.y, &mut ws.g);
    for i in 0..s.dim() {
        ws.y2[i] = s.x[i] + tau * s.v[i] + c * ws.g[i];
    }
    p.gradient_into(&ws.y2, &mut ws.g);
    axpy(&mut s.x, h, &s.v);
    axpy(&mut s.x, -h * (h - tau), &ws.g);
    axpy(&mut s.v, -h, &ws.g);
}

/// Symmetrized sMC; `τ = 0` is velocity Verlet.
///
/// The second half-kick is evaluated at `x₁ − τv_{1/2}`, which reproduces
/// the quadratic propagator `v₁ = (1 + hλ²τ/2)v_{1/2} − (h/2)λ²x₁`.
pub fn sym_smc_in_place<T: Scalar, P: Potential<T> + ?Sized>(
    p: &P,
    s: &mut PhaseState<T>,
    h: T,
    tau: T,
    ws: &mut Workspace<T>,
) {
    ws.fit(s.dim());
    let half = h * T::lit(0.5);
    for i in 0..s.dim() {
        ws.y[i] = s.x[i] + tau * s.v[i];
    }
    p.gradient_into(&ws.y, &mut ws.g);
    axpy(&mut s.v, -half, &ws.g);
    axpy(&mut s.x, h, &s.v);
    for i in 0..s.dim() {
        ws.y[i] = s.x[i] - tau * s.v[i];
    }
    p.gradient_into(&ws.y, &mut ws.g);
    axpy(&mut s.v, -half, &ws.g);
}

pub fn velocity_verlet_step<T: Scalar, P: Potential<T> + ?Sized>(
    p: &P,
    state: &PhaseState<T>,
    h: T,
) -> PhaseState<T> {
    let mut s = state.clone();
    velocity_verlet_in_place(p, &mut s, h, &mut Workspace::new(state.dim()));
    s
}

pub fn position_verlet_step<T: Scalar, P: Potential<T> + ?Sized>(
    p: &P,
    state: &PhaseState<T>,
    h: T,
) -> PhaseState<T> {
    let mut s = state.clone();
    position_verlet_in_place(p, &mut s, h, &mut Workspace::new(state.dim()));
    s
}

pub fn smc_step<T: Scalar, P: Potential<T> + ?Sized>(
    p: &P,
    state: &PhaseState<T>,
    h: T,
    tau: T,
) -> Result<PhaseState<T>> {
    check_tau(tau, h)?;
    let mut s = state.clone();
    smc_in_place(p, &mut s, h, tau, &mut Workspace::new(state.dim()));
    Ok(s)
}

pub fn nested_smc_step<T: Scalar, P: Potential<T> + ?Sized>(
    p: &P,
    state: &PhaseState<T>,
    h: T,
    tau: T,
) -> Result<PhaseState<T>> {
    check_tau(tau, h)?;
    let mut s = state.clone();
    nested_smc_in_place(p, &mut s, h, tau, &mut Workspace::new(state.dim()));
    Ok(s)
}

pub fn sym_smc_step<T: Scalar, P: Potential<T> + ?Sized>(
    p: &P,
    state: &PhaseState<T>,
    h: T,
    tau: T,
) -> Result<PhaseState<T>> {
    check_tau(tau, h)?;
    let mut s = state.clone();
    sym_smc_in_place(p, &mut s, h, tau, &mut Workspace::new(state.dim()));
    Ok(s)
}

/// Curvature `σ(1 − h²σ/4)` whose exact flow velocity Verlet reproduces.
pub fn modified_spectrum<T: Scalar>(sigma: T, h: T) -> Result<T> {
    ensure(sigma > T::zero(), "sigma", sigma, "must be positive")?;
    ensure(h >= T::zero(), "h", h, "must be nonnegative")?;
    let h2s = h * h * sigma;
    if h2s >= T::lit(4.0) {
        return Err(Error::Unstable {
            h2_sigma: h2s.as_f64(),
        });
    }
    Ok(sigma * (T::one() - h2s / T::lit(4.0)))
}

/// Leapfrog stepsize `√eps / (L d)^{1/4}` for an asymptotic bias target `eps`.
pub fn leapfrog_stepsize<T: Scalar>(l: T, d: usize, eps: T) -> Result<T> {
    ensure(l > T::zero(), "L", l, "must be positive")?;
    if d == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    let dd = T::from_usize_lossy(d);
    ensure(
        eps > T::zero() && eps < (dd / l).sqrt(),
        "eps",
        eps,
        "bias target must lie in (0, sqrt(d/L))",
    )?;
    Ok(eps.sqrt() / (l * dd).sqrt().sqrt())
}

/// Integrator kind, stepsize and default step count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorSpec<T> {
    pub kind: IntegratorKind,
    pub h: T,
    pub steps: usize,
}

impl<T: Scalar> IntegratorSpec<T> {
    /// Validates `h > 0`, `steps ≥ 1` and, for Verlet kinds, `h√L < 2`.
    pub fn new(kind: IntegratorKind, h: T, steps: usize, l_bound: T) -> Result<Self> {
        ensure(h > T::zero(), "h", h, "must be positive")?;
        if steps == 0 {
            return Err(Error::invalid("steps", 0.0, "must be at least 1"));
        }
        if kind.is_verlet() && h * l_bound.sqrt() >= T::lit(2.0) {
            return Err(Error::Unstable {
                h2_sigma: (h * h * l_bound).as_f64(),
            });
        }
        Ok(Self { kind, h, steps })
    }

    /// One step with an explicit midpoint `τ` (ignored by Verlet kinds).
    pub fn step_with_tau<P: Potential<T> + ?Sized>(
        &self,
        p: &P,
        s: &mut PhaseState<T>,
        tau: T,
        ws: &mut Workspace<T>,
    ) -> Result<()> {
        let h = self.h;
        match self.kind {
            IntegratorKind::VelocityVerlet => velocity_verlet_in_place(p, s, h, ws),
            IntegratorKind::PositionVerlet => position_verlet_in_place(p, s, h, ws),
            k => {
                check_tau(tau, h)?;
                match k {
                    IntegratorKind::Smc => smc_in_place(p, s, h, tau, ws),
                    IntegratorKind::NestedSmc => nested_smc_in_place(p, s, h, tau, ws),
                    _ => sym_smc_in_place(p, s, h, tau, ws),
                }
            }
        }
        Ok(())
    }

    /// One step, drawing `τ ~ Unif(0, h)` from `rng` for randomized kinds.
    pub fn step<P: Potential<T> + ?Sized, R: Rng + ?Sized>(
        &self,
        p: &P,
        s: &mut PhaseState<T>,
        rng: &mut R,
        ws: &mut Workspace<T>,
    ) {
        let tau = if self.kind.is_randomized() {
            uniform(rng, self.h)
        } else {
            T::zero()
        };
        self.step_with_tau(p, s, tau, ws)
            .expect("tau drawn inside [0, h]");
    }

    /// Number of steps used to cover a duration: `max(1, round(t/h))`.
    pub fn steps_for(&self, t: T) -> usize {
        (t / self.h).round().to_usize().unwrap_or(0).max(1)
    }

    /// Integrates `self.steps` steps.
    pub fn run<P: Potential<T> + ?Sized, R: Rng + ?Sized>(
        &self,
        p: &P,
        state: &PhaseState<T>,
        rng: &mut R,
    ) -> PhaseState<T> {
        let mut s = state.clone();
        let mut ws = Workspace::new(s.dim());
        for _ in 0..self.steps {
            self.step(p, &mut s, rng, &mut ws);
        }
        s
    }
}

/// One-dimensional propagator `M(τ)` of each kind on `f(x) = ½σx²`.
///
/// Closed forms of the step functions above; diagnostics use them for
/// quadrature over `τ` without simulating.
pub fn quadratic_propagator<T: Scalar>(kind: IntegratorKind, sigma: T, h: T, tau: T) -> [[T; 2]; 2] {
    let one = T::one();
    let half = T::lit(0.5);
    let s = sigma;
    match kind {
        IntegratorKind::VelocityVerlet => [
            [one - half * h * h * s, h],
            [-h * s * (one - h * h * s / T::lit(4.0)), one - half * h * h * s],
        ],
        IntegratorKind::PositionVerlet => [
            [one - half * h * h * s, h * (one - h * h * s / T::lit(4.0))],
            [-h * s, one - half * h * h * s],
        ],
        IntegratorKind::Smc => [
            [one - half * h * h * s, h - half * h * h * s * tau],
            [-h * s, one - h * s * tau],
        ],
        IntegratorKind::NestedSmc => {
            let c = half * tau * tau * s;
            // x_{τ,1} = (1 − c)x + τv ; x_{τ,2} = (1 − c(1 − c))x + (τ − cτ)v
            let a2x = one - c * (one - c);
            let a2v = tau - c * tau;
            [
                [one - h * (h - tau) * s * a2x, h - h * (h - tau) * s * a2v],
                [-h * s * a2x, one - h * s * a2v],
            ]
        }
        IntegratorKind::SymSmc => {
            let vx = -half * h * s;
            let vv = one - half * h * s * tau;
            let xx = one + h * vx;
            let xv = h * vv;
            let k = one + half * h * s * tau;
            [
                [xx, xv],
                [k * vx - half * h * s * xx, k * vv - half * h * s * xv],
            ]
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// `Var(x₁)` after one step from the stationary law `x₀ ~ N(0, 1/σ)`,
/// `v₀ ~ N(0, 1)` of `f = ½σx²`, averaged over `τ ~ Unif(0, h)`.
///
/// The propagator entries are polynomials in `τ` of degree at most 5, so
/// 8-point Gauss–Legendre quadrature is exact.
pub fn expected_stationary_variance<T: Scalar>(kind: IntegratorKind, sigma: T, h: T) -> T {
    let var = |tau: T| {
        let m = quadratic_propagator(kind, sigma, h, tau);
        m[0][0] * m[0][0] / sigma + m[0][1] * m[0][1]
    };
    if !kind.is_randomized() {
        return var(T::zero());
    }
    let half = h * T::lit(0.5);
    gauss_legendre(8)
        .into_iter()
        .map(|(x, w)| T::lit(w * 0.5) * var(half + half * T::lit(x)))
        .sum()
}

/// One-step stationary W2 bias `|√Var(x₁) − 1/√σ|` of the position marginal.
pub fn stationary_bias<T: Scalar>(kind: IntegratorKind, sigma: T, h: T) -> T {
    (expected_stationary_variance(kind, sigma, h).sqrt() - sigma.sqrt().recip()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::rotate;
    use crate::model::{weighted_quadratic, Spectrum, Target};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    struct ZeroForce(usize);

    impl Potential<f64> for ZeroForce {
        fn dim(&self) -> usize {
            self.0
        }
        fn value(&self, _: &[f64]) -> f64 {
            0.0
        }
        fn gradient_into(&self, _: &[f64], out: &mut [f64]) {
            out.fill(0.0);
        }
    }

    fn osc(sigma: f64) -> Target<f64> {
        Target::quadratic(Spectrum::from_eigenvalues(vec![sigma]).unwrap())
    }

    fn st(x: f64, v: f64) -> PhaseState<f64> {
        PhaseState::new(vec![x], vec![v]).unwrap()
    }

    #[test]
    fn free_flight() {
        let s0 = PhaseState::new(vec![1.0, -2.0], vec![0.5, 3.0]).unwrap();
        let h = 0.25;
        let want = PhaseState::new(vec![1.125, -1.25], vec![0.5, 3.0]).unwrap();
        assert_eq!(position_verlet_step(&ZeroForce(2), &s0, h), want);
        assert_eq!(velocity_verlet_step(&ZeroForce(2), &s0, h), want);
    }

    #[test]
    fn velocity_verlet_unit_example() {
        let s = velocity_verlet_step(&osc(1.0), &st(1.0, 0.0), 1.0);
        assert_eq!((s.x[0], s.v[0]), (0.5, -0.75));
    }

    #[test]
    fn step_functions_match_closed_form_propagators() {
        let (sigma, h) = (2.3, 0.17);
        let t = osc(sigma);
        let y0 = st(0.7, -1.1);
        for kind in IntegratorKind::ALL {
            let tau = if kind.is_randomized() { 0.4 * h } else { 0.0 };
            let spec = IntegratorSpec::new(kind, h, 1, sigma).unwrap();
            let mut s = y0.clone();
            spec.step_with_tau(&t, &mut s, tau, &mut Workspace::new(1)).unwrap();
            let m = quadratic_propagator(kind, sigma, h, tau);
            let x = m[0][0] * 0.7 + m[0][1] * -1.1;
            let v = m[1][0] * 0.7 + m[1][1] * -1.1;
            assert!((s.x[0] - x).abs() < 1e-14, "{kind} x");
            assert!((s.v[0] - v).abs() < 1e-14, "{kind} v");
        }
    }

    #[test]
    fn smc_propagator_matches_displayed_matrix() {
        let (lam2, h, tau) = (1.7f64, 0.2, 0.05);
        let m = quadratic_propagator(IntegratorKind::Smc, lam2, h, tau);
        let want = [
            [1.0 - h * h * lam2 / 2.0, h - h * h * lam2 * tau / 2.0],
            [-h * lam2, 1.0 - h * lam2 * tau],
        ];
        assert_eq!(m, want);
    }

    #[test]
    fn smc_with_zero_tau_is_euler_like() {
        let t = osc(3.0);
        let s = smc_step(&t, &st(1.0, 2.0), 0.1, 0.0).unwrap();
        assert!((s.x[0] - (1.0 + 0.2 - 0.005 * 3.0)).abs() < 1e-15);
        assert!((s.v[0] - (2.0 - 0.3)).abs() < 1e-15);
    }

    #[test]
    fn nested_with_zero_tau() {
        let t = osc(3.0);
        let s = nested_smc_step(&t, &st(1.0, 2.0), 0.1, 0.0).unwrap();
        assert!((s.x[0] - (1.0 + 0.2 - 0.01 * 3.0)).abs() < 1e-15);
        assert!((s.v[0] - (2.0 - 0.3)).abs() < 1e-15);
    }

    #[test]
    fn nested_hand_evaluation() {
        // σ = 1, h = 0.1, τ = 0.05 starting from (1, 0.5)
        let (h, tau) = (0.1f64, 0.05f64);
        let (x0, v0) = (1.0f64, 0.5f64);
        let x1t = x0 + tau * v0 - tau * tau / 2.0 * x0;
        let x2t = x0 + tau * v0 - tau * tau / 2.0 * x1t;
        let x1 = x0 + h * v0 - h * (h - tau) * x2t;
        let v1 = v0 - h * x2t;
        let s = nested_smc_step(&osc(1.0), &st(x0, v0), h, tau).unwrap();
        assert!((s.x[0] - x1).abs() < 1e-15 && (s.v[0] - v1).abs() < 1e-15);
        // frozen values from the same composition evaluated by hand
        assert!((x1 - 1.044_881_398_437_5).abs() < 1e-12);
        assert!((v1 - 0.397_627_968_75).abs() < 1e-12, "{v1}");
    }

    #[test]
    fn sym_smc_with_zero_tau_is_velocity_verlet() {
        let t = Target::perturbed(Spectrum::from_eigenvalues(vec![1.0, 5.0]).unwrap(), 0.3).unwrap();
        let y = PhaseState::new(vec![0.4, -0.9], vec![1.2, 0.3]).unwrap();
        let a = sym_smc_step(&t, &y, 0.07, 0.0).unwrap();
        let b = velocity_verlet_step(&t, &y, 0.07);
        assert_eq!(a, b);
    }

    #[test]
    fn sym_smc_matches_displayed_algebra() {
        let (lam2, h, tau) = (1.0f64, 0.3, 0.1);
        let (x0, v0) = (0.8, -0.6);
        let vh = v0 - h / 2.0 * lam2 * (x0 + tau * v0);
        let x1 = (1.0 - h * h / 2.0 * lam2) * x0 + (h - h * h * lam2 / 2.0 * tau) * v0;
        let v1 = (1.0 + h / 2.0 * lam2 * tau) * vh - h / 2.0 * lam2 * x1;
        let s = sym_smc_step(&osc(lam2), &st(x0, v0), h, tau).unwrap();
        assert!((s.x[0] - x1).abs() < 1e-15 && (s.v[0] - v1).abs() < 1e-15);
    }

    #[test]
    fn tau_outside_step_rejected() {
        let t = osc(1.0);
        assert!(smc_step(&t, &st(1.0, 0.0), 0.1, 0.2).is_err());
        assert!(nested_smc_step(&t, &st(1.0, 0.0), 0.1, -0.01).is_err());
        assert!(sym_smc_step(&t, &st(1.0, 0.0), 0.1, 0.11).is_err());
    }

    #[test]
    fn modified_spectrum_values() {
        assert_eq!(modified_spectrum(3.0, 0.0).unwrap(), 3.0);
        assert_eq!(modified_spectrum(1.0, 1.0).unwrap(), 0.75);
        let near = modified_spectrum(1.0, 2.0 - 1e-9).unwrap();
        assert!(near > 0.0 && near < 1e-8);
        assert!(matches!(modified_spectrum(1.0, 2.0), Err(Error::Unstable { .. })));
    }

    #[test]
    fn leapfrog_stepsize_values() {
        assert!((leapfrog_stepsize(1.0, 1, 0.01).unwrap() - 0.1f64).abs() < 1e-15);
        assert!((leapfrog_stepsize(16.0, 16, 0.01).unwrap() - 0.025f64).abs() < 1e-15);
        assert!(leapfrog_stepsize(1.0f64, 1, 1.0).is_err());
        assert!(leapfrog_stepsize(4.0f64, 1, 0.6).is_err());
    }

    #[test]
    fn stability_guard_for_verlet_kinds() {
        assert!(IntegratorSpec::new(IntegratorKind::VelocityVerlet, 0.2, 1, 100.0).is_err());
        assert!(IntegratorSpec::new(IntegratorKind::PositionVerlet, 0.19, 1, 100.0).is_ok());
        assert!(IntegratorSpec::new(IntegratorKind::Smc, 0.2, 1, 100.0).is_ok());
        assert!(IntegratorSpec::new(IntegratorKind::Smc, 0.0, 1, 100.0).is_err());
    }

    #[test]
    fn velocity_verlet_is_exact_flow_of_modified_spectrum() {
        // VV equals a rotation with curvature σ̃ over time θ/√σ̃, cos θ = 1 − h²σ/2.
        let (sigma, h) = (1.0f64, 0.1);
        let st_ = modified_spectrum(sigma, h).unwrap();
        let theta = (1.0 - h * h * sigma / 2.0).acos();
        let s = velocity_verlet_step(&osc(sigma), &st(1.0, 0.0), h);
        let (x, v) = rotate(st_, 1.0, 0.0, theta / st_.sqrt());
        assert!((s.x[0] - x).abs() < 1e-14 && (s.v[0] - v).abs() < 1e-14);
    }

    #[test]
    fn position_verlet_is_shifted_modified_flow() {
        // PV = P·VV·P⁻¹ with P = half drift after half kick.
        let (sigma, h) = (1.0f64, 0.1);
        let t = osc(sigma);
        let half = h / 2.0;
        let p_inv = |x: f64, v: f64| {
            let x = x - half * v;
            (x, v + half * sigma * x)
        };
        let (x0, v0) = (1.0, 0.0);
        let pv = position_verlet_step(&t, &st(x0, v0), h);
        let (ax, av) = p_inv(pv.x[0], pv.v[0]);
        let (bx, bv) = p_inv(x0, v0);
        let st_ = modified_spectrum(sigma, h).unwrap();
        let theta = (1.0 - h * h * sigma / 2.0).acos();
        let (fx, fv) = rotate(st_, bx, bv, theta / st_.sqrt());
        assert!((ax - fx).abs() < 1e-14 && (av - fv).abs() < 1e-14);
    }

    #[test]
    fn shadow_energy_conserved_over_1000_steps() {
        let (sigma, h) = (1.0f64, 0.1);
        let t = osc(sigma);
        let w = [modified_spectrum(sigma, h).unwrap()];
        let mut s = st(1.0, 0.0);
        let e0 = weighted_quadratic(&w, &s.x) + 0.5 * s.v[0] * s.v[0];
        let mut ws = Workspace::new(1);
        for _ in 0..1000 {
            velocity_verlet_in_place(&t, &mut s, h, &mut ws);
            let e = weighted_quadratic(&w, &s.x) + 0.5 * s.v[0] * s.v[0];
            assert!(((e - e0) / e0).abs() < 1e-10);
        }
        // cross-term cancellation (1 − h²σ/2)² + h²σ̃ = 1
        assert!(((1.0 - h * h * sigma / 2.0).powi(2) + h * h * w[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn energy_gap_is_exact() {
        let t = Target::quadratic(Spectrum::from_eigenvalues(vec![1.0, 9.0]).unwrap());
        let h = 0.05;
        let sig = t.spectrum().sigma();
        let tilde: Vec<f64> = sig.iter().map(|&s| modified_spectrum(s, h).unwrap()).collect();
        let y = PhaseState::new(vec![0.3, -1.4], vec![2.0, 0.1]).unwrap();
        let gap = t.energy(&y).unwrap() - (weighted_quadratic(&tilde, &y.x) + 0.5 * (4.0 + 0.01));
        let want: f64 = sig.iter().zip(&y.x).map(|(s, x)| h * h / 8.0 * s * s * x * x).sum();
        assert!((gap - want).abs() < 1e-14);
    }

    #[test]
    fn verlet_kinds_are_reversible() {
        let t = Target::perturbed(Spectrum::from_eigenvalues(vec![0.5, 4.0]).unwrap(), 0.4).unwrap();
        let y = PhaseState::new(vec![1.3, -0.2], vec![0.4, 2.2]).unwrap();
        for step in [velocity_verlet_step::<f64, Target<f64>>, position_verlet_step] {
            let mut a = step(&t, &y, 0.08);
            a.v.iter_mut().for_each(|v| *v = -*v);
            let mut b = step(&t, &a, 0.08);
            b.v.iter_mut().for_each(|v| *v = -*v);
            assert!(b.distance(&y) < 1e-12);
        }
    }

    #[test]
    fn verlet_trajectory_second_difference() {
        let t = Target::perturbed(Spectrum::from_eigenvalues(vec![1.0f64, 3.0]).unwrap(), 0.5).unwrap();
        let h = 0.05;
        let mut s = PhaseState::new(vec![1.0, -0.5], vec![0.3, 0.8]).unwrap();
        let mut xs = vec![s.x.clone()];
        let mut ws = Workspace::new(2);
        for _ in 0..50 {
            velocity_verlet_in_place(&t, &mut s, h, &mut ws);
            xs.push(s.x.clone());
        }
        for n in 1..xs.len() - 1 {
            let g = t.gradient(&xs[n]).unwrap();
            for i in 0..2 {
                let lhs = xs[n + 1][i] - 2.0 * xs[n][i] + xs[n - 1][i];
                assert!((lhs + h * h * g[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn smc_three_term_recursion() {
        // x_{n+1} − 2x_n + x_{n−1} = −h²/2 (∇f(m_{n−1}) + ∇f(m_n)) with m_n the sMC query point.
        let t = Target::perturbed(Spectrum::from_eigenvalues(vec![2.0]).unwrap(), 0.8).unwrap();
        let h = 0.1;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut s = st(1.2, -0.4);
        let mut xs = vec![s.x[0]];
        let mut grads = vec![];
        for _ in 0..30 {
            let tau: f64 = uniform(&mut rng, h);
            let m = s.x[0] + tau * s.v[0];
            grads.push(t.gradient(&[m]).unwrap()[0]);
            s = smc_step(&t, &s, h, tau).unwrap();
            xs.push(s.x[0]);
        }
        for n in 1..xs.len() - 1 {
            let lhs = xs[n + 1] - 2.0 * xs[n] + xs[n - 1];
            let rhs = -h * h / 2.0 * (grads[n - 1] + grads[n]);
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }

    #[test]
    fn velocity_verlet_local_error_is_third_order() {
        let t = osc(1.0);
        let hs = [0.2f64, 0.1, 0.05, 0.025, 0.0125];
        let errs: Vec<f64> = hs
            .iter()
            .map(|&h| {
                let s = velocity_verlet_step(&t, &st(1.0, 1.0), h);
                let (x, v) = rotate(1.0, 1.0, 1.0, h);
                ((s.x[0] - x).powi(2) + (s.v[0] - v).powi(2)).sqrt()
            })
            .collect();
        let slope = crate::diagnose::loglog_slope(&hs, &errs);
        assert!((slope - 3.0).abs() < 0.2, "slope {slope}");
    }

    #[test]
    fn steps_for_duration() {
        let spec = IntegratorSpec::new(IntegratorKind::PositionVerlet, 0.1, 1, 1.0).unwrap();
        assert_eq!(spec.steps_for(0.0), 1);
        assert_eq!(spec.steps_for(0.74), 7);
        assert_eq!(spec.steps_for(0.76), 8);
    }
    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let q = gauss_legendre(8);
        let w: f64 = q.iter().map(|p| p.1).sum();
        assert!((w - 2.0).abs() < 1e-14);
        let m14: f64 = q.iter().map(|p| p.1 * p.0.powi(14)).sum();
        assert!((m14 - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn smc_expected_variance_matches_closed_integral() {
        // (1/h)∫₀ʰ[(1−h²/2)² + (h−h²τ/2)²]dτ for σ = 1
        for h in [0.01f64, 0.1, 0.5] {
            let a = (1.0 - h * h / 2.0).powi(2);
            let b = h * h - h.powi(4) / 2.0 + h.powi(6) / 12.0;
            let got = expected_stationary_variance(IntegratorKind::Smc, 1.0, h);
            assert!((got - (a + b)).abs() < 1e-15, "{h}");
        }
    }

    #[test]
    fn verlet_variances_closed_form() {
        let h = 0.2f64;
        let vv = expected_stationary_variance(IntegratorKind::VelocityVerlet, 1.0, h);
        assert!((vv - (1.0 + h.powi(4) / 4.0)).abs() < 1e-15);
        let pv = expected_stationary_variance(IntegratorKind::PositionVerlet, 1.0, h);
        assert!((pv - (1.0 - h.powi(4) / 4.0 + h.powi(6) / 16.0)).abs() < 1e-15);
    }
}
