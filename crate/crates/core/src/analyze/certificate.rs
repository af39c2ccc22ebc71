//! Lyapunov certificates for the coupled jump process.
//!
//! Under synchronous coupling the difference `(x̃, ṽ)` of two randomized-HMC
//! processes satisfies `dx̃ = ṽ dt`, `dṽ = −Hx̃ dt + (η−1)ṽ dN`. A quadratic
//! form `‖·‖²_A` decays at rate `2r` if `S − 2rA ⪰ 0` for every curvature
//! `σ ∈ [μ, L]`, which per `σ` is a 2×2 condition:
//!
//! ```text
//! P = 2bσ − 2r·a(σ)
//! R = c(1−η²)λ⁻¹(σ) − 2b − 2rc
//! Q = b(1−η)λ⁻¹(σ) − a(σ) + cσ − 2rb
//! [[P, Q], [Q, R]] ⪰ 0,   a(σ)c − b² > 0
//! ```
//!
//! With [`Weighting::Uniform`] `a(σ) = a`. With [`Weighting::Curvature`]
//! the position block is `a·Σ/μ`, i.e. `a(σ) = aσ/μ`; per-coordinate clock
//! rates need this, since a uniform `a` cannot balance `cσ` against `a` at
//! both ends of the spectrum.

use serde::Serialize;

use super::grid;
use crate::error::{ensure, Result};
use crate::Scalar;

/// Refresh rate `λ⁻¹` as a function of curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMap<T> {
    /// One clock for every coordinate.
    Constant(T),
    /// `λ⁻¹(σ) = scale · σ`.
    Proportional(T),
}

impl<T: Scalar> RateMap<T> {
    pub fn at(&self, sigma: T) -> T {
        match *self {
            RateMap::Constant(r) => r,
            RateMap::Proportional(s) => s * sigma,
        }
    }

    /// Weighting the search uses by default for this map.
    pub fn natural_weighting(&self) -> Weighting {
        match self {
            RateMap::Constant(_) => Weighting::Uniform,
            RateMap::Proportional(_) => Weighting::Curvature,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    Uniform,
    Curvature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovCertificate<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub r: T,
    pub eta: T,
    pub rates: RateMap<T>,
    pub weighting: Weighting,
}

impl<T: Scalar> LyapunovCertificate<T> {
    /// `√(ac/(ac − b²))`: converts the A-norm bound to a Euclidean one
    /// (uniform weighting, `v₀ = v₀′`).
    pub fn conversion_factor(&self) -> T {
        let ac = self.a * self.c;
        (ac / (ac - self.b * self.b)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateCheck<T> {
    pub feasible: bool,
    /// Worst normalized slack over the grid (−1 where `A` is not positive
    /// definite); nonnegative iff feasible.
    pub margin: T,
}

/// Points used by [`check_certificate`].
pub const CHECK_GRID: usize = 1001;

/// Smallest eigenvalue of `[[p, q], [q, r]]`.
fn sym_min_eig<T: Scalar>(p: T, q: T, r: T) -> T {
    let half = T::lit(0.5);
    let m = (p + r) * half;
    let d = (p - r) * half;
    m - (d * d + q * q).sqrt()
}

fn slack<T: Scalar>(sigmas: &[T], mu: T, cert: &LyapunovCertificate<T>) -> T {
    let LyapunovCertificate { a, b, c, r, eta, .. } = *cert;
    let two = T::lit(2.0);
    let mut worst = T::infinity();
    for &s in sigmas {
        let ae = match cert.weighting {
            Weighting::Uniform => a,
            Weighting::Curvature => a * s / mu,
        };
        let norm = ae + c;
        let det_a = ae * c - b * b;
        if !(ae > T::zero() && c > T::zero() && det_a > T::zero()) {
            // not a norm at all; keep this clearly below any real slack
            worst = worst.min(-T::one());
            continue;
        }
        let li = cert.rates.at(s);
        let p = two * b * s - two * r * ae;
        let rr = c * (T::one() - eta * eta) * li - two * b - two * r * c;
        let q = b * (T::one() - eta) * li - ae + c * s - two * r * b;
        worst = worst.min(sym_min_eig(p, q, rr) / norm);
    }
    worst
}

/// Checks `S − 2rA ⪰ 0` and `A ≻ 0` on a [`CHECK_GRID`]-point grid of `[μ, L]`.
pub fn check_certificate<T: Scalar>(mu: T, l: T, cert: &LyapunovCertificate<T>) -> CertificateCheck<T> {
    check_certificate_on(&grid(mu, l, CHECK_GRID), mu, cert)
}

/// As [`check_certificate`] on explicit curvatures; `mu` scales the
/// curvature weighting.
pub fn check_certificate_on<T: Scalar>(sigmas: &[T], mu: T, cert: &LyapunovCertificate<T>) -> CertificateCheck<T> {
    let margin = slack(sigmas, mu, cert);
    CertificateCheck {
        feasible: margin >= T::zero(),
        margin,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Curvature grid for the final feasibility test.
    pub grid: usize,
    /// Curvature grid for the coarse `(a, c)` scan.
    pub coarse_grid: usize,
    /// Points per axis of the coarse `(log a, log c)` scan.
    pub scan: usize,
    /// Half-width of the log-scale scan around `a = μ`, `c = 1`.
    pub log_range: f64,
    pub bisection_steps: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            grid: CHECK_GRID,
            coarse_grid: 101,
            scan: 49,
            log_range: 8.0,
            bisection_steps: 48,
        }
    }
}

struct Problem<'a, T> {
    mu: T,
    eta: T,
    rates: RateMap<T>,
    weighting: Weighting,
    fine: &'a [T],
    coarse: &'a [T],
}

impl<T: Scalar> Problem<'_, T> {
    fn cert(&self, r: T, la: f64, lc: f64) -> LyapunovCertificate<T> {
        LyapunovCertificate {
            a: self.mu * T::lit(la.exp()),
            b: self.mu.sqrt(),
            c: T::lit(lc.exp()),
            r,
            eta: self.eta,
            rates: self.rates,
            weighting: self.weighting,
        }
    }

    fn margin(&self, sig: &[T], r: T, p: (f64, f64)) -> T {
        slack(sig, self.mu, &self.cert(r, p.0, p.1))
    }

    /// Best `(log a, log c)` for rate `r`, with its fine-grid margin.
    fn best(&self, r: T, start: Option<(f64, f64)>, opts: &SearchOptions) -> ((f64, f64), T) {
        let p = match start {
            Some(p) if self.margin(self.fine, r, p) >= T::zero() => return (p, T::zero()),
            _ => {
                let axis = grid(-opts.log_range, opts.log_range, opts.scan);
                let mut best = ((0.0, 0.0), T::neg_infinity());
                for &la in &axis {
                    for &lc in &axis {
                        let m = self.margin(self.coarse, r, (la, lc));
                        if m > best.1 {
                            best = ((la, lc), m);
                        }
                    }
                }
                best.0
            }
        };
        let f = |q: (f64, f64)| -self.margin(self.fine, r, q).as_f64();
        let p = nelder_mead(f, p, 2.0 * opts.log_range / (opts.scan.max(2) - 1) as f64);
        (p, self.margin(self.fine, r, p))
    }
}

/// Minimizes `f` over the plane from `x0` with initial simplex size `step`.
fn nelder_mead(f: impl Fn((f64, f64)) -> f64, x0: (f64, f64), step: f64) -> (f64, f64) {
    let add = |a: (f64, f64), b: (f64, f64), t: f64| (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
    let mut s = [x0, (x0.0 + step, x0.1), (x0.0, x0.1 + step)];
    let mut v = s.map(&f);
    for _ in 0..4000 {
        let mut idx = [0, 1, 2];
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        s = idx.map(|i| s[i]);
        v = idx.map(|i| v[i]);
        let size = (s[1].0 - s[0].0).abs().max((s[1].1 - s[0].1).abs())
            .max((s[2].0 - s[0].0).abs())
            .max((s[2].1 - s[0].1).abs());
        if size < 1e-10 {
            break;
        }
        let c = ((s[0].0 + s[1].0) / 2.0, (s[0].1 + s[1].1) / 2.0);
        let xr = add(c, s[2], -1.0);
        let fr = f(xr);
        if fr < v[0] {
            let xe = add(c, s[2], -2.0);
            let fe = f(xe);
            (s[2], v[2]) = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < v[1] {
            (s[2], v[2]) = (xr, fr);
        } else {
            let xc = if fr < v[2] { add(c, xr, 0.5) } else { add(c, s[2], 0.5) };
            let fc = f(xc);
            if fc < v[2].min(fr) {
                (s[2], v[2]) = (xc, fc);
            } else {
                for i in 1..3 {
                    s[i] = add(s[0], s[i], 0.5);
                    v[i] = f(s[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| v[i].total_cmp(&v[j])).unwrap_or(0);
    s[best]
}

/// Largest certified rate for the map's natural weighting.
pub fn search_certificate<T: Scalar>(mu: T, l: T, eta: T, rates: RateMap<T>) -> Result<LyapunovCertificate<T>> {
    search_certificate_with(mu, l, eta, rates, rates.natural_weighting(), &SearchOptions::default())
}

/// Bisection on `r`; for each trial rate, `b = √μ` fixes the scale and
/// `(log a, log c)` are found by a coarse scan polished with pattern search.
/// If nothing is feasible even at `r = 0`, the best `r = 0` candidate is
/// returned (and fails [`check_certificate`]).
pub fn search_certificate_with<T: Scalar>(
    mu: T,
    l: T,
    eta: T,
    rates: RateMap<T>,
    weighting: Weighting,
    opts: &SearchOptions,
) -> Result<LyapunovCertificate<T>> {
    ensure(mu > T::zero(), "mu", mu, "must be positive")?;
    ensure(l >= mu, "L", l, "must be at least mu")?;
    ensure(eta >= T::zero() && eta < T::one(), "eta", eta, "must lie in [0, 1)")?;
    let fine = grid(mu, l, opts.grid);
    let coarse = grid(mu, l, opts.coarse_grid);
    let prob = Problem {
        mu,
        eta,
        rates,
        weighting,
        fine: &fine,
        coarse: &coarse,
    };
    let (p0, m0) = prob.best(T::zero(), None, opts);
    if m0 < T::zero() {
        return Ok(prob.cert(T::zero(), p0.0, p0.1));
    }
    // condition (iii) with b > 0 forces r < (1−η²)λ⁻¹(σ)/2 for every σ
    let r_cap = fine
        .iter()
        .map(|&s| (T::one() - eta * eta) * rates.at(s) * T::lit(0.5))
        .fold(T::infinity(), T::min);
    let (mut lo, mut hi) = (T::zero(), r_cap);
    let mut keep = p0;
    for _ in 0..opts.bisection_steps {
        let mid = (lo + hi) * T::lit(0.5);
        let (p, m) = prob.best(mid, Some(keep), opts);
        if m >= T::zero() {
            lo = mid;
            keep = p;
        } else {
            hi = mid;
        }
    }
    Ok(prob.cert(lo, keep.0, keep.1))
}
