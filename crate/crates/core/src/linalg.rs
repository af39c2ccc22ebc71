//! Fixed-size 2×2 matrices for the per-coordinate transition blocks.

use serde::Serialize;

use crate::Scalar;

/// Row-major 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mat2<T> {
    pub m: [[T; 2]; 2],
}

impl<T: Scalar> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn diag(a: T, d: T) -> Self {
        Self::new(a, T::zero(), T::zero(), d)
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn det(&self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> T {
        self.m[0][0] + self.m[1][1]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }

    pub fn apply(&self, y: [T; 2]) -> [T; 2] {
        [
            self.m[0][0] * y[0] + self.m[0][1] * y[1],
            self.m[1][0] * y[0] + self.m[1][1] * y[1],
        ]
    }

    /// `AᵀA`.
    pub fn gram(&self) -> Self {
        self.transpose().mul(self)
    }

    /// Eigenvalues `(larger, smaller)` of a symmetric matrix.
    ///
    /// The smaller one is recovered from the determinant to avoid cancellation.
    pub fn sym_eigenvalues(&self) -> (T, T) {
        let two = T::lit(2.0);
        let half_tr = self.trace() / two;
        let half_diff = (self.m[0][0] - self.m[1][1]) / two;
        let off = self.m[0][1];
        let rad = (half_diff * half_diff + off * off).sqrt();
        let hi = half_tr + rad;
        let lo = if hi > T::zero() { self.det() / hi } else { half_tr - rad };
        (hi, lo)
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> T {
        self.gram().sym_eigenvalues().0.max(T::zero()).sqrt()
    }

    /// Largest eigenvalue modulus (spectral radius) of a general 2×2 matrix.
    pub fn spectral_radius(&self) -> T {
        let two = T::lit(2.0);
        let half_tr = self.trace() / two;
        let disc = half_tr * half_tr - self.det();
        if disc < T::zero() {
            // complex pair, |λ|² = det
            self.det().abs().sqrt()
        } else {
            half_tr.abs() + disc.sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_eigenvalues_match_trace_and_det() {
        let s = Mat2::new(4.0, 1.0, 1.0, 3.0);
        let (hi, lo) = s.sym_eigenvalues();
        assert!((hi + lo - 7.0f64).abs() < 1e-14);
        assert!((hi * lo - 11.0f64).abs() < 1e-13);
    }

    #[test]
    fn rotation_has_unit_radius_and_norm() {
        let t: f64 = 0.3;
        let r = Mat2::new(t.cos(), t.sin(), -t.sin(), t.cos());
        assert!((r.spectral_radius() - 1.0).abs() < 1e-14);
        assert!((r.op_norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nonnormal_radius_below_norm() {
        let a = Mat2::new(0.5, 10.0, 0.0, 0.5);
        assert!((a.spectral_radius() - 0.5f64).abs() < 1e-14);
        assert!(a.op_norm() > 10.0);
    }
}
