//! Dense complex matrices for gate-level verification work.
//!
//! Matrices are square, row-major, and small: a gate is 2x2, a commutation
//! check needs at most 8x8, and whole-circuit unitaries are only built at
//! desk scale. Qubit 0 of any ordered support is the most significant
//! tensor factor.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Tolerance shared by every matrix predicate (unitarity, shape tests, commutation).
pub const TOLERANCE: f64 = 1e-10;

pub type C64 = Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries. Panics if the length is not a square.
    pub fn from_row_major(entries: Vec<C64>) -> Self {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        assert_eq!(dim * dim, entries.len(), "matrix entries must form a square");
        ComplexMatrix { dim, entries }
    }

    pub fn mat2(a: C64, b: C64, c_: C64, d: C64) -> Self {
        ComplexMatrix {
            dim: 2,
            entries: vec![a, b, c_, d],
        }
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.entries[i * diag.len() + i] = v;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [C64] {
        &mut self.entries
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.entries[k * n..(k + 1) * n];
                let dst = &mut out.entries[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Kronecker product `self ⊗ rhs`; `self` occupies the more significant factor.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (n, m) = (self.dim, rhs.dim);
        let dim = n * m;
        let mut out = Self::zeros(dim);
        for i in 0..n {
            for j in 0..n {
                let a = self.entries[i * n + j];
                for k in 0..m {
                    for l in 0..m {
                        out.entries[(i * m + k) * dim + (j * m + l)] = a * rhs.entries[k * m + l];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        self.dim == rhs.dim && self.max_abs_diff(rhs) < tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.matmul(&self.adjoint())
            .approx_eq(&Self::identity(self.dim), tol)
    }

    /// Multiplies by the phase that makes the first entry of column 0 with
    /// modulus above `1e-6` real and positive.
    pub fn canonical_phase(&self) -> Self {
        let n = self.dim;
        let pivot = (0..n)
            .map(|r| self.entries[r * n])
            .find(|v| v.norm() > 1e-6);
        match pivot {
            Some(v) => self.scale(v.conj() / v.norm()),
            None => self.clone(),
        }
    }

    /// Equality up to a global phase, fixed by [`ComplexMatrix::canonical_phase`].
    pub fn approx_eq_up_to_phase(&self, rhs: &Self, tol: f64) -> bool {
        self.dim == rhs.dim
            && self
                .canonical_phase()
                .approx_eq(&rhs.canonical_phase(), tol)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let v = self.get(i, j);
                    format!("{:+.4}{:+.4}i", v.re, v.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Standard single-qubit matrices.
pub mod gates {
    use super::{c, ComplexMatrix, C64};
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn h() -> ComplexMatrix {
        let s = c(FRAC_1_SQRT_2, 0.0);
        ComplexMatrix::mat2(s, s, s, -s)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::mat2(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::mat2(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
    }

    pub fn z() -> ComplexMatrix {
        phase(std::f64::consts::PI)
    }

    /// `diag(1, e^{iλ})`, the `p`/`u1` gate.
    pub fn phase(lambda: f64) -> ComplexMatrix {
        ComplexMatrix::mat2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, lambda))
    }

    /// `diag(e^{-iθ/2}, e^{iθ/2})`.
    pub fn rz(theta: f64) -> ComplexMatrix {
        ComplexMatrix::mat2(
            C64::from_polar(1.0, -theta / 2.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            C64::from_polar(1.0, theta / 2.0),
        )
    }

    pub fn rx(theta: f64) -> ComplexMatrix {
        let (s, co) = (theta / 2.0).sin_cos();
        ComplexMatrix::mat2(c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0))
    }

    pub fn ry(theta: f64) -> ComplexMatrix {
        let (s, co) = (theta / 2.0).sin_cos();
        ComplexMatrix::mat2(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
    }

    /// The OpenQASM `U(θ, φ, λ)` / `u3` matrix.
    pub fn u3(theta: f64, phi: f64, lambda: f64) -> ComplexMatrix {
        let (s, co) = (theta / 2.0).sin_cos();
        ComplexMatrix::mat2(
            c(co, 0.0),
            -C64::from_polar(s, lambda),
            C64::from_polar(s, phi),
            C64::from_polar(co, phi + lambda),
        )
    }

    pub fn sx() -> ComplexMatrix {
        ComplexMatrix::mat2(c(0.5, 0.5), c(0.5, -0.5), c(0.5, -0.5), c(0.5, 0.5))
    }

    /// Two-qubit SWAP.
    pub fn swap() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4);
        for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            m.set(r, col, c(1.0, 0.0));
        }
        m
    }

    /// Decomposes a 2x2 unitary as `e^{iγ} U3(θ, φ, λ)`; returns `(θ, φ, λ, γ)`.
    pub fn u3_params(m: &ComplexMatrix) -> (f64, f64, f64, f64) {
        assert_eq!(m.dim(), 2);
        let (a, b, cc, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
        let theta = 2.0 * cc.norm().atan2(a.norm());
        if a.norm() > 1e-12 && cc.norm() > 1e-12 {
            let gamma = a.arg();
            let phi = cc.arg() - gamma;
            let lambda = (-b).arg() - gamma;
            (theta, phi, lambda, gamma)
        } else if cc.norm() <= 1e-12 {
            // diagonal: only φ+λ is determined
            let gamma = a.arg();
            (theta, 0.0, d.arg() - gamma, gamma)
        } else {
            // anti-diagonal: cos(θ/2) = 0
            let gamma = cc.arg();
            (theta, 0.0, (-b).arg() - gamma, gamma)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::gates::*;
    use super::*;

    #[test]
    fn standard_gates_are_unitary() {
        for m in [h(), x(), y(), z(), sx(), rz(0.3), rx(1.1), ry(-2.0), u3(0.4, 1.2, -0.7), swap()] {
            assert!(m.is_unitary(TOLERANCE), "{m:?}");
        }
    }

    #[test]
    fn kron_orders_factors_most_significant_first() {
        // I ⊗ X flips the least significant bit.
        let m = identity().kron(&x());
        assert_eq!(m.get(1, 0), c(1.0, 0.0));
        assert_eq!(m.get(0, 1), c(1.0, 0.0));
        assert_eq!(m.get(2, 0), c(0.0, 0.0));
    }

    #[test]
    fn u3_params_round_trip() {
        let samples = [u3(0.4, 1.2, -0.7), h(), x(), y(), rz(0.9), sx(), ry(2.5).scale(C64::from_polar(1.0, 0.3))];
        for m in samples {
            let (t, p, l, g) = u3_params(&m);
            let rebuilt = u3(t, p, l).scale(C64::from_polar(1.0, g));
            assert!(rebuilt.approx_eq(&m, 1e-10), "{m:?} vs {rebuilt:?}");
        }
    }

    #[test]
    fn phase_canonicalisation_ignores_global_phase() {
        let m = h();
        let shifted = m.scale(C64::from_polar(1.0, 2.1));
        assert!(m.approx_eq_up_to_phase(&shifted, 1e-12));
        assert!(!m.approx_eq_up_to_phase(&x(), 1e-3));
    }
}
