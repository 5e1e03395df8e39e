//! Dense 2×2 complex matrices.
//!
//! Everything in the pipeline is built from 2×2 complex matrix arithmetic,
//! so this is a small hand-rolled value type rather than a generic matrix
//! library: determinants, adjugate inverses and the σ₃ conjugations used by
//! the twisted loop groups are all closed-form here.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

/// Shorthand for the complex scalar type used everywhere.
pub type C64 = Complex64;

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    pub m: [[C64; 2]; 2],
}

/// Complex literal helper.
#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0))
    }

    /// diag(d1, d2).
    pub fn diag(d1: C64, d2: C64) -> Self {
        Self::new(d1, c(0.0, 0.0), c(0.0, 0.0), d2)
    }

    /// The Pauli matrix σ₃ = diag(1, −1).
    pub fn sigma3() -> Self {
        Self::diag(c(1.0, 0.0), c(-1.0, 0.0))
    }

    #[inline]
    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    #[inline]
    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Adjugate: inv = adjugate / det.
    pub fn adjugate(&self) -> Self {
        Self::new(self.m[1][1], -self.m[0][1], -self.m[1][0], self.m[0][0])
    }

    /// Inverse via the adjugate. Caller guards against det ≈ 0.
    pub fn inv(&self) -> Self {
        let d = self.det();
        self.adjugate().scale(C64::new(1.0, 0.0) / d)
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::new(
            self.m[0][0].conj(),
            self.m[0][1].conj(),
            self.m[1][0].conj(),
            self.m[1][1].conj(),
        )
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        self.conj().transpose()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(
            self.m[0][0] * s,
            self.m[0][1] * s,
            self.m[1][0] * s,
            self.m[1][1] * s,
        )
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Squared Frobenius norm.
    pub fn norm_sq(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// σ₃ A σ₃ (flips the sign of the off-diagonal entries).
    pub fn sigma3_conj(&self) -> Self {
        Self::new(self.m[0][0], -self.m[0][1], -self.m[1][0], self.m[1][1])
    }

    /// Diagonal part.
    pub fn diag_part(&self) -> Self {
        Self::diag(self.m[0][0], self.m[1][1])
    }

    /// Off-diagonal part.
    pub fn offdiag_part(&self) -> Self {
        Self::new(c(0.0, 0.0), self.m[0][1], self.m[1][0], c(0.0, 0.0))
    }

    /// ‖A*σ₃A − σ₃‖: zero iff A ∈ SU(1,1) up to determinant phase.
    pub fn su11_defect(&self) -> f64 {
        let s3 = Self::sigma3();
        (self.dagger() * s3 * *self - s3).norm()
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] - o.m[0][0],
            self.m[0][1] - o.m[0][1],
            self.m[1][0] - o.m[1][0],
            self.m[1][1] - o.m[1][1],
        )
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] * o.m[0][0] + self.m[0][1] * o.m[1][0],
            self.m[0][0] * o.m[0][1] + self.m[0][1] * o.m[1][1],
            self.m[1][0] * o.m[0][0] + self.m[1][1] * o.m[1][0],
            self.m[1][0] * o.m[0][1] + self.m[1][1] * o.m[1][1],
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(c(-1.0, 0.0))
    }
}
