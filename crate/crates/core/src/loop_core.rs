//! Truncated Laurent-loop arithmetic for the twisted loop group ΛSL₂ℂσ.
//!
//! A loop is a map from the unit circle to 2×2 complex matrices, stored as
//! a truncated Laurent series Σ_{|n|≤N} Aₙ λⁿ. The σ-twist condition
//! g(−λ) = σ₃ g(λ) σ₃ means diagonal entries live in even degrees and
//! off-diagonal entries in odd degrees.
//!
//! Products and inverses go through pointwise evaluation on an equispaced
//! unit-circle grid (alias-free when M ≥ 4N+4) and a discrete Fourier
//! transform back to coefficients; discarded tail mass above the tolerance
//! is an error, never a silent truncation.

use crate::error::{Error, Result};
use crate::mat2::{c, Mat2, C64};
use crate::potentials::DegreeOnePotential;
use rustfft::FftPlanner;

/// Default truncation order N.
pub const DEFAULT_ORDER: usize = 32;
/// Default unit-circle grid size M (power of two, ≥ 4N+4).
pub const DEFAULT_GRID: usize = 256;
/// Relative Frobenius mass allowed in discarded tail coefficients.
pub const TAIL_TOL: f64 = 1e-10;
/// Determinant floor below which a loop counts as singular on the grid.
pub const SINGULAR_TOL: f64 = 1e-12;

/// A truncated matrix Laurent series Σ_{|n|≤N} coeff(n) λⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistedLoop {
    /// Truncation order N.
    order: usize,
    /// Coefficients, index i ↔ degree i − N; length 2N+1.
    coeffs: Vec<Mat2>,
}

impl TwistedLoop {
    /// Zero loop of truncation order `order`.
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            coeffs: vec![Mat2::zero(); 2 * order + 1],
        }
    }

    /// Constant identity loop.
    pub fn identity(order: usize) -> Self {
        Self::constant(Mat2::identity(), order)
    }

    /// Constant loop with the given degree-0 coefficient.
    pub fn constant(m: Mat2, order: usize) -> Self {
        let mut g = Self::zero(order);
        g.set_coeff(0, m);
        g
    }

    /// The loop ω₀(λ) = ((0, λ), (−λ⁻¹, 0)); ω₀² = −id.
    pub fn omega0(order: usize) -> Self {
        let mut g = Self::zero(order.max(1));
        let mut up = Mat2::zero();
        up.m[0][1] = c(1.0, 0.0);
        let mut dn = Mat2::zero();
        dn.m[1][0] = c(-1.0, 0.0);
        g.set_coeff(1, up);
        g.set_coeff(-1, dn);
        g
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient of λⁿ (zero outside the stored band).
    pub fn coeff(&self, n: i64) -> Mat2 {
        let i = n + self.order as i64;
        if i < 0 || i >= self.coeffs.len() as i64 {
            Mat2::zero()
        } else {
            self.coeffs[i as usize]
        }
    }

    /// Set the coefficient of λⁿ; panics outside the stored band.
    pub fn set_coeff(&mut self, n: i64, m: Mat2) {
        let i = (n + self.order as i64) as usize;
        self.coeffs[i] = m;
    }

    /// Re-truncate to a new order, keeping common coefficients.
    /// Dropped mass is returned so callers can police the tail.
    pub fn with_order(&self, order: usize) -> (Self, f64) {
        let mut g = Self::zero(order);
        let mut dropped = 0.0f64;
        for n in -(self.order as i64)..=(self.order as i64) {
            if n.unsigned_abs() as usize <= order {
                g.set_coeff(n, self.coeff(n));
            } else {
                dropped += self.coeff(n).norm_sq();
            }
        }
        (g, dropped.sqrt())
    }

    /// Total Frobenius mass of all coefficients.
    pub fn frobenius_mass(&self) -> f64 {
        self.coeffs.iter().map(Mat2::norm_sq).sum::<f64>().sqrt()
    }

    /// Largest coefficient norm; a cheap sup-norm proxy used in residuals.
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(Mat2::norm).fold(0.0, f64::max)
    }

    /// Evaluate Σ coeff(n) λⁿ at an arbitrary nonzero λ.
    pub fn eval(&self, lambda: C64) -> Mat2 {
        // Horner in λ for the nonnegative part and in λ⁻¹ for the rest.
        let n = self.order as i64;
        let mut pos = Mat2::zero();
        for k in (0..=n).rev() {
            pos = pos.scale(lambda) + self.coeff(k);
        }
        let inv = c(1.0, 0.0) / lambda;
        let mut neg = Mat2::zero();
        for k in (1..=n).rev() {
            neg = neg.scale(inv) + self.coeff(-k);
        }
        pos + neg.scale(inv)
    }

    /// Smallest power of two ≥ 4N+4 (alias-free product grid), but at least
    /// the default grid size so residuals are probed densely.
    pub fn product_grid_size(order: usize) -> usize {
        let mut m = 8;
        while m < 4 * order + 4 {
            m *= 2;
        }
        m.max(DEFAULT_GRID)
    }

    /// Sample the loop on the standard M-point unit-circle grid.
    pub fn sample(&self, m: usize) -> LambdaGrid {
        let values = (0..m)
            .map(|k| self.eval(LambdaGrid::lambda_at(m, k)))
            .collect();
        LambdaGrid { m, values }
    }

    /// Pointwise product via the λ-grid; errors if the discarded tail mass
    /// exceeds the tolerance.
    pub fn mul(&self, other: &TwistedLoop) -> Result<TwistedLoop> {
        let order = self.order.max(other.order);
        let m = Self::product_grid_size(order);
        let ga = self.sample(m);
        let gb = other.sample(m);
        let prod = ga.zip(&gb, |a, b| a * b);
        prod.to_loop(order, "loop_mul")
    }

    /// Pointwise inverse via the λ-grid.
    pub fn inv(&self) -> Result<TwistedLoop> {
        let m = Self::product_grid_size(self.order);
        let g = self.sample(m);
        let mut min_det = f64::INFINITY;
        for v in &g.values {
            min_det = min_det.min(v.det().norm());
        }
        if min_det < SINGULAR_TOL {
            return Err(Error::SingularLoop { min_abs_det: min_det });
        }
        g.map(Mat2::inv).to_loop(self.order, "loop_inv")
    }

    pub fn add(&self, other: &TwistedLoop) -> TwistedLoop {
        let order = self.order.max(other.order);
        let mut g = Self::zero(order);
        for n in -(order as i64)..=(order as i64) {
            g.set_coeff(n, self.coeff(n) + other.coeff(n));
        }
        g
    }

    pub fn sub(&self, other: &TwistedLoop) -> TwistedLoop {
        self.add(&other.scale(c(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> TwistedLoop {
        TwistedLoop {
            order: self.order,
            coeffs: self.coeffs.iter().map(|m| m.scale(s)).collect(),
        }
    }

    /// Frobenius mass violating the σ-twist parity (diagonal even,
    /// off-diagonal odd).
    pub fn twist_residual(&self) -> f64 {
        let mut bad = 0.0f64;
        for n in -(self.order as i64)..=(self.order as i64) {
            let a = self.coeff(n);
            if n.rem_euclid(2) == 0 {
                bad += a.offdiag_part().norm_sq();
            } else {
                bad += a.diag_part().norm_sq();
            }
        }
        bad.sqrt()
    }

    /// max over the unit-circle grid of ‖g(λ)* σ₃ g(λ) − σ₃‖; zero iff the
    /// loop lies in ΛSU₁,₁σ (given the twist).
    pub fn reality_residual_su11(&self) -> f64 {
        let m = Self::product_grid_size(self.order);
        self.sample(m)
            .values
            .iter()
            .map(Mat2::su11_defect)
            .fold(0.0, f64::max)
    }

    /// Exact coefficient derivative ∂_λ: Σ n·coeff(n) λ^{n−1}.
    pub fn lambda_derivative(&self) -> TwistedLoop {
        let order = self.order + 1;
        let mut g = TwistedLoop::zero(order);
        for n in -(self.order as i64)..=(self.order as i64) {
            g.set_coeff(n - 1, self.coeff(n).scale(c(n as f64, 0.0)));
        }
        g
    }

    /// Exact λ∂_λ: Σ n·coeff(n) λⁿ. Preserves the twist parity.
    pub fn lambda_times_derivative(&self) -> TwistedLoop {
        let mut g = TwistedLoop::zero(self.order);
        for n in -(self.order as i64)..=(self.order as i64) {
            g.set_coeff(n, self.coeff(n).scale(c(n as f64, 0.0)));
        }
        g
    }

    /// Coefficient-level piece of the real-form involution:
    /// returns the loop with coefficients conj(A₋ₙ), i.e. λ ↦ conj(g(1/λ̄)).
    pub fn conj_reindex(&self) -> TwistedLoop {
        let mut g = TwistedLoop::zero(self.order);
        for n in -(self.order as i64)..=(self.order as i64) {
            g.set_coeff(n, self.coeff(-n).conj());
        }
        g
    }

    /// max coefficient-norm distance to another loop.
    pub fn distance(&self, other: &TwistedLoop) -> f64 {
        let order = self.order.max(other.order) as i64;
        let mut d = 0.0f64;
        for n in -order..=order {
            d = d.max((self.coeff(n) - other.coeff(n)).norm());
        }
        d
    }
}

/// Values of a loop on the equispaced M-point unit-circle grid
/// λ_k = e^{2πik/M}.
#[derive(Debug, Clone)]
pub struct LambdaGrid {
    /// Number of sample points (power of two in practice).
    pub m: usize,
    /// One 2×2 matrix per grid point.
    pub values: Vec<Mat2>,
}

impl LambdaGrid {
    /// The k-th grid point e^{2πik/M}.
    pub fn lambda_at(m: usize, k: usize) -> C64 {
        C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64)
    }

    /// Build from a pointwise function of λ.
    pub fn from_fn(m: usize, f: impl Fn(C64) -> Mat2) -> Self {
        let values = (0..m).map(|k| f(Self::lambda_at(m, k))).collect();
        Self { m, values }
    }

    pub fn map(&self, f: impl Fn(&Mat2) -> Mat2) -> Self {
        Self {
            m: self.m,
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn zip(&self, other: &Self, f: impl Fn(Mat2, Mat2) -> Mat2) -> Self {
        assert_eq!(self.m, other.m, "grid sizes must match");
        Self {
            m: self.m,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    /// Recover Laurent coefficients by DFT and truncate to `order`, policing
    /// the discarded tail mass.
    pub fn to_loop(&self, order: usize, context: &'static str) -> Result<TwistedLoop> {
        let m = self.m;
        assert!(m > 2 * order + 1, "grid too small for the truncation order");
        // One FFT per matrix entry: A_n = (1/M) Σ_k v_k e^{−2πi nk/M}.
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(m);
        let mut spectra = [[(); 2]; 2].map(|row| row.map(|_| vec![C64::default(); m]));
        for (i, row) in spectra.iter_mut().enumerate() {
            for (j, buf) in row.iter_mut().enumerate() {
                for k in 0..m {
                    buf[k] = self.values[k].m[i][j];
                }
                fft.process(buf);
            }
        }
        let coeff_at = |n: i64| -> Mat2 {
            let idx = n.rem_euclid(m as i64) as usize;
            let mut a = Mat2::zero();
            for i in 0..2 {
                for j in 0..2 {
                    a.m[i][j] = spectra[i][j][idx] / m as f64;
                }
            }
            a
        };
        let mut g = TwistedLoop::zero(order);
        let mut kept = 0.0f64;
        for n in -(order as i64)..=(order as i64) {
            let a = coeff_at(n);
            kept += a.norm_sq();
            g.set_coeff(n, a);
        }
        let mut tail = 0.0f64;
        let half = m as i64 / 2;
        for n in (-half + 1)..=half {
            if n.unsigned_abs() as usize > order {
                tail += coeff_at(n).norm_sq();
            }
        }
        let total = (kept + tail).sqrt();
        let rel_tail = if total > 0.0 { tail.sqrt() / total } else { 0.0 };
        if rel_tail > TAIL_TOL {
            return Err(Error::TailOverflow {
                mass: rel_tail,
                tol: TAIL_TOL,
                context,
            });
        }
        Ok(g)
    }
}

/// Evaluate a loop at λ: thin named wrapper for symmetry with the rest of
/// the operation set.
pub fn loop_eval(g: &TwistedLoop, lambda: C64) -> Mat2 {
    g.eval(lambda)
}

/// exp(z·D(λ)) for a degree-one potential D, as a truncated loop.
///
/// D(λ) is traceless for every λ, so the exponential has the closed form
/// cosh(δ)·id + sinh(δ)/δ · zD(λ) with δ² = −det(zD(λ)); the δ → 0 limit
/// is handled by the series of sinh(δ)/δ.
pub fn exp_degree_one(d: &DegreeOnePotential, z: C64, order: usize) -> Result<TwistedLoop> {
    let m = TwistedLoop::product_grid_size(order);
    let grid = LambdaGrid::from_fn(m, |lambda| exp_traceless(d.matrix_at(lambda).scale(z)));
    grid.to_loop(order, "exp_degree_one")
}

/// exp of a traceless 2×2 matrix A: cosh(δ)id + sinh(δ)/δ·A, δ² = −det A.
pub fn exp_traceless(a: Mat2) -> Mat2 {
    let delta2 = -a.det();
    let delta = delta2.sqrt();
    let (ch, shc) = if delta.norm() < 1e-6 {
        // sinh(δ)/δ = 1 + δ²/6 + δ⁴/120 + …
        (
            c(1.0, 0.0) + delta2 / 2.0 + delta2 * delta2 / 24.0,
            c(1.0, 0.0) + delta2 / 6.0 + delta2 * delta2 / 120.0,
        )
    } else {
        (delta.cosh(), delta.sinh() / delta)
    };
    Mat2::identity().scale(ch) + a.scale(shc)
}
