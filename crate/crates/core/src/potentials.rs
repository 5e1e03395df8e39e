//! Holomorphic potentials: degree-one (constant), normalized, and general
//! polynomial-coefficient loop-valued 1-forms, with gauging and invariance
//! verification.

use crate::error::{Error, Result};
use crate::loop_core::{LambdaGrid, TwistedLoop};
use crate::mat2::{c, Mat2, C64};
use std::sync::Arc;

/// Pole-detection threshold for the scalar p of a normalized potential.
pub const POLE_TOL: f64 = 1e-12;

/// The constant degree-one potential
/// D(λ) = ((ic, λ⁻¹a + λ·conj(b)), (λ⁻¹b + λ·conj(a), −ic)).
///
/// D(λ) lies in the twisted su(1,1) loop algebra: D(λ)*σ₃ + σ₃D(λ) = 0 on
/// the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeOnePotential {
    /// Upper-right λ⁻¹ coefficient; must be nonzero (immersion condition).
    pub a: C64,
    /// Lower-left λ⁻¹ coefficient.
    pub b: C64,
    /// Diagonal entry scale: coeff(0) = diag(ic, −ic).
    pub c: f64,
}

impl DegreeOnePotential {
    pub fn new(a: C64, b: C64, c_diag: f64) -> Result<Self> {
        if a.norm() == 0.0 {
            return Err(Error::ZeroA);
        }
        Ok(Self { a, b, c: c_diag })
    }

    /// Evaluate D(λ) as a plain matrix.
    pub fn matrix_at(&self, lambda: C64) -> Mat2 {
        let li = c(1.0, 0.0) / lambda;
        Mat2::new(
            c(0.0, self.c),
            li * self.a + lambda * self.b.conj(),
            li * self.b + lambda * self.a.conj(),
            c(0.0, -self.c),
        )
    }

    /// det D(λ=1) = c² − |a + conj(b)|²; its sign drives the symmetry class.
    pub fn det_at_one(&self) -> f64 {
        self.c * self.c - (self.a + self.b.conj()).norm_sqr()
    }

    /// The potential as a truncated loop (degrees −1, 0, 1 only).
    pub fn degree_one_matrix(&self, order: usize) -> TwistedLoop {
        let mut g = TwistedLoop::zero(order.max(1));
        g.set_coeff(
            -1,
            Mat2::new(c(0.0, 0.0), self.a, self.b, c(0.0, 0.0)),
        );
        g.set_coeff(0, Mat2::diag(c(0.0, self.c), c(0.0, -self.c)));
        g.set_coeff(
            1,
            Mat2::new(c(0.0, 0.0), self.b.conj(), self.a.conj(), c(0.0, 0.0)),
        );
        g
    }

    /// Residual of the Λsu₁,₁σ algebra condition D(λ)*σ₃ + σ₃D(λ) = 0,
    /// maximized over the unit-circle grid.
    pub fn algebra_residual(&self, m: usize) -> f64 {
        let s3 = Mat2::sigma3();
        (0..m)
            .map(|k| {
                let d = self.matrix_at(LambdaGrid::lambda_at(m, k));
                (d.dagger() * s3 + s3 * d).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Scalar polynomial with complex coefficients, ascending powers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly(pub Vec<C64>);

impl Poly {
    pub fn constant(v: C64) -> Self {
        Poly(vec![v])
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = c(0.0, 0.0);
        for &a in self.0.iter().rev() {
            acc = acc * z + a;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::constant(c(0.0, 0.0));
        }
        Poly(
            self.0[1..]
                .iter()
                .enumerate()
                .map(|(i, &a)| a * c((i + 1) as f64, 0.0))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|a| a.norm() == 0.0)
    }
}

/// Normalized potential ξ₋ = λ⁻¹ ((0, −p), (B/p, 0)) dz with meromorphic
/// scalar p and holomorphic B (the quadratic-differential coefficient).
#[derive(Debug, Clone)]
pub struct NormalizedPotential {
    /// Scalar p(z); zeros of p are poles of the potential and are flagged.
    pub p: Poly,
    /// Holomorphic coefficient B(z).
    pub big_b: Poly,
}

impl NormalizedPotential {
    pub fn new(p: Poly, big_b: Poly) -> Self {
        assert!(!p.is_zero(), "p must not vanish identically");
        Self { p, big_b }
    }

    /// Whether z touches a pole of the potential.
    pub fn is_pole(&self, z: C64) -> bool {
        self.p.eval(z).norm() < POLE_TOL
    }

    /// Evaluate the dz-coefficient as a loop (single λ⁻¹ term).
    pub fn eval_at(&self, z: C64, order: usize) -> TwistedLoop {
        let p = self.p.eval(z);
        let b = self.big_b.eval(z);
        let mut g = TwistedLoop::zero(order.max(1));
        g.set_coeff(-1, Mat2::new(c(0.0, 0.0), -p, b / p, c(0.0, 0.0)));
        g
    }
}

/// General holomorphic potential: a loop-valued 1-form η(z) dz with Fourier
/// degrees ≥ −1. Coefficients are either polynomials in z (a vector of
/// loops, index = power of z) or an arbitrary callback for transcendental
/// coefficient functions.
#[derive(Clone)]
pub enum GeneralPotential {
    /// η(z) = Σ_j z^j · L_j with each L_j a loop with degrees ≥ −1.
    Polynomial(Vec<TwistedLoop>),
    /// Pointwise evaluation callback.
    Callback(Arc<dyn Fn(C64) -> TwistedLoop + Send + Sync>),
}

impl std::fmt::Debug for GeneralPotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeneralPotential::Polynomial(v) => {
                write!(f, "GeneralPotential::Polynomial({} z-coefficients)", v.len())
            }
            GeneralPotential::Callback(_) => write!(f, "GeneralPotential::Callback"),
        }
    }
}

impl GeneralPotential {
    /// Constant-in-z potential.
    pub fn constant(g: TwistedLoop) -> Self {
        GeneralPotential::Polynomial(vec![g])
    }

    /// Evaluate the dz-coefficient η(z).
    pub fn eval_at(&self, z: C64) -> TwistedLoop {
        match self {
            GeneralPotential::Polynomial(coeffs) => {
                let order = coeffs.iter().map(TwistedLoop::order).max().unwrap_or(1);
                let mut acc = TwistedLoop::zero(order);
                let mut zp = c(1.0, 0.0);
                for l in coeffs {
                    acc = acc.add(&l.scale(zp));
                    zp *= z;
                }
                acc
            }
            GeneralPotential::Callback(f) => f(z),
        }
    }
}

/// Gauge transform η # W₊ = W₊⁻¹ η W₊ + W₊⁻¹ ∂W₊, returned as a callback
/// potential (W₊⁻¹ is not polynomial even when W₊ is).
///
/// `wplus` and its z-derivative `dwplus` are supplied as functions of z.
pub fn gauge(
    eta: &GeneralPotential,
    wplus: Arc<dyn Fn(C64) -> TwistedLoop + Send + Sync>,
    dwplus: Arc<dyn Fn(C64) -> TwistedLoop + Send + Sync>,
) -> GeneralPotential {
    let eta = eta.clone();
    GeneralPotential::Callback(Arc::new(move |z| {
        let w = wplus(z);
        let dw = dwplus(z);
        let wi = w.inv().expect("gauge loop must be invertible");
        let conj = wi
            .mul(&eta.eval_at(z))
            .and_then(|t| t.mul(&w))
            .expect("gauge product tail overflow");
        let inhom = wi.mul(&dw).expect("gauge derivative tail overflow");
        conj.add(&inhom)
    }))
}

/// Pullback-invariance residual of η under the affine map γ(z) = αz + β:
/// max over samples of ‖η(γ(z))·γ′(z) − η(z)‖ (max coefficient norm).
pub fn invariance_residual(eta: &GeneralPotential, alpha: C64, beta: C64, samples: &[C64]) -> f64 {
    samples
        .iter()
        .map(|&z| {
            let pulled = eta.eval_at(alpha * z + beta).scale(alpha);
            pulled.distance(&eta.eval_at(z))
        })
        .fold(0.0, f64::max)
}
