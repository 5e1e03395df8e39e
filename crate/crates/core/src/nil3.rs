//! Exact group and isometry algebra of the 3-dimensional Heisenberg group
//! Nil₃ in exponential coordinates, together with its left-invariant metric,
//! the identity component of the isometry group, one-parameter motions and
//! Killing fields.

use crate::error::{Error, Result};
use crate::mat2::C64;
use std::f64::consts::TAU;

/// A point of Nil₃ in exponential coordinates (x₁, x₂, x₃).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Nil3Point {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Nil3Point {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn origin() -> Self {
        Self::default()
    }

    /// Group inverse: (−x₁, −x₂, −x₃).
    pub fn inverse(&self) -> Self {
        Self::new(-self.x1, -self.x2, -self.x3)
    }

    /// Horizontal part as a complex number x₁ + i x₂.
    pub fn horizontal(&self) -> C64 {
        C64::new(self.x1, self.x2)
    }

    pub fn dist_max(&self, o: &Nil3Point) -> f64 {
        (self.x1 - o.x1)
            .abs()
            .max((self.x2 - o.x2).abs())
            .max((self.x3 - o.x3).abs())
    }
}

/// Group multiplication:
/// (a·x)₃ picks up the area term ½(a₁x₂ − a₂x₁).
pub fn nil_mul(a: &Nil3Point, x: &Nil3Point) -> Nil3Point {
    Nil3Point::new(
        a.x1 + x.x1,
        a.x2 + x.x2,
        a.x3 + x.x3 + 0.5 * (a.x1 * x.x2 - a.x2 * x.x1),
    )
}

/// An element ((a₁,a₂,a₃), e^{iθ}) of the identity component Iso₀(Nil₃):
/// rotate the horizontal plane by θ, then left-translate by t.
///
/// The angle is stored unreduced (not mod 2π) so one-parameter groups stay
/// smooth in t; reduce only at comparison sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    /// Translation part.
    pub t: Nil3Point,
    /// Fiber rotation angle in radians (unreduced).
    pub theta: f64,
}

impl Isometry {
    pub fn new(t: Nil3Point, theta: f64) -> Self {
        Self { t, theta }
    }

    pub fn identity() -> Self {
        Self::new(Nil3Point::origin(), 0.0)
    }

    /// Pure rotation about the x₃-axis.
    pub fn rotation(theta: f64) -> Self {
        Self::new(Nil3Point::origin(), theta)
    }

    /// Max-norm distance with the angle compared mod 2π.
    pub fn dist(&self, o: &Isometry) -> f64 {
        let mut dth = (self.theta - o.theta) % TAU;
        if dth > std::f64::consts::PI {
            dth -= TAU;
        }
        if dth < -std::f64::consts::PI {
            dth += TAU;
        }
        self.t.dist_max(&o.t).max(dth.abs())
    }
}

/// Apply ρ to a point: rotate (x₁,x₂) by θ, keep x₃, then left-multiply by ρ.t.
pub fn iso_apply(rho: &Isometry, x: &Nil3Point) -> Nil3Point {
    let (s, c) = rho.theta.sin_cos();
    let rotated = Nil3Point::new(c * x.x1 - s * x.x2, s * x.x1 + c * x.x2, x.x3);
    nil_mul(&rho.t, &rotated)
}

/// Compose isometries in the shorthand (α𝔠e^{iθ})(β𝔡e^{iτ}) =
/// (α + e^{iθ}β)(𝔠 + 𝔡 + ½Im(conj(α)·e^{iθ}·β)) e^{i(θ+τ)}.
pub fn iso_compose(rho: &Isometry, sigma: &Isometry) -> Isometry {
    let alpha = rho.t.horizontal();
    let beta = sigma.t.horizontal();
    let e_it = C64::from_polar(1.0, rho.theta);
    let hor = alpha + e_it * beta;
    let center = rho.t.x3 + sigma.t.x3 + 0.5 * (alpha.conj() * e_it * beta).im;
    Isometry::new(
        Nil3Point::new(hor.re, hor.im, center),
        rho.theta + sigma.theta,
    )
}

/// Inverse isometry (ρ⁻¹ρ = id).
pub fn iso_inverse(rho: &Isometry) -> Isometry {
    let alpha = rho.t.horizontal();
    let e_mit = C64::from_polar(1.0, -rho.theta);
    let hor = -(e_mit * alpha);
    Isometry::new(Nil3Point::new(hor.re, hor.im, -rho.t.x3), -rho.theta)
}

/// Helicoidal motion with pitch 𝔠 around the vertical axis through α:
/// ρ_t = (α(1 − e^{it})) (𝔠t − |α|²/2 · sin t) e^{it}.
pub fn helicoidal_motion(pitch: f64, alpha: C64, t: f64) -> Isometry {
    let e_it = C64::from_polar(1.0, t);
    let hor = alpha * (C64::new(1.0, 0.0) - e_it);
    let center = pitch * t - 0.5 * alpha.norm_sqr() * t.sin();
    Isometry::new(Nil3Point::new(hor.re, hor.im, center), t)
}

/// Translation motion (tα)(t𝔠): straight one-parameter group with no
/// fiber rotation.
pub fn translation_motion(alpha: C64, pitch: f64, t: f64) -> Isometry {
    Isometry::new(
        Nil3Point::new(t * alpha.re, t * alpha.im, t * pitch),
        0.0,
    )
}

/// Decompose ρ = (w, e^{iq}) with q ∉ 2πℤ uniquely as a rotation by q about
/// the vertical axis through α = a₁ + i a₂, followed by a vertical shift 𝔠:
/// solves
///   w₁ = a₁(1 − cos q) + a₂ sin q
///   w₂ = −a₁ sin q + a₂(1 − cos q)
///   w₃ = 𝔠 − ½(a₁² + a₂²) sin q
/// and returns (𝔠, α, q).
pub fn decompose_isometry(rho: &Isometry) -> Result<(f64, C64, f64)> {
    let q = rho.theta;
    let (s, cq) = q.sin_cos();
    let det = 2.0 * (1.0 - cq);
    if det.abs() < 1e-14 {
        return Err(Error::NoRotationPart { q });
    }
    // 2×2 linear solve: [[1−cos q, sin q], [−sin q, 1−cos q]] (a₁,a₂)ᵗ = w.
    let (w1, w2, w3) = (rho.t.x1, rho.t.x2, rho.t.x3);
    let a1 = ((1.0 - cq) * w1 - s * w2) / det;
    let a2 = (s * w1 + (1.0 - cq) * w2) / det;
    let pitch = w3 + 0.5 * (a1 * a1 + a2 * a2) * s;
    Ok((pitch, C64::new(a1, a2), q))
}

/// Rebuild the isometry α(𝔠e^{iq})α⁻¹ from the decomposition data —
/// the round-trip partner of `decompose_isometry`.
pub fn compose_from_axis(pitch: f64, alpha: C64, q: f64) -> Isometry {
    let a = Isometry::new(Nil3Point::new(alpha.re, alpha.im, 0.0), 0.0);
    let screw = Isometry::new(Nil3Point::new(0.0, 0.0, pitch), q);
    iso_compose(&iso_compose(&a, &screw), &iso_inverse(&a))
}

/// The four Killing vector fields of the left-invariant metric at x, as
/// coordinate-component triples:
/// E₁ = ∂₁ − (x₂/2)∂₃, E₂ = ∂₂ + (x₁/2)∂₃, E₃ = ∂₃, E₄ = −x₂∂₁ + x₁∂₂.
pub fn killing_fields(x: &Nil3Point) -> [[f64; 3]; 4] {
    [
        [1.0, 0.0, -x.x2 / 2.0],
        [0.0, 1.0, x.x1 / 2.0],
        [0.0, 0.0, 1.0],
        [-x.x2, x.x1, 0.0],
    ]
}

/// Left-invariant metric ds² = dx₁² + dx₂² + (dx₃ + ½(x₂dx₁ − x₁dx₂))²
/// applied bilinearly to two coordinate tangent vectors at x.
pub fn metric_eval(x: &Nil3Point, u: &[f64; 3], v: &[f64; 3]) -> f64 {
    let wu = u[2] + 0.5 * (x.x2 * u[0] - x.x1 * u[1]);
    let wv = v[2] + 0.5 * (x.x2 * v[0] - x.x1 * v[1]);
    u[0] * v[0] + u[1] * v[1] + wu * wv
}

/// Components of the left-translated tangent vector f⁻¹df(u) in the
/// orthonormal left-invariant frame (E₁, E₂, E₃): for a coordinate tangent
/// vector u at the point f this is (u₁, u₂, u₃ + ½(f₂u₁ − f₁u₂)).
pub fn left_translate_tangent(f: &Nil3Point, u: &[f64; 3]) -> [f64; 3] {
    [u[0], u[1], u[2] + 0.5 * (f.x2 * u[0] - f.x1 * u[1])]
}
