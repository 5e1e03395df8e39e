//! Symmetry analysis of surfaces generated from constant degree-one
//! potentials: classification, the diagonalizing dressing, one-parameter
//! monodromy families, extraction of the rigid motion ρ_t = ((p,q,r), e^{iθ}),
//! helicoidal parameters (ℓ, α, 𝔠), the catenoid condition, the closed-form
//! translation surface, closing tests and the dressed-symmetry predicate.

use crate::error::{Error, Result};
use crate::factorization::Cell;
use crate::loop_core::{exp_degree_one, TwistedLoop};
use crate::mat2::{c, Mat2, C64};
use crate::nil3::{helicoidal_motion, translation_motion, Isometry, Nil3Point};
use crate::potentials::DegreeOnePotential;

/// Default classification threshold for the sign of det D(1).
pub const DELTA_CLASS: f64 = 1e-10;
/// Reality residual required of the diagonalizing dressing.
pub const DIAGONALIZER_REALITY_TOL: f64 = 1e-10;
/// Unimodularity slack allowed for monodromy eigenvalues at λ = 1.
pub const UNIMODULAR_TOL: f64 = 1e-8;
/// Residual threshold of the closing conditions.
pub const CLOSING_TOL: f64 = 1e-8;
/// Residual threshold of the dressed-symmetry conditions.
pub const MONO2_TOL: f64 = 1e-8;
/// Default tolerance of the catenoid condition.
pub const CATENOID_TOL: f64 = 1e-10;

/// Degenerate subcases of the non-symmetric class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonSymmetricKind {
    /// det D(1) within δ of zero but D(1) ≠ 0 (parabolic borderline).
    DetZero,
    /// det D(1) < −δ (no vertical-axis symmetry).
    DetNegative,
}

/// Symmetry class of the surface generated by a degree-one potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceClass {
    /// D(1) = 0: invariant under a one-parameter translation group.
    Translation,
    /// b = 0 with det D(1) > δ: the horizontal plane/umbrella family.
    HorizontalPlaneFamily,
    /// det D(1) > δ, D(1) ≠ 0, b ≠ 0: helicoidal surface.
    Helicoidal,
    NonSymmetric(NonSymmetricKind),
}

impl SurfaceClass {
    pub fn name(&self) -> &'static str {
        match self {
            SurfaceClass::Translation => "Translation",
            SurfaceClass::HorizontalPlaneFamily => "HorizontalPlaneFamily",
            SurfaceClass::Helicoidal => "Helicoidal",
            SurfaceClass::NonSymmetric(NonSymmetricKind::DetZero) => "NonSymmetric(detZero)",
            SurfaceClass::NonSymmetric(NonSymmetricKind::DetNegative) => {
                "NonSymmetric(detNegative)"
            }
        }
    }
}

/// Classify with an explicit borderline threshold δ.
pub fn classify_with_delta(p: &DegreeOnePotential, delta: f64) -> SurfaceClass {
    let d1 = p.matrix_at(c(1.0, 0.0));
    if d1.norm() <= delta {
        return SurfaceClass::Translation;
    }
    let det = p.det_at_one();
    if det < -delta {
        return SurfaceClass::NonSymmetric(NonSymmetricKind::DetNegative);
    }
    if det <= delta {
        return SurfaceClass::NonSymmetric(NonSymmetricKind::DetZero);
    }
    if p.b.norm() <= delta {
        SurfaceClass::HorizontalPlaneFamily
    } else {
        SurfaceClass::Helicoidal
    }
}

/// Classify by the sign of det D(1) and the vanishing of D(1) and b.
pub fn classify(p: &DegreeOnePotential) -> SurfaceClass {
    classify_with_delta(p, DELTA_CLASS)
}

/// Dressing that diagonalizes the λ = 1 evaluation of a degree-one
/// potential with det D(1) > 0.
///
/// The columns of S⁻¹(1) are the eigenvectors of D(1) for (+iℓ, −iℓ),
/// normalized against the indefinite form ⟨v, w⟩ = v*σ₃w with the
/// positive-norm vector first; conjugation by diag(λ^{1/2}, λ^{−1/2})
/// moves the off-diagonal entries to degrees ±1 so the loop respects the
/// twist, and the result lies in ΛSU₁,₁σ.
pub fn diagonalizer(p: &DegreeOnePotential, order: usize) -> Result<TwistedLoop> {
    let det = p.det_at_one();
    if det <= 0.0 {
        return Err(Error::NullEigenvector { det });
    }
    let ell = det.sqrt();
    let m = p.a + p.b.conj();
    if m.norm() <= DELTA_CLASS {
        // D(1) is already diagonal (diag(ic, −ic) with c > 0).
        return Ok(TwistedLoop::identity(order.max(1)));
    }
    // Eigenvectors of ((ic, m), (m̄, −ic)) for ±iℓ and their σ₃-norms
    // 2ℓ(c − ℓ) and −2ℓ(c + ℓ).
    let v_plus = [m, c(0.0, ell - p.c)];
    let v_minus = [m, c(0.0, -ell - p.c)];
    let norm_plus = 2.0 * ell * (p.c - ell);
    let norm_minus = -2.0 * ell * (p.c + ell);
    let (pos, pos_norm, neg, neg_norm) = if norm_plus > 0.0 {
        (v_plus, norm_plus, v_minus, norm_minus)
    } else {
        (v_minus, norm_minus, v_plus, norm_plus)
    };
    if pos_norm <= 0.0 || neg_norm >= 0.0 {
        return Err(Error::NullEigenvector { det });
    }
    let sp = 1.0 / pos_norm.sqrt();
    let sn = 1.0 / (-neg_norm).sqrt();
    let mut e = Mat2::new(
        pos[0].scale(sp),
        neg[0].scale(sn),
        pos[1].scale(sp),
        neg[1].scale(sn),
    );
    // |det E| = 1 from the σ₃-normalization; scale the second column to
    // pin det E = 1 exactly.
    let d = e.det();
    e.m[0][1] /= d;
    e.m[1][1] /= d;
    // The remaining unimodular freedom E → E·diag(e^{iφ}, e^{−iφ}) is
    // fixed symmetrically (half the phase of the off-diagonal entry of
    // D(1) on each column), which makes the monodromy derivatives match
    // the closed-form helicoidal invariants.
    let phase = C64::from_polar(1.0, -0.5 * m.arg());
    e.m[0][0] *= phase;
    e.m[1][0] *= phase;
    e.m[0][1] /= phase;
    e.m[1][1] /= phase;
    // S⁻¹(λ) = ((E₁₁, λE₁₂), (λ⁻¹E₂₁, E₂₂)); return the adjugate S.
    let mut s = TwistedLoop::zero(order.max(1));
    s.set_coeff(0, Mat2::diag(e.m[1][1], e.m[0][0]));
    let mut up = Mat2::zero();
    up.m[0][1] = -e.m[0][1];
    s.set_coeff(1, up);
    let mut dn = Mat2::zero();
    dn.m[1][0] = -e.m[1][0];
    s.set_coeff(-1, dn);
    let res = s.reality_residual_su11();
    if res > DIAGONALIZER_REALITY_TOL {
        return Err(Error::Numeric {
            op: "diagonalizer",
            message: format!("dressing reality residual {res:.3e}"),
        });
    }
    Ok(s)
}

/// One-parameter monodromy family M_t = S·exp(tD)·S⁻¹.
#[derive(Debug, Clone)]
pub struct Monodromy {
    pub s: TwistedLoop,
    pub s_inv: TwistedLoop,
    pub d: DegreeOnePotential,
    pub order: usize,
}

impl Monodromy {
    pub fn new(s: &TwistedLoop, d: DegreeOnePotential) -> Result<Self> {
        Ok(Self {
            s: s.clone(),
            s_inv: s.inv()?,
            d,
            order: s.order(),
        })
    }

    /// M_t as a loop.
    pub fn m_at(&self, t: f64) -> Result<TwistedLoop> {
        let e = exp_degree_one(&self.d, c(t, 0.0), self.order)?;
        self.s.mul(&e)?.mul(&self.s_inv)
    }
}

/// Derivative data of a monodromy at λ = 1: the fiber rotation angle θ_t
/// (from the unimodular eigenvalues of M_t(1)) and the matrices
/// X = −iλ(∂_λM_t)M_t⁻¹ |_{λ=1} and Y = −½ λ∂_λ(λ(∂_λM_t)M_t⁻¹) |_{λ=1},
/// with all λ-derivatives exact on coefficients.
pub fn monodromy_xy(m: &Monodromy, t: f64) -> Result<(f64, Mat2, Mat2)> {
    let mt = m.m_at(t)?;
    let one = c(1.0, 0.0);
    let m1 = mt.eval(one);
    let dev = (m1.m[0][0].norm() - 1.0).abs().max((m1.m[1][1].norm() - 1.0).abs());
    if dev > UNIMODULAR_TOL {
        return Err(Error::NonUnimodularMonodromy { deviation: dev });
    }
    let theta = 2.0 * m1.m[0][0].arg();
    let g = mt.lambda_times_derivative().mul(&mt.inv()?)?;
    let x = g.eval(one).scale(c(0.0, -1.0));
    let y = g.lambda_times_derivative().eval(one).scale(c(-0.5, 0.0));
    Ok((theta, x, y))
}

/// Read the rigid motion ρ_t = ((p, q, r), e^{iθ_t}) off the monodromy
/// derivatives: X(1) = ½((*, −q+ip), (−q−ip, *)), Y(1) = ½((−ir, *), (*, ir)).
pub fn rho_from_monodromy(m: &Monodromy, t: f64) -> Result<Isometry> {
    let (theta, x, y) = monodromy_xy(m, t)?;
    let p = 2.0 * x.m[0][1].im;
    let q = -2.0 * x.m[0][1].re;
    let r = (c(0.0, 2.0) * y.m[0][0]).re;
    Ok(Isometry::new(Nil3Point::new(p, q, r), theta))
}

/// Helicoidal invariants (ℓ, α, 𝔠) of the normalized family a = 1, c = 2
/// as functions of the remaining modulus b.
pub fn helicoidal_params(b: C64) -> Result<(f64, C64, f64)> {
    if (b + c(1.0, 0.0)).norm() <= DELTA_CLASS {
        return Err(Error::PoleAtMinusOne);
    }
    let ell_sq = 3.0 - 2.0 * b.re - b.norm_sqr();
    let ell = ell_sq.max(0.0).sqrt();
    if ell <= DELTA_CLASS || ell >= 2.0 - DELTA_CLASS {
        return Err(Error::DegenerateEll { ell });
    }
    let num = c(-6.0, 0.0) + b.conj() + b * (3.0 + 2.0 * b.re) + c(4.0 * ell, 0.0);
    let alpha = c(0.0, 2.0 + ell) * num
        / (c(ell_sq, 0.0) * (c(1.0, 0.0) + b) * (4.0 - ell_sq).sqrt());
    let pitch = -2.0 * catenoid_residual(b) / (ell_sq * ell_sq);
    Ok((ell, alpha, pitch))
}

/// Value of the pitch numerator 3Re b − (Re b)² − |b|²Re b − |b|².
pub fn catenoid_residual(b: C64) -> f64 {
    let x = b.re;
    let n = b.norm_sqr();
    3.0 * x - x * x - n * x - n
}

/// Whether the pitch of the normalized helicoidal family vanishes at b
/// (the generated surface is a catenoid-type surface of revolution).
pub fn catenoid_check(b: C64) -> bool {
    catenoid_residual(b).abs() <= CATENOID_TOL
}

/// Closed-form translation-invariant surface of the boosted family at
/// modulus p (q = 0): position in exponential coordinates and the
/// conformal half-density e^{u/2}.
pub fn translation_oracle(p: f64, z: C64) -> (Nil3Point, f64) {
    let (x, y) = (z.re, z.im);
    let (ch2p, sh2p) = ((2.0 * p).cosh(), (2.0 * p).sinh());
    let (ch4y, sh4y) = ((4.0 * y).cosh(), (4.0 * y).sinh());
    let f = Nil3Point::new(
        4.0 * x * ch2p + ch4y * sh2p,
        sh4y,
        -2.0 * y * sh2p + 2.0 * x * ch2p * sh4y,
    );
    (f, 2.0 * ch2p * ch4y)
}

/// Residuals of the three closing conditions at period τ.
#[derive(Debug, Clone, Copy)]
pub struct ClosingDiagnostics {
    /// min(‖M_τ(1) − id‖, ‖M_τ(1) + id‖).
    pub m_residual: f64,
    /// ‖off-diagonal part of X(1)‖.
    pub x_residual: f64,
    /// ‖diagonal part of Y(1)‖.
    pub y_residual: f64,
}

impl ClosingDiagnostics {
    pub fn passed(&self) -> bool {
        self.m_residual <= CLOSING_TOL
            && self.x_residual <= CLOSING_TOL
            && self.y_residual <= CLOSING_TOL
    }
}

/// Closing test at period τ: M_τ(1) = ±id, X(1) purely diagonal, Y(1)
/// purely off-diagonal.
pub fn closing_check(m: &Monodromy, tau: f64) -> Result<(bool, ClosingDiagnostics)> {
    let mt = m.m_at(tau)?;
    let m1 = mt.eval(c(1.0, 0.0));
    let id = Mat2::identity();
    let m_residual = (m1 - id).norm().min((m1 + id).norm());
    let (_, x, y) = monodromy_xy(m, tau)?;
    let d = ClosingDiagnostics {
        m_residual,
        x_residual: x.offdiag_part().norm(),
        y_residual: y.diag_part().norm(),
    };
    Ok((d.passed(), d))
}

/// Per-condition residuals of the dressed-symmetry test.
#[derive(Debug, Clone, Copy)]
pub struct Mono2Diagnostics {
    /// Plus-loop membership residual of b₊ (cell Ω: of ω₀⁻¹b₊ω₀).
    pub plus_residual: f64,
    /// Reality residual of L·b₊⁻¹ (cell Ω: of L·b₊).
    pub reality_residual: f64,
    /// Worst plus-membership residual of B₊ = C⁻¹b₊C over the samples.
    pub conjugation_residual: f64,
    /// Eigenvalue unimodularity deviation of L·b₊∓¹ at λ = 1.
    pub eigenvalue_deviation: f64,
}

impl Mono2Diagnostics {
    pub fn passed(&self) -> bool {
        self.plus_residual <= MONO2_TOL
            && self.reality_residual <= MONO2_TOL
            && self.conjugation_residual <= MONO2_TOL
            && self.eigenvalue_deviation <= MONO2_TOL
    }
}

/// Residual of membership in the plus loop group: mass of the
/// negative-degree coefficients relative to the constant term.
pub fn plus_membership_residual(g: &TwistedLoop) -> f64 {
    let scale = g.coeff(0).norm().max(1.0);
    let mut worst = 0.0f64;
    for k in 1..=g.order() as i64 {
        worst = worst.max(g.coeff(-k).norm());
    }
    worst / scale
}

/// Deviation of the eigenvalues of a unimodular 2×2 matrix from the unit
/// circle.
fn eigen_unimodular_deviation(m: &Mat2) -> f64 {
    let tr = m.trace();
    let disc = (tr * tr - m.det() * 4.0).sqrt();
    let e1 = (tr + disc) * 0.5;
    let e2 = (tr - disc) * 0.5;
    (e1.norm() - 1.0).abs().max((e2.norm() - 1.0).abs())
}

/// Dressed-symmetry predicate: whether the pair (L, b₊) acts as a symmetry
/// of the surface built from the frames C (sampled along the relevant set),
/// in the given cell.
///
/// Conditions: (a) b₊ is a plus loop (conjugated by ω₀ in the second cell);
/// (b) L·b₊⁻¹ (cell E) or L·b₊ (cell Ω) lies in the real form; (c) at every
/// sample, B₊ = C⁻¹b₊C is again a plus loop; (d) the λ = 1 value of the loop
/// in (b) has unimodular eigenvalues.
pub fn mono2_predicate(
    l: &TwistedLoop,
    b_plus: &TwistedLoop,
    c_samples: &[TwistedLoop],
    cell: Cell,
) -> Result<(bool, Mono2Diagnostics)> {
    let (plus_side, real_side) = match cell {
        Cell::E => (b_plus.clone(), l.mul(&b_plus.inv()?)?),
        Cell::Omega => {
            let w = TwistedLoop::omega0(b_plus.order());
            // ω₀⁻¹ = −ω₀ and the sign cancels in the conjugation.
            (w.mul(b_plus)?.mul(&w)?.scale(c(-1.0, 0.0)), l.mul(b_plus)?)
        }
        Cell::Boundary => return Err(Error::BoundaryCell { b11_abs: 0.0 }),
    };
    let mut conjugation_residual = 0.0f64;
    for cs in c_samples {
        let b_conj = cs.inv()?.mul(b_plus)?.mul(cs)?;
        conjugation_residual = conjugation_residual.max(plus_membership_residual(&b_conj));
    }
    let d = Mono2Diagnostics {
        plus_residual: plus_membership_residual(&plus_side),
        reality_residual: real_side.reality_residual_su11(),
        conjugation_residual,
        eigenvalue_deviation: eigen_unimodular_deviation(&real_side.eval(c(1.0, 0.0))),
    };
    Ok((d.passed(), d))
}

/// Symmetry report of a degree-one potential.
#[derive(Debug, Clone)]
pub struct EquivariantReport {
    pub class: SurfaceClass,
    /// ℓ = √det D(1) (0 for translation / non-symmetric classes).
    pub ell: f64,
    /// Helicoidal axis point (translation direction for the translation
    /// class).
    pub alpha: C64,
    /// Vertical pitch 𝔠.
    pub pitch: f64,
    pub catenoid: bool,
}

impl EquivariantReport {
    /// The one-parameter symmetry group evaluated at t (None for the
    /// non-symmetric classes).
    pub fn rho_at(&self, t: f64) -> Option<Isometry> {
        match self.class {
            SurfaceClass::Translation => Some(translation_motion(self.alpha, 0.0, t)),
            SurfaceClass::Helicoidal | SurfaceClass::HorizontalPlaneFamily => {
                Some(helicoidal_motion(self.pitch, self.alpha, 2.0 * self.ell * t))
            }
            SurfaceClass::NonSymmetric(_) => None,
        }
    }
}

/// Assemble the symmetry report.  The helicoidal invariants are only
/// defined for the normalized family a = 1, c = 2; other helicoidal inputs
/// are rejected.
pub fn report(p: &DegreeOnePotential) -> Result<EquivariantReport> {
    let class = classify(p);
    match class {
        SurfaceClass::Translation => Ok(EquivariantReport {
            class,
            ell: 0.0,
            alpha: p.a * 4.0,
            pitch: 0.0,
            catenoid: false,
        }),
        SurfaceClass::Helicoidal | SurfaceClass::HorizontalPlaneFamily => {
            if (p.a - c(1.0, 0.0)).norm() > DELTA_CLASS || (p.c - 2.0).abs() > DELTA_CLASS {
                return Err(Error::Config(format!(
                    "helicoidal invariants require the normalized family a = 1, c = 2 (got a = {}, c = {})",
                    p.a, p.c
                )));
            }
            let (ell, alpha, pitch) = helicoidal_params(p.b).or_else(|e| match e {
                // b = 0 hits the same formulas without the pole guard.
                Error::PoleAtMinusOne => Err(e),
                other => Err(other),
            })?;
            Ok(EquivariantReport {
                class,
                ell,
                alpha,
                pitch,
                catenoid: catenoid_check(p.b),
            })
        }
        SurfaceClass::NonSymmetric(_) => Ok(EquivariantReport {
            class,
            ell: 0.0,
            alpha: c(0.0, 0.0),
            pitch: 0.0,
            catenoid: false,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::synth;
    use crate::nil3::{iso_compose, Nil3Point};

    fn pot(a: f64, b: f64, cd: f64) -> DegreeOnePotential {
        DegreeOnePotential::new(c(a, 0.0), c(b, 0.0), cd).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&pot(1.0, -1.0, 0.0)), SurfaceClass::Translation);
        assert_eq!(
            classify(&pot(1.0, 0.0, 2.0)),
            SurfaceClass::HorizontalPlaneFamily
        );
        assert_eq!(
            classify(&pot(1.0, 2.0, 2.0)),
            SurfaceClass::NonSymmetric(NonSymmetricKind::DetNegative)
        );
        let heli = DegreeOnePotential::new(c(1.0, 0.0), c(0.2, 0.3), 2.0).unwrap();
        assert_eq!(classify(&heli), SurfaceClass::Helicoidal);
        // det D(1) = 0 with D(1) ≠ 0: a = 1, b = 1, c = 2 gives det = 4 − 4.
        assert_eq!(
            classify(&pot(1.0, 1.0, 2.0)),
            SurfaceClass::NonSymmetric(NonSymmetricKind::DetZero)
        );
    }

    #[test]
    fn diagonalizer_normalized_plane_family() {
        let p = pot(1.0, 0.0, 2.0);
        let s = diagonalizer(&p, 16).unwrap();
        assert!(s.reality_residual_su11() < 1e-12);
        assert!(s.twist_residual() < 1e-15);
        // S·D·S⁻¹(1) = diag(i√3, −i√3).
        let one = c(1.0, 0.0);
        let sd = s.eval(one) * p.matrix_at(one) * s.inv().unwrap().eval(one);
        let ell = 3.0f64.sqrt();
        assert!((sd - Mat2::diag(c(0.0, ell), c(0.0, -ell))).norm() < 1e-12);
        // σ₃-orthonormality of the eigenvector columns of S⁻¹(1).
        let e = s.inv().unwrap().eval(one);
        let form = e.dagger() * Mat2::sigma3() * e;
        assert!((form - Mat2::sigma3()).norm() < 1e-12);
    }

    #[test]
    fn diagonalizer_rejects_nonpositive_det() {
        let p = pot(1.0, -1.0, 0.0);
        assert!(matches!(
            diagonalizer(&p, 8),
            Err(Error::NullEigenvector { .. })
        ));
    }

    #[test]
    fn monodromy_one_parameter_group() {
        let p = DegreeOnePotential::new(c(1.0, 0.0), c(0.2, 0.3), 2.0).unwrap();
        let s = diagonalizer(&p, 32).unwrap();
        let m = Monodromy::new(&s, p).unwrap();
        let m0 = m.m_at(0.0).unwrap();
        assert!(m0.distance(&TwistedLoop::identity(32)) < 1e-12);
        let (s_t, t_t) = (0.4, 0.7);
        let lhs = m.m_at(s_t).unwrap().mul(&m.m_at(t_t).unwrap()).unwrap();
        let rhs = m.m_at(s_t + t_t).unwrap();
        assert!(lhs.distance(&rhs) < 1e-10);
        assert!(m.m_at(1.3).unwrap().reality_residual_su11() < 1e-9);
    }

    #[test]
    fn monodromy_xy_at_zero_is_trivial() {
        let p = pot(1.0, 0.0, 2.0);
        let s = diagonalizer(&p, 24).unwrap();
        let m = Monodromy::new(&s, p).unwrap();
        let (theta, x, y) = monodromy_xy(&m, 0.0).unwrap();
        assert!(theta.abs() < 1e-14);
        assert!(x.norm() < 1e-12 && y.norm() < 1e-12);
    }

    #[test]
    fn translation_monodromy_direction() {
        // S = id, a = 1: ρ_t = ((4t, 0, 0), angle 0).
        let p = pot(1.0, -1.0, 0.0);
        let m = Monodromy::new(&TwistedLoop::identity(24), p).unwrap();
        let t = 0.37;
        let (theta, x, _) = monodromy_xy(&m, t).unwrap();
        assert!(theta.abs() < 1e-12);
        assert!((x.m[0][1] - c(0.0, 2.0 * t)).norm() < 1e-11);
        let rho = rho_from_monodromy(&m, t).unwrap();
        assert!(rho.dist(&Isometry::new(Nil3Point::new(4.0 * t, 0.0, 0.0), 0.0)) < 1e-10);
    }

    #[test]
    fn helicoidal_params_examples() {
        let (ell, alpha, pitch) = helicoidal_params(c(0.0, 0.0)).unwrap();
        assert!((ell - 3.0f64.sqrt()).abs() < 1e-15);
        assert!(pitch.abs() < 1e-15);
        assert!((alpha - c(0.0, 2.0 * 3.0f64.sqrt() / 3.0)).norm() < 1e-12);
        assert!((alpha.im - 1.1547).abs() < 1e-4);
        assert!(matches!(
            helicoidal_params(c(-1.0, 0.0)),
            Err(Error::PoleAtMinusOne)
        ));
        assert!(matches!(
            helicoidal_params(c(1.0, 0.0)),
            Err(Error::DegenerateEll { .. })
        ));
    }

    #[test]
    fn helicoidal_monodromy_matches_closed_form() {
        let b = c(0.2, 0.3);
        let p = DegreeOnePotential::new(c(1.0, 0.0), b, 2.0).unwrap();
        let (ell, alpha, pitch) = helicoidal_params(b).unwrap();
        let s = diagonalizer(&p, 32).unwrap();
        let m = Monodromy::new(&s, p).unwrap();
        for &t in &[0.1, 0.5, 1.0] {
            let (theta, x, _) = monodromy_xy(&m, t).unwrap();
            let mut dth = theta - 2.0 * ell * t;
            dth -= (dth / std::f64::consts::TAU).round() * std::f64::consts::TAU;
            assert!(dth.abs() < 1e-10, "angle off by {dth:.3e} at t = {t}");
            // (1,2)-entry of X_t = (i/2)α(1 − e^{2iℓt}).
            let expect = c(0.0, 0.5) * alpha * (c(1.0, 0.0) - C64::from_polar(1.0, 2.0 * ell * t));
            assert!(
                (x.m[0][1] - expect).norm() < 1e-9,
                "X12 off by {:.3e} at t = {t}",
                (x.m[0][1] - expect).norm()
            );
            let rho = rho_from_monodromy(&m, t).unwrap();
            let closed = helicoidal_motion(pitch, alpha, 2.0 * ell * t);
            assert!(
                rho.dist(&closed) < 1e-9,
                "rho off by {:.3e} at t = {t}",
                rho.dist(&closed)
            );
        }
        // One-parameter-group property of the extracted motions.
        let r1 = rho_from_monodromy(&m, 0.4).unwrap();
        let r2 = rho_from_monodromy(&m, 0.7).unwrap();
        let r12 = rho_from_monodromy(&m, 1.1).unwrap();
        assert!(iso_compose(&r1, &r2).dist(&r12) < 1e-9);
    }

    #[test]
    fn catenoid_examples() {
        assert!(catenoid_check(c(0.0, 0.0)));
        assert!(catenoid_check(c(1.0, 0.0)));
        // Exact root at Re b = 0.5: y = √(7/12).
        let y_star = (7.0f64 / 12.0).sqrt();
        assert!(catenoid_check(c(0.5, y_star)));
        assert!((y_star - 0.7638).abs() < 1e-4);
        assert!(catenoid_residual(c(0.5, 0.7638)).abs() < 1e-3);
        assert!(!catenoid_check(c(0.2, 0.3)));
        // 𝔠 vanishes exactly at the root.
        let (_, _, pitch) = helicoidal_params(c(0.5, y_star)).unwrap();
        assert!(pitch.abs() < 1e-14);
    }

    #[test]
    fn translation_oracle_examples() {
        let (f, eu) = translation_oracle(0.0, c(0.0, 0.0));
        assert!(f.dist_max(&Nil3Point::origin()) < 1e-15 && (eu - 2.0).abs() < 1e-15);
        let (f, _) = translation_oracle(0.0, c(0.25, 0.1));
        let s4 = (0.4f64).sinh();
        assert!(f.dist_max(&Nil3Point::new(1.0, s4, 0.5 * s4)) < 1e-15);
        let (f, eu) = translation_oracle(0.3, c(0.0, 0.0));
        assert!(f.dist_max(&Nil3Point::new((0.6f64).sinh(), 0.0, 0.0)) < 1e-15);
        assert!((eu - 2.0 * (0.6f64).cosh()).abs() < 1e-15);
    }

    #[test]
    fn closing_identity_and_helicoidal() {
        // Constant-identity monodromy closes trivially.
        let p = pot(1.0, -1.0, 0.0);
        let m = Monodromy::new(&TwistedLoop::identity(24), p).unwrap();
        let (ok, d) = closing_check(&m, 0.0).unwrap();
        assert!(ok, "{d:?}");
        // Helicoidal with α ≠ 0 at τ = π/ℓ: M_τ(1) = −id but the motion does
        // not close.
        let b = c(0.2, 0.3);
        let hp = DegreeOnePotential::new(c(1.0, 0.0), b, 2.0).unwrap();
        let (ell, _, _) = helicoidal_params(b).unwrap();
        let s = diagonalizer(&hp, 32).unwrap();
        let m = Monodromy::new(&s, hp).unwrap();
        let (ok, d) = closing_check(&m, std::f64::consts::PI / ell).unwrap();
        assert!(d.m_residual < 1e-9, "M residual {:.3e}", d.m_residual);
        assert!(!ok, "helicoidal axis motion should not close: {d:?}");
    }

    #[test]
    fn mono2_cases() {
        // True case: L = M_t elliptic, b₊ = id.
        let b = c(0.2, 0.3);
        let p = DegreeOnePotential::new(c(1.0, 0.0), b, 2.0).unwrap();
        let s = diagonalizer(&p, 24).unwrap();
        let m = Monodromy::new(&s, p).unwrap();
        let l = m.m_at(0.3).unwrap();
        let id = TwistedLoop::identity(24);
        let samples: Vec<TwistedLoop> = [c(0.1, 0.0), c(0.2, 0.1)]
            .iter()
            .map(|&z| exp_degree_one(&p, z, 24).unwrap())
            .collect();
        let (ok, d) = mono2_predicate(&l, &id, &samples, Cell::E).unwrap();
        assert!(ok, "{d:?}");
        // False at reality: random loop outside the real form.
        let mut rng = synth::Rng(7);
        let bad = synth::random_twisted_loop(3, 24, 0.4, 0.5, &mut rng);
        let (ok, d) = mono2_predicate(&bad, &id, &samples, Cell::E).unwrap();
        assert!(!ok && d.reality_residual > MONO2_TOL, "{d:?}");
        // False at plus membership: b₊ with a negative-degree term.
        let mut not_plus = TwistedLoop::identity(24);
        let mut pert = Mat2::zero();
        pert.m[0][1] = c(0.05, 0.0);
        not_plus.set_coeff(-1, pert);
        let (ok, d) = mono2_predicate(&l, &not_plus, &samples, Cell::E).unwrap();
        assert!(!ok && d.plus_residual > MONO2_TOL, "{d:?}");
    }

    #[test]
    fn report_translation_and_helicoidal() {
        let r = report(&pot(1.0, -1.0, 0.0)).unwrap();
        assert_eq!(r.class, SurfaceClass::Translation);
        let rho = r.rho_at(0.5).unwrap();
        assert!(rho.dist(&Isometry::new(Nil3Point::new(2.0, 0.0, 0.0), 0.0)) < 1e-14);
        let b = c(0.2, 0.3);
        let hp = DegreeOnePotential::new(c(1.0, 0.0), b, 2.0).unwrap();
        let r = report(&hp).unwrap();
        assert_eq!(r.class, SurfaceClass::Helicoidal);
        assert!(!r.catenoid);
        let (ell, alpha, pitch) = helicoidal_params(b).unwrap();
        assert!((r.ell - ell).abs() < 1e-15);
        assert!((r.alpha - alpha).norm() < 1e-15);
        assert!((r.pitch - pitch).abs() < 1e-15);
        // rho_at is the closed-form helicoidal motion.
        let rho = r.rho_at(0.2).unwrap();
        assert!(rho.dist(&helicoidal_motion(pitch, alpha, 2.0 * ell * 0.2)) < 1e-14);
        // Non-symmetric classes expose no motion.
        let r = report(&pot(1.0, 2.0, 2.0)).unwrap();
        assert!(r.rho_at(0.3).is_none());
    }
}
