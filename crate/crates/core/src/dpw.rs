//! The generation pipeline: integrate dC = Cη, factorize on a sampling
//! grid, apply the Sym formulas into Minkowski 3-space and Nil₃, and
//! recover spinors and induced geometric data from frames.
//!
//! Spinor-level data (ψ₁, ψ₂, support h, conformal factor e^u, Dirac
//! potential) is expressed with respect to the reference conformal
//! coordinate ζ = 2iz.  In that coordinate the frame construction and the
//! spinor formalism share one normalization: the λ⁻¹ upper-right entry of
//! the (1,0)-part of the frame's Maurer–Cartan form equals −e^{w/2} with
//! e^{w/2} = (i/4)h, so the support is recovered exactly (no finite
//! differences in λ or z).  Geometry expressed in Nil₃ itself (vertex
//! positions, mean curvature, metric lengths) is coordinate-free and is
//! always computed from the z-parametrization directly.

use crate::error::{Error, Result};
use crate::factorization::{iwasawa_su11, Cell, IwasawaResult};
use crate::loop_core::{exp_degree_one, TwistedLoop};
use crate::mat2::{c, Mat2, C64};
use crate::nil3::{iso_apply, left_translate_tangent, nil_mul, Isometry, Nil3Point};
use crate::potentials::{DegreeOnePotential, GeneralPotential};
use rayon::prelude::*;

/// Relative local tolerance of the adaptive integrator.
pub const RK_TOL: f64 = 1e-10;
/// Smallest admissible integration step before reporting underflow.
pub const MIN_STEP: f64 = 1e-12;
/// Reality residual allowed for frames on the grid.
pub const FRAME_REALITY_TOL: f64 = 1e-8;
/// Reality residual required of the initial dressing.
pub const DRESSING_REALITY_TOL: f64 = 1e-12;
/// Support threshold below which a sample counts as vertical.
pub const VERTICAL_TOL: f64 = 1e-10;

/// The principal square root of i used in the spinor normalization.
pub fn sqrt_i() -> C64 {
    C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)
}

/// A holomorphic potential as consumed by the pipeline.
#[derive(Debug, Clone)]
pub enum Potential {
    /// Constant degree-one potential D dz (integrated exactly).
    DegreeOne(DegreeOnePotential),
    /// General loop-valued potential η(z) dz (integrated by adaptive RK4).
    General(GeneralPotential),
}

impl Potential {
    /// Evaluate the dz-coefficient at z as a loop of at least `order`.
    pub fn eval_at(&self, z: C64, order: usize) -> TwistedLoop {
        match self {
            Potential::DegreeOne(d) => d.degree_one_matrix(order),
            Potential::General(g) => {
                let raw = g.eval_at(z);
                if raw.order() >= order {
                    raw
                } else {
                    raw.with_order(order).0
                }
            }
        }
    }

    /// λ⁻¹ coefficient of the potential at z (drives the spinor scale).
    pub fn minus_one_coeff(&self, z: C64, order: usize) -> Mat2 {
        self.eval_at(z, order).coeff(-1)
    }
}

/// One classical Runge–Kutta step for dC = C·η along dz.
fn rk4_step(eta: &Potential, cstate: &TwistedLoop, z: C64, dz: C64) -> Result<TwistedLoop> {
    let order = cstate.order();
    let half = dz.scale(0.5);
    let slope = |state: &TwistedLoop, at: C64, step: C64| -> Result<TwistedLoop> {
        Ok(state.mul(&eta.eval_at(at, order))?.scale(step))
    };
    let k1 = slope(cstate, z, dz)?;
    let k2 = slope(&cstate.add(&k1.scale(c(0.5, 0.0))), z + half, dz)?;
    let k3 = slope(&cstate.add(&k2.scale(c(0.5, 0.0))), z + half, dz)?;
    let k4 = slope(&cstate.add(&k3), z + dz, dz)?;
    let incr = k1
        .add(&k2.scale(c(2.0, 0.0)))
        .add(&k3.scale(c(2.0, 0.0)))
        .add(&k4)
        .scale(c(1.0 / 6.0, 0.0));
    Ok(cstate.add(&incr))
}

/// Integrate dC = C·η along a polyline with C = `c0` at the first vertex.
///
/// Constant degree-one potentials use the exact exponential; everything
/// else goes through classical 4th-order stepping with step doubling and
/// relative tolerance [`RK_TOL`].
pub fn integrate(eta: &Potential, path: &[C64], c0: &TwistedLoop) -> Result<TwistedLoop> {
    assert!(!path.is_empty(), "integration path must have a vertex");
    if let Potential::DegreeOne(d) = eta {
        let dz = path[path.len() - 1] - path[0];
        if dz.norm() == 0.0 {
            return Ok(c0.clone());
        }
        return c0.mul(&exp_degree_one(d, dz, c0.order())?);
    }
    let mut state = c0.clone();
    for seg in path.windows(2) {
        let (za, zb) = (seg[0], seg[1]);
        let total = zb - za;
        let len = total.norm();
        if len == 0.0 {
            continue;
        }
        let dir = total / len;
        let mut t = 0.0f64;
        let mut h = len;
        while t < len {
            h = h.min(len - t);
            if h < MIN_STEP {
                let z = za + dir.scale(t);
                return Err(Error::StepUnderflow { z_re: z.re, z_im: z.im });
            }
            let z = za + dir.scale(t);
            let dz = dir.scale(h);
            let full = rk4_step(eta, &state, z, dz)?;
            let half = dz.scale(0.5);
            let mid = rk4_step(eta, &state, z, half)?;
            let fine = rk4_step(eta, &mid, z + half, half)?;
            let err = full.distance(&fine) / 15.0;
            let scale = fine.frobenius_mass().max(1.0);
            let rel = err / scale;
            if rel <= RK_TOL {
                state = fine;
                t += h;
                let grow = if rel > 0.0 {
                    0.9 * (RK_TOL / rel).powf(0.2)
                } else {
                    2.0
                };
                h *= grow.clamp(1.0, 2.0);
            } else {
                h *= (0.9 * (RK_TOL / rel).powf(0.2)).clamp(0.1, 0.9);
            }
        }
    }
    Ok(state)
}

/// Rectangular sampling grid in the z-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(x_min < x_max && y_min < y_max) || nx < 2 || ny < 2 {
            return Err(Error::Config(format!(
                "grid must have nonempty ranges and nx, ny >= 2 (got x [{x_min}, {x_max}], y [{y_min}, {y_max}], {nx}x{ny})"
            )));
        }
        Ok(Self { x_min, x_max, y_min, y_max, nx, ny })
    }

    pub fn hx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    /// Grid point (ix, iy) as a complex number.
    pub fn z_at(&self, ix: usize, iy: usize) -> C64 {
        c(self.x_min + self.hx() * ix as f64, self.y_min + self.hy() * iy as f64)
    }

    /// Row-major index of (ix, iy).
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One factorized grid point; `iw` is None where the Iwasawa decomposition
/// degenerates (boundary between the two cells, or an ill-conditioned
/// splitting right next to it).
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub z: C64,
    pub iw: Option<IwasawaResult>,
}

impl GridPoint {
    pub fn cell(&self) -> Cell {
        self.iw.as_ref().map_or(Cell::Boundary, |iw| iw.cell)
    }
}

/// Frames of a surface patch: per-point Iwasawa data plus the dressing and
/// basepoint normalization that produced them.
#[derive(Debug, Clone)]
pub struct FrameGrid {
    pub spec: GridSpec,
    /// Initial dressing S applied on the left of C(z).
    pub s: TwistedLoop,
    /// Value of C at the basepoint z₀ = 0.
    pub c0: TwistedLoop,
    /// Row-major grid points.
    pub points: Vec<GridPoint>,
}

impl FrameGrid {
    pub fn point(&self, ix: usize, iy: usize) -> &GridPoint {
        &self.points[self.spec.index(ix, iy)]
    }
}

/// Build the frame grid: continue C(z) from the basepoint z₀ = 0 down the
/// first column and then row-by-row (rows in parallel), and factorize
/// S·C(z) at every grid point.
pub fn frame_grid(
    eta: &Potential,
    spec: &GridSpec,
    s: &TwistedLoop,
    c0: &TwistedLoop,
) -> Result<FrameGrid> {
    let s_res = s.reality_residual_su11();
    if s_res > DRESSING_REALITY_TOL {
        return Err(Error::Numeric {
            op: "frame_grid",
            message: format!("dressing reality residual {s_res:.3e} exceeds {DRESSING_REALITY_TOL:.1e}"),
        });
    }
    // Serial continuation along the first column, starting from z₀ = 0.
    let mut col = Vec::with_capacity(spec.ny);
    let mut prev = integrate(eta, &[c(0.0, 0.0), spec.z_at(0, 0)], c0)?;
    col.push(prev.clone());
    for iy in 1..spec.ny {
        prev = integrate(eta, &[spec.z_at(0, iy - 1), spec.z_at(0, iy)], &prev)?;
        col.push(prev.clone());
    }
    // Each row continues from its column anchor; rows are independent.
    let rows: Vec<Result<Vec<GridPoint>>> = (0..spec.ny)
        .into_par_iter()
        .map(|iy| {
            let mut row = Vec::with_capacity(spec.nx);
            let mut cz = col[iy].clone();
            for ix in 0..spec.nx {
                let z = spec.z_at(ix, iy);
                if ix > 0 {
                    cz = integrate(eta, &[spec.z_at(ix - 1, iy), z], &cz)?;
                }
                let sc = s.mul(&cz)?;
                let iw = match iwasawa_su11(&sc) {
                    Ok(iw) => {
                        let res = iw.f.reality_residual_su11();
                        if res > FRAME_REALITY_TOL {
                            return Err(Error::Numeric {
                                op: "frame_grid",
                                message: format!(
                                    "frame reality residual {res:.3e} at z = {}+{}i",
                                    z.re, z.im
                                ),
                            });
                        }
                        Some(iw)
                    }
                    Err(Error::BoundaryCell { .. }) | Err(Error::OutsideBigCell { .. }) => None,
                    Err(e) => return Err(e),
                };
                row.push(GridPoint { z, iw });
            }
            Ok(row)
        })
        .collect();
    let mut points = Vec::with_capacity(spec.len());
    for row in rows {
        points.extend(row?);
    }
    Ok(FrameGrid { spec: *spec, s: s.clone(), c0: c0.clone(), points })
}

/// The loop handed to the Sym formulas: F itself in the big cell, F̃·ω₀ in
/// the second cell.
pub fn sym_frame(iw: &IwasawaResult) -> Result<TwistedLoop> {
    match iw.cell {
        Cell::E => Ok(iw.f.clone()),
        Cell::Omega => iw.f.mul(&TwistedLoop::omega0(iw.f.order())),
        Cell::Boundary => Err(Error::BoundaryCell { b11_abs: 0.0 }),
    }
}

/// `sym_frame` with an explicit caller-side cell tag that must agree with
/// the factorization's own tag.
pub fn sym_frame_tagged(iw: &IwasawaResult, claimed: Cell) -> Result<TwistedLoop> {
    if claimed != iw.cell {
        return Err(Error::CellMismatch { claimed: claimed.name(), actual: iw.cell.name() });
    }
    sym_frame(iw)
}

/// The λ-family f_L3(λ) = −iλ(∂_λF)F⁻¹ − (i/2)·F σ₃ F⁻¹ as a loop
/// (λ-derivatives taken exactly on coefficients).
pub fn sym_l3_loop(frame: &TwistedLoop) -> Result<TwistedLoop> {
    let fi = frame.inv()?;
    let a = frame.lambda_times_derivative().mul(&fi)?;
    let sigma = TwistedLoop::constant(Mat2::sigma3(), frame.order());
    let ad = frame.mul(&sigma)?.mul(&fi)?;
    Ok(a.scale(c(0.0, -1.0)).add(&ad.scale(c(0.0, -0.5))))
}

/// Sym formula in Minkowski 3-space: (f_L3, N) at λ = 1.
pub fn sym_l3(frame: &TwistedLoop) -> Result<(Mat2, Mat2)> {
    let one = c(1.0, 0.0);
    let fl3 = sym_l3_loop(frame)?.eval(one);
    let f1 = frame.eval(one);
    let n = (f1 * Mat2::sigma3() * f1.inv()).scale(c(0.0, 0.5));
    Ok((fl3, n))
}

/// Coordinates of an su(1,1) element in the orthogonal basis
/// 𝓔₁ = ½((0,i),(−i,0)), 𝓔₂ = ½((0,−1),(−1,0)), 𝓔₃ = ½((−i,0),(0,i)).
pub fn su11_coords(m: &Mat2) -> [f64; 3] {
    [2.0 * m.m[0][1].im, -2.0 * m.m[0][1].re, -2.0 * m.m[0][0].im]
}

/// Lorentz inner product ⟨X,Y⟩ = 2 tr(XY), normalized so that
/// ‖𝓔₁‖ = ‖𝓔₂‖ = 1 and ‖𝓔₃‖² = −1; in coordinates u₁v₁ + u₂v₂ − u₃v₃.
pub fn lorentz(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] - u[2] * v[2]
}

/// Sym formula into Nil₃: f̂ = (f_L3)ᵒ − (i/2)·λ∂_λ(f_L3)ᵈ at λ = 1, read
/// in the 𝓔-basis and mapped to exponential coordinates.
pub fn sym_nil(frame: &TwistedLoop) -> Result<Nil3Point> {
    let fl3 = sym_l3_loop(frame)?;
    let one = c(1.0, 0.0);
    let off = fl3.eval(one).offdiag_part();
    let diag = fl3
        .lambda_times_derivative()
        .eval(one)
        .diag_part()
        .scale(c(0.0, -0.5));
    let m = off + diag;
    let x = su11_coords(&m);
    Ok(Nil3Point::new(x[0], x[1], x[2]))
}

/// `sym_nil` guarded by an explicit caller-side cell tag.
pub fn sym_nil_tagged(iw: &IwasawaResult, claimed: Cell) -> Result<Nil3Point> {
    let frame = sym_frame_tagged(iw, claimed)?;
    sym_nil(&frame)
}

/// Spinors and support recovered from one factorized point.
///
/// The λ⁻¹ coefficient of the frame's (1,0) Maurer–Cartan form is
/// W₀·η₋₁·W₀⁻¹ with W₀ the constant diagonal term of V₊, exactly; in the
/// reference coordinate its upper-right entry equals −e^{w/2} = −(i/4)h,
/// which gives h = 2·(η₋₁)₁₂·d₁/d₂.  The spinors then come from the
/// frame value at λ = 1.
pub fn spinors_from_iwasawa(
    iw: &IwasawaResult,
    eta_minus_one: &Mat2,
    z: C64,
) -> Result<(C64, C64, f64)> {
    let w0 = iw.vplus.coeff(0);
    let d1 = w0.m[0][0];
    let d2 = w0.m[1][1];
    if d1.norm() == 0.0 || d2.norm() == 0.0 {
        return Err(Error::Numeric {
            op: "spinors_from_frame",
            message: "degenerate leading diagonal of the positive factor".into(),
        });
    }
    let hc = eta_minus_one.m[0][1] * d1 / d2 * 2.0;
    if hc.im.abs() > 1e-6 * hc.norm().max(1.0) {
        return Err(Error::Numeric {
            op: "spinors_from_frame",
            message: format!("support not real: {hc}"),
        });
    }
    let h = hc.re;
    if h.abs() <= VERTICAL_TOL {
        return Err(Error::VerticalPoint { h, z_re: z.re, z_im: z.im });
    }
    let frame = sym_frame(iw)?;
    let u1 = frame.eval(c(1.0, 0.0));
    let scale = sqrt_i() * c(h / 2.0, 0.0).sqrt();
    Ok((u1.m[0][0] * scale, u1.m[0][1] * scale, h))
}

/// Per-sample geometric data of a generated surface.
#[derive(Debug, Clone)]
pub struct SurfaceSample {
    pub z: C64,
    /// Position in Nil₃ (exponential coordinates).
    pub f: Nil3Point,
    /// Sym image in Minkowski 3-space at λ = 1 (σ₃-anti-Hermitian).
    pub f_l3: Mat2,
    /// Unit normal of the Minkowski surface.
    pub n: Mat2,
    pub psi1: C64,
    pub psi2: C64,
    /// Conformal factor e^u = 4(|ψ₁|² + |ψ₂|²)².
    pub e_u: f64,
    /// Support function h = 2(|ψ₁|² − |ψ₂|²).
    pub h: f64,
    /// Normal Gauss map g = ψ₂/ψ̄₁ (|g| < 1 on upward-normal samples).
    pub g: C64,
    /// Dirac potential (i/4)h of the minimal-surface system.
    pub u_dirac: C64,
    /// Hopf differential coefficient (needs neighbors; None on the rim).
    pub a_hopf: Option<C64>,
    /// Abresch-Rosenberg coefficient (needs neighbors; None on the rim).
    pub b_coef: Option<C64>,
    pub cell: Cell,
}

/// Pointwise spinor-derived quantities.
///
/// `dpsi1` is ∂ψ₁ and `dpsi2_bar` is ∂ψ̄₂, both with respect to the
/// reference coordinate; A = 2(ψ₁∂ψ̄₂ − ψ̄₂∂ψ₁) + 4iψ₁²ψ̄₂² and the
/// Abresch-Rosenberg coefficient for minimal surfaces is
/// B = (i/4)(A + φ₃²/i) with φ₃ = 2ψ₁ψ̄₂.
pub fn surface_quantities(
    psi1: C64,
    psi2: C64,
    dpsi1: C64,
    dpsi2_bar: C64,
) -> (f64, f64, C64, C64, C64, C64) {
    let n1 = psi1.norm_sqr();
    let n2 = psi2.norm_sqr();
    let e_u = 4.0 * (n1 + n2) * (n1 + n2);
    let h = 2.0 * (n1 - n2);
    let g = psi2 / psi1.conj();
    let u_dirac = c(0.0, 0.25) * h;
    let p2b = psi2.conj();
    let a = (psi1 * dpsi2_bar - p2b * dpsi1) * 2.0 + c(0.0, 4.0) * psi1 * psi1 * p2b * p2b;
    let phi3 = psi1 * p2b * 2.0;
    let b = c(0.0, 0.25) * (a + phi3 * phi3 / c(0.0, 1.0));
    (e_u, h, g, u_dirac, a, b)
}

/// Evaluate the full sample set of a frame grid.  Boundary points yield
/// None; rim points carry None in the differential fields.
pub fn surface_samples(grid: &FrameGrid, eta: &Potential) -> Result<Vec<Option<SurfaceSample>>> {
    let order = grid.points[0]
        .iw
        .as_ref()
        .map_or(grid.c0.order(), |iw| iw.f.order());
    // First pass: everything pointwise.
    let base: Vec<Result<Option<SurfaceSample>>> = grid
        .points
        .par_iter()
        .map(|pt| {
            let iw = match &pt.iw {
                Some(iw) => iw,
                None => return Ok(None),
            };
            let frame = sym_frame(iw)?;
            let f = sym_nil(&frame)?;
            let (f_l3, n) = sym_l3(&frame)?;
            let eta_m1 = eta.minus_one_coeff(pt.z, order);
            let (psi1, psi2, _) = spinors_from_iwasawa(iw, &eta_m1, pt.z)?;
            let (e_u, h, g, u_dirac, _, _) =
                surface_quantities(psi1, psi2, c(0.0, 0.0), c(0.0, 0.0));
            Ok(Some(SurfaceSample {
                z: pt.z,
                f,
                f_l3,
                n,
                psi1,
                psi2,
                e_u,
                h,
                g,
                u_dirac,
                a_hopf: None,
                b_coef: None,
                cell: iw.cell,
            }))
        })
        .collect();
    let mut samples = Vec::with_capacity(base.len());
    for s in base {
        samples.push(s?);
    }
    // Second pass: central differences for the differential quantities.
    let spec = &grid.spec;
    let mut updates = Vec::new();
    for iy in 1..spec.ny.saturating_sub(1) {
        for ix in 1..spec.nx.saturating_sub(1) {
            let idx = spec.index(ix, iy);
            let neighbors = [
                spec.index(ix + 1, iy),
                spec.index(ix - 1, iy),
                spec.index(ix, iy + 1),
                spec.index(ix, iy - 1),
            ];
            let ok = samples[idx].is_some() && neighbors.iter().all(|&k| samples[k].is_some());
            if !ok {
                continue;
            }
            let at = |k: usize| samples[k].as_ref().unwrap();
            let dz_of = |xp: C64, xm: C64, yp: C64, ym: C64| -> C64 {
                let dx = (xp - xm) / (2.0 * spec.hx());
                let dy = (yp - ym) / (2.0 * spec.hy());
                // ∂_ζ = −(i/2)·∂_z with ∂_z = ½(∂_x − i∂_y).
                c(0.0, -0.5) * (dx - c(0.0, 1.0) * dy) * 0.5
            };
            let dpsi1 = dz_of(
                at(neighbors[0]).psi1,
                at(neighbors[1]).psi1,
                at(neighbors[2]).psi1,
                at(neighbors[3]).psi1,
            );
            let dpsi2_bar = dz_of(
                at(neighbors[0]).psi2.conj(),
                at(neighbors[1]).psi2.conj(),
                at(neighbors[2]).psi2.conj(),
                at(neighbors[3]).psi2.conj(),
            );
            let s = at(idx);
            let (_, _, _, _, a, b) = surface_quantities(s.psi1, s.psi2, dpsi1, dpsi2_bar);
            updates.push((idx, a, b));
        }
    }
    for (idx, a, b) in updates {
        if let Some(s) = samples[idx].as_mut() {
            s.a_hopf = Some(a);
            s.b_coef = Some(b);
        }
    }
    Ok(samples)
}

/// Max nonlinear-Dirac residual over interior grid points:
/// |∂ψ₂ + Uψ₁| and |−∂̄ψ₁ + Vψ₂| with U = V = (i/4)h and derivatives in
/// the reference coordinate by second-order central differences.
pub fn dirac_residual(
    psi1: &[C64],
    psi2: &[C64],
    h: &[f64],
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
) -> f64 {
    assert_eq!(psi1.len(), nx * ny);
    let mut worst = 0.0f64;
    for iy in 1..ny - 1 {
        for ix in 1..nx - 1 {
            let idx = iy * nx + ix;
            let dzx = |v: &[C64]| (v[idx + 1] - v[idx - 1]) / (2.0 * hx);
            let dzy = |v: &[C64]| (v[idx + nx] - v[idx - nx]) / (2.0 * hy);
            let i1 = c(0.0, 1.0);
            // ∂_z and ∂_z̄ in the grid coordinate z = x + iy.
            let dz_psi2 = (dzx(psi2) - i1 * dzy(psi2)) * 0.5;
            let dzbar_psi1 = (dzx(psi1) + i1 * dzy(psi1)) * 0.5;
            // Reference-coordinate derivatives: ∂ = −(i/2)∂_z, ∂̄ = (i/2)∂_z̄.
            let u = c(0.0, 0.25) * h[idx];
            let r1 = c(0.0, -0.5) * dz_psi2 + u * psi1[idx];
            let r2 = -(c(0.0, 0.5) * dzbar_psi1) + u * psi2[idx];
            worst = worst.max(r1.norm()).max(r2.norm());
        }
    }
    worst
}

/// Covariant derivative coefficients of the left-invariant connection,
/// evaluated on frame components: Γ(u, v) = Σ uᵢvⱼ ∇_{Eᵢ}Eⱼ with
/// ∇_{E1}E2 = ½E3, ∇_{E2}E1 = −½E3, ∇_{E1}E3 = ∇_{E3}E1 = −½E2,
/// ∇_{E2}E3 = ∇_{E3}E2 = ½E1 and ∇_{Eᵢ}Eᵢ = 0.
fn nil_gamma(u: &[f64; 3], v: &[f64; 3]) -> [f64; 3] {
    [
        0.5 * (u[1] * v[2] + u[2] * v[1]),
        -0.5 * (u[0] * v[2] + u[2] * v[0]),
        0.5 * (u[0] * v[1] - u[1] * v[0]),
    ]
}

fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Frame components of the left-translated tangent f⁻¹f_x / f⁻¹f_y at the
/// stencil points of a 3×3 neighborhood of coordinate samples.
fn tangents_at(
    f: &impl Fn(i32, i32) -> Nil3Point,
    di: i32,
    dj: i32,
    hx: f64,
    hy: f64,
) -> ([f64; 3], [f64; 3]) {
    let p = f(di, dj);
    let fx = {
        let a = f(di + 1, dj);
        let b = f(di - 1, dj);
        [
            (a.x1 - b.x1) / (2.0 * hx),
            (a.x2 - b.x2) / (2.0 * hx),
            (a.x3 - b.x3) / (2.0 * hx),
        ]
    };
    let fy = {
        let a = f(di, dj + 1);
        let b = f(di, dj - 1);
        [
            (a.x1 - b.x1) / (2.0 * hy),
            (a.x2 - b.x2) / (2.0 * hy),
            (a.x3 - b.x3) / (2.0 * hy),
        ]
    };
    (left_translate_tangent(&p, &fx), left_translate_tangent(&p, &fy))
}

/// Mean curvature of a sampled immersion in Nil₃ at the center of a 5×5
/// coordinate stencil, via the left-invariant connection and second-order
/// central differences.
fn mean_curvature_from_stencil(
    f: &impl Fn(i32, i32) -> Nil3Point,
    hx: f64,
    hy: f64,
) -> Result<f64> {
    let (t1, t2) = tangents_at(f, 0, 0, hx, hy);
    let e_m = dot3(&t1, &t1);
    let f_m = dot3(&t1, &t2);
    let g_m = dot3(&t2, &t2);
    let gram = e_m * g_m - f_m * f_m;
    if gram <= 1e-14 {
        return Err(Error::DegenerateMetric { gram });
    }
    let n_raw = cross3(&t1, &t2);
    let n_len = dot3(&n_raw, &n_raw).sqrt();
    let n = [n_raw[0] / n_len, n_raw[1] / n_len, n_raw[2] / n_len];
    // Covariant derivatives D_x T1, D_x T2, D_y T2 at the center.
    let (t1_xp, t2_xp) = tangents_at(f, 1, 0, hx, hy);
    let (t1_xm, t2_xm) = tangents_at(f, -1, 0, hx, hy);
    let (_, t2_yp) = tangents_at(f, 0, 1, hx, hy);
    let (_, t2_ym) = tangents_at(f, 0, -1, hx, hy);
    let ddx = |p: &[f64; 3], m: &[f64; 3]| -> [f64; 3] {
        [
            (p[0] - m[0]) / (2.0 * hx),
            (p[1] - m[1]) / (2.0 * hx),
            (p[2] - m[2]) / (2.0 * hx),
        ]
    };
    let ddy = |p: &[f64; 3], m: &[f64; 3]| -> [f64; 3] {
        [
            (p[0] - m[0]) / (2.0 * hy),
            (p[1] - m[1]) / (2.0 * hy),
            (p[2] - m[2]) / (2.0 * hy),
        ]
    };
    let dx_t1 = add3(ddx(&t1_xp, &t1_xm), nil_gamma(&t1, &t1));
    let dx_t2 = add3(ddx(&t2_xp, &t2_xm), nil_gamma(&t1, &t2));
    let dy_t2 = add3(ddy(&t2_yp, &t2_ym), nil_gamma(&t2, &t2));
    let ii_e = dot3(&dx_t1, &n);
    let ii_f = dot3(&dx_t2, &n);
    let ii_g = dot3(&dy_t2, &n);
    Ok((ii_e * g_m - 2.0 * ii_f * f_m + ii_g * e_m) / (2.0 * gram))
}

/// Mean curvature in Nil₃ at z from a point evaluator (e.g. the full
/// pipeline), sampled on a 5×5 stencil of spacing `step`.
pub fn mean_curvature_nil3_at(
    f: &impl Fn(C64) -> Result<Nil3Point>,
    z: C64,
    step: f64,
) -> Result<f64> {
    let mut vals = Vec::with_capacity(25);
    for dj in -2..=2 {
        for di in -2..=2 {
            vals.push(f(z + c(step * di as f64, step * dj as f64))?);
        }
    }
    let lookup = |di: i32, dj: i32| vals[((dj + 2) * 5 + (di + 2)) as usize];
    mean_curvature_from_stencil(&lookup, step, step)
}

/// Mean curvature in Nil₃ at every interior grid point of a sampled
/// immersion (None where the 5×5 stencil leaves the grid or touches a
/// missing sample).
pub fn mean_curvature_nil3_grid(
    points: &[Option<Nil3Point>],
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
) -> Vec<Option<f64>> {
    let mut out = vec![None; points.len()];
    for iy in 2..ny.saturating_sub(2) {
        for ix in 2..nx.saturating_sub(2) {
            let mut ok = true;
            'scan: for dj in -2i32..=2 {
                for di in -2i32..=2 {
                    let k = (iy as i32 + dj) as usize * nx + (ix as i32 + di) as usize;
                    if points[k].is_none() {
                        ok = false;
                        break 'scan;
                    }
                }
            }
            if !ok {
                continue;
            }
            let lookup = |di: i32, dj: i32| {
                points[(iy as i32 + dj) as usize * nx + (ix as i32 + di) as usize].unwrap()
            };
            out[iy * nx + ix] = mean_curvature_from_stencil(&lookup, hx, hy).ok();
        }
    }
    out
}

/// Mean curvature of the Minkowski surface f_L3 at z, with the unit normal
/// supplied analytically (from the Sym formula) and second fundamental
/// form by central differences on a 3×3 stencil.
pub fn mean_curvature_l3_at(
    f: &impl Fn(C64) -> Result<[f64; 3]>,
    n: &[f64; 3],
    z: C64,
    step: f64,
) -> Result<f64> {
    let at = |di: f64, dj: f64| f(z + c(step * di, step * dj));
    let center = at(0.0, 0.0)?;
    let xp = at(1.0, 0.0)?;
    let xm = at(-1.0, 0.0)?;
    let yp = at(0.0, 1.0)?;
    let ym = at(0.0, -1.0)?;
    let pp = at(1.0, 1.0)?;
    let pm = at(1.0, -1.0)?;
    let mp = at(-1.0, 1.0)?;
    let mm = at(-1.0, -1.0)?;
    let mut fx = [0.0; 3];
    let mut fy = [0.0; 3];
    let mut fxx = [0.0; 3];
    let mut fyy = [0.0; 3];
    let mut fxy = [0.0; 3];
    for k in 0..3 {
        fx[k] = (xp[k] - xm[k]) / (2.0 * step);
        fy[k] = (yp[k] - ym[k]) / (2.0 * step);
        fxx[k] = (xp[k] - 2.0 * center[k] + xm[k]) / (step * step);
        fyy[k] = (yp[k] - 2.0 * center[k] + ym[k]) / (step * step);
        fxy[k] = (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * step * step);
    }
    let e_m = lorentz(&fx, &fx);
    let f_m = lorentz(&fx, &fy);
    let g_m = lorentz(&fy, &fy);
    let gram = e_m * g_m - f_m * f_m;
    if gram.abs() <= 1e-14 {
        return Err(Error::DegenerateMetric { gram });
    }
    let ii_e = lorentz(&fxx, n);
    let ii_f = lorentz(&fxy, n);
    let ii_g = lorentz(&fyy, n);
    Ok((ii_e * g_m - 2.0 * ii_f * f_m + ii_g * e_m) / (2.0 * gram))
}

/// The twisted boost dressing with value ((cosh p, e^{iq} sinh p),
/// (e^{−iq} sinh p, cosh p)) at λ = 1; the off-diagonal entries carry
/// λ^{±1} so the loop respects the twist, and the loop lies in ΛSU₁,₁σ.
pub fn boost_dressing(p: f64, q: f64, order: usize) -> TwistedLoop {
    let mut g = TwistedLoop::zero(order.max(1));
    let ch = c(p.cosh(), 0.0);
    let sh = p.sinh();
    g.set_coeff(0, Mat2::diag(ch, ch));
    let mut up = Mat2::zero();
    up.m[0][1] = C64::from_polar(sh, q);
    let mut dn = Mat2::zero();
    dn.m[1][0] = C64::from_polar(sh, -q);
    g.set_coeff(1, up);
    g.set_coeff(-1, dn);
    g
}

/// Fit a rigid motion ρ ∈ Iso₀(Nil₃) with oracle(z) ≈ ρ·ours(z): the
/// translation part matches the two surfaces at a reference index for each
/// candidate rotation angle, and the angle minimizes the max vertex error
/// (coarse scan plus golden-section refinement). Returns (ρ, residual).
pub fn align_rigid(ours: &[Nil3Point], oracle: &[Nil3Point], i0: usize) -> (Isometry, f64) {
    assert_eq!(ours.len(), oracle.len());
    let residual_for = |theta: f64| -> (Isometry, f64) {
        let rotated0 = iso_apply(&Isometry::rotation(theta), &ours[i0]);
        let t = nil_mul(&oracle[i0], &rotated0.inverse());
        let rho = Isometry::new(t, theta);
        let mut worst = 0.0f64;
        for (a, b) in ours.iter().zip(oracle) {
            worst = worst.max(iso_apply(&rho, a).dist_max(b));
        }
        (rho, worst)
    };
    let scan = 1024;
    let mut best_theta = 0.0;
    let mut best = f64::INFINITY;
    for k in 0..scan {
        let theta = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / scan as f64;
        let (_, r) = residual_for(theta);
        if r < best {
            best = r;
            best_theta = theta;
        }
    }
    // Golden-section refinement around the best coarse angle.
    let span = 2.0 * std::f64::consts::PI / scan as f64;
    let (mut lo, mut hi) = (best_theta - span, best_theta + span);
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if residual_for(m1).1 < residual_for(m2).1 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    residual_for(0.5 * (lo + hi))
}
