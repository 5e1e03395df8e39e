//! Acceptance suite: ten end-to-end criteria covering surface
//! reproduction, spinor and curvature checks, equivariance, the
//! factorization property suite, group-algebra exactness, and the
//! closing-condition logic.  Each criterion prints a single pass/fail
//! line; the test fails if any criterion fails.
//!
//! The whole suite runs on a single rayon thread so the reported
//! runtimes are single-threaded.

use std::time::Instant;

use nilweier_core::dpw::{
    align_rigid, boost_dressing, dirac_residual, frame_grid, mean_curvature_l3_at,
    mean_curvature_nil3_at, sqrt_i, surface_samples, sym_frame, sym_l3, sym_nil, FrameGrid,
    GridSpec, Potential, SurfaceSample,
};
use nilweier_core::equivariant::{
    catenoid_check, catenoid_residual, closing_check, diagonalizer, helicoidal_params,
    rho_from_monodromy, translation_oracle, Monodromy,
};
use nilweier_core::factorization::{birkhoff, iwasawa_su11, phi, synth, Cell};
use nilweier_core::mat2::c;
use nilweier_core::nil3::{
    compose_from_axis, decompose_isometry, helicoidal_motion, iso_apply, iso_compose,
    killing_fields, nil_mul, Isometry, Nil3Point,
};
use nilweier_core::potentials::DegreeOnePotential;
use nilweier_core::{Mat2, Result, TwistedLoop, C64};

const ORDER: usize = 32;

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(name: &'static str, r: Result<(bool, String)>) -> Outcome {
    match r {
        Ok((pass, detail)) => Outcome { name, pass, detail },
        Err(e) => Outcome {
            name,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

fn translation_potential() -> DegreeOnePotential {
    DegreeOnePotential::new(c(1.0, 0.0), c(-1.0, 0.0), 0.0).unwrap()
}

fn helicoidal_potential() -> DegreeOnePotential {
    DegreeOnePotential::new(c(1.0, 0.0), c(0.2, 0.3), 2.0).unwrap()
}

/// Nil₃ positions of every factorizable grid point (None on boundary
/// points), without going through the spinor extraction.
fn positions(grid: &FrameGrid) -> Result<Vec<Option<Nil3Point>>> {
    grid.points
        .iter()
        .map(|pt| {
            pt.iw
                .as_ref()
                .map(|iw| sym_nil(&sym_frame(iw)?))
                .transpose()
        })
        .collect()
}

/// Pipeline evaluator z ↦ f(z) ∈ Nil₃ for a dressed degree-one potential.
fn nil_eval<'a>(
    eta: &'a Potential,
    s: &TwistedLoop,
    c0: &TwistedLoop,
) -> impl Fn(C64) -> Result<Nil3Point> + 'a {
    let s = s.clone();
    let c0 = c0.clone();
    move |z: C64| {
        let cz = nilweier_core::dpw::integrate(eta, &[c(0.0, 0.0), z], &c0)?;
        let iw = iwasawa_su11(&s.mul(&cz)?)?;
        sym_nil(&sym_frame(&iw)?)
    }
}

// ---------------------------------------------------------------- 1 & 2 & 3

struct TranslationRun {
    samples_p0: Vec<SurfaceSample>,
    samples_p3: Vec<SurfaceSample>,
}

/// Criterion 1: the boosted translation family reproduces the closed-form
/// surface after rigid alignment, with the closed-form conformal factor.
fn criterion1() -> Result<(bool, String, TranslationRun)> {
    let spec = GridSpec::new(-0.25, 0.25, -0.25, 0.25, 41, 41)?;
    let eta = Potential::DegreeOne(translation_potential());
    let c0 = TwistedLoop::identity(ORDER);
    let mut pass = true;
    let mut detail = String::new();
    let mut runs: Vec<Vec<SurfaceSample>> = Vec::new();
    for &p in &[0.0, 0.3] {
        let start = Instant::now();
        let s = boost_dressing(p, 0.0, ORDER);
        let grid = frame_grid(&eta, &spec, &s, &c0)?;
        let maybe = surface_samples(&grid, &eta)?;
        let secs = start.elapsed().as_secs_f64();
        if maybe.iter().any(Option::is_none) {
            return Ok((
                false,
                format!("p={p}: grid hit the Iwasawa boundary"),
                TranslationRun {
                    samples_p0: Vec::new(),
                    samples_p3: Vec::new(),
                },
            ));
        }
        let samples: Vec<SurfaceSample> = maybe.into_iter().map(Option::unwrap).collect();
        let ours: Vec<Nil3Point> = samples.iter().map(|s| s.f).collect();
        let oracle: Vec<Nil3Point> =
            samples.iter().map(|s| translation_oracle(p, s.z).0).collect();
        let (_, vertex_err) = align_rigid(&ours, &oracle, spec.index(20, 20));
        let mut eu_err = 0.0f64;
        for s in &samples {
            let expect = 2.0 * (2.0 * p).cosh() * (4.0 * s.z.im).cosh();
            eu_err = eu_err.max((s.e_u.sqrt() - expect).abs() / expect);
        }
        pass = pass && vertex_err <= 1e-6 && eu_err <= 1e-8 && secs <= 60.0;
        detail.push_str(&format!(
            "p={p}: vertex {vertex_err:.2e}, e^(u/2) rel {eu_err:.2e}, {secs:.1}s; "
        ));
        runs.push(samples);
    }
    let samples_p3 = runs.pop().unwrap();
    let samples_p0 = runs.pop().unwrap();
    Ok((
        pass,
        detail,
        TranslationRun {
            samples_p0,
            samples_p3,
        },
    ))
}

/// Criterion 2: the p = 0 spinors match √i·cosh2y and i√i·sinh2y up to one
/// common unimodular constant.
fn criterion2(run: &TranslationRun) -> Result<(bool, String)> {
    if run.samples_p0.is_empty() {
        return Ok((false, "no samples from criterion 1".into()));
    }
    let oracle = |y: f64| -> (C64, C64) {
        (
            sqrt_i() * (2.0 * y).cosh(),
            c(0.0, 1.0) * sqrt_i() * (2.0 * y).sinh(),
        )
    };
    // Best common constant in the least-squares sense, projected to the
    // unit circle.
    let mut acc = c(0.0, 0.0);
    for s in &run.samples_p0 {
        let (o1, o2) = oracle(s.z.im);
        acc += s.psi1 * o1.conj() + s.psi2 * o2.conj();
    }
    let u = acc / acc.norm();
    let mut err = 0.0f64;
    for s in &run.samples_p0 {
        let (o1, o2) = oracle(s.z.im);
        err = err.max((s.psi1 - u * o1).norm()).max((s.psi2 - u * o2).norm());
    }
    Ok((
        err <= 1e-8,
        format!("max spinor deviation {err:.2e} (constant arg {:.3})", u.arg()),
    ))
}

/// Criterion 3: on 50 random samples of the boosted run, the Sym normal is
/// a unit timelike vector and the Minkowski mean curvature is 1/2.
fn criterion3(run: &TranslationRun) -> Result<(bool, String)> {
    if run.samples_p3.is_empty() {
        return Ok((false, "no samples from criterion 1".into()));
    }
    let mut rng = synth::Rng(314159);
    let eta = Potential::DegreeOne(translation_potential());
    let s = boost_dressing(0.3, 0.0, ORDER);
    let c0 = TwistedLoop::identity(ORDER);
    let l3_eval = |z: C64| -> Result<[f64; 3]> {
        let cz = nilweier_core::dpw::integrate(&eta, &[c(0.0, 0.0), z], &c0)?;
        let iw = iwasawa_su11(&s.mul(&cz)?)?;
        let (fl3, _) = sym_l3(&sym_frame(&iw)?)?;
        Ok(nilweier_core::dpw::su11_coords(&fl3))
    };
    let mut norm_err = 0.0f64;
    let mut h_err = 0.0f64;
    for _ in 0..50 {
        let idx = (rng.next_u64() % run.samples_p3.len() as u64) as usize;
        let sample = &run.samples_p3[idx];
        let n = nilweier_core::dpw::su11_coords(&sample.n);
        norm_err = norm_err.max((nilweier_core::dpw::lorentz(&n, &n) + 1.0).abs());
        let h = mean_curvature_l3_at(&l3_eval, &n, sample.z, 1e-3)?;
        h_err = h_err.max((h - 0.5).abs());
    }
    Ok((
        norm_err <= 1e-10 && h_err <= 1e-3,
        format!("max |<N,N>+1| {norm_err:.2e}, max |H-1/2| {h_err:.2e}"),
    ))
}

// -------------------------------------------------------------------- 4 & 5

/// Criterion 4: the Nil₃ mean curvature vanishes to second order in the
/// stencil spacing for both the translation and the helicoidal family.
fn criterion4() -> Result<(bool, String)> {
    let c0 = TwistedLoop::identity(ORDER);
    let mut pass = true;
    let mut detail = String::new();
    let trans_eta = Potential::DegreeOne(translation_potential());
    let trans_s = TwistedLoop::identity(ORDER);
    let heli = helicoidal_potential();
    let heli_s = diagonalizer(&heli, ORDER)?;
    let heli_eta = Potential::DegreeOne(heli);
    let cases: [(&str, &Potential, &TwistedLoop, C64); 2] = [
        ("translation", &trans_eta, &trans_s, c(0.05, 0.08)),
        ("helicoidal", &heli_eta, &heli_s, c(0.06, 0.04)),
    ];
    for (name, eta, s, z0) in cases {
        let eval = nil_eval(eta, s, &c0);
        let mut res = Vec::new();
        for &step in &[2e-3, 1e-3] {
            res.push(mean_curvature_nil3_at(&eval, z0, step)?.abs());
        }
        let ratio = res[0] / res[1];
        // When both residuals sit at the roundoff floor the stencil
        // truncation term is unresolvable and no convergence order can be
        // observed (the translation surface is exact to ~1e-11 at every
        // spacing); otherwise demand the order-2 ratio.
        let floor = res[0].max(res[1]) <= 1e-9;
        let ok = res[1] <= 5e-5 && (floor || (ratio - 4.0).abs() <= 0.5);
        pass = pass && ok;
        detail.push_str(&format!(
            "{name}: |H| {:.2e} @1e-3, {}; ",
            res[1],
            if floor {
                "at roundoff floor".to_string()
            } else {
                format!("ratio {ratio:.2}")
            }
        ));
    }
    Ok((pass, detail))
}

/// Criterion 5: the nonlinear Dirac residual of the extracted spinors
/// converges at second order on spacings 2e-3 and 1e-3.
fn criterion5() -> Result<(bool, String)> {
    let eta = Potential::DegreeOne(translation_potential());
    let s = TwistedLoop::identity(ORDER);
    let c0 = TwistedLoop::identity(ORDER);
    let mut residuals = Vec::new();
    for &step in &[2e-3, 1e-3] {
        let spec = GridSpec::new(
            0.05 - 2.0 * step,
            0.05 + 2.0 * step,
            0.03 - 2.0 * step,
            0.03 + 2.0 * step,
            5,
            5,
        )?;
        let grid = frame_grid(&eta, &spec, &s, &c0)?;
        let samples = surface_samples(&grid, &eta)?;
        let psi1: Vec<C64> = samples.iter().map(|s| s.as_ref().unwrap().psi1).collect();
        let psi2: Vec<C64> = samples.iter().map(|s| s.as_ref().unwrap().psi2).collect();
        let h: Vec<f64> = samples.iter().map(|s| s.as_ref().unwrap().h).collect();
        residuals.push(dirac_residual(&psi1, &psi2, &h, 5, 5, step, step));
    }
    let ratio = residuals[0] / residuals[1];
    let order = ratio.log2();
    let pass = residuals[1] <= 1e-5 && (order - 2.0).abs() <= 0.35;
    Ok((
        pass,
        format!(
            "residuals {:.2e} / {:.2e}, measured order {order:.2}",
            residuals[0], residuals[1]
        ),
    ))
}

// ------------------------------------------------------------------------ 6

/// Criterion 6: the helicoidal surface satisfies f(z+t) = ρ_t·f(z) with the
/// closed-form motion, which itself matches the monodromy extraction.
fn criterion6() -> Result<(bool, String)> {
    let b = c(0.2, 0.3);
    let p = helicoidal_potential();
    let (ell, alpha, pitch) = helicoidal_params(b)?;
    let s = diagonalizer(&p, ORDER)?;
    let m = Monodromy::new(&s, p.clone())?;
    // Closed form vs monodromy extraction.
    let mut mono_err = 0.0f64;
    for &t in &[0.1, 0.5] {
        let rho = rho_from_monodromy(&m, t)?;
        let closed = helicoidal_motion(pitch, alpha, 2.0 * ell * t);
        mono_err = mono_err.max(rho.dist(&closed));
    }
    // Surface equivariance on a grid whose x-spacing divides both shifts.
    let spec = GridSpec::new(-0.25, 0.35, -0.1, 0.1, 13, 5)?;
    let c0 = TwistedLoop::identity(ORDER);
    let grid = frame_grid(&Potential::DegreeOne(p), &spec, &s, &c0)?;
    let pos = positions(&grid)?;
    let mut surf_err = 0.0f64;
    let mut pairs = 0usize;
    for shift in [2usize, 10] {
        let t = shift as f64 * spec.hx();
        let rho = helicoidal_motion(pitch, alpha, 2.0 * ell * t);
        for iy in 0..spec.ny {
            for ix in 0..spec.nx - shift {
                if let (Some(f0), Some(f1)) = (
                    pos[spec.index(ix, iy)],
                    pos[spec.index(ix + shift, iy)],
                ) {
                    surf_err = surf_err.max(iso_apply(&rho, &f0).dist_max(&f1));
                    pairs += 1;
                }
            }
        }
    }
    let pass = mono_err <= 1e-9 && surf_err <= 1e-6 && pairs > 0;
    Ok((
        pass,
        format!("monodromy vs closed form {mono_err:.2e}, surface {surf_err:.2e} ({pairs} pairs)"),
    ))
}

// ------------------------------------------------------------------------ 7

/// Criterion 7: root-finding the catenoid condition on the line Re b = 1/2
/// gives a modulus with vanishing pitch.
fn criterion7() -> Result<(bool, String)> {
    let g = |y: f64| catenoid_residual(c(0.5, y));
    let (mut lo, mut hi) = (0.0f64, 2.0f64);
    if g(lo) <= 0.0 || g(hi) >= 0.0 {
        return Ok((false, "bracket does not straddle the root".into()));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y_star = 0.5 * (lo + hi);
    let b = c(0.5, y_star);
    let (_, _, pitch) = helicoidal_params(b)?;
    let exact = (7.0f64 / 12.0).sqrt();
    let pass = pitch.abs() <= 1e-8 && catenoid_check(b) && (y_star - exact).abs() <= 1e-11;
    Ok((
        pass,
        format!(
            "y* = {y_star:.12} (closed form off by {:.2e}), |pitch| {:.2e}",
            (y_star - exact).abs(),
            pitch.abs()
        ),
    ))
}

// ------------------------------------------------------------------------ 8

/// Criterion 8: factorization property suite on synthesized loops with
/// coefficient content 16 stored at truncation order 32.
fn criterion8() -> Result<(bool, String)> {
    let mut rng = synth::Rng(2024);
    // Iwasawa recovery of synthesized F·V₊ products.
    let mut iw_err = 0.0f64;
    let mut rec_err = 0.0f64;
    // The real-form factor is an exponential, so its effective content
    // spreads beyond the algebra content; content 8 + 16 keeps the product
    // content at 16 with margin 16 inside the truncation order 32.
    for _ in 0..200 {
        let f = synth::random_su11_loop(8, 32, 0.15, 0.35, &mut rng);
        let vp = synth::random_plus_loop(16, 32, 0.2, 0.4, true, &mut rng);
        let c_loop = f.mul(&vp)?;
        let iw = iwasawa_su11(&c_loop)?;
        if iw.cell != Cell::E {
            return Ok((false, "synthesized big-cell product left the big cell".into()));
        }
        iw_err = iw_err.max(iw.f.distance(&f));
        rec_err = rec_err.max(iw.f.mul(&iw.vplus)?.distance(&c_loop));
    }
    // Birkhoff round trip.
    let mut bk_err = 0.0f64;
    for _ in 0..200 {
        let minus = synth::random_minus_loop(16, 32, 0.15, 0.45, &mut rng);
        let d = 0.6 + 0.8 * rng.unit().abs();
        let middle = Mat2::diag(c(d, 0.0), c(1.0 / d, 0.0));
        let plus = synth::random_plus_loop(16, 32, 0.15, 0.45, false, &mut rng);
        let x = minus
            .mul(&TwistedLoop::constant(middle, 32))?
            .mul(&plus)?;
        let bk = birkhoff(&x)?;
        let rec = bk
            .minus
            .mul(&TwistedLoop::constant(bk.middle, 32))?
            .mul(&bk.plus)?;
        bk_err = bk_err.max(rec.distance(&x));
    }
    // φ-involution on loops inside and outside the real form (the latter
    // as invertible perturbations of the identity, so the involution's
    // loop inverse stays within the truncation order).
    let mut phi_err = 0.0f64;
    for k in 0..200 {
        let g = if k % 2 == 0 {
            synth::random_su11_loop(4, 16, 0.2, 0.4, &mut rng)
        } else {
            TwistedLoop::identity(24).add(&synth::random_twisted_loop(4, 24, 0.1, 0.4, &mut rng))
        };
        phi_err = phi_err.max(phi(&phi(&g)?)?.distance(&g));
    }
    // Twist parity under products.
    let mut twist_err = 0.0f64;
    for _ in 0..1000 {
        let a = synth::random_twisted_loop(4, 8, 0.4, 0.5, &mut rng);
        let b = synth::random_twisted_loop(4, 8, 0.4, 0.5, &mut rng);
        twist_err = twist_err.max(a.mul(&b)?.twist_residual());
    }
    let pass = iw_err <= 1e-8 && rec_err <= 1e-9 && bk_err <= 1e-9
        && phi_err <= 1e-12 && twist_err <= 1e-12;
    Ok((
        pass,
        format!(
            "iwasawa {iw_err:.2e}/{rec_err:.2e}, birkhoff {bk_err:.2e}, \
             phi {phi_err:.2e}, twist {twist_err:.2e}"
        ),
    ))
}

// ------------------------------------------------------------------------ 9

/// Affine vector field v(x) = A·x + b on ℝ³; all the symmetry generators
/// of Nil₃ are of this form with exact dyadic entries, so brackets can be
/// computed and compared exactly.
#[derive(Clone, Copy, PartialEq, Debug)]
struct Affine {
    a: [[f64; 3]; 3],
    b: [f64; 3],
}

impl Affine {
    fn from_field(f: &dyn Fn(&Nil3Point) -> [f64; 3]) -> Affine {
        let b = f(&Nil3Point::origin());
        let mut a = [[0.0; 3]; 3];
        for j in 0..3 {
            let e = Nil3Point::new(
                (j == 0) as u8 as f64,
                (j == 1) as u8 as f64,
                (j == 2) as u8 as f64,
            );
            let v = f(&e);
            for i in 0..3 {
                a[i][j] = v[i] - b[i];
            }
        }
        Affine { a, b }
    }

    fn neg(&self) -> Affine {
        let mut out = *self;
        for i in 0..3 {
            out.b[i] = -out.b[i];
            for j in 0..3 {
                out.a[i][j] = -out.a[i][j];
            }
        }
        out
    }
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn mat_vec(a: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        for k in 0..3 {
            out[i] += a[i][k] * v[k];
        }
    }
    out
}

/// Vector-field bracket [X,Y] of two affine fields (exact on the affine
/// data): matrix part A_Y A_X − A_X A_Y, constant part A_Y b_X − A_X b_Y.
fn vf_bracket(x: &Affine, y: &Affine) -> Affine {
    let mut a = mat_mul(&y.a, &x.a);
    let sub = mat_mul(&x.a, &y.a);
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] -= sub[i][j];
        }
    }
    let mut b = mat_vec(&y.a, &x.b);
    let sub = mat_vec(&x.a, &y.b);
    for i in 0..3 {
        b[i] -= sub[i];
    }
    Affine { a, b }
}

/// Criterion 9: exact group algebra — associativity, the action
/// homomorphism, the helicoidal one-parameter law, the axis-decomposition
/// round trip, and the symmetry-algebra commutators.
fn criterion9() -> Result<(bool, String)> {
    let mut rng = synth::Rng(7);
    let pt = |rng: &mut synth::Rng| {
        Nil3Point::new(2.0 * rng.unit(), 2.0 * rng.unit(), 2.0 * rng.unit())
    };
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let (a, b, cc) = (pt(&mut rng), pt(&mut rng), pt(&mut rng));
        worst = worst.max(
            nil_mul(&nil_mul(&a, &b), &cc).dist_max(&nil_mul(&a, &nil_mul(&b, &cc))),
        );
        let rho = Isometry::new(pt(&mut rng), std::f64::consts::PI * rng.unit());
        let sig = Isometry::new(pt(&mut rng), std::f64::consts::PI * rng.unit());
        worst = worst.max(
            iso_apply(&iso_compose(&rho, &sig), &a)
                .dist_max(&iso_apply(&rho, &iso_apply(&sig, &a))),
        );
        let pitch = rng.unit();
        let alpha = rng.c64();
        let (s_t, t_t) = (2.0 * rng.unit(), 2.0 * rng.unit());
        worst = worst.max(
            helicoidal_motion(pitch, alpha, s_t + t_t).dist(&iso_compose(
                &helicoidal_motion(pitch, alpha, s_t),
                &helicoidal_motion(pitch, alpha, t_t),
            )),
        );
        // Round trip of the axis decomposition; keep the angle away from
        // the degenerate rotation-free case.
        let u = rng.unit();
        let theta = u.signum() * (0.2 + 0.75 * u.abs()) * std::f64::consts::PI;
        let rho = Isometry::new(pt(&mut rng), theta);
        let (pitch, alpha, q) = decompose_isometry(&rho)?;
        worst = worst.max(compose_from_axis(pitch, alpha, q).dist(&rho));
    }
    // Commutators of the symmetry generators, exactly on the affine
    // component data.  The translational generators are the derivatives of
    // left multiplication, v_a(x) = d/dt|₀ (ta)·x = a·x − x (exact, since
    // the product is affine in the left factor); the rotation generator is
    // the fourth field of `killing_fields`.  The algebra of the symmetry
    // group carries the opposite of the vector-field bracket (the standard
    // anti-isomorphism for a group acting on the left).
    let gen_t = |a: Nil3Point| -> Affine {
        Affine::from_field(&move |x: &Nil3Point| {
            let m = nil_mul(&a, x);
            [m.x1 - x.x1, m.x2 - x.x2, m.x3 - x.x3]
        })
    };
    let f1 = gen_t(Nil3Point::new(1.0, 0.0, 0.0));
    let f2 = gen_t(Nil3Point::new(0.0, 1.0, 0.0));
    let f3 = gen_t(Nil3Point::new(0.0, 0.0, 1.0));
    let f4 = Affine::from_field(&|x: &Nil3Point| killing_fields(x)[3]);
    let g_bracket = |x: &Affine, y: &Affine| vf_bracket(x, y).neg();
    let commutators_ok = g_bracket(&f4, &f1) == f2
        && g_bracket(&f4, &f2) == f1.neg()
        && g_bracket(&f1, &f2) == f3;
    Ok((
        worst <= 1e-12 && commutators_ok,
        format!("max group residual {worst:.2e}, commutators exact: {commutators_ok}"),
    ))
}

// ----------------------------------------------------------------------- 10

/// Criterion 10: with the boosted initial condition Ŝ = B₀·S the monodromy
/// closes at λ = 1 for t₀ = 2π/ℓ and the surface is symmetric under
/// (z ↦ z + t₀, ρ) with ρ = ((p,q,r), 1) read off X̂/Ŷ; the unboosted
/// helicoidal with nonzero pitch fails the closing check.
fn criterion10() -> Result<(bool, String)> {
    let b = c(0.2, 0.3);
    let p = helicoidal_potential();
    let (ell, _, _) = helicoidal_params(b)?;
    let t0 = 2.0 * std::f64::consts::PI / ell;
    let s = diagonalizer(&p, ORDER)?;
    let b0 = boost_dressing(0.4, 0.7, ORDER);
    let s_hat = b0.mul(&s)?;
    let m_hat = Monodromy::new(&s_hat, p.clone())?;
    let (_, diag) = closing_check(&m_hat, t0)?;
    let rho = rho_from_monodromy(&m_hat, t0)?;
    let mut theta_res = rho.theta % std::f64::consts::TAU;
    if theta_res > std::f64::consts::PI {
        theta_res -= std::f64::consts::TAU;
    }
    // The extracted ρ must actually map f(z) to f(z + t₀) on a sampled
    // patch (grid spacing chosen so t₀ is exactly eight columns).
    let spec = GridSpec::new(-t0 / 2.0, t0 / 2.0, -0.05, 0.05, 9, 3)?;
    let c0 = TwistedLoop::identity(ORDER);
    let grid = frame_grid(&Potential::DegreeOne(p.clone()), &spec, &s_hat, &c0)?;
    let pos = positions(&grid)?;
    let mut surf_err = 0.0f64;
    let mut pairs = 0usize;
    for iy in 0..spec.ny {
        if let (Some(f0), Some(f1)) = (pos[spec.index(0, iy)], pos[spec.index(8, iy)]) {
            surf_err = surf_err.max(iso_apply(&rho, &f0).dist_max(&f1));
            pairs += 1;
        }
    }
    // Control: the plain diagonalizer initial condition has 𝔠 ≠ 0, so the
    // vertical part of Ŷ stays away from zero and the check must fail.
    let m_plain = Monodromy::new(&s, p)?;
    let (ok_control, diag_control) = closing_check(&m_plain, t0)?;
    let pass = diag.m_residual <= 1e-8
        && theta_res.abs() <= 1e-8
        && surf_err <= 1e-6
        && pairs > 0
        && !ok_control
        && diag_control.m_residual <= 1e-8;
    Ok((
        pass,
        format!(
            "M residual {:.2e}, theta {theta_res:.2e}, rho=(({:.4},{:.4},{:.4}),1), \
             surface {surf_err:.2e} ({pairs} pairs), control fails: {}",
            diag.m_residual,
            rho.t.x1,
            rho.t.x2,
            rho.t.x3,
            !ok_control
        ),
    ))
}

// --------------------------------------------------------------------------

#[test]
fn acceptance() {
    // Single-threaded so criterion 1's runtime bound is meaningful.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(1).build_global();

    let mut outcomes = Vec::new();
    let run = match criterion1() {
        Ok((pass, detail, run)) => {
            outcomes.push(Outcome { name: "translation reproduction", pass, detail });
            Some(run)
        }
        Err(e) => {
            outcomes.push(Outcome {
                name: "translation reproduction",
                pass: false,
                detail: format!("error: {e}"),
            });
            None
        }
    };
    match &run {
        Some(run) => {
            outcomes.push(outcome("spinor closed form", criterion2(run)));
            outcomes.push(outcome("Minkowski Sym check", criterion3(run)));
        }
        None => {
            for name in ["spinor closed form", "Minkowski Sym check"] {
                outcomes.push(Outcome {
                    name,
                    pass: false,
                    detail: "skipped: criterion 1 errored".into(),
                });
            }
        }
    }
    outcomes.push(outcome("Nil3 minimality", criterion4()));
    outcomes.push(outcome("Dirac residual order", criterion5()));
    outcomes.push(outcome("helicoidal equivariance", criterion6()));
    outcomes.push(outcome("catenoid pitch", criterion7()));
    outcomes.push(outcome("factorization suite", criterion8()));
    outcomes.push(outcome("group-algebra exactness", criterion9()));
    outcomes.push(outcome("closing-condition logic", criterion10()));

    let mut all_pass = true;
    for (i, o) in outcomes.iter().enumerate() {
        println!(
            "criterion {:2} ({}): {} — {}",
            i + 1,
            o.name,
            if o.pass { "pass" } else { "FAIL" },
            o.detail
        );
        all_pass = all_pass && o.pass;
    }
    assert!(all_pass, "one or more acceptance criteria failed");
}
