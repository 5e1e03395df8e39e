//! Birkhoff decomposition of twisted loops and the two-cell SU(1,1)
//! Iwasawa decomposition built from it.
//!
//! Birkhoff: X = minus · middle · plus with minus = id + (degrees < 0),
//! plus = id + (degrees > 0) and a constant diagonal middle, solved as a
//! block-Toeplitz linear system on the truncated coefficients.
//!
//! Iwasawa: for C with unit determinant form Q = φ(C)⁻¹C with the real-form
//! involution φ; the sign of the constant diagonal middle term of the
//! Birkhoff decomposition of Q selects the Iwasawa cell, and the SU(1,1)
//! frame F is assembled so that C = F·V₊ (cell E) or C = F·ω₀·V₊ (cell Ω).

use crate::error::{Error, Result};
use crate::loop_core::TwistedLoop;
use crate::mat2::{c, Mat2, C64};
use nalgebra::DMatrix;

/// Threshold on the block-Toeplitz condition estimate.
pub const COND_LIMIT: f64 = 1e12;
/// |B₁₁| below this is classified as the Iwasawa cell boundary.
pub const DELTA_CELL: f64 = 1e-8;
/// Allowed imaginary part of the (log of the) middle term on w = z̄.
pub const REAL_MIDDLE_TOL: f64 = 1e-8;

/// Result of the Birkhoff decomposition X = minus · middle · plus.
#[derive(Debug, Clone)]
pub struct BirkhoffFactors {
    /// Lower factor: coeff(0) = id, only degrees ≤ 0.
    pub minus: TwistedLoop,
    /// Constant diagonal middle term.
    pub middle: Mat2,
    /// Upper factor: coeff(0) = id, only degrees ≥ 0.
    pub plus: TwistedLoop,
    /// max coefficient norm of X − minus·middle·plus.
    pub residual: f64,
    /// Condition estimate of the solved block-Toeplitz system.
    pub cond: f64,
}

/// Iwasawa cell tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    /// Big cell: C = F·V₊.
    E,
    /// Second open cell: C = F·ω₀·V₊.
    Omega,
    /// Numerically on the boundary; the surface degenerates here.
    Boundary,
}

impl Cell {
    pub fn name(&self) -> &'static str {
        match self {
            Cell::E => "E",
            Cell::Omega => "OMEGA",
            Cell::Boundary => "BOUNDARY",
        }
    }
}

/// Result of the SU(1,1) Iwasawa decomposition.
#[derive(Debug, Clone)]
pub struct IwasawaResult {
    pub cell: Cell,
    /// ΛSU₁,₁σ-valued frame.
    pub f: TwistedLoop,
    /// Positive factor; its degree-0 term is diagonal with positive entries.
    pub vplus: TwistedLoop,
    /// The constant diagonal splitting datum (l in cell E, k in cell Ω).
    pub l: Mat2,
    /// Middle term of the underlying Birkhoff decomposition of φ(C)⁻¹C.
    pub middle: Mat2,
}

/// The real-form involution φ(g)(λ) = σ₃ (conj(g)(1/λ̄))^{t,−1} σ₃ on
/// truncated loops: conjugate coefficients, reindex n → −n, transpose-invert
/// pointwise on the grid, conjugate by σ₃.
pub fn phi(g: &TwistedLoop) -> Result<TwistedLoop> {
    let cr = g.conj_reindex();
    let m = TwistedLoop::product_grid_size(g.order());
    let grid = cr.sample(m).map(|v| v.transpose().inv().sigma3_conj());
    grid.to_loop(g.order(), "phi")
}

/// Birkhoff decomposition of a truncated loop via the block-Toeplitz system
/// for the inverse plus factor.
pub fn birkhoff(x: &TwistedLoop) -> Result<BirkhoffFactors> {
    let n = x.order();
    // Solve past the truncation order: the inverse plus factor is an
    // infinite series, and cutting it exactly at N perturbs the last block
    // rows by its tail. A modest pad pushes that error below the noise floor.
    let k = n + 8;
    // Solve for P = plus⁻¹ with P₀ = id and (X·P)_m = 0 for m = 1..K:
    //   Σ_{n=1..K} X_{m−n} P_n = −X_m.
    let dim = 2 * k;
    let mut t = DMatrix::<C64>::zeros(dim, dim);
    let mut rhs = DMatrix::<C64>::zeros(dim, 2);
    for mm in 1..=k {
        for nn in 1..=k {
            let block = x.coeff(mm as i64 - nn as i64);
            for i in 0..2 {
                for j in 0..2 {
                    t[(2 * (mm - 1) + i, 2 * (nn - 1) + j)] = block.m[i][j];
                }
            }
        }
        let b = x.coeff(mm as i64);
        for i in 0..2 {
            for j in 0..2 {
                rhs[(2 * (mm - 1) + i, j)] = -b.m[i][j];
            }
        }
    }
    let (sol, cond) = solve_with_cond(t, rhs)?;

    // Assemble P (plus⁻¹) and the exact convolution G = X·P.
    let mut p = TwistedLoop::zero(k);
    p.set_coeff(0, Mat2::identity());
    for nn in 1..=k {
        let mut blk = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                blk.m[i][j] = sol[(2 * (nn - 1) + i, j)];
            }
        }
        p.set_coeff(nn as i64, blk);
    }
    let g = convolve(x, &p, n as i64 + k as i64);

    // Middle = degree-0 term (diagonal by the twist), minus = G·middle⁻¹.
    let g0 = g.coeff(0);
    let middle = g0.diag_part();
    if middle.det().norm() < 1e-14 {
        return Err(Error::OutsideBigCell { cond: f64::INFINITY });
    }
    let middle_inv = middle.inv();
    let mut minus = TwistedLoop::zero(n);
    for d in -(n as i64)..=0 {
        minus.set_coeff(d, g.coeff(d) * middle_inv);
    }
    // Plus factor: invert the series P, (P⁻¹)_m = −Σ_{j=1..m} P_j (P⁻¹)_{m−j}.
    let plus = invert_plus_series(&p, n);

    // Reconstruction residual.
    let mid_loop = TwistedLoop::constant(middle, n);
    let recon = minus.mul(&mid_loop)?.mul(&plus)?;
    let residual = recon.distance(x);
    Ok(BirkhoffFactors {
        minus,
        middle,
        plus,
        residual,
        cond,
    })
}

/// SU(1,1) Iwasawa decomposition of C via the double-Birkhoff construction.
pub fn iwasawa_su11(c_loop: &TwistedLoop) -> Result<IwasawaResult> {
    let n = c_loop.order();
    // Q = φ(C)⁻¹ C; φ(C)⁻¹ = σ₃ (conj-reindexed C)ᵗ σ₃ pointwise (det = 1).
    let m = TwistedLoop::product_grid_size(n);
    let cr = c_loop.conj_reindex();
    let q_grid = cr
        .sample(m)
        .zip(&c_loop.sample(m), |a, b| a.transpose().sigma3_conj() * b);
    let q = q_grid.to_loop(n, "iwasawa_q")?;
    let bk = birkhoff(&q)?;

    let b11 = bk.middle.m[0][0];
    if b11.norm() <= DELTA_CELL {
        return Err(Error::BoundaryCell { b11_abs: b11.norm() });
    }
    if b11.im.abs() > REAL_MIDDLE_TOL * b11.norm().max(1.0) {
        return Err(Error::NonRealMiddle { im: b11.im.abs() });
    }
    let plus_inv = invert_plus_series(&bk.plus, n);
    if b11.re > DELTA_CELL {
        // Cell E: l = diag(e^{b/2}, e^{−b/2}), F = C·V₊⁻¹·l⁻¹, V₊ → l·V₊.
        let half = b11.re.sqrt();
        let l = Mat2::diag(c(half, 0.0), c(1.0 / half, 0.0));
        let f = c_loop.mul(&plus_inv)?.mul(&TwistedLoop::constant(l.inv(), n))?;
        let vplus = TwistedLoop::constant(l, n).mul(&bk.plus)?;
        Ok(IwasawaResult {
            cell: Cell::E,
            f,
            vplus,
            l,
            middle: bk.middle,
        })
    } else if b11.re < -DELTA_CELL {
        // Cell Ω: B = −B₀, k from B₀ = (φk)⁻¹k with positive entries,
        // F̃ = C·V₊⁻¹·k⁻¹·ω₀⁻¹ so that C = F̃·ω₀·(k V₊).
        let half = (-b11.re).sqrt();
        let kmat = Mat2::diag(c(half, 0.0), c(1.0 / half, 0.0));
        let omega0_inv = TwistedLoop::omega0(n).scale(c(-1.0, 0.0)); // ω₀⁻¹ = −ω₀
        let f = c_loop
            .mul(&plus_inv)?
            .mul(&TwistedLoop::constant(kmat.inv(), n))?
            .mul(&omega0_inv)?;
        let vplus = TwistedLoop::constant(kmat, n).mul(&bk.plus)?;
        Ok(IwasawaResult {
            cell: Cell::Omega,
            f,
            vplus,
            l: kmat,
            middle: bk.middle,
        })
    } else {
        Err(Error::BoundaryCell { b11_abs: b11.norm() })
    }
}

/// The cell-agnostic meromorphically extendable frame U = F·l (cell E) or
/// F̃·ω₀·k (cell Ω); in both cells this equals C·V₊⁻¹ for the leading-id
/// Birkhoff plus factor of φ(C)⁻¹C.
pub fn meromorphic_frame(iw: &IwasawaResult) -> Result<TwistedLoop> {
    let n = iw.f.order();
    match iw.cell {
        Cell::E => iw.f.mul(&TwistedLoop::constant(iw.l, n)),
        Cell::Omega => iw
            .f
            .mul(&TwistedLoop::omega0(n))?
            .mul(&TwistedLoop::constant(iw.l, n)),
        Cell::Boundary => Err(Error::BoundaryCell { b11_abs: 0.0 }),
    }
}

/// Exact coefficient convolution of two truncated loops, up to |degree| ≤ bound.
fn convolve(a: &TwistedLoop, b: &TwistedLoop, bound: i64) -> TwistedLoop {
    let na = a.order() as i64;
    let nb = b.order() as i64;
    let mut out = TwistedLoop::zero(bound as usize);
    for m in -bound..=bound {
        let mut acc = Mat2::zero();
        for j in (-nb).max(m - na)..=nb.min(m + na) {
            acc = acc + a.coeff(m - j) * b.coeff(j);
        }
        out.set_coeff(m, acc);
    }
    out
}

/// Series inverse of a plus loop with coeff(0) = id, truncated at `order`.
fn invert_plus_series(p: &TwistedLoop, order: usize) -> TwistedLoop {
    let mut inv = TwistedLoop::zero(order);
    inv.set_coeff(0, Mat2::identity());
    for m in 1..=order as i64 {
        let mut acc = Mat2::zero();
        for j in 1..=m {
            acc = acc + p.coeff(j) * inv.coeff(m - j);
        }
        inv.set_coeff(m, -acc);
    }
    inv
}

/// Least-squares solve with a column-pivoted QR and a condition estimate
/// from the diagonal of R.
fn solve_with_cond(t: DMatrix<C64>, rhs: DMatrix<C64>) -> Result<(DMatrix<C64>, f64)> {
    let qr = t.col_piv_qr();
    let r = qr.r();
    let mut dmax = 0.0f64;
    let mut dmin = f64::INFINITY;
    for i in 0..r.nrows().min(r.ncols()) {
        let d = r[(i, i)].norm();
        dmax = dmax.max(d);
        dmin = dmin.min(d);
    }
    let cond = if dmin > 0.0 { dmax / dmin } else { f64::INFINITY };
    if cond > COND_LIMIT {
        return Err(Error::OutsideBigCell { cond });
    }
    match qr.solve(&rhs) {
        Some(sol) => Ok((sol, cond)),
        None => Err(Error::OutsideBigCell { cond }),
    }
}

// ---------------------------------------------------------------------------
// Synthetic loop generators (deterministic), used by property tests and the
// verification suite to build inputs with known factorizations.
// ---------------------------------------------------------------------------
pub mod synth {
    use super::*;
    use crate::loop_core::LambdaGrid;

    /// Tiny deterministic PRNG (splitmix64) so the library stays free of
    /// external RNG dependencies.
    #[derive(Debug, Clone)]
    pub struct Rng(pub u64);

    impl Rng {
        pub fn next_u64(&mut self) -> u64 {
            self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        }

        /// Uniform in (−1, 1).
        pub fn unit(&mut self) -> f64 {
            (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        }

        pub fn c64(&mut self) -> C64 {
            C64::new(self.unit(), self.unit())
        }
    }

    /// Random twisted loop with geometrically decaying coefficients living
    /// in degrees |n| ≤ `content` but stored at truncation order `order`
    /// (the margin keeps products alias- and tail-free).
    pub fn random_twisted_loop(
        content: usize,
        order: usize,
        scale: f64,
        decay: f64,
        rng: &mut Rng,
    ) -> TwistedLoop {
        let mut g = TwistedLoop::zero(order);
        for n in -(content as i64)..=(content as i64) {
            let amp = scale * decay.powi(n.unsigned_abs() as i32);
            let mut a = Mat2::zero();
            if n.rem_euclid(2) == 0 {
                a.m[0][0] = rng.c64() * amp;
                a.m[1][1] = rng.c64() * amp;
            } else {
                a.m[0][1] = rng.c64() * amp;
                a.m[1][0] = rng.c64() * amp;
            }
            g.set_coeff(n, a);
        }
        g
    }

    /// Random twisted plus loop: coeff(0) = id (or a positive diagonal),
    /// decaying positive degrees in 1..=content, stored at order `order`.
    pub fn random_plus_loop(
        content: usize,
        order: usize,
        scale: f64,
        decay: f64,
        positive_leading: bool,
        rng: &mut Rng,
    ) -> TwistedLoop {
        let mut g = TwistedLoop::zero(order);
        let lead = if positive_leading {
            let d = 0.5 + rng.unit().abs();
            Mat2::diag(c(d, 0.0), c(1.0 / d, 0.0))
        } else {
            Mat2::identity()
        };
        g.set_coeff(0, lead);
        for n in 1..=(content as i64) {
            let amp = scale * decay.powi(n as i32);
            let mut a = Mat2::zero();
            if n % 2 == 0 {
                a.m[0][0] = rng.c64() * amp;
                a.m[1][1] = rng.c64() * amp;
            } else {
                a.m[0][1] = rng.c64() * amp;
                a.m[1][0] = rng.c64() * amp;
            }
            g.set_coeff(n, a);
        }
        g
    }

    /// Random minus loop: coeff(0) = id, decaying negative degrees only.
    pub fn random_minus_loop(
        content: usize,
        order: usize,
        scale: f64,
        decay: f64,
        rng: &mut Rng,
    ) -> TwistedLoop {
        let plus = random_plus_loop(content, order, scale, decay, false, rng);
        let mut g = TwistedLoop::zero(order);
        for n in 0..=(order as i64) {
            g.set_coeff(-n, plus.coeff(n));
        }
        g
    }

    /// Random loop in ΛSU₁,₁σ: exponential of a random twisted loop with
    /// values in the su(1,1) loop algebra (A₋ₙ = −σ₃Aₙ†σ₃, A₀ traceless
    /// imaginary diagonal). The algebra element occupies degrees |n| ≤
    /// `content`; the exponential's tail must fit inside `order`.
    pub fn random_su11_loop(
        content: usize,
        order: usize,
        scale: f64,
        decay: f64,
        rng: &mut Rng,
    ) -> TwistedLoop {
        let mut alg = TwistedLoop::zero(order);
        let x = rng.unit() * scale;
        alg.set_coeff(0, Mat2::diag(c(0.0, x), c(0.0, -x)));
        for n in 1..=(content as i64) {
            let amp = scale * decay.powi(n as i32);
            let mut a = Mat2::zero();
            if n % 2 == 0 {
                a.m[0][0] = rng.c64() * amp;
                a.m[1][1] = -a.m[0][0]; // keep it traceless
            } else {
                a.m[0][1] = rng.c64() * amp;
                a.m[1][0] = rng.c64() * amp;
            }
            alg.set_coeff(n, a);
            // Algebra reality: A₋ₙ = −σ₃ Aₙ† σ₃.
            alg.set_coeff(-n, -a.dagger().sigma3_conj());
        }
        let m = TwistedLoop::product_grid_size(order);
        alg.sample(m)
            .map(|v| crate::loop_core::exp_traceless(*v))
            .to_loop(order, "random_su11_loop")
            .expect("algebra scale small enough for the truncation order")
    }

    /// Sanity helper: pointwise determinant deviation from 1 on the grid.
    pub fn unimodularity_residual(g: &TwistedLoop) -> f64 {
        let m = TwistedLoop::product_grid_size(g.order());
        (0..m)
            .map(|k| (g.eval(LambdaGrid::lambda_at(m, k)).det() - c(1.0, 0.0)).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::synth::*;
    use super::*;

    #[test]
    fn birkhoff_identity() {
        let bk = birkhoff(&TwistedLoop::identity(6)).unwrap();
        assert!(bk.minus.distance(&TwistedLoop::identity(6)) < 1e-13);
        assert!((bk.middle - Mat2::identity()).norm() < 1e-13);
        assert!(bk.plus.distance(&TwistedLoop::identity(6)) < 1e-13);
    }

    #[test]
    fn birkhoff_already_minus() {
        // X with only nonpositive degrees and coeff(0) = id is its own minus.
        let mut rng = Rng(7);
        let x = random_minus_loop(4, 8, 0.3, 0.5, &mut rng);
        let bk = birkhoff(&x).unwrap();
        assert!(bk.minus.distance(&x) < 1e-10, "minus distance {}", bk.minus.distance(&x));
        assert!((bk.middle - Mat2::identity()).norm() < 1e-10);
        assert!(bk.plus.distance(&TwistedLoop::identity(8)) < 1e-10);
    }

    #[test]
    fn birkhoff_roundtrip_random() {
        let mut rng = Rng(42);
        for trial in 0..10 {
            let minus = random_minus_loop(4, 16, 0.2, 0.45, &mut rng);
            let d = 0.6 + 0.8 * rng.unit().abs();
            let middle = Mat2::diag(c(d, 0.0), c(1.0 / d, 0.0));
            let plus = random_plus_loop(4, 16, 0.2, 0.45, false, &mut rng);
            let x = minus
                .mul(&TwistedLoop::constant(middle, 16))
                .unwrap()
                .mul(&plus)
                .unwrap();
            let bk = birkhoff(&x).unwrap();
            assert!(bk.residual < 1e-9, "trial {trial}: residual {}", bk.residual);
            assert!(bk.minus.distance(&minus) < 1e-8, "trial {trial}");
            assert!((bk.middle - middle).norm() < 1e-8, "trial {trial}");
            assert!(bk.plus.distance(&plus) < 1e-8, "trial {trial}");
        }
    }

    #[test]
    fn phi_is_involution_and_fixes_su11() {
        let mut rng = Rng(3);
        let g = random_su11_loop(2, 16, 0.3, 0.5, &mut rng);
        assert!(g.reality_residual_su11() < 1e-10);
        let back = phi(&phi(&g).unwrap()).unwrap();
        assert!(back.distance(&g) < 1e-12);
        // φ fixes real-form loops.
        assert!(phi(&g).unwrap().distance(&g) < 1e-10);
    }

    #[test]
    fn iwasawa_identity_and_omega0() {
        let iw = iwasawa_su11(&TwistedLoop::identity(6)).unwrap();
        assert_eq!(iw.cell, Cell::E);
        assert!(iw.f.distance(&TwistedLoop::identity(6)) < 1e-12);
        assert!(iw.vplus.distance(&TwistedLoop::identity(6)) < 1e-12);

        let iw = iwasawa_su11(&TwistedLoop::omega0(6)).unwrap();
        assert_eq!(iw.cell, Cell::Omega);
        assert!(iw.f.distance(&TwistedLoop::identity(6)) < 1e-12);
        assert!(iw.vplus.distance(&TwistedLoop::identity(6)) < 1e-12);
    }

    #[test]
    fn iwasawa_recovers_synthesized_factors() {
        let mut rng = Rng(11);
        for trial in 0..10 {
            let f = random_su11_loop(2, 32, 0.3, 0.5, &mut rng);
            let vp = random_plus_loop(4, 32, 0.2, 0.4, true, &mut rng);
            let c_loop = f.mul(&vp).unwrap();
            let iw = iwasawa_su11(&c_loop).unwrap();
            assert_eq!(iw.cell, Cell::E, "trial {trial}");
            assert!(
                iw.f.distance(&f) < 1e-8,
                "trial {trial}: frame distance {}",
                iw.f.distance(&f)
            );
            assert!(iw.f.reality_residual_su11() < 1e-9, "trial {trial}");
            // Reconstruction.
            let rec = iw.f.mul(&iw.vplus).unwrap();
            assert!(rec.distance(&c_loop) < 1e-9, "trial {trial}");
        }
    }

    #[test]
    fn iwasawa_omega_cell_roundtrip() {
        // Synthesize C = F·ω₀·V₊ and check the Ω-cell branch reassembles it.
        let mut rng = Rng(23);
        let f = random_su11_loop(2, 32, 0.3, 0.5, &mut rng);
        let vp = random_plus_loop(4, 32, 0.2, 0.4, true, &mut rng);
        let c_loop = f
            .mul(&TwistedLoop::omega0(32))
            .unwrap()
            .mul(&vp)
            .unwrap();
        let iw = iwasawa_su11(&c_loop).unwrap();
        assert_eq!(iw.cell, Cell::Omega);
        assert!(iw.f.reality_residual_su11() < 1e-9);
        let rec = iw
            .f
            .mul(&TwistedLoop::omega0(16))
            .unwrap()
            .mul(&iw.vplus)
            .unwrap();
        assert!(rec.distance(&c_loop) < 1e-9);
        assert!(iw.f.distance(&f) < 1e-8);
    }

    #[test]
    fn meromorphic_frame_identity_cases() {
        let iw = iwasawa_su11(&TwistedLoop::identity(6)).unwrap();
        let u = meromorphic_frame(&iw).unwrap();
        assert!(u.distance(&TwistedLoop::identity(6)) < 1e-12);

        // C = ω₀ → U = ω₀·k with k = id.
        let iw = iwasawa_su11(&TwistedLoop::omega0(6)).unwrap();
        let u = meromorphic_frame(&iw).unwrap();
        assert!(u.distance(&TwistedLoop::omega0(6)) < 1e-12);
    }

    #[test]
    fn twist_parity_preserved_by_products() {
        let mut rng = Rng(5);
        for _ in 0..50 {
            let a = random_twisted_loop(4, 8, 0.4, 0.5, &mut rng);
            let b = random_twisted_loop(4, 8, 0.4, 0.5, &mut rng);
            let p = a.mul(&b).unwrap();
            assert!(p.twist_residual() < 1e-12);
        }
    }
}
