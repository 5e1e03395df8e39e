//! The analyze / generate / verify commands.

use crate::config::{DressingSpec, JobConfig};
use anyhow::{anyhow, Context, Result};
use nilweier_core::dpw::{
    dirac_residual, frame_grid, mean_curvature_nil3_grid, surface_samples, FrameGrid, Potential,
    SurfaceSample,
};
use nilweier_core::equivariant::{
    classify, report, rho_from_monodromy, Monodromy, SurfaceClass, DELTA_CLASS,
};
use nilweier_core::factorization::Cell;
use nilweier_core::mat2::{c, C64};
use nilweier_core::nil3::{iso_apply, left_translate_tangent, Isometry, Nil3Point};
use nilweier_core::TwistedLoop;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// A command failure carrying the process exit code:
/// 2 for configuration problems, 3 for numeric ones.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    fn config(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }

    fn numeric(error: anyhow::Error) -> Self {
        Failure { code: 3, error }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn load_config(path: &Path) -> std::result::Result<JobConfig, Failure> {
    JobConfig::from_path(path).map_err(Failure::config)
}

/// Render a float with 17 significant digits (byte-deterministic).
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_complex(z: C64) -> String {
    format!("{}{}{}i", fmt17(z.re), if z.im < 0.0 { "" } else { "+" }, fmt17(z.im))
}

fn out_path(out_dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        out_dir.join(p)
    }
}

fn build_pipeline_inputs(
    cfg: &JobConfig,
) -> std::result::Result<(Potential, TwistedLoop, nilweier_core::dpw::GridSpec), Failure> {
    let eta = cfg.build_potential().map_err(Failure::config)?;
    let spec = cfg.grid_spec().map_err(Failure::config)?;
    let s = cfg.build_dressing().map_err(Failure::numeric)?;
    Ok((eta, s, spec))
}

fn run_pipeline(
    cfg: &JobConfig,
) -> std::result::Result<(Potential, FrameGrid, Vec<Option<SurfaceSample>>), Failure> {
    let (eta, s, spec) = build_pipeline_inputs(cfg)?;
    let c0 = TwistedLoop::identity(cfg.numerics.order);
    let grid = frame_grid(&eta, &spec, &s, &c0)
        .map_err(|e| Failure::numeric(anyhow!(e).context("frame construction failed")))?;
    let samples = surface_samples(&grid, &eta)
        .map_err(|e| Failure::numeric(anyhow!(e).context("surface evaluation failed")))?;
    Ok((eta, grid, samples))
}

// ---------------------------------------------------------------- analyze

pub fn cmd_analyze(config_path: &Path, out_dir: &Path) -> CmdResult {
    let cfg = load_config(config_path)?;
    let d = match cfg.degree_one() {
        Some(Ok(d)) => d,
        Some(Err(e)) => return Err(Failure::config(e)),
        None => {
            return Err(Failure::config(anyhow!(
                "analyze requires a degree_one potential (symmetry classification is only defined there)"
            )))
        }
    };
    let rep = report(&d).map_err(|e| match e {
        nilweier_core::Error::Config(_) => Failure::config(anyhow!(e)),
        other => Failure::numeric(anyhow!(other)),
    })?;

    let mut text = String::new();
    let _ = writeln!(text, "class: {}", rep.class.name());
    let _ = writeln!(text, "ell: {}", fmt17(rep.ell));
    let _ = writeln!(text, "alpha: {}", fmt_complex(rep.alpha));
    let _ = writeln!(text, "pitch: {}", fmt17(rep.pitch));
    let _ = writeln!(text, "catenoid: {}", rep.catenoid);
    for t in [0.1, 1.0] {
        match rep.rho_at(t) {
            Some(rho) => {
                let _ = writeln!(
                    text,
                    "rho_{t}: p={} q={} r={} theta={}",
                    fmt17(rho.t.x1),
                    fmt17(rho.t.x2),
                    fmt17(rho.t.x3),
                    fmt17(rho.theta)
                );
            }
            None => {
                let _ = writeln!(text, "rho_{t}: none");
            }
        }
    }

    // Closing residuals from the monodromy of the configured dressing.
    let closing = (|| -> Result<String> {
        let s = match (&cfg.dressing, classify(&d)) {
            (DressingSpec::AutoDiagonalizer, SurfaceClass::Translation) => {
                TwistedLoop::identity(cfg.numerics.order)
            }
            _ => cfg.build_dressing()?,
        };
        let m = Monodromy::new(&s, d)?;
        let tau = if rep.ell > DELTA_CLASS {
            2.0 * std::f64::consts::PI / rep.ell
        } else {
            1.0
        };
        let (ok, diag) = nilweier_core::equivariant::closing_check(&m, tau)?;
        let mut s = String::new();
        let _ = writeln!(s, "closing_tau: {}", fmt17(tau));
        let _ = writeln!(s, "closing_m_residual: {}", fmt17(diag.m_residual));
        let _ = writeln!(s, "closing_x_residual: {}", fmt17(diag.x_residual));
        let _ = writeln!(s, "closing_y_residual: {}", fmt17(diag.y_residual));
        let _ = writeln!(s, "closing_passed: {ok}");
        Ok(s)
    })();
    match closing {
        Ok(s) => text.push_str(&s),
        Err(e) => {
            let _ = writeln!(text, "closing_error: {e}");
        }
    }

    print!("{text}");
    if let Some(p) = &cfg.outputs.report {
        let path = out_path(out_dir, p);
        std::fs::write(&path, &text)
            .with_context(|| format!("cannot write report {}", path.display()))
            .map_err(Failure::config)?;
        eprintln!("report written to {}", path.display());
    }
    Ok(())
}

// --------------------------------------------------------------- generate

fn csv_text(samples: &[Option<SurfaceSample>], grid: &FrameGrid) -> String {
    let mut out = String::from("z_re,z_im,x1,x2,x3,e_u,h,g_re,g_im,cell\n");
    for (idx, s) in samples.iter().enumerate() {
        let iy = idx / grid.spec.nx;
        let ix = idx % grid.spec.nx;
        let z = grid.spec.z_at(ix, iy);
        match s {
            Some(s) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    fmt17(z.re),
                    fmt17(z.im),
                    fmt17(s.f.x1),
                    fmt17(s.f.x2),
                    fmt17(s.f.x3),
                    fmt17(s.e_u),
                    fmt17(s.h),
                    fmt17(s.g.re),
                    fmt17(s.g.im),
                    s.cell.name()
                );
            }
            None => {
                let zero = fmt17(0.0);
                let _ = writeln!(
                    out,
                    "{},{},{z0},{z0},{z0},{z0},{z0},{z0},{z0},BOUNDARY",
                    fmt17(z.re),
                    fmt17(z.im),
                    z0 = zero
                );
            }
        }
    }
    out
}

fn obj_text(samples: &[Option<SurfaceSample>], grid: &FrameGrid) -> String {
    let spec = &grid.spec;
    let mut out = String::new();
    // Vertex lines for kept samples; map grid index -> 1-based OBJ index.
    let mut vid = vec![0usize; samples.len()];
    let mut next = 1usize;
    for (idx, s) in samples.iter().enumerate() {
        if let Some(s) = s {
            let _ = writeln!(out, "v {} {} {}", fmt17(s.f.x1), fmt17(s.f.x2), fmt17(s.f.x3));
            vid[idx] = next;
            next += 1;
        }
    }
    // Quad faces; cells touching a dropped vertex are re-triangulated when
    // exactly one corner is missing, skipped otherwise.
    for iy in 0..spec.ny - 1 {
        for ix in 0..spec.nx - 1 {
            let corners = [
                spec.index(ix, iy),
                spec.index(ix + 1, iy),
                spec.index(ix + 1, iy + 1),
                spec.index(ix, iy + 1),
            ];
            let present: Vec<usize> = corners
                .iter()
                .filter(|&&k| vid[k] != 0)
                .map(|&k| vid[k])
                .collect();
            match present.len() {
                4 => {
                    let _ = writeln!(
                        out,
                        "f {} {} {} {}",
                        present[0], present[1], present[2], present[3]
                    );
                }
                3 => {
                    let _ = writeln!(out, "f {} {} {}", present[0], present[1], present[2]);
                }
                _ => {}
            }
        }
    }
    out
}

pub fn cmd_generate(config_path: &Path, out_dir: &Path) -> CmdResult {
    let cfg = load_config(config_path)?;
    let (_, grid, samples) = run_pipeline(&cfg)?;

    let csv_path = out_path(
        out_dir,
        cfg.outputs
            .csv
            .as_deref()
            .unwrap_or_else(|| Path::new("surface.csv")),
    );
    std::fs::write(&csv_path, csv_text(&samples, &grid))
        .with_context(|| format!("cannot write {}", csv_path.display()))
        .map_err(Failure::config)?;
    println!("csv: {}", csv_path.display());

    let mesh_path = out_path(
        out_dir,
        cfg.outputs
            .mesh
            .as_deref()
            .unwrap_or_else(|| Path::new("surface.obj")),
    );
    std::fs::write(&mesh_path, obj_text(&samples, &grid))
        .with_context(|| format!("cannot write {}", mesh_path.display()))
        .map_err(Failure::config)?;
    println!("mesh: {}", mesh_path.display());
    Ok(())
}

// ----------------------------------------------------------------- verify

#[derive(Debug, Clone)]
struct CsvRow {
    f: Option<Nil3Point>,
    e_u: f64,
}

fn read_csv(path: &Path, expected_rows: usize) -> Result<Vec<CsvRow>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read CSV {}", path.display()))?;
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if k == 0 {
            if !line.starts_with("z_re,") {
                anyhow::bail!("unexpected CSV header {line:?}");
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 10 {
            anyhow::bail!("CSV line {} has {} columns, expected 10", k + 1, cols.len());
        }
        let num = |i: usize| -> Result<f64> {
            cols[i]
                .parse()
                .with_context(|| format!("CSV line {} column {}", k + 1, i + 1))
        };
        let boundary = cols[9] == Cell::Boundary.name();
        rows.push(CsvRow {
            f: if boundary {
                None
            } else {
                Some(Nil3Point::new(num(2)?, num(3)?, num(4)?))
            },
            e_u: num(5)?,
        });
    }
    if rows.len() != expected_rows {
        anyhow::bail!(
            "CSV has {} sample rows but the configured grid has {}",
            rows.len(),
            expected_rows
        );
    }
    Ok(rows)
}

struct CheckLine {
    name: &'static str,
    residual: Option<f64>,
    tol: f64,
    note: Option<String>,
}

impl CheckLine {
    fn passed(&self) -> bool {
        self.residual.map_or(true, |r| r <= self.tol)
    }
}

fn conformality_residual(
    rows: &[CsvRow],
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
) -> Option<f64> {
    let mut worst: Option<f64> = None;
    for iy in 1..ny - 1 {
        for ix in 1..nx - 1 {
            let idx = iy * nx + ix;
            let pts = [idx, idx + 1, idx - 1, idx + nx, idx - nx];
            if pts.iter().any(|&k| rows[k].f.is_none()) {
                continue;
            }
            let p = rows[idx].f.unwrap();
            let d = |a: Nil3Point, b: Nil3Point, h: f64| {
                [
                    (a.x1 - b.x1) / (2.0 * h),
                    (a.x2 - b.x2) / (2.0 * h),
                    (a.x3 - b.x3) / (2.0 * h),
                ]
            };
            let fx = left_translate_tangent(&p, &d(rows[idx + 1].f.unwrap(), rows[idx - 1].f.unwrap(), hx));
            let fy = left_translate_tangent(&p, &d(rows[idx + nx].f.unwrap(), rows[idx - nx].f.unwrap(), hy));
            let nx2 = fx.iter().map(|v| v * v).sum::<f64>();
            let ny2 = fy.iter().map(|v| v * v).sum::<f64>();
            let cross = fx.iter().zip(&fy).map(|(a, b)| a * b).sum::<f64>();
            // The conformal factor column refers to the reference coordinate
            // (half the z-grid scale): ‖f_x‖ = 2·e^{u/2}.
            let scale = 2.0 * rows[idx].e_u.max(0.0).sqrt();
            if scale == 0.0 {
                continue;
            }
            let r = ((nx2.sqrt() - scale).abs() / scale)
                .max((ny2.sqrt() - scale).abs() / scale)
                .max(cross.abs() / (scale * scale));
            worst = Some(worst.map_or(r, |w: f64| w.max(r)));
        }
    }
    worst
}

pub fn cmd_verify(config_path: &Path, out_dir: &Path) -> CmdResult {
    let cfg = load_config(config_path)?;
    let spec = cfg.grid_spec().map_err(Failure::config)?;
    let csv_path = out_path(
        out_dir,
        cfg.outputs
            .csv
            .as_deref()
            .unwrap_or_else(|| Path::new("surface.csv")),
    );
    let rows = read_csv(&csv_path, spec.len()).map_err(Failure::config)?;
    let (nx, ny, hx, hy) = (spec.nx, spec.ny, spec.hx(), spec.hy());

    let mut checks: Vec<CheckLine> = Vec::new();

    // Mean curvature in Nil3 from the CSV positions (catches tampering).
    let positions: Vec<Option<Nil3Point>> = rows.iter().map(|r| r.f).collect();
    let h_field = mean_curvature_nil3_grid(&positions, nx, ny, hx, hy);
    let h_res = h_field
        .iter()
        .flatten()
        .fold(None, |acc: Option<f64>, &h| Some(acc.map_or(h.abs(), |a| a.max(h.abs()))));
    checks.push(CheckLine {
        name: "mean_curvature",
        residual: h_res,
        tol: cfg.numerics.h_tol,
        note: h_res.is_none().then(|| "no interior stencil available".into()),
    });

    // Conformality of the CSV positions against the conformal factor column.
    checks.push(CheckLine {
        name: "conformality",
        residual: conformality_residual(&rows, nx, ny, hx, hy),
        tol: cfg.numerics.conformal_tol,
        note: None,
    });

    // Recomputed pipeline quantities: frame reality and the Dirac residual.
    let (_, grid, samples) = run_pipeline(&cfg)?;
    let reality = grid
        .points
        .iter()
        .filter_map(|p| p.iw.as_ref())
        .map(|iw| iw.f.reality_residual_su11())
        .fold(0.0f64, f64::max);
    checks.push(CheckLine {
        name: "frame_reality",
        residual: Some(reality),
        tol: cfg.numerics.reality_tol,
        note: None,
    });

    if samples.iter().all(Option::is_some) {
        let psi1: Vec<C64> = samples.iter().map(|s| s.as_ref().unwrap().psi1).collect();
        let psi2: Vec<C64> = samples.iter().map(|s| s.as_ref().unwrap().psi2).collect();
        let h: Vec<f64> = samples.iter().map(|s| s.as_ref().unwrap().h).collect();
        checks.push(CheckLine {
            name: "dirac",
            residual: Some(dirac_residual(&psi1, &psi2, &h, nx, ny, hx, hy)),
            tol: cfg.numerics.dirac_tol,
            note: None,
        });
    } else {
        checks.push(CheckLine {
            name: "dirac",
            residual: None,
            tol: cfg.numerics.dirac_tol,
            note: Some("skipped: grid touches the cell boundary".into()),
        });
    }

    // Equivariance against the monodromy-extracted motion, for degree-one
    // potentials whose monodromy has diagonal λ=1 value.
    let equiv = equivariance_residual(&cfg, &rows, nx, ny, hx);
    match equiv {
        Ok(Some((t, r))) => checks.push(CheckLine {
            name: "equivariance",
            residual: Some(r),
            tol: cfg.numerics.equiv_tol,
            note: Some(format!("shift t={}", fmt17(t))),
        }),
        Ok(None) => checks.push(CheckLine {
            name: "equivariance",
            residual: None,
            tol: cfg.numerics.equiv_tol,
            note: Some("skipped: no extractable symmetry for this configuration".into()),
        }),
        Err(e) => checks.push(CheckLine {
            name: "equivariance",
            residual: None,
            tol: cfg.numerics.equiv_tol,
            note: Some(format!("skipped: {e}")),
        }),
    }

    let mut all_pass = true;
    for ch in &checks {
        let status = if ch.passed() { "pass" } else { "fail" };
        all_pass &= ch.passed();
        let residual = ch.residual.map_or_else(|| "n/a".into(), fmt17);
        let note = ch
            .note
            .as_ref()
            .map_or(String::new(), |n| format!(" note={n}"));
        println!(
            "{}: residual={} tol={} status={}{}",
            ch.name,
            residual,
            fmt17(ch.tol),
            status,
            note
        );
    }
    println!("verify: {}", if all_pass { "pass" } else { "fail" });
    if all_pass {
        Ok(())
    } else {
        Err(Failure::numeric(anyhow!(
            "verification failed (see residual table)"
        )))
    }
}

/// Shift-by-t residual max‖f(z+t) − ρ_t·f(z)‖ over CSV samples, with ρ_t
/// extracted from the monodromy of the configured dressing.
fn equivariance_residual(
    cfg: &JobConfig,
    rows: &[CsvRow],
    nx: usize,
    ny: usize,
    hx: f64,
) -> Result<Option<(f64, f64)>> {
    let d = match cfg.degree_one() {
        Some(Ok(d)) => d,
        _ => return Ok(None),
    };
    let s = match (&cfg.dressing, classify(&d)) {
        (DressingSpec::AutoDiagonalizer, SurfaceClass::Translation) => {
            TwistedLoop::identity(cfg.numerics.order)
        }
        _ => cfg.build_dressing()?,
    };
    let m = Monodromy::new(&s, d)?;
    let shift = (nx / 4).max(1);
    let t = shift as f64 * hx;
    // The motion extraction needs M_t(1) diagonal.
    let m1 = m.m_at(t)?.eval(c(1.0, 0.0));
    if m1.offdiag_part().norm() > 1e-8 {
        return Ok(None);
    }
    let rho: Isometry = rho_from_monodromy(&m, t)?;
    let mut worst = 0.0f64;
    let mut compared = 0usize;
    for iy in 0..ny {
        for ix in 0..nx - shift {
            let (a, b) = (rows[iy * nx + ix].f, rows[iy * nx + ix + shift].f);
            if let (Some(a), Some(b)) = (a, b) {
                worst = worst.max(b.dist_max(&iso_apply(&rho, &a)));
                compared += 1;
            }
        }
    }
    if compared == 0 {
        return Ok(None);
    }
    Ok(Some((t, worst)))
}
