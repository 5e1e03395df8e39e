//! Flat sectioned key=value job configuration with complex literals of the
//! form "re+imi" (e.g. `b = 0.2+0.3i`).

use anyhow::{anyhow, bail, Context, Result};
use nilweier_core::mat2::{c, C64};
use nilweier_core::potentials::{DegreeOnePotential, GeneralPotential, NormalizedPotential, Poly};
use nilweier_core::TwistedLoop;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Default loop truncation order.
pub const DEFAULT_ORDER: usize = 32;

#[derive(Debug, Clone)]
pub enum PotentialSpec {
    DegreeOne { a: C64, b: C64, c: f64 },
    Normalized { p: Poly, big_b: Poly },
    /// Loop coefficients as z-polynomials: keyed by (degree, row, col).
    General(Vec<((i64, usize, usize), Poly)>),
}

#[derive(Debug, Clone)]
pub enum DressingSpec {
    AutoDiagonalizer,
    Identity,
    Boost { p: f64, q: f64 },
    /// Explicit loop coefficients keyed by (degree, row, col).
    Explicit(Vec<((i64, usize, usize), C64)>),
}

#[derive(Debug, Clone, Copy)]
pub struct GridBlock {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct NumericsBlock {
    /// Loop truncation order N.
    pub order: usize,
    /// Verification tolerances.
    pub h_tol: f64,
    pub dirac_tol: f64,
    pub conformal_tol: f64,
    pub reality_tol: f64,
    pub equiv_tol: f64,
}

impl Default for NumericsBlock {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            // The residual checks are second-order in the grid spacing;
            // these defaults suit moderate working grids and tighten per
            // job as the grid is refined.
            h_tol: 5e-3,
            dirac_tol: 5e-2,
            conformal_tol: 5e-2,
            reality_tol: 1e-8,
            equiv_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct OutputsBlock {
    pub mesh: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct JobConfig {
    pub potential: PotentialSpec,
    pub dressing: DressingSpec,
    pub grid: GridBlock,
    pub numerics: NumericsBlock,
    pub outputs: OutputsBlock,
}

/// Parse a complex literal: `1`, `-0.5`, `2i`, `1+2i`, `0.2-0.3i`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    if t.is_empty() {
        bail!("empty complex literal");
    }
    if !t.ends_with('i') {
        let re: f64 = t.parse().with_context(|| format!("bad real literal {t:?}"))?;
        return Ok(c(re, 0.0));
    }
    let body = &t[..t.len() - 1];
    // Split at the last +/- that is not a leading sign or an exponent sign.
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let ch = bytes[k] as char;
        if (ch == '+' || ch == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
            split = Some(k);
            break;
        }
    }
    match split {
        Some(k) => {
            let re: f64 = body[..k]
                .parse()
                .with_context(|| format!("bad real part in {t:?}"))?;
            let im_str = &body[k..];
            let im: f64 = match im_str {
                "+" => 1.0,
                "-" => -1.0,
                _ => im_str
                    .parse()
                    .with_context(|| format!("bad imaginary part in {t:?}"))?,
            };
            Ok(c(re, im))
        }
        None => {
            let im: f64 = match body {
                "" => 1.0,
                "-" => -1.0,
                _ => body
                    .parse()
                    .with_context(|| format!("bad imaginary literal {t:?}"))?,
            };
            Ok(c(0.0, im))
        }
    }
}

fn parse_poly(s: &str) -> Result<Poly> {
    let coeffs = s
        .split(',')
        .map(parse_complex)
        .collect::<Result<Vec<_>>>()?;
    if coeffs.is_empty() {
        bail!("empty polynomial");
    }
    Ok(Poly(coeffs))
}

/// Parse a coefficient key `c<deg>_<row><col>`, e.g. `c-1_12`.
fn parse_coeff_key(key: &str) -> Option<(i64, usize, usize)> {
    let rest = key.strip_prefix('c')?;
    let (deg, entry) = rest.rsplit_once('_')?;
    let deg: i64 = deg.parse().ok()?;
    let mut it = entry.chars();
    let row = it.next()?.to_digit(10)? as usize;
    let col = it.next()?.to_digit(10)? as usize;
    if it.next().is_some() || !(1..=2).contains(&row) || !(1..=2).contains(&col) {
        return None;
    }
    Some((deg, row - 1, col - 1))
}

type Sections = BTreeMap<String, BTreeMap<String, String>>;

fn parse_sections(text: &str) -> Result<Sections> {
    let mut out: Sections = BTreeMap::new();
    let mut current = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            out.entry(current.clone()).or_default();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key = value, got {raw:?}", lineno + 1))?;
        if current.is_empty() {
            bail!("line {}: key outside any [section]", lineno + 1);
        }
        out.get_mut(&current)
            .unwrap()
            .insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn get<'a>(sec: &'a BTreeMap<String, String>, section: &str, key: &str) -> Result<&'a str> {
    sec.get(key)
        .map(String::as_str)
        .ok_or_else(|| anyhow!("[{section}] is missing key {key:?}"))
}

fn get_f64(sec: &BTreeMap<String, String>, section: &str, key: &str) -> Result<f64> {
    get(sec, section, key)?
        .parse()
        .with_context(|| format!("[{section}] {key} must be a real number"))
}

impl JobConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Self> {
        let sections = parse_sections(text)?;

        let pot_sec = sections
            .get("potential")
            .ok_or_else(|| anyhow!("missing [potential] section"))?;
        let potential = match get(pot_sec, "potential", "kind")? {
            "degree_one" => PotentialSpec::DegreeOne {
                a: parse_complex(get(pot_sec, "potential", "a")?)?,
                b: parse_complex(get(pot_sec, "potential", "b")?)?,
                c: get_f64(pot_sec, "potential", "c")?,
            },
            "normalized" => PotentialSpec::Normalized {
                p: parse_poly(get(pot_sec, "potential", "p")?)?,
                big_b: parse_poly(get(pot_sec, "potential", "B")?)?,
            },
            "general" => {
                let mut coeffs = Vec::new();
                for (k, v) in pot_sec {
                    if k == "kind" {
                        continue;
                    }
                    let key = parse_coeff_key(k)
                        .ok_or_else(|| anyhow!("[potential] bad coefficient key {k:?}"))?;
                    coeffs.push((key, parse_poly(v)?));
                }
                if coeffs.is_empty() {
                    bail!("[potential] general kind needs coefficient keys c<deg>_<rc>");
                }
                PotentialSpec::General(coeffs)
            }
            other => bail!("[potential] unknown kind {other:?}"),
        };

        let dress_sec = sections
            .get("dressing")
            .ok_or_else(|| anyhow!("missing [dressing] section"))?;
        let dressing = match get(dress_sec, "dressing", "kind")? {
            "auto_diagonalizer" => DressingSpec::AutoDiagonalizer,
            "identity" => DressingSpec::Identity,
            "boost" => DressingSpec::Boost {
                p: get_f64(dress_sec, "dressing", "p")?,
                q: get_f64(dress_sec, "dressing", "q")?,
            },
            "explicit" => {
                let mut coeffs = Vec::new();
                for (k, v) in dress_sec {
                    if k == "kind" {
                        continue;
                    }
                    let key = parse_coeff_key(k)
                        .ok_or_else(|| anyhow!("[dressing] bad coefficient key {k:?}"))?;
                    coeffs.push((key, parse_complex(v)?));
                }
                DressingSpec::Explicit(coeffs)
            }
            other => bail!("[dressing] unknown kind {other:?}"),
        };

        let grid_sec = sections
            .get("grid")
            .ok_or_else(|| anyhow!("missing [grid] section"))?;
        let grid = GridBlock {
            x_min: get_f64(grid_sec, "grid", "x_min")?,
            x_max: get_f64(grid_sec, "grid", "x_max")?,
            y_min: get_f64(grid_sec, "grid", "y_min")?,
            y_max: get_f64(grid_sec, "grid", "y_max")?,
            nx: get(grid_sec, "grid", "nx")?.parse().context("[grid] nx")?,
            ny: get(grid_sec, "grid", "ny")?.parse().context("[grid] ny")?,
        };
        if !(grid.x_min < grid.x_max && grid.y_min < grid.y_max) {
            bail!("[grid] ranges must be nonempty");
        }
        if grid.nx < 2 || grid.ny < 2 {
            bail!("[grid] nx and ny must be >= 2");
        }

        let mut numerics = NumericsBlock::default();
        if let Some(sec) = sections.get("numerics") {
            if let Some(v) = sec.get("order").or_else(|| sec.get("N")) {
                numerics.order = v.parse().context("[numerics] order")?;
            }
            for (key, slot) in [
                ("h_tol", &mut numerics.h_tol),
                ("dirac_tol", &mut numerics.dirac_tol),
                ("conformal_tol", &mut numerics.conformal_tol),
                ("reality_tol", &mut numerics.reality_tol),
                ("equiv_tol", &mut numerics.equiv_tol),
            ] {
                if let Some(v) = sec.get(key) {
                    *slot = v
                        .parse()
                        .with_context(|| format!("[numerics] {key} must be a real number"))?;
                }
            }
            if numerics.order == 0 {
                bail!("[numerics] order must be positive");
            }
            for (name, v) in [
                ("h_tol", numerics.h_tol),
                ("dirac_tol", numerics.dirac_tol),
                ("conformal_tol", numerics.conformal_tol),
                ("reality_tol", numerics.reality_tol),
                ("equiv_tol", numerics.equiv_tol),
            ] {
                if v <= 0.0 {
                    bail!("[numerics] {name} must be positive");
                }
            }
        }

        let mut outputs = OutputsBlock::default();
        if let Some(sec) = sections.get("outputs") {
            outputs.mesh = sec.get("mesh").map(PathBuf::from);
            outputs.csv = sec.get("csv").map(PathBuf::from);
            outputs.report = sec.get("report").map(PathBuf::from);
        }

        Ok(JobConfig {
            potential,
            dressing,
            grid,
            numerics,
            outputs,
        })
    }

    /// The degree-one data, if this job uses a degree-one potential.
    pub fn degree_one(&self) -> Option<Result<DegreeOnePotential>> {
        match &self.potential {
            PotentialSpec::DegreeOne { a, b, c } => {
                Some(DegreeOnePotential::new(*a, *b, *c).map_err(Into::into))
            }
            _ => None,
        }
    }

    /// Build the pipeline potential.
    pub fn build_potential(&self) -> Result<nilweier_core::dpw::Potential> {
        use nilweier_core::dpw::Potential;
        match &self.potential {
            PotentialSpec::DegreeOne { a, b, c } => Ok(Potential::DegreeOne(
                DegreeOnePotential::new(*a, *b, *c)?,
            )),
            PotentialSpec::Normalized { p, big_b } => {
                let np = NormalizedPotential::new(p.clone(), big_b.clone());
                let order = self.numerics.order;
                Ok(Potential::General(GeneralPotential::Callback(
                    std::sync::Arc::new(move |z| np.eval_at(z, order)),
                )))
            }
            PotentialSpec::General(coeffs) => {
                let order = self.numerics.order;
                let max_pow = coeffs
                    .iter()
                    .map(|(_, poly)| poly.0.len())
                    .max()
                    .unwrap_or(1);
                let mut loops = vec![TwistedLoop::zero(order); max_pow];
                for ((deg, row, col), poly) in coeffs.iter().map(|(k, p)| (*k, p)) {
                    if deg < -1 {
                        bail!("[potential] degrees below -1 are not holomorphic potentials");
                    }
                    for (pow, &v) in poly.0.iter().enumerate() {
                        let mut m = loops[pow].coeff(deg);
                        m.m[row][col] += v;
                        loops[pow].set_coeff(deg, m);
                    }
                }
                for l in &loops {
                    if l.twist_residual() > 1e-12 {
                        bail!("[potential] coefficients violate the twist parity (diagonal entries must sit at even degrees, off-diagonal at odd)");
                    }
                }
                Ok(Potential::General(GeneralPotential::Polynomial(loops)))
            }
        }
    }

    /// Build the dressing loop S.
    pub fn build_dressing(&self) -> Result<TwistedLoop> {
        let order = self.numerics.order;
        match &self.dressing {
            DressingSpec::Identity => Ok(TwistedLoop::identity(order)),
            DressingSpec::Boost { p, q } => Ok(nilweier_core::dpw::boost_dressing(*p, *q, order)),
            DressingSpec::AutoDiagonalizer => {
                let d = self
                    .degree_one()
                    .ok_or_else(|| anyhow!("auto_diagonalizer needs a degree_one potential"))??;
                Ok(nilweier_core::equivariant::diagonalizer(&d, order)?)
            }
            DressingSpec::Explicit(coeffs) => {
                let mut s = TwistedLoop::zero(order);
                for &((deg, row, col), v) in coeffs {
                    let mut m = s.coeff(deg);
                    m.m[row][col] += v;
                    s.set_coeff(deg, m);
                }
                if s.twist_residual() > 1e-12 {
                    bail!("[dressing] explicit coefficients violate the twist parity");
                }
                if s.max_coeff_norm() == 0.0 {
                    bail!("[dressing] explicit dressing is empty");
                }
                Ok(s)
            }
        }
    }

    pub fn grid_spec(&self) -> Result<nilweier_core::dpw::GridSpec> {
        Ok(nilweier_core::dpw::GridSpec::new(
            self.grid.x_min,
            self.grid.x_max,
            self.grid.y_min,
            self.grid.y_max,
            self.grid.nx,
            self.grid.ny,
        )?)
    }
}
