//! Coupling sweeps: both sides of the duality solved at every `h/J`,
//! written as CSV.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::duality::{solve_in, Subspace, DENSE_SUBSPACE_MAX};
use crate::eigensolver::{LanczosOptions, DEFAULT_SEED, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_dual_ising, build_tc};
use crate::lattice::{Boundary, CellComplex, LatticeKind, LatticeSpec};
use crate::observables::{self, fidelity_susceptibility, StringPath, FIDELITY_DELTA};
use crate::pauli::PauliString;

pub const CSV_SCHEMA: &str = "toric-ising-sweep/1";

pub const CSV_COLUMNS: [&str; 10] = [
    "h_over_J",
    "e0_tc",
    "e0_ising_minus_C",
    "gap",
    "string_op",
    "magnetization",
    "duality_deviation",
    "chi",
    "flagged",
    "error",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Lin,
    Log,
}

/// `n` points from `lo` to `hi`, written `lo:hi:n:log|lin`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("empty grid".into()));
        }
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo < 0.0 {
            return Err(Error::Config(format!(
                "grid bounds must be finite and non-negative, got {}:{}",
                self.lo, self.hi
            )));
        }
        if self.n > 1 && self.hi <= self.lo {
            return Err(Error::Config(format!(
                "grid must be increasing, got {}:{}",
                self.lo, self.hi
            )));
        }
        if self.spacing == Spacing::Log && self.lo <= 0.0 {
            return Err(Error::Config("log grid needs lo > 0".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let t = |i: usize| i as f64 / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| match self.spacing {
                Spacing::Lin => self.lo + (self.hi - self.lo) * t(i),
                Spacing::Log => (self.lo.ln() + (self.hi.ln() - self.lo.ln()) * t(i)).exp(),
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 4 {
            return Err(Error::Config(format!(
                "grid {s:?} is not of the form lo:hi:n:log|lin"
            )));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad grid bound {p:?}")))
        };
        let n = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("bad grid count {:?}", parts[2])))?;
        let spacing = match parts[3].trim().to_ascii_lowercase().as_str() {
            "log" => Spacing::Log,
            "lin" => Spacing::Lin,
            other => return Err(Error::Config(format!("bad grid spacing {other:?}"))),
        };
        let g = Grid {
            lo: num(parts[0])?,
            hi: num(parts[1])?,
            n,
            spacing,
        };
        g.validate()?;
        Ok(g)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.spacing {
            Spacing::Lin => "lin",
            Spacing::Log => "log",
        };
        write!(f, "{}:{}:{}:{s}", self.lo, self.hi, self.n)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub lattice: LatticeSpec,
    pub grid: Grid,
    /// Lanczos residual tolerance.
    pub tol: f64,
    pub seed: u64,
    /// Grid points solved concurrently.
    pub workers: usize,
    /// Rows whose duality deviation exceeds this are flagged.
    pub flag_tol: f64,
    /// Bulk site of the order parameter; the canonical site when unset.
    pub f: Option<usize>,
    /// Edge path of the string operator; the canonical path when unset.
    pub path: Option<Vec<usize>>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            lattice: LatticeSpec::new(LatticeKind::SquareOpen, &[3], Boundary::Rough),
            grid: Grid {
                lo: 0.2,
                hi: 5.0,
                n: 21,
                spacing: Spacing::Log,
            },
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
            workers: 1,
            flag_tol: 1e-8,
            f: None,
            path: None,
        }
    }
}

/// One grid point. On failure the numeric fields are NaN and `error` says
/// why.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub h_over_j: f64,
    pub e0_tc: f64,
    pub e0_ising_minus_c: f64,
    pub gap: f64,
    pub string_op: f64,
    pub magnetization: f64,
    /// Largest of the energy and order-parameter mismatches.
    pub duality_deviation: f64,
    pub chi: f64,
    pub flagged: bool,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(h: f64, e: &Error) -> Self {
        SweepRow {
            h_over_j: h,
            e0_tc: f64::NAN,
            e0_ising_minus_c: f64::NAN,
            gap: f64::NAN,
            string_op: f64::NAN,
            magnetization: f64::NAN,
            duality_deviation: f64::NAN,
            chi: f64::NAN,
            flagged: true,
            error: Some(e.to_string()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub path: StringPath,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn n_flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.flagged).count()
    }

    /// Metadata line (starting with `#`), header row, one row per point.
    /// Floats carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let c = &self.config;
        let path: Vec<String> = self.path.edges().iter().map(|e| e.to_string()).collect();
        writeln!(
            out,
            "# schema={CSV_SCHEMA} version={} lattice={} grid={} tol={:e} seed={} \
             dense_max={DENSE_SUBSPACE_MAX} f={} path={} anchored={} flag_tol={:e}",
            env!("CARGO_PKG_VERSION"),
            c.lattice.to_string().replace(' ', "/"),
            c.grid,
            c.tol,
            c.seed,
            self.path.f(),
            path.join("-"),
            self.path.boundary_anchored(),
            c.flag_tol
        )?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
        for r in &self.rows {
            let num = |x: f64| format!("{x:.16e}");
            w.write_record([
                num(r.h_over_j),
                num(r.e0_tc),
                num(r.e0_ising_minus_c),
                num(r.gap),
                num(r.string_op),
                num(r.magnetization),
                num(r.duality_deviation),
                num(r.chi),
                r.flagged.to_string(),
                r.error.clone().unwrap_or_default(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

struct Context {
    c: CellComplex,
    path: StringPath,
    sector: Subspace,
    ising_space: Subspace,
    /// Ising-side observable: `X_f`, or `X_f X_g` for a two-point string.
    ising_op: PauliString,
    string_op: PauliString,
    opts: LanczosOptions,
}

impl Context {
    fn new(cfg: &SweepConfig) -> Result<Self> {
        let c = cfg.lattice.build()?;
        let f = cfg.f.unwrap_or_else(|| observables::canonical_site(&c));
        let path = match &cfg.path {
            Some(edges) => StringPath::new(&c, edges.clone(), f)?,
            None => observables::canonical_path(&c, f)?,
        };
        let sector = Subspace::dual_sector(&c)?;
        let ising_space = if c.is_closed() {
            Subspace::even_parity(c.n_sites())?
        } else {
            Subspace::full(c.n_sites())?
        };
        let ising_op = if path.boundary_anchored() {
            PauliString::single_x(c.n_sites(), f)?
        } else {
            PauliString::x_type(c.n_sites(), &[f, path.end()])?
        };
        let string_op = observables::string_operator(&c, &path)?;
        let opts = LanczosOptions {
            tol: cfg.tol,
            seed: cfg.seed,
            ..Default::default()
        };
        Ok(Context {
            c,
            path,
            sector,
            ising_space,
            ising_op,
            string_op,
            opts,
        })
    }

    fn ising_ground(&self, h: f64) -> Result<Vec<f64>> {
        let ising = build_dual_ising(&self.c, 1.0, h)?;
        let s = solve_in(&ising, &self.ising_space, 1, &self.opts)?;
        Ok(s.eigenvectors.into_iter().next().unwrap_or_default())
    }

    fn point(&self, h: f64, flag_tol: f64) -> Result<SweepRow> {
        let tc = build_tc(&self.c, 1.0, h)?;
        let k = 3.min(self.sector.dim());
        let tc_spec = solve_in(&tc, &self.sector, k, &self.opts)?;
        let ising = build_dual_ising(&self.c, 1.0, h)?;
        let is_spec = solve_in(&ising, &self.ising_space, 1, &self.opts)?;
        let e0_tc = tc_spec.ground_energy();
        let e0_ising_minus_c = is_spec.ground_energy() - ising.constant();
        let string_op = self
            .sector
            .diagonal_expectation(&self.string_op, tc_spec.ground_vector())?;
        let magnetization = self
            .ising_space
            .expectation(&self.ising_op, is_spec.ground_vector())?;
        let gap = tc_spec.gap().unwrap_or(f64::NAN);
        let lo = (h - FIDELITY_DELTA / 2.0).max(0.0);
        let hi = lo + FIDELITY_DELTA;
        let chi = fidelity_susceptibility(
            &self.ising_ground(lo)?,
            &self.ising_ground(hi)?,
            FIDELITY_DELTA,
        )?;
        let duality_deviation = (e0_tc - e0_ising_minus_c)
            .abs()
            .max((string_op - magnetization).abs());
        Ok(SweepRow {
            h_over_j: h,
            e0_tc,
            e0_ising_minus_c,
            gap,
            string_op,
            magnetization,
            duality_deviation,
            chi,
            flagged: !(duality_deviation <= flag_tol),
            error: None,
        })
    }
}

/// Solve every grid point (concurrently, up to `workers`). Rows come back
/// in grid order; a failing point is recorded in its row and does not stop
/// the sweep.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.grid.validate()?;
    if cfg.workers == 0 {
        return Err(Error::Config("workers must be >= 1".into()));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::Config("solver tolerance must be > 0".into()));
    }
    let ctx = Context::new(cfg)?;
    let points = cfg.grid.points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .map(|&h| {
                ctx.point(h, cfg.flag_tol).unwrap_or_else(|e| {
                    log::warn!("h/J={h}: {e}");
                    SweepRow::failed(h, &e)
                })
            })
            .collect()
    });
    Ok(SweepResult {
        config: cfg.clone(),
        path: ctx.path,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "0.2:5:21:log".parse().unwrap();
        let p = g.points();
        assert_eq!(p.len(), 21);
        assert!((p[0] - 0.2).abs() < 1e-15 && (p[20] - 5.0).abs() < 1e-12);
        assert!(p.windows(2).all(|w| w[1] > w[0]));
        assert!("0:1:0:lin".parse::<Grid>().is_err());
        assert!("0:1:3:cubic".parse::<Grid>().is_err());
        assert!("0:1:3:log".parse::<Grid>().is_err());
        assert!("1:0:3:lin".parse::<Grid>().is_err());
    }
}
