//! TOML run configuration. Command-line flags override the file, which
//! overrides the defaults.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeKind, LatticeSpec};
use crate::sweep::{Grid, SweepConfig};

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub lattice: LatticeSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub observable: ObservableSection,
}

/// `L = 3` or `L = [3, 2]`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Size {
    One(usize),
    Many(Vec<usize>),
}

impl Size {
    pub fn dims(&self) -> Vec<usize> {
        match self {
            Size::One(l) => vec![*l],
            Size::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub kind: Option<String>,
    #[serde(rename = "L")]
    pub size: Option<Size>,
    pub boundary: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub grid: Option<String>,
    pub workers: Option<usize>,
    pub flag_tol: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ObservableSection {
    pub f: Option<usize>,
    pub path: Option<Vec<usize>>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Lay `other` over `self`: every field set in `other` wins.
    pub fn merge(mut self, other: FileConfig) -> FileConfig {
        macro_rules! take {
            ($($sec:ident.$field:ident),*) => {
                $(if other.$sec.$field.is_some() {
                    self.$sec.$field = other.$sec.$field;
                })*
            };
        }
        take!(
            lattice.kind,
            lattice.size,
            lattice.boundary,
            sweep.grid,
            sweep.workers,
            sweep.flag_tol,
            solver.tol,
            solver.seed,
            observable.f,
            observable.path
        );
        self
    }

    pub fn lattice_spec(&self) -> Result<LatticeSpec> {
        let d = SweepConfig::default();
        let kind = match &self.lattice.kind {
            Some(k) => k.parse::<LatticeKind>()?,
            None => d.lattice.kind,
        };
        let dims = match &self.lattice.size {
            Some(s) => s.dims(),
            None => d.lattice.dims.clone(),
        };
        let boundary = match &self.lattice.boundary {
            Some(b) => b.parse::<Boundary>()?,
            None if kind == LatticeKind::SquareOpen || kind == LatticeKind::Path => {
                d.lattice.boundary
            }
            None => Boundary::Plain,
        };
        let spec = LatticeSpec::new(kind, &dims, boundary);
        // Reject bad shapes here rather than deep inside a run.
        spec.build()?;
        Ok(spec)
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let d = SweepConfig::default();
        let grid = match &self.sweep.grid {
            Some(g) => g.parse::<Grid>()?,
            None => d.grid,
        };
        let cfg = SweepConfig {
            lattice: self.lattice_spec()?,
            grid,
            tol: self.solver.tol.unwrap_or(d.tol),
            seed: self.solver.seed.unwrap_or(d.seed),
            workers: self.sweep.workers.unwrap_or(d.workers),
            flag_tol: self.sweep.flag_tol.unwrap_or(d.flag_tol),
            f: self.observable.f,
            path: self.observable.path.clone(),
        };
        if cfg.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        if !(cfg.tol > 0.0) {
            return Err(Error::Config("solver tolerance must be > 0".into()));
        }
        if !(cfg.flag_tol >= 0.0) {
            return Err(Error::Config("flag_tol must be >= 0".into()));
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = FileConfig::default().sweep_config().unwrap();
        assert_eq!(cfg, SweepConfig::default());
    }

    #[test]
    fn file_then_override() {
        let file = FileConfig::parse(
            r#"
            [lattice]
            kind = "hex-torus"
            L = [2, 2]
            [sweep]
            grid = "0.5:1.5:3:lin"
            [solver]
            seed = 7
            "#,
        )
        .unwrap();
        let flags = FileConfig {
            solver: SolverSection {
                seed: Some(9),
                tol: None,
            },
            ..Default::default()
        };
        let cfg = file.merge(flags).sweep_config().unwrap();
        assert_eq!(cfg.lattice.kind, LatticeKind::HexTorus);
        assert_eq!(cfg.lattice.dims, vec![2, 2]);
        assert_eq!(cfg.grid.n, 3);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn unknown_key_and_empty_grid_rejected() {
        assert!(FileConfig::parse("[lattice]\nsize = 3\n").is_err());
        let f = FileConfig::parse("[sweep]\ngrid = \"0.1:1:0:log\"\n").unwrap();
        assert!(matches!(f.sweep_config(), Err(Error::Config(_))));
    }
}
