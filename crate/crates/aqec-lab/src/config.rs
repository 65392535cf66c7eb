//! Sweep configuration: JSON file plus command-line overrides, and the
//! log-spaced noise grid every sweep runs on.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use aqec::fit::{log_grid, FitWindow};

pub const DEFAULT_POINTS: usize = 40;
pub const DEFAULT_GAMMA_MIN: f64 = 1e-3;
/// 10^(-1/2), the top of the default sweep grid.
pub const DEFAULT_GAMMA_MAX: f64 = 0.316_227_766_016_837_94;

/// Everything a sweep or learning run needs. Field names double as the JSON
/// config schema; any command-line flag overrides its field.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub points: usize,
    pub families: Vec<String>,
    pub n: usize,
    pub k: usize,
    pub q: u8,
    /// When set, loss sweeps add a frozen-code curve per adapted family:
    /// the code is built once at this strength and swept over the grid.
    pub gamma0: Option<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Fit window [min, max] for exponent reports; defaults to the library
    /// window when absent.
    pub window: Option<(f64, f64)>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            gamma_min: DEFAULT_GAMMA_MIN,
            gamma_max: DEFAULT_GAMMA_MAX,
            points: DEFAULT_POINTS,
            families: vec!["LNCY".into(), "NSA_SC".into(), "NSA_PC".into()],
            n: 4,
            k: 1,
            q: 2,
            gamma0: None,
            seed: 7,
            out: None,
            window: None,
        }
    }
}

impl SweepConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: SweepConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_min > 0.0 && self.gamma_min < self.gamma_max && self.gamma_max < 1.0) {
            bail!(
                "gamma grid must satisfy 0 < min < max < 1, got [{}, {}]",
                self.gamma_min,
                self.gamma_max
            );
        }
        if self.points == 0 {
            bail!("grid needs at least one point");
        }
        if let Some(g0) = self.gamma0 {
            if !(0.0..1.0).contains(&g0) || g0 == 0.0 {
                bail!("gamma0 = {g0} outside (0, 1)");
            }
        }
        if let Some((lo, hi)) = self.window {
            if !(lo > 0.0 && lo < hi && hi < 1.0) {
                bail!("fit window must satisfy 0 < min < max < 1, got [{lo}, {hi}]");
            }
        }
        if self.k > self.n {
            bail!("k = {} exceeds n = {}", self.k, self.n);
        }
        Ok(())
    }

    /// Strictly increasing log-spaced grid, endpoints pinned.
    pub fn gamma_grid(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let grid = log_grid(self.gamma_min, self.gamma_max, self.points)?;
        for pair in grid.windows(2) {
            if pair[1] <= pair[0] {
                bail!("grid not strictly increasing at {} -> {}", pair[0], pair[1]);
            }
        }
        Ok(grid)
    }

    pub fn fit_window(&self) -> Result<FitWindow> {
        match self.window {
            Some((lo, hi)) => Ok(FitWindow::new(lo, hi)?),
            None => Ok(FitWindow::default()),
        }
    }
}
