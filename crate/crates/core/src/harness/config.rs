use std::path::PathBuf;

use crate::distortion::{ModeKind, OrderKind};
use crate::error::{Error, Result};

/// The experiment grid and everything that determines its results.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub compressor: String,
    pub orders: Vec<OrderKind>,
    pub modes: Vec<ModeKind>,
    /// Mass fractions, strictly increasing, within `[0, 1]`.
    pub p_grid: Vec<f64>,
    /// Trials per cell under the random selection order.
    pub random_trials: usize,
    /// Trials per cell under the most/least frequent orders.
    pub fixed_trials: usize,
    pub master_seed: u64,
    /// Hill-climb proposals per tree; `None` means ten thousand per leaf.
    pub climb_budget: Option<usize>,
}

pub fn default_p_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            compressor: "lzma".into(),
            orders: OrderKind::ALL.to_vec(),
            modes: ModeKind::ALL.to_vec(),
            p_grid: default_p_grid(),
            random_trials: 10,
            fixed_trials: 1,
            master_seed: 0,
            climb_budget: None,
        }
    }
}

/// One point of the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub order: OrderKind,
    pub mode: ModeKind,
    pub p: f64,
    pub trial: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.orders.is_empty() || self.modes.is_empty() || self.p_grid.is_empty() {
            return Err(Error::invalid("orders, modes and p grid must be non-empty"));
        }
        if let Some(p) = self.p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid(format!("p = {p} is outside [0, 1]")));
        }
        if self.p_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("p grid must be strictly increasing"));
        }
        if self.random_trials == 0 || self.fixed_trials == 0 {
            return Err(Error::invalid("trial counts must be at least 1"));
        }
        let mut seen = std::collections::HashSet::new();
        if !self.orders.iter().all(|o| seen.insert(*o)) {
            return Err(Error::invalid("selection orders are repeated"));
        }
        let mut seen = std::collections::HashSet::new();
        if !self.modes.iter().all(|m| seen.insert(*m)) {
            return Err(Error::invalid("substitution modes are repeated"));
        }
        Ok(())
    }

    pub fn trials_for(&self, order: OrderKind) -> usize {
        match order {
            OrderKind::Random => self.random_trials,
            OrderKind::Most | OrderKind::Least => self.fixed_trials,
        }
    }

    /// Grid cells in output order: order, mode, p, trial.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &order in &self.orders {
            for &mode in &self.modes {
                for &p in &self.p_grid {
                    for trial in 0..self.trials_for(order) {
                        out.push(Cell {
                            order,
                            mode,
                            p,
                            trial,
                        });
                    }
                }
            }
        }
        out
    }
}

/// A sweep bound to files on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub manifest: PathBuf,
    pub frequency_table: PathBuf,
    pub out_dir: PathBuf,
    pub cache: Option<PathBuf>,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
    pub sweep: SweepConfig,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_264_cells() {
        let cfg = SweepConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.p_grid.len(), 11);
        assert_eq!(cfg.cells().len(), 2 * 11 + 2 * 11 + 2 * 11 * 10);
    }

    #[test]
    fn invalid_grids() {
        let bad = |f: fn(&mut SweepConfig)| {
            let mut c = SweepConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.p_grid = vec![0.0, 0.5, 0.5]));
        assert!(bad(|c| c.p_grid = vec![0.5, 0.2]));
        assert!(bad(|c| c.p_grid = vec![1.2]));
        assert!(bad(|c| c.random_trials = 0));
        assert!(bad(|c| c.orders.clear()));
        assert!(bad(
            |c| c.modes = vec![ModeKind::Asterisk, ModeKind::Asterisk]
        ));
    }
}
