//! Distortion sweeps: run every (order, mode, p, trial) cell, aggregate the
//! trials and write CSV, plot data and trees.

mod aggregate;
mod config;
mod emit;
mod sweep;
pub mod trends;

pub use aggregate::{aggregate, mean_std, SummaryRow};
pub use config::{default_p_grid, Cell, ExperimentConfig, SweepConfig};
pub use emit::{
    emit, parse_sweep_csv, plot_script, read_sweep_csv, series_files, summary_csv, sweep_csv,
    tree_file_name, SUMMARY_HEADER, SWEEP_HEADER,
};
pub use sweep::{run_experiment, run_sweep, Sweep, SweepRow};
