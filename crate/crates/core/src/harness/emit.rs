//! Output files of a sweep.
//!
//! ```text
//! out/
//!   sweep.csv        one row per grid cell, failed cells carry `error`
//!   summary.csv      mean and sample std per (order, mode, p)
//!   series/          `p<TAB>value` plot data, `#` lines hold reference levels
//!   trees/           Newick tree of every successful cell
//!   plot.gp          gnuplot script rendering series/ to PNG
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::aggregate::SummaryRow;
use super::sweep::{Sweep, SweepRow};
use crate::distortion::{ModeKind, OrderKind};
use crate::error::{Error, Result};

pub const SWEEP_HEADER: &str =
    "order,mode,p,trial,seed,clustering_error,ideal_error,mean_complexity,tree_score,error";
pub const SUMMARY_HEADER: &str =
    "order,mode,p,trials,failed,error_mean,error_std,complexity_mean,complexity_std";

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn csv_bytes<T: serde::Serialize>(header: &str, rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let body = w
        .into_inner()
        .map_err(|e| Error::invalid(format!("csv buffer: {e}")))?;
    let mut out = Vec::with_capacity(header.len() + 1 + body.len());
    out.extend_from_slice(header.as_bytes());
    out.push(b'\n');
    out.extend_from_slice(&body);
    Ok(out)
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<Vec<u8>> {
    csv_bytes(SWEEP_HEADER, rows)
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<Vec<u8>> {
    csv_bytes(SUMMARY_HEADER, rows)
}

/// Parses the bytes written by [`sweep_csv`].
pub fn parse_sweep_csv(data: &[u8]) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(data);
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

pub fn read_sweep_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_sweep_csv(&data)
}

pub fn tree_file_name(row: &SweepRow) -> String {
    format!("{}_{}_p{}_t{}.nwk", row.order, row.mode, row.p, row.trial)
}

fn summary_for(summary: &[SummaryRow], order: OrderKind, mode: ModeKind) -> Vec<&SummaryRow> {
    summary
        .iter()
        .filter(|s| s.order == order && s.mode == mode)
        .collect()
}

#[derive(Clone, Copy)]
enum Quantity {
    Error,
    Complexity,
}

impl Quantity {
    fn name(self) -> &'static str {
        match self {
            Quantity::Error => "error",
            Quantity::Complexity => "complexity",
        }
    }

    fn of(self, s: &SummaryRow) -> Option<f64> {
        match self {
            Quantity::Error => s.error_mean,
            Quantity::Complexity => s.complexity_mean,
        }
    }
}

/// Reference levels: the ideal error (error series only) and the undistorted
/// baseline, both constant in p.
fn reference_lines(q: Quantity, rows: &[SweepRow], summary: &[SummaryRow]) -> String {
    let mut out = String::new();
    if let Quantity::Error = q {
        if let Some(ideal) = rows.iter().find_map(|r| r.ideal_error) {
            writeln!(out, "# ideal\t{ideal}").unwrap();
        }
    }
    if let Some(base) = summary.iter().find(|s| s.p == 0.0).and_then(|s| q.of(s)) {
        writeln!(out, "# baseline\t{base}").unwrap();
    }
    out
}

fn series_block(points: &[&SummaryRow], q: Quantity) -> String {
    let mut out = String::new();
    for s in points {
        if let Some(v) = q.of(s) {
            writeln!(out, "{}\t{}", s.p, v).unwrap();
        }
    }
    out
}

fn combos(rows: &[SweepRow], summary: &[SummaryRow]) -> Vec<(OrderKind, ModeKind)> {
    let mut out: Vec<_> = rows
        .iter()
        .map(|r| (r.order, r.mode))
        .chain(summary.iter().map(|s| (s.order, s.mode)))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Plot-data files keyed by their path under `series/`.
pub fn series_files(rows: &[SweepRow], summary: &[SummaryRow]) -> Vec<(String, String)> {
    let mut files = Vec::new();
    let combos = combos(rows, summary);
    for q in [Quantity::Error, Quantity::Complexity] {
        for &(order, mode) in &combos {
            let points = summary_for(summary, order, mode);
            let mut text = format!("# {} vs p, order {order}, mode {mode}\n", q.name());
            text += &reference_lines(q, rows, summary);
            text += &series_block(&points, q);
            files.push((format!("{}_{order}_{mode}.tsv", q.name()), text));
        }
    }
    let asterisk_orders: Vec<OrderKind> = combos
        .iter()
        .filter(|c| c.1 == ModeKind::Asterisk)
        .map(|c| c.0)
        .collect();
    if !asterisk_orders.is_empty() {
        for q in [Quantity::Error, Quantity::Complexity] {
            let mut text = format!("# asterisk {} vs p by selection order\n", q.name());
            text += &reference_lines(q, rows, summary);
            for (i, order) in asterisk_orders.iter().enumerate() {
                if i > 0 {
                    text += "\n\n";
                }
                writeln!(text, "# order {order}").unwrap();
                text += &series_block(&summary_for(summary, *order, ModeKind::Asterisk), q);
            }
            files.push((format!("asterisk_{}_by_order.tsv", q.name()), text));
        }
    }
    files
}

/// gnuplot script turning every series file into a PNG next to it.
pub fn plot_script(series: &[(String, String)]) -> String {
    let mut out = String::from(
        "# gnuplot -c plot.gp  (run from the output directory)\n\
         set terminal pngcairo size 800,500\n\
         set xlabel 'p'\n\
         set key outside right\n",
    );
    for (name, text) in series {
        let stem = name.trim_end_matches(".tsv");
        let ylabel = if name.contains("error") {
            "clustering error"
        } else {
            "mean compressed size (bytes)"
        };
        writeln!(out, "\nset output 'series/{stem}.png'").unwrap();
        writeln!(out, "set ylabel '{ylabel}'").unwrap();
        let mut plots = Vec::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# ideal\t") {
                plots.push(format!("{rest} title 'ideal' dt 2"));
            } else if let Some(rest) = line.strip_prefix("# baseline\t") {
                plots.push(format!("{rest} title 'undistorted' dt 3"));
            }
        }
        if name.starts_with("asterisk_") {
            let blocks: Vec<&str> = text
                .lines()
                .filter_map(|l| l.strip_prefix("# order "))
                .collect();
            for (i, order) in blocks.iter().enumerate() {
                plots.push(format!(
                    "'series/{name}' index {i} using 1:2 with linespoints title '{order}'"
                ));
            }
        } else {
            plots.push(format!(
                "'series/{name}' using 1:2 with linespoints title '{stem}'"
            ));
        }
        writeln!(out, "plot {}", plots.join(", \\\n     ")).unwrap();
    }
    out
}

/// Writes every output file under `out_dir`, creating it as needed.
pub fn emit(sweep: &Sweep, summary: &[SummaryRow], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let series_dir = out_dir.join("series");
    let trees_dir = out_dir.join("trees");
    for dir in [out_dir, &series_dir, &trees_dir] {
        create_dir(dir)?;
    }
    let mut written = Vec::new();
    let mut put = |path: PathBuf, contents: &[u8]| -> Result<()> {
        write_file(&path, contents)?;
        written.push(path);
        Ok(())
    };
    put(out_dir.join("sweep.csv"), &sweep_csv(&sweep.rows)?)?;
    put(out_dir.join("summary.csv"), &summary_csv(summary)?)?;
    let series = series_files(&sweep.rows, summary);
    for (name, text) in &series {
        put(series_dir.join(name), text.as_bytes())?;
    }
    put(out_dir.join("plot.gp"), plot_script(&series).as_bytes())?;
    for (row, tree) in sweep.rows.iter().zip(&sweep.trees) {
        if let Some(newick) = tree {
            put(
                trees_dir.join(tree_file_name(row)),
                format!("{newick}\n").as_bytes(),
            )?;
        }
    }
    Ok(written)
}
