use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Cell, ExperimentConfig, SweepConfig};
use crate::clustering::{build_tree, default_budget, to_newick};
use crate::complexity::{
    complexity_stats, compressor_from_name, ncd_matrix, Compressor, SizeCache,
};
use crate::corpus::{load_corpus, Document, FrequencyTable};
use crate::distortion::{apply_spec, DistortionSpec, ModeKind, OrderKind};
use crate::error::{Error, Result};
use crate::evaluation::{clustering_error, ideal_error, Grouping};
use crate::seed::{derive_seed, SeedPart};

/// One grid cell's measurements, or the reason it failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub order: OrderKind,
    pub mode: ModeKind,
    pub p: f64,
    pub trial: usize,
    pub seed: u64,
    pub clustering_error: Option<u64>,
    pub ideal_error: Option<u64>,
    pub mean_complexity: Option<f64>,
    pub tree_score: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    /// Newick text per row, `None` for failed cells.
    pub trees: Vec<Option<String>>,
}

struct Measured {
    clustering_error: u64,
    mean_complexity: f64,
    tree_score: f64,
    newick: String,
}

struct Context<'a> {
    cfg: &'a SweepConfig,
    corpus: &'a [Document],
    table: &'a FrequencyTable,
    compressor: &'a dyn Compressor,
    cache: &'a SizeCache,
    grouping: Grouping,
    ideal: u64,
    budget: usize,
}

fn p_part(p: f64) -> SeedPart<'static> {
    SeedPart::Int(p.to_bits())
}

impl Context<'_> {
    fn baseline_seed(&self) -> u64 {
        derive_seed(self.cfg.master_seed, &["baseline".into()])
    }

    fn cell_seed(&self, cell: &Cell) -> u64 {
        derive_seed(
            self.cfg.master_seed,
            &[
                "cell".into(),
                cell.order.as_str().into(),
                cell.mode.as_str().into(),
                p_part(cell.p),
                (cell.trial as u64).into(),
            ],
        )
    }

    /// Shared by every p and mode of a trial, so selections nest as p grows.
    fn permutation_seed(&self, trial: usize) -> u64 {
        derive_seed(
            self.cfg.master_seed,
            &["permutation".into(), (trial as u64).into()],
        )
    }

    fn measure(&self, docs: &[Document], seed: u64) -> Result<Measured> {
        let matrix = ncd_matrix(self.compressor, docs, self.cache)?;
        let climbed = build_tree(&matrix, self.budget, seed)?;
        let report = clustering_error(&climbed.tree, &self.grouping)?;
        let complexity = complexity_stats(self.compressor, docs, self.cache)?;
        Ok(Measured {
            clustering_error: report.total,
            mean_complexity: complexity.mean,
            tree_score: climbed.score.normalized,
            newick: to_newick(&climbed.tree),
        })
    }

    fn distorted(&self, cell: &Cell, seed: u64) -> Result<Vec<Document>> {
        let spec = DistortionSpec {
            order: cell.order.with_seed(self.permutation_seed(cell.trial)),
            mode: cell.mode.with_seed(derive_seed(seed, &["chars".into()])),
            p: cell.p,
        };
        apply_spec(self.corpus, self.table, &spec)
    }

    fn row(
        &self,
        cell: &Cell,
        seed: u64,
        outcome: &Result<Measured>,
    ) -> (SweepRow, Option<String>) {
        let mut row = SweepRow {
            order: cell.order,
            mode: cell.mode,
            p: cell.p,
            trial: cell.trial,
            seed,
            clustering_error: None,
            ideal_error: None,
            mean_complexity: None,
            tree_score: None,
            error: None,
        };
        match outcome {
            Ok(m) => {
                row.clustering_error = Some(m.clustering_error);
                row.ideal_error = Some(self.ideal);
                row.mean_complexity = Some(m.mean_complexity);
                row.tree_score = Some(m.tree_score);
                (row, Some(m.newick.clone()))
            }
            Err(e) => {
                row.error = Some(e.to_string());
                (row, None)
            }
        }
    }
}

/// Runs every grid cell: distort, build the NCD matrix, cluster, score and
/// measure complexity. Cells with `p = 0` share one undistorted baseline. A
/// failing cell becomes an error row and the sweep carries on. Rows come back
/// in grid order whatever the thread count.
pub fn run_sweep(
    cfg: &SweepConfig,
    corpus: &[Document],
    table: &FrequencyTable,
    cache: &SizeCache,
) -> Result<Sweep> {
    cfg.validate()?;
    if corpus.len() < 3 {
        return Err(Error::invalid(format!(
            "a sweep needs at least 3 documents, got {}",
            corpus.len()
        )));
    }
    crate::corpus::check_unique_ids(corpus)?;
    let compressor = compressor_from_name(&cfg.compressor)?;
    let grouping = Grouping::from_documents(corpus);
    let mut sizes = std::collections::BTreeMap::<&str, usize>::new();
    for d in corpus {
        *sizes.entry(d.group_tag()).or_default() += 1;
    }
    let sizes: Vec<usize> = sizes.into_values().collect();
    let ctx = Context {
        cfg,
        corpus,
        table,
        compressor: compressor.as_ref(),
        cache,
        grouping,
        ideal: ideal_error(&sizes, corpus.len())?.value,
        budget: cfg
            .climb_budget
            .unwrap_or_else(|| default_budget(corpus.len())),
    };

    let baseline = cfg
        .p_grid
        .contains(&0.0)
        .then(|| ctx.measure(corpus, ctx.baseline_seed()));

    let cells = cfg.cells();
    let outcomes: Vec<(SweepRow, Option<String>)> = cells
        .par_iter()
        .map(|cell| {
            if cell.p == 0.0 {
                let shared = baseline.as_ref().expect("p grid contains 0");
                return ctx.row(cell, ctx.baseline_seed(), shared);
            }
            let seed = ctx.cell_seed(cell);
            let outcome = ctx
                .distorted(cell, seed)
                .and_then(|docs| ctx.measure(&docs, seed));
            ctx.row(cell, seed, &outcome)
        })
        .collect();

    let (rows, trees) = outcomes.into_iter().unzip();
    Ok(Sweep { rows, trees })
}

/// Loads inputs named by `cfg`, runs the sweep on a pool of `cfg.jobs`
/// threads, saves the size cache and writes all outputs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Sweep> {
    let corpus = load_corpus(&cfg.manifest)?;
    let table = FrequencyTable::load(&cfg.frequency_table)?;
    let cache = match &cfg.cache {
        Some(path) => SizeCache::open(path)?,
        None => SizeCache::in_memory(),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cfg.jobs {
        pool = pool.num_threads(jobs);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let sweep = pool.install(|| run_sweep(&cfg.sweep, &corpus, &table, &cache))?;
    cache.save()?;
    let summary = super::aggregate(&sweep.rows);
    super::emit(&sweep, &summary, &cfg.out_dir)?;
    Ok(sweep)
}
