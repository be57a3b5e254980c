use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use ncdlab::clustering::{build_tree, default_budget, parse_newick, to_newick};
use ncdlab::complexity::{compressor_from_name, ncd_matrix, NcdMatrix, SizeCache};
use ncdlab::corpus::{load_corpus, write_manifest, FrequencyTable, ManifestEntry};
use ncdlab::distortion::{apply_spec, DistortionSpec, ModeKind, OrderKind};
use ncdlab::evaluation::{clustering_error, ideal_error, Grouping};
use ncdlab::harness::{aggregate, run_experiment, trends, ExperimentConfig, SweepConfig};
use ncdlab::synthetic::{markov_corpus, SyntheticConfig};

#[derive(Parser)]
#[command(
    name = "ncdlab",
    version,
    about = "Compression-based clustering of distorted text"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full distortion sweep and write CSV, plot data and trees.
    Sweep(SweepArgs),
    /// Print the NCD matrix of a corpus as TSV.
    Ncd(NcdArgs),
    /// Fit a tree to an NCD matrix and print it as Newick.
    Tree(TreeArgs),
    /// Clustering error of a Newick tree under a grouping.
    Score(ScoreArgs),
    /// Write a distorted copy of a corpus.
    Distort(DistortArgs),
    /// Write a synthetic Markov-source corpus with its own frequency table.
    Synth(SynthArgs),
}

#[derive(Args)]
struct CompressorArgs {
    /// lzma, lzma:N, lzma:Ne, gzip[:N] or bzip2[:N].
    #[arg(long, default_value = "lzma")]
    compressor: String,
    /// Size cache file, created if missing.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    /// Corpus manifest: `path<TAB>group<TAB>title` per line.
    #[arg(long)]
    manifest: PathBuf,
    /// Word frequency table: `word mass` per line.
    #[arg(long)]
    freq: PathBuf,
    #[arg(long, short)]
    out: PathBuf,
    #[command(flatten)]
    compressor: CompressorArgs,
    #[arg(long, value_delimiter = ',', default_values = ["most", "least", "random"])]
    orders: Vec<OrderKind>,
    #[arg(long, value_delimiter = ',', default_values = ["asterisk", "random-chars"])]
    modes: Vec<ModeKind>,
    /// Comma-separated mass fractions; default 0, 0.1, ..., 1.
    #[arg(long, value_delimiter = ',')]
    p_grid: Option<Vec<f64>>,
    /// Trials per cell under the random order.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Trials per cell under the most/least frequent orders.
    #[arg(long, default_value_t = 1)]
    fixed_trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hill-climb proposals per tree; default 10000 per leaf.
    #[arg(long)]
    budget: Option<usize>,
    /// Also print the qualitative trend checks.
    #[arg(long)]
    trends: bool,
}

#[derive(Args)]
struct NcdArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    compressor: CompressorArgs,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TreeArgs {
    /// Matrix TSV as written by `ncd`.
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Newick file.
    #[arg(long)]
    tree: PathBuf,
    /// `label<TAB>group` lines; without it a label's group is the text
    /// before its first `.`.
    #[arg(long)]
    grouping: Option<PathBuf>,
}

#[derive(Args)]
struct DistortArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    freq: PathBuf,
    #[arg(long)]
    order: OrderKind,
    #[arg(long)]
    mode: ModeKind,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; gets one file per document and `manifest.tsv`.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long, default_value_t = 4)]
    sources: usize,
    #[arg(long, default_value_t = 3)]
    docs_per_source: usize,
    #[arg(long, default_value_t = 50 * 1024)]
    bytes: usize,
    #[arg(long, default_value_t = 3)]
    branching: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j);
    }
    Ok(b.build()?)
}

fn open_cache(path: Option<&Path>) -> Result<SizeCache> {
    Ok(match path {
        Some(p) => SizeCache::open(p)?,
        None => SizeCache::in_memory(),
    })
}

fn sweep(args: SweepArgs) -> Result<()> {
    let cfg = ExperimentConfig {
        manifest: args.manifest,
        frequency_table: args.freq,
        out_dir: args.out,
        cache: args.compressor.cache,
        jobs: args.compressor.jobs,
        sweep: SweepConfig {
            compressor: args.compressor.compressor,
            orders: args.orders,
            modes: args.modes,
            p_grid: args.p_grid.unwrap_or_else(ncdlab::harness::default_p_grid),
            random_trials: args.trials,
            fixed_trials: args.fixed_trials,
            master_seed: args.seed,
            climb_budget: args.budget,
        },
    };
    let sweep = run_experiment(&cfg)?;
    let failed = sweep.rows.iter().filter(|r| !r.is_ok()).count();
    println!(
        "{} cells, {} failed, output in {}",
        sweep.rows.len(),
        failed,
        cfg.out_dir.display()
    );
    for row in sweep.rows.iter().filter(|r| !r.is_ok()) {
        eprintln!(
            "{} {} p={} trial {}: {}",
            row.order,
            row.mode,
            row.p,
            row.trial,
            row.error.as_deref().unwrap_or("")
        );
    }
    if args.trends {
        for t in trends::all_trends(&aggregate(&sweep.rows)) {
            let status = if t.passed { "PASS" } else { "FAIL" };
            println!("{status} {}: {}", t.name, t.detail);
        }
    }
    Ok(())
}

fn ncd(args: NcdArgs) -> Result<()> {
    let docs = load_corpus(&args.manifest)?;
    let compressor = compressor_from_name(&args.compressor.compressor)?;
    let cache = open_cache(args.compressor.cache.as_deref())?;
    let pool = thread_pool(args.compressor.jobs)?;
    let m = pool.install(|| ncd_matrix(compressor.as_ref(), &docs, &cache))?;
    cache.save()?;
    info!(
        "size cache: {} hits, {} misses",
        cache.hits(),
        cache.misses()
    );
    write_output(args.out.as_deref(), &m.to_tsv())
}

fn tree(args: TreeArgs) -> Result<()> {
    let text = fs::read_to_string(&args.matrix)
        .with_context(|| format!("reading {}", args.matrix.display()))?;
    let m = NcdMatrix::from_tsv(&text)?;
    let budget = args.budget.unwrap_or_else(|| default_budget(m.len()));
    let report = build_tree(&m, budget, args.seed)?;
    eprintln!(
        "quartet score {:.6} (raw {:.6}) after {} proposals",
        report.score.normalized, report.score.raw, report.proposals
    );
    write_output(
        args.out.as_deref(),
        &format!("{}\n", to_newick(&report.tree)),
    )
}

fn load_grouping(path: &Path) -> Result<Grouping> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((label, group)) = line.split_once('\t') else {
            bail!("{}:{}: expected `label<TAB>group`", path.display(), i + 1);
        };
        map.insert(label.trim().to_string(), group.trim().to_string());
    }
    Ok(Grouping::new(map))
}

fn score(args: ScoreArgs) -> Result<()> {
    let text = fs::read_to_string(&args.tree)
        .with_context(|| format!("reading {}", args.tree.display()))?;
    let t = parse_newick(&text)?;
    let grouping = match &args.grouping {
        Some(path) => load_grouping(path)?,
        None => Grouping::by_label_prefix(t.labels()),
    };
    let report = clustering_error(&t, &grouping)?;
    let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
    for label in t.labels() {
        if let Some(g) = grouping.group_of(label) {
            *sizes.entry(g).or_default() += 1;
        }
    }
    let sizes: Vec<usize> = sizes.into_values().collect();
    let ideal = ideal_error(&sizes, t.leaf_count())?;
    println!("clustering_error\t{}", report.total);
    println!("ideal_error\t{}", ideal.value);
    for (group, err) in &report.per_group {
        println!("group\t{group}\t{err}");
    }
    Ok(())
}

fn distort(args: DistortArgs) -> Result<()> {
    let docs = load_corpus(&args.manifest)?;
    let table = FrequencyTable::load(&args.freq)?;
    let spec = DistortionSpec {
        order: args.order.with_seed(args.seed),
        mode: args.mode.with_seed(args.seed),
        p: args.p,
    };
    let distorted = apply_spec(&docs, &table, &spec)?;
    write_corpus(&args.out, &distorted)
}

fn write_corpus(dir: &Path, docs: &[ncdlab::corpus::Document]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut entries = Vec::with_capacity(docs.len());
    for d in docs {
        let name = format!("{}.txt", d.id());
        let path = dir.join(&name);
        fs::write(&path, d.text()).with_context(|| format!("writing {}", path.display()))?;
        entries.push(ManifestEntry {
            path: name.into(),
            group_tag: d.group_tag().to_string(),
            title_tag: d.title_tag().to_string(),
        });
    }
    write_manifest(dir.join("manifest.tsv"), &entries)?;
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let cfg = SyntheticConfig {
        sources: args.sources,
        docs_per_source: args.docs_per_source,
        doc_bytes: args.bytes,
        branching: args.branching,
    };
    let docs = markov_corpus(&cfg, args.seed)?;
    write_corpus(&args.out, &docs)?;
    FrequencyTable::from_documents(&docs)?.save(args.out.join("freq.tsv"))?;
    println!("{} documents in {}", docs.len(), args.out.display());
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Sweep(a) => sweep(a),
        Command::Ncd(a) => ncd(a),
        Command::Tree(a) => tree(a),
        Command::Score(a) => score(a),
        Command::Distort(a) => distort(a),
        Command::Synth(a) => synth(a),
    }
}
