use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use faripa::far::mix;
use faripa::harness::{
    boxplot_stats, generate_sources, random_orthogonal, read_csv_column, read_matrix_csv, run_experiment,
    save_report, write_matrix_csv, Dataset, ExperimentConfig,
};
use faripa::metrics::{amari_index, block_sums, BlockStructure};
use faripa::rng::{stage_rng, Stage};

/// Blind separation of fAR-driven sources: data generation, experiments and scoring.
#[derive(Parser)]
#[command(name = "faripa", version)]
struct Cli {
    /// Worker threads (defaults to one per core).
    #[arg(long, env = "FARIPA_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write hidden sources (and optionally mixed observations) as CSV.
    Generate(GenerateArgs),
    /// Execute an experiment configuration and write its report.
    Run(RunArgs),
    /// Amari-index of a global matrix G given as headerless CSV.
    Amari(AmariArgs),
    /// Box-plot statistics of a CSV column.
    Stats(StatsArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Experiment configuration (JSON); `--dataset` and `--samples` are used without one.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_dataset)]
    dataset: Option<Dataset>,
    #[arg(long, short = 'T')]
    samples: Option<usize>,
    /// Seed of the generated run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path for the sources.
    #[arg(long, short)]
    output: PathBuf,
    /// Also write `x = A s` with a random orthogonal `A` here.
    #[arg(long)]
    mixed: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output stem: writes `<out>.json` and `<out>.csv`.
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Leave wall-times out so reruns produce identical reports.
    #[arg(long)]
    no_timings: bool,
    /// Directory for per-run `g_<run>.csv` and `block_sums_<run>.csv`.
    #[arg(long)]
    matrices: Option<PathBuf>,
}

#[derive(Args)]
struct AmariArgs {
    #[arg(long)]
    g: PathBuf,
    /// Ascending block dimensions of the rows, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    /// Column block dimensions when they differ from the rows.
    #[arg(long, value_delimiter = ',')]
    col_dims: Option<Vec<usize>>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Column name; optional for single-column files.
    #[arg(long)]
    column: Option<String>,
}

fn parse_dataset(s: &str) -> Result<Dataset, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|_| format!("unknown dataset {s:?}"))
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ExperimentConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn generate(args: GenerateArgs) -> Result<()> {
    let config = match (&args.config, args.dataset, args.samples) {
        (Some(path), _, _) => {
            let mut c = load_config(path)?;
            if let Some(t) = args.samples {
                c.samples = t;
            }
            c
        }
        (None, Some(dataset), Some(samples)) => ExperimentConfig::new(dataset, samples),
        _ => bail!("give --config, or both --dataset and --samples"),
    };
    config.validate()?;
    let sources = generate_sources(&config, args.seed)?;
    sources.s.save_csv(&args.output, "s")?;
    if let Some(path) = args.mixed {
        let a = random_orthogonal(sources.s.dim(), &mut stage_rng(args.seed, Stage::Mixing));
        mix(&a, &sources.s)?.save_csv(path, "x")?;
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    for ext in ["json", "csv"] {
        let target = args.out.with_extension(ext);
        if target.exists() && fs::canonicalize(&target)? == fs::canonicalize(&args.config)? {
            bail!("output {} would overwrite the configuration", target.display());
        }
    }
    let mut config = load_config(&args.config)?;
    if let Some(r) = args.runs {
        config.runs = r;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if args.no_timings {
        config.record_timings = false;
    }
    let report = run_experiment(&config)?;
    save_report(&report, &args.out)?;
    if let Some(dir) = &args.matrices {
        fs::create_dir_all(dir)?;
        for r in &report.records {
            if let (Some(g), Some(b)) = (&r.g, &r.block_sums) {
                write_matrix_csv(g, BufWriter::new(File::create(dir.join(format!("g_{}.csv", r.run)))?))?;
                write_matrix_csv(b, BufWriter::new(File::create(dir.join(format!("block_sums_{}.csv", r.run)))?))?;
            }
        }
    }
    let dims_ok = report.records.iter().filter(|r| r.dims_recovered()).count();
    println!(
        "runs {}  completed {}  failed {}  dims recovered {}",
        report.records.len(),
        report.completed,
        report.failed,
        dims_ok
    );
    if let Some(b) = &report.amari {
        println!("amari  q1 {:.4e}  median {:.4e}  q3 {:.4e}  outliers {}", b.q1, b.q2, b.q3, b.outliers.len());
    }
    Ok(())
}

fn amari(args: AmariArgs) -> Result<()> {
    let g = read_matrix_csv(File::open(&args.g).with_context(|| format!("opening {}", args.g.display()))?)?;
    let blocks = BlockStructure::new(args.dims.clone(), args.col_dims.unwrap_or(args.dims))?;
    let r = amari_index(&g, &blocks)?;
    println!("{r:e}");
    log::info!("block sums: {}", block_sums(&g, &blocks)?);
    Ok(())
}

fn stats(args: StatsArgs) -> Result<()> {
    let file = File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
    let values = read_csv_column(file, args.column.as_deref())?;
    println!("{}", serde_json::to_string_pretty(&boxplot_stats(&values)?)?);
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Run(a) => run(a),
        Command::Amari(a) => amari(a),
        Command::Stats(a) => stats(a),
    }
}
