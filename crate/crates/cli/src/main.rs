use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lcca_cli::{compare, run, AlgoName, DataSource, MatrixFormat, RunConfig, THREADS_ENV};
use lcca_core::ingest::{SynthSpec, TokenDatasetSpec, TokenSource};

#[derive(Parser)]
#[command(name = "lcca", version, about = "Fast CCA for large sparse data")]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm and write correlations.csv, run.json and trace.csv.
    Run(Box<RunArgs>),
    /// Run several configs on one dataset and print a comparison table.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Read the whole run configuration from a JSON file instead of flags.
    #[arg(long, conflicts_with_all = ["algo", "x", "synth_spec", "tokens"])]
    config: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "config")]
    algo: Option<AlgoName>,

    #[arg(long, requires = "y", group = "source")]
    x: Option<PathBuf>,
    #[arg(long, requires = "x")]
    y: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mtx")]
    format: MatrixFormat,
    /// Column count of x (libsvm only).
    #[arg(long)]
    x_cols: Option<usize>,
    #[arg(long)]
    y_cols: Option<usize>,
    /// JSON file with a synthetic data spec.
    #[arg(long, group = "source")]
    synth_spec: Option<PathBuf>,
    /// Whitespace-separated token file; rows are bigrams.
    #[arg(long, group = "source")]
    tokens: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    x_vocab: usize,
    #[arg(long, default_value_t = 0)]
    y_vocab: usize,
    #[arg(long, default_value_t = 0)]
    x_drop_top: usize,
    #[arg(long, default_value_t = 0)]
    y_drop_top: usize,
    /// Document separator token.
    #[arg(long)]
    boundary: Option<String>,

    #[arg(long, default_value_t = lcca_cli::DEFAULT_K_CCA)]
    kcca: usize,
    #[arg(long)]
    t1: Option<usize>,
    #[arg(long)]
    t2: Option<usize>,
    #[arg(long)]
    kpc: Option<usize>,
    #[arg(long)]
    krpcca: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Write a per-iteration trace.
    #[arg(long)]
    trace: bool,
    /// Compute the exact oracle and report subspace distances to it.
    #[arg(long)]
    oracle_compare: bool,
    /// Ridge-repair singular Grams in the exact oracle.
    #[arg(long)]
    ridge: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Run configuration JSON files sharing one dataset.
    #[arg(required = true)]
    configs: Vec<PathBuf>,
    /// Match every later config's work budget to the first run.
    #[arg(long)]
    match_budget: bool,
    /// Also write the table as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_config(path: &PathBuf) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig> {
        if let Some(path) = &self.config {
            let mut config = read_config(path)?;
            config.out = Some(self.out);
            return Ok(config);
        }
        let data = match (self.x, self.y, self.synth_spec, self.tokens) {
            (Some(x), Some(y), None, None) => DataSource::Files {
                x,
                y,
                format: self.format,
                x_cols: self.x_cols,
                y_cols: self.y_cols,
            },
            (None, None, Some(path), None) => {
                let text = fs::read_to_string(&path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let spec: SynthSpec = serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))?;
                DataSource::Synth(spec)
            }
            (None, None, None, Some(path)) => DataSource::Tokens(TokenDatasetSpec {
                x_vocab_limit: self.x_vocab,
                y_vocab_limit: self.y_vocab,
                x_drop_top: self.x_drop_top,
                y_drop_top: self.y_drop_top,
                boundary: self.boundary,
                ..TokenDatasetSpec::new(TokenSource::File(path))
            }),
            _ => bail!("give exactly one data source: --x/--y, --synth-spec or --tokens"),
        };
        let mut config = RunConfig::new(self.algo.context("--algo is required")?, data);
        config.k_cca = self.kcca;
        config.t1 = self.t1;
        config.t2 = self.t2;
        config.k_pc = self.kpc;
        config.k_rpcca = self.krpcca;
        config.seed = self.seed;
        config.out = Some(self.out);
        config.trace = self.trace;
        config.oracle_compare = self.oracle_compare;
        config.ridge = self.ridge;
        Ok(config)
    }
}

fn main_inner(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Run(args) => {
            let config = args.into_config()?;
            let report = run(&config)?;
            eprintln!(
                "{}: {} correlations, sum {:.6}, {:.3} s, work {}",
                config.name(),
                report.correlations.len(),
                report.captured_correlation_sum,
                report.wall_time_seconds,
                report.work.total
            );
        }
        Command::Compare(args) => {
            let configs = args
                .configs
                .iter()
                .map(read_config)
                .collect::<Result<Vec<_>>>()?;
            let table = compare(&configs, args.match_budget)?;
            print!("{}", table.to_text());
            if let Some(out) = args.out {
                fs::write(&out, table.to_csv())
                    .with_context(|| format!("writing {}", out.display()))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
