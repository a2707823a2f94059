//! Command-line front end: `gen`, `run`, `sweep` and `report`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{
    aggregate, parse_algorithms, read_results, render_boxplot, run_matrix, sweep_algorithms, sweep_instances,
    write_summary, BenchConfig, MatrixOptions,
};
use crate::problems::{read_instances, write_instances, ProblemKind};
use crate::{Error, Result};

/// Environment variable naming a default configuration file.
pub const CONFIG_ENV: &str = "NISQ_BENCH_CONFIG";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "nisq-bench", version, about = "Benchmarks of quantum optimization algorithms on small problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// TOML configuration file (default: $NISQ_BENCH_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set sa.sweeps=100`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a suite of problem instances.
    Gen {
        /// maxcut, numpart, knapsack or spinglass.
        kind: String,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run algorithms over an instance file.
    Run {
        instances: PathBuf,
        /// Comma-separated algorithm tags, or `all`.
        #[arg(long, default_value = "all")]
        algo: String,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        /// Keep existing rows of the output and run only missing pairs.
        #[arg(long)]
        resume: bool,
        /// Leave the wall-time column empty so output is byte-reproducible.
        #[arg(long)]
        no_wall_time: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// QAOA fidelity over depths and register sizes.
    Sweep {
        kind: String,
        /// Comma-separated depths.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<usize>,
        /// Comma-separated qubit counts.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        per_cell: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        resume: bool,
        #[arg(long)]
        no_wall_time: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Summarize a results file into summary.csv and boxplot.svg.
    Report {
        results: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn set_path(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| Error::Parse(format!("empty key in '{key}'")))?;
    let mut cur = table;
    for p in parts {
        cur = cur
            .entry(p)
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Parse(format!("'{p}' in '{key}' is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn parse_override(item: &str) -> Result<(String, toml::Value)> {
    let (key, raw) = item.split_once('=').ok_or_else(|| Error::Parse(format!("override '{item}' is not KEY=VALUE")))?;
    let doc: toml::Table = format!("v = {raw}")
        .parse()
        .or_else(|_| format!("v = {}", toml::Value::String(raw.to_string())).parse())
        .map_err(|e: toml::de::Error| Error::Parse(format!("override '{item}': {e}")))?;
    Ok((key.trim().to_string(), doc["v"].clone()))
}

/// Defaults, then the file (explicit or from [`CONFIG_ENV`]), then `--set`
/// overrides. Unknown keys are rejected by name.
pub fn load_config(args: &ConfigArgs) -> Result<BenchConfig> {
    let mut table = toml::Table::try_from(BenchConfig::default()).map_err(|e| Error::Parse(e.to_string()))?;
    let path = args.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    if let Some(path) = path {
        let text = fs::read_to_string(&path)?;
        let file: toml::Table =
            text.parse().map_err(|e: toml::de::Error| Error::Parse(format!("{}: {e}", path.display())))?;
        merge(&mut table, file);
    }
    for item in &args.overrides {
        let (key, value) = parse_override(item)?;
        set_path(&mut table, &key, value)?;
    }
    toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| Error::Parse(format!("config: {e}")))
}

fn workers_or_default(workers: Option<usize>) -> MatrixOptions {
    let mut opts = MatrixOptions::default();
    if let Some(w) = workers {
        opts.workers = w.max(1);
    }
    opts
}

fn report(results: &Path, out_dir: &Path) -> Result<i32> {
    let records = read_results(results)?;
    if records.is_empty() {
        return Err(Error::InvalidArgument(format!("{} holds no results", results.display())));
    }
    let rows = aggregate(&records);
    fs::create_dir_all(out_dir)?;
    write_summary(&rows, fs::File::create(out_dir.join("summary.csv"))?)?;
    fs::write(out_dir.join("boxplot.svg"), render_boxplot(&rows))?;
    for r in &rows {
        println!("{}\t{}\tmedian {:?}\t(n = {})", r.kind, r.algorithm, r.median, r.count);
    }
    Ok(EXIT_OK)
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen { kind, count, n, seed, out, config } => {
            let kind: ProblemKind = kind.parse()?;
            let cfg = load_config(&config)?;
            let count = count.unwrap_or(cfg.suite.count);
            let seed = seed.unwrap_or(cfg.suite.seed);
            let suite = crate::bench::make_suite(kind, count, n.unwrap_or(cfg.suite.n), seed, &cfg.suite.generator)?;
            write_instances(&out, &suite)?;
            println!("wrote {count} {kind} instances (base seed {seed}) to {}", out.display());
            Ok(EXIT_OK)
        }
        Command::Run { instances, algo, out, workers, resume, no_wall_time, config } => {
            let algorithms = parse_algorithms(&algo)?;
            let cfg = load_config(&config)?;
            let suite = read_instances(&instances)?;
            let opts = MatrixOptions { resume, wall_time: !no_wall_time, ..workers_or_default(workers) };
            let s = run_matrix(&suite, &algorithms, &cfg, &opts, &out)?;
            println!("{} runs written, {} already present, {} failed", s.written, s.skipped, s.failed);
            Ok(if s.failed > 0 { EXIT_PARTIAL } else { EXIT_OK })
        }
        Command::Sweep { kind, p, n, per_cell, seed, out, workers, resume, no_wall_time, config } => {
            let kind: ProblemKind = kind.parse()?;
            let cfg = load_config(&config)?;
            let suite = sweep_instances(kind, &n, per_cell, seed.unwrap_or(cfg.suite.seed), &cfg.suite.generator)?;
            let opts = MatrixOptions { resume, wall_time: !no_wall_time, ..workers_or_default(workers) };
            let s = run_matrix(&suite, &sweep_algorithms(&p), &cfg, &opts, &out)?;
            println!("{} runs written, {} already present, {} failed", s.written, s.skipped, s.failed);
            Ok(if s.failed > 0 { EXIT_PARTIAL } else { EXIT_OK })
        }
        Command::Report { results, out_dir } => report(&results, &out_dir),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
