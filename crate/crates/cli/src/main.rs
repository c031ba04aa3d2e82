use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rankcap::harness::output::{threads_from_env, with_threads};
use rankcap::harness::{self, ExperimentConfig, ExperimentKind, Report};
use rankcap::Error;

/// Rank-dependent Gaussian complexity experiments.
#[derive(Parser)]
#[command(name = "rankcap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo Gaussian complexity of the configured network class.
    Estimate(RunArgs),
    /// Every closed-form bound for the configured network (measured weights if present).
    Bounds(RunArgs),
    /// Complexity estimate and single-layer bound across rank caps.
    SweepRank(RunArgs),
    /// Rank-dependent and norm-based bounds across depth, with the crossover depth.
    SweepDepth(RunArgs),
    /// Norm-based versus vector-valued complexity of rank-1 and full-rank linear classes.
    Counterexample(RunArgs),
    /// Diameter estimates against the diameter bound on random specs.
    Diameter(RunArgs),
    /// Twin networks with and without a rank-1 layer.
    Collapse(RunArgs),
    /// Generalization gap of trained networks against the assembled bound.
    Gap(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// CSV output path (overrides `output` in the config); a `.json` companion is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optimizer seed (overrides `optimizer.seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of Monte Carlo draws (overrides `n_draws`).
    #[arg(long)]
    draws: Option<usize>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        match self {
            Command::Estimate(a) => (ExperimentKind::Estimate, a),
            Command::Bounds(a) => (ExperimentKind::BoundTable, a),
            Command::SweepRank(a) => (ExperimentKind::RankSweep, a),
            Command::SweepDepth(a) => (ExperimentKind::DepthSweep, a),
            Command::Counterexample(a) => (ExperimentKind::Counterexample, a),
            Command::Diameter(a) => (ExperimentKind::DiameterCheck, a),
            Command::Collapse(a) => (ExperimentKind::Collapse, a),
            Command::Gap(a) => (ExperimentKind::Gap, a),
        }
    }
}

enum Failure {
    Config(String),
    Numerical(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let text = e.to_string();
        if e.is_numerical() {
            Failure::Numerical(text)
        } else if matches!(e, Error::Io { .. } | Error::Csv(_)) {
            Failure::Other(text)
        } else {
            Failure::Config(text)
        }
    }
}

fn load(kind: ExperimentKind, args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::read(&args.config).map_err(|e| Failure::Config(e.to_string()))?;
    match cfg.kind {
        Some(k) if k != kind => {
            return Err(Failure::Config(format!(
                "config kind `{}` does not match subcommand `{}`",
                k.name(),
                kind.name()
            )))
        }
        _ => cfg.kind = Some(kind),
    }
    if let Some(seed) = args.seed {
        cfg.optimizer.seed = seed;
    }
    if let Some(draws) = args.draws {
        cfg.n_draws = draws;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    if cfg.output.is_none() {
        return Err(Failure::Config("no output path: pass --out or set `output`".into()));
    }
    Ok(cfg)
}

fn headline(report: &Report) -> String {
    let s = &report.summary;
    let pick = |keys: &[&str]| {
        keys.iter()
            .filter_map(|k| s.get(*k).map(|v| format!("{k}={v}")))
            .collect::<Vec<_>>()
            .join(" ")
    };
    match report.kind.as_str() {
        "estimate" => format!("mean={} std_error={}", s["estimate"]["mean"], s["estimate"]["std_error"]),
        "bound_table" => format!("mode={}", s["mode"]),
        "rank_sweep" => pick(&["slope", "bound_dominates_every_row"]),
        "depth_sweep" => pick(&["crossovers"]),
        "counterexample" => pick(&["norm_based_identical", "vector_ratio", "sqrt_d"]),
        "diameter_check" => pick(&["holds", "total"]),
        "collapse" => pick(&["configs", "bound_monotone", "mc_within_2se"]),
        "gap" => pick(&["seeds", "holds", "ranks_within_caps"]),
        _ => String::new(),
    }
}

fn execute(kind: ExperimentKind, args: &RunArgs) -> Result<String, Failure> {
    let cfg = load(kind, args)?;
    cfg.validate()?;
    let threads = threads_from_env()?;
    let report = with_threads(threads, || harness::run(&cfg))??;
    let out = cfg.output.clone().expect("checked in load");
    report.write(&out)?;
    Ok(format!(
        "{}: {} rows -> {} (digest {}) {}",
        report.kind,
        report.rows.len(),
        out.display(),
        report.config_digest,
        headline(&report)
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    match execute(kind, &args) {
        Ok(line) => {
            if !args.quiet {
                println!("{}", line.trim_end());
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Config(msg)) => {
            eprintln!("rankcap: config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("rankcap: numerical failure: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("rankcap: {msg}");
            ExitCode::from(1)
        }
    }
}
