//! Command-line front end: run experiments and list benchmark functions.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use tesalocs::benchmarks::Registry;
use tesalocs::driver::TesalocsConfig;
use tesalocs::harness::{
    emit_report, run_experiment_with, ExperimentSpec, Initializer, ReportFormat,
};
use tesalocs::local::LocalMethod;

#[derive(Parser)]
#[command(
    name = "tesalocs",
    version,
    about = "Tensor-train sampling with local search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run random-start and/or learned-start experiments.
    Run(Box<RunArgs>),
    /// Print the built-in benchmark functions with their boxes and minima.
    ListFunctions {
        /// Dimension used for d-dependent boxes and minima.
        #[arg(long, default_value_t = 100)]
        dim: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum InitChoice {
    Random,
    Tesalocs,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FormatChoice {
    Csv,
    Json,
    Table,
    All,
}

/// Every option may also come from the JSON file given with `--config`,
/// using the flag names as keys; flags win over the file.
#[derive(Args, Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct RunArgs {
    /// Comma-separated function names, or "all".
    #[arg(long, value_delimiter = ',')]
    functions: Option<Vec<String>>,
    #[arg(long)]
    dim: Option<usize>,
    /// Objective evaluations per run, gradient probes included.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Comma-separated local methods: bfgs, cg, pso, spsa, none.
    #[arg(long, value_delimiter = ',')]
    local: Option<Vec<LocalMethod>>,
    #[arg(long, value_enum)]
    init: Option<InitChoice>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    grid_nodes: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    elite: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    /// Per-candidate evaluation cap (default: derived from the budget).
    #[arg(long)]
    max_evals_per_candidate: Option<usize>,
    #[arg(long)]
    seed0: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatChoice>,
    /// Skip writing per-run trace CSVs.
    #[arg(long)]
    #[serde(default)]
    no_traces: bool,
    /// Print one line per finished run to stderr.
    #[arg(long)]
    #[serde(default)]
    verbose: bool,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

impl RunArgs {
    /// Fills unset fields from `file`.
    fn overlay(self, file: RunArgs) -> RunArgs {
        RunArgs {
            functions: self.functions.or(file.functions),
            dim: self.dim.or(file.dim),
            budget: self.budget.or(file.budget),
            repeats: self.repeats.or(file.repeats),
            local: self.local.or(file.local),
            init: self.init.or(file.init),
            rank: self.rank.or(file.rank),
            grid_nodes: self.grid_nodes.or(file.grid_nodes),
            batch: self.batch.or(file.batch),
            elite: self.elite.or(file.elite),
            lr: self.lr.or(file.lr),
            max_evals_per_candidate: self
                .max_evals_per_candidate
                .or(file.max_evals_per_candidate),
            seed0: self.seed0.or(file.seed0),
            out_dir: self.out_dir.or(file.out_dir),
            format: self.format.or(file.format),
            no_traces: self.no_traces || file.no_traces,
            verbose: self.verbose || file.verbose,
            config: self.config,
        }
    }
}

fn build_spec(
    args: &RunArgs,
    registry: &Registry,
) -> tesalocs::Result<(ExperimentSpec, PathBuf, FormatChoice)> {
    let defaults = ExperimentSpec::default();
    let mut base = TesalocsConfig::default();
    base.budget = args.budget.unwrap_or(base.budget);
    base.rank = args.rank.unwrap_or(base.rank);
    base.grid_nodes = args.grid_nodes.unwrap_or(base.grid_nodes);
    base.batch = args.batch.unwrap_or(base.batch);
    base.elite = args.elite.unwrap_or(base.elite);
    if let Some(lr) = args.lr {
        base.learner.learning_rate = lr;
    }
    base.local.max_evals_per_candidate = args.max_evals_per_candidate;

    let functions = match &args.functions {
        None => registry.names().iter().map(|s| s.to_string()).collect(),
        Some(list) if list.len() == 1 && list[0].eq_ignore_ascii_case("all") => {
            registry.names().iter().map(|s| s.to_string()).collect()
        }
        Some(list) => list.clone(),
    };
    let initializers = match args.init.unwrap_or(InitChoice::Both) {
        InitChoice::Random => vec![Initializer::Random],
        InitChoice::Tesalocs => vec![Initializer::Tesalocs],
        InitChoice::Both => vec![Initializer::Random, Initializer::Tesalocs],
    };
    let out_dir = args
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("results"));
    let spec = ExperimentSpec {
        functions,
        dim: args.dim.unwrap_or(defaults.dim),
        repeats: args.repeats.unwrap_or(defaults.repeats),
        seed0: args.seed0.unwrap_or(defaults.seed0),
        methods: args.local.clone().unwrap_or(defaults.methods),
        initializers,
        base,
        trace_dir: (!args.no_traces).then(|| out_dir.join("traces")),
    };
    Ok((spec, out_dir, args.format.unwrap_or(FormatChoice::All)))
}

fn run_command(args: RunArgs) -> tesalocs::Result<bool> {
    let args = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let file: RunArgs = serde_json::from_str(&text)?;
            args.overlay(file)
        }
        None => args,
    };
    let registry = Registry::default();
    let (spec, out_dir, format) = build_spec(&args, &registry)?;
    let verbose = args.verbose;
    let report = run_experiment_with(&spec, &registry, &mut |ev| {
        if !verbose {
            return;
        }
        match ev.outcome {
            Ok(t) => eprintln!(
                "{} {} {} seed {}: best {:e} after {} evals",
                ev.function, ev.method, ev.initializer, ev.seed, t.best_value, t.evaluations
            ),
            Err(msg) => eprintln!(
                "{} {} {} seed {}: FAILED: {msg}",
                ev.function, ev.method, ev.initializer, ev.seed
            ),
        }
    })?;
    let formats: &[ReportFormat] = match format {
        FormatChoice::Csv => &[ReportFormat::Csv],
        FormatChoice::Json => &[ReportFormat::Json],
        FormatChoice::Table => &[ReportFormat::Table],
        FormatChoice::All => &[ReportFormat::Csv, ReportFormat::Json, ReportFormat::Table],
    };
    for &f in formats {
        let path = emit_report(&report, f, &out_dir)?;
        eprintln!("wrote {}", path.display());
    }
    print!("{}", report.to_table());
    Ok(report.failed_runs() == 0)
}

fn list_functions(dim: usize) {
    let registry = Registry::default();
    println!("{:<15} {:>24} {:>14}  formula", "name", "box", "f*");
    for b in registry.entries() {
        let (a, hi) = b.bounds(dim);
        println!(
            "{:<15} {:>24} {:>14}  {}",
            b.name(),
            format!("[{a}, {hi}]"),
            format!("{:e}", b.min_value(dim)),
            b.formula()
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListFunctions { dim } => {
            list_functions(dim);
            ExitCode::SUCCESS
        }
        Command::Run(args) => match run_command(*args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => {
                eprintln!("some runs failed; see the report");
                ExitCode::FAILURE
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
