//! Multi-seed experiments comparing uniform random starts with the learned
//! sampler under the same local method, and their reports.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::benchmarks::Registry;
use crate::driver::{run, run_baseline, RunTrace, TesalocsConfig};
use crate::error::{Error, Result};
use crate::local::LocalMethod;

/// Both arms count as winners when their mean errors are below this.
pub const CO_CONVERGENCE: f64 = 1e-8;

/// Relative gap under which two mean errors are treated as a tie.
pub const TIE_RELATIVE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Initializer {
    Random,
    Tesalocs,
}

impl Initializer {
    pub fn name(self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::Tesalocs => "tesalocs",
        }
    }
}

impl fmt::Display for Initializer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Initializer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(Self::Random),
            "tesalocs" => Ok(Self::Tesalocs),
            _ => Err(Error::InvalidArgument(format!("unknown initializer {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub functions: Vec<String>,
    pub dim: usize,
    pub repeats: usize,
    /// Seeds are `seed0 .. seed0 + repeats`.
    pub seed0: u64,
    pub methods: Vec<LocalMethod>,
    pub initializers: Vec<Initializer>,
    /// Shared settings; `base.seed` and `base.local.method` are overridden
    /// per run.
    pub base: TesalocsConfig,
    /// Where per-run trace CSVs go, if anywhere.
    pub trace_dir: Option<PathBuf>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            functions: Vec::new(),
            dim: 100,
            repeats: 10,
            seed0: 0,
            methods: vec![LocalMethod::Bfgs],
            initializers: vec![Initializer::Random, Initializer::Tesalocs],
            base: TesalocsConfig::default(),
            trace_dir: None,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self, registry: &Registry) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidArgument("repeats must be at least 1".into()));
        }
        if self.dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if self.methods.is_empty() || self.initializers.is_empty() {
            return Err(Error::InvalidArgument("method matrix is empty".into()));
        }
        for name in &self.functions {
            registry.lookup(name)?;
        }
        self.base.validate()
    }
}

/// One line of a report: a (function, method, initializer) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub function: String,
    pub method: LocalMethod,
    pub initializer: Initializer,
    /// Mean absolute error over successful seeds; `None` if all failed.
    pub mean_error: Option<f64>,
    /// Sample standard deviation of the per-seed errors.
    pub sigma: Option<f64>,
    pub seeds: Vec<u64>,
    pub errors: Vec<f64>,
    pub best_values: Vec<f64>,
    pub failures: Vec<CellFailure>,
    pub win: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub dim: usize,
    pub budget: usize,
    pub repeats: usize,
    pub rows: Vec<ReportRow>,
}

/// Progress notification for one finished run.
#[derive(Debug)]
pub struct RunEvent<'a> {
    pub function: &'a str,
    pub method: LocalMethod,
    pub initializer: Initializer,
    pub seed: u64,
    pub outcome: std::result::Result<&'a RunTrace, &'a str>,
}

/// Mean and sample standard deviation; `sigma` is 0 for a single value.
pub fn mean_and_sigma(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return Some((mean, 0.0));
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Some((mean, var.sqrt()))
}

/// Winner flags for competing mean errors: all win below
/// [`CO_CONVERGENCE`], otherwise the lowest wins together with anything tied
/// to it within [`TIE_RELATIVE`]. Missing errors never win.
pub fn winners(errors: &[Option<f64>]) -> Vec<bool> {
    let present: Vec<f64> = errors.iter().flatten().copied().collect();
    if present.is_empty() {
        return vec![false; errors.len()];
    }
    if present.iter().all(|&e| e < CO_CONVERGENCE) {
        return errors.iter().map(Option::is_some).collect();
    }
    let best = present.iter().copied().fold(f64::INFINITY, f64::min);
    errors
        .iter()
        .map(|e| match e {
            Some(e) => *e <= best || (*e - best) <= TIE_RELATIVE * e.abs().max(best.abs()),
            None => false,
        })
        .collect()
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    run_experiment_with(spec, &Registry::default(), &mut |_| {})
}

/// Runs every (function, method, initializer, seed) cell in a fixed order.
/// Failed runs are recorded in their row and left out of the aggregates.
pub fn run_experiment_with(
    spec: &ExperimentSpec,
    registry: &Registry,
    on_run: &mut dyn FnMut(&RunEvent<'_>),
) -> Result<ExperimentReport> {
    spec.validate(registry)?;
    if let Some(dir) = &spec.trace_dir {
        std::fs::create_dir_all(dir)?;
    }
    let d = spec.dim;
    let mut rows = Vec::new();
    for name in &spec.functions {
        let bench = *registry.lookup(name)?;
        let space = bench.space(d, spec.base.grid_nodes)?;
        let f = |x: &[f64]| bench.value(x);
        let first_row = rows.len();
        for &method in &spec.methods {
            let row_start = rows.len();
            for &init in &spec.initializers {
                let mut row = ReportRow {
                    function: bench.name().to_string(),
                    method,
                    initializer: init,
                    mean_error: None,
                    sigma: None,
                    seeds: Vec::new(),
                    errors: Vec::new(),
                    best_values: Vec::new(),
                    failures: Vec::new(),
                    win: false,
                };
                for seed in spec.seed0..spec.seed0 + spec.repeats as u64 {
                    let mut cfg = spec.base.clone();
                    cfg.seed = seed;
                    cfg.local.method = method;
                    let outcome = match init {
                        Initializer::Random => run_baseline(&f, &space, &cfg),
                        Initializer::Tesalocs => run(&f, &space, &cfg),
                    };
                    match outcome {
                        Ok(trace) => {
                            if let Some(dir) = &spec.trace_dir {
                                trace.save_csv(dir.join(trace_file_name(
                                    bench.name(),
                                    method,
                                    init,
                                    seed,
                                )))?;
                            }
                            on_run(&RunEvent {
                                function: bench.name(),
                                method,
                                initializer: init,
                                seed,
                                outcome: Ok(&trace),
                            });
                            row.seeds.push(seed);
                            row.best_values.push(trace.best_value);
                            row.errors.push(bench.error(trace.best_value, d));
                        }
                        Err(e) => {
                            let message = e.to_string();
                            on_run(&RunEvent {
                                function: bench.name(),
                                method,
                                initializer: init,
                                seed,
                                outcome: Err(&message),
                            });
                            row.failures.push(CellFailure { seed, message });
                        }
                    }
                }
                if let Some((m, s)) = mean_and_sigma(&row.errors) {
                    row.mean_error = Some(m);
                    row.sigma = Some(s);
                }
                rows.push(row);
            }
            let group = &mut rows[row_start..];
            let flags = winners(&group.iter().map(|r| r.mean_error).collect::<Vec<_>>());
            for (r, w) in group.iter_mut().zip(flags) {
                r.win = w;
            }
        }
        debug_assert!(rows.len() > first_row || spec.methods.is_empty());
    }
    Ok(ExperimentReport {
        dim: d,
        budget: spec.base.budget,
        repeats: spec.repeats,
        rows,
    })
}

pub fn trace_file_name(
    function: &str,
    method: LocalMethod,
    init: Initializer,
    seed: u64,
) -> String {
    format!(
        "trace_{}_{}_{}_seed{}.csv",
        function.to_ascii_lowercase(),
        method,
        init,
        seed
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Table,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "table" | "text" | "text-table" => Ok(Self::Table),
            _ => Err(Error::InvalidArgument(format!(
                "unknown report format {s:?}"
            ))),
        }
    }
}

fn opt_num(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), |x| format!("{x:e}"))
}

impl ExperimentReport {
    pub fn failed_runs(&self) -> usize {
        self.rows.iter().map(|r| r.failures.len()).sum()
    }

    /// Number of winning rows for a (method, initializer) column.
    pub fn wins(&self, method: LocalMethod, init: Initializer) -> usize {
        self.rows
            .iter()
            .filter(|r| r.method == method && r.initializer == init && r.win)
            .count()
    }

    pub fn row(
        &self,
        function: &str,
        method: LocalMethod,
        init: Initializer,
    ) -> Option<&ReportRow> {
        self.rows.iter().find(|r| {
            r.function.eq_ignore_ascii_case(function) && r.method == method && r.initializer == init
        })
    }

    /// `function,method,initializer,E,sigma,wins,seeds`, one line per row;
    /// `wins` is the row's win flag and `seeds` the number of aggregated seeds.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("function,method,initializer,E,sigma,wins,seeds\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.function,
                r.method,
                r.initializer,
                opt_num(r.mean_error),
                opt_num(r.sigma),
                u8::from(r.win),
                r.seeds.len()
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Fixed-width table: one block per function with `E` and `sigma` lines,
    /// a column pair per method, winners marked with `*`, and win counts on
    /// top.
    pub fn to_table(&self) -> String {
        let mut methods: Vec<LocalMethod> = Vec::new();
        let mut inits: Vec<Initializer> = Vec::new();
        let mut functions: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !methods.contains(&r.method) {
                methods.push(r.method);
            }
            if !inits.contains(&r.initializer) {
                inits.push(r.initializer);
            }
            if !functions.contains(&r.function.as_str()) {
                functions.push(&r.function);
            }
        }
        let w = 11;
        let mut out = String::new();
        let _ = write!(out, "{:<16}{:<7}", "Function", "");
        for m in &methods {
            for i in &inits {
                let _ = write!(out, "{:>w$}", format!("{m}/{i}"));
            }
        }
        out.push('\n');
        let _ = write!(out, "{:<23}", "# of best results");
        for &m in &methods {
            for &i in &inits {
                let _ = write!(out, "{:>w$}", self.wins(m, i));
            }
        }
        out.push('\n');
        for f in functions {
            for (label, pick) in [("E", 0), ("sigma", 1)] {
                let _ = write!(out, "{:<16}{:<7}", if pick == 0 { f } else { "" }, label);
                for &m in &methods {
                    for &i in &inits {
                        let cell = match self.row(f, m, i) {
                            Some(r) => {
                                let v = if pick == 0 { r.mean_error } else { r.sigma };
                                let mark = if pick == 0 && r.win { "*" } else { "" };
                                format!("{mark}{}", v.map_or("nan".into(), |x| format!("{x:.1e}")))
                            }
                            None => "-".into(),
                        };
                        let _ = write!(out, "{cell:>w$}");
                    }
                }
                out.push('\n');
            }
        }
        let failed = self.failed_runs();
        if failed > 0 {
            let _ = writeln!(out, "failed runs: {failed}");
        }
        out
    }
}

/// Writes the report in `format` to `dir` and returns the file path.
pub fn emit_report(
    report: &ExperimentReport,
    format: ReportFormat,
    dir: impl AsRef<Path>,
) -> Result<PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let (name, body) = match format {
        ReportFormat::Csv => ("report.csv", report.to_csv()),
        ReportFormat::Json => ("report.json", report.to_json()?),
        ReportFormat::Table => ("report.txt", report.to_table()),
    };
    let path = dir.join(name);
    std::fs::write(&path, body)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_deviation() {
        let (m, s) = mean_and_sigma(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!(m, 5.0);
        // Sum of squared deviations is 32 over 7 degrees of freedom.
        assert!((s - (32.0f64 / 7.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_sigma(&[3.0]), Some((3.0, 0.0)));
        assert_eq!(mean_and_sigma(&[]), None);
    }

    #[test]
    fn win_rule() {
        assert_eq!(winners(&[Some(20.0), Some(18.0)]), [false, true]);
        assert_eq!(winners(&[Some(1.8e-22), Some(1.2e-9)]), [true, true]);
        assert_eq!(winners(&[Some(1.3e-18), Some(6.2e-8)]), [true, false]);
        assert_eq!(winners(&[Some(0.0), Some(0.0)]), [true, true]);
        let plateau = 2.0 / 3.0;
        assert_eq!(
            winners(&[Some(plateau), Some(plateau + 1e-15)]),
            [true, true]
        );
        assert_eq!(winners(&[None, Some(5.0)]), [false, true]);
        assert_eq!(winners(&[None, None]), [false, false]);
    }

    #[test]
    fn initializer_names() {
        for i in [Initializer::Random, Initializer::Tesalocs] {
            assert_eq!(i.name().parse::<Initializer>().unwrap(), i);
        }
        assert!("uniform".parse::<Initializer>().is_err());
    }

    #[test]
    fn empty_report_csv_is_header_only() {
        let r = ExperimentReport {
            dim: 2,
            budget: 10,
            repeats: 1,
            rows: vec![],
        };
        assert_eq!(
            r.to_csv(),
            "function,method,initializer,E,sigma,wins,seeds\n"
        );
    }

    #[test]
    fn unknown_function_rejected() {
        let spec = ExperimentSpec {
            functions: vec!["Nope".into()],
            ..Default::default()
        };
        assert!(matches!(
            run_experiment(&spec),
            Err(Error::UnknownFunction(_))
        ));
    }
}
