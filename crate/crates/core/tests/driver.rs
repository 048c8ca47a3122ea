use std::cell::Cell;

use proptest::prelude::*;
use tesalocs::benchmarks::lookup;
use tesalocs::driver::{run, run_baseline, run_with_model, TesalocsConfig};
use tesalocs::harness::{run_experiment, ExperimentReport, ExperimentSpec, Initializer};
use tesalocs::local::{LocalMethod, LocalSearchConfig};
use tesalocs::{LearnerConfig, SearchSpace, TtDistribution};

fn config(method: LocalMethod, budget: usize, seed: u64) -> TesalocsConfig {
    TesalocsConfig {
        budget,
        grid_nodes: 17,
        rank: 3,
        batch: 12,
        elite: 4,
        local: LocalSearchConfig::with_method(method),
        seed,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn every_evaluation_is_counted(
        method in prop::sample::select(LocalMethod::ALL.to_vec()),
        d in 1usize..=6,
        budget in 1usize..3000,
        cap in prop::option::of(1usize..300),
        baseline in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let f = lookup("Rosenbrock").unwrap();
        let space = f.space(d, 17).unwrap();
        let mut cfg = config(method, budget, seed);
        cfg.local.max_evals_per_candidate = cap;
        let calls = Cell::new(0usize);
        let obj = |x: &[f64]| {
            calls.set(calls.get() + 1);
            f.value(x)
        };
        let t = if baseline { run_baseline(&obj, &space, &cfg) } else { run(&obj, &space, &cfg) }.unwrap();
        prop_assert_eq!(t.evaluations, calls.get());
        prop_assert!(t.evaluations <= budget);
        prop_assert_eq!(t.records.last().unwrap().evals, t.evaluations);
        prop_assert!(t.records.windows(2).all(|w| w[1].best_value <= w[0].best_value));
        prop_assert_eq!(t.best_value, f.value(&t.best_point));
    }
}

#[test]
fn traces_are_reproducible() {
    let f = lookup("Rastrigin").unwrap();
    let space = f.space(8, 17).unwrap();
    for method in LocalMethod::ALL {
        let cfg = config(method, 4000, 42);
        let a = run(&|x| f.value(x), &space, &cfg).unwrap();
        let b = run(&|x| f.value(x), &space, &cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv(), "{method}");
        assert_eq!(a.best_point, b.best_point);
        let c = run_baseline(&|x| f.value(x), &space, &cfg).unwrap();
        let e = run_baseline(&|x| f.value(x), &space, &cfg).unwrap();
        assert_eq!(c.to_csv(), e.to_csv(), "{method}");
    }
}

#[test]
fn zero_learning_rate_freezes_model() {
    let f = lookup("Sphere").unwrap();
    let space = f.space(4, 17).unwrap();
    let mut cfg = config(LocalMethod::None, 600, 3);
    cfg.learner = LearnerConfig {
        learning_rate: 0.0,
        ..Default::default()
    };
    let mut seen: Vec<TtDistribution> = Vec::new();
    run_with_model(&|x| f.value(x), &space, &cfg, |m| seen.push(m.clone())).unwrap();
    assert!(seen.len() > 10);
    assert!(seen.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn learning_finds_separable_grid_minimum() {
    // Each axis has a broad shallow basin and a narrow deep one.
    let f = |x: &[f64]| {
        x.iter()
            .map(|&v| {
                if (v - 0.6).abs() < 0.05 {
                    -2.0
                } else {
                    0.1 * (v + 0.6).powi(2)
                }
            })
            .sum::<f64>()
    };
    let space = SearchSpace::uniform(4, -1.0, 1.0, 11).unwrap();
    let mut cfg = config(LocalMethod::None, 3000, 0);
    cfg.grid_nodes = 11;
    let t = run(&f, &space, &cfg).unwrap();
    assert_eq!(t.best_value, -8.0);
}

#[test]
fn rejects_bad_configs() {
    let space = SearchSpace::uniform(2, -1.0, 1.0, 17).unwrap();
    let f = |x: &[f64]| x[0];
    let mut cfg = config(LocalMethod::Bfgs, 100, 0);
    cfg.elite = cfg.batch + 1;
    assert!(run(&f, &space, &cfg).is_err());
    let mut cfg = config(LocalMethod::Bfgs, 0, 0);
    cfg.budget = 0;
    assert!(run(&f, &space, &cfg).is_err());
}

fn small_spec(trace_dir: Option<std::path::PathBuf>) -> ExperimentSpec {
    ExperimentSpec {
        functions: vec!["Sphere".into(), "Rastrigin".into(), "Trid".into()],
        dim: 4,
        repeats: 3,
        methods: vec![LocalMethod::Bfgs, LocalMethod::None],
        base: TesalocsConfig {
            budget: 800,
            grid_nodes: 33,
            rank: 2,
            batch: 10,
            elite: 3,
            ..Default::default()
        },
        trace_dir,
        ..Default::default()
    }
}

#[test]
fn experiment_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec(Some(dir.path().to_path_buf()));
    let report = run_experiment(&spec).unwrap();
    assert_eq!(report.rows.len(), 3 * 2 * 2);
    assert_eq!(report.failed_runs(), 0);
    for row in &report.rows {
        assert_eq!(row.errors.len(), 3);
        assert!(row.errors.iter().all(|&e| e >= 0.0));
    }
    // Each (function, method) cell has at least one winner.
    for chunk in report.rows.chunks(2) {
        assert!(chunk.iter().any(|r| r.win));
    }
    let back = ExperimentReport::from_json(&report.to_json().unwrap()).unwrap();
    assert_eq!(back, report);
    assert_eq!(report.to_csv().lines().count(), 1 + report.rows.len());
    let traces = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(traces, 3 * 2 * 2 * 3);
    let wins: usize = [Initializer::Random, Initializer::Tesalocs]
        .into_iter()
        .map(|i| report.wins(LocalMethod::Bfgs, i))
        .sum();
    assert!(wins >= 3);
}

#[test]
fn experiments_are_reproducible() {
    let a = run_experiment(&small_spec(None)).unwrap();
    let b = run_experiment(&small_spec(None)).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
}
