use proptest::prelude::*;
use tesalocs::local::{
    numerical_gradient, refine, LocalMethod, LocalSearchConfig, MeteredObjective, RunStatus,
};
use tesalocs::SearchSpace;

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

fn single(
    f: impl Fn(&[f64]) -> f64,
    start: Vec<f64>,
    space: &SearchSpace,
    cfg: &LocalSearchConfig,
    seed: u64,
) -> (Vec<f64>, f64, RunStatus, usize) {
    let obj = MeteredObjective::new(f);
    let res = refine(&obj, &[start], space, cfg, seed, 0).unwrap();
    assert_eq!(res.evals_spent, obj.evaluations_used());
    (
        res.refined_points[0].clone(),
        res.values[0],
        res.statuses[0],
        res.evals_spent,
    )
}

#[test]
fn bfgs_solves_sphere() {
    let space = SearchSpace::uniform(10, -5.12, 5.12, 64).unwrap();
    let start: Vec<f64> = (0..10).map(|i| 4.0 - 0.7 * i as f64).collect();
    let (_, fx, _, _) = single(sphere, start, &space, &LocalSearchConfig::default(), 0);
    assert!(fx < 1e-10, "{fx}");
}

#[test]
fn bfgs_solves_rosenbrock_from_classic_start() {
    let space = SearchSpace::uniform(2, -2.048, 2.048, 64).unwrap();
    let mut cfg = LocalSearchConfig::default();
    cfg.max_evals_per_candidate = Some(500);
    let (x, fx, _, evals) = single(rosenbrock, vec![-1.2, 1.0], &space, &cfg, 0);
    assert!(evals <= 500);
    assert!(fx < 1e-6, "f = {fx} at {x:?} after {evals}");
}

#[test]
fn cg_solves_rosenbrock() {
    let space = SearchSpace::uniform(2, -2.048, 2.048, 64).unwrap();
    let cfg = LocalSearchConfig::with_method(LocalMethod::Cg);
    let (_, fx, _, _) = single(rosenbrock, vec![-1.2, 1.0], &space, &cfg, 0);
    assert!(fx < 1e-6, "{fx}");
}

#[test]
fn bfgs_finishes_quadratic_quickly() {
    // Exact line searches would need d iterations; backtracking on a
    // quadratic adds a few. Each iteration costs 2d + O(1) evaluations.
    let d = 6;
    let weights: Vec<f64> = (1..=d).map(|i| i as f64).collect();
    let f = |x: &[f64]| {
        x.iter()
            .zip(&weights)
            .map(|(v, w)| w * (v - 1.0).powi(2))
            .sum::<f64>()
    };
    let space = SearchSpace::uniform(d, -5.0, 5.0, 64).unwrap();
    let (x, fx, status, evals) = single(f, vec![-3.0; d], &space, &LocalSearchConfig::default(), 0);
    assert_eq!(status, RunStatus::Converged);
    assert!(fx < 1e-12, "{fx}");
    assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-6));
    assert!(evals <= 4 * (d + 2) * (2 * d + 4), "{evals}");
}

#[test]
fn per_candidate_cap_is_exact_bound() {
    let space = SearchSpace::uniform(5, -2.048, 2.048, 64).unwrap();
    for method in LocalMethod::ALL {
        let mut cfg = LocalSearchConfig::with_method(method);
        cfg.max_evals_per_candidate = Some(37);
        let starts = vec![vec![-1.5; 5], vec![1.0, -1.0, 0.5, 0.0, 2.0]];
        let obj = MeteredObjective::new(rosenbrock);
        let res = refine(&obj, &starts, &space, &cfg, 3, 0).unwrap();
        assert_eq!(res.values.len(), 2);
        assert!(res.evals_spent <= 74, "{method}: {}", res.evals_spent);
        assert!(!res.budget_exhausted);
    }
}

#[test]
fn global_budget_stops_refinement() {
    let space = SearchSpace::uniform(4, -2.048, 2.048, 64).unwrap();
    let obj = MeteredObjective::with_cap(rosenbrock, 100);
    let starts = vec![vec![-1.0; 4]; 5];
    let res = refine(&obj, &starts, &space, &LocalSearchConfig::default(), 0, 0).unwrap();
    assert!(res.budget_exhausted);
    assert!(obj.evaluations_used() <= 100);
    assert_eq!(res.evals_spent, obj.evaluations_used());
}

#[test]
fn gradient_costs_two_d() {
    let obj = MeteredObjective::with_cap(sphere, 10);
    let g = numerical_gradient(&obj, &[1.0, -2.0, 0.5], 1e-6).unwrap();
    assert_eq!(obj.evaluations_used(), 6);
    for (gi, want) in g.iter().zip([2.0, -4.0, 1.0]) {
        assert!((gi - want).abs() < 1e-6);
    }
    assert!(numerical_gradient(&obj, &[1.0, -2.0, 0.5], 1e-6).is_err());
    assert_eq!(obj.evaluations_used(), 6);
}

#[test]
fn stochastic_methods_are_seeded() {
    let space = SearchSpace::uniform(6, -5.12, 5.12, 64).unwrap();
    let rastrigin = |x: &[f64]| {
        10.0 * x.len() as f64
            + x.iter()
                .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
                .sum::<f64>()
    };
    for method in [LocalMethod::Pso, LocalMethod::Spsa] {
        let mut cfg = LocalSearchConfig::with_method(method);
        cfg.max_evals_per_candidate = Some(1500);
        let start = vec![3.3, -2.1, 0.4, 4.9, -5.0, 1.1];
        let a = single(rastrigin, start.clone(), &space, &cfg, 17);
        let b = single(rastrigin, start.clone(), &space, &cfg, 17);
        let c = single(rastrigin, start.clone(), &space, &cfg, 18);
        assert_eq!(a.0, b.0, "{method}");
        assert_eq!(a.1.to_bits(), b.1.to_bits());
        assert_ne!(a.0, c.0, "{method}");
        assert!(a.1 < rastrigin(&start), "{method} did not improve");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Refined values never exceed the start value and points stay in the box.
    #[test]
    fn refinement_is_monotone_and_boxed(
        method in prop::sample::select(LocalMethod::ALL.to_vec()),
        start in prop::collection::vec(-2.048f64..2.048, 4),
        seed in any::<u64>(),
    ) {
        let space = SearchSpace::uniform(4, -2.048, 2.048, 64).unwrap();
        let mut cfg = LocalSearchConfig::with_method(method);
        cfg.max_evals_per_candidate = Some(400);
        let (x, fx, _, _) = single(rosenbrock, start.clone(), &space, &cfg, seed);
        prop_assert!(fx <= rosenbrock(&start));
        prop_assert!(space.contains(&x));
        prop_assert_eq!(fx, rosenbrock(&x));
    }
}
