//! Analytic benchmark functions with their default boxes and known minima.
//!
//! Each entry pins one literature variant; the formula is stored next to the
//! code (see [`Benchmark::formula`]) so reports are reproducible. Indices in
//! the formulas are 1-based. All functions accept any `d >= 1`.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::grid::SearchSpace;

/// Value of the Dixon–Price local minimum at `x = (1/3, 0, ..., 0)`.
///
/// Gradient methods started at random points tend to stall on this plateau,
/// so errors of about 0.67 are expected there rather than convergence to 0.
pub const DIXON_PRICE_PLATEAU: f64 = 2.0 / 3.0;

/// One benchmark: a pure function plus metadata. Users can build their own
/// with [`Benchmark::new`] and add them to a [`Registry`].
#[derive(Clone, Copy)]
pub struct Benchmark {
    name: &'static str,
    formula: &'static str,
    f: fn(&[f64]) -> f64,
    bounds: fn(usize) -> (f64, f64),
    minimum: fn(usize) -> f64,
    minimizer: Option<fn(usize) -> Vec<f64>>,
}

impl std::fmt::Debug for Benchmark {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Benchmark")
            .field("name", &self.name)
            .finish()
    }
}

impl Benchmark {
    pub const fn new(
        name: &'static str,
        formula: &'static str,
        f: fn(&[f64]) -> f64,
        bounds: fn(usize) -> (f64, f64),
        minimum: fn(usize) -> f64,
    ) -> Self {
        Self {
            name,
            formula,
            f,
            bounds,
            minimum,
            minimizer: None,
        }
    }

    pub const fn with_minimizer(mut self, x: fn(usize) -> Vec<f64>) -> Self {
        self.minimizer = Some(x);
        self
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn formula(&self) -> &'static str {
        self.formula
    }

    /// Per-coordinate default box `(a, b)` at dimension `d`.
    pub fn bounds(&self, d: usize) -> (f64, f64) {
        (self.bounds)(d)
    }

    pub fn space(&self, d: usize, nodes: usize) -> Result<SearchSpace> {
        let (a, b) = self.bounds(d);
        SearchSpace::uniform(d, a, b, nodes)
    }

    /// Known global minimum value `f*` at dimension `d`.
    pub fn min_value(&self, d: usize) -> f64 {
        (self.minimum)(d)
    }

    /// Closed-form global minimizer, when one is known.
    pub fn minimizer(&self, d: usize) -> Option<Vec<f64>> {
        self.minimizer.map(|x| x(d))
    }

    /// Evaluates at `x`, checking it has the experiment's dimension.
    pub fn evaluate(&self, x: &[f64], dim: usize) -> Result<f64> {
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: x.len(),
            });
        }
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "benchmark dimension must be positive".into(),
            ));
        }
        Ok((self.f)(x))
    }

    /// Unchecked evaluation for hot loops.
    pub fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    /// Absolute error `|y - f*|` at dimension `d`.
    pub fn error(&self, y: f64, d: usize) -> f64 {
        (y - self.min_value(d)).abs()
    }
}

/// Named collection of benchmarks; starts with the built-in catalog.
#[derive(Debug, Clone)]
pub struct Registry {
    entries: Vec<Benchmark>,
}

impl Default for Registry {
    fn default() -> Self {
        Self { entries: catalog() }
    }
}

impl Registry {
    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    /// Adds a function; names are case-insensitive and must be unique.
    pub fn register(&mut self, b: Benchmark) -> Result<()> {
        if self.get(b.name).is_some() {
            return Err(Error::InvalidArgument(format!(
                "benchmark {:?} already registered",
                b.name
            )));
        }
        self.entries.push(b);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Benchmark> {
        self.entries
            .iter()
            .find(|b| b.name.eq_ignore_ascii_case(name))
    }

    pub fn lookup(&self, name: &str) -> Result<&Benchmark> {
        self.get(name)
            .ok_or_else(|| Error::UnknownFunction(name.to_string()))
    }

    pub fn entries(&self) -> &[Benchmark] {
        &self.entries
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|b| b.name).collect()
    }
}

/// Looks a built-in function up by name (case-insensitive).
pub fn lookup(name: &str) -> Result<Benchmark> {
    catalog()
        .into_iter()
        .find(|b| b.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownFunction(name.to_string()))
}

fn zero(_: usize) -> f64 {
    0.0
}

fn origin(d: usize) -> Vec<f64> {
    vec![0.0; d]
}

fn sym(a: f64) -> (f64, f64) {
    (-a, a)
}

/// The 20 built-in functions, in report order.
pub fn catalog() -> Vec<Benchmark> {
    vec![
        Benchmark::new(
            "Ackley",
            "-20 exp(-0.2 sqrt(mean x_i^2)) - exp(mean cos(2 pi x_i)) + 20 + e",
            ackley,
            |_| sym(32.768),
            zero,
        )
        .with_minimizer(origin),
        Benchmark::new("Alpine", "sum |x_i sin(x_i) + 0.1 x_i|", alpine, |_| sym(10.0), zero)
            .with_minimizer(origin),
        Benchmark::new("Chung", "(sum x_i^2)^2", chung, |_| sym(100.0), zero)
            .with_minimizer(origin),
        Benchmark::new(
            "Dixon",
            "(x_1 - 1)^2 + sum_{i>=2} i (2 x_i^2 - x_{i-1})^2",
            dixon,
            |_| sym(10.0),
            zero,
        )
        .with_minimizer(dixon_minimizer),
        Benchmark::new("Exp", "-exp(-0.5 sum x_i^2)", exp_fn, |_| sym(1.0), |_| -1.0)
            .with_minimizer(origin),
        Benchmark::new(
            "Griewank",
            "sum x_i^2 / 4000 - prod cos(x_i / sqrt(i)) + 1",
            griewank,
            |_| sym(600.0),
            zero,
        )
        .with_minimizer(origin),
        Benchmark::new(
            "Pathological",
            "sum_{i<d} 0.5 + (sin^2 sqrt(100 x_i^2 + x_{i+1}^2) - 0.5) / (1 + 0.001 (x_i - x_{i+1})^4)",
            pathological,
            |_| sym(100.0),
            zero,
        )
        .with_minimizer(origin),
        Benchmark::new(
            "Pinter",
            "sum i x_i^2 + 20 i sin^2(A_i) + i log10(1 + i B_i^2), \
             A_i = x_{i-1} sin x_i + sin x_{i+1}, \
             B_i = x_{i-1}^2 - 2 x_i + 3 x_{i+1} - cos x_i + 1, x_0 = x_d, x_{d+1} = x_1",
            pinter,
            |_| sym(10.0),
            zero,
        )
        .with_minimizer(origin),
        Benchmark::new(
            "Powell",
            "sum over blocks j of 4: (x_{4j-3} + 10 x_{4j-2})^2 + 5 (x_{4j-1} - x_{4j})^2 \
             + (x_{4j-2} - 2 x_{4j-1})^4 + 10 (x_{4j-3} - x_{4j})^4; \
             missing trailing coordinates are taken as 0",
            powell,
            |_| (-4.0, 5.0),
            zero,
        )
        .with_minimizer(origin),
        Benchmark::new("Qing", "sum (x_i^2 - i)^2", qing, |_| sym(500.0), zero)
            .with_minimizer(|d| (1..=d).map(|i| (i as f64).sqrt()).collect()),
        Benchmark::new(
            "Rastrigin",
            "10 d + sum (x_i^2 - 10 cos(2 pi x_i))",
            rastrigin,
            |_| sym(5.12),
            zero,
        )
        .with_minimizer(origin),
        Benchmark::new(
            "Rosenbrock",
            "sum_{i<d} 100 (x_{i+1} - x_i^2)^2 + (x_i - 1)^2",
            rosenbrock,
            |_| sym(2.048),
            zero,
        )
        .with_minimizer(|d| vec![1.0; d]),
        Benchmark::new(
            "Salomon",
            "1 - cos(2 pi |x|) + 0.1 |x|",
            salomon,
            |_| sym(100.0),
            zero,
        )
        .with_minimizer(origin),
        Benchmark::new(
            "Schaffer",
            "sum_{i<d} 0.5 + (sin^2 sqrt(x_i^2 + x_{i+1}^2) - 0.5) / (1 + 0.001 (x_i^2 + x_{i+1}^2))^2",
            schaffer,
            |_| sym(100.0),
            zero,
        )
        .with_minimizer(origin),
        Benchmark::new("Sphere", "sum x_i^2", sphere, |_| sym(5.12), zero).with_minimizer(origin),
        Benchmark::new("Squares", "sum i x_i^2", squares, |_| sym(10.0), zero)
            .with_minimizer(origin),
        Benchmark::new(
            "Trid",
            "sum (x_i - 1)^2 - sum_{i>=2} x_i x_{i-1}",
            trid,
            |d| sym((d * d) as f64),
            trid_minimum,
        )
        .with_minimizer(|d| (1..=d).map(|i| (i * (d + 1 - i)) as f64).collect()),
        Benchmark::new(
            "Trigonometric",
            "sum_i (d - sum_j cos x_j + i (1 - cos x_i - sin x_i))^2",
            trigonometric,
            |_| (0.0, PI),
            zero,
        )
        .with_minimizer(origin),
        Benchmark::new(
            "Wavy",
            "1 - (1/d) sum cos(10 x_i) exp(-x_i^2 / 2)",
            wavy,
            |_| sym(PI),
            zero,
        )
        .with_minimizer(origin),
        Benchmark::new(
            "Yang",
            "(sum |x_i|) exp(-sum sin(x_i^2))",
            yang,
            |_| sym(2.0 * PI),
            zero,
        )
        .with_minimizer(origin),
    ]
}

fn ackley(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let sq = x.iter().map(|v| v * v).sum::<f64>() / d;
    let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
    -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
}

fn alpine(x: &[f64]) -> f64 {
    x.iter().map(|v| (v * v.sin() + 0.1 * v).abs()).sum()
}

fn chung(x: &[f64]) -> f64 {
    let s: f64 = x.iter().map(|v| v * v).sum();
    s * s
}

fn dixon(x: &[f64]) -> f64 {
    let head = (x[0] - 1.0).powi(2);
    head + x
        .windows(2)
        .enumerate()
        .map(|(j, w)| (j + 2) as f64 * (2.0 * w[1] * w[1] - w[0]).powi(2))
        .sum::<f64>()
}

/// `x_i = 2^{-(2^i - 2) / 2^i}`.
fn dixon_minimizer(d: usize) -> Vec<f64> {
    (1..=d)
        .map(|i| {
            let p = 2f64.powi(i as i32);
            2f64.powf(-(p - 2.0) / p)
        })
        .collect()
}

fn exp_fn(x: &[f64]) -> f64 {
    -(-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp()
}

fn griewank(x: &[f64]) -> f64 {
    let s: f64 = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
    let p: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product();
    s - p + 1.0
}

fn pathological(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let s = (100.0 * w[0] * w[0] + w[1] * w[1]).sqrt().sin();
            let q = w[0] * w[0] - 2.0 * w[0] * w[1] + w[1] * w[1];
            0.5 + (s * s - 0.5) / (1.0 + 0.001 * q * q)
        })
        .sum()
}

fn pinter(x: &[f64]) -> f64 {
    let d = x.len();
    (0..d)
        .map(|k| {
            let i = (k + 1) as f64;
            let prev = x[(k + d - 1) % d];
            let cur = x[k];
            let next = x[(k + 1) % d];
            let a = prev * cur.sin() + next.sin();
            let b = prev * prev - 2.0 * cur + 3.0 * next - cur.cos() + 1.0;
            i * cur * cur + 20.0 * i * a.sin().powi(2) + i * (1.0 + i * b * b).log10()
        })
        .sum()
}

fn powell(x: &[f64]) -> f64 {
    x.chunks(4)
        .map(|c| {
            let g = |j: usize| c.get(j).copied().unwrap_or(0.0);
            let (a, b, c, d) = (g(0), g(1), g(2), g(3));
            (a + 10.0 * b).powi(2)
                + 5.0 * (c - d).powi(2)
                + (b - 2.0 * c).powi(4)
                + 10.0 * (a - d).powi(4)
        })
        .sum()
}

fn qing(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(k, v)| (v * v - (k + 1) as f64).powi(2))
        .sum()
}

fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}

fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

fn salomon(x: &[f64]) -> f64 {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    1.0 - (2.0 * PI * r).cos() + 0.1 * r
}

fn schaffer(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let r2 = w[0] * w[0] + w[1] * w[1];
            let s = r2.sqrt().sin();
            0.5 + (s * s - 0.5) / (1.0 + 0.001 * r2).powi(2)
        })
        .sum()
}

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn squares(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(k, v)| (k + 1) as f64 * v * v)
        .sum()
}

fn trid(x: &[f64]) -> f64 {
    let a: f64 = x.iter().map(|v| (v - 1.0).powi(2)).sum();
    let b: f64 = x.windows(2).map(|w| w[0] * w[1]).sum();
    a - b
}

fn trid_minimum(d: usize) -> f64 {
    let d = d as f64;
    -d * (d + 4.0) * (d - 1.0) / 6.0
}

fn trigonometric(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let c: f64 = x.iter().map(|v| v.cos()).sum();
    x.iter()
        .enumerate()
        .map(|(k, v)| {
            let i = (k + 1) as f64;
            (d - c + i * (1.0 - v.cos() - v.sin())).powi(2)
        })
        .sum()
}

fn wavy(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    1.0 - x
        .iter()
        .map(|v| (10.0 * v).cos() * (-v * v / 2.0).exp())
        .sum::<f64>()
        / d
}

fn yang(x: &[f64]) -> f64 {
    let a: f64 = x.iter().map(|v| v.abs()).sum();
    let s: f64 = x.iter().map(|v| (v * v).sin()).sum();
    a * (-s).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_functions_in_order() {
        let names: Vec<_> = catalog().iter().map(|b| b.name()).collect();
        assert_eq!(
            names,
            [
                "Ackley",
                "Alpine",
                "Chung",
                "Dixon",
                "Exp",
                "Griewank",
                "Pathological",
                "Pinter",
                "Powell",
                "Qing",
                "Rastrigin",
                "Rosenbrock",
                "Salomon",
                "Schaffer",
                "Sphere",
                "Squares",
                "Trid",
                "Trigonometric",
                "Wavy",
                "Yang"
            ]
        );
    }

    #[test]
    fn trivial_points() {
        let at = |n: &str, x: &[f64]| lookup(n).unwrap().value(x);
        assert_eq!(at("Sphere", &[0.0; 3]), 0.0);
        assert_eq!(at("Rosenbrock", &[1.0; 4]), 0.0);
        assert!(at("Ackley", &[0.0; 5]).abs() < 1e-15);
        assert_eq!(at("Rastrigin", &[0.0; 5]), 0.0);
        assert_eq!(at("Griewank", &[0.0; 5]), 0.0);
    }

    #[test]
    fn hand_computed_values() {
        // Values worked out by hand at simple points.
        let at = |n: &str, x: &[f64]| lookup(n).unwrap().value(x);
        assert_eq!(at("Sphere", &[1.0, 2.0]), 5.0);
        assert_eq!(at("Squares", &[1.0, 2.0]), 9.0);
        assert_eq!(at("Chung", &[1.0, 2.0]), 25.0);
        assert_eq!(at("Qing", &[0.0, 0.0]), 5.0);
        assert_eq!(at("Rosenbrock", &[0.0, 0.0]), 1.0);
        assert_eq!(at("Dixon", &[0.0, 0.0]), 1.0);
        assert_eq!(at("Trid", &[0.0, 0.0]), 2.0);
        assert_eq!(at("Powell", &[1.0, 0.0, 0.0, 0.0]), 1.0 + 10.0);
        assert!((at("Rastrigin", &[0.5]) - 20.25).abs() < 1e-12);
        assert!((at("Exp", &[1.0, 1.0]) + (-1.0f64).exp()).abs() < 1e-15);
        assert!((at("Wavy", &[PI]) - (1.0 - (-PI * PI / 2.0).exp())).abs() < 1e-12);
    }

    #[test]
    fn trid_minimum_closed_form() {
        assert_eq!(trid_minimum(2), -2.0);
        assert_eq!(trid_minimum(6), -50.0);
        assert_eq!(trid_minimum(10), -210.0);
    }

    #[test]
    fn dixon_plateau_is_stationary() {
        let mut x = vec![0.0; 10];
        x[0] = 1.0 / 3.0;
        assert!((dixon(&x) - DIXON_PRICE_PLATEAU).abs() < 1e-15);
        let h = 1e-6;
        for i in 0..x.len() {
            let mut p = x.clone();
            let mut m = x.clone();
            p[i] += h;
            m[i] -= h;
            assert!(((dixon(&p) - dixon(&m)) / (2.0 * h)).abs() < 1e-6);
        }
    }

    #[test]
    fn dimension_checked() {
        let b = lookup("sphere").unwrap();
        assert!(matches!(
            b.evaluate(&[1.0], 2),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(b.evaluate(&[1.0, 1.0], 2).unwrap(), 2.0);
        assert!(matches!(lookup("nope"), Err(Error::UnknownFunction(_))));
    }

    #[test]
    fn registry_hook() {
        let mut r = Registry::default();
        let custom = Benchmark::new(
            "Abs",
            "sum |x_i|",
            |x| x.iter().map(|v| v.abs()).sum(),
            |_| (-1.0, 1.0),
            |_| 0.0,
        );
        r.register(custom).unwrap();
        assert_eq!(r.entries().len(), 21);
        assert_eq!(r.lookup("abs").unwrap().value(&[-1.0, 2.0]), 3.0);
        assert!(r.register(custom).is_err());
        assert!(r.register(lookup("Sphere").unwrap()).is_err());
    }
}
