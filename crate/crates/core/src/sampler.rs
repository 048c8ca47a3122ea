//! Exact sequential sampling from a non-negative tensor train.
//!
//! A multi-index is drawn one mode at a time. With the suffix interfaces
//! `S_i` precomputed, the conditional weight of value `m` at mode `i` given
//! the prefix is `v_{i-1}^T G_i[:, m, :] S_i`, where `v_{i-1}` is the product
//! of the already chosen core slices. Folding `S_i` into the core once per
//! batch (`U_i = G_i ×_3 S_i`) makes each draw cost `O(d · N · R)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::tt::{renormalize, TtDistribution};

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub indices: Vec<Vec<usize>>,
    /// Natural log of the unnormalized tensor entry of each sample.
    pub log_weights: Option<Vec<f64>>,
    /// Number of modes where every conditional weight vanished and the value
    /// was drawn uniformly instead.
    pub fallback_modes: usize,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Per-batch precomputation: `U_i[a, m] = sum_b G_i[a, m, b] S_i[b]`.
struct Folded {
    left: usize,
    modes: usize,
    data: Vec<f64>,
}

fn fold_suffixes(t: &TtDistribution) -> Result<Vec<Folded>> {
    let suffix = t.normalized_suffixes()?;
    Ok(t.cores()
        .iter()
        .enumerate()
        .map(|(i, core)| {
            let (left, modes, right) = core.shape();
            let s = &suffix[i + 1];
            // Row-major (a, m) order matches the core's own layout.
            let data: Vec<f64> = core
                .data()
                .chunks_exact(right)
                .map(|row| crate::tt::dot(row, s))
                .collect();
            Folded { left, modes, data }
        })
        .collect())
}

/// Weights `w(m) = v^T U[:, m]` with negative round-off clamped to zero.
fn conditional_weights(folded: &Folded, v: &[f64], out: &mut Vec<f64>) -> f64 {
    out.clear();
    out.resize(folded.modes, 0.0);
    for a in 0..folded.left {
        let va = v[a];
        if va == 0.0 {
            continue;
        }
        let row = &folded.data[a * folded.modes..(a + 1) * folded.modes];
        for (o, u) in out.iter_mut().zip(row) {
            *o += va * u;
        }
    }
    let mut total = 0.0;
    for w in out.iter_mut() {
        if !(*w > 0.0) {
            *w = 0.0;
        }
        total += *w;
    }
    total
}

/// Inverse-CDF draw from unnormalized `weights` with total `total > 0`.
fn inverse_cdf(weights: &[f64], total: f64, u: f64) -> usize {
    let target = u * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (m, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = m;
            if target < acc {
                return m;
            }
        }
    }
    last_positive
}

/// Draws `k` independent multi-indices with probability `eval(t, n) / mass(t)`.
///
/// Sample `l` uses its own ChaCha stream of `seed`, so a batch can be split
/// across workers without changing the result.
pub fn sample(t: &TtDistribution, k: usize, seed: u64) -> Result<SampleBatch> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be positive".into(),
        ));
    }
    let log_mass = t.log_mass()?;
    if !log_mass.is_finite() {
        return Err(Error::DegenerateModel(format!("log mass is {log_mass}")));
    }
    let folded = fold_suffixes(t)?;
    let cores = t.cores();
    let mut indices = Vec::with_capacity(k);
    let mut log_weights = Vec::with_capacity(k);
    let mut fallback_modes = 0;
    let mut weights = Vec::new();

    for l in 0..k {
        let mut rng = stream_rng(seed, l as u64);
        let mut v = vec![1.0];
        let mut log_scale = 0.0;
        let mut idx = Vec::with_capacity(cores.len());
        for (core, fold) in cores.iter().zip(&folded) {
            let total = conditional_weights(fold, &v, &mut weights);
            let u: f64 = rng.gen();
            let m = if total > 0.0 && total.is_finite() {
                inverse_cdf(&weights, total, u)
            } else {
                fallback_modes += 1;
                ((u * fold.modes as f64) as usize).min(fold.modes - 1)
            };
            idx.push(m);
            v = core.left_mul(&v, m);
            match renormalize(&mut v) {
                Some(s) => log_scale += s,
                None => {
                    // Only reachable after a uniform fallback onto a zero slice.
                    log_scale = f64::NEG_INFINITY;
                    v.iter_mut().for_each(|x| *x = 1.0);
                }
            }
        }
        log_weights.push(log_scale + v[0].ln());
        indices.push(idx);
    }

    Ok(SampleBatch {
        indices,
        log_weights: Some(log_weights),
        fallback_modes,
    })
}

/// Normalized conditional distribution of mode `prefix.len()` given the
/// already fixed `prefix`.
pub fn conditional(t: &TtDistribution, prefix: &[usize]) -> Result<Vec<f64>> {
    let d = t.ndim();
    if prefix.len() >= d {
        return Err(Error::InvalidArgument(format!(
            "prefix of length {} leaves no free mode in a {d}-mode tensor",
            prefix.len()
        )));
    }
    let folded = fold_suffixes(t)?;
    let mut v = vec![1.0];
    for (i, &m) in prefix.iter().enumerate() {
        let core = &t.cores()[i];
        if m >= core.shape().1 {
            return Err(Error::IndexOutOfRange {
                mode: i,
                value: m,
                size: core.shape().1,
            });
        }
        v = core.left_mul(&v, m);
        if renormalize(&mut v).is_none() {
            return Err(Error::DegenerateModel(format!(
                "prefix {prefix:?} has zero probability"
            )));
        }
    }
    let mut w = Vec::new();
    let total = conditional_weights(&folded[prefix.len()], &v, &mut w);
    if !(total > 0.0) {
        return Err(Error::DegenerateModel(
            "all conditional weights vanish".into(),
        ));
    }
    w.iter_mut().for_each(|x| *x /= total);
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tt::{all_indices, Core};

    #[test]
    fn point_mass_is_always_drawn() {
        let mut a = vec![0.0; 3];
        a[2] = 1.0;
        let mut b = vec![0.0; 4];
        b[1] = 1.0;
        let t = TtDistribution::from_cores(vec![
            Core::new(1, 3, 1, a).unwrap(),
            Core::new(1, 4, 1, b).unwrap(),
        ])
        .unwrap();
        let batch = sample(&t, 500, 3).unwrap();
        assert_eq!(batch.len(), 500);
        assert!(batch.indices.iter().all(|i| i == &vec![2, 1]));
        assert_eq!(batch.fallback_modes, 0);
    }

    #[test]
    fn uniform_frequencies() {
        let cores = (0..2)
            .map(|_| Core::filled(1, 2, 1, 1.0).unwrap())
            .collect();
        let t = TtDistribution::from_cores(cores).unwrap();
        let k = 100_000;
        let batch = sample(&t, k, 12).unwrap();
        let mut counts = [0usize; 4];
        for i in &batch.indices {
            counts[i[0] * 2 + i[1]] += 1;
        }
        let tol = 3.0 * (0.25f64 * 0.75 / k as f64).sqrt();
        for c in counts {
            assert!((c as f64 / k as f64 - 0.25).abs() < tol, "{counts:?}");
        }
    }

    #[test]
    fn single_mode_is_categorical() {
        let w = vec![1.0, 3.0, 0.0, 6.0];
        let t = TtDistribution::from_cores(vec![Core::new(1, 4, 1, w.clone()).unwrap()]).unwrap();
        let k = 50_000;
        let batch = sample(&t, k, 0).unwrap();
        let mut counts = [0usize; 4];
        for i in &batch.indices {
            counts[i[0]] += 1;
        }
        assert_eq!(counts[2], 0);
        for (c, p) in counts.iter().zip([0.1, 0.3, 0.0, 0.6]) {
            let sd = (p * (1.0 - p) / k as f64).sqrt();
            assert!((*c as f64 / k as f64 - p).abs() <= 4.0 * sd + 1e-12);
        }
        assert_eq!(conditional(&t, &[]).unwrap(), vec![0.1, 0.3, 0.0, 0.6]);
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let t = TtDistribution::init_random(6, 5, 3, 1).unwrap();
        assert_eq!(sample(&t, 64, 9).unwrap(), sample(&t, 64, 9).unwrap());
        assert_ne!(sample(&t, 64, 9).unwrap(), sample(&t, 64, 10).unwrap());
    }

    #[test]
    fn samples_stay_in_range() {
        let t = TtDistribution::init_random_with_dims(&[2, 7, 3, 5], 3, 4).unwrap();
        let dims = t.dims();
        for idx in sample(&t, 1000, 2).unwrap().indices {
            assert!(idx.iter().zip(&dims).all(|(i, n)| i < n));
        }
    }

    #[test]
    fn log_weights_match_log_eval() {
        let t = TtDistribution::init_random(5, 4, 2, 8).unwrap();
        let batch = sample(&t, 20, 1).unwrap();
        for (idx, lw) in batch.indices.iter().zip(batch.log_weights.unwrap()) {
            assert!((t.log_eval(idx).unwrap() - lw).abs() < 1e-10);
        }
    }

    #[test]
    fn chain_rule_consistency() {
        let t = TtDistribution::init_random(4, 3, 2, 17).unwrap();
        let z = t.mass().unwrap();
        for idx in all_indices(&[3, 3, 3, 3]) {
            let mut p = 1.0;
            for i in 0..4 {
                p *= conditional(&t, &idx[..i]).unwrap()[idx[i]];
            }
            let exact = t.eval(&idx).unwrap() / z;
            assert!((p - exact).abs() <= 1e-8 * exact, "{idx:?}");
        }
    }

    #[test]
    fn vanishing_core_is_degenerate() {
        let t = TtDistribution::from_cores(vec![
            Core::filled(1, 2, 1, 1.0).unwrap(),
            Core::filled(1, 2, 1, 0.0).unwrap(),
        ])
        .unwrap();
        assert!(matches!(sample(&t, 3, 0), Err(Error::DegenerateModel(_))));
    }

    #[test]
    fn rejects_empty_request() {
        let t = TtDistribution::init_random(2, 2, 1, 0).unwrap();
        assert!(sample(&t, 0, 0).is_err());
    }
}
