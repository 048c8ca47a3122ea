//! Tensor-train storage and contraction primitives.
//!
//! A `TtDistribution` holds `d` non-negative three-way cores. Core `i` has
//! shape `(R_{i-1}, N_i, R_i)` with `R_0 = R_d = 1` and is stored row-major,
//! so entry `(a, m, b)` lives at `(a * N_i + m) * R_i + b`.
//!
//! Long chains of sub-unit (or super-unit) factors leave the `f64` range at
//! realistic sizes (`d = 100`, `N = 1024`), so every contraction has a
//! log-scaled variant that renormalizes the running interface vector by its
//! maximum and accumulates the logarithm of the scale separately.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng, TAG_MODEL_INIT};

/// One TT-core of shape `(left, modes, right)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Core {
    left: usize,
    modes: usize,
    right: usize,
    data: Vec<f64>,
}

impl Core {
    pub fn new(left: usize, modes: usize, right: usize, data: Vec<f64>) -> Result<Self> {
        if left == 0 || modes == 0 || right == 0 {
            return Err(Error::InvalidArgument(format!(
                "core shape ({left}, {modes}, {right}) has a zero extent"
            )));
        }
        if data.len() != left * modes * right {
            return Err(Error::InvalidArgument(format!(
                "core shape ({left}, {modes}, {right}) needs {} values, got {}",
                left * modes * right,
                data.len()
            )));
        }
        Ok(Self {
            left,
            modes,
            right,
            data,
        })
    }

    pub fn filled(left: usize, modes: usize, right: usize, value: f64) -> Result<Self> {
        Self::new(left, modes, right, vec![value; left * modes * right])
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.left, self.modes, self.right)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, a: usize, m: usize, b: usize) -> f64 {
        self.data[(a * self.modes + m) * self.right + b]
    }

    /// The `(left, right)` slice at mode index `m`, row-major.
    #[inline]
    pub(crate) fn slice(&self, m: usize) -> impl Iterator<Item = (usize, &[f64])> {
        let (modes, right) = (self.modes, self.right);
        (0..self.left).map(move |a| {
            let start = (a * modes + m) * right;
            (a, &self.data[start..start + right])
        })
    }

    /// `v^T G[:, m, :]`.
    pub(crate) fn left_mul(&self, v: &[f64], m: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.right];
        for (a, row) in self.slice(m) {
            let va = v[a];
            if va == 0.0 {
                continue;
            }
            for (o, g) in out.iter_mut().zip(row) {
                *o += va * g;
            }
        }
        out
    }

    /// `G[:, m, :] w`.
    pub(crate) fn right_mul(&self, m: usize, w: &[f64]) -> Vec<f64> {
        self.slice(m).map(|(_, row)| dot(row, w)).collect()
    }

    /// Mode-summed core `sum_m G[:, m, :]` as a row-major `(left, right)` matrix.
    pub(crate) fn mode_sum(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.left * self.right];
        for a in 0..self.left {
            for m in 0..self.modes {
                let start = (a * self.modes + m) * self.right;
                for (o, g) in out[a * self.right..(a + 1) * self.right]
                    .iter_mut()
                    .zip(&self.data[start..start + self.right])
                {
                    *o += g;
                }
            }
        }
        out
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `v^T M` for row-major `M` of shape `(v.len(), cols)`.
pub(crate) fn vec_mat(v: &[f64], m: &[f64], cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; cols];
    for (a, va) in v.iter().enumerate() {
        for (o, x) in out.iter_mut().zip(&m[a * cols..(a + 1) * cols]) {
            *o += va * x;
        }
    }
    out
}

/// `M w` for row-major `M` of shape `(rows, w.len())`.
pub(crate) fn mat_vec(m: &[f64], rows: usize, w: &[f64]) -> Vec<f64> {
    let cols = w.len();
    (0..rows)
        .map(|a| dot(&m[a * cols..(a + 1) * cols], w))
        .collect()
}

/// Divides `v` by its maximum and returns `ln(max)`. Returns `None` when the
/// vector has no positive entry.
pub(crate) fn renormalize(v: &mut [f64]) -> Option<f64> {
    let max = v.iter().copied().fold(0.0_f64, f64::max);
    if !(max > 0.0) || !max.is_finite() {
        return None;
    }
    for x in v.iter_mut() {
        *x /= max;
    }
    Some(max.ln())
}

/// Non-negative tensor train interpreted as an unnormalized distribution over
/// multi-indices.
#[derive(Debug, Clone, PartialEq)]
pub struct TtDistribution {
    cores: Vec<Core>,
}

impl TtDistribution {
    /// Builds a tensor train from explicit cores, checking the rank chain,
    /// the boundary ranks, and entry non-negativity.
    pub fn from_cores(cores: Vec<Core>) -> Result<Self> {
        if cores.is_empty() {
            return Err(Error::InvalidArgument(
                "a tensor train needs at least one core".into(),
            ));
        }
        if cores[0].left != 1 || cores[cores.len() - 1].right != 1 {
            return Err(Error::InvalidArgument("boundary ranks must be 1".into()));
        }
        for (i, pair) in cores.windows(2).enumerate() {
            if pair[0].right != pair[1].left {
                return Err(Error::InvalidArgument(format!(
                    "rank mismatch between cores {i} and {}: {} vs {}",
                    i + 1,
                    pair[0].right,
                    pair[1].left
                )));
            }
        }
        for (i, core) in cores.iter().enumerate() {
            if let Some(bad) = core.data.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "core {i} holds a negative or non-finite entry ({bad})"
                )));
            }
        }
        Ok(Self { cores })
    }

    /// Random tensor train with `d` modes of size `n` and interior rank `r`;
    /// entries are i.i.d. uniform on `(0, 1]`.
    pub fn init_random(d: usize, n: usize, r: usize, seed: u64) -> Result<Self> {
        if d == 0 || r == 0 {
            return Err(Error::InvalidArgument(format!(
                "d and r must be positive (d = {d}, r = {r})"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "n must be at least 2, got {n}"
            )));
        }
        Self::init_random_with_dims(&vec![n; d], r, seed)
    }

    /// As [`init_random`](Self::init_random) with per-mode sizes.
    pub fn init_random_with_dims(dims: &[usize], r: usize, seed: u64) -> Result<Self> {
        if dims.is_empty() || r == 0 || dims.contains(&0) {
            return Err(Error::InvalidArgument(
                "dims and rank must be positive".into(),
            ));
        }
        let d = dims.len();
        let mut rng = stream_rng(derive_seed(seed, TAG_MODEL_INIT, 0), 0);
        let cores = dims
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let left = if i == 0 { 1 } else { r };
                let right = if i + 1 == d { 1 } else { r };
                // gen() is on [0, 1); reflect to (0, 1].
                let data = (0..left * n * right)
                    .map(|_| 1.0 - rng.gen::<f64>())
                    .collect();
                Core::new(left, n, right, data)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { cores })
    }

    pub fn ndim(&self) -> usize {
        self.cores.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.modes).collect()
    }

    /// `R_0 .. R_d`.
    pub fn ranks(&self) -> Vec<usize> {
        std::iter::once(1)
            .chain(self.cores.iter().map(|c| c.right))
            .collect()
    }

    pub fn cores(&self) -> &[Core] {
        &self.cores
    }

    pub(crate) fn cores_mut(&mut self) -> &mut [Core] {
        &mut self.cores
    }

    pub fn num_parameters(&self) -> usize {
        self.cores.iter().map(|c| c.data.len()).sum()
    }

    /// Multiplies core `i` by `c > 0`.
    pub fn scale_core(&mut self, i: usize, c: f64) -> Result<()> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "scale must be positive, got {c}"
            )));
        }
        let core = self
            .cores
            .get_mut(i)
            .ok_or_else(|| Error::InvalidArgument(format!("no core {i}")))?;
        core.data.iter_mut().for_each(|x| *x *= c);
        Ok(())
    }

    pub(crate) fn check_index(&self, idx: &[usize]) -> Result<()> {
        if idx.len() != self.ndim() {
            return Err(Error::DimensionMismatch {
                expected: self.ndim(),
                actual: idx.len(),
            });
        }
        for (mode, (&value, core)) in idx.iter().zip(&self.cores).enumerate() {
            if value >= core.modes {
                return Err(Error::IndexOutOfRange {
                    mode,
                    value,
                    size: core.modes,
                });
            }
        }
        Ok(())
    }

    /// Tensor entry at `idx`, computed as a plain matrix chain. May leave the
    /// `f64` range for long chains; see [`log_eval`](Self::log_eval).
    pub fn eval(&self, idx: &[usize]) -> Result<f64> {
        self.check_index(idx)?;
        let mut v = vec![1.0];
        for (core, &m) in self.cores.iter().zip(idx) {
            v = core.left_mul(&v, m);
        }
        Ok(v[0])
    }

    /// Natural logarithm of the entry at `idx`; `-inf` for a zero entry.
    pub fn log_eval(&self, idx: &[usize]) -> Result<f64> {
        self.check_index(idx)?;
        let mut v = vec![1.0];
        let mut log_scale = 0.0;
        for (core, &m) in self.cores.iter().zip(idx) {
            v = core.left_mul(&v, m);
            match renormalize(&mut v) {
                Some(s) => log_scale += s,
                None => return Ok(f64::NEG_INFINITY),
            }
        }
        Ok(log_scale + v[0].ln())
    }

    /// Total mass `Z`, the sum of all entries.
    pub fn mass(&self) -> Result<f64> {
        let mut v = vec![1.0];
        for core in &self.cores {
            v = vec_mat(&v, &core.mode_sum(), core.right);
        }
        let z = v[0];
        if z > 0.0 && z.is_finite() {
            Ok(z)
        } else if z == 0.0 {
            Err(Error::DegenerateModel("total mass underflows to 0".into()))
        } else {
            Err(Error::DegenerateModel(format!(
                "total mass is {z}; use log_mass"
            )))
        }
    }

    /// `ln Z`, stable for long chains.
    pub fn log_mass(&self) -> Result<f64> {
        let mut v = vec![1.0];
        let mut log_scale = 0.0;
        for (i, core) in self.cores.iter().enumerate() {
            v = vec_mat(&v, &core.mode_sum(), core.right);
            match renormalize(&mut v) {
                Some(s) => log_scale += s,
                None => {
                    return Err(Error::DegenerateModel(format!(
                        "prefix contraction vanishes at core {i}"
                    )))
                }
            }
        }
        Ok(log_scale + v[0].ln())
    }

    /// Unscaled suffix interfaces `S_0 .. S_d`, with `S_d = [1]` and
    /// `S_{i-1} = (sum_m G_i[:, m, :]) S_i`. `S_0[0]` equals the mass.
    pub fn suffix_interfaces(&self) -> Vec<Vec<f64>> {
        let d = self.ndim();
        let mut out = vec![Vec::new(); d + 1];
        out[d] = vec![1.0];
        for i in (0..d).rev() {
            let core = &self.cores[i];
            out[i] = mat_vec(&core.mode_sum(), core.left, &out[i + 1]);
        }
        out
    }

    /// Max-normalized suffix interfaces. Directions match
    /// [`suffix_interfaces`](Self::suffix_interfaces); magnitudes are dropped.
    pub(crate) fn normalized_suffixes(&self) -> Result<Vec<Vec<f64>>> {
        let d = self.ndim();
        let mut out = vec![Vec::new(); d + 1];
        out[d] = vec![1.0];
        for i in (0..d).rev() {
            let core = &self.cores[i];
            let mut s = mat_vec(&core.mode_sum(), core.left, &out[i + 1]);
            if renormalize(&mut s).is_none() {
                return Err(Error::DegenerateModel(format!(
                    "suffix contraction vanishes at core {i}"
                )));
            }
            out[i] = s;
        }
        Ok(out)
    }

    /// Max-normalized mode-summed prefix interfaces `A_0 .. A_d` with
    /// `A_0 = [1]` and `A_i ∝ A_{i-1}^T (sum_m G_i[:, m, :])`.
    pub(crate) fn normalized_prefixes(&self) -> Result<Vec<Vec<f64>>> {
        let d = self.ndim();
        let mut out = Vec::with_capacity(d + 1);
        out.push(vec![1.0]);
        for (i, core) in self.cores.iter().enumerate() {
            let mut a = vec_mat(&out[i], &core.mode_sum(), core.right);
            if renormalize(&mut a).is_none() {
                return Err(Error::DegenerateModel(format!(
                    "prefix contraction vanishes at core {i}"
                )));
            }
            out.push(a);
        }
        Ok(out)
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        Checkpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            cores: self
                .cores
                .iter()
                .map(|c| CoreRecord {
                    shape: [c.left, c.modes, c.right],
                    values: c.data.clone(),
                })
                .collect(),
        }
    }

    pub fn from_checkpoint(ckpt: Checkpoint) -> Result<Self> {
        if ckpt.format != CHECKPOINT_FORMAT || ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported checkpoint {} v{}",
                ckpt.format, ckpt.version
            )));
        }
        let cores = ckpt
            .cores
            .into_iter()
            .map(|rec| Core::new(rec.shape[0], rec.shape[1], rec.shape[2], rec.values))
            .collect::<Result<Vec<_>>>()?;
        Self::from_cores(cores)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_checkpoint())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_checkpoint(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

pub const CHECKPOINT_FORMAT: &str = "tesalocs-tt";
pub const CHECKPOINT_VERSION: u32 = 1;

/// JSON checkpoint layout:
///
/// ```json
/// {"format": "tesalocs-tt", "version": 1,
///  "cores": [{"shape": [1, 4, 5], "values": [0.1, ...]}, ...]}
/// ```
///
/// `values` is the row-major flattening of the `(left, modes, right)` core.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub cores: Vec<CoreRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CoreRecord {
    pub shape: [usize; 3],
    pub values: Vec<f64>,
}

/// Iterates every multi-index of `dims` in lexicographic order. Intended for
/// exhaustive checks on small tensors.
pub fn all_indices(dims: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = dims.iter().product();
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; dims.len()];
        for (slot, &n) in idx.iter_mut().zip(dims).rev() {
            *slot = flat % n;
            flat /= n;
        }
        idx
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(d: usize, n: usize) -> TtDistribution {
        let cores = (0..d)
            .map(|_| Core::filled(1, n, 1, 1.0).unwrap())
            .collect();
        TtDistribution::from_cores(cores).unwrap()
    }

    /// Entry by explicit summation over every rank path.
    fn brute_entry(t: &TtDistribution, idx: &[usize]) -> f64 {
        let ranks = t.ranks();
        let interior = &ranks[1..ranks.len() - 1];
        all_indices(interior)
            .map(|path| {
                let mut prod = 1.0;
                for (i, core) in t.cores().iter().enumerate() {
                    let a = if i == 0 { 0 } else { path[i - 1] };
                    let b = if i + 1 == t.ndim() { 0 } else { path[i] };
                    prod *= core.get(a, idx[i], b);
                }
                prod
            })
            .sum()
    }

    #[test]
    fn init_single_core_shape() {
        let t = TtDistribution::init_random(1, 4, 1, 0).unwrap();
        assert_eq!(t.cores()[0].shape(), (1, 4, 1));
        assert!(t.cores()[0].data().iter().all(|&x| x > 0.0 && x <= 1.0));
    }

    #[test]
    fn init_interior_shapes() {
        let t = TtDistribution::init_random(6, 16, 5, 3).unwrap();
        assert_eq!(t.ranks(), vec![1, 5, 5, 5, 5, 5, 1]);
        assert_eq!(t.cores()[0].shape(), (1, 16, 5));
        assert_eq!(t.cores()[3].shape(), (5, 16, 5));
        assert_eq!(t.cores()[5].shape(), (5, 16, 1));
    }

    #[test]
    fn init_large_interior_shape() {
        let t = TtDistribution::init_random(100, 1024, 5, 11).unwrap();
        assert_eq!(t.ndim(), 100);
        assert!(t.cores()[1..99].iter().all(|c| c.shape() == (5, 1024, 5)));
    }

    #[test]
    fn init_is_deterministic() {
        let a = TtDistribution::init_random(5, 7, 3, 42).unwrap();
        let b = TtDistribution::init_random(5, 7, 3, 42).unwrap();
        for (x, y) in a.cores().iter().zip(b.cores()) {
            let xb: Vec<u64> = x.data().iter().map(|v| v.to_bits()).collect();
            let yb: Vec<u64> = y.data().iter().map(|v| v.to_bits()).collect();
            assert_eq!(xb, yb);
        }
        assert_ne!(a, TtDistribution::init_random(5, 7, 3, 43).unwrap());
    }

    #[test]
    fn init_rejects_zero_sizes() {
        assert!(TtDistribution::init_random(0, 4, 2, 0).is_err());
        assert!(TtDistribution::init_random(3, 0, 2, 0).is_err());
        assert!(TtDistribution::init_random(3, 4, 0, 0).is_err());
        assert!(TtDistribution::init_random(3, 1, 2, 0).is_err());
    }

    #[test]
    fn from_cores_validates() {
        let bad_rank = vec![
            Core::filled(1, 2, 2, 1.0).unwrap(),
            Core::filled(3, 2, 1, 1.0).unwrap(),
        ];
        assert!(TtDistribution::from_cores(bad_rank).is_err());
        let negative = vec![Core::new(1, 2, 1, vec![1.0, -0.5]).unwrap()];
        assert!(TtDistribution::from_cores(negative).is_err());
        let boundary = vec![Core::filled(2, 2, 1, 1.0).unwrap()];
        assert!(TtDistribution::from_cores(boundary).is_err());
    }

    #[test]
    fn eval_all_ones() {
        let t = ones(2, 2);
        for idx in all_indices(&[2, 2]) {
            assert_eq!(t.eval(&idx).unwrap(), 1.0);
        }
    }

    #[test]
    fn eval_rank_one_outer_product() {
        let u = vec![0.5, 2.0, 3.0];
        let v = vec![1.5, 0.25];
        let t = TtDistribution::from_cores(vec![
            Core::new(1, 3, 1, u.clone()).unwrap(),
            Core::new(1, 2, 1, v.clone()).unwrap(),
        ])
        .unwrap();
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(t.eval(&[i, j]).unwrap(), u[i] * v[j]);
            }
        }
    }

    #[test]
    fn eval_matches_brute_force_reconstruction() {
        let t = TtDistribution::init_random(3, 3, 2, 9).unwrap();
        for idx in all_indices(&[3, 3, 3]) {
            let got = t.eval(&idx).unwrap();
            let want = brute_entry(&t, &idx);
            assert!(
                (got - want).abs() <= 1e-14 * want.abs(),
                "{idx:?}: {got} vs {want}"
            );
            assert!((t.log_eval(&idx).unwrap() - want.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn eval_rejects_bad_index() {
        let t = ones(2, 3);
        assert!(matches!(
            t.eval(&[0, 3]),
            Err(Error::IndexOutOfRange {
                mode: 1,
                value: 3,
                size: 3
            })
        ));
        assert!(matches!(t.eval(&[0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn mass_all_ones() {
        assert_eq!(ones(2, 3).mass().unwrap(), 9.0);
    }

    #[test]
    fn mass_matches_exhaustive_sum() {
        let t = TtDistribution::init_random(3, 3, 2, 5).unwrap();
        let brute: f64 = all_indices(&[3, 3, 3]).map(|i| brute_entry(&t, &i)).sum();
        let z = t.mass().unwrap();
        assert!((z - brute).abs() <= 1e-12 * brute);
        assert!((t.log_mass().unwrap() - brute.ln()).abs() < 1e-12);
    }

    #[test]
    fn mass_scales_with_core() {
        let mut t = TtDistribution::init_random(4, 3, 2, 1).unwrap();
        let z = t.mass().unwrap();
        t.scale_core(2, 2.5).unwrap();
        assert!((t.mass().unwrap() - 2.5 * z).abs() <= 1e-14 * z);
    }

    #[test]
    fn mass_reports_underflow() {
        let cores = (0..200)
            .map(|_| Core::filled(1, 2, 1, 1e-10).unwrap())
            .collect();
        let t = TtDistribution::from_cores(cores).unwrap();
        assert!(matches!(t.mass(), Err(Error::DegenerateModel(_))));
        let expected = 200.0 * (2e-10f64).ln();
        assert!((t.log_mass().unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn log_mass_handles_long_chains() {
        let t = TtDistribution::init_random(100, 1024, 5, 0).unwrap();
        let lz = t.log_mass().unwrap();
        assert!(lz.is_finite() && lz > 700.0, "log mass {lz}");
        let le = t.log_eval(&vec![17; 100]).unwrap();
        assert!(le.is_finite() && le < lz);
    }

    #[test]
    fn suffix_single_core() {
        let t = TtDistribution::from_cores(vec![Core::new(1, 4, 1, vec![1., 2., 3., 4.]).unwrap()])
            .unwrap();
        let s = t.suffix_interfaces();
        assert_eq!(s, vec![vec![10.0], vec![1.0]]);
    }

    #[test]
    fn suffix_all_ones() {
        assert_eq!(
            ones(2, 2).suffix_interfaces(),
            vec![vec![4.0], vec![2.0], vec![1.0]]
        );
    }

    #[test]
    fn suffix_head_equals_mass() {
        let t = TtDistribution::init_random(4, 4, 3, 21).unwrap();
        let s = t.suffix_interfaces();
        let z = t.mass().unwrap();
        assert!((s[0][0] - z).abs() <= 1e-12 * z);
        assert!(s.iter().flatten().all(|&x| x >= 0.0));
        assert_eq!(s[2].len(), 3);
    }

    #[test]
    fn checkpoint_round_trip_is_bitwise() {
        let t = TtDistribution::init_random(4, 5, 3, 77).unwrap();
        let back = TtDistribution::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(t, back);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        t.save(&path).unwrap();
        assert_eq!(TtDistribution::load(&path).unwrap(), t);
    }

    #[test]
    fn checkpoint_rejects_foreign_format() {
        let mut ckpt = TtDistribution::init_random(2, 2, 1, 0)
            .unwrap()
            .to_checkpoint();
        ckpt.format = "other".into();
        assert!(TtDistribution::from_checkpoint(ckpt).is_err());
    }
}
