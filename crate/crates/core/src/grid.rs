//! Uniform grids over a box and the index/point projections.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Box `[lower, upper]` discretized into `nodes[i]` equispaced points per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
    nodes: Vec<usize>,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, nodes: Vec<usize>) -> Result<Self> {
        let d = lower.len();
        if d == 0 {
            return Err(Error::InvalidArgument(
                "search space needs at least one axis".into(),
            ));
        }
        if upper.len() != d || nodes.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: if upper.len() != d {
                    upper.len()
                } else {
                    nodes.len()
                },
            });
        }
        for i in 0..d {
            if !(lower[i] < upper[i]) || !lower[i].is_finite() || !upper[i].is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "axis {i}: need finite lower < upper, got [{}, {}]",
                    lower[i], upper[i]
                )));
            }
            if nodes[i] < 2 {
                return Err(Error::InvalidArgument(format!(
                    "axis {i}: need at least 2 nodes, got {}",
                    nodes[i]
                )));
            }
        }
        Ok(Self {
            lower,
            upper,
            nodes,
        })
    }

    /// Same bounds and node count on every axis.
    pub fn uniform(d: usize, lower: f64, upper: f64, nodes: usize) -> Result<Self> {
        Self::new(vec![lower; d], vec![upper; d], vec![nodes; d])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    /// `x[i] = idx[i] / (N_i - 1) * (b_i - a_i) + a_i`.
    pub fn to_point(&self, idx: &[usize]) -> Result<Vec<f64>> {
        if idx.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: idx.len(),
            });
        }
        idx.iter()
            .enumerate()
            .map(|(i, &n)| {
                let nodes = self.nodes[i];
                if n >= nodes {
                    return Err(Error::IndexOutOfRange {
                        mode: i,
                        value: n,
                        size: nodes,
                    });
                }
                if n == nodes - 1 {
                    // Exact endpoint regardless of rounding in the affine map.
                    return Ok(self.upper[i]);
                }
                Ok(n as f64 / (nodes - 1) as f64 * self.width(i) + self.lower[i])
            })
            .collect()
    }

    /// Nearest grid node per axis: the continuous index
    /// `(x[i] - a_i) / (b_i - a_i) * (N_i - 1)` rounded half-to-even and
    /// clamped into `[0, N_i - 1]`.
    pub fn to_index(&self, x: &[f64]) -> Result<Vec<usize>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(x.iter()
            .enumerate()
            .map(|(i, &xi)| {
                let top = self.nodes[i] - 1;
                let c = (xi - self.lower[i]) / self.width(i) * top as f64;
                if c.is_nan() || c <= 0.0 {
                    0
                } else if c >= top as f64 {
                    top
                } else {
                    c.round_ties_even() as usize
                }
            })
            .collect())
    }

    /// Projects `x` onto the box.
    pub fn clamp(&self, x: &mut [f64]) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = xi.clamp(self.lower[i], self.upper[i]);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .enumerate()
                .all(|(i, &xi)| xi >= self.lower[i] && xi <= self.upper[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn endpoints() {
        let s = SearchSpace::uniform(3, -2.5, 7.0, 9).unwrap();
        assert_eq!(s.to_point(&[0, 0, 0]).unwrap(), vec![-2.5; 3]);
        assert_eq!(s.to_point(&[8, 8, 8]).unwrap(), vec![7.0; 3]);
    }

    #[test]
    fn interior_node() {
        let s = SearchSpace::uniform(1, -5.0, 5.0, 11).unwrap();
        assert_eq!(s.to_point(&[2]).unwrap(), vec![-3.0]);
    }

    #[test]
    fn to_index_rounds_nearest() {
        let s = SearchSpace::uniform(1, 0.0, 1.0, 5).unwrap();
        assert_eq!(s.to_index(&[0.26]).unwrap(), vec![1]);
        // c = 0.5 and 1.5 exactly: ties go to even.
        assert_eq!(s.to_index(&[0.125]).unwrap(), vec![0]);
        assert_eq!(s.to_index(&[0.375]).unwrap(), vec![2]);
    }

    #[test]
    fn to_index_clamps() {
        let s = SearchSpace::uniform(2, -1.0, 1.0, 4).unwrap();
        assert_eq!(s.to_index(&[-3.0, 9.0]).unwrap(), vec![0, 3]);
        assert_eq!(s.to_index(&[f64::NAN, f64::INFINITY]).unwrap(), vec![0, 3]);
        assert_eq!(s.to_index(&[f64::NEG_INFINITY, 0.0]).unwrap(), vec![0, 2]);
    }

    #[test]
    fn rejects_bad_spaces_and_indices() {
        assert!(SearchSpace::uniform(2, 1.0, 1.0, 4).is_err());
        assert!(SearchSpace::uniform(2, 0.0, 1.0, 1).is_err());
        assert!(SearchSpace::new(vec![0.0], vec![1.0, 2.0], vec![3]).is_err());
        let s = SearchSpace::uniform(2, 0.0, 1.0, 3).unwrap();
        assert!(matches!(
            s.to_point(&[0, 3]),
            Err(Error::IndexOutOfRange { mode: 1, .. })
        ));
    }

    proptest! {
        #[test]
        fn round_trip_and_monotone(
            d in 1usize..6,
            nodes in 2usize..70,
            a in -1e3f64..1e3,
            w in 1e-3f64..1e3,
            seed in 0usize..1000,
        ) {
            let s = SearchSpace::uniform(d, a, a + w, nodes).unwrap();
            let idx: Vec<usize> = (0..d).map(|i| (seed * 31 + i * 7) % nodes).collect();
            let x = s.to_point(&idx).unwrap();
            prop_assert!(s.contains(&x));
            prop_assert_eq!(s.to_index(&x).unwrap(), idx.clone());
            let mut up = idx.clone();
            if up[0] + 1 < nodes {
                up[0] += 1;
                prop_assert!(s.to_point(&up).unwrap()[0] > x[0]);
            }
        }

        #[test]
        fn to_index_in_range(x in proptest::collection::vec(-1e6f64..1e6, 3)) {
            let s = SearchSpace::new(vec![-1.0, 0.0, 5.0], vec![1.0, 0.5, 6.0], vec![2, 17, 64]).unwrap();
            let idx = s.to_index(&x).unwrap();
            prop_assert!(idx.iter().zip(s.nodes()).all(|(i, n)| i < n));
        }
    }
}
