//! Exact K-nearest-neighbor distances over a dataset, the computational
//! kernel of both scoring rules.
//!
//! Ranking is **self-inclusive**: rank 1 is the point itself at distance 0.
//! This matches the ball-counting convention used by the scoring analysis,
//! where the rank-K radius `r_x` of a point satisfies `|B(x, r_x)| >= K`
//! counting `x` itself. An exclusive mode is intentionally not provided.

use ndarray::{s, Array2, ArrayView2, Axis};
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Query rows processed per block; memory is O(block * n).
const QUERY_BLOCK: usize = 128;

/// Per-point distances to the K nearest neighbors (self-inclusive ranks),
/// each row sorted nondecreasing.
#[derive(Debug, Clone)]
pub struct NeighborTable<F: Real> {
    dists: Array2<F>,
    k: usize,
}

impl<F: Real> NeighborTable<F> {
    pub fn n(&self) -> usize {
        self.dists.nrows()
    }

    /// Number of neighbor ranks stored per point.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Distance from point `i` to its neighbor at the 1-based self-inclusive
    /// `rank`; `rank = 1` is the point itself.
    pub fn dist(&self, i: usize, rank: usize) -> F {
        assert!(
            (1..=self.k).contains(&rank),
            "rank {rank} outside 1..={}",
            self.k
        );
        self.dists[[i, rank - 1]]
    }

    /// All stored neighbor distances of point `i`, nondecreasing.
    pub fn row(&self, i: usize) -> ndarray::ArrayView1<'_, F> {
        self.dists.row(i)
    }
}

/// Squared Euclidean distances between every row of `a` and every row of
/// `b`, computed as `|a|^2 + |b|^2 - 2 a.b` with pre-computed norms and
/// clamped below at zero to absorb rounding.
pub fn pairwise_sq_dists_block<F: Real>(
    a: ArrayView2<'_, F>,
    b: ArrayView2<'_, F>,
) -> Result<Array2<F>> {
    if a.ncols() != b.ncols() {
        return Err(Error::contract(format!(
            "dimension mismatch: {} vs {}",
            a.ncols(),
            b.ncols()
        )));
    }
    let na: Vec<F> = a
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|&v| v * v).sum())
        .collect();
    let nb: Vec<F> = b
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|&v| v * v).sum())
        .collect();
    let two = F::from_f64_lossy(2.0);
    let mut gram = a.dot(&b.t());
    for (i, mut row) in gram.axis_iter_mut(Axis(0)).enumerate() {
        for (j, g) in row.iter_mut().enumerate() {
            let d2 = na[i] + nb[j] - two * *g;
            *g = if d2 > F::zero() { d2 } else { F::zero() };
        }
    }
    Ok(gram)
}

/// Distances from every point to its `k` nearest neighbors among the whole
/// dataset, self-inclusive, Euclidean metric, ties broken toward the lower
/// point index. Output is bit-identical across thread counts.
pub fn knn_table<F: Real>(data: &Dataset<F>, k: usize) -> Result<NeighborTable<F>> {
    let n = data.n();
    if k == 0 || k > n {
        return Err(Error::contract(format!(
            "neighbor count must satisfy 1 <= K <= n, got K={k}, n={n}"
        )));
    }
    let points = data.points();
    let mut dists = Array2::zeros((n, k));
    dists
        .axis_chunks_iter_mut(Axis(0), QUERY_BLOCK)
        .into_par_iter()
        .enumerate()
        .try_for_each(|(block, mut out)| -> Result<()> {
            let q0 = block * QUERY_BLOCK;
            let q1 = (q0 + QUERY_BLOCK).min(n);
            let sq = pairwise_sq_dists_block(points.slice(s![q0..q1, ..]), points)?;
            let mut pairs: Vec<(F, usize)> = Vec::with_capacity(n);
            for (local, row) in sq.rows().into_iter().enumerate() {
                pairs.clear();
                pairs.extend(row.iter().copied().enumerate().map(|(j, d2)| (d2, j)));
                pairs[q0 + local] = (F::zero(), q0 + local); // self distance is exactly 0
                let cmp = |x: &(F, usize), y: &(F, usize)| {
                    x.0.partial_cmp(&y.0)
                        .expect("distances are finite")
                        .then(x.1.cmp(&y.1))
                };
                if k < n {
                    pairs.select_nth_unstable_by(k - 1, cmp);
                }
                pairs[..k].sort_unstable_by(cmp);
                for (r, &(d2, _)) in pairs[..k].iter().enumerate() {
                    out[[local, r]] = d2.sqrt();
                }
            }
            Ok(())
        })?;
    Ok(NeighborTable { dists, k })
}
