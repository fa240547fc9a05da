//! The standard k-means solver invoked after outlier removal: weighted
//! k-means++ seeding plus Lloyd refinement with restarts.

use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{CenterSet, Dataset};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};
use crate::scalar::Real;

/// Solver settings; recorded alongside every result for reproducibility.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolverConfig<F: Real> {
    pub k: usize,
    pub max_iters: usize,
    pub rel_tol: F,
    pub restarts: usize,
    pub seed: u64,
}

impl<F: Real> SolverConfig<F> {
    /// Defaults: 100 Lloyd iterations, relative tolerance 1e-6, 3 restarts.
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            max_iters: 100,
            rel_tol: F::from_f64_lossy(1e-6),
            restarts: 3,
            seed,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: F) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::contract("solver needs k >= 1".to_string()));
        }
        if self.max_iters == 0 {
            return Err(Error::contract("solver needs max_iters >= 1".to_string()));
        }
        if self.rel_tol < F::zero() {
            return Err(Error::contract("rel_tol must be nonnegative".to_string()));
        }
        if self.restarts == 0 {
            return Err(Error::contract("solver needs restarts >= 1".to_string()));
        }
        Ok(())
    }
}

fn check_weights<F: Real>(weights: Option<&[F]>, n: usize) -> Result<()> {
    if let Some(w) = weights {
        if w.len() != n {
            return Err(Error::contract(format!(
                "weights length {} != n {n}",
                w.len()
            )));
        }
        if w.iter().any(|v| !v.is_finite() || *v < F::zero()) {
            return Err(Error::contract(
                "weights must be finite and nonnegative".to_string(),
            ));
        }
        if w.iter().copied().sum::<F>() <= F::zero() {
            return Err(Error::contract("weights must have positive sum".to_string()));
        }
    }
    Ok(())
}

fn weight_at<F: Real>(weights: Option<&[F]>, i: usize) -> F {
    weights.map_or_else(F::one, |w| w[i])
}

/// Samples an index with probability proportional to `mass` via a cumulative
/// scan; entries with zero mass are never selected. Returns `None` when the
/// total mass vanishes.
fn sample_proportional<F: Real>(rng: &mut ChaCha8Rng, mass: impl Fn(usize) -> F, n: usize) -> Option<usize> {
    let total: F = (0..n).map(&mass).sum();
    if !(total > F::zero()) {
        return None;
    }
    let target = F::from_f64_lossy(rng.random::<f64>()) * total;
    let mut cum = F::zero();
    for i in 0..n {
        cum += mass(i);
        if cum > target {
            return Some(i);
        }
    }
    // Rounding pushed the target past the final cumulative sum; take the last
    // positive-mass index.
    (0..n).rev().find(|&i| mass(i) > F::zero())
}

fn sq_dist<F: Real>(a: ndarray::ArrayView1<'_, F>, b: ndarray::ArrayView1<'_, F>) -> F {
    let mut acc = F::zero();
    for (x, y) in a.iter().zip(b.iter()) {
        let diff = *x - *y;
        acc += diff * diff;
    }
    acc
}

/// Weighted k-means++ seeding: the first center is drawn with probability
/// proportional to weight, each subsequent one proportional to
/// weight * d(x, chosen)^2. Deterministic per seed.
pub fn seed_kmeanspp<F: Real>(
    data: &Dataset<F>,
    weights: Option<&[F]>,
    k: usize,
    seed: u64,
) -> Result<CenterSet<F>> {
    let n = data.n();
    if k == 0 || k > n {
        return Err(Error::contract(format!(
            "seeding needs 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    check_weights(weights, n)?;
    let mut rng = seeded(seed);
    let points = data.points();

    let first = sample_proportional(&mut rng, |i| weight_at(weights, i), n)
        .ok_or_else(|| Error::contract("weights must have positive sum".to_string()))?;

    let mut chosen = vec![first];
    let mut min_d2: Vec<F> = (0..n)
        .map(|i| sq_dist(points.row(i), points.row(first)))
        .collect();

    while chosen.len() < k {
        let pick = sample_proportional(&mut rng, |i| weight_at(weights, i) * min_d2[i], n)
            .unwrap_or_else(|| {
                // All residual mass is zero (duplicate-heavy data): fall back
                // to the lowest-index point not yet chosen, preferring
                // positive weight.
                (0..n)
                    .find(|i| !chosen.contains(i) && weight_at(weights, *i) > F::zero())
                    .or_else(|| (0..n).find(|i| !chosen.contains(i)))
                    .unwrap_or(0)
            });
        chosen.push(pick);
        for (i, slot) in min_d2.iter_mut().enumerate() {
            let d2 = sq_dist(points.row(i), points.row(pick));
            if d2 < *slot {
                *slot = d2;
            }
        }
    }

    let d = data.dim();
    let mut centers = Array2::zeros((k, d));
    for (r, &i) in chosen.iter().enumerate() {
        centers.row_mut(r).assign(&points.row(i));
    }
    CenterSet::new(centers)
}

/// Outcome of a Lloyd refinement run.
#[derive(Debug, Clone)]
pub struct LloydOutcome<F: Real> {
    pub centers: CenterSet<F>,
    pub cost: F,
    pub iters: usize,
}

fn assign_points<F: Real>(
    points: ndarray::ArrayView2<'_, F>,
    centers: &CenterSet<F>,
) -> Vec<(F, usize)> {
    let rows: Vec<ndarray::ArrayView1<'_, F>> = points.rows().into_iter().collect();
    rows.par_iter()
        .map(|p| {
            let mut best = (F::infinity(), 0usize);
            for (j, c) in centers.rows().rows().into_iter().enumerate() {
                let d2 = sq_dist(*p, c);
                if d2 < best.0 {
                    best = (d2, j);
                }
            }
            best
        })
        .collect()
}

fn weighted_cost<F: Real>(assign: &[(F, usize)], weights: Option<&[F]>) -> F {
    assign
        .iter()
        .enumerate()
        .map(|(i, &(d2, _))| weight_at(weights, i) * d2)
        .sum()
}

/// Alternates nearest-center assignment and weighted-centroid updates until
/// the relative cost decrease drops below `rel_tol` or `max_iters` is
/// reached. Empty clusters are re-seeded to the point currently farthest
/// from its center. The cost sequence never increases.
pub fn lloyd<F: Real>(
    data: &Dataset<F>,
    weights: Option<&[F]>,
    init: &CenterSet<F>,
    cfg: &SolverConfig<F>,
) -> Result<LloydOutcome<F>> {
    cfg.validate()?;
    if init.k() != cfg.k {
        return Err(Error::contract(format!(
            "initial centers hold {} rows but cfg.k = {}",
            init.k(),
            cfg.k
        )));
    }
    if init.dim() != data.dim() {
        return Err(Error::contract(format!(
            "center dimension {} != data dimension {}",
            init.dim(),
            data.dim()
        )));
    }
    let n = data.n();
    check_weights(weights, n)?;
    let points = data.points();
    let d = data.dim();
    let k = cfg.k;

    let mut centers = init.clone();
    let mut assign = assign_points(points, &centers);
    let mut prev_cost = weighted_cost(&assign, weights);
    let mut iters = 0usize;
    let slack = F::from_f64_lossy(1e-9);

    for _ in 0..cfg.max_iters {
        iters += 1;

        // Weighted centroid update.
        let mut sums = Array2::<F>::zeros((k, d));
        let mut mass = vec![F::zero(); k];
        for (i, &(_, j)) in assign.iter().enumerate() {
            let w = weight_at(weights, i);
            if w > F::zero() {
                mass[j] += w;
                let p = points.row(i);
                for (s, v) in sums.row_mut(j).iter_mut().zip(p.iter()) {
                    *s += w * *v;
                }
            }
        }
        let mut new_centers = centers.rows().to_owned();
        let mut empties: Vec<usize> = Vec::new();
        for (j, &m) in mass.iter().enumerate() {
            if m > F::zero() {
                for (c, s) in new_centers.row_mut(j).iter_mut().zip(sums.row(j).iter()) {
                    *c = *s / m;
                }
            } else {
                empties.push(j);
            }
        }
        // Empty-cluster repair: move each empty center onto the point
        // currently farthest from its assigned center, each point used once.
        let mut used: Vec<usize> = Vec::new();
        for j in empties {
            let far = (0..n)
                .filter(|i| !used.contains(i))
                .max_by(|&a, &b| {
                    assign[a]
                        .0
                        .partial_cmp(&assign[b].0)
                        .expect("finite")
                        .then(b.cmp(&a)) // ties: prefer the lower index
                })
                .unwrap_or(0);
            used.push(far);
            new_centers.row_mut(j).assign(&points.row(far));
        }
        centers = CenterSet::new(new_centers)?;

        assign = assign_points(points, &centers);
        let cost = weighted_cost(&assign, weights);
        debug_assert!(
            cost <= prev_cost * (F::one() + slack) + F::min_positive_value(),
            "Lloyd cost increased: {prev_cost} -> {cost}"
        );

        if prev_cost <= F::zero() {
            prev_cost = cost;
            break;
        }
        let rel_dec = (prev_cost - cost) / prev_cost;
        prev_cost = cost;
        if rel_dec < cfg.rel_tol {
            break;
        }
    }

    Ok(LloydOutcome {
        centers,
        cost: prev_cost,
        iters,
    })
}

/// Runs `restarts` independent (k-means++ seed, Lloyd) chains, each on its
/// own derived RNG stream, and returns the lowest-cost result (ties toward
/// the lower chain index). Deterministic per seed and identical to the
/// sequential execution.
pub fn solve_kmeans<F: Real>(
    data: &Dataset<F>,
    weights: Option<&[F]>,
    cfg: &SolverConfig<F>,
) -> Result<(CenterSet<F>, F)> {
    cfg.validate()?;
    if cfg.k > data.n() {
        return Err(Error::contract(format!(
            "k={} exceeds n={}",
            cfg.k,
            data.n()
        )));
    }
    check_weights(weights, data.n())?;
    let chains: Vec<Result<(F, usize, CenterSet<F>)>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|chain| {
            let chain_seed = derive_seed(cfg.seed, chain as u64);
            let init = seed_kmeanspp(data, weights, cfg.k, chain_seed)?;
            let outcome = lloyd(data, weights, &init, cfg)?;
            Ok((outcome.cost, chain, outcome.centers))
        })
        .collect();
    let mut best: Option<(F, usize, CenterSet<F>)> = None;
    for chain in chains {
        let (cost, idx, centers) = chain?;
        let better = match &best {
            None => true,
            Some((bc, bi, _)) => {
                cost < *bc || (cost == *bc && idx < *bi)
            }
        };
        if better {
            best = Some((cost, idx, centers));
        }
    }
    let (cost, _, centers) = best.expect("restarts >= 1");
    Ok((centers, cost))
}
