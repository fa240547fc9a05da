//! Brute-force ground truth for tiny instances: exact optimal robust
//! clustering values used to validate the solvers and the ratio property
//! suite.
//!
//! For k-means the block centers are exact centroids, so enumerating every
//! outlier subset and every partition of the remainder yields the global
//! optimum. For k-median and k-center the centers are restricted to data
//! points of the block (discrete-center convention), which keeps the
//! enumeration exact for that convention.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde_json::json;

use crate::dataset::{
    cost_excluding, evaluate_cost, CenterSet, Dataset, Objective, RobustInstance,
};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};
use crate::scalar::Real;
use crate::scoring::{score_midrange_sum, score_vanilla, select_outliers};

/// Hard cap on C(n,z) * k^(n-z); larger instances are refused.
pub const ENUMERATION_BUDGET: f64 = 1e8;

/// How block centers were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterConvention {
    /// Free centroids (k-means).
    Centroid,
    /// Best data point of each block (k-median, k-center).
    DataPoint,
}

/// Exact optimum of a tiny robust clustering instance.
#[derive(Debug, Clone)]
pub struct OracleResult<F: Real> {
    pub opt_cost: F,
    /// The z optimal outlier indices, ascending.
    pub opt_outliers: Vec<usize>,
    /// Per-point block id (canonical labels 0..blocks-1); `None` at outliers.
    pub opt_partition: Vec<Option<usize>>,
    pub objective: Objective,
    pub centers: CenterSet<F>,
    pub convention: CenterConvention,
}

impl<F: Real> OracleResult<F> {
    /// Sizes of the nonempty blocks, by block id.
    pub fn block_sizes(&self) -> Vec<usize> {
        let blocks = self
            .opt_partition
            .iter()
            .flatten()
            .max()
            .map_or(0, |&b| b + 1);
        let mut sizes = vec![0usize; blocks];
        for b in self.opt_partition.iter().flatten() {
            sizes[*b] += 1;
        }
        sizes
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "objective": self.objective.as_str(),
            "opt_cost": self.opt_cost.to_f64_lossy(),
            "opt_outliers": self.opt_outliers,
            "opt_partition": self.opt_partition,
            "centers": self.centers.to_f64_rows(),
            "center_convention": match self.convention {
                CenterConvention::Centroid => "centroid",
                CenterConvention::DataPoint => "data_point",
            },
        })
    }
}

fn binomial(n: usize, z: usize) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..z.min(n - z) {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Visits every z-subset of 0..n in lexicographic order.
fn for_each_combination(n: usize, z: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..z).collect();
    if z == 0 {
        f(&idx);
        return;
    }
    if z > n {
        return;
    }
    loop {
        f(&idx);
        // advance
        let mut i = z;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - z {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..z {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn collect_combinations(n: usize, z: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_combination(n, z, |c| out.push(c.to_vec()));
    out
}

/// Visits every partition of 0..m into at most `kmax` blocks as a restricted
/// growth string (canonical labels: item 0 is always in block 0).
fn for_each_partition(m: usize, kmax: usize, mut f: impl FnMut(&[usize])) {
    if m == 0 {
        f(&[]);
        return;
    }
    let mut a = vec![0usize; m];
    let mut maxes = vec![0usize; m];
    loop {
        f(&a);
        // advance: rightmost position that can still grow
        let mut i = m;
        loop {
            if i <= 1 {
                return;
            }
            i -= 1;
            let cap = (maxes[i - 1] + 1).min(kmax - 1);
            if a[i] < cap {
                break;
            }
        }
        a[i] += 1;
        maxes[i] = maxes[i - 1].max(a[i]);
        for j in i + 1..m {
            a[j] = 0;
            maxes[j] = maxes[j - 1];
        }
    }
}

/// Cost of one partition of `inliers` under the objective; returns the cost
/// and the block centers.
fn partition_cost<F: Real>(
    points: ndarray::ArrayView2<'_, F>,
    inliers: &[usize],
    labels: &[usize],
    objective: Objective,
) -> (F, Vec<Vec<F>>) {
    let blocks = labels.iter().max().map_or(0, |&b| b + 1);
    let d = points.ncols();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); blocks];
    for (pos, &b) in labels.iter().enumerate() {
        members[b].push(inliers[pos]);
    }
    let mut total = F::zero();
    let mut centers: Vec<Vec<F>> = Vec::with_capacity(blocks);
    for block in &members {
        match objective {
            Objective::KMeans => {
                let cnt = F::from_f64_lossy(block.len() as f64);
                let mut centroid = vec![F::zero(); d];
                for &i in block {
                    for (c, v) in centroid.iter_mut().zip(points.row(i).iter()) {
                        *c += *v;
                    }
                }
                for c in centroid.iter_mut() {
                    *c /= cnt;
                }
                for &i in block {
                    let mut d2 = F::zero();
                    for (v, c) in points.row(i).iter().zip(centroid.iter()) {
                        let diff = *v - *c;
                        d2 += diff * diff;
                    }
                    total += d2;
                }
                centers.push(centroid);
            }
            Objective::KMedian | Objective::KCenter => {
                let mut best: Option<(F, usize)> = None;
                for &cand in block {
                    let mut agg = F::zero();
                    for &i in block {
                        let mut d2 = F::zero();
                        for (v, c) in points.row(i).iter().zip(points.row(cand).iter()) {
                            let diff = *v - *c;
                            d2 += diff * diff;
                        }
                        let dist = d2.sqrt();
                        agg = match objective {
                            Objective::KMedian => agg + dist,
                            _ => agg.max(dist),
                        };
                    }
                    if best.is_none_or(|(b, _)| agg < b) {
                        best = Some((agg, cand));
                    }
                }
                let (block_cost, center_idx) = best.expect("blocks are nonempty");
                total = match objective {
                    Objective::KMedian => total + block_cost,
                    _ => total.max(block_cost),
                };
                centers.push(points.row(center_idx).to_vec());
            }
        }
    }
    (total, centers)
}

/// Exhaustively minimizes the robust objective over every choice of z
/// outliers and every assignment of the remaining points to at most k
/// blocks. Ties break toward the lexicographically smallest outlier set.
pub fn brute_force_robust<F: Real>(
    instance: &RobustInstance<F>,
    objective: Objective,
) -> Result<OracleResult<F>> {
    let n = instance.n();
    let (k, z) = (instance.k, instance.z);
    let bound = binomial(n, z) * (k as f64).powi((n - z) as i32);
    if bound > ENUMERATION_BUDGET {
        return Err(Error::TooLarge {
            bound,
            limit: ENUMERATION_BUDGET,
        });
    }
    let points = instance.data.points();
    let subsets = collect_combinations(n, z);
    let per_subset: Vec<(F, Vec<usize>)> = subsets
        .par_iter()
        .map(|outliers| {
            let inliers: Vec<usize> = (0..n).filter(|i| !outliers.contains(i)).collect();
            let mut best_cost = F::infinity();
            let mut best_labels: Vec<usize> = Vec::new();
            for_each_partition(inliers.len(), k, |labels| {
                let (cost, _) = partition_cost(points, &inliers, labels, objective);
                if cost < best_cost {
                    best_cost = cost;
                    best_labels = labels.to_vec();
                }
            });
            (best_cost, best_labels)
        })
        .collect();

    // Sequential min over lexicographically ordered subsets; strict < keeps
    // the earliest (lex-smallest) outlier set on ties.
    let mut best: Option<(F, usize)> = None;
    for (si, (cost, _)) in per_subset.iter().enumerate() {
        if best.is_none_or(|(bc, _)| *cost < bc) {
            best = Some((*cost, si));
        }
    }
    let (opt_cost, si) = best.expect("at least one subset");
    let outliers = subsets[si].clone();
    let labels = &per_subset[si].1;
    let inliers: Vec<usize> = (0..n).filter(|i| !outliers.contains(i)).collect();
    let (_, centers) = partition_cost(points, &inliers, labels, objective);

    let mut partition: Vec<Option<usize>> = vec![None; n];
    for (pos, &i) in inliers.iter().enumerate() {
        partition[i] = Some(labels[pos]);
    }
    let d = instance.data.dim();
    let mut center_arr = Array2::zeros((centers.len(), d));
    for (r, c) in centers.iter().enumerate() {
        for (j, v) in c.iter().enumerate() {
            center_arr[[r, j]] = *v;
        }
    }
    Ok(OracleResult {
        opt_cost,
        opt_outliers: outliers,
        opt_partition: partition,
        objective,
        centers: CenterSet::new(center_arr)?,
        convention: match objective {
            Objective::KMeans => CenterConvention::Centroid,
            _ => CenterConvention::DataPoint,
        },
    })
}

// ---------------------------------------------------------------------------
// Ratio property sweep
// ---------------------------------------------------------------------------

/// One instance shape for the sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepShape {
    pub k: usize,
    pub z: usize,
    pub cluster_size: usize,
}

/// Randomized planted-instance family for the ratio property suite. Blob
/// separation and outlier distance vary per trial so the family covers both
/// easy (far outliers) and adversarial (near or cliqued outliers) regimes.
#[derive(Debug, Clone)]
pub struct SweepFamily {
    pub dim: usize,
    pub shapes: Vec<SweepShape>,
    pub spread: f64,
    /// Blob separation range, in multiples of `spread`.
    pub separation_range: (f64, f64),
    /// Outlier distance range, in multiples of the separation.
    pub outlier_factor_range: (f64, f64),
    /// Fraction of trials whose outliers form one tight clique.
    pub clique_fraction: f64,
}

impl SweepFamily {
    /// Instances with n <= 12 where every blob holds at least ceil(c*z)
    /// points, sized to stay inside the enumeration budget.
    pub fn desk_default(c: f64) -> Self {
        let s = |z: usize| (c * z as f64).ceil() as usize;
        let candidates = [
            SweepShape { k: 1, z: 1, cluster_size: s(1) + 2 },
            SweepShape { k: 2, z: 1, cluster_size: s(1) },
            SweepShape { k: 2, z: 1, cluster_size: s(1) + 1 },
            SweepShape { k: 3, z: 1, cluster_size: s(1) },
            SweepShape { k: 1, z: 2, cluster_size: s(2) },
            SweepShape { k: 1, z: 3, cluster_size: s(3) },
        ];
        let shapes = candidates
            .into_iter()
            .filter(|sh| sh.k * sh.cluster_size + sh.z <= 12)
            .collect();
        Self {
            dim: 2,
            shapes,
            spread: 1.0,
            separation_range: (3.0, 12.0),
            outlier_factor_range: (0.7, 8.0),
            clique_fraction: 0.4,
        }
    }
}

/// Worst observed achieved/optimal ratios with the oracle as sub-solver.
#[derive(Debug, Clone, Copy)]
pub struct SweepOutcome {
    pub max_ratio_okmeans: f64,
    pub max_ratio_okmeans2: f64,
    pub trials: usize,
    /// Instances resampled because their optimum broke the cluster-size
    /// assumption.
    pub rejected: usize,
    /// Runs where recomputing the outlier set increased the cost (must be 0).
    pub recompute_violations: usize,
}

fn sweep_instance<F: Real>(
    family: &SweepFamily,
    shape: SweepShape,
    seed: u64,
) -> Result<RobustInstance<F>> {
    let mut rng = seeded(seed);
    let d = family.dim;
    let (slo, shi) = family.separation_range;
    let separation = family.spread * (slo + (shi - slo) * rng.random::<f64>());
    let centers =
        crate::dataset::place_separated_centers(&mut rng, shape.k, separation, d);
    let n = shape.k * shape.cluster_size + shape.z;
    let mut points = Array2::zeros((n, d));
    let mut row = 0usize;
    for center in &centers {
        for _ in 0..shape.cluster_size {
            for j in 0..d {
                let g: f64 = StandardNormal.sample(&mut rng);
                points[[row, j]] = F::from_f64_lossy(center[j] + family.spread * g);
            }
            row += 1;
        }
    }
    let mut origin = vec![0.0; d];
    for c in &centers {
        for (o, v) in origin.iter_mut().zip(c) {
            *o += v / shape.k as f64;
        }
    }
    let (flo, fhi) = family.outlier_factor_range;
    let clique = rng.random::<f64>() < family.clique_fraction;
    let base_dir: Vec<f64> = {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
        v.into_iter().map(|x| x / norm).collect()
    };
    let base_radius = separation * (flo + (fhi - flo) * rng.random::<f64>());
    for _ in 0..shape.z {
        if clique {
            for j in 0..d {
                let g: f64 = StandardNormal.sample(&mut rng);
                points[[row, j]] = F::from_f64_lossy(
                    origin[j] + base_radius * base_dir[j] + 0.1 * family.spread * g,
                );
            }
        } else {
            let dir: Vec<f64> = {
                let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
                v.into_iter().map(|x| x / norm).collect()
            };
            let radius = separation * (flo + (fhi - flo) * rng.random::<f64>());
            for j in 0..d {
                points[[row, j]] = F::from_f64_lossy(origin[j] + radius * dir[j]);
            }
        }
        row += 1;
    }
    let data = Dataset::new(points)?;
    RobustInstance::new(data, shape.k, shape.z)
}

fn assumption_holds<F: Real>(opt: &OracleResult<F>, k: usize, c: f64, z: usize) -> bool {
    let sizes = opt.block_sizes();
    sizes.len() == k && sizes.iter().all(|&s| s as f64 >= c * z as f64 - 1e-9)
}

/// Removal by one rule followed by the exact (brute-force) k-means solve on
/// the remainder; returns the robust cost on the full instance and whether
/// the recomputation check held.
fn exact_subsolve_ratio<F: Real>(
    instance: &RobustInstance<F>,
    c: F,
    midrange: bool,
    opt_cost: F,
) -> Result<(f64, bool)> {
    let data = &instance.data;
    let z = instance.z;
    let rank = if midrange {
        crate::scoring::midrange_max_rank(c, z).max(1)
    } else {
        crate::scoring::vanilla_rank(c, z)
    };
    let table = crate::knn::knn_table(data, rank)?;
    let scores = if midrange {
        score_midrange_sum(&table, z, c)?
    } else {
        score_vanilla(&table, z, c)?
    };
    let selected = select_outliers(&scores, z)?;
    let kept: Vec<usize> = (0..instance.n())
        .filter(|i| selected.binary_search(i).is_err())
        .collect();
    let scrubbed = data.subset(&kept)?;
    let sub = RobustInstance::new(scrubbed, instance.k, 0)?;
    let exact = brute_force_robust(&sub, Objective::KMeans)?;
    let (achieved, _) = evaluate_cost(data, &exact.centers, z, Objective::KMeans)?;
    let kept_cost = cost_excluding(data, &exact.centers, &selected, Objective::KMeans)?;
    let monotone = achieved <= kept_cost;
    let opt = opt_cost.to_f64_lossy();
    let ach = achieved.to_f64_lossy();
    let ratio = if opt <= f64::MIN_POSITIVE {
        // Degenerate zero-cost optimum: the reduction must also be free.
        if ach <= 1e-12 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        ach / opt
    };
    Ok((ratio, monotone))
}

/// Runs both removal rules with the oracle as sub-solver across randomized
/// planted instances whose optima satisfy the cluster-size assumption;
/// returns the worst observed achieved/optimal ratios.
pub fn ratio_sweep<F: Real>(
    family: &SweepFamily,
    trials: usize,
    c: F,
    seed: u64,
) -> Result<SweepOutcome> {
    if family.shapes.is_empty() {
        return Err(Error::contract("sweep family has no shapes".to_string()));
    }
    let c64 = c.to_f64_lossy();
    if !(c64 > 1.0) {
        return Err(Error::contract(format!("c must exceed 1, got {c64}")));
    }
    const MAX_ATTEMPTS: u64 = 60;
    let outcomes: Vec<Result<(f64, f64, usize, usize)>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let shape = family.shapes[trial % family.shapes.len()];
            let mut rejected = 0usize;
            for attempt in 0..MAX_ATTEMPTS {
                let inst_seed = derive_seed(seed, (trial as u64) * MAX_ATTEMPTS + attempt);
                let instance = sweep_instance::<F>(family, shape, inst_seed)?;
                let opt = brute_force_robust(&instance, Objective::KMeans)?;
                if !assumption_holds(&opt, shape.k, c64, shape.z) {
                    rejected += 1;
                    continue;
                }
                let (r1, mono1) = exact_subsolve_ratio(&instance, c, false, opt.opt_cost)?;
                let (r2, mono2) = exact_subsolve_ratio(&instance, c, true, opt.opt_cost)?;
                debug_assert!(r1 >= 1.0 - 1e-9 && r2 >= 1.0 - 1e-9);
                let violations = usize::from(!mono1) + usize::from(!mono2);
                return Ok((r1, r2, rejected, violations));
            }
            Err(Error::contract(format!(
                "sweep trial {trial} exhausted {MAX_ATTEMPTS} attempts without \
                 satisfying the cluster-size assumption"
            )))
        })
        .collect();

    let mut out = SweepOutcome {
        max_ratio_okmeans: 0.0,
        max_ratio_okmeans2: 0.0,
        trials,
        rejected: 0,
        recompute_violations: 0,
    };
    for o in outcomes {
        let (r1, r2, rejected, violations) = o?;
        out.max_ratio_okmeans = out.max_ratio_okmeans.max(r1);
        out.max_ratio_okmeans2 = out.max_ratio_okmeans2.max(r2);
        out.rejected += rejected;
        out.recompute_violations += violations;
    }
    Ok(out)
}
