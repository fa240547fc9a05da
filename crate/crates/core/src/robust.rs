//! End-to-end robust clustering pipelines: score-based outlier removal
//! followed by standard k-means, the outlier-unaware baseline, the uniform
//! coreset reduction, and a plug-in interface for external baselines.

use std::time::Instant;

use rand::Rng;
use serde_json::json;

use crate::dataset::{
    cost_excluding, evaluate_detailed, CenterSet, Dataset, Objective, RobustInstance,
};
use crate::error::{Error, Result};
use crate::kmeans::{solve_kmeans, SolverConfig};
use crate::knn::knn_table;
use crate::rng::seeded;
use crate::scalar::Real;
use crate::scoring::{
    midrange_max_rank, score_constant_k, score_midrange_sum, score_vanilla, select_outliers,
    vanilla_rank, ScoreVector,
};

/// Which removal rule a pipeline applies before the k-means solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodKind<F: Real> {
    /// Remove the z points with the largest rank-floor((c+1)z/2) radius.
    OKMeans { c: F },
    /// Remove the z points with the largest mid-range distance sum.
    OKMeans2 { c: F },
    /// Classic fixed-K distance score (ablation).
    ConstantK { k: usize },
    /// Outlier-unaware k-means++; outliers assessed post hoc.
    KMeansPP,
}

impl<F: Real> MethodKind<F> {
    pub fn descriptor(&self) -> String {
        match self {
            MethodKind::OKMeans { c } => format!("okmeans(c={c})"),
            MethodKind::OKMeans2 { c } => format!("okmeans2(c={c})"),
            MethodKind::ConstantK { k } => format!("constant_k(K={k})"),
            MethodKind::KMeansPP => "kmeanspp".to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MethodKind::OKMeans { c } | MethodKind::OKMeans2 { c } => {
                if *c <= F::one() {
                    return Err(Error::contract(format!("c must exceed 1, got {c}")));
                }
            }
            MethodKind::ConstantK { k } => {
                if *k == 0 {
                    return Err(Error::contract("constant-K needs K >= 1".to_string()));
                }
            }
            MethodKind::KMeansPP => {}
        }
        Ok(())
    }
}

/// A removal rule plus the solver settings it drives.
#[derive(Debug, Clone, Copy)]
pub struct Method<F: Real> {
    pub kind: MethodKind<F>,
    pub solver: SolverConfig<F>,
}

impl<F: Real> Method<F> {
    pub fn new(kind: MethodKind<F>, solver: SolverConfig<F>) -> Result<Self> {
        kind.validate()?;
        solver.validate()?;
        Ok(Self { kind, solver })
    }
}

/// Uniform-subsample coreset request.
#[derive(Debug, Clone, Copy)]
pub struct CoresetSpec {
    pub size: usize,
    pub seed: u64,
}

/// Everything a pipeline reports about one run.
#[derive(Debug, Clone)]
pub struct ClusteringResult<F: Real> {
    pub centers: CenterSet<F>,
    /// Indices the method removed before solving (z, or the scaled budget
    /// under a coreset), in the evaluated dataset's index space, ascending.
    pub selected: Vec<usize>,
    /// The recomputed outlier set induced by `centers`, exactly z indices.
    pub outliers: Vec<usize>,
    /// Per-point assigned center; `None` exactly at `outliers`.
    pub assignment: Vec<Option<usize>>,
    /// Robust cost of `centers` on the evaluated dataset (drops `outliers`).
    pub robust_cost: F,
    /// Cost of `centers` over the dataset minus `selected` only; recomputing
    /// the outlier set never increases cost, so `robust_cost <= kept_cost`.
    pub kept_cost: F,
    pub objective: Objective,
    pub elapsed: f64,
    pub seed: u64,
    pub method: String,
}

impl<F: Real> ClusteringResult<F> {
    /// Checks internal consistency against the dataset the result refers to.
    pub fn validate(&self, data: &Dataset<F>, z: usize) -> Result<()> {
        if self.outliers.len() != z {
            return Err(Error::contract(format!(
                "result holds {} outliers, expected exactly z={z}",
                self.outliers.len()
            )));
        }
        if self.assignment.len() != data.n() {
            return Err(Error::contract("assignment length != n".to_string()));
        }
        for (i, a) in self.assignment.iter().enumerate() {
            let is_outlier = self.outliers.binary_search(&i).is_ok();
            if is_outlier != a.is_none() {
                return Err(Error::contract(format!(
                    "assignment/outlier mismatch at index {i}"
                )));
            }
        }
        let eval = evaluate_detailed(data, &self.centers, z, self.objective)?;
        if eval.cost != self.robust_cost || eval.outliers != self.outliers {
            return Err(Error::contract(
                "robust_cost does not recompute from fields".to_string(),
            ));
        }
        Ok(())
    }

    /// JSON document with centers, outlier indices, cost, objective, elapsed
    /// time, seed, and the method descriptor.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "method": self.method,
            "objective": self.objective.as_str(),
            "seed": self.seed,
            "robust_cost": self.robust_cost.to_f64_lossy(),
            "kept_cost": self.kept_cost.to_f64_lossy(),
            "elapsed_s": self.elapsed,
            "centers": self.centers.to_f64_rows(),
            "selected": self.selected,
            "outliers": self.outliers,
            "evaluated_on": "full",
        })
    }
}

/// External baselines implement this to slot into the bench harness.
pub trait Baseline<F: Real> {
    fn name(&self) -> String;
    fn run(&self, instance: &RobustInstance<F>) -> Result<ClusteringResult<F>>;
}

impl<F: Real> Baseline<F> for Method<F> {
    fn name(&self) -> String {
        self.kind.descriptor()
    }

    fn run(&self, instance: &RobustInstance<F>) -> Result<ClusteringResult<F>> {
        run_pipeline(instance, self, None, Objective::KMeans)
    }
}

enum ScoreStage<F: Real> {
    Vanilla { c: F },
    MidRange { c: F },
    ConstantK { k: usize },
}

fn compute_scores<F: Real>(
    data: &Dataset<F>,
    z: usize,
    stage: &ScoreStage<F>,
) -> Result<ScoreVector<F>> {
    let n = data.n();
    let table_width = match stage {
        ScoreStage::Vanilla { c } => vanilla_rank(*c, z),
        ScoreStage::MidRange { c } => midrange_max_rank(*c, z).max(1),
        ScoreStage::ConstantK { k } => k + 1,
    };
    if table_width > n {
        return Err(Error::contract(format!(
            "scoring needs neighbor rank {table_width} but the dataset has only {n} points"
        )));
    }
    let table = knn_table(data, table_width.max(1))?;
    match stage {
        ScoreStage::Vanilla { c } => score_vanilla(&table, z, *c),
        ScoreStage::MidRange { c } => score_midrange_sum(&table, z, *c),
        ScoreStage::ConstantK { k } => score_constant_k(&table, *k),
    }
}

/// Removal indices for a scoring stage; `z = 0` short-circuits to no removal.
fn removal_set<F: Real>(data: &Dataset<F>, z: usize, stage: &ScoreStage<F>) -> Result<Vec<usize>> {
    if z == 0 {
        return Ok(Vec::new());
    }
    let scores = compute_scores(data, z, stage)?;
    select_outliers(&scores, z)
}

fn finish_run<F: Real>(
    instance: &RobustInstance<F>,
    centers: CenterSet<F>,
    selected: Vec<usize>,
    objective: Objective,
    started: Instant,
    seed: u64,
    method: String,
) -> Result<ClusteringResult<F>> {
    let eval = evaluate_detailed(&instance.data, &centers, instance.z, objective)?;
    let kept_cost = cost_excluding(&instance.data, &centers, &selected, objective)?;
    Ok(ClusteringResult {
        centers,
        selected,
        outliers: eval.outliers,
        assignment: eval.assignment,
        robust_cost: eval.cost,
        kept_cost,
        objective,
        elapsed: started.elapsed().as_secs_f64(),
        seed,
        method,
    })
}

fn check_solver_k<F: Real>(instance: &RobustInstance<F>, cfg: &SolverConfig<F>) -> Result<()> {
    if cfg.k != instance.k {
        return Err(Error::contract(format!(
            "solver k={} disagrees with instance k={}",
            cfg.k, instance.k
        )));
    }
    Ok(())
}

fn run_scoring_method<F: Real>(
    instance: &RobustInstance<F>,
    stage: ScoreStage<F>,
    cfg: &SolverConfig<F>,
    objective: Objective,
    method: String,
) -> Result<ClusteringResult<F>> {
    check_solver_k(instance, cfg)?;
    let started = Instant::now();
    let selected = removal_set(&instance.data, instance.z, &stage)?;
    let kept: Vec<usize> = (0..instance.n())
        .filter(|i| selected.binary_search(i).is_err())
        .collect();
    let scrubbed = instance.data.subset(&kept)?;
    let (centers, _) = solve_kmeans(&scrubbed, None, cfg)?;
    finish_run(instance, centers, selected, objective, started, cfg.seed, method)
}

/// Radius-score removal followed by k-means; the final outlier set and
/// robust cost are recomputed against the returned centers.
pub fn run_okmeans<F: Real>(
    instance: &RobustInstance<F>,
    c: F,
    cfg: &SolverConfig<F>,
) -> Result<ClusteringResult<F>> {
    run_okmeans_with(instance, c, cfg, Objective::KMeans)
}

pub fn run_okmeans_with<F: Real>(
    instance: &RobustInstance<F>,
    c: F,
    cfg: &SolverConfig<F>,
    objective: Objective,
) -> Result<ClusteringResult<F>> {
    MethodKind::OKMeans { c }.validate()?;
    let method = MethodKind::OKMeans { c }.descriptor();
    run_scoring_method(instance, ScoreStage::Vanilla { c }, cfg, objective, method)
}

/// Mid-range-sum removal followed by k-means.
pub fn run_okmeans2<F: Real>(
    instance: &RobustInstance<F>,
    c: F,
    cfg: &SolverConfig<F>,
) -> Result<ClusteringResult<F>> {
    run_okmeans2_with(instance, c, cfg, Objective::KMeans)
}

pub fn run_okmeans2_with<F: Real>(
    instance: &RobustInstance<F>,
    c: F,
    cfg: &SolverConfig<F>,
    objective: Objective,
) -> Result<ClusteringResult<F>> {
    MethodKind::OKMeans2 { c }.validate()?;
    let method = MethodKind::OKMeans2 { c }.descriptor();
    run_scoring_method(instance, ScoreStage::MidRange { c }, cfg, objective, method)
}

/// Fixed-K ablation: removal by the classic distance-to-K-th-neighbor score.
pub fn run_constant_k<F: Real>(
    instance: &RobustInstance<F>,
    k: usize,
    cfg: &SolverConfig<F>,
) -> Result<ClusteringResult<F>> {
    run_constant_k_with(instance, k, cfg, Objective::KMeans)
}

pub fn run_constant_k_with<F: Real>(
    instance: &RobustInstance<F>,
    k: usize,
    cfg: &SolverConfig<F>,
    objective: Objective,
) -> Result<ClusteringResult<F>> {
    MethodKind::<F>::ConstantK { k }.validate()?;
    let method = MethodKind::<F>::ConstantK { k }.descriptor();
    run_scoring_method(instance, ScoreStage::ConstantK { k }, cfg, objective, method)
}

/// Outlier-unaware baseline: k-means on the full dataset, robust cost and
/// outliers computed post hoc with budget z.
pub fn run_kmeanspp_baseline<F: Real>(
    instance: &RobustInstance<F>,
    cfg: &SolverConfig<F>,
) -> Result<ClusteringResult<F>> {
    run_kmeanspp_baseline_with(instance, cfg, Objective::KMeans)
}

pub fn run_kmeanspp_baseline_with<F: Real>(
    instance: &RobustInstance<F>,
    cfg: &SolverConfig<F>,
    objective: Objective,
) -> Result<ClusteringResult<F>> {
    check_solver_k(instance, cfg)?;
    let started = Instant::now();
    let (centers, _) = solve_kmeans(&instance.data, None, cfg)?;
    // No removal stage: the post-hoc z-farthest set doubles as "selected".
    let eval = evaluate_detailed(&instance.data, &centers, instance.z, objective)?;
    let selected = eval.outliers.clone();
    finish_run(
        instance,
        centers,
        selected,
        objective,
        started,
        cfg.seed,
        MethodKind::<F>::KMeansPP.descriptor(),
    )
}

/// Uniformly samples `spec.size` points without replacement and scales the
/// outlier budget to `z' = max(1, round(z * m / n))` (or 0 when z = 0).
/// Labels and the ground-truth mask are carried over.
pub fn uniform_coreset<F: Real>(
    instance: &RobustInstance<F>,
    spec: &CoresetSpec,
) -> Result<RobustInstance<F>> {
    Ok(uniform_coreset_indexed(instance, spec)?.0)
}

/// [`uniform_coreset`] plus the sampled original indices (ascending).
pub fn uniform_coreset_indexed<F: Real>(
    instance: &RobustInstance<F>,
    spec: &CoresetSpec,
) -> Result<(RobustInstance<F>, Vec<usize>)> {
    let n = instance.n();
    let m = spec.size;
    if m == 0 || m > n {
        return Err(Error::contract(format!(
            "coreset size must satisfy 1 <= m <= n, got m={m}, n={n}"
        )));
    }
    let z_scaled = scaled_budget(instance.z, m, n);
    let mut rng = seeded(spec.seed);
    // Partial Fisher-Yates: the first m slots are a uniform sample without
    // replacement.
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = rng.random_range(i..n);
        indices.swap(i, j);
    }
    let mut sample: Vec<usize> = indices[..m].to_vec();
    sample.sort_unstable();
    let data = instance.data.subset(&sample)?;
    let reduced = RobustInstance::new(data, instance.k, z_scaled)?;
    Ok((reduced, sample))
}

/// The proportionally scaled outlier budget for a coreset of size m.
pub fn scaled_budget(z: usize, m: usize, n: usize) -> usize {
    if z == 0 {
        0
    } else {
        (((z * m) as f64 / n as f64).round() as usize).max(1)
    }
}

/// Runs one method, optionally through a uniform coreset. Centers from the
/// (reduced) solve are always re-evaluated on the full original dataset with
/// the original budget z; the recorded removal set is mapped back to
/// original indices.
pub fn run_pipeline<F: Real>(
    instance: &RobustInstance<F>,
    method: &Method<F>,
    coreset: Option<&CoresetSpec>,
    objective: Objective,
) -> Result<ClusteringResult<F>> {
    method.kind.validate()?;
    match coreset {
        None => dispatch(instance, method, objective),
        Some(spec) => {
            let started = Instant::now();
            let (reduced, sample) = uniform_coreset_indexed(instance, spec)?;
            let sub = dispatch(&reduced, method, objective)?;
            let selected: Vec<usize> = sub.selected.iter().map(|&i| sample[i]).collect();
            finish_run(
                instance,
                sub.centers,
                selected,
                objective,
                started,
                method.solver.seed,
                method.kind.descriptor(),
            )
        }
    }
}

fn dispatch<F: Real>(
    instance: &RobustInstance<F>,
    method: &Method<F>,
    objective: Objective,
) -> Result<ClusteringResult<F>> {
    let mut cfg = method.solver;
    cfg.k = instance.k;
    match method.kind {
        MethodKind::OKMeans { c } => run_okmeans_with(instance, c, &cfg, objective),
        MethodKind::OKMeans2 { c } => run_okmeans2_with(instance, c, &cfg, objective),
        MethodKind::ConstantK { k } => run_constant_k_with(instance, k, &cfg, objective),
        MethodKind::KMeansPP => run_kmeanspp_baseline_with(instance, &cfg, objective),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_planted;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    fn instance_1d(values: &[f64], k: usize, z: usize) -> RobustInstance<f64> {
        let arr = Array2::from_shape_vec((values.len(), 1), values.to_vec()).unwrap();
        RobustInstance::new(Dataset::new(arr).unwrap(), k, z).unwrap()
    }

    #[test]
    fn okmeans2_hand_example() {
        // Scores [4,3,5,10] drop 7; centroid of {0,1,3} is 4/3; robust cost
        // redrops 7 and sums the squared residuals: 42/9.
        let inst = instance_1d(&[0.0, 1.0, 3.0, 7.0], 1, 1);
        let cfg = SolverConfig::new(1, 3);
        let res = run_okmeans2(&inst, 3.0, &cfg).unwrap();
        assert_eq!(res.selected, vec![3]);
        assert_eq!(res.outliers, vec![3]);
        assert_abs_diff_eq!(res.centers.rows()[[0, 0]], 4.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(res.robust_cost, 42.0 / 9.0, epsilon = 1e-9);
        res.validate(&inst.data, inst.z).unwrap();
    }

    #[test]
    fn okmeans_planted_recall_one() {
        let inst = generate_planted::<f64>(2, 9, 2, 20.0, 1.0, 2, 41).unwrap();
        let cfg = SolverConfig::new(2, 7);
        let res = run_okmeans(&inst, 3.0, &cfg).unwrap();
        let truth = inst.data.true_outlier_indices().unwrap();
        assert_eq!(res.selected, truth);
        assert_eq!(res.outliers, truth);
    }

    #[test]
    fn okmeans_rank_exceeding_n_is_rejected() {
        // floor((c+1)z/2) = floor(2*5) = 10 > n = 8
        let inst = instance_1d(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 70.0], 1, 5);
        let cfg = SolverConfig::new(1, 1);
        assert!(run_okmeans(&inst, 3.0, &cfg).is_err());
    }

    #[test]
    fn zero_budget_behaves_like_plain_kmeans() {
        let inst = instance_1d(&[0.0, 1.0, 9.0, 10.0], 2, 0);
        let cfg = SolverConfig::new(2, 5);
        let res = run_okmeans(&inst, 3.0, &cfg).unwrap();
        let (_, cost) = solve_kmeans(&inst.data, None, &cfg).unwrap();
        assert_eq!(res.robust_cost, cost);
        assert!(res.selected.is_empty());
        assert!(res.outliers.is_empty());
    }

    #[test]
    fn kmeanspp_baseline_zero_budget_equals_solver() {
        let inst = instance_1d(&[0.0, 1.0, 9.0, 10.0], 2, 0);
        let cfg = SolverConfig::new(2, 5);
        let res = run_kmeanspp_baseline(&inst, &cfg).unwrap();
        let (_, cost) = solve_kmeans(&inst.data, None, &cfg).unwrap();
        assert_eq!(res.robust_cost, cost);
        assert_eq!(res.robust_cost, res.kept_cost);
    }

    #[test]
    fn kmeanspp_baseline_worse_than_okmeans_on_far_outlier() {
        // One far outlier drags the k=1 centroid; removal first avoids that.
        let inst = instance_1d(&[0.0, 0.5, 1.0, 1.5, 100.0], 1, 1);
        let cfg = SolverConfig::new(1, 9);
        let ok = run_okmeans(&inst, 3.0, &cfg).unwrap();
        let pp = run_kmeanspp_baseline(&inst, &cfg).unwrap();
        assert!(ok.robust_cost < pp.robust_cost);
    }

    #[test]
    fn results_are_deterministic_per_seed() {
        let inst = generate_planted::<f64>(2, 8, 2, 15.0, 1.0, 3, 2).unwrap();
        let cfg = SolverConfig::new(2, 31);
        let a = run_okmeans2(&inst, 3.0, &cfg).unwrap();
        let b = run_okmeans2(&inst, 3.0, &cfg).unwrap();
        assert_eq!(a.robust_cost, b.robust_cost);
        assert_eq!(a.outliers, b.outliers);
        assert_eq!(a.centers.rows(), b.centers.rows());
    }

    #[test]
    fn recompute_never_increases_cost() {
        let inst = generate_planted::<f64>(3, 7, 3, 12.0, 1.5, 2, 77).unwrap();
        let cfg = SolverConfig::new(3, 13);
        for res in [
            run_okmeans(&inst, 3.0, &cfg).unwrap(),
            run_okmeans2(&inst, 3.0, &cfg).unwrap(),
            run_constant_k(&inst, 2, &cfg).unwrap(),
            run_kmeanspp_baseline(&inst, &cfg).unwrap(),
        ] {
            assert!(
                res.robust_cost <= res.kept_cost,
                "{}: {} > {}",
                res.method,
                res.robust_cost,
                res.kept_cost
            );
            assert_eq!(res.outliers.len(), inst.z);
        }
    }

    #[test]
    fn constant_k_saturation_scores_farthest() {
        // K = n-1: every score is the distance to the farthest point.
        let inst = instance_1d(&[0.0, 1.0, 3.0, 7.0], 1, 1);
        let table = knn_table(&inst.data, 4).unwrap();
        let sv = score_constant_k(&table, 3).unwrap();
        let want = [7.0, 6.0, 4.0, 7.0];
        for (got, want) in sv.scores().iter().zip(want) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
        }
        // Scores tie at 7 for indices 0 and 3; the lower index is selected.
        let cfg = SolverConfig::new(1, 1);
        let res = run_constant_k(&inst, 3, &cfg).unwrap();
        assert_eq!(res.selected, vec![0]);
    }

    #[test]
    fn coreset_identity_when_m_equals_n() {
        let inst = generate_planted::<f64>(2, 10, 2, 15.0, 1.0, 2, 5).unwrap();
        let spec = CoresetSpec {
            size: inst.n(),
            seed: 3,
        };
        let (reduced, sample) = uniform_coreset_indexed(&inst, &spec).unwrap();
        assert_eq!(reduced.z, inst.z);
        assert_eq!(sample, (0..inst.n()).collect::<Vec<_>>());
        assert_eq!(reduced.data.points(), inst.data.points());
    }

    #[test]
    fn coreset_budget_scaling() {
        assert_eq!(scaled_budget(10, 50, 100), 5);
        assert_eq!(scaled_budget(1, 10, 1000), 1); // max(1, ...)
        assert_eq!(scaled_budget(0, 10, 100), 0);
    }

    #[test]
    fn coreset_mask_restriction() {
        let inst = generate_planted::<f64>(2, 20, 4, 15.0, 1.0, 2, 9).unwrap();
        let spec = CoresetSpec { size: 22, seed: 4 };
        let (reduced, sample) = uniform_coreset_indexed(&inst, &spec).unwrap();
        let full_mask = inst.data.true_outliers().unwrap();
        let red_mask = reduced.data.true_outliers().unwrap();
        for (r, &orig) in sample.iter().enumerate() {
            assert_eq!(red_mask[r], full_mask[orig]);
        }
    }

    #[test]
    fn pipeline_without_coreset_equals_direct_call() {
        let inst = generate_planted::<f64>(2, 9, 2, 20.0, 1.0, 2, 8).unwrap();
        let cfg = SolverConfig::new(2, 21);
        let method = Method::new(MethodKind::OKMeans { c: 3.0 }, cfg).unwrap();
        let via_pipeline = run_pipeline(&inst, &method, None, Objective::KMeans).unwrap();
        let direct = run_okmeans(&inst, 3.0, &cfg).unwrap();
        assert_eq!(via_pipeline.robust_cost, direct.robust_cost);
        assert_eq!(via_pipeline.outliers, direct.outliers);
    }

    #[test]
    fn pipeline_with_coreset_evaluates_on_full_data() {
        let inst = generate_planted::<f64>(2, 30, 4, 25.0, 1.0, 2, 10).unwrap();
        let cfg = SolverConfig::new(2, 3);
        let method = Method::new(MethodKind::OKMeans { c: 3.0 }, cfg).unwrap();
        let spec = CoresetSpec {
            size: inst.n() / 2,
            seed: 12,
        };
        let res = run_pipeline(&inst, &method, Some(&spec), Objective::KMeans).unwrap();
        // Final outlier set has the original budget and full-data indices.
        assert_eq!(res.outliers.len(), inst.z);
        assert!(res.outliers.iter().all(|&i| i < inst.n()));
        // Far-outlier instance: the full-data recomputation recovers the mask.
        assert_eq!(res.outliers, inst.data.true_outlier_indices().unwrap());
        assert!(res.robust_cost <= res.kept_cost);
        assert_eq!(res.selected.len(), scaled_budget(inst.z, spec.size, inst.n()));
    }

    #[test]
    fn baseline_trait_runs_builtin() {
        let inst = generate_planted::<f64>(2, 9, 2, 20.0, 1.0, 2, 14).unwrap();
        let method = Method::new(
            MethodKind::OKMeans2 { c: 3.0 },
            SolverConfig::new(2, 5),
        )
        .unwrap();
        let b: &dyn Baseline<f64> = &method;
        assert_eq!(b.name(), "okmeans2(c=3)");
        let res = b.run(&inst).unwrap();
        assert_eq!(res.outliers.len(), 2);
    }

    #[test]
    fn result_json_round_trips() {
        let inst = instance_1d(&[0.0, 1.0, 3.0, 7.0], 1, 1);
        let cfg = SolverConfig::new(1, 3);
        let res = run_okmeans2(&inst, 3.0, &cfg).unwrap();
        let text = res.to_json().to_string();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["method"], "okmeans2(c=3)");
        assert_eq!(parsed["outliers"][0], 3);
        assert_abs_diff_eq!(
            parsed["robust_cost"].as_f64().unwrap(),
            42.0 / 9.0,
            epsilon = 1e-9
        );
    }
}
