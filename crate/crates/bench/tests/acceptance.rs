//! Acceptance suite: every criterion below runs at its stated tolerance and
//! prints one pass/fail line (run with `--nocapture` to see them).
//!
//! 1. theory table reproduction        5. recall at desk scale
//! 2. exact quartic root checks        6. recompute never increases cost
//! 3. ratio property suite             7. invariant suite
//! 4. oracle equivalence               8. explicit non-goals
//!
//! Shared numeric tolerances are pinned as constants next to each criterion.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use ndarray::Array2;

use okmeans::dataset::{evaluate_cost, generate_planted, CenterSet, Dataset, Objective};
use okmeans::kmeans::{solve_kmeans, SolverConfig};
use okmeans::knn::{knn_table, pairwise_sq_dists_block};
use okmeans::oracle::{brute_force_robust, ratio_sweep, SweepFamily};
use okmeans::robust::{
    run_okmeans, run_okmeans2, run_pipeline, scaled_budget, CoresetSpec, Method, MethodKind,
};
use okmeans::rng::seeded;
use okmeans::scoring::{score_midrange_sum, score_vanilla, select_outliers};
use okmeans::theory::{phi_quartic_residual, solve_phi, solve_psi};
use okmeans::RobustInstance;
use okmeans_bench::{emit_report, load_config, run_experiment, ReportFormat};
use rand::Rng;

fn bench_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bench"))
}

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn pass(n: usize, what: &str) {
    println!("acceptance criterion {n} ({what}): PASS");
}

/// Criterion 1: `bench theory` for c in {2,3,4,5,10} reproduces the
/// published ratio columns within absolute 0.01, in under a second.
#[test]
fn criterion_1_theory_table_reproduction() {
    const TOL: f64 = 0.01;
    let started = Instant::now();
    let output = bench_bin()
        .args(["theory", "--c-list", "2,3,4,5,10"])
        .output()
        .expect("bench theory runs");
    let elapsed = started.elapsed().as_secs_f64();
    assert!(output.status.success(), "theory subcommand failed");
    assert!(elapsed < 1.0, "theory took {elapsed:.3}s, budget is 1s");

    let text = String::from_utf8(output.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "c,phi,psi,zeta,root_phi,root_psi",
        "header mismatch"
    );
    let expected_phi = [14.30, 9.0, 7.04, 5.98, 3.99];
    // The published reference table prints 2.96 for the mid-range rule at
    // c=10, but the ratio definition itself — checked by polynomial root
    // enumeration, by direct minimax over the case bounds, and through the
    // psi(c) = phi(2c-1) identity — evaluates to 2.995713. The verified
    // value is asserted here; the discrepancy is reported below.
    let expected_psi = [9.0, 5.98, 4.84, 4.21, 2.995713];
    let expected_zeta = [3.0, 2.15, 1.85, 1.70, 1.41];
    for (i, line) in lines.enumerate() {
        let cells: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!(
            (cells[1] - expected_phi[i]).abs() <= TOL,
            "phi at row {i}: {} vs {}",
            cells[1],
            expected_phi[i]
        );
        assert!(
            (cells[2] - expected_psi[i]).abs() <= TOL,
            "psi at row {i}: {} vs {}",
            cells[2],
            expected_psi[i]
        );
        assert!(
            (cells[3] - expected_zeta[i]).abs() <= TOL,
            "zeta at row {i}: {} vs {}",
            cells[3],
            expected_zeta[i]
        );
        assert!(cells[4] > 1.0 && cells[5] > 1.0, "roots must exceed 1");
    }
    println!(
        "  NOTE: the published reference table prints 2.96 for the mid-range rule at \
         c=10; the ratio definition itself yields 2.995713 (verified three independent \
         ways), so that one cell is compared against the computed value instead"
    );
    pass(1, "theory table reproduction");
}

/// Criterion 2: the radius-rule quartic at c=3 has root exactly 3/2
/// (residual <= 1e-10), the ratio is 9 +- 1e-9, and the two ratio functions
/// coincide under c -> 2c-1 within 1e-6.
#[test]
fn criterion_2_exact_root_checks() {
    let residual = phi_quartic_residual(3.0f64, 1.5);
    assert!(residual <= 1e-10, "residual at x=1.5 is {residual:.3e}");
    let (phi, root) = solve_phi(3.0f64, 1e-12).unwrap();
    assert!((phi - 9.0).abs() <= 1e-9, "phi(3) = {phi}");
    assert!((root - 1.5).abs() <= 1e-9, "root = {root}");
    for c in [2.0f64, 3.0, 5.5] {
        let (psi, _) = solve_psi(c, 1e-12).unwrap();
        let (phi_remap, _) = solve_phi(2.0 * c - 1.0, 1e-12).unwrap();
        assert!(
            (psi - phi_remap).abs() <= 1e-6,
            "identity broken at c={c}: {psi} vs {phi_remap}"
        );
    }
    pass(2, "exact root checks");
}

/// Criterion 3: 200 randomized planted instances (n <= 12, every optimal
/// cluster >= 3z, brute-force oracle as sub-solver) stay within the proven
/// worst-case ratios, in under five minutes.
#[test]
fn criterion_3_ratio_property_suite() {
    let started = Instant::now();
    let family = SweepFamily::desk_default(3.0);
    for shape in &family.shapes {
        assert!(shape.k * shape.cluster_size + shape.z <= 12);
        assert!(shape.cluster_size >= 3 * shape.z);
    }
    let outcome = ratio_sweep(&family, 200, 3.0f64, 12345).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        outcome.max_ratio_okmeans <= 9.0,
        "radius-rule worst ratio {} exceeds 9",
        outcome.max_ratio_okmeans
    );
    assert!(
        outcome.max_ratio_okmeans2 <= 5.98 + 1e-9,
        "mid-range-rule worst ratio {} exceeds 5.98",
        outcome.max_ratio_okmeans2
    );
    assert!(outcome.max_ratio_okmeans >= 1.0 - 1e-9);
    assert_eq!(outcome.recompute_violations, 0);
    assert!(elapsed < 300.0, "sweep took {elapsed:.1}s, budget is 300s");
    println!(
        "  worst ratios: radius {:.4}, mid-range {:.4} over {} trials ({} rejected)",
        outcome.max_ratio_okmeans,
        outcome.max_ratio_okmeans2,
        outcome.trials,
        outcome.rejected
    );
    pass(3, "ratio property suite");
}

/// Criterion 4: the k-means solver (restarts >= 5) matches the brute-force
/// optimum with z=0 on 50 random instances (n <= 10, k <= 3) within 1e-6
/// relative cost.
#[test]
fn criterion_4_oracle_equivalence() {
    const REL_TOL: f64 = 1e-6;
    let mut rng = seeded(424242);
    for trial in 0..50u64 {
        let n = 6 + (rng.random::<f64>() * 5.0) as usize; // 6..=10
        let k = 1 + (rng.random::<f64>() * 3.0) as usize; // 1..=3
        let rows: Vec<f64> = (0..n * 2).map(|_| -10.0 + 20.0 * rng.random::<f64>()).collect();
        let data = Dataset::new(Array2::from_shape_vec((n, 2), rows).unwrap()).unwrap();
        let instance = RobustInstance::new(data, k, 0).unwrap();
        let opt = brute_force_robust(&instance, Objective::KMeans).unwrap();
        // Uniform random points are adversarial for Lloyd (no cluster
        // structure, near-tied local minima), so the restart count sits well
        // above the required floor of 5.
        let cfg = SolverConfig::new(k, 1000 + trial).with_restarts(64);
        assert!(cfg.restarts >= 5);
        let (_, cost) = solve_kmeans(&instance.data, None, &cfg).unwrap();
        let rel = (cost - opt.opt_cost).abs() / opt.opt_cost.max(1e-12);
        assert!(
            rel <= REL_TOL,
            "trial {trial} (n={n}, k={k}): solver {cost} vs oracle {} (rel {rel:.2e})",
            opt.opt_cost
        );
    }
    pass(4, "oracle equivalence");
}

/// Criterion 5: on the SHUTTLE-like recipe both removal rules agree — recall
/// within +-0.05 of each other and identical score-selected sets — and the
/// synthetic far-outlier family reaches recall 1.0 on every trial.
#[test]
fn criterion_5_recall_at_desk_scale() {
    let config = load_config(
        config_path("shuttle_like.cfg"),
        &["seeds=1,2,3".to_string(), "timing=false".to_string()],
    )
    .unwrap();
    let report = run_experiment(&config).unwrap();
    assert!(report.failures.is_empty(), "{:?}", report.failures);
    let recall_of = |method: &str| -> f64 {
        report
            .rows
            .iter()
            .find(|r| r.method.starts_with(method))
            .unwrap_or_else(|| panic!("row for {method}"))
            .recall_mean
            .expect("mask present")
    };
    let (ra, rb) = (recall_of("okmeans(c"), recall_of("okmeans2(c"));
    assert!(
        (ra - rb).abs() <= 0.05,
        "recall gap too large: {ra} vs {rb}"
    );

    // Identical score-selected sets on the same dataset.
    let data = okmeans_bench::build_dataset(&config).unwrap();
    let z = data
        .true_outliers()
        .unwrap()
        .iter()
        .filter(|&&t| t)
        .count();
    let instance = RobustInstance::new(data, config.k, z).unwrap();
    let cfg = SolverConfig::new(config.k, 1);
    let a = run_okmeans(&instance, 3.0, &cfg).unwrap();
    let b = run_okmeans2(&instance, 3.0, &cfg).unwrap();
    assert_eq!(
        a.selected, b.selected,
        "score-selected sets differ between the two rules"
    );

    // Far-outlier family: every trial recovers the mask exactly.
    for seed in 0..10u64 {
        let inst = generate_planted::<f64>(3, 12, 3, 25.0, 1.0, 3, 900 + seed).unwrap();
        let truth = inst.data.true_outlier_indices().unwrap();
        let cfg = SolverConfig::new(3, seed);
        for res in [
            run_okmeans(&inst, 3.0, &cfg).unwrap(),
            run_okmeans2(&inst, 3.0, &cfg).unwrap(),
        ] {
            assert_eq!(res.outliers, truth, "seed {seed}, {}", res.method);
        }
    }
    pass(5, "recall at desk scale");
}

/// Criterion 6: for every pipeline run exercised here, the recomputed
/// robust cost never exceeds the cost on the scrubbed point set.
#[test]
fn criterion_6_recompute_never_increases_cost() {
    // Mixed battery: planted instances, all four methods, with and without
    // a coreset.
    let mut checked = 0usize;
    for seed in 0..6u64 {
        let inst = generate_planted::<f64>(2, 20, 4, 15.0, 1.3, 3, 300 + seed).unwrap();
        let solver = SolverConfig::new(2, seed);
        let methods = [
            MethodKind::OKMeans { c: 3.0 },
            MethodKind::OKMeans2 { c: 3.0 },
            MethodKind::ConstantK { k: 4 },
            MethodKind::KMeansPP,
        ];
        for kind in methods {
            let method = Method::new(kind, solver).unwrap();
            for coreset in [
                None,
                Some(CoresetSpec {
                    size: inst.n() / 2,
                    seed: 77 + seed,
                }),
            ] {
                let res =
                    run_pipeline(&inst, &method, coreset.as_ref(), Objective::KMeans).unwrap();
                assert!(
                    res.robust_cost <= res.kept_cost,
                    "{}: f_z = {} > kept = {}",
                    res.method,
                    res.robust_cost,
                    res.kept_cost
                );
                checked += 1;
            }
        }
    }
    // The oracle-subsolver path checks the same inequality internally.
    let outcome = ratio_sweep(&SweepFamily::desk_default(3.0), 60, 3.0f64, 5150).unwrap();
    assert_eq!(outcome.recompute_violations, 0);
    println!("  checked {checked} pipeline runs plus 120 sweep runs");
    pass(6, "recompute never increases cost");
}

/// Criterion 7: invariant suite at the stated sizes and tolerances.
#[test]
fn criterion_7_invariant_suite() {
    // KNN against a full-sort oracle at n = 200.
    let mut rng = seeded(88);
    let rows: Vec<f64> = (0..200 * 3).map(|_| -40.0 + 80.0 * rng.random::<f64>()).collect();
    let data = Dataset::new(Array2::from_shape_vec((200, 3), rows).unwrap()).unwrap();
    let k = 20;
    let table = knn_table(&data, k).unwrap();
    for i in 0..200 {
        let mut dists: Vec<f64> = (0..200)
            .map(|j| {
                data.point(i)
                    .iter()
                    .zip(data.point(j).iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for r in 1..=k {
            let (got, want) = (table.dist(i, r), dists[r - 1]);
            assert!(
                (got - want).abs() <= 1e-9 * (1.0 + want),
                "knn row {i} rank {r}: {got} vs {want}"
            );
        }
    }

    // Blocked distances against the naive double loop, 1e-9 relative.
    let a_rows: Vec<f64> = (0..7 * 4).map(|_| -5.0 + 10.0 * rng.random::<f64>()).collect();
    let b_rows: Vec<f64> = (0..9 * 4).map(|_| -5.0 + 10.0 * rng.random::<f64>()).collect();
    let a = Array2::from_shape_vec((7, 4), a_rows).unwrap();
    let b = Array2::from_shape_vec((9, 4), b_rows).unwrap();
    let blocked = pairwise_sq_dists_block(a.view(), b.view()).unwrap();
    for i in 0..7 {
        for j in 0..9 {
            let naive: f64 = (0..4).map(|t| (a[[i, t]] - b[[j, t]]).powi(2)).sum();
            assert!(
                (blocked[[i, j]] - naive).abs() <= 1e-9 * (1.0 + naive),
                "blocked ({i},{j})"
            );
        }
    }

    // Score isometry invariance at 1e-7 (2-d rotation + translation).
    let n = 80;
    let base: Vec<Vec<f64>> = (0..n)
        .map(|_| vec![-15.0 + 30.0 * rng.random::<f64>(), -15.0 + 30.0 * rng.random::<f64>()])
        .collect();
    let (sin, cos) = (0.6f64, 0.8f64); // exact unit vector
    let moved: Vec<Vec<f64>> = base
        .iter()
        .map(|p| {
            vec![
                cos * p[0] - sin * p[1] + 4.0,
                sin * p[0] + cos * p[1] - 9.0,
            ]
        })
        .collect();
    let flat = |rows: &[Vec<f64>]| {
        Dataset::new(
            Array2::from_shape_vec((n, 2), rows.iter().flatten().copied().collect()).unwrap(),
        )
        .unwrap()
    };
    let (da, db) = (flat(&base), flat(&moved));
    let z = 5;
    let rank = okmeans::scoring::midrange_max_rank(3.0, z);
    let (ta, tb) = (knn_table(&da, rank).unwrap(), knn_table(&db, rank).unwrap());
    for midrange in [false, true] {
        let (sa, sb) = if midrange {
            (
                score_midrange_sum(&ta, z, 3.0).unwrap(),
                score_midrange_sum(&tb, z, 3.0).unwrap(),
            )
        } else {
            (
                score_vanilla(&ta, z, 3.0).unwrap(),
                score_vanilla(&tb, z, 3.0).unwrap(),
            )
        };
        for (x, y) in sa.scores().iter().zip(sb.scores()) {
            assert!((x - y).abs() <= 1e-7 * (1.0 + x.abs()), "isometry: {x} vs {y}");
        }
        assert_eq!(
            select_outliers(&sa, z).unwrap(),
            select_outliers(&sb, z).unwrap()
        );
    }

    // Coreset budget scaling.
    assert_eq!(scaled_budget(10, 50, 100), 5);
    assert_eq!(scaled_budget(1, 10, 1000), 1);
    assert_eq!(scaled_budget(0, 77, 100), 0);
    assert_eq!(scaled_budget(17, 10_000, 43_500), 4);

    // End-to-end determinism: identical config + seeds => identical bytes.
    let config = load_config(
        config_path("planted_demo.cfg"),
        &["timing=false".to_string(), "seeds=1,2".to_string()],
    )
    .unwrap();
    let first = emit_report(&run_experiment(&config).unwrap().rows, ReportFormat::Csv).unwrap();
    let second = emit_report(&run_experiment(&config).unwrap().rows, ReportFormat::Csv).unwrap();
    assert_eq!(first, second, "repeated runs must be byte-identical");
    pass(7, "invariant suite");
}

/// Criterion 8: full-scale multi-million-point benchmark numbers and
/// third-party robust-clustering baselines are explicitly not reproduced
/// here (externals plug in through the `Baseline` trait instead); what is
/// checked is the outlier-unaware baseline's qualitative behavior — higher
/// cost variance than the removal methods on contaminated data — on the
/// planted family.
#[test]
fn criterion_8_explicit_non_goals() {
    let inst = generate_planted::<f64>(3, 60, 6, 25.0, 1.0, 2, 7).unwrap();
    let mut ok_costs = Vec::new();
    let mut pp_costs = Vec::new();
    for seed in 0..10u64 {
        let cfg = SolverConfig::new(3, seed);
        ok_costs.push(run_okmeans(&inst, 3.0, &cfg).unwrap().robust_cost);
        pp_costs.push(
            okmeans::robust::run_kmeanspp_baseline(&inst, &cfg)
                .unwrap()
                .robust_cost,
        );
    }
    let std = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
    };
    let (ok_std, pp_std) = (std(&ok_costs), std(&pp_costs));
    assert!(
        pp_std > 10.0 * ok_std && pp_std > 1.0,
        "expected the outlier-unaware baseline to be clearly less stable: {pp_std} vs {ok_std}"
    );
    // Removal also wins on the cost itself here.
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(mean(&ok_costs) < mean(&pp_costs));
    println!(
        "  cost std: removal {ok_std:.3e} vs outlier-unaware baseline {pp_std:.3e}; \
         full-scale multi-million-point datasets and external baselines are out of scope by design"
    );
    pass(8, "explicit non-goals");
}

/// The shipped recipes must at least parse and validate.
#[test]
fn shipped_configs_parse() {
    for name in [
        "planted_demo.cfg",
        "shuttle_like.cfg",
        "skin_like.cfg",
        "susy_like.cfg",
    ] {
        let config = load_config(config_path(name), &[]).unwrap();
        assert!(!config.methods.is_empty(), "{name}");
    }
}

/// Robust-cost helpers agree between the evaluation entry points.
#[test]
fn evaluate_cost_matches_pipeline_fields() {
    let inst = generate_planted::<f64>(2, 10, 2, 18.0, 1.0, 2, 77).unwrap();
    let cfg = SolverConfig::new(2, 5);
    let res = run_okmeans2(&inst, 3.0, &cfg).unwrap();
    let (cost, outliers) =
        evaluate_cost(&inst.data, &res.centers, inst.z, Objective::KMeans).unwrap();
    assert_eq!(cost, res.robust_cost);
    assert_eq!(outliers, res.outliers);
    let manual = CenterSet::from_rows(&res.centers.to_f64_rows()).unwrap();
    assert_eq!(manual.k(), inst.k);
}
