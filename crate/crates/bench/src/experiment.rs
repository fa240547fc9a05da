//! Experiment execution: deterministic dataset construction, multi-seed
//! pipeline runs, and per-method aggregation.

use rayon::prelude::*;

use okmeans::dataset::{
    generate_labeled_classes, generate_planted, inject_outliers, load_csv_with,
    mark_label_outliers, normalize_zscore, CsvOptions, Dataset,
};
use okmeans::kmeans::SolverConfig;
use okmeans::rng::derive_seed;
use okmeans::robust::{run_pipeline, ClusteringResult, CoresetSpec, Method};
use okmeans::RobustInstance;

use crate::config::{DatasetSource, ExperimentConfig, ZSpec};
use crate::report::{summarize, MethodFailure, ReportRow};
use crate::BenchError;

type Result<T> = std::result::Result<T, BenchError>;

/// Stream tag separating coreset sampling from the solver streams.
const CORESET_STREAM: u64 = 0xC0DE;

/// Aggregated rows plus any per-method failures.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub failures: Vec<MethodFailure>,
    /// One result per (method index, seed), for callers that need raw runs.
    pub runs: Vec<(usize, u64, ClusteringResult<f64>)>,
}

/// Builds the dataset exactly as the config describes: source, then
/// normalization, then either label-derived outliers or injection (injected
/// points are not re-normalized).
pub fn build_dataset(config: &ExperimentConfig) -> Result<Dataset<f64>> {
    let mut data = match &config.source {
        DatasetSource::Path {
            path,
            has_labels,
            has_mask,
            skip_header,
        } => load_csv_with(
            path,
            &CsvOptions {
                has_labels: *has_labels,
                has_mask: *has_mask,
                skip_header: *skip_header,
            },
        )?,
        DatasetSource::Planted {
            gen_seed,
            dim,
            clusters,
            cluster_size,
            outliers,
            separation,
            spread,
        } => {
            generate_planted::<f64>(
                *clusters,
                *cluster_size,
                *outliers,
                *separation,
                *spread,
                *dim,
                *gen_seed,
            )?
            .data
        }
        DatasetSource::Classes {
            gen_seed,
            dim,
            class_sizes,
            separation,
            spread,
        } => generate_labeled_classes::<f64>(class_sizes, *separation, *spread, *dim, *gen_seed)?,
    };
    if config.normalize {
        data = normalize_zscore(&data)?;
    }
    if let Some(classes) = &config.outlier_classes {
        data = mark_label_outliers(&data, classes)?;
    }
    if let Some(inject) = &config.inject {
        data = inject_outliers(&data, inject.fraction, inject.xi, inject.seed)?;
    }
    Ok(data.with_name(config.name.clone()))
}

/// Resolves the outlier budget, using the mask size for `z = auto`.
pub fn resolve_z(config: &ExperimentConfig, data: &Dataset<f64>) -> Result<usize> {
    match config.z {
        ZSpec::Fixed(z) => Ok(z),
        ZSpec::Auto => data
            .true_outliers()
            .map(|m| m.iter().filter(|&&t| t).count())
            .ok_or_else(|| {
                BenchError::Config(
                    "z = auto needs a ground-truth mask (injection, outlier_classes, or a \
                     mask column)"
                        .to_string(),
                )
            }),
    }
}

fn recall_of(result: &ClusteringResult<f64>, truth: Option<&[bool]>) -> Option<f64> {
    let mask = truth?;
    let total = mask.iter().filter(|&&t| t).count();
    if total == 0 {
        return None;
    }
    let hit = result.outliers.iter().filter(|&&i| mask[i]).count();
    Some(hit as f64 / total as f64)
}

/// Runs every configured method across every seed and aggregates the rows.
/// (method, seed) pairs execute in parallel; aggregation is order-free.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let data = build_dataset(config)?;
    let z = resolve_z(config, &data)?;
    let instance = RobustInstance::new(data, config.k, z)
        .map_err(|e| BenchError::Config(e.to_string()))?;

    let mut jobs: Vec<(usize, u64)> = Vec::new();
    for (mi, _) in config.methods.iter().enumerate() {
        for &seed in &config.seeds {
            jobs.push((mi, seed));
        }
    }

    let outcomes: Vec<(usize, u64, okmeans::Result<ClusteringResult<f64>>)> = jobs
        .par_iter()
        .map(|&(mi, seed)| {
            let spec = config.methods[mi];
            let solver = SolverConfig::<f64> {
                k: config.k,
                max_iters: config.max_iters,
                rel_tol: config.rel_tol,
                restarts: config.restarts,
                seed,
            };
            let outcome = Method::new(spec.kind, solver).and_then(|method| {
                let coreset = spec.coreset.or(config.coreset_size).map(|size| CoresetSpec {
                    size,
                    seed: derive_seed(seed, CORESET_STREAM),
                });
                run_pipeline(&instance, &method, coreset.as_ref(), config.objective)
            });
            (mi, seed, outcome)
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut runs = Vec::new();
    for (mi, spec) in config.methods.iter().enumerate() {
        let method_name = spec.kind.descriptor();
        let mut per_seed: Vec<(u64, &ClusteringResult<f64>)> = Vec::new();
        let mut failure: Option<String> = None;
        for (omi, seed, outcome) in &outcomes {
            if *omi != mi {
                continue;
            }
            match outcome {
                Ok(result) => per_seed.push((*seed, result)),
                Err(e) => {
                    failure.get_or_insert_with(|| format!("seed {seed}: {e}"));
                }
            }
        }
        if let Some(reason) = failure {
            failures.push(MethodFailure {
                method: method_name,
                reason,
            });
            continue;
        }
        per_seed.sort_by_key(|(seed, _)| *seed);

        let costs: Vec<f64> = per_seed.iter().map(|(_, r)| r.robust_cost).collect();
        let (cost_best, cost_mean, cost_std) = summarize(&costs);
        let truth = instance.data.true_outliers();
        let recalls: Vec<f64> = per_seed
            .iter()
            .filter_map(|(_, r)| recall_of(r, truth))
            .collect();
        let (recall_mean, recall_std) = if recalls.len() == per_seed.len() && !recalls.is_empty() {
            let (_, mean, std) = summarize(&recalls);
            (Some(mean), Some(std))
        } else {
            (None, None)
        };
        let times: Vec<f64> = if config.timing {
            per_seed.iter().map(|(_, r)| r.elapsed).collect()
        } else {
            vec![0.0; per_seed.len()]
        };
        let (_, time_mean_s, time_std_s) = summarize(&times);

        rows.push(ReportRow {
            method: spec.kind.descriptor(),
            dataset: config.name.clone(),
            cost_best,
            cost_mean,
            cost_std,
            recall_mean,
            recall_std,
            time_mean_s,
            time_std_s,
            n_seeds: per_seed.len(),
        });
        for (seed, result) in per_seed {
            runs.push((mi, seed, result.clone()));
        }
    }

    Ok(ExperimentReport {
        rows,
        failures,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{build_config, parse_kv_text};
    use crate::report::{emit_report, ReportFormat};

    fn planted_config(extra: &str) -> ExperimentConfig {
        let text = format!(
            "\
name = unit
dataset = planted
dim = 2
clusters = 2
cluster_size = 25
planted_outliers = 3
separation = 25
spread = 1.0
gen_seed = 5
k = 2
z = auto
objective = kmeans
methods = okmeans(c=3), kmeanspp
seeds = 1,2,3
timing = false
{extra}
"
        );
        build_config(&parse_kv_text(&text).unwrap(), "unit").unwrap()
    }

    #[test]
    fn experiment_produces_rows_and_perfect_recall() {
        let report = run_experiment(&planted_config("")).unwrap();
        assert!(report.failures.is_empty());
        assert_eq!(report.rows.len(), 2);
        let ok_row = &report.rows[0];
        assert_eq!(ok_row.method, "okmeans(c=3)");
        assert_eq!(ok_row.n_seeds, 3);
        assert_eq!(ok_row.recall_mean, Some(1.0));
        assert!(ok_row.cost_best <= ok_row.cost_mean);
        assert_eq!(ok_row.time_mean_s, 0.0); // timing disabled
    }

    #[test]
    fn experiment_is_byte_deterministic_without_timing() {
        let cfg = planted_config("");
        let a = emit_report(&run_experiment(&cfg).unwrap().rows, ReportFormat::Csv).unwrap();
        let b = emit_report(&run_experiment(&cfg).unwrap().rows, ReportFormat::Csv).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn contract_violation_becomes_method_failure() {
        // z = auto gives 3 planted outliers; constant_k with K = n is
        // structurally impossible (needs rank n+1) and must fail cleanly.
        let cfg = planted_config("methods = constant_k(K=53), okmeans(c=3)");
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.failures.len(), 1);
        assert!(report.failures[0].method.starts_with("constant_k"));
        assert_eq!(report.rows.len(), 1); // okmeans row still present
    }

    #[test]
    fn single_seed_has_zero_std() {
        let cfg = planted_config("seeds = 7");
        let report = run_experiment(&cfg).unwrap();
        for row in &report.rows {
            assert_eq!(row.cost_std, 0.0);
            assert_eq!(row.recall_std, Some(0.0));
        }
    }

    #[test]
    fn global_coreset_applies() {
        let cfg = planted_config("coreset_size = 30");
        let report = run_experiment(&cfg).unwrap();
        assert!(report.failures.is_empty());
        // Far-outlier family at half-size coreset still recovers the mask.
        assert_eq!(report.rows[0].recall_mean, Some(1.0));
    }

    #[test]
    fn timing_enabled_reports_positive_times() {
        let mut cfg = planted_config("");
        cfg.timing = true;
        let report = run_experiment(&cfg).unwrap();
        for row in &report.rows {
            assert!(row.time_mean_s > 0.0, "{}", row.method);
        }
    }

    #[test]
    fn recall_absent_without_mask() {
        let cfg = planted_config("planted_outliers = 0\nz = 0");
        let report = run_experiment(&cfg).unwrap();
        for row in &report.rows {
            assert_eq!(row.recall_mean, None);
        }
    }
}
