//! `bench` — the command-line harness.
//!
//! Subcommands: `run` (experiment from a config file), `theory` (ratio
//! table CSV), `oracle-sweep` (worst-case ratio check against the
//! brute-force oracle), `inject` (dataset preparation). Exit code 0 on
//! success; on failure a single machine-readable JSON line goes to stderr.
//! The `BENCH_WORKERS` environment variable caps the worker pool.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use okmeans::dataset::{inject_outliers, load_csv, normalize_zscore, save_csv};
use okmeans::oracle::{ratio_sweep, SweepFamily};
use okmeans::theory::{ratio_table, write_table_csv};
use okmeans_bench::{emit_report, load_config, run_experiment, ReportFormat};

#[derive(Parser)]
#[command(name = "bench", version, about = "Robust k-means benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a flat key = value config file.
    Run {
        /// Path to the config file.
        config: PathBuf,
        /// Override config entries, e.g. --set k=5 (repeatable; flags win).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Report format: csv, json, or markdown.
        #[arg(long, default_value = "csv")]
        format: String,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Dump one JSON result file per (method, seed) into this directory.
        #[arg(long)]
        dump_results: Option<PathBuf>,
    },
    /// Emit the approximation-ratio table as CSV.
    Theory {
        /// Comma-separated cluster-size constants, e.g. 2,3,4,5,10.
        #[arg(long = "c-list", value_delimiter = ',', required = true)]
        c_list: Vec<f64>,
        /// Residual tolerance for the quartic roots.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Worst-case achieved/optimal ratios over randomized planted instances
    /// with the brute-force oracle as sub-solver.
    OracleSweep {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 3.0)]
        c: f64,
        #[arg(long, default_value_t = 12345)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Prepare a dataset: load CSV, optionally normalize, inject synthetic
    /// outliers, and write the result with a trailing mask column.
    Inject {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        fraction: f64,
        #[arg(long)]
        xi: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Treat the last input column as integer class labels.
        #[arg(long)]
        has_labels: bool,
        /// Skip the first input row.
        #[arg(long)]
        skip_header: bool,
        /// Z-score normalize before injecting.
        #[arg(long)]
        normalize: bool,
    },
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("{}", serde_json::json!({ "error": msg.to_string() }));
    ExitCode::from(1)
}

fn init_workers() -> Result<(), String> {
    if let Ok(v) = std::env::var("BENCH_WORKERS") {
        let workers: usize = v
            .parse()
            .map_err(|_| format!("BENCH_WORKERS must be a positive integer, got '{v}'"))?;
        if workers == 0 {
            return Err("BENCH_WORKERS must be positive".to_string());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn write_or_print(text: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    if let Err(e) = init_workers() {
        return fail(e);
    }
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            set,
            format,
            out,
            dump_results,
        } => {
            let format: ReportFormat = match format.parse() {
                Ok(f) => f,
                Err(e) => return fail(e),
            };
            let cfg = match load_config(&config, &set) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let report = match run_experiment(&cfg) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let text = match emit_report(&report.rows, format) {
                Ok(t) => t,
                Err(e) => return fail(e),
            };
            if let Err(e) = write_or_print(&text, out.as_ref()) {
                return fail(e);
            }
            if let Some(dir) = dump_results {
                if let Err(e) = std::fs::create_dir_all(&dir) {
                    return fail(e);
                }
                for (mi, seed, result) in &report.runs {
                    let path = dir.join(format!("m{mi}_seed{seed}.json"));
                    if let Err(e) = std::fs::write(&path, result.to_json().to_string()) {
                        return fail(e);
                    }
                }
            }
            if !report.failures.is_empty() {
                eprintln!(
                    "{}",
                    serde_json::json!({
                        "error": "method failures",
                        "failures": report.failures,
                    })
                );
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Command::Theory { c_list, tol, out } => {
            let table = match ratio_table(&c_list, tol) {
                Ok(t) => t,
                Err(e) => return fail(e),
            };
            let mut buf = Vec::new();
            if let Err(e) = write_table_csv(&table, &mut buf) {
                return fail(e);
            }
            let text = String::from_utf8(buf).expect("csv is utf-8");
            if let Err(e) = write_or_print(&text, out.as_ref()) {
                return fail(e);
            }
            ExitCode::SUCCESS
        }
        Command::OracleSweep {
            trials,
            c,
            seed,
            dim,
        } => {
            let mut family = SweepFamily::desk_default(c);
            family.dim = dim;
            let started = Instant::now();
            let outcome = match ratio_sweep(&family, trials, c, seed) {
                Ok(o) => o,
                Err(e) => return fail(e),
            };
            println!(
                "trials={} rejected={} max_ratio_okmeans={:.6} max_ratio_okmeans2={:.6} \
                 recompute_violations={} elapsed_s={:.2}",
                outcome.trials,
                outcome.rejected,
                outcome.max_ratio_okmeans,
                outcome.max_ratio_okmeans2,
                outcome.recompute_violations,
                started.elapsed().as_secs_f64(),
            );
            ExitCode::SUCCESS
        }
        Command::Inject {
            input,
            out,
            fraction,
            xi,
            seed,
            has_labels,
            skip_header,
            normalize,
        } => {
            let run = || -> okmeans::Result<()> {
                let mut data = load_csv::<f64>(&input, has_labels, skip_header)?;
                if normalize {
                    data = normalize_zscore(&data)?;
                }
                let data = inject_outliers(&data, fraction, xi, seed)?;
                save_csv(&data, &out)?;
                let n_out = data
                    .true_outliers()
                    .map(|m| m.iter().filter(|&&t| t).count())
                    .unwrap_or(0);
                println!("wrote {} rows ({n_out} injected) to {}", data.n(), out.display());
                Ok(())
            };
            match run() {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(e),
            }
        }
    }
}
