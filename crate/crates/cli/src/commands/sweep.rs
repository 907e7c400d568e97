use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::Result;

use mxdisc::benchmark::{generate_instance, BenchmarkConfig, BenchmarkInstance};
use mxdisc::metrics::{auc_roc, nmi};
use mxdisc::model_selection::{default_k_max, select_dimensions, DimensionSpec};
use mxdisc::mx_dcsc::{mx_dcsc_solve, DcscConfig};
use mxdisc::mx_dsc::{mx_dsc_solve, DscConfig};
use mxdisc::subgraph::affinity_degrees;

use crate::config::{Mode, SweepConfig, SweepDimensions, SweepDimensionsTag, SweepParameter};

use super::{ensure_dir, write_json};

struct Task {
    value: f64,
    seed: u64,
    method: Mode,
}

struct RowResult {
    auc_mean: Option<f64>,
    nmi: Option<f64>,
    runtime_ms: f64,
    error: Option<String>,
}

/// Runs the parameter grid, writing `results.csv` (deterministic),
/// `timings.csv` (wall times) and `sweep_manifest.json`.
pub fn run_sweep(config: SweepConfig, out: &Path, jobs: usize) -> Result<i32> {
    config.validate()?;
    ensure_dir(out)?;

    let mut tasks = Vec::new();
    for &value in &config.values {
        for &seed in &config.seeds {
            for &method in &config.methods {
                tasks.push(Task { value, seed, method });
            }
        }
    }

    let results: Vec<Option<RowResult>> = run_tasks(&config, &tasks, jobs);

    // Data rows in (value, seed, method) order, then per-(value, method)
    // aggregate rows over the successful seeds.
    let mut results_csv = String::from("experiment,parameter,seed,method,auc_mean,nmi,error\n");
    let mut timings_csv = String::from("experiment,parameter,seed,method,runtime_ms\n");
    for (task, row) in tasks.iter().zip(&results) {
        let row = row.as_ref().expect("all tasks executed");
        let _ = writeln!(
            results_csv,
            "{},{},{},{},{},{},{}",
            config.experiment,
            task.value,
            task.seed,
            task.method.as_str(),
            fmt_opt(row.auc_mean),
            fmt_opt(row.nmi),
            row.error.as_deref().unwrap_or(""),
        );
        let _ = writeln!(
            timings_csv,
            "{},{},{},{},{:.3}",
            config.experiment,
            task.value,
            task.seed,
            task.method.as_str(),
            row.runtime_ms,
        );
    }
    for &value in &config.values {
        for &method in &config.methods {
            let rows: Vec<&RowResult> = tasks
                .iter()
                .zip(&results)
                .filter(|(t, _)| t.value == value && t.method == method)
                .filter_map(|(_, r)| r.as_ref())
                .filter(|r| r.error.is_none())
                .collect();
            let auc = mean(rows.iter().filter_map(|r| r.auc_mean));
            let nmi_agg = mean(rows.iter().filter_map(|r| r.nmi));
            let error = if rows.is_empty() {
                "all seeds failed"
            } else {
                ""
            };
            let _ = writeln!(
                results_csv,
                "{},{},mean,{},{},{},{error}",
                config.experiment,
                value,
                method.as_str(),
                fmt_opt(auc),
                fmt_opt(nmi_agg),
            );
        }
    }

    std::fs::write(out.join("results.csv"), results_csv)?;
    std::fs::write(out.join("timings.csv"), timings_csv)?;
    write_json(&out.join("sweep_manifest.json"), &config)?;
    println!("{}", out.join("results.csv").display());
    Ok(0)
}

fn run_tasks(config: &SweepConfig, tasks: &[Task], jobs: usize) -> Vec<Option<RowResult>> {
    let jobs = jobs.max(1).min(tasks.len().max(1));
    let results: Mutex<Vec<Option<RowResult>>> = Mutex::new((0..tasks.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= tasks.len() {
                    break;
                }
                let row = run_task(config, &tasks[idx]);
                results.lock().unwrap()[idx] = Some(row);
            });
        }
    });
    results.into_inner().unwrap()
}

fn run_task(config: &SweepConfig, task: &Task) -> RowResult {
    let started = Instant::now();
    let outcome = task_metrics(config, task);
    let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok((auc, nmi_value)) => RowResult {
            auc_mean: auc,
            nmi: nmi_value,
            runtime_ms,
            error: None,
        },
        Err(err) => RowResult {
            auc_mean: None,
            nmi: None,
            runtime_ms,
            error: Some(err.to_string().replace([',', '\n'], ";")),
        },
    }
}

fn task_metrics(config: &SweepConfig, task: &Task) -> Result<(Option<f64>, Option<f64>)> {
    let mut bench = config.base.clone();
    bench.seed = task.seed;
    match config.vary {
        SweepParameter::Mu => bench.mu = task.value,
        SweepParameter::P1 => bench.p1 = task.value,
        SweepParameter::KShared => bench.k_shared = task.value as usize,
    }
    let instance = generate_instance(&bench)?;
    let dims = resolve_dims(config, &bench, &instance, task.seed)?;
    let k1 = dims.k1.max(1);
    let k2 = dims.k2.max(1);

    match task.method {
        Mode::MxDsc => {
            let solver = DscConfig {
                alpha: config.alpha,
                gamma: config.gamma,
                k1,
                k2,
                max_iter: config.max_iter,
                tol: config.tol,
                seed: task.seed,
                mean_aggregate: config.mean_aggregate,
                eigen_mode: config.eigen_mode,
            };
            let result = mx_dsc_solve(&instance.net1, &instance.net2, &solver)?;
            let auc = auc_pair(&instance, &affinity_degrees(&result.u1_bar), &affinity_degrees(&result.u2_bar))?;
            Ok((Some(auc), None))
        }
        Mode::MxDcsc => {
            let solver = DcscConfig {
                alpha: config.alpha,
                beta: config.beta,
                gamma: config.gamma,
                k1,
                k2,
                kt1: dims.kt1,
                kt2: dims.kt2,
                max_iter: config.max_iter,
                tol: config.tol,
                seed: task.seed,
                mean_aggregate: config.mean_aggregate,
                eigen_mode: config.eigen_mode,
            };
            let result = mx_dcsc_solve(&instance.net1, &instance.net2, &solver)?;
            let auc = auc_pair(&instance, &affinity_degrees(&result.u1_bar), &affinity_degrees(&result.u2_bar))?;
            let n1 = nmi(&result.consensus_partition_1, &instance.reference1)?;
            let n2 = nmi(&result.consensus_partition_2, &instance.reference2)?;
            Ok((Some(auc), Some(0.5 * (n1 + n2))))
        }
        Mode::Consensus => {
            // Baseline: consensus clustering only, no subgraph detection,
            // so the AUC column stays empty.
            let (_, p1) = mxdisc::spectral::consensus_cluster(&instance.net1, dims.kt1, task.seed)?;
            let (_, p2) = mxdisc::spectral::consensus_cluster(&instance.net2, dims.kt2, task.seed)?;
            let n1 = nmi(&p1, &instance.reference1)?;
            let n2 = nmi(&p2, &instance.reference2)?;
            Ok((None, Some(0.5 * (n1 + n2))))
        }
        Mode::Spectral => anyhow::bail!("spectral is not a sweep method"),
    }
}

fn resolve_dims(
    config: &SweepConfig,
    bench: &BenchmarkConfig,
    instance: &BenchmarkInstance,
    seed: u64,
) -> Result<DimensionSpec> {
    match &config.dimensions {
        SweepDimensions::Explicit { kt1, kt2, kc } => {
            DimensionSpec::from_totals(*kt1, *kt2, *kc).map_err(Into::into)
        }
        SweepDimensions::Tag(SweepDimensionsTag::True) => {
            DimensionSpec::from_totals(bench.k_total1, bench.k_total2, bench.k_shared)
                .map_err(Into::into)
        }
        SweepDimensions::Tag(SweepDimensionsTag::Auto) => select_dimensions(
            &instance.net1,
            &instance.net2,
            default_k_max(bench.n),
            mxdisc::model_selection::DEFAULT_MERGE_THRESHOLD,
            seed,
        )
        .map_err(Into::into),
    }
}

fn auc_pair(instance: &BenchmarkInstance, scores1: &[f64], scores2: &[f64]) -> Result<f64> {
    let a1 = auc_roc(scores1, &instance.discriminative_nodes1)?;
    let a2 = auc_roc(scores2, &instance.discriminative_nodes2)?;
    Ok(0.5 * (a1 + a2))
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.6}"),
        None => String::new(),
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let collected: Vec<f64> = values.collect();
    if collected.is_empty() {
        None
    } else {
        Some(collected.iter().sum::<f64>() / collected.len() as f64)
    }
}
