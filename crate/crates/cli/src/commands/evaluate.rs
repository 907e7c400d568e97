use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;

use mxdisc::benchmark::TruthFile;
use mxdisc::metrics::{auc_roc, nmi, MetricReport};

use super::detect::{read_discriminative_csv, read_partition_csv};
use super::write_json;

#[derive(Deserialize)]
struct RunSummary {
    mode: String,
    seed: u64,
}

#[derive(Serialize)]
struct Aggregate {
    seeds: usize,
    nmi_mean: Option<f64>,
    nmi_std: Option<f64>,
    auc_mean_mean: f64,
    auc_mean_std: f64,
}

#[derive(Serialize)]
struct MetricsFile {
    version: u32,
    truth: String,
    records: Vec<MetricReport>,
    aggregate: Aggregate,
}

/// Scores every `seed_*` run directory against the planted ground truth and
/// writes `metrics.json` with one record per seed plus an aggregate row.
pub fn run_evaluate(detect_dir: &Path, truth_path: &Path, out: Option<&Path>) -> Result<i32> {
    let truth: TruthFile = serde_json::from_str(
        &std::fs::read_to_string(truth_path)
            .with_context(|| format!("reading {}", truth_path.display()))?,
    )
    .with_context(|| format!("parsing {}", truth_path.display()))?;

    let mut seed_dirs: Vec<_> = std::fs::read_dir(detect_dir)
        .with_context(|| format!("listing {}", detect_dir.display()))?
        .filter_map(|e| e.ok())
        .filter(|e| {
            e.file_name().to_string_lossy().starts_with("seed_") && e.path().is_dir()
        })
        .map(|e| e.path())
        .collect();
    if seed_dirs.is_empty() {
        bail!("no seed_* directories under {}", detect_dir.display());
    }
    seed_dirs.sort();

    let mut records = Vec::new();
    for dir in &seed_dirs {
        let run: RunSummary = serde_json::from_str(
            &std::fs::read_to_string(dir.join("run.json"))
                .with_context(|| format!("reading {}", dir.join("run.json").display()))?,
        )?;

        let (scores1, _) = read_discriminative_csv(&dir.join("discriminative_group1.csv"))?;
        let (scores2, _) = read_discriminative_csv(&dir.join("discriminative_group2.csv"))?;
        if scores1.len() != truth.n {
            bail!(
                "{}: node count {} does not match truth n={}",
                dir.display(),
                scores1.len(),
                truth.n
            );
        }
        let auc_group1 = auc_roc(&scores1, &truth.discriminative1)?;
        let auc_group2 = auc_roc(&scores2, &truth.discriminative2)?;

        let mut nmi1 = None;
        let mut nmi2 = None;
        if run.mode == "mx-dcsc" {
            let p1 = read_partition_csv(&dir.join("consensus_group1.csv"), truth.config.k_total1)?;
            let p2 = read_partition_csv(&dir.join("consensus_group2.csv"), truth.config.k_total2)?;
            nmi1 = Some(nmi(&p1, &truth.reference_partition1()?)?);
            nmi2 = Some(nmi(&p2, &truth.reference_partition2()?)?);
        }
        let nmi_mean = match (nmi1, nmi2) {
            (Some(a), Some(b)) => Some(0.5 * (a + b)),
            _ => None,
        };

        records.push(MetricReport {
            nmi: nmi_mean,
            auc_group1,
            auc_group2,
            auc_mean: 0.5 * (auc_group1 + auc_group2),
            seed: run.seed,
            metadata: json!({
                "mode": run.mode,
                "nmi_group1": nmi1,
                "nmi_group2": nmi2,
                "detect_dir": dir.display().to_string(),
                "truth_config": truth.config,
            }),
        });
    }

    let auc_values: Vec<f64> = records.iter().map(|r| r.auc_mean).collect();
    let nmi_values: Vec<f64> = records.iter().filter_map(|r| r.nmi).collect();
    let aggregate = Aggregate {
        seeds: records.len(),
        nmi_mean: mean(&nmi_values),
        nmi_std: std_dev(&nmi_values),
        auc_mean_mean: mean(&auc_values).unwrap_or(f64::NAN),
        auc_mean_std: std_dev(&auc_values).unwrap_or(f64::NAN),
    };

    let out_path = out
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| detect_dir.join("metrics.json"));
    let file = MetricsFile {
        version: 1,
        truth: truth_path.display().to_string(),
        records,
        aggregate,
    };
    write_json(&out_path, &file)?;
    println!("{}", out_path.display());
    Ok(0)
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

fn std_dev(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    if values.len() < 2 {
        return Some(0.0);
    }
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64;
    Some(var.sqrt())
}
