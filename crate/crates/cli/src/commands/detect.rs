use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use mxdisc::eigen::{symmetric_eigenvalues, Embedding};
use mxdisc::io::read_multiplex_file;
use mxdisc::kmeans::Partition;
use mxdisc::model_selection::{default_k_max, eigengap_k, select_dimensions, DimensionSpec};
use mxdisc::multiplex::{laplacian_sum, normalized_laplacian, MultiplexNetwork};
use mxdisc::mx_dcsc::{mx_dcsc_solve, DcscConfig};
use mxdisc::mx_dsc::{mx_dsc_solve, DscConfig};
use mxdisc::spectral::{consensus_cluster, spectral_cluster};
use mxdisc::subgraph::{affinity_degrees, split_discriminative};

use crate::config::{DetectConfig, Dimensions, Mode};

use super::{ensure_dir, write_json};

#[derive(Serialize)]
struct RunMetadata<'a> {
    version: u32,
    command: &'static str,
    mode: &'static str,
    seed: u64,
    config: &'a DetectConfig,
    dimensions: Option<DimensionSpec>,
    iterations: Option<usize>,
    converged: Option<bool>,
    degenerate: bool,
    warnings: Vec<String>,
    runtime_ms: f64,
}

/// Runs the configured method once per seed, writing one output directory
/// per seed. Returns exit code 2 when dimension selection found no
/// discriminative structure (outputs are still written).
pub fn run_detect(config: DetectConfig, out: &Path, seed_override: Option<u64>, emit_embeddings: bool) -> Result<i32> {
    let mut config = config;
    if let Some(seed) = seed_override {
        config.seeds = vec![seed];
    }
    config.validate()?;
    ensure_dir(out)?;

    let net1 = read_multiplex_file(&config.input1)
        .with_context(|| format!("reading {}", config.input1.display()))?;
    let net2 = match &config.input2 {
        Some(path) => Some(
            read_multiplex_file(path).with_context(|| format!("reading {}", path.display()))?,
        ),
        None => None,
    };

    let mut exit_code = 0;
    for &seed in &config.seeds {
        let seed_dir = out.join(format!("seed_{seed}"));
        ensure_dir(&seed_dir)?;
        let code = run_one(&config, &net1, net2.as_ref(), seed, &seed_dir, emit_embeddings)?;
        exit_code = exit_code.max(code);
    }
    Ok(exit_code)
}

fn run_one(
    config: &DetectConfig,
    net1: &MultiplexNetwork,
    net2: Option<&MultiplexNetwork>,
    seed: u64,
    dir: &Path,
    emit_embeddings: bool,
) -> Result<i32> {
    let started = Instant::now();
    let mut warnings = Vec::new();
    let mut degenerate = false;
    let mut dimensions = None;
    let mut iterations = None;
    let mut converged = None;

    match config.mode {
        Mode::MxDsc | Mode::MxDcsc => {
            let net2 = net2.expect("validated: mx modes have input2");
            let dims = resolve_dimensions(config, net1, net2, seed)?;
            dimensions = Some(dims);
            if dims.is_degenerate() {
                degenerate = true;
                warnings.push(format!(
                    "dimension selection found no discriminative structure (k1={}, k2={}); \
                     solver widths clamped to 1",
                    dims.k1, dims.k2
                ));
            }
            let k1 = dims.k1.max(1);
            let k2 = dims.k2.max(1);

            if config.mode == Mode::MxDsc {
                let solver = DscConfig {
                    alpha: config.alpha,
                    gamma: config.gamma,
                    k1,
                    k2,
                    max_iter: config.max_iter,
                    tol: config.tol,
                    seed,
                    mean_aggregate: config.mean_aggregate,
                    eigen_mode: config.eigen_mode,
                };
                let result = mx_dsc_solve(net1, net2, &solver)?;
                degenerate |= result.degenerate;
                warnings.extend(result.warnings.iter().cloned());
                iterations = Some(result.iterations);
                converged = Some(result.converged);
                write_objective_csv(&dir.join("objective.csv"), &result.objective_trace)?;
                write_discriminative_csv(&dir.join("discriminative_group1.csv"), &result.u1_bar)?;
                write_discriminative_csv(&dir.join("discriminative_group2.csv"), &result.u2_bar)?;
                if emit_embeddings {
                    write_embedding_csv(&dir.join("embedding_group1.csv"), &result.u1_bar)?;
                    write_embedding_csv(&dir.join("embedding_group2.csv"), &result.u2_bar)?;
                }
            } else {
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
                    seed,
                    mean_aggregate: config.mean_aggregate,
                    eigen_mode: config.eigen_mode,
                };
                let result = mx_dcsc_solve(net1, net2, &solver)?;
                warnings.extend(result.warnings.iter().cloned());
                iterations = Some(result.iterations);
                converged = Some(result.converged);
                write_objective_csv(&dir.join("objective.csv"), &result.objective_trace)?;
                write_discriminative_csv(&dir.join("discriminative_group1.csv"), &result.u1_bar)?;
                write_discriminative_csv(&dir.join("discriminative_group2.csv"), &result.u2_bar)?;
                write_partition_csv(
                    &dir.join("consensus_group1.csv"),
                    &result.consensus_partition_1,
                )?;
                write_partition_csv(
                    &dir.join("consensus_group2.csv"),
                    &result.consensus_partition_2,
                )?;
                if emit_embeddings {
                    write_embedding_csv(&dir.join("embedding_group1.csv"), &result.u1_bar)?;
                    write_embedding_csv(&dir.join("embedding_group2.csv"), &result.u2_bar)?;
                    write_embedding_csv(&dir.join("consensus_embedding_group1.csv"), &result.u1_star)?;
                    write_embedding_csv(&dir.join("consensus_embedding_group2.csv"), &result.u2_star)?;
                }
            }
        }
        Mode::Consensus => {
            for (idx, net) in [Some(net1), net2].iter().flatten().enumerate() {
                let k = baseline_k(config, net)?;
                let (embedding, partition) = consensus_cluster(net, k, seed)?;
                write_partition_csv(&dir.join(format!("consensus_group{}.csv", idx + 1)), &partition)?;
                if emit_embeddings {
                    write_embedding_csv(&dir.join(format!("embedding_group{}.csv", idx + 1)), &embedding)?;
                }
            }
        }
        Mode::Spectral => {
            for (idx, net) in [Some(net1), net2].iter().flatten().enumerate() {
                for (l, layer) in net.layers().iter().enumerate() {
                    let k = match config.k {
                        Some(k) => k,
                        None => {
                            let lap = normalized_laplacian(layer);
                            let spectrum = symmetric_eigenvalues(lap.values())?;
                            eigengap_k(&spectrum, config.k_max.unwrap_or(default_k_max(net.n())))?
                        }
                    };
                    let (_, partition) = spectral_cluster(layer, k, seed)?;
                    write_partition_csv(
                        &dir.join(format!("spectral_group{}_layer{l}.csv", idx + 1)),
                        &partition,
                    )?;
                }
            }
        }
    }

    let metadata = RunMetadata {
        version: 1,
        command: "detect",
        mode: config.mode.as_str(),
        seed,
        config,
        dimensions,
        iterations,
        converged,
        degenerate,
        warnings,
        runtime_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    for w in &metadata.warnings {
        eprintln!("warning (seed {seed}): {w}");
    }
    write_json(&dir.join("run.json"), &metadata)?;
    Ok(if degenerate { 2 } else { 0 })
}

fn resolve_dimensions(
    config: &DetectConfig,
    net1: &MultiplexNetwork,
    net2: &MultiplexNetwork,
    seed: u64,
) -> Result<DimensionSpec> {
    match &config.dimensions {
        Dimensions::Explicit { kt1, kt2, kc } => {
            DimensionSpec::from_totals(*kt1, *kt2, *kc).map_err(Into::into)
        }
        Dimensions::Auto(_) => {
            let k_max = config.k_max.unwrap_or(default_k_max(net1.n()));
            select_dimensions(net1, net2, k_max, config.merge_threshold, seed).map_err(Into::into)
        }
    }
}

fn baseline_k(config: &DetectConfig, net: &MultiplexNetwork) -> Result<usize> {
    match config.k {
        Some(k) => Ok(k),
        None => {
            let spectrum = symmetric_eigenvalues(laplacian_sum(net).values())?;
            let k_max = config.k_max.unwrap_or(default_k_max(net.n()));
            eigengap_k(&spectrum, k_max).map_err(Into::into)
        }
    }
}

fn write_discriminative_csv(path: &Path, embedding: &Embedding) -> Result<()> {
    let scores = affinity_degrees(embedding);
    let labeling = split_discriminative(&scores)?;
    let mut text = String::from("node,score,is_discriminative\n");
    for (node, (score, flag)) in scores.iter().zip(&labeling.is_discriminative).enumerate() {
        let _ = writeln!(text, "{node},{score:.12},{}", if *flag { 1 } else { 0 });
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn write_partition_csv(path: &Path, partition: &Partition) -> Result<()> {
    let mut text = String::from("node,community\n");
    for (node, label) in partition.labels().iter().enumerate() {
        let _ = writeln!(text, "{node},{label}");
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn write_objective_csv(path: &Path, trace: &[f64]) -> Result<()> {
    let mut text = String::from("iteration,objective\n");
    for (i, value) in trace.iter().enumerate() {
        let _ = writeln!(text, "{i},{value:.12}");
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn write_embedding_csv(path: &Path, embedding: &Embedding) -> Result<()> {
    let cols = embedding.columns();
    let mut text = String::from("node");
    for j in 0..embedding.k() {
        let _ = write!(text, ",u{j}");
    }
    text.push('\n');
    for i in 0..embedding.n() {
        let _ = write!(text, "{i}");
        for j in 0..embedding.k() {
            let _ = write!(text, ",{:.12}", cols[[i, j]]);
        }
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads back a `node,score,is_discriminative` file.
pub fn read_discriminative_csv(path: &Path) -> Result<(Vec<f64>, Vec<bool>)> {
    let text = std::fs::read_to_string(path)?;
    let mut scores = Vec::new();
    let mut flags = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            bail!("{}: malformed line {}", path.display(), idx + 1);
        }
        scores.push(fields[1].parse::<f64>()?);
        flags.push(fields[2].trim() == "1");
    }
    Ok((scores, flags))
}

/// Reads back a `node,community` file.
pub fn read_partition_csv(path: &Path, k: usize) -> Result<Partition> {
    let text = std::fs::read_to_string(path)?;
    let mut labels = Vec::new();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() == 2 {
            labels.push(fields[1].trim().parse::<usize>()?);
        }
    }
    let k = k.max(labels.iter().copied().max().map_or(1, |m| m + 1));
    Partition::new(labels, k).map_err(Into::into)
}
