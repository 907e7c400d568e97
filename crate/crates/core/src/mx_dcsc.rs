//! Multiplex Discriminative and Consensus Spectral Clustering (MX-DCSC).
//!
//! Extends MX-DSC by learning, per group, the individual layerwise subspaces
//! and a consensus subspace alongside the discriminative pair. Six blocks are
//! updated in turn each sweep; every update is the exact minimizer of the
//! joint objective with the other blocks held fixed, so the objective is
//! non-increasing:
//!
//! 1. `Ū₁  ← eigvecs_k₁(ΣL¹ + α Σₘ U₂ₘU₂ₘᵀ - γ Ū₂Ū₂ᵀ)`
//! 2. `Ū₂  ← eigvecs_k₂(ΣL² + α Σₗ U₁ₗU₁ₗᵀ - γ Ū₁Ū₁ᵀ)`
//! 3. `U₁ₗ ← eigvecs_kt₁(L¹ₗ + α Ū₂Ū₂ᵀ - β U₁*U₁*ᵀ)` for each layer l
//! 4. `U₂ₘ ← eigvecs_kt₂(L²ₘ + α Ū₁Ū₁ᵀ - β U₂*U₂*ᵀ)` for each layer m
//! 5. `U₁* ← eigvecs_kt₁(ΣL¹ - β Σₗ U₁ₗU₁ₗᵀ)`
//! 6. `U₂* ← eigvecs_kt₂(ΣL² - β Σₘ U₂ₘU₂ₘᵀ)`
//!
//! Fresh values from earlier steps of the same sweep feed the later steps.
//! Consensus partitions come from k-means on the rows of `U₁*` and `U₂*`.

use std::time::Instant;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eigen::Embedding;
use crate::error::{MxError, Result};
use crate::kmeans::{kmeans, Partition};
use crate::lowrank::{block_smallest, EigenMode, LowRankOp};
use crate::multiplex::{laplacian_mean, laplacian_sum, normalized_laplacian, MultiplexNetwork};

/// Hyperparameters and convergence controls for [`mx_dcsc_solve`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DcscConfig {
    /// Cross-group discrimination weight.
    pub alpha: f64,
    /// Layerwise-to-consensus coupling weight.
    pub beta: f64,
    /// Subspace-dissimilarity weight between the discriminative pair.
    pub gamma: f64,
    /// Discriminative widths.
    pub k1: usize,
    pub k2: usize,
    /// Total (layerwise and consensus) widths.
    pub kt1: usize,
    pub kt2: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    pub mean_aggregate: bool,
    pub eigen_mode: EigenMode,
}

impl Default for DcscConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            beta: 0.5,
            gamma: 0.5,
            k1: 2,
            k2: 2,
            kt1: 4,
            kt2: 4,
            max_iter: 100,
            tol: 1e-6,
            seed: 0,
            mean_aggregate: false,
            eigen_mode: EigenMode::Auto,
        }
    }
}

impl DcscConfig {
    fn validate(&self, n: usize) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !v.is_finite() || v < 0.0 {
                return Err(MxError::Config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(MxError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(MxError::Config("max_iter must be positive".into()));
        }
        for (name, k) in [
            ("k1", self.k1),
            ("k2", self.k2),
            ("kt1", self.kt1),
            ("kt2", self.kt2),
        ] {
            if k == 0 || k >= n {
                return Err(MxError::Dimension(format!(
                    "{name}={k} must satisfy 1 <= {name} < n={n}"
                )));
            }
        }
        Ok(())
    }
}

/// Output of [`mx_dcsc_solve`].
#[derive(Debug, Clone)]
pub struct DcscResult {
    pub u1_bar: Embedding,
    pub u2_bar: Embedding,
    pub u1_layers: Vec<Embedding>,
    pub u2_layers: Vec<Embedding>,
    pub u1_star: Embedding,
    pub u2_star: Embedding,
    pub consensus_partition_1: Partition,
    pub consensus_partition_2: Partition,
    /// Joint objective after each full sweep.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
    pub iteration_times_ms: Vec<f64>,
}

struct GroupData {
    /// Per-layer normalized Laplacians.
    layer_laps: Vec<Array2<f64>>,
    /// Aggregated Laplacian used by the discriminative and consensus blocks.
    lap_sum: Array2<f64>,
}

impl GroupData {
    fn build(net: &MultiplexNetwork, mean_aggregate: bool) -> Self {
        let layer_laps: Vec<Array2<f64>> = net
            .layers()
            .iter()
            .map(|layer| normalized_laplacian(layer).into_values())
            .collect();
        let lap_sum = if mean_aggregate {
            laplacian_mean(net).into_values()
        } else {
            laplacian_sum(net).into_values()
        };
        Self { layer_laps, lap_sum }
    }
}

/// Six-block alternating minimization for the MX-DCSC objective.
pub fn mx_dcsc_solve(
    net1: &MultiplexNetwork,
    net2: &MultiplexNetwork,
    cfg: &DcscConfig,
) -> Result<DcscResult> {
    let n = net1.n();
    if net2.n() != n {
        return Err(MxError::Dimension(format!(
            "node counts differ: {} vs {}",
            n,
            net2.n()
        )));
    }
    cfg.validate(n)?;

    let mut warnings = Vec::new();
    if cfg.k1 + cfg.k2 >= n {
        warnings.push(format!(
            "k1 + k2 = {} >= n = {n}: subspaces cannot be fully dissimilar",
            cfg.k1 + cfg.k2
        ));
    }

    let g1 = GroupData::build(net1, cfg.mean_aggregate);
    let g2 = GroupData::build(net2, cfg.mean_aggregate);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mode = cfg.eigen_mode;

    // Initialization: every block starts at its decoupled optimum.
    let mut u1_layers: Vec<Array2<f64>> = Vec::with_capacity(g1.layer_laps.len());
    for lap in &g1.layer_laps {
        u1_layers.push(block_smallest(&LowRankOp::new(lap), cfg.kt1, None, mode, &mut rng)?.basis);
    }
    let mut u2_layers: Vec<Array2<f64>> = Vec::with_capacity(g2.layer_laps.len());
    for lap in &g2.layer_laps {
        u2_layers.push(block_smallest(&LowRankOp::new(lap), cfg.kt2, None, mode, &mut rng)?.basis);
    }
    let mut u1_star =
        block_smallest(&LowRankOp::new(&g1.lap_sum), cfg.kt1, None, mode, &mut rng)?.basis;
    let mut u2_star =
        block_smallest(&LowRankOp::new(&g2.lap_sum), cfg.kt2, None, mode, &mut rng)?.basis;
    let mut u2_bar = {
        let mut op = LowRankOp::new(&g2.lap_sum);
        for u in &u1_layers {
            op = op.with_term(cfg.alpha, u);
        }
        block_smallest(&op, cfg.k2, None, mode, &mut rng)?.basis
    };
    let mut u1_bar: Option<Array2<f64>> = None;

    let mut trace: Vec<f64> = Vec::new();
    let mut times = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for _sweep in 0..cfg.max_iter {
        let started = Instant::now();

        // (1) Discriminative subspace of group 1.
        let next_u1_bar = {
            let mut op = LowRankOp::new(&g1.lap_sum).with_term(-cfg.gamma, &u2_bar);
            for u in &u2_layers {
                op = op.with_term(cfg.alpha, u);
            }
            block_smallest(&op, cfg.k1, u1_bar.as_ref(), mode, &mut rng)?.basis
        };

        // (2) Discriminative subspace of group 2, with the fresh Ū₁.
        let next_u2_bar = {
            let mut op = LowRankOp::new(&g2.lap_sum).with_term(-cfg.gamma, &next_u1_bar);
            for u in &u1_layers {
                op = op.with_term(cfg.alpha, u);
            }
            block_smallest(&op, cfg.k2, Some(&u2_bar), mode, &mut rng)?.basis
        };

        // (3) Layerwise subspaces of group 1 (fresh Ū₂, previous U₁*).
        for (l, lap) in g1.layer_laps.iter().enumerate() {
            let op = LowRankOp::new(lap)
                .with_term(cfg.alpha, &next_u2_bar)
                .with_term(-cfg.beta, &u1_star);
            u1_layers[l] = block_smallest(&op, cfg.kt1, Some(&u1_layers[l]), mode, &mut rng)?.basis;
        }

        // (4) Layerwise subspaces of group 2 (fresh Ū₁, previous U₂*).
        for (m, lap) in g2.layer_laps.iter().enumerate() {
            let op = LowRankOp::new(lap)
                .with_term(cfg.alpha, &next_u1_bar)
                .with_term(-cfg.beta, &u2_star);
            u2_layers[m] = block_smallest(&op, cfg.kt2, Some(&u2_layers[m]), mode, &mut rng)?.basis;
        }

        // (5)+(6) Consensus subspaces from the fresh layerwise blocks.
        u1_star = {
            let mut op = LowRankOp::new(&g1.lap_sum);
            for u in &u1_layers {
                op = op.with_term(-cfg.beta, u);
            }
            block_smallest(&op, cfg.kt1, Some(&u1_star), mode, &mut rng)?.basis
        };
        u2_star = {
            let mut op = LowRankOp::new(&g2.lap_sum);
            for u in &u2_layers {
                op = op.with_term(-cfg.beta, u);
            }
            block_smallest(&op, cfg.kt2, Some(&u2_star), mode, &mut rng)?.basis
        };

        u1_bar = Some(next_u1_bar);
        u2_bar = next_u2_bar;
        iterations += 1;

        let objective = objective_value(
            cfg,
            &g1,
            &g2,
            u1_bar.as_ref().unwrap(),
            &u2_bar,
            &u1_layers,
            &u2_layers,
            &u1_star,
            &u2_star,
        );
        times.push(started.elapsed().as_secs_f64() * 1e3);

        if let Some(&prev) = trace.last() {
            if (objective - prev).abs() <= cfg.tol * f64::max(1.0, prev.abs()) {
                trace.push(objective);
                converged = true;
                break;
            }
        }
        trace.push(objective);
    }

    let consensus_partition_1 = kmeans(u1_star.view(), cfg.kt1, cfg.seed)?.partition;
    let consensus_partition_2 = kmeans(u2_star.view(), cfg.kt2, cfg.seed)?.partition;

    Ok(DcscResult {
        u1_bar: Embedding::new(u1_bar.expect("at least one sweep"))?,
        u2_bar: Embedding::new(u2_bar)?,
        u1_layers: u1_layers.into_iter().map(Embedding::new).collect::<Result<_>>()?,
        u2_layers: u2_layers.into_iter().map(Embedding::new).collect::<Result<_>>()?,
        u1_star: Embedding::new(u1_star)?,
        u2_star: Embedding::new(u2_star)?,
        consensus_partition_1,
        consensus_partition_2,
        objective_trace: trace,
        iterations,
        converged,
        warnings,
        iteration_times_ms: times,
    })
}

/// The seven-term joint objective evaluated from the current blocks.
#[allow(clippy::too_many_arguments)]
fn objective_value(
    cfg: &DcscConfig,
    g1: &GroupData,
    g2: &GroupData,
    u1_bar: &Array2<f64>,
    u2_bar: &Array2<f64>,
    u1_layers: &[Array2<f64>],
    u2_layers: &[Array2<f64>],
    u1_star: &Array2<f64>,
    u2_star: &Array2<f64>,
) -> f64 {
    let dis1 = block_trace(&g1.lap_sum, u1_bar)
        + cfg.alpha * u2_layers.iter().map(|u| coupling(u, u1_bar)).sum::<f64>();
    let dis2 = block_trace(&g2.lap_sum, u2_bar)
        + cfg.alpha * u1_layers.iter().map(|u| coupling(u, u2_bar)).sum::<f64>();
    let pair = -cfg.gamma * coupling(u1_bar, u2_bar);
    let lw1: f64 = g1
        .layer_laps
        .iter()
        .zip(u1_layers)
        .map(|(lap, u)| block_trace(lap, u))
        .sum();
    let lw2: f64 = g2
        .layer_laps
        .iter()
        .zip(u2_layers)
        .map(|(lap, u)| block_trace(lap, u))
        .sum();
    let con1 = block_trace(&g1.lap_sum, u1_star)
        - cfg.beta * u1_layers.iter().map(|u| coupling(u, u1_star)).sum::<f64>();
    let con2 = block_trace(&g2.lap_sum, u2_star)
        - cfg.beta * u2_layers.iter().map(|u| coupling(u, u2_star)).sum::<f64>();
    dis1 + dis2 + pair + lw1 + lw2 + con1 + con2
}

fn block_trace(m: &Array2<f64>, u: &Array2<f64>) -> f64 {
    let mu = m.dot(u);
    u.t().dot(&mu).diag().sum()
}

fn coupling(u: &Array2<f64>, v: &Array2<f64>) -> f64 {
    u.t().dot(v).iter().map(|x| x * x).sum()
}
