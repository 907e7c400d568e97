//! Paired multiplex benchmark networks with planted shared and
//! discriminative communities.
//!
//! A reference assignment places `n_shared` randomly chosen nodes into
//! `k_shared` shared communities common to both groups; each layer keeps a
//! shared node's reference community with probability `p1`, otherwise it
//! resamples uniformly. The remaining nodes are split per group into that
//! group's discriminative communities. Edges follow a planted-partition
//! model with constant expected degree `d`: a within-community pair of
//! community size `s` connects with probability `(1-mu)·d/(s-1)`, a cross
//! pair with the symmetrized `mu·d/(N-s)` rate.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MxError, Result};
use crate::kmeans::Partition;
use crate::multiplex::{AdjacencyMatrix, MultiplexNetwork};

/// Generator parameters. `n_shared = None` picks the default
/// `round(n · k_shared / max(k_total1, k_total2))`, which balances community
/// sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub n: usize,
    pub layers1: usize,
    pub layers2: usize,
    pub k_total1: usize,
    pub k_total2: usize,
    pub k_shared: usize,
    #[serde(default)]
    pub n_shared: Option<usize>,
    pub mu: f64,
    #[serde(default = "default_p1")]
    pub p1: f64,
    /// Inter-layer dependency for discriminative communities; 1.0 plants
    /// them identically across layers.
    #[serde(default = "default_p1")]
    pub p_disc: f64,
    #[serde(default = "default_degree")]
    pub expected_degree: f64,
    pub seed: u64,
}

fn default_p1() -> f64 {
    1.0
}

fn default_degree() -> f64 {
    16.0
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(MxError::Config("need at least 2 nodes".into()));
        }
        if self.layers1 == 0 || self.layers2 == 0 {
            return Err(MxError::Config("both groups need at least one layer".into()));
        }
        if self.k_total1 == 0 || self.k_total2 == 0 {
            return Err(MxError::Config("community counts must be positive".into()));
        }
        if self.k_shared > self.k_total1.min(self.k_total2) {
            return Err(MxError::Config(format!(
                "k_shared={} exceeds min(k_total1, k_total2)={}",
                self.k_shared,
                self.k_total1.min(self.k_total2)
            )));
        }
        for (name, v) in [("mu", self.mu), ("p1", self.p1), ("p_disc", self.p_disc)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(MxError::Config(format!("{name}={v} outside [0, 1]")));
            }
        }
        if self.expected_degree <= 0.0 || !self.expected_degree.is_finite() {
            return Err(MxError::Config("expected_degree must be positive".into()));
        }
        let n_shared = self.resolved_n_shared();
        if n_shared >= self.n {
            return Err(MxError::Config(format!(
                "n_shared={n_shared} must be below n={}",
                self.n
            )));
        }
        if self.k_shared == 0 && n_shared > 0 {
            return Err(MxError::Config(
                "n_shared > 0 requires k_shared > 0".into(),
            ));
        }
        let remaining = self.n - n_shared;
        if remaining > 0 && (self.k_total1 == self.k_shared || self.k_total2 == self.k_shared) {
            return Err(MxError::Config(
                "non-shared nodes exist but a group has no discriminative communities".into(),
            ));
        }
        Ok(())
    }

    /// Number of shared nodes, applying the documented default.
    pub fn resolved_n_shared(&self) -> usize {
        match self.n_shared {
            Some(v) => v,
            None => {
                let k_max = self.k_total1.max(self.k_total2) as f64;
                ((self.n as f64) * (self.k_shared as f64) / k_max).round() as usize
            }
        }
    }
}

/// Ground-truth partitions planted by the generator. The discriminative
/// flags are shared by both groups: the same node subset carries the shared
/// communities in each group.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedPartitions {
    /// Pre-perturbation per-node labels, group 1 (shared ids first, then
    /// discriminative ids `k_shared..k_total1`).
    pub reference1: Partition,
    pub reference2: Partition,
    /// Per-layer labels after the `p1`/`p_disc` perturbation.
    pub truth1: Vec<Partition>,
    pub truth2: Vec<Partition>,
    pub discriminative: Vec<bool>,
}

/// A generated pair of multiplex networks plus its ground truth.
#[derive(Debug, Clone)]
pub struct BenchmarkInstance {
    pub net1: MultiplexNetwork,
    pub net2: MultiplexNetwork,
    pub truth1: Vec<Partition>,
    pub truth2: Vec<Partition>,
    pub reference1: Partition,
    pub reference2: Partition,
    pub discriminative_nodes1: Vec<bool>,
    pub discriminative_nodes2: Vec<bool>,
    /// Number of pair probabilities clipped at 1.
    pub clipped_probabilities: usize,
    pub config: BenchmarkConfig,
}

/// Serialized ground truth for a generated instance: reference and per-layer
/// labels per group, discriminative flags, and the generating config for
/// provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthFile {
    pub version: u32,
    pub n: usize,
    pub reference1: Vec<usize>,
    pub reference2: Vec<usize>,
    pub layers1: Vec<Vec<usize>>,
    pub layers2: Vec<Vec<usize>>,
    pub discriminative1: Vec<bool>,
    pub discriminative2: Vec<bool>,
    pub config: BenchmarkConfig,
}

impl TruthFile {
    pub fn from_instance(instance: &BenchmarkInstance) -> Self {
        Self {
            version: 1,
            n: instance.net1.n(),
            reference1: instance.reference1.labels().to_vec(),
            reference2: instance.reference2.labels().to_vec(),
            layers1: instance.truth1.iter().map(|p| p.labels().to_vec()).collect(),
            layers2: instance.truth2.iter().map(|p| p.labels().to_vec()).collect(),
            discriminative1: instance.discriminative_nodes1.clone(),
            discriminative2: instance.discriminative_nodes2.clone(),
            config: instance.config.clone(),
        }
    }

    pub fn reference_partition1(&self) -> Result<Partition> {
        Partition::new(self.reference1.clone(), self.config.k_total1)
    }

    pub fn reference_partition2(&self) -> Result<Partition> {
        Partition::new(self.reference2.clone(), self.config.k_total2)
    }
}

/// Plants the shared reference assignment and the per-layer partitions.
pub fn generate_partition_pair(cfg: &BenchmarkConfig) -> Result<PlantedPartitions> {
    cfg.validate()?;
    let n = cfg.n;
    let n_shared = cfg.resolved_n_shared();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Shared node subset: partial Fisher-Yates over the node ids.
    let mut ids: Vec<usize> = (0..n).collect();
    for i in 0..n_shared {
        let j = rng.random_range(i..n);
        ids.swap(i, j);
    }
    let shared_nodes: Vec<usize> = ids[..n_shared].to_vec();
    let mut discriminative = vec![true; n];
    for &node in &shared_nodes {
        discriminative[node] = false;
    }

    // Reference shared assignment: balanced split of the shuffled subset.
    // `shared_nodes` is empty when n_shared is 0, so the division is safe.
    let mut reference = vec![usize::MAX; n];
    for (rank, &node) in shared_nodes.iter().enumerate() {
        reference[node] = rank * cfg.k_shared / n_shared;
    }

    let disc_nodes: Vec<usize> = (0..n).filter(|&i| discriminative[i]).collect();
    let reference1 = assign_discriminative(&reference, &disc_nodes, cfg.k_shared, cfg.k_total1, &mut rng);
    let reference2 = assign_discriminative(&reference, &disc_nodes, cfg.k_shared, cfg.k_total2, &mut rng);

    let truth1 = perturb_layers(cfg, &reference1, &discriminative, cfg.layers1, cfg.k_total1, 1);
    let truth2 = perturb_layers(cfg, &reference2, &discriminative, cfg.layers2, cfg.k_total2, 2);

    Ok(PlantedPartitions {
        reference1: Partition::new(reference1, cfg.k_total1)?,
        reference2: Partition::new(reference2, cfg.k_total2)?,
        truth1: truth1
            .into_iter()
            .map(|labels| Partition::new(labels, cfg.k_total1))
            .collect::<Result<_>>()?,
        truth2: truth2
            .into_iter()
            .map(|labels| Partition::new(labels, cfg.k_total2))
            .collect::<Result<_>>()?,
        discriminative,
    })
}

fn assign_discriminative(
    shared_reference: &[usize],
    disc_nodes: &[usize],
    k_shared: usize,
    k_total: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let mut labels: Vec<usize> = shared_reference.to_vec();
    let k_disc = k_total - k_shared;
    if disc_nodes.is_empty() {
        for l in labels.iter_mut() {
            if *l == usize::MAX {
                *l = 0;
            }
        }
        return labels;
    }
    let mut shuffled = disc_nodes.to_vec();
    for i in (1..shuffled.len()).rev() {
        let j = rng.random_range(0..=i);
        shuffled.swap(i, j);
    }
    for (rank, &node) in shuffled.iter().enumerate() {
        labels[node] = k_shared + rank * k_disc / shuffled.len();
    }
    labels
}

fn perturb_layers(
    cfg: &BenchmarkConfig,
    reference: &[usize],
    discriminative: &[bool],
    layers: usize,
    k_total: usize,
    group: u64,
) -> Vec<Vec<usize>> {
    let k_shared = cfg.k_shared;
    let k_disc = k_total - k_shared;
    (0..layers)
        .map(|layer| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream((group << 32) | (layer as u64 + 1));
            reference
                .iter()
                .zip(discriminative)
                .map(|(&label, &disc)| {
                    if disc {
                        if cfg.p_disc < 1.0 && rng.random_range(0.0..1.0) >= cfg.p_disc {
                            k_shared + rng.random_range(0..k_disc)
                        } else {
                            label
                        }
                    } else if cfg.p1 < 1.0 && rng.random_range(0.0..1.0) >= cfg.p1 {
                        rng.random_range(0..k_shared)
                    } else {
                        label
                    }
                })
                .collect()
        })
        .collect()
}

/// Generates the full instance: partitions plus planted-partition edges.
pub fn generate_instance(cfg: &BenchmarkConfig) -> Result<BenchmarkInstance> {
    let partitions = generate_partition_pair(cfg)?;
    let mut clipped = 0usize;

    let layers1 = sample_group_edges(cfg, &partitions.truth1, 1, &mut clipped)?;
    let layers2 = sample_group_edges(cfg, &partitions.truth2, 2, &mut clipped)?;

    Ok(BenchmarkInstance {
        net1: MultiplexNetwork::new(layers1)?,
        net2: MultiplexNetwork::new(layers2)?,
        truth1: partitions.truth1,
        truth2: partitions.truth2,
        reference1: partitions.reference1,
        reference2: partitions.reference2,
        discriminative_nodes1: partitions.discriminative.clone(),
        discriminative_nodes2: partitions.discriminative,
        clipped_probabilities: clipped,
        config: cfg.clone(),
    })
}

fn sample_group_edges(
    cfg: &BenchmarkConfig,
    truth: &[Partition],
    group: u64,
    clipped: &mut usize,
) -> Result<Vec<AdjacencyMatrix>> {
    let n = cfg.n;
    let d = cfg.expected_degree;
    let mu = cfg.mu;
    truth
        .iter()
        .enumerate()
        .map(|(layer, partition)| {
            let labels = partition.labels();
            let mut sizes = vec![0usize; partition.k()];
            for &l in labels {
                sizes[l] += 1;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream((group << 48) | (layer as u64 + 1) << 16);

            let mut w = Array2::zeros((n, n));
            for i in 0..n {
                for j in (i + 1)..n {
                    let ci = labels[i];
                    let cj = labels[j];
                    let p = if ci == cj {
                        let s = sizes[ci];
                        if s < 2 {
                            0.0
                        } else {
                            (1.0 - mu) * d / (s - 1) as f64
                        }
                    } else {
                        let pi = mu * d / (n - sizes[ci]) as f64;
                        let pj = mu * d / (n - sizes[cj]) as f64;
                        0.5 * (pi + pj)
                    };
                    let p = if p > 1.0 {
                        *clipped += 1;
                        1.0
                    } else {
                        p
                    };
                    if p > 0.0 && rng.random_range(0.0..1.0) < p {
                        w[[i, j]] = 1.0;
                        w[[j, i]] = 1.0;
                    }
                }
            }
            AdjacencyMatrix::new(w)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> BenchmarkConfig {
        BenchmarkConfig {
            n: 60,
            layers1: 3,
            layers2: 3,
            k_total1: 3,
            k_total2: 3,
            k_shared: 2,
            n_shared: None,
            mu: 0.2,
            p1: 1.0,
            p_disc: 1.0,
            expected_degree: 10.0,
            seed: 7,
        }
    }

    #[test]
    fn p1_one_keeps_reference_everywhere() {
        let cfg = base_config();
        let parts = generate_partition_pair(&cfg).unwrap();
        for layer in &parts.truth1 {
            assert_eq!(layer.labels(), parts.reference1.labels());
        }
        for layer in &parts.truth2 {
            assert_eq!(layer.labels(), parts.reference2.labels());
        }
    }

    #[test]
    fn p1_zero_agreement_near_half_for_two_shared() {
        // With two shared communities and uniform resampling the per-layer
        // agreement with the reference concentrates near 1/2.
        let mut agree = 0usize;
        let mut total = 0usize;
        for seed in 0..50 {
            let cfg = BenchmarkConfig {
                n: 80,
                layers1: 8,
                layers2: 1,
                k_shared: 2,
                k_total1: 3,
                k_total2: 3,
                p1: 0.0,
                seed,
                ..base_config()
            };
            let parts = generate_partition_pair(&cfg).unwrap();
            for layer in &parts.truth1 {
                for (i, (&a, &b)) in layer
                    .labels()
                    .iter()
                    .zip(parts.reference1.labels())
                    .enumerate()
                {
                    if !parts.discriminative[i] {
                        total += 1;
                        if a == b {
                            agree += 1;
                        }
                    }
                }
            }
        }
        let frac = agree as f64 / total as f64;
        assert!((frac - 0.5).abs() < 0.05, "agreement {frac}");
    }

    #[test]
    fn experiment_one_shape_has_expected_disc_counts() {
        let cfg = BenchmarkConfig {
            n: 256,
            layers1: 10,
            layers2: 10,
            k_total1: 6,
            k_total2: 5,
            k_shared: 2,
            n_shared: None,
            mu: 0.1,
            p1: 1.0,
            p_disc: 1.0,
            expected_degree: 16.0,
            seed: 3,
        };
        let parts = generate_partition_pair(&cfg).unwrap();
        let disc_ids1: std::collections::BTreeSet<usize> = parts
            .reference1
            .labels()
            .iter()
            .copied()
            .filter(|&l| l >= cfg.k_shared)
            .collect();
        let disc_ids2: std::collections::BTreeSet<usize> = parts
            .reference2
            .labels()
            .iter()
            .copied()
            .filter(|&l| l >= cfg.k_shared)
            .collect();
        assert_eq!(disc_ids1.len(), 4);
        assert_eq!(disc_ids2.len(), 3);
    }

    #[test]
    fn mu_zero_has_no_cross_edges() {
        let cfg = BenchmarkConfig {
            mu: 0.0,
            ..base_config()
        };
        let inst = generate_instance(&cfg).unwrap();
        for (layer, truth) in inst.net1.layers().iter().zip(&inst.truth1) {
            for (i, j, _) in layer.edges() {
                assert_eq!(truth.labels()[i], truth.labels()[j]);
            }
        }
    }

    #[test]
    fn mu_one_has_no_within_edges() {
        let cfg = BenchmarkConfig {
            mu: 1.0,
            ..base_config()
        };
        let inst = generate_instance(&cfg).unwrap();
        for (layer, truth) in inst.net1.layers().iter().zip(&inst.truth1) {
            for (i, j, _) in layer.edges() {
                assert_ne!(truth.labels()[i], truth.labels()[j]);
            }
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let cfg = base_config();
        let a = generate_instance(&cfg).unwrap();
        let b = generate_instance(&cfg).unwrap();
        assert_eq!(a.net1, b.net1);
        assert_eq!(a.net2, b.net2);
        assert_eq!(a.truth1, b.truth1);
        assert_eq!(a.discriminative_nodes1, b.discriminative_nodes1);
    }

    #[test]
    fn flags_match_reference_labels() {
        let cfg = base_config();
        let inst = generate_instance(&cfg).unwrap();
        for (i, &flag) in inst.discriminative_nodes1.iter().enumerate() {
            let label = inst.reference1.labels()[i];
            assert_eq!(flag, label >= cfg.k_shared);
        }
    }

    #[test]
    fn rejects_inconsistent_configs() {
        let bad = BenchmarkConfig {
            k_shared: 4,
            ..base_config()
        };
        assert!(bad.validate().is_err());

        let bad = BenchmarkConfig {
            n_shared: Some(60),
            ..base_config()
        };
        assert!(bad.validate().is_err());

        let bad = BenchmarkConfig {
            mu: 1.2,
            ..base_config()
        };
        assert!(bad.validate().is_err());
    }
}
