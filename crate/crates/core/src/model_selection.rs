//! Embedding-dimension selection.
//!
//! Total community counts per group come from the eigengap rule on the
//! aggregated Laplacian spectrum. The shared-community count comes from
//! average-linkage agglomerative clustering of the stacked per-community
//! membership columns of the two groups: each group's consensus embedding is
//! clustered into its communities, every community becomes a normalized
//! indicator column, and columns from different groups that land in one
//! cluster mark a community present in both. Raw eigenvector columns are not
//! compared directly; their absolute values coincide for balanced cuts (and
//! the leading columns of any two graphs nearly coincide), which would make
//! the shared count meaningless.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::eigen::{smallest_eigenpairs, symmetric_eigenvalues};
use crate::error::{MxError, Result};
use crate::kmeans::kmeans;
use crate::multiplex::{laplacian_sum, MultiplexNetwork};

/// Default cut distance for the agglomerative step.
pub const DEFAULT_MERGE_THRESHOLD: f64 = 0.5;

/// Default cap on the eigengap search: `min(n/4, 20)`.
pub fn default_k_max(n: usize) -> usize {
    (n / 4).clamp(2, 20)
}

/// Community counts governing the solver embedding widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionSpec {
    /// Total communities per group.
    pub kt1: usize,
    pub kt2: usize,
    /// Shared communities across the groups.
    pub kc: usize,
    /// Discriminative communities, `kt - kc`.
    pub k1: usize,
    pub k2: usize,
}

impl DimensionSpec {
    pub fn from_totals(kt1: usize, kt2: usize, kc: usize) -> Result<Self> {
        if kc > kt1.min(kt2) {
            return Err(MxError::Validation(format!(
                "kc={kc} exceeds min(kt1, kt2)={}",
                kt1.min(kt2)
            )));
        }
        Ok(Self {
            kt1,
            kt2,
            kc,
            k1: kt1 - kc,
            k2: kt2 - kc,
        })
    }

    /// True when a group has no discriminative community left.
    pub fn is_degenerate(&self) -> bool {
        self.k1 == 0 || self.k2 == 0
    }
}

/// Eigengap rule: the `k` in `2..=k_max` maximizing `λ_{k+1} - λ_k` over the
/// ascending spectrum, ties broken toward smaller `k`.
pub fn eigengap_k(eigenvalues: &[f64], k_max: usize) -> Result<usize> {
    if k_max < 2 {
        return Err(MxError::Dimension("k_max must be at least 2".into()));
    }
    if eigenvalues.len() < k_max + 1 {
        return Err(MxError::Dimension(format!(
            "need at least k_max+1={} eigenvalues, got {}",
            k_max + 1,
            eigenvalues.len()
        )));
    }
    let mut best_k = 2;
    let mut best_gap = f64::NEG_INFINITY;
    for k in 2..=k_max {
        let gap = eigenvalues[k] - eigenvalues[k - 1];
        if gap > best_gap {
            best_gap = gap;
            best_k = k;
        }
    }
    Ok(best_k)
}

/// Determines `kt1`, `kt2` via the eigengap rule and `kc` via agglomerative
/// matching of the groups' community indicator columns, yielding the full
/// dimension spec.
pub fn select_dimensions(
    net1: &MultiplexNetwork,
    net2: &MultiplexNetwork,
    k_max: usize,
    merge_threshold: f64,
    seed: u64,
) -> Result<DimensionSpec> {
    if net1.n() != net2.n() {
        return Err(MxError::Dimension(format!(
            "node counts differ: {} vs {}",
            net1.n(),
            net2.n()
        )));
    }
    if !(0.0..=1.0).contains(&merge_threshold) {
        return Err(MxError::Config(format!(
            "merge_threshold={merge_threshold} outside [0, 1]"
        )));
    }

    let s1 = laplacian_sum(net1).into_values();
    let s2 = laplacian_sum(net2).into_values();
    let kt1 = eigengap_k(&symmetric_eigenvalues(&s1)?, k_max)?;
    let kt2 = eigengap_k(&symmetric_eigenvalues(&s2)?, k_max)?;

    let mut columns: Vec<Array1<f64>> = Vec::with_capacity(kt1 + kt2);
    let mut groups: Vec<u8> = Vec::new();
    for (group, (s, kt)) in [(&s1, kt1), (&s2, kt2)].into_iter().enumerate() {
        let (u, _) = smallest_eigenpairs(s, kt)?;
        let clustering = kmeans(u.columns().view(), kt, seed)?;
        for c in 0..kt {
            let members: Vec<usize> = clustering
                .partition
                .labels()
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == c)
                .map(|(i, _)| i)
                .collect();
            if members.is_empty() {
                continue;
            }
            let mut col = Array1::zeros(net1.n());
            let weight = 1.0 / (members.len() as f64).sqrt();
            for &i in &members {
                col[i] = weight;
            }
            columns.push(col);
            groups.push(group as u8);
        }
    }

    let clusters = average_linkage_clusters(&columns, merge_threshold);
    let kc = clusters
        .iter()
        .filter(|members| {
            members.iter().any(|&i| groups[i] == 0) && members.iter().any(|&i| groups[i] == 1)
        })
        .count()
        .min(kt1.min(kt2));

    DimensionSpec::from_totals(kt1, kt2, kc)
}

/// Cosine distance between elementwise-absolute vectors.
fn abs_cosine_distance(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| x.abs() * y.abs()).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    (1.0 - dot / (na * nb)).max(0.0)
}

/// Average-linkage agglomerative clustering, merging while the smallest
/// cluster distance stays at or below the threshold.
fn average_linkage_clusters(items: &[Array1<f64>], threshold: f64) -> Vec<Vec<usize>> {
    let m = items.len();
    let mut dist = Array2::<f64>::zeros((m, m));
    for i in 0..m {
        for j in (i + 1)..m {
            let d = abs_cosine_distance(&items[i], &items[j]);
            dist[[i, j]] = d;
            dist[[j, i]] = d;
        }
    }

    let mut clusters: Vec<Option<Vec<usize>>> = (0..m).map(|i| Some(vec![i])).collect();
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..m {
            if clusters[i].is_none() {
                continue;
            }
            for j in (i + 1)..m {
                if clusters[j].is_none() {
                    continue;
                }
                let d = dist[[i, j]];
                if best.is_none_or(|(_, _, bd)| d < bd) {
                    best = Some((i, j, d));
                }
            }
        }
        let Some((i, j, d)) = best else { break };
        if d > threshold {
            break;
        }
        // Lance-Williams update for average linkage.
        let size_i = clusters[i].as_ref().unwrap().len() as f64;
        let size_j = clusters[j].as_ref().unwrap().len() as f64;
        for k in 0..m {
            if k == i || k == j || clusters[k].is_none() {
                continue;
            }
            let merged = (size_i * dist[[i, k]] + size_j * dist[[j, k]]) / (size_i + size_j);
            dist[[i, k]] = merged;
            dist[[k, i]] = merged;
        }
        let absorbed = clusters[j].take().unwrap();
        clusters[i].as_mut().unwrap().extend(absorbed);
    }
    clusters.into_iter().flatten().collect()
}
