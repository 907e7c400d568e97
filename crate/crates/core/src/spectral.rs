//! Single-layer and consensus multiplex spectral clustering.
//!
//! Both operations embed nodes with the k smallest eigenvectors of a
//! normalized Laplacian (single layer) or the sum of per-layer Laplacians
//! (consensus), then run k-means directly on the embedding rows.

use crate::eigen::{smallest_eigenpairs, Embedding};
use crate::error::Result;
use crate::kmeans::{kmeans, Partition};
use crate::multiplex::{laplacian_sum, normalized_laplacian, AdjacencyMatrix, MultiplexNetwork};

/// Spectral clustering of a single layer into `k` communities.
pub fn spectral_cluster(
    a: &AdjacencyMatrix,
    k: usize,
    seed: u64,
) -> Result<(Embedding, Partition)> {
    let lap = normalized_laplacian(a);
    let (embedding, _) = smallest_eigenpairs(lap.values(), k)?;
    let clustering = kmeans(embedding.columns().view(), k, seed)?;
    Ok((embedding, clustering.partition))
}

/// Consensus clustering of a multiplex network into `k` communities using
/// the aggregated Laplacian.
pub fn consensus_cluster(
    net: &MultiplexNetwork,
    k: usize,
    seed: u64,
) -> Result<(Embedding, Partition)> {
    let lap = laplacian_sum(net);
    let (embedding, _) = smallest_eigenpairs(lap.values(), k)?;
    let clustering = kmeans(embedding.columns().view(), k, seed)?;
    Ok((embedding, clustering.partition))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{projection_distance_sq, symmetric_eigenvalues};
    use ndarray::Array2;

    fn two_cliques() -> AdjacencyMatrix {
        // Two disjoint 4-cliques on 8 nodes.
        let mut w = Array2::zeros((8, 8));
        for block in 0..2 {
            for i in 0..4 {
                for j in 0..4 {
                    if i != j {
                        w[[block * 4 + i, block * 4 + j]] = 1.0;
                    }
                }
            }
        }
        AdjacencyMatrix::new(w).unwrap()
    }

    fn complete_graph(n: usize) -> AdjacencyMatrix {
        let mut w = Array2::ones((n, n));
        for i in 0..n {
            w[[i, i]] = 0.0;
        }
        AdjacencyMatrix::new(w).unwrap()
    }

    #[test]
    fn separates_disjoint_cliques() {
        let a = two_cliques();
        let (_, partition) = spectral_cluster(&a, 2, 0).unwrap();
        let l = partition.labels();
        for i in 1..4 {
            assert_eq!(l[0], l[i]);
            assert_eq!(l[4], l[4 + i]);
        }
        assert_ne!(l[0], l[4]);
    }

    #[test]
    fn embedding_trace_is_spectral_optimum() {
        let a = complete_graph(6);
        let lap = normalized_laplacian(&a);
        let (embedding, _) = spectral_cluster(&a, 2, 0).unwrap();
        let lu = lap.values().dot(embedding.columns());
        let trace: f64 = embedding.columns().t().dot(&lu).diag().sum();
        let evals = symmetric_eigenvalues(lap.values()).unwrap();
        let optimum: f64 = evals[..2].iter().sum();
        assert!((trace - optimum).abs() < 1e-8, "trace {trace} vs {optimum}");
    }

    #[test]
    fn single_layer_consensus_reduces_to_spectral() {
        let a = two_cliques();
        let net = MultiplexNetwork::new(vec![a.clone()]).unwrap();
        let (u_single, p_single) = spectral_cluster(&a, 2, 5).unwrap();
        let (u_multi, p_multi) = consensus_cluster(&net, 2, 5).unwrap();
        let dist = projection_distance_sq(&u_single, &u_multi).unwrap();
        assert!(dist.abs() < 1e-10);
        assert_eq!(p_single.labels(), p_multi.labels());
    }

    #[test]
    fn identical_layers_match_single_layer_partition() {
        let a = two_cliques();
        let net = MultiplexNetwork::new(vec![a.clone(), a.clone(), a.clone()]).unwrap();
        let (_, p_single) = spectral_cluster(&a, 2, 9).unwrap();
        let (_, p_multi) = consensus_cluster(&net, 2, 9).unwrap();
        // Scaling the Laplacian by 3 preserves eigenvectors, so the
        // partitions agree up to label names.
        let a = p_single.labels();
        let b = p_multi.labels();
        for i in 0..a.len() {
            for j in (i + 1)..a.len() {
                assert_eq!(a[i] == a[j], b[i] == b[j], "pair ({i}, {j}) disagrees");
            }
        }
    }

    #[test]
    fn node_permutation_equivariance() {
        let a = two_cliques();
        let perm: Vec<usize> = vec![3, 6, 0, 5, 2, 7, 1, 4];
        let mut pw = Array2::zeros((8, 8));
        for i in 0..8 {
            for j in 0..8 {
                pw[[i, j]] = a.weights()[[perm[i], perm[j]]];
            }
        }
        let pa = AdjacencyMatrix::new(pw).unwrap();
        let (_, p_orig) = spectral_cluster(&a, 2, 1).unwrap();
        let (_, p_perm) = spectral_cluster(&pa, 2, 1).unwrap();
        // Cluster of permuted node i must match cluster of original perm[i],
        // up to a global label swap.
        let orig = p_orig.labels();
        let perm_labels = p_perm.labels();
        let flip = orig[perm[0]] != perm_labels[0];
        for i in 0..8 {
            let expected = if flip { 1 - orig[perm[i]] } else { orig[perm[i]] };
            assert_eq!(perm_labels[i], expected);
        }
    }
}
