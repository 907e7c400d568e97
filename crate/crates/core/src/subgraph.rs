//! Discriminative subgraph identification from learned subspaces.
//!
//! The projector `Z = Ū Ūᵀ` concentrates weight on the nodes spanned by the
//! discriminative subspace; the absolute row sums `D_i = Σ_j |Z_ij|` separate
//! into two groups, and an exact 1-D 2-means split labels the higher-degree
//! group as discriminative.

use crate::eigen::Embedding;
use crate::error::{MxError, Result};

/// Per-node affinity degrees `D_i = Σ_j |(UUᵀ)_ij|`, computed row by row
/// without materializing `Z`.
pub fn affinity_degrees(u: &Embedding) -> Vec<f64> {
    let cols = u.columns();
    let n = u.n();
    let mut scores = vec![0.0; n];
    for (i, score) in scores.iter_mut().enumerate() {
        let row_i = cols.row(i);
        // z_row = U · (U_i)ᵀ gives row i of Z.
        let z_row = cols.dot(&row_i);
        *score = z_row.iter().map(|z| z.abs()).sum();
    }
    scores
}

/// Binary labeling of nodes into discriminative / non-discriminative.
#[derive(Debug, Clone)]
pub struct DiscriminativeLabeling {
    pub is_discriminative: Vec<bool>,
    /// Centroids of the (low, high) score clusters.
    pub centroids: (f64, f64),
    /// Set when all scores coincide; everything is labeled
    /// non-discriminative.
    pub degenerate: bool,
}

/// Exact 1-D 2-means on the scores: scans all sorted split boundaries for
/// the minimal within-cluster sum of squares. Nodes in the higher-mean
/// cluster are discriminative.
pub fn split_discriminative(scores: &[f64]) -> Result<DiscriminativeLabeling> {
    let n = scores.len();
    if n < 2 {
        return Err(MxError::Dimension(
            "need at least 2 nodes to split".into(),
        ));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(MxError::Validation(format!("non-finite score {bad}")));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| scores[i]).collect();

    if sorted[n - 1] - sorted[0] <= 0.0 {
        return Ok(DiscriminativeLabeling {
            is_discriminative: vec![false; n],
            centroids: (sorted[0], sorted[0]),
            degenerate: true,
        });
    }

    // Prefix sums make each split's WCSS O(1).
    let mut prefix = vec![0.0; n + 1];
    let mut prefix_sq = vec![0.0; n + 1];
    for (i, &s) in sorted.iter().enumerate() {
        prefix[i + 1] = prefix[i] + s;
        prefix_sq[i + 1] = prefix_sq[i] + s * s;
    }
    let wcss = |lo: usize, hi: usize| -> f64 {
        // Sum of squared deviations of sorted[lo..hi] around its mean.
        let count = (hi - lo) as f64;
        let sum = prefix[hi] - prefix[lo];
        let sum_sq = prefix_sq[hi] - prefix_sq[lo];
        sum_sq - sum * sum / count
    };

    let mut best_split = 1;
    let mut best = f64::INFINITY;
    for split in 1..n {
        let total = wcss(0, split) + wcss(split, n);
        if total < best {
            best = total;
            best_split = split;
        }
    }

    let low_mean = (prefix[best_split] - prefix[0]) / best_split as f64;
    let high_mean = (prefix[n] - prefix[best_split]) / (n - best_split) as f64;
    let mut is_discriminative = vec![false; n];
    for &idx in &order[best_split..] {
        is_discriminative[idx] = true;
    }
    Ok(DiscriminativeLabeling {
        is_discriminative,
        centroids: (low_mean, high_mean),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::orthonormalize_columns;
    use ndarray::{s, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_vector_concentrates_score() {
        let mut cols = Array2::zeros((4, 1));
        cols[[0, 0]] = 1.0;
        let u = Embedding::new(cols).unwrap();
        let scores = affinity_degrees(&u);
        assert!((scores[0] - 1.0).abs() < 1e-12);
        for &s in &scores[1..] {
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_vector_spreads_score() {
        let mut cols = Array2::zeros((2, 1));
        let v = 1.0 / 2.0f64.sqrt();
        cols[[0, 0]] = v;
        cols[[1, 0]] = v;
        let u = Embedding::new(cols).unwrap();
        let scores = affinity_degrees(&u);
        assert!((scores[0] - 1.0).abs() < 1e-12);
        assert!((scores[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_naive_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut raw: Array2<f64> = Array2::zeros((6, 2));
        for v in raw.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let cols = orthonormalize_columns(&raw, 1e-12);
        let u = Embedding::new(cols.clone()).unwrap();
        let scores = affinity_degrees(&u);

        let z = cols.dot(&cols.t());
        for i in 0..6 {
            let naive: f64 = (0..6).map(|j| z[[i, j]].abs()).sum();
            assert!((scores[i] - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn projector_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut raw: Array2<f64> = Array2::zeros((20, 3));
        for v in raw.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let cols = orthonormalize_columns(&raw, 1e-12);
        let z = cols.dot(&cols.t());
        // Idempotent projector with trace k.
        let zz = z.dot(&z);
        let max_dev = zz
            .iter()
            .zip(z.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_dev < 1e-9);
        assert!((z.diag().sum() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn degrees_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut raw: Array2<f64> = Array2::zeros((10, 2));
        for v in raw.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let cols = orthonormalize_columns(&raw, 1e-12);
        let u = Embedding::new(cols.clone()).unwrap();
        let base = affinity_degrees(&u);
        for _ in 0..5 {
            let mut g: Array2<f64> = Array2::zeros((2, 2));
            for v in g.iter_mut() {
                *v = rng.random_range(-1.0..1.0);
            }
            let q = orthonormalize_columns(&g, 1e-12);
            let rotated = Embedding::new(cols.dot(&q.slice(s![.., ..2]))).unwrap();
            let scores = affinity_degrees(&rotated);
            for (a, b) in base.iter().zip(&scores) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn splits_separated_scores() {
        let labeling = split_discriminative(&[0.1, 0.1, 0.9, 0.95]).unwrap();
        assert_eq!(labeling.is_discriminative, vec![false, false, true, true]);
        assert!(!labeling.degenerate);
        assert!(labeling.centroids.0 < labeling.centroids.1);
    }

    #[test]
    fn identical_scores_flagged_degenerate() {
        let labeling = split_discriminative(&[0.5; 6]).unwrap();
        assert!(labeling.degenerate);
        assert!(labeling.is_discriminative.iter().all(|&b| !b));
    }

    #[test]
    fn split_invariant_under_increasing_affine_transform() {
        let scores = vec![0.2, 1.4, 0.3, 1.5, 0.25, 1.45, 0.22];
        let base = split_discriminative(&scores).unwrap();
        let transformed: Vec<f64> = scores.iter().map(|s| 3.5 * s + 11.0).collect();
        let shifted = split_discriminative(&transformed).unwrap();
        assert_eq!(base.is_discriminative, shifted.is_discriminative);
    }

    #[test]
    fn split_matches_brute_force_two_means() {
        // Brute-force over all 2^n labelings confirms the scan finds the
        // optimal split.
        let scores: Vec<f64> = vec![0.11, 0.92, 0.35, 0.78, 0.4, 0.05];
        let n = scores.len();
        let mut best_wcss = f64::INFINITY;
        let mut best_mask = 0usize;
        for mask in 1..(1usize << n) - 1 {
            let (mut s1, mut s2, mut c1, mut c2) = (0.0, 0.0, 0.0, 0.0);
            for (i, &sc) in scores.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    s1 += sc;
                    c1 += 1.0;
                } else {
                    s2 += sc;
                    c2 += 1.0;
                }
            }
            let (m1, m2) = (s1 / c1, s2 / c2);
            let wcss: f64 = scores
                .iter()
                .enumerate()
                .map(|(i, &sc)| {
                    if mask & (1 << i) != 0 {
                        (sc - m1).powi(2)
                    } else {
                        (sc - m2).powi(2)
                    }
                })
                .sum();
            if wcss < best_wcss {
                best_wcss = wcss;
                best_mask = mask;
            }
        }
        let labeling = split_discriminative(&scores).unwrap();
        // The brute-force optimum, expressed as the higher-mean side.
        let side1: Vec<bool> = (0..n).map(|i| best_mask & (1 << i) != 0).collect();
        let mean1: f64 = scores
            .iter()
            .zip(&side1)
            .filter(|(_, &b)| b)
            .map(|(s, _)| s)
            .sum::<f64>()
            / side1.iter().filter(|&&b| b).count() as f64;
        let mean0: f64 = scores
            .iter()
            .zip(&side1)
            .filter(|(_, &b)| !b)
            .map(|(s, _)| s)
            .sum::<f64>()
            / side1.iter().filter(|&&b| !b).count() as f64;
        let expected: Vec<bool> = if mean1 > mean0 {
            side1
        } else {
            side1.iter().map(|&b| !b).collect()
        };
        assert_eq!(labeling.is_discriminative, expected);
    }
}
