//! Evaluation metrics: Normalized Mutual Information between partitions and
//! AUC-ROC for discriminative-node detection.

use serde::{Deserialize, Serialize};

use crate::error::{MxError, Result};
use crate::kmeans::Partition;

/// NMI with the arithmetic-mean normalization `2·I(P;Q)/(H(P)+H(Q))`,
/// natural logarithm. Two all-in-one-cluster partitions are identical, so
/// the zero-entropy case returns 1; a single-cluster partition against a
/// non-trivial one carries no information and returns 0.
pub fn nmi(p: &Partition, q: &Partition) -> Result<f64> {
    if p.len() != q.len() {
        return Err(MxError::Dimension(format!(
            "partition lengths differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    if p.is_empty() {
        return Err(MxError::Dimension("empty partitions".into()));
    }
    let n = p.len() as f64;

    let mut counts = vec![vec![0usize; q.k()]; p.k()];
    let mut rows = vec![0usize; p.k()];
    let mut cols = vec![0usize; q.k()];
    for (&a, &b) in p.labels().iter().zip(q.labels()) {
        counts[a][b] += 1;
        rows[a] += 1;
        cols[b] += 1;
    }

    let h_p = entropy(&rows, n);
    let h_q = entropy(&cols, n);
    if h_p == 0.0 && h_q == 0.0 {
        return Ok(1.0);
    }
    if h_p == 0.0 || h_q == 0.0 {
        return Ok(0.0);
    }

    let mut mi = 0.0;
    for (a, row) in counts.iter().enumerate() {
        for (b, &c) in row.iter().enumerate() {
            if c > 0 {
                let joint = c as f64 / n;
                let expected = (rows[a] as f64 / n) * (cols[b] as f64 / n);
                mi += joint * (joint / expected).ln();
            }
        }
    }
    Ok((2.0 * mi / (h_p + h_q)).clamp(0.0, 1.0))
}

fn entropy(counts: &[usize], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Mann-Whitney AUC: the probability that a random positive node outscores a
/// random negative one, ties counted 1/2.
pub fn auc_roc(scores: &[f64], truth: &[bool]) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(MxError::Dimension(format!(
            "scores and truth lengths differ: {} vs {}",
            scores.len(),
            truth.len()
        )));
    }
    let positives = truth.iter().filter(|&&t| t).count();
    let negatives = truth.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(MxError::Undefined(
            "AUC needs at least one positive and one negative".into(),
        ));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(MxError::Validation(format!("non-finite score {bad}")));
    }

    // Midranks over ascending scores.
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut ranks = vec![0.0f64; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = midrank;
        }
        i = j + 1;
    }

    let rank_sum: f64 = truth
        .iter()
        .zip(&ranks)
        .filter(|(&t, _)| t)
        .map(|(_, &r)| r)
        .sum();
    let p = positives as f64;
    let u = rank_sum - p * (p + 1.0) / 2.0;
    Ok(u / (p * negatives as f64))
}

/// One evaluation record, serialized as a JSON line per run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricReport {
    pub nmi: Option<f64>,
    pub auc_group1: f64,
    pub auc_group2: f64,
    pub auc_mean: f64,
    pub seed: u64,
    /// Free-form provenance: resolved config and run identifiers.
    pub metadata: serde_json::Value,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(labels: &[usize], k: usize) -> Partition {
        Partition::new(labels.to_vec(), k).unwrap()
    }

    #[test]
    fn identical_partitions_score_one() {
        let p = part(&[0, 0, 1, 1, 2, 2], 3);
        assert!((nmi(&p, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_cluster_scores_zero() {
        let p = part(&[0, 0, 0, 0], 1);
        let q = part(&[0, 1, 0, 1], 2);
        assert_eq!(nmi(&p, &q).unwrap(), 0.0);
    }

    #[test]
    fn independent_partitions_score_zero() {
        let p = part(&[0, 0, 1, 1], 2);
        let q = part(&[0, 1, 0, 1], 2);
        assert!(nmi(&p, &q).unwrap().abs() < 1e-12);
    }

    #[test]
    fn contingency_table_oracle() {
        // P = (0,0,1,1), Q = (0,0,1,0): joint counts n00=2, n10=1, n11=1.
        // I = sum n_ij/n ln(n n_ij / (a_i b_j)), H(P) = ln 2,
        // H(Q) = -(3/4)ln(3/4) - (1/4)ln(1/4); NMI = 2I/(H(P)+H(Q)).
        let p = part(&[0, 0, 1, 1], 2);
        let q = part(&[0, 0, 1, 0], 2);
        let i_expected = 0.5 * (4.0f64 * 2.0 / (2.0 * 3.0)).ln()
            + 0.25 * (4.0f64 * 1.0 / (2.0 * 3.0)).ln()
            + 0.25 * (4.0f64 * 1.0 / (2.0 * 1.0)).ln();
        let h_p = 2.0f64.ln();
        let h_q = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        let expected = 2.0 * i_expected / (h_p + h_q);
        assert!((nmi(&p, &q).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn nmi_symmetry_and_relabel_invariance() {
        let p = part(&[0, 0, 1, 1, 2, 0], 3);
        let q = part(&[1, 1, 0, 0, 2, 2], 3);
        assert!((nmi(&p, &q).unwrap() - nmi(&q, &p).unwrap()).abs() < 1e-12);
        // Relabel q: swap labels 0 and 2.
        let q_relabelled = part(&[1, 1, 2, 2, 0, 0], 3);
        assert!((nmi(&p, &q).unwrap() - nmi(&p, &q_relabelled).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn auc_perfect_separation() {
        let truth = vec![true, false, true, false];
        let scores = vec![1.0, 0.0, 1.0, 0.0];
        assert!((auc_roc(&scores, &truth).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn auc_all_ties_is_half() {
        let truth = vec![true, false, true, false];
        let scores = vec![0.3; 4];
        assert!((auc_roc(&scores, &truth).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn auc_pairwise_enumeration_examples() {
        let truth = vec![true, false, true, false];
        assert!((auc_roc(&[0.9, 0.4, 0.6, 0.1], &truth).unwrap() - 1.0).abs() < 1e-12);
        assert!((auc_roc(&[0.4, 0.9, 0.6, 0.1], &truth).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn auc_matches_brute_force_enumeration() {
        let scores = vec![0.1, 0.7, 0.7, 0.2, 0.9, 0.5, 0.3, 0.5];
        let truth = vec![false, true, false, false, true, true, false, false];
        let mut total = 0.0;
        let mut pairs = 0.0;
        for (i, &ti) in truth.iter().enumerate() {
            if !ti {
                continue;
            }
            for (j, &tj) in truth.iter().enumerate() {
                if tj {
                    continue;
                }
                pairs += 1.0;
                if scores[i] > scores[j] {
                    total += 1.0;
                } else if scores[i] == scores[j] {
                    total += 0.5;
                }
            }
        }
        let expected = total / pairs;
        assert!((auc_roc(&scores, &truth).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn auc_monotone_transform_invariance() {
        let scores = vec![0.1, 0.7, 0.3, 0.2, 0.9, 0.5];
        let truth = vec![false, true, false, false, true, true];
        let base = auc_roc(&scores, &truth).unwrap();
        let transformed: Vec<f64> = scores.iter().map(|s| (3.0 * s + 1.0).exp()).collect();
        assert!((auc_roc(&transformed, &truth).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn auc_complement_identity_without_ties() {
        let scores = vec![0.1, 0.7, 0.3, 0.2, 0.9, 0.5];
        let truth = vec![false, true, false, false, true, true];
        let a = auc_roc(&scores, &truth).unwrap();
        let negated: Vec<f64> = scores.iter().map(|s| -s).collect();
        let b = auc_roc(&negated, &truth).unwrap();
        assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn auc_rejects_single_class() {
        assert!(auc_roc(&[0.1, 0.2], &[true, true]).is_err());
        assert!(auc_roc(&[0.1, 0.2], &[false, false]).is_err());
    }
}
