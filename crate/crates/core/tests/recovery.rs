//! End-to-end recovery on generated benchmark instances.

use mxdisc::benchmark::{generate_instance, BenchmarkConfig};
use mxdisc::metrics::{auc_roc, nmi};
use mxdisc::mx_dsc::{mx_dsc_solve, DscConfig};
use mxdisc::spectral::{consensus_cluster, spectral_cluster};
use mxdisc::subgraph::{affinity_degrees, split_discriminative};

/// 2-block SBM expressed through the benchmark generator: community size 20,
/// within-edge probability 0.5 and cross probability 0.02 correspond to
/// d = 9.9, mu = 0.0404.
fn two_block_sbm(seed: u64) -> BenchmarkConfig {
    BenchmarkConfig {
        n: 40,
        layers1: 1,
        layers2: 1,
        k_total1: 2,
        k_total2: 2,
        k_shared: 0,
        n_shared: Some(0),
        mu: 0.0404,
        p1: 1.0,
        p_disc: 1.0,
        expected_degree: 9.9,
        seed,
    }
}

#[test]
fn spectral_clustering_recovers_planted_two_block_sbm() {
    for seed in 0..10 {
        let inst = generate_instance(&two_block_sbm(seed)).unwrap();
        let layer = &inst.net1.layers()[0];
        let (_, partition) = spectral_cluster(layer, 2, seed).unwrap();
        let score = nmi(&partition, &inst.truth1[0]).unwrap();
        assert!(
            (score - 1.0).abs() < 1e-12,
            "seed {seed}: NMI {score} below exact recovery"
        );
    }
}

#[test]
fn consensus_beats_average_single_layer_on_noisy_multiplex() {
    let mut consensus_total = 0.0;
    let mut single_total = 0.0;
    let mut single_count = 0.0;
    for seed in 0..10 {
        let cfg = BenchmarkConfig {
            n: 60,
            layers1: 5,
            layers2: 1,
            k_total1: 3,
            k_total2: 3,
            k_shared: 2,
            n_shared: None,
            mu: 0.2,
            p1: 1.0,
            p_disc: 1.0,
            expected_degree: 10.0,
            seed: 3000 + seed,
        };
        let inst = generate_instance(&cfg).unwrap();
        let (_, consensus) = consensus_cluster(&inst.net1, 3, seed).unwrap();
        consensus_total += nmi(&consensus, &inst.reference1).unwrap();
        for (l, layer) in inst.net1.layers().iter().enumerate() {
            let (_, p) = spectral_cluster(layer, 3, seed).unwrap();
            single_total += nmi(&p, &inst.truth1[l]).unwrap();
            single_count += 1.0;
        }
    }
    let consensus_mean = consensus_total / 10.0;
    let single_mean = single_total / single_count;
    assert!(
        consensus_mean >= single_mean - 1e-9,
        "consensus {consensus_mean} below single-layer average {single_mean}"
    );
}

#[test]
fn generated_degree_and_mixing_match_targets() {
    // Empirical mean degree near d and cross-community edge fraction near
    // mu, averaged over 10 seeds at N = 256, d = 16, mu = 0.3.
    let mut degree_sum = 0.0;
    let mut cross_sum = 0.0;
    let mut samples = 0.0;
    for seed in 0..10 {
        let cfg = BenchmarkConfig {
            n: 256,
            layers1: 2,
            layers2: 1,
            k_total1: 6,
            k_total2: 5,
            k_shared: 2,
            n_shared: None,
            mu: 0.3,
            p1: 1.0,
            p_disc: 1.0,
            expected_degree: 16.0,
            seed: 9000 + seed,
        };
        let inst = generate_instance(&cfg).unwrap();
        for (layer, truth) in inst.net1.layers().iter().zip(&inst.truth1) {
            let edges = layer.edges();
            let cross = edges
                .iter()
                .filter(|(i, j, _)| truth.labels()[*i] != truth.labels()[*j])
                .count();
            degree_sum += 2.0 * edges.len() as f64 / 256.0;
            cross_sum += cross as f64 / edges.len() as f64;
            samples += 1.0;
        }
    }
    let mean_degree = degree_sum / samples;
    let cross_fraction = cross_sum / samples;
    assert!(
        (mean_degree - 16.0).abs() <= 1.5,
        "mean degree {mean_degree} outside 16 +/- 1.5"
    );
    assert!(
        (cross_fraction - 0.3).abs() <= 0.05,
        "cross-community fraction {cross_fraction} outside 0.3 +/- 0.05"
    );
}

/// One shared community plus two discriminative communities per group. With
/// a single discriminative community per group the two networks would share
/// the identical planted partition (the non-shared pool is common to both
/// groups), leaving nothing to discriminate, so two-per-group is the
/// smallest instance carrying signal.
fn one_shared_two_disc(seed: u64) -> BenchmarkConfig {
    BenchmarkConfig {
        n: 64,
        layers1: 5,
        layers2: 5,
        k_total1: 3,
        k_total2: 3,
        k_shared: 1,
        n_shared: None,
        mu: 0.1,
        p1: 1.0,
        p_disc: 1.0,
        expected_degree: 16.0,
        seed,
    }
}

#[test]
fn mx_dsc_recovers_discriminative_nodes() {
    let mut auc_total = 0.0;
    let mut accuracy_total = 0.0;
    for seed in 0..10 {
        let inst = generate_instance(&one_shared_two_disc(seed)).unwrap();
        let cfg = DscConfig {
            alpha: 0.5,
            gamma: 0.5,
            k1: 2,
            k2: 2,
            seed,
            ..DscConfig::default()
        };
        let result = mx_dsc_solve(&inst.net1, &inst.net2, &cfg).unwrap();
        for pair in result.objective_trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-8);
        }

        let scores1 = affinity_degrees(&result.u1_bar);
        let scores2 = affinity_degrees(&result.u2_bar);
        let auc1 = auc_roc(&scores1, &inst.discriminative_nodes1).unwrap();
        let auc2 = auc_roc(&scores2, &inst.discriminative_nodes2).unwrap();
        auc_total += 0.5 * (auc1 + auc2);

        let labeling = split_discriminative(&scores1).unwrap();
        let correct = labeling
            .is_discriminative
            .iter()
            .zip(&inst.discriminative_nodes1)
            .filter(|(a, b)| a == b)
            .count();
        accuracy_total += correct as f64 / inst.net1.n() as f64;
    }
    let auc_mean = auc_total / 10.0;
    let accuracy_mean = accuracy_total / 10.0;
    assert!(auc_mean >= 0.95, "mean AUC {auc_mean} below 0.95");
    assert!(
        accuracy_mean >= 0.95,
        "mean split accuracy {accuracy_mean} below 0.95"
    );
}
