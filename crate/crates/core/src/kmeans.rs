//! Deterministic k-means with k-means++ seeding and multiple restarts.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{MxError, Result};

/// Number of k-means++ restarts; the lowest-WCSS run wins, ties broken by
/// the lowest restart index.
pub const KMEANS_RESTARTS: u64 = 10;

/// Lloyd iteration cap per restart.
pub const KMEANS_MAX_ITER: usize = 300;

/// Cluster assignment over `N` nodes with ids in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(MxError::Validation("partition needs k >= 1".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(MxError::Validation(format!(
                "label {bad} out of range for k={k}"
            )));
        }
        Ok(Self { labels, k })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Result of a k-means run. Empty clusters are kept (not reseeded) and
/// reported through `empty_clusters`.
#[derive(Debug, Clone)]
pub struct KmeansOutput {
    pub partition: Partition,
    pub wcss: f64,
    pub empty_clusters: Vec<usize>,
}

/// Lloyd's algorithm over `restarts` k-means++ initializations.
///
/// Deterministic for a fixed seed: restart r draws from an independent
/// stream derived from `(seed, r)`.
pub fn kmeans(points: ArrayView2<f64>, k: usize, seed: u64) -> Result<KmeansOutput> {
    let n = points.nrows();
    if n == 0 {
        return Err(MxError::Dimension("no points to cluster".into()));
    }
    if k == 0 || k > n {
        return Err(MxError::Dimension(format!(
            "need 1 <= k <= n, got k={k}, n={n}"
        )));
    }

    let mut best: Option<(f64, Vec<usize>, u64)> = None;
    for restart in 0..KMEANS_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart);
        let (labels, wcss) = lloyd_once(points, k, &mut rng);
        let better = match &best {
            None => true,
            Some((best_wcss, _, _)) => wcss < *best_wcss,
        };
        if better {
            best = Some((wcss, labels, restart));
        }
    }

    let (wcss, labels, _) = best.expect("at least one restart");
    let mut counts = vec![0usize; k];
    for &l in &labels {
        counts[l] += 1;
    }
    let empty_clusters: Vec<usize> = (0..k).filter(|&c| counts[c] == 0).collect();
    Ok(KmeansOutput {
        partition: Partition::new(labels, k)?,
        wcss,
        empty_clusters,
    })
}

fn lloyd_once(points: ArrayView2<f64>, k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64) {
    let n = points.nrows();
    let d = points.ncols();
    let mut centroids = plus_plus_init(points, k, rng);
    let mut labels = vec![0usize; n];
    assign(points, &centroids, &mut labels);

    for _ in 0..KMEANS_MAX_ITER {
        // Centroid update; empty clusters keep their previous position.
        let mut sums = Array2::<f64>::zeros((k, d));
        let mut counts = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            for j in 0..d {
                sums[[l, j]] += points[[i, j]];
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for j in 0..d {
                    centroids[[c, j]] = sums[[c, j]] / counts[c] as f64;
                }
            }
        }

        let mut next = vec![0usize; n];
        assign(points, &centroids, &mut next);
        if next == labels {
            break;
        }
        labels = next;
    }

    let wcss = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| squared_distance(points.row(i), centroids.row(l)))
        .sum();
    (labels, wcss)
}

/// k-means++ seeding: first centroid uniform, later centroids weighted by
/// squared distance to the closest chosen centroid.
fn plus_plus_init(points: ArrayView2<f64>, k: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let n = points.nrows();
    let d = points.ncols();
    let mut centroids = Array2::zeros((k, d));
    let first = rng.random_range(0..n);
    centroids.row_mut(0).assign(&points.row(first));

    let mut dist_sq: Vec<f64> = (0..n)
        .map(|i| squared_distance(points.row(i), centroids.row(0)))
        .collect();

    for c in 1..k {
        let total: f64 = dist_sq.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &w) in dist_sq.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            // All points coincide with chosen centroids; any index works.
            rng.random_range(0..n)
        };
        centroids.row_mut(c).assign(&points.row(pick));
        for (i, best) in dist_sq.iter_mut().enumerate() {
            let dd = squared_distance(points.row(i), centroids.row(c));
            if dd < *best {
                *best = dd;
            }
        }
    }
    centroids
}

fn assign(points: ArrayView2<f64>, centroids: &Array2<f64>, labels: &mut [usize]) {
    for (i, label) in labels.iter_mut().enumerate() {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for c in 0..centroids.nrows() {
            let dd = squared_distance(points.row(i), centroids.row(c));
            if dd < best_d {
                best_d = dd;
                best = c;
            }
        }
        *label = best;
    }
}

fn squared_distance(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}
