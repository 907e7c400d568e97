//! Block eigen-updates for matrices of the form `base + Σ cᵢ·VᵢVᵢᵀ`.
//!
//! Every block update in the alternating solvers asks for the k smallest
//! eigenvectors of a fixed dense matrix plus a handful of signed outer
//! products of embeddings. Applying such an operator to a block of vectors
//! costs `O(N²·k)`, so a warm-started Rayleigh-Ritz iteration resolves the
//! update without a fresh `O(N³)` factorization. Small problems, and any
//! iteration that fails to converge, fall back to the exact dense solver.

use ndarray::{concatenate, s, Array2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eigen::{orthonormalize_columns, smallest_eigenpairs, symmetric_eigen};
use crate::error::Result;

/// Below this size the dense path is used unconditionally.
pub(crate) const DENSE_MAX_N: usize = 96;

const TOL_REL: f64 = 1e-9;
const MAX_SWEEPS: usize = 100;
const STALL_WINDOW: usize = 12;

/// Eigensolver selection for the per-iteration block updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenMode {
    /// Dense for small problems, low-rank updates otherwise.
    #[default]
    Auto,
    /// Full dense decomposition for every block update.
    Dense,
    /// Low-rank update path whenever the block shape allows it.
    LowRank,
}

/// Symmetric operator `base + Σ cᵢ·VᵢVᵢᵀ` kept in factored form.
pub(crate) struct LowRankOp<'a> {
    base: &'a Array2<f64>,
    terms: Vec<(f64, &'a Array2<f64>)>,
}

impl<'a> LowRankOp<'a> {
    pub fn new(base: &'a Array2<f64>) -> Self {
        Self { base, terms: Vec::new() }
    }

    pub fn with_term(mut self, coeff: f64, factor: &'a Array2<f64>) -> Self {
        if coeff != 0.0 {
            self.terms.push((coeff, factor));
        }
        self
    }

    pub fn n(&self) -> usize {
        self.base.nrows()
    }

    /// Applies the operator to a block of column vectors.
    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut y = self.base.dot(x);
        for (coeff, v) in &self.terms {
            let inner = v.t().dot(x);
            y.scaled_add(*coeff, &v.dot(&inner));
        }
        y
    }

    /// Materializes the dense matrix for the exact path.
    pub fn materialize(&self) -> Array2<f64> {
        let mut m = self.base.clone();
        for (coeff, v) in &self.terms {
            let outer = v.dot(&v.t());
            m.scaled_add(*coeff, &outer);
        }
        m
    }

    /// Cheap overestimate of the Frobenius norm, used to scale residual
    /// tolerances.
    fn scale(&self) -> f64 {
        let base_frob: f64 = self.base.iter().map(|x| x * x).sum::<f64>().sqrt();
        let terms: f64 = self
            .terms
            .iter()
            .map(|(c, v)| c.abs() * (v.ncols() as f64).sqrt())
            .sum();
        (base_frob + terms).max(1.0)
    }
}

/// Result of a block eigen-update. The solvers consume only the basis; the
/// values and path marker are kept for diagnostics and tests.
pub(crate) struct BlockSolve {
    /// `N x k` orthonormal basis of the computed invariant subspace.
    pub basis: Array2<f64>,
    /// Ascending eigenvalue (or converged Ritz value) estimates.
    #[allow(dead_code)]
    pub values: Vec<f64>,
    /// True when the dense path produced the answer.
    #[allow(dead_code)]
    pub dense_path: bool,
}

/// Computes the k smallest eigenpairs of the operator.
///
/// `warm` seeds the iteration with the previous iterate; because the Ritz
/// space always contains the warm columns, the returned block never has a
/// larger trace than the warm start.
pub(crate) fn block_smallest(
    op: &LowRankOp,
    k: usize,
    warm: Option<&Array2<f64>>,
    mode: EigenMode,
    rng: &mut ChaCha8Rng,
) -> Result<BlockSolve> {
    let n = op.n();
    let block = k + 8;
    let dense = match mode {
        EigenMode::Dense => true,
        EigenMode::LowRank => block * 3 >= n,
        EigenMode::Auto => n < DENSE_MAX_N || block * 3 >= n,
    };
    if dense {
        return dense_solve(op, k);
    }
    match ritz_sweeps(op, k, block, warm, rng) {
        Some((basis, values)) => Ok(BlockSolve { basis, values, dense_path: false }),
        None => dense_solve(op, k),
    }
}

fn dense_solve(op: &LowRankOp, k: usize) -> Result<BlockSolve> {
    let m = op.materialize();
    let (embedding, values) = smallest_eigenpairs(&m, k)?;
    Ok(BlockSolve {
        basis: embedding.into_columns(),
        values,
        dense_path: true,
    })
}

fn ritz_sweeps(
    op: &LowRankOp,
    k: usize,
    block: usize,
    warm: Option<&Array2<f64>>,
    rng: &mut ChaCha8Rng,
) -> Option<(Array2<f64>, Vec<f64>)> {
    let n = op.n();
    let tol = TOL_REL * op.scale();

    let mut start = Array2::zeros((n, block));
    let mut filled = 0;
    if let Some(w) = warm {
        let take = w.ncols().min(block);
        start.slice_mut(s![.., ..take]).assign(&w.slice(s![.., ..take]));
        filled = take;
    }
    for j in filled..block {
        for i in 0..n {
            start[[i, j]] = rng.random_range(-1.0..1.0);
        }
    }
    let mut x = orthonormalize_columns(&start, 1e-12);
    if x.ncols() < k {
        return None;
    }

    let mut best_resid = f64::INFINITY;
    let mut stalled = 0usize;

    for _sweep in 0..MAX_SWEEPS {
        let ax = op.apply(&x);
        let stacked = concatenate(Axis(1), &[x.view(), ax.view()]).ok()?;
        let basis = orthonormalize_columns(&stacked, 1e-10);
        if basis.ncols() < k {
            return None;
        }
        let abasis = op.apply(&basis);
        let gram = {
            let g = basis.t().dot(&abasis);
            (&g + &g.t()) * 0.5
        };
        let (theta, w) = symmetric_eigen(&gram).ok()?;

        let keep = block.min(basis.ncols());
        x = basis.dot(&w.slice(s![.., ..keep]));
        let ax_new = abasis.dot(&w.slice(s![.., ..keep]));

        let mut resid_max = 0.0_f64;
        for j in 0..k {
            let mut sq = 0.0;
            for i in 0..n {
                let r = ax_new[[i, j]] - theta[j] * x[[i, j]];
                sq += r * r;
            }
            resid_max = resid_max.max(sq.sqrt());
        }

        if resid_max <= tol {
            let basis_out = orthonormalize_columns(&x.slice(s![.., ..k]).to_owned(), 1e-12);
            if basis_out.ncols() < k {
                return None;
            }
            return Some((basis_out, theta[..k].to_vec()));
        }

        if resid_max >= best_resid * 0.995 {
            stalled += 1;
            if stalled >= STALL_WINDOW {
                return None;
            }
        } else {
            stalled = 0;
        }
        best_resid = best_resid.min(resid_max);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{projection_distance_sq, Embedding};
    use ndarray::Array2;
    use rand::SeedableRng;

    fn random_symmetric(n: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let x: f64 = rng.random_range(-1.0..1.0);
                m[[i, j]] = x;
                m[[j, i]] = x;
            }
        }
        m
    }

    #[test]
    fn matches_dense_on_midsize_operator() {
        let base = random_symmetric(120, 5);
        let factor = {
            let raw = random_symmetric(120, 6);
            orthonormalize_columns(&raw.slice(s![.., ..3]).to_owned(), 1e-12)
        };
        let op = LowRankOp::new(&base).with_term(-0.7, &factor);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fast = block_smallest(&op, 4, None, EigenMode::LowRank, &mut rng).unwrap();
        let exact = dense_solve(&op, 4).unwrap();

        let a = Embedding::new(fast.basis.clone()).unwrap();
        let b = Embedding::new(exact.basis.clone()).unwrap();
        let dist = projection_distance_sq(&a, &b).unwrap();
        assert!(dist.abs() < 1e-6, "subspace distance {dist}");
        for (x, y) in fast.values.iter().zip(exact.values.iter()) {
            assert!((x - y).abs() < 1e-7, "value mismatch {x} vs {y}");
        }
        assert!(!fast.dense_path);
    }

    #[test]
    fn warm_start_never_increases_trace() {
        let base = random_symmetric(120, 9);
        let op = LowRankOp::new(&base);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // A deliberately bad warm start: random orthonormal block.
        let warm = orthonormalize_columns(&random_symmetric(120, 10).slice(s![.., ..4]).to_owned(), 1e-12);
        let warm_trace: f64 = {
            let aw = op.apply(&warm);
            warm.t().dot(&aw).diag().sum()
        };
        let out = block_smallest(&op, 4, Some(&warm), EigenMode::LowRank, &mut rng).unwrap();
        let got_trace: f64 = out.values.iter().sum();
        assert!(got_trace <= warm_trace + 1e-9);
    }

    #[test]
    fn small_problems_take_dense_path() {
        let base = random_symmetric(20, 3);
        let op = LowRankOp::new(&base);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = block_smallest(&op, 2, None, EigenMode::Auto, &mut rng).unwrap();
        assert!(out.dense_path);
    }

    #[test]
    fn degenerate_spectrum_converges() {
        let base = Array2::eye(128);
        let op = LowRankOp::new(&base);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let out = block_smallest(&op, 3, None, EigenMode::LowRank, &mut rng).unwrap();
        for v in &out.values {
            assert!((v - 1.0).abs() < 1e-9);
        }
    }
}
