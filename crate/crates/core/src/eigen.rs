//! Dense symmetric eigendecomposition and spectral embeddings.
//!
//! The solver reduces the matrix to tridiagonal form with Householder
//! reflections and applies the implicit-shift QL iteration with accumulated
//! rotations (the classic EISPACK `tred2`/`tql2` pair). It is exact up to
//! roundoff for any symmetric input, including the indefinite difference
//! matrices produced by the discriminative solvers.

use ndarray::{s, Array1, Array2};

use crate::error::{MxError, Result};

/// Maximum orthonormality defect tolerated by [`Embedding::new`].
pub const ORTHONORMALITY_TOL: f64 = 1e-8;

const QL_MAX_ITER: usize = 64;

/// Column-orthonormal `N x k` matrix spanning a spectral subspace.
///
/// Only the column span carries meaning: eigenvector signs and rotations
/// within the subspace are arbitrary, so embeddings must be compared with
/// [`projection_distance_sq`], never entrywise.
#[derive(Debug, Clone)]
pub struct Embedding {
    columns: Array2<f64>,
}

impl Embedding {
    /// Validates column orthonormality (`max |UᵀU - I|` at most 1e-8).
    pub fn new(columns: Array2<f64>) -> Result<Self> {
        let (n, k) = columns.dim();
        if k == 0 || k >= n {
            return Err(MxError::Dimension(format!(
                "embedding needs 1 <= k < n, got k={k}, n={n}"
            )));
        }
        let gram = columns.t().dot(&columns);
        for i in 0..k {
            for j in 0..k {
                let expected = if i == j { 1.0 } else { 0.0 };
                if (gram[[i, j]] - expected).abs() > ORTHONORMALITY_TOL {
                    return Err(MxError::Validation(format!(
                        "columns not orthonormal: |G[{i},{j}] - {expected}| = {:.3e}",
                        (gram[[i, j]] - expected).abs()
                    )));
                }
            }
        }
        Ok(Self { columns })
    }

    pub fn n(&self) -> usize {
        self.columns.nrows()
    }

    pub fn k(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &Array2<f64> {
        &self.columns
    }

    pub fn into_columns(self) -> Array2<f64> {
        self.columns
    }
}

/// Squared projection distance `min(k_u, k_v) - tr(U Uᵀ V Vᵀ)`.
///
/// Zero iff the spans coincide; `min(k_u, k_v)` when they are orthogonal.
pub fn projection_distance_sq(u: &Embedding, v: &Embedding) -> Result<f64> {
    if u.n() != v.n() {
        return Err(MxError::Dimension(format!(
            "embeddings live on different node sets: {} vs {}",
            u.n(),
            v.n()
        )));
    }
    let cross = u.columns().t().dot(v.columns());
    let overlap: f64 = cross.iter().map(|x| x * x).sum();
    Ok(u.k().min(v.k()) as f64 - overlap)
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns. The input is symmetrized as `(M + Mᵀ)/2` first;
/// asymmetry beyond `1e-10` or non-finite entries are rejected.
pub fn symmetric_eigen(m: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let a = checked_symmetrize(m)?;
    let n = a.nrows();
    let mut v = a;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    sort_ascending(&mut v, &mut d);
    Ok((d, v))
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues(m: &Array2<f64>) -> Result<Vec<f64>> {
    Ok(symmetric_eigen(m)?.0)
}

/// Eigenpairs for the `k` algebraically smallest eigenvalues.
pub fn smallest_eigenpairs(m: &Array2<f64>, k: usize) -> Result<(Embedding, Vec<f64>)> {
    let n = m.nrows();
    if k == 0 || k >= n {
        return Err(MxError::Dimension(format!(
            "need 1 <= k < n for eigenpair extraction, got k={k}, n={n}"
        )));
    }
    let (values, vectors) = symmetric_eigen(m)?;
    let embedding = Embedding::new(vectors.slice(s![.., ..k]).to_owned())?;
    Ok((embedding, values[..k].to_vec()))
}

fn checked_symmetrize(m: &Array2<f64>) -> Result<Array2<f64>> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(MxError::Dimension(format!(
            "matrix must be square, got {rows}x{cols}"
        )));
    }
    if rows == 0 {
        return Err(MxError::Dimension("matrix is empty".into()));
    }
    let mut out = Array2::zeros((rows, rows));
    for i in 0..rows {
        for j in 0..rows {
            let x = m[[i, j]];
            let y = m[[j, i]];
            if !x.is_finite() {
                return Err(MxError::Validation(format!(
                    "non-finite entry at ({i}, {j})"
                )));
            }
            if (x - y).abs() > 1e-10 * (1.0 + x.abs().max(y.abs())) {
                return Err(MxError::Validation(format!(
                    "matrix not symmetric at ({i}, {j}): {x} vs {y}"
                )));
            }
            out[[i, j]] = 0.5 * (x + y);
        }
    }
    Ok(out)
}

/// Householder reduction to tridiagonal form with accumulated transforms.
fn tred2(v: &mut Array2<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = v.nrows();
    for j in 0..n {
        d[j] = v[[n - 1, j]];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[[i - 1, j]];
                v[[i, j]] = 0.0;
                v[[j, i]] = 0.0;
            }
        } else {
            for item in d.iter_mut().take(i) {
                *item /= scale;
                h += *item * *item;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }

            for j in 0..i {
                let f = d[j];
                v[[j, i]] = f;
                let mut g = e[j] + v[[j, j]] * f;
                for k in (j + 1)..i {
                    g += v[[k, j]] * d[k];
                    e[k] += v[[k, j]] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    let delta = f * e[k] + g * d[k];
                    v[[k, j]] -= delta;
                }
                d[j] = v[[i - 1, j]];
                v[[i, j]] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..(n - 1) {
        v[[n - 1, i]] = v[[i, i]];
        v[[i, i]] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[[k, i + 1]] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[[k, i + 1]] * v[[k, j]];
                }
                for k in 0..=i {
                    let delta = g * d[k];
                    v[[k, j]] -= delta;
                }
            }
        }
        for k in 0..=i {
            v[[k, i + 1]] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[[n - 1, j]];
        v[[n - 1, j]] = 0.0;
    }
    v[[n - 1, n - 1]] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix, rotating
/// the accumulated transform in `v` along with it.
fn tql2(v: &mut Array2<f64>, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = v.nrows();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0_f64;
    let mut tst1 = 0.0_f64;
    let eps = f64::EPSILON;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m >= n {
            m = n - 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITER {
                    return Err(MxError::Validation(
                        "eigensolver failed to converge".into(),
                    ));
                }

                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    for k in 0..n {
                        h = v[[k, i + 1]];
                        v[[k, i + 1]] = s * v[[k, i]] + c * h;
                        v[[k, i]] = c * v[[k, i]] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn sort_ascending(v: &mut Array2<f64>, d: &mut [f64]) {
    let n = d.len();
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().take(n).skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d.swap(i, k);
            for row in 0..n {
                let tmp = v[[row, i]];
                v[[row, i]] = v[[row, k]];
                v[[row, k]] = tmp;
            }
        }
    }
}

/// Orthonormalizes columns with two passes of modified Gram-Schmidt,
/// dropping columns whose residual norm falls below `drop_tol`. Returns the
/// retained columns.
pub fn orthonormalize_columns(basis: &Array2<f64>, drop_tol: f64) -> Array2<f64> {
    let (n, cols) = basis.dim();
    let mut kept: Vec<Array1<f64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut col = basis.column(j).to_owned();
        for _ in 0..2 {
            for q in &kept {
                let proj = q.dot(&col);
                col.scaled_add(-proj, q);
            }
        }
        let norm = col.dot(&col).sqrt();
        if norm > drop_tol {
            col /= norm;
            kept.push(col);
        }
    }
    let mut out = Array2::zeros((n, kept.len()));
    for (j, col) in kept.iter().enumerate() {
        out.column_mut(j).assign(col);
    }
    out
}
