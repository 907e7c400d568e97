//! Multiplex graph data model and normalized Laplacian construction.
//!
//! A multiplex network is an ordered list of weighted, undirected layers on a
//! shared node set. All matrices are dense and symmetric; the normalized
//! Laplacian is `D^{-1/2}(D-A)D^{-1/2}` with the convention that isolated
//! nodes contribute a zero row and column.

use ndarray::Array2;

use crate::error::{MxError, Result};

/// Tolerance used when validating symmetry of adjacency input.
const SYMMETRY_TOL: f64 = 1e-12;

/// Weighted undirected adjacency matrix with entries in `[0, 1]` and a zero
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    weights: Array2<f64>,
}

impl AdjacencyMatrix {
    /// Validates and wraps a dense weight matrix.
    pub fn new(weights: Array2<f64>) -> Result<Self> {
        let (rows, cols) = weights.dim();
        if rows != cols {
            return Err(MxError::Dimension(format!(
                "adjacency matrix must be square, got {rows}x{cols}"
            )));
        }
        if rows == 0 {
            return Err(MxError::Validation("adjacency matrix is empty".into()));
        }
        for i in 0..rows {
            for j in 0..cols {
                let w = weights[[i, j]];
                if !w.is_finite() {
                    return Err(MxError::Validation(format!(
                        "non-finite weight at ({i}, {j})"
                    )));
                }
                if !(0.0..=1.0).contains(&w) {
                    return Err(MxError::Validation(format!(
                        "weight {w} at ({i}, {j}) outside [0, 1]"
                    )));
                }
                if (w - weights[[j, i]]).abs() > SYMMETRY_TOL {
                    return Err(MxError::Validation(format!(
                        "asymmetric entries at ({i}, {j}): {w} vs {}",
                        weights[[j, i]]
                    )));
                }
            }
            if weights[[i, i]] != 0.0 {
                return Err(MxError::Validation(format!(
                    "nonzero self-loop at node {i}"
                )));
            }
        }
        Ok(Self { weights })
    }

    /// Builds an `n`-node adjacency matrix from undirected weighted edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut weights = Array2::zeros((n, n));
        for &(src, dst, w) in edges {
            if src >= n || dst >= n {
                return Err(MxError::Validation(format!(
                    "edge ({src}, {dst}) out of range for {n} nodes"
                )));
            }
            if src == dst {
                return Err(MxError::Validation(format!("self-loop at node {src}")));
            }
            weights[[src, dst]] = w;
            weights[[dst, src]] = w;
        }
        Self::new(weights)
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    /// Node degrees `D_ii = sum_j A_ij`.
    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.weights.row(i).sum()).collect()
    }

    /// Undirected edge list `(src < dst, weight)` of nonzero entries.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.weights[[i, j]];
                if w != 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }
}

/// Symmetric normalized Laplacian of one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    values: Array2<f64>,
}

impl LaplacianMatrix {
    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }
}

/// Ordered list of same-node-set layers.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplexNetwork {
    layers: Vec<AdjacencyMatrix>,
}

impl MultiplexNetwork {
    pub fn new(layers: Vec<AdjacencyMatrix>) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| MxError::Validation("multiplex network needs at least one layer".into()))?;
        let n = first.n();
        for (idx, layer) in layers.iter().enumerate() {
            if layer.n() != n {
                return Err(MxError::Dimension(format!(
                    "layer {idx} has {} nodes, expected {n}",
                    layer.n()
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn n(&self) -> usize {
        self.layers[0].n()
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[AdjacencyMatrix] {
        &self.layers
    }
}

/// `D^{-1/2}(D-A)D^{-1/2}` with zero rows/columns for isolated nodes.
pub fn normalized_laplacian(a: &AdjacencyMatrix) -> LaplacianMatrix {
    let n = a.n();
    let degrees = a.degrees();
    let inv_sqrt: Vec<f64> = degrees
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();

    let mut values = Array2::zeros((n, n));
    let w = a.weights();
    for i in 0..n {
        if degrees[i] > 0.0 {
            values[[i, i]] = 1.0;
        }
        for j in 0..n {
            if i != j && w[[i, j]] != 0.0 {
                values[[i, j]] = -inv_sqrt[i] * w[[i, j]] * inv_sqrt[j];
            }
        }
    }
    LaplacianMatrix { values }
}

/// Elementwise sum of per-layer normalized Laplacians.
pub fn laplacian_sum(net: &MultiplexNetwork) -> LaplacianMatrix {
    let n = net.n();
    let mut values = Array2::zeros((n, n));
    for layer in net.layers() {
        values += normalized_laplacian(layer).values();
    }
    LaplacianMatrix { values }
}

/// Mean of per-layer normalized Laplacians; used by the `mean_aggregate`
/// solver option for unbalanced layer counts.
pub fn laplacian_mean(net: &MultiplexNetwork) -> LaplacianMatrix {
    let scale = 1.0 / net.num_layers() as f64;
    let values = laplacian_sum(net).into_values() * scale;
    LaplacianMatrix { values }
}
