//! Python bindings for the discriminative multiplex community detection
//! library: the data model, both solvers, model selection, subgraph scoring,
//! the benchmark generator and the evaluation metrics.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ndarray::Array2;

use mxdisc::benchmark::{self, BenchmarkConfig};
use mxdisc::eigen::Embedding;
use mxdisc::kmeans::Partition;
use mxdisc::metrics;
use mxdisc::model_selection;
use mxdisc::multiplex::{AdjacencyMatrix, MultiplexNetwork as CoreNetwork};
use mxdisc::mx_dcsc::{mx_dcsc_solve, DcscConfig};
use mxdisc::mx_dsc::{mx_dsc_solve, DscConfig};
use mxdisc::spectral;
use mxdisc::subgraph;

fn to_py_err(err: mxdisc::MxError) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn embedding_rows(embedding: &Embedding) -> Vec<Vec<f64>> {
    let cols = embedding.columns();
    (0..embedding.n())
        .map(|i| (0..embedding.k()).map(|j| cols[[i, j]]).collect())
        .collect()
}

fn dense_from_rows(rows: Vec<Vec<f64>>) -> PyResult<Array2<f64>> {
    let n = rows.len();
    let width = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != width) {
        return Err(PyValueError::new_err("rows have inconsistent lengths"));
    }
    let mut out = Array2::zeros((n, width));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

/// A multiplex network: one weighted symmetric adjacency matrix per layer.
#[pyclass(name = "MultiplexNetwork")]
#[derive(Clone)]
struct PyMultiplexNetwork {
    inner: CoreNetwork,
}

#[pymethods]
impl PyMultiplexNetwork {
    /// Builds a network from dense per-layer adjacency matrices.
    #[staticmethod]
    fn from_layers(layers: Vec<Vec<Vec<f64>>>) -> PyResult<Self> {
        let layers = layers
            .into_iter()
            .map(|rows| AdjacencyMatrix::new(dense_from_rows(rows)?).map_err(to_py_err))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Self {
            inner: CoreNetwork::new(layers).map_err(to_py_err)?,
        })
    }

    /// Parses an edge-list file (`# nodes=<N> layers=<L>` header).
    #[staticmethod]
    fn from_file(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: mxdisc::io::read_multiplex_file(&path).map_err(to_py_err)?,
        })
    }

    fn to_file(&self, path: std::path::PathBuf) -> PyResult<()> {
        mxdisc::io::write_multiplex_file(&path, &self.inner).map_err(to_py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn num_layers(&self) -> usize {
        self.inner.num_layers()
    }

    fn layer(&self, index: usize) -> PyResult<Vec<Vec<f64>>> {
        let layer = self
            .inner
            .layers()
            .get(index)
            .ok_or_else(|| PyValueError::new_err(format!("layer {index} out of range")))?;
        let w = layer.weights();
        Ok((0..w.nrows())
            .map(|i| (0..w.ncols()).map(|j| w[[i, j]]).collect())
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "MultiplexNetwork(n={}, layers={})",
            self.inner.n(),
            self.inner.num_layers()
        )
    }
}

/// MX-DSC output: the two discriminative subspaces plus solver diagnostics.
#[pyclass(name = "DscResult")]
struct PyDscResult {
    #[pyo3(get)]
    u1_bar: Vec<Vec<f64>>,
    #[pyo3(get)]
    u2_bar: Vec<Vec<f64>>,
    #[pyo3(get)]
    objective_trace: Vec<f64>,
    #[pyo3(get)]
    iterations: usize,
    #[pyo3(get)]
    converged: bool,
    #[pyo3(get)]
    degenerate: bool,
    #[pyo3(get)]
    scores1: Vec<f64>,
    #[pyo3(get)]
    scores2: Vec<f64>,
    #[pyo3(get)]
    discriminative1: Vec<bool>,
    #[pyo3(get)]
    discriminative2: Vec<bool>,
}

/// MX-DCSC output: discriminative and consensus structure per group.
#[pyclass(name = "DcscResult")]
struct PyDcscResult {
    #[pyo3(get)]
    u1_bar: Vec<Vec<f64>>,
    #[pyo3(get)]
    u2_bar: Vec<Vec<f64>>,
    #[pyo3(get)]
    consensus_labels1: Vec<usize>,
    #[pyo3(get)]
    consensus_labels2: Vec<usize>,
    #[pyo3(get)]
    objective_trace: Vec<f64>,
    #[pyo3(get)]
    iterations: usize,
    #[pyo3(get)]
    converged: bool,
    #[pyo3(get)]
    scores1: Vec<f64>,
    #[pyo3(get)]
    scores2: Vec<f64>,
    #[pyo3(get)]
    discriminative1: Vec<bool>,
    #[pyo3(get)]
    discriminative2: Vec<bool>,
}

/// Community counts selected by the eigengap + matching procedure.
#[pyclass(name = "DimensionSpec")]
#[derive(Clone)]
struct PyDimensionSpec {
    #[pyo3(get)]
    kt1: usize,
    #[pyo3(get)]
    kt2: usize,
    #[pyo3(get)]
    kc: usize,
    #[pyo3(get)]
    k1: usize,
    #[pyo3(get)]
    k2: usize,
}

#[pymethods]
impl PyDimensionSpec {
    fn __repr__(&self) -> String {
        format!(
            "DimensionSpec(kt1={}, kt2={}, kc={}, k1={}, k2={})",
            self.kt1, self.kt2, self.kc, self.k1, self.k2
        )
    }
}

/// A generated benchmark pair with its planted ground truth.
#[pyclass(name = "BenchmarkInstance")]
struct PyBenchmarkInstance {
    #[pyo3(get)]
    net1: PyMultiplexNetwork,
    #[pyo3(get)]
    net2: PyMultiplexNetwork,
    #[pyo3(get)]
    reference1: Vec<usize>,
    #[pyo3(get)]
    reference2: Vec<usize>,
    #[pyo3(get)]
    truth1: Vec<Vec<usize>>,
    #[pyo3(get)]
    truth2: Vec<Vec<usize>>,
    #[pyo3(get)]
    discriminative1: Vec<bool>,
    #[pyo3(get)]
    discriminative2: Vec<bool>,
}

type ScorePair = (Vec<f64>, Vec<f64>, Vec<bool>, Vec<bool>);

fn score_pair(u1: &Embedding, u2: &Embedding) -> PyResult<ScorePair> {
    let scores1 = subgraph::affinity_degrees(u1);
    let scores2 = subgraph::affinity_degrees(u2);
    let flags1 = subgraph::split_discriminative(&scores1)
        .map_err(to_py_err)?
        .is_discriminative;
    let flags2 = subgraph::split_discriminative(&scores2)
        .map_err(to_py_err)?
        .is_discriminative;
    Ok((scores1, scores2, flags1, flags2))
}

/// Multiplex Discriminative Spectral Clustering.
#[pyfunction]
#[pyo3(signature = (net1, net2, k1, k2, alpha = 0.5, gamma = 0.5, max_iter = 100, tol = 1e-6, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn mx_dsc(
    net1: &PyMultiplexNetwork,
    net2: &PyMultiplexNetwork,
    k1: usize,
    k2: usize,
    alpha: f64,
    gamma: f64,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> PyResult<PyDscResult> {
    let cfg = DscConfig {
        alpha,
        gamma,
        k1,
        k2,
        max_iter,
        tol,
        seed,
        ..DscConfig::default()
    };
    let result = mx_dsc_solve(&net1.inner, &net2.inner, &cfg).map_err(to_py_err)?;
    let (scores1, scores2, discriminative1, discriminative2) =
        score_pair(&result.u1_bar, &result.u2_bar)?;
    Ok(PyDscResult {
        u1_bar: embedding_rows(&result.u1_bar),
        u2_bar: embedding_rows(&result.u2_bar),
        objective_trace: result.objective_trace,
        iterations: result.iterations,
        converged: result.converged,
        degenerate: result.degenerate,
        scores1,
        scores2,
        discriminative1,
        discriminative2,
    })
}

/// Multiplex Discriminative and Consensus Spectral Clustering.
#[pyfunction]
#[pyo3(signature = (net1, net2, k1, k2, kt1, kt2, alpha = 0.5, beta = 0.5, gamma = 0.5, max_iter = 100, tol = 1e-6, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn mx_dcsc(
    net1: &PyMultiplexNetwork,
    net2: &PyMultiplexNetwork,
    k1: usize,
    k2: usize,
    kt1: usize,
    kt2: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> PyResult<PyDcscResult> {
    let cfg = DcscConfig {
        alpha,
        beta,
        gamma,
        k1,
        k2,
        kt1,
        kt2,
        max_iter,
        tol,
        seed,
        ..DcscConfig::default()
    };
    let result = mx_dcsc_solve(&net1.inner, &net2.inner, &cfg).map_err(to_py_err)?;
    let (scores1, scores2, discriminative1, discriminative2) =
        score_pair(&result.u1_bar, &result.u2_bar)?;
    Ok(PyDcscResult {
        u1_bar: embedding_rows(&result.u1_bar),
        u2_bar: embedding_rows(&result.u2_bar),
        consensus_labels1: result.consensus_partition_1.labels().to_vec(),
        consensus_labels2: result.consensus_partition_2.labels().to_vec(),
        objective_trace: result.objective_trace,
        iterations: result.iterations,
        converged: result.converged,
        scores1,
        scores2,
        discriminative1,
        discriminative2,
    })
}

/// Consensus spectral clustering of one multiplex network (aggregated
/// Laplacian, k-means on the embedding rows).
#[pyfunction]
#[pyo3(signature = (net, k, seed = 0))]
fn consensus_cluster(net: &PyMultiplexNetwork, k: usize, seed: u64) -> PyResult<Vec<usize>> {
    let (_, partition) = spectral::consensus_cluster(&net.inner, k, seed).map_err(to_py_err)?;
    Ok(partition.labels().to_vec())
}

/// Single-layer spectral clustering.
#[pyfunction]
#[pyo3(signature = (net, layer, k, seed = 0))]
fn spectral_cluster(
    net: &PyMultiplexNetwork,
    layer: usize,
    k: usize,
    seed: u64,
) -> PyResult<Vec<usize>> {
    let layers = net.inner.layers();
    let adjacency = layers
        .get(layer)
        .ok_or_else(|| PyValueError::new_err(format!("layer {layer} out of range")))?;
    let (_, partition) = spectral::spectral_cluster(adjacency, k, seed).map_err(to_py_err)?;
    Ok(partition.labels().to_vec())
}

/// Selects embedding dimensions via the eigengap rule and shared-community
/// matching.
#[pyfunction]
#[pyo3(signature = (net1, net2, k_max = None, merge_threshold = 0.5, seed = 0))]
fn select_dimensions(
    net1: &PyMultiplexNetwork,
    net2: &PyMultiplexNetwork,
    k_max: Option<usize>,
    merge_threshold: f64,
    seed: u64,
) -> PyResult<PyDimensionSpec> {
    let k_max = k_max.unwrap_or_else(|| model_selection::default_k_max(net1.inner.n()));
    let spec = model_selection::select_dimensions(
        &net1.inner,
        &net2.inner,
        k_max,
        merge_threshold,
        seed,
    )
    .map_err(to_py_err)?;
    Ok(PyDimensionSpec {
        kt1: spec.kt1,
        kt2: spec.kt2,
        kc: spec.kc,
        k1: spec.k1,
        k2: spec.k2,
    })
}

/// Generates a paired benchmark instance with planted communities.
#[pyfunction]
#[pyo3(signature = (n, layers1, layers2, k_total1, k_total2, k_shared, mu,
                    p1 = 1.0, expected_degree = 16.0, n_shared = None, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn generate_benchmark(
    n: usize,
    layers1: usize,
    layers2: usize,
    k_total1: usize,
    k_total2: usize,
    k_shared: usize,
    mu: f64,
    p1: f64,
    expected_degree: f64,
    n_shared: Option<usize>,
    seed: u64,
) -> PyResult<PyBenchmarkInstance> {
    let cfg = BenchmarkConfig {
        n,
        layers1,
        layers2,
        k_total1,
        k_total2,
        k_shared,
        n_shared,
        mu,
        p1,
        p_disc: 1.0,
        expected_degree,
        seed,
    };
    let instance = benchmark::generate_instance(&cfg).map_err(to_py_err)?;
    Ok(PyBenchmarkInstance {
        net1: PyMultiplexNetwork { inner: instance.net1 },
        net2: PyMultiplexNetwork { inner: instance.net2 },
        reference1: instance.reference1.labels().to_vec(),
        reference2: instance.reference2.labels().to_vec(),
        truth1: instance.truth1.iter().map(|p| p.labels().to_vec()).collect(),
        truth2: instance.truth2.iter().map(|p| p.labels().to_vec()).collect(),
        discriminative1: instance.discriminative_nodes1,
        discriminative2: instance.discriminative_nodes2,
    })
}

/// Normalized mutual information between two labelings.
#[pyfunction]
fn nmi(labels_a: Vec<usize>, labels_b: Vec<usize>) -> PyResult<f64> {
    let ka = labels_a.iter().max().map_or(1, |m| m + 1);
    let kb = labels_b.iter().max().map_or(1, |m| m + 1);
    let p = Partition::new(labels_a, ka).map_err(to_py_err)?;
    let q = Partition::new(labels_b, kb).map_err(to_py_err)?;
    metrics::nmi(&p, &q).map_err(to_py_err)
}

/// Mann-Whitney AUC of scores against boolean ground truth.
#[pyfunction]
fn auc_roc(scores: Vec<f64>, truth: Vec<bool>) -> PyResult<f64> {
    metrics::auc_roc(&scores, &truth).map_err(to_py_err)
}

#[pymodule]
fn mxdisc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMultiplexNetwork>()?;
    m.add_class::<PyDscResult>()?;
    m.add_class::<PyDcscResult>()?;
    m.add_class::<PyDimensionSpec>()?;
    m.add_class::<PyBenchmarkInstance>()?;
    m.add_function(wrap_pyfunction!(mx_dsc, m)?)?;
    m.add_function(wrap_pyfunction!(mx_dcsc, m)?)?;
    m.add_function(wrap_pyfunction!(consensus_cluster, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_cluster, m)?)?;
    m.add_function(wrap_pyfunction!(select_dimensions, m)?)?;
    m.add_function(wrap_pyfunction!(generate_benchmark, m)?)?;
    m.add_function(wrap_pyfunction!(nmi, m)?)?;
    m.add_function(wrap_pyfunction!(auc_roc, m)?)?;
    Ok(())
}
