//! Python bindings. Spaces and embeddings are wrapped as classes; reports come
//! back as plain dicts decoded from the same JSON the CLI writes.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use embedlab::counterexamples::{
    crossing_certificate, crossing_certificate_on, k33_space, k33_subspace_embedding, ladder_subspace,
    ladder_subspace_embedding, planar_ladder_space, random_subset, K33Space, PlanarLadderSpace,
};
use embedlab::embedder::{bourgain_embed, embed_rd, BourgainConfig, EmbedOptions, ProjectionMode};
use embedlab::gadget::{epsilon_dense_sphere, forward_embedding, product_space, reduction_parameters, ProductSpace};
use embedlab::io::{from_json, metric_from_json, metric_to_json, to_json, ProductSidecar};
use embedlab::line::{extract_line_embedding, optimal_line_embedding_bruteforce, order_feasibility};
use embedlab::metric::{distortion_of_map, shortest_path_closure, EuclideanEmbedding, FiniteMetric, WeightedEdge};
use embedlab::reductions::{
    branching_graph, consistency_check, extract_ordering_2d, layered_embedding, layered_space, to_non_betweenness,
    BetweennessInstance, LayeredParams, LayeredSpace, Semantics,
};
use embedlab::svg::render;
use embedlab::topology::{compute_holes, nesting_order, ClosedPolyline};

create_exception!(pyembedlab, EmbedlabError, PyValueError);

fn err(e: impl std::fmt::Display) -> PyErr {
    EmbedlabError::new_err(e.to_string())
}

/// A serializable value as the equivalent Python object.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (to_json(value),))
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn check_index(i: usize, n: usize) -> PyResult<()> {
    if i >= n {
        return Err(pyo3::exceptions::PyIndexError::new_err(format!(
            "index {i} out of range for {n} points"
        )));
    }
    Ok(())
}

fn curve(vertices: Vec<[f64; 2]>) -> PyResult<ClosedPolyline> {
    ClosedPolyline::new(vertices).map_err(err)
}

/// A finite metric space with labelled points.
#[pyclass(name = "Metric", frozen, skip_from_py_object, module = "pyembedlab")]
#[derive(Clone)]
pub struct PyMetric(pub FiniteMetric);

#[pymethods]
impl PyMetric {
    #[new]
    #[pyo3(signature = (dist, labels = None))]
    fn new(dist: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let labels = labels.unwrap_or_else(|| default_labels(dist.len()));
        let m = FiniteMetric::from_rows(labels, &dist).map_err(err)?;
        m.validate().map_err(err)?;
        Ok(Self(m))
    }

    /// Euclidean distances between the given points.
    #[staticmethod]
    fn from_points(points: Vec<Vec<f64>>) -> Self {
        Self(FiniteMetric::from_points(&points))
    }

    /// Shortest-path metric of a connected weighted graph given as (u, v, w) edges.
    #[staticmethod]
    #[pyo3(signature = (n, edges, labels = None))]
    fn closure(n: usize, edges: Vec<(usize, usize, f64)>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let edges: Vec<WeightedEdge> = edges.into_iter().map(|(u, v, w)| WeightedEdge::new(u, v, w)).collect();
        let labels = labels.unwrap_or_else(|| default_labels(n));
        Ok(Self(shortest_path_closure(labels, &edges, None).map_err(err)?))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self(metric_from_json(text).map_err(err)?))
    }

    fn to_json(&self) -> String {
        metric_to_json(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Metric(n={})", self.0.len())
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.labels().to_vec()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        check_index(i.max(j), self.0.len())?;
        Ok(self.0.get(i, j))
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.0.rows()
    }

    fn aspect_ratio(&self) -> PyResult<f64> {
        self.0.aspect_ratio().map_err(err)
    }

    fn scaled(&self, factor: f64) -> Self {
        Self(self.0.scaled(factor))
    }

    fn subspace(&self, indices: Vec<usize>) -> PyResult<Self> {
        for &i in &indices {
            check_index(i, self.0.len())?;
        }
        Ok(Self(self.0.subspace(&indices)))
    }
}

/// Points in R^d indexed like the metric they embed.
#[pyclass(name = "Embedding", frozen, skip_from_py_object, module = "pyembedlab")]
#[derive(Clone)]
pub struct PyEmbedding(pub EuclideanEmbedding);

#[pymethods]
impl PyEmbedding {
    #[new]
    #[pyo3(signature = (coords, dim = None))]
    fn new(coords: Vec<Vec<f64>>, dim: Option<usize>) -> PyResult<Self> {
        let dim = dim.or_else(|| coords.first().map(Vec::len)).unwrap_or(0);
        Ok(Self(EuclideanEmbedding::new(dim, coords).map_err(err)?))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self(from_json(text).map_err(err)?))
    }

    fn to_json(&self) -> String {
        to_json(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Embedding(n={}, dim={})", self.0.len(), self.0.dim)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim
    }

    #[getter]
    fn coords(&self) -> Vec<Vec<f64>> {
        self.0.coords.clone()
    }

    fn distance(&self, i: usize, j: usize) -> PyResult<f64> {
        check_index(i.max(j), self.0.len())?;
        Ok(self.0.distance(i, j))
    }
}

/// Distortion report (expansion, contraction, distortion, worst pairs) of an embedding.
#[pyfunction]
fn distortion<'py>(
    py: Python<'py>,
    metric: PyRef<'_, PyMetric>,
    embedding: PyRef<'_, PyEmbedding>,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &distortion_of_map(&metric.0, &embedding.0).map_err(err)?)
}

/// Bourgain embedding followed by random projection to R^dim and local
/// search, keeping the best of one run per seed.
#[pyfunction]
#[pyo3(signature = (metric, dim = 2, seeds = vec![0, 1, 2], trials = 20, refine_iters = 20_000, mode = "gaussian"))]
fn embed<'py>(
    py: Python<'py>,
    metric: PyRef<'_, PyMetric>,
    dim: usize,
    seeds: Vec<u64>,
    trials: usize,
    refine_iters: usize,
    mode: &str,
) -> PyResult<(PyEmbedding, Bound<'py, PyAny>)> {
    let mode = match mode {
        "gaussian" => ProjectionMode::Gaussian,
        "orthonormal" => ProjectionMode::Orthonormal,
        other => return Err(err(format!("unknown projection mode {other:?}"))),
    };
    let opts = EmbedOptions {
        trials,
        refine_iters,
        mode,
    };
    let m = metric.0.clone();
    let (e, report) = py.detach(|| embed_rd(&m, dim, &seeds, &opts)).map_err(err)?;
    Ok((PyEmbedding(e), to_py(py, &report)?))
}

#[pyfunction]
#[pyo3(signature = (metric, seed = 0))]
fn bourgain(metric: PyRef<'_, PyMetric>, seed: u64) -> PyEmbedding {
    PyEmbedding(bourgain_embed(
        &metric.0,
        &BourgainConfig::for_size(metric.0.len(), seed),
    ))
}

/// Points of an eps-dense net of the radius-r sphere in R^d.
#[pyfunction]
fn sphere_net(d: usize, r: f64, eps: f64) -> PyResult<Vec<Vec<f64>>> {
    Ok(epsilon_dense_sphere(d, r, eps).map_err(err)?.points)
}

#[pyfunction]
#[pyo3(signature = (metric, d_max, dim = 2, c = 100.0))]
fn reduction_params<'py>(
    py: Python<'py>,
    metric: PyRef<'_, PyMetric>,
    d_max: f64,
    dim: usize,
    c: f64,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &reduction_parameters(&metric.0, d_max, dim, c).map_err(err)?)
}

/// Exact minimum-distortion line embedding by trying every ordering.
#[pyfunction]
fn optimal_line<'py>(py: Python<'py>, metric: PyRef<'_, PyMetric>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &optimal_line_embedding_bruteforce(&metric.0).map_err(err)?)
}

/// Positions realizing `ordering` with distortion at most `d`, if any.
#[pyfunction]
fn line_feasibility(metric: PyRef<'_, PyMetric>, ordering: Vec<usize>, d: f64) -> PyResult<Option<Vec<f64>>> {
    let n = metric.0.len();
    let mut seen = vec![false; n];
    for &i in &ordering {
        check_index(i, n)?;
        seen[i] = true;
    }
    if ordering.len() != n || seen.contains(&false) {
        return Err(err(format!("ordering must be a permutation of 0..{n}")));
    }
    Ok(order_feasibility(&metric.0, &ordering, d))
}

/// Product of a metric with a sphere net.
#[pyclass(name = "ProductSpace", frozen, module = "pyembedlab")]
pub struct PyProductSpace(ProductSpace);

#[pymethods]
impl PyProductSpace {
    #[new]
    #[pyo3(signature = (metric, radius, epsilon, dim = 2))]
    fn new(metric: PyRef<'_, PyMetric>, radius: f64, epsilon: f64, dim: usize) -> PyResult<Self> {
        let net = epsilon_dense_sphere(dim, radius, epsilon).map_err(err)?;
        Ok(Self(product_space(&metric.0, &net).map_err(err)?))
    }

    /// Product with the net sized by the reduction parameters.
    #[staticmethod]
    #[pyo3(signature = (metric, d_max, dim = 2, c = 100.0))]
    fn for_reduction(metric: PyRef<'_, PyMetric>, d_max: f64, dim: usize, c: f64) -> PyResult<Self> {
        let net = reduction_parameters(&metric.0, d_max, dim, c)
            .and_then(|p| p.net())
            .map_err(err)?;
        Ok(Self(product_space(&metric.0, &net).map_err(err)?))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("ProductSpace(layers={}, net={})", self.0.base.len(), self.0.net.len())
    }

    #[getter]
    fn net(&self) -> Vec<Vec<f64>> {
        self.0.net.points.clone()
    }

    fn distance(&self, i: usize, j: usize) -> PyResult<f64> {
        check_index(i.max(j), self.0.len())?;
        Ok(self.0.distance(i, j))
    }

    #[pyo3(signature = (max_points = 2000))]
    fn to_metric(&self, max_points: usize) -> PyResult<PyMetric> {
        Ok(PyMetric(self.0.to_metric(max_points).map_err(err)?))
    }

    /// Embedding of the product induced by line positions of the base points.
    fn forward_embedding(&self, positions: Vec<f64>) -> PyResult<PyEmbedding> {
        Ok(PyEmbedding(forward_embedding(&positions, &self.0).map_err(err)?))
    }

    /// Line embedding of the base metric recovered from an embedding of the product.
    fn extract_line<'py>(&self, py: Python<'py>, embedding: PyRef<'_, PyEmbedding>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &extract_line_embedding(&self.0, &embedding.0).map_err(err)?)
    }

    fn sidecar_json(&self) -> String {
        to_json(&ProductSidecar::from(&self.0))
    }
}

/// Containment order (outermost first) of disjoint closed curves.
#[pyfunction]
fn nesting<'py>(py: Python<'py>, curves: Vec<Vec<[f64; 2]>>, pitch: f64) -> PyResult<Bound<'py, PyAny>> {
    let curves = curves.into_iter().map(curve).collect::<PyResult<Vec<_>>>()?;
    to_py(py, &nesting_order(&curves, pitch).map_err(err)?)
}

/// Bounded complementary components of a closed curve on a grid of the given pitch.
#[pyfunction]
fn holes<'py>(py: Python<'py>, vertices: Vec<[f64; 2]>, pitch: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &compute_holes(&curve(vertices)?, pitch).map_err(err)?)
}

fn instance(n: usize, triples: Vec<[usize; 3]>, semantics: &str) -> PyResult<BetweennessInstance> {
    let semantics = match semantics {
        "betweenness" => Semantics::Betweenness,
        "non-betweenness" => Semantics::NonBetweenness,
        other => return Err(err(format!("unknown semantics {other:?}"))),
    };
    BetweennessInstance::new(n, semantics, triples).map_err(err)
}

/// Non-betweenness triples with the same consistent orderings as the given betweenness triples.
#[pyfunction]
fn to_non_betweenness_triples(n: usize, triples: Vec<[usize; 3]>) -> PyResult<Vec<[usize; 3]>> {
    Ok(to_non_betweenness(&instance(n, triples, "betweenness")?)
        .map_err(err)?
        .triples)
}

/// A consistent ordering of 1..=n, or None.
#[pyfunction]
#[pyo3(signature = (n, triples, semantics = "betweenness"))]
fn consistent_ordering(n: usize, triples: Vec<[usize; 3]>, semantics: &str) -> PyResult<Option<Vec<usize>>> {
    consistency_check(&instance(n, triples, semantics)?).map_err(err)
}

/// Layered space encoding a non-betweenness instance.
#[pyclass(name = "LayeredSpace", frozen, module = "pyembedlab")]
pub struct PyLayeredSpace(LayeredSpace);

#[pymethods]
impl PyLayeredSpace {
    #[new]
    #[pyo3(signature = (n, triples, dim = 2, d_bound = 1.0, seed = 0))]
    fn new(n: usize, triples: Vec<[usize; 3]>, dim: usize, d_bound: f64, seed: u64) -> PyResult<Self> {
        let t = instance(n, triples, "non-betweenness")?;
        let params = LayeredParams::desk(dim, d_bound, t.locus_count(), seed).map_err(err)?;
        Ok(Self(layered_space(&t, &params, seed).map_err(err)?))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn metric(&self) -> PyMetric {
        PyMetric(self.0.metric.clone())
    }

    fn layer_indices(&self, layer: usize) -> Vec<usize> {
        self.0.layer_indices(layer)
    }

    /// Embedding of the space that lays the layers out in `ordering`.
    fn embedding(&self, ordering: Vec<usize>) -> PyResult<PyEmbedding> {
        Ok(PyEmbedding(layered_embedding(&self.0, &ordering).map_err(err)?))
    }

    /// Layer ordering read back from a planar embedding.
    #[pyo3(signature = (embedding, pitch = 0.05))]
    fn extract_ordering(&self, embedding: PyRef<'_, PyEmbedding>, pitch: f64) -> PyResult<Vec<usize>> {
        extract_ordering_2d(&self.0, &embedding.0, pitch).map_err(err)
    }
}

/// Doubling space built around a K₃,₃ drawing.
#[pyclass(name = "K33Space", frozen, module = "pyembedlab")]
pub struct PyK33Space(K33Space);

#[pymethods]
impl PyK33Space {
    #[new]
    #[pyo3(signature = (n = 60, k = 10, eps = 0.5))]
    fn new(n: usize, k: usize, eps: f64) -> PyResult<Self> {
        Ok(Self(k33_space(n, k, eps).map_err(err)?))
    }

    fn __len__(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn metric(&self) -> PyMetric {
        PyMetric(self.0.metric.clone())
    }

    #[getter]
    fn w(&self) -> f64 {
        self.0.w
    }

    fn drawing(&self) -> PyEmbedding {
        PyEmbedding(self.0.drawing_embedding())
    }

    fn random_subset(&self, k: usize, seed: u64) -> Vec<usize> {
        random_subset(self.0.n, k, seed, 0)
    }

    /// Lower bound on the distortion of a planar embedding of the space (or of `subset`).
    #[pyo3(signature = (embedding, subset = None))]
    fn certificate<'py>(
        &self,
        py: Python<'py>,
        embedding: PyRef<'_, PyEmbedding>,
        subset: Option<Vec<usize>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let cert = match subset {
            Some(s) => crossing_certificate_on(&self.0, &s, &embedding.0),
            None => crossing_certificate(&self.0, &embedding.0),
        };
        to_py(py, &cert.map_err(err)?)
    }

    /// Low-distortion planar embedding of a proper subset.
    fn subspace_embedding<'py>(
        &self,
        py: Python<'py>,
        subset: Vec<usize>,
    ) -> PyResult<(PyEmbedding, Bound<'py, PyAny>)> {
        let sub = k33_subspace_embedding(&self.0, &subset).map_err(err)?;
        Ok((PyEmbedding(sub.embedding.clone()), to_py(py, &sub)?))
    }
}

/// Planar ladder space with unbounded aspect ratio.
#[pyclass(name = "LadderSpace", frozen, module = "pyembedlab")]
pub struct PyLadderSpace(PlanarLadderSpace);

#[pymethods]
impl PyLadderSpace {
    #[new]
    fn new(n: usize) -> PyResult<Self> {
        Ok(Self(planar_ladder_space(n).map_err(err)?))
    }

    fn __len__(&self) -> usize {
        self.0.metric.len()
    }

    #[getter]
    fn metric(&self) -> PyMetric {
        PyMetric(self.0.metric.clone())
    }

    fn drawing(&self) -> PyEmbedding {
        PyEmbedding(self.0.drawing_embedding())
    }

    #[pyo3(signature = (seed = 0))]
    fn subspace(&self, seed: u64) -> Vec<usize> {
        ladder_subspace(&self.0, seed)
    }

    fn subspace_embedding<'py>(
        &self,
        py: Python<'py>,
        subset: Vec<usize>,
    ) -> PyResult<(PyEmbedding, Bound<'py, PyAny>)> {
        let n = self.0.metric.len();
        for &i in &subset {
            check_index(i, n)?;
        }
        let (e, report) = ladder_subspace_embedding(&self.0, &subset);
        Ok((PyEmbedding(e), to_py(py, &report)?))
    }
}

/// Branching graph on the 2- and 3-subsets of 1..=n, checked before it is returned.
#[pyfunction]
fn branching<'py>(py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let g = branching_graph(n).map_err(err)?;
    g.verify().map_err(err)?;
    to_py(py, &g)
}

/// SVG of an artifact (JSON text) of kind curves+holes, embedding2d, k33-drawing or ladder-graph.
#[pyfunction]
fn render_svg(kind: &str, artifact: &str) -> PyResult<String> {
    render(kind.parse().map_err(err)?, artifact).map_err(err)
}

#[pymodule]
fn pyembedlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("EmbedlabError", m.py().get_type::<EmbedlabError>())?;
    m.add_class::<PyMetric>()?;
    m.add_class::<PyEmbedding>()?;
    m.add_class::<PyProductSpace>()?;
    m.add_class::<PyLayeredSpace>()?;
    m.add_class::<PyK33Space>()?;
    m.add_class::<PyLadderSpace>()?;
    m.add_function(wrap_pyfunction!(distortion, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(bourgain, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_net, m)?)?;
    m.add_function(wrap_pyfunction!(reduction_params, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_line, m)?)?;
    m.add_function(wrap_pyfunction!(line_feasibility, m)?)?;
    m.add_function(wrap_pyfunction!(nesting, m)?)?;
    m.add_function(wrap_pyfunction!(holes, m)?)?;
    m.add_function(wrap_pyfunction!(to_non_betweenness_triples, m)?)?;
    m.add_function(wrap_pyfunction!(consistent_ordering, m)?)?;
    m.add_function(wrap_pyfunction!(branching, m)?)?;
    m.add_function(wrap_pyfunction!(render_svg, m)?)?;
    Ok(())
}
