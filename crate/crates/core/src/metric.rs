//! Finite metric spaces, Euclidean embeddings of them and the distortion of
//! such embeddings.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Additive tolerance for the metric axioms, relative to the largest entry.
pub const AXIOM_TOLERANCE: f64 = 1e-9;

/// Two image points closer than this fraction of the image diameter are
/// treated as a collision.
pub const INJECTIVITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("distance matrix has {rows} rows but {labels} labels")]
    ShapeMismatch { rows: usize, labels: usize },
    #[error("distance matrix row {row} has {len} entries, expected {expected}")]
    RaggedRow { row: usize, len: usize, expected: usize },
    #[error("entry ({i}, {j}) is not finite")]
    NonFinite { i: usize, j: usize },
    #[error("dist[{i}][{i}] = {value} is not zero")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("dist[{i}][{j}] = {a} differs from dist[{j}][{i}] = {b}")]
    AsymmetricMatrix { i: usize, j: usize, a: f64, b: f64 },
    #[error("dist[{i}][{j}] = {value} is not positive")]
    NonpositiveOffDiagonal { i: usize, j: usize, value: f64 },
    #[error("triangle inequality fails: dist[{i}][{k}] > dist[{i}][{j}] + dist[{j}][{k}]")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("embedding has {got} points but the metric has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("embedding point {point} has {got} coordinates, expected {expected}")]
    DimensionMismatch { point: usize, expected: usize, got: usize },
    #[error("embedding maps points {i} and {j} to (nearly) the same location")]
    NonInjectiveImage { i: usize, j: usize },
    #[error("graph is disconnected: node {0} is unreachable")]
    DisconnectedGraph(usize),
    #[error("edge ({u}, {v}) has non-positive or non-finite weight {weight}")]
    BadEdgeWeight { u: usize, v: usize, weight: f64 },
    #[error("edge endpoint {0} is out of range")]
    NodeOutOfRange(usize),
}

/// A labelled point set together with its full distance matrix.
///
/// The matrix is stored row-major in a flat buffer. Construction only checks
/// the shape; the metric axioms are checked by [`FiniteMetric::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetric {
    labels: Vec<String>,
    dist: Vec<f64>,
}

impl FiniteMetric {
    pub fn new(labels: Vec<String>, dist: Vec<f64>) -> Result<Self, MetricError> {
        let n = labels.len();
        if dist.len() != n * n {
            return Err(MetricError::ShapeMismatch {
                rows: (dist.len() as f64).sqrt() as usize,
                labels: n,
            });
        }
        Ok(Self { labels, dist })
    }

    pub fn from_rows(labels: Vec<String>, rows: &[Vec<f64>]) -> Result<Self, MetricError> {
        let n = labels.len();
        if rows.len() != n {
            return Err(MetricError::ShapeMismatch {
                rows: rows.len(),
                labels: n,
            });
        }
        let mut dist = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MetricError::RaggedRow {
                    row: r,
                    len: row.len(),
                    expected: n,
                });
            }
            dist.extend_from_slice(row);
        }
        Ok(Self { labels, dist })
    }

    /// Builds a metric with labels `0..n` from a distance function.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = f(i, j);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Self {
            labels: default_labels(n),
            dist,
        }
    }

    /// Euclidean distances between the given points.
    pub fn from_points(points: &[Vec<f64>]) -> Self {
        Self::from_fn(points.len(), |i, j| euclidean(&points[i], &points[j]))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, MetricError> {
        if labels.len() != self.labels.len() {
            return Err(MetricError::ShapeMismatch {
                rows: self.labels.len(),
                labels: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.labels.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.labels.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_distance(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_distance(&self) -> f64 {
        let n = self.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.min(self.get(i, j));
            }
        }
        best
    }

    /// Multiplies every distance by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            labels: self.labels.clone(),
            dist: self.dist.iter().map(|d| d * factor).collect(),
        }
    }

    /// Restriction to the given point indices, in the given order.
    pub fn subspace(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        let mut dist = Vec::with_capacity(k * k);
        for &i in indices {
            for &j in indices {
                dist.push(self.get(i, j));
            }
        }
        Self {
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            dist,
        }
    }

    /// Checks the metric axioms, reporting the first violation found.
    ///
    /// Axioms are checked in the order: finiteness, zero diagonal, symmetry,
    /// positivity, triangle inequality. All comparisons use the additive
    /// tolerance [`AXIOM_TOLERANCE`] times the largest entry.
    pub fn validate(&self) -> Result<(), MetricError> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                if !self.get(i, j).is_finite() {
                    return Err(MetricError::NonFinite { i, j });
                }
            }
        }
        let tol = AXIOM_TOLERANCE * self.max_distance();
        for i in 0..n {
            let value = self.get(i, i);
            if value.abs() > tol {
                return Err(MetricError::NonzeroDiagonal { i, value });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (self.get(i, j), self.get(j, i));
                if (a - b).abs() > tol {
                    return Err(MetricError::AsymmetricMatrix { i, j, a, b });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && self.get(i, j) <= 0.0 {
                    return Err(MetricError::NonpositiveOffDiagonal {
                        i,
                        j,
                        value: self.get(i, j),
                    });
                }
            }
        }
        for i in 0..n {
            for k in (i + 1)..n {
                let direct = self.get(i, k);
                for j in 0..n {
                    if j == i || j == k {
                        continue;
                    }
                    if direct > self.get(i, j) + self.get(j, k) + tol {
                        return Err(MetricError::TriangleViolation { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// Largest distance divided by the smallest nonzero distance.
    pub fn aspect_ratio(&self) -> Result<f64, MetricError> {
        if self.len() < 2 {
            return Err(MetricError::TooFewPoints(self.len()));
        }
        Ok(self.max_distance() / self.min_distance())
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Per-point coordinates of an embedding into R^dim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanEmbedding {
    pub dim: usize,
    pub coords: Vec<Vec<f64>>,
}

impl EuclideanEmbedding {
    pub fn new(dim: usize, coords: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        for (point, c) in coords.iter().enumerate() {
            if c.len() != dim {
                return Err(MetricError::DimensionMismatch {
                    point,
                    expected: dim,
                    got: c.len(),
                });
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(MetricError::NonFinite { i: point, j: point });
            }
        }
        Ok(Self { dim, coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(&self.coords[i], &self.coords[j])
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            coords: self
                .coords
                .iter()
                .map(|c| c.iter().map(|x| x * factor).collect())
                .collect(),
        }
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            dim: self.dim,
            coords: indices.iter().map(|&i| self.coords[i].clone()).collect(),
        }
    }

    /// Fails with `NonInjectiveImage` if two image points are closer than
    /// [`INJECTIVITY_TOLERANCE`] times the image diameter. Large images use a
    /// sort-and-sweep search and the bounding-box diagonal (an upper bound
    /// within a factor sqrt(dim)) for the diameter.
    pub fn check_injective(&self) -> Result<(), MetricError> {
        let n = self.len();
        if n > 4096 {
            let mut lo = vec![f64::INFINITY; self.dim];
            let mut hi = vec![f64::NEG_INFINITY; self.dim];
            for c in &self.coords {
                for k in 0..self.dim {
                    lo[k] = lo[k].min(c[k]);
                    hi[k] = hi[k].max(c[k]);
                }
            }
            let diameter = euclidean(&lo, &hi);
            if let Some((i, j)) = crate::geometry::pair_within(&self.coords, INJECTIVITY_TOLERANCE * diameter) {
                return Err(MetricError::NonInjectiveImage { i, j });
            }
            return Ok(());
        }
        let mut diameter: f64 = 0.0;
        let mut closest = (f64::INFINITY, 0, 0);
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.distance(i, j);
                diameter = diameter.max(d);
                if d < closest.0 {
                    closest = (d, i, j);
                }
            }
        }
        if n >= 2 && closest.0 <= INJECTIVITY_TOLERANCE * diameter {
            return Err(MetricError::NonInjectiveImage {
                i: closest.1,
                j: closest.2,
            });
        }
        Ok(())
    }
}

/// Expansion, contraction and distortion of a map from a finite metric into
/// Euclidean space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    /// max ||f(x) - f(y)|| / rho(x, y)
    pub expansion: f64,
    /// max rho(x, y) / ||f(x) - f(y)||
    pub contraction: f64,
    pub distortion: f64,
    /// 1 / contraction; the scale at which the map is noncontracting with
    /// tight constant.
    pub alpha: f64,
}

impl DistortionReport {
    /// Report from the two one-sided constants.
    pub fn new(expansion: f64, contraction: f64) -> Self {
        // the product is ≥ 1 exactly; rounding can land one ulp below, and a
        // plain comparison keeps the NaN of a collapsed pair
        let d = expansion * contraction;
        Self {
            expansion,
            contraction,
            distortion: if d < 1.0 { 1.0 } else { d },
            alpha: 1.0 / contraction,
        }
    }

    pub fn trivial() -> Self {
        Self {
            expansion: 1.0,
            contraction: 1.0,
            distortion: 1.0,
            alpha: 1.0,
        }
    }
}

/// Distortion of the map sending point `i` of `metric` to `embedding.coords[i]`.
///
/// Spaces with fewer than two points have distortion 1 by convention.
pub fn distortion_of_map(
    metric: &FiniteMetric,
    embedding: &EuclideanEmbedding,
) -> Result<DistortionReport, MetricError> {
    if metric.len() != embedding.len() {
        return Err(MetricError::SizeMismatch {
            expected: metric.len(),
            got: embedding.len(),
        });
    }
    if metric.len() < 2 {
        return Ok(DistortionReport::trivial());
    }
    embedding.check_injective()?;
    Ok(distortion_unchecked(metric, |i, j| embedding.distance(i, j)))
}

/// Distortion for an arbitrary image-distance function; the caller is
/// responsible for injectivity.
pub fn distortion_unchecked(metric: &FiniteMetric, mut image: impl FnMut(usize, usize) -> f64) -> DistortionReport {
    let n = metric.len();
    if n < 2 {
        return DistortionReport::trivial();
    }
    let mut expansion: f64 = 0.0;
    let mut contraction: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let rho = metric.get(i, j);
            let d = image(i, j);
            expansion = expansion.max(d / rho);
            contraction = contraction.max(rho / d);
        }
    }
    DistortionReport::new(expansion, contraction)
}

/// Rescales the embedding so that it is noncontracting with tight constant,
/// i.e. its contraction becomes 1.
pub fn normalize_noncontracting(
    metric: &FiniteMetric,
    embedding: &EuclideanEmbedding,
) -> Result<(EuclideanEmbedding, DistortionReport), MetricError> {
    let report = distortion_of_map(metric, embedding)?;
    let scaled = embedding.scaled(report.contraction);
    let report = DistortionReport {
        expansion: report.expansion * report.contraction,
        contraction: 1.0,
        distortion: report.distortion,
        alpha: 1.0,
    };
    Ok((scaled, report))
}

/// An undirected weighted edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl WeightedEdge {
    pub fn new(u: usize, v: usize, weight: f64) -> Self {
        Self { u, v, weight }
    }
}

#[derive(PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// All-pairs shortest-path metric of a weighted graph.
///
/// Nodes are `0..labels.len()`. When `base` is given, its points are nodes
/// `0..base.len()` and every pair of them is joined by an edge weighted with
/// their base distance; `edges` are added on top. Distances are computed by
/// Dijkstra from every source, followed by relaxation sweeps through every
/// intermediate node until no entry changes, so that the output satisfies
/// the triangle inequality exactly in floating point and closing it again is
/// the identity.
pub fn shortest_path_closure(
    labels: Vec<String>,
    edges: &[WeightedEdge],
    base: Option<&FiniteMetric>,
) -> Result<FiniteMetric, MetricError> {
    let n = labels.len();
    let nb = base.map_or(0, |b| b.len());
    if nb > n {
        return Err(MetricError::ShapeMismatch { rows: nb, labels: n });
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in edges {
        if e.u >= n {
            return Err(MetricError::NodeOutOfRange(e.u));
        }
        if e.v >= n {
            return Err(MetricError::NodeOutOfRange(e.v));
        }
        if !(e.weight > 0.0 && e.weight.is_finite()) {
            return Err(MetricError::BadEdgeWeight {
                u: e.u,
                v: e.v,
                weight: e.weight,
            });
        }
        adj[e.u].push((e.v, e.weight));
        adj[e.v].push((e.u, e.weight));
    }

    let mut dist = vec![f64::INFINITY; n * n];
    for s in 0..n {
        let row = &mut dist[s * n..(s + 1) * n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        row[s] = 0.0;
        heap.push(HeapEntry(0.0, s));
        while let Some(HeapEntry(d, u)) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if u < nb {
                let b = base.expect("nb > 0 implies base");
                for v in 0..nb {
                    let cand = d + b.get(u, v);
                    if v != u && cand < row[v] {
                        row[v] = cand;
                        heap.push(HeapEntry(cand, v));
                    }
                }
            }
            for &(v, w) in &adj[u] {
                let cand = d + w;
                if cand < row[v] {
                    row[v] = cand;
                    heap.push(HeapEntry(cand, v));
                }
            }
        }
        if let Some(t) = row.iter().position(|d| !d.is_finite()) {
            return Err(MetricError::DisconnectedGraph(t));
        }
    }
    // symmetrize (Dijkstra from both ends can differ in the last ulp)
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist[i * n + j].min(dist[j * n + i]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    tighten_triangle(&mut dist, n);
    Ok(FiniteMetric { labels, dist })
}

/// Relaxes `d[i][j] <- d[i][k] + d[k][j]` until no entry changes.
fn tighten_triangle(dist: &mut [f64], n: usize) {
    loop {
        let mut changed = false;
        for k in 0..n {
            for i in 0..n {
                let dik = dist[i * n + k];
                for j in 0..n {
                    let cand = dik + dist[k * n + j];
                    if cand < dist[i * n + j] {
                        dist[i * n + j] = cand;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}
