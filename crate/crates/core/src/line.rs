//! Line embeddings: feasibility of a fixed ordering, exact optimum for small
//! spaces, and recovery of a line embedding from an embedding of the
//! product space by nesting order and layer gaps.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadget::ProductSpace;
use crate::geometry::{closest_pair, point_in_polygon, Point2};
use crate::metric::{distortion_unchecked, DistortionReport, EuclideanEmbedding, FiniteMetric, MetricError};
use crate::rng::{self, streams};

/// Largest space accepted by the exhaustive optimum.
pub const MAX_BRUTEFORCE: usize = 10;

/// Bisection steps on `D`.
pub const BISECTION_STEPS: usize = 60;

/// Products up to this size get an exact all-pairs contraction in extraction.
pub const EXACT_PAIRS_LIMIT: usize = 3000;

/// Positions of the points of `X` on the real line, shifted so the minimum is 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "LineFile", into = "LineFile")]
pub struct LineEmbedding {
    pub positions: Vec<f64>,
    /// Point indices sorted by position (ties by index).
    pub ordering: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct LineFile {
    positions: Vec<f64>,
}

impl From<LineFile> for LineEmbedding {
    fn from(f: LineFile) -> Self {
        Self::from_positions(f.positions)
    }
}

impl From<LineEmbedding> for LineFile {
    fn from(e: LineEmbedding) -> Self {
        Self { positions: e.positions }
    }
}

impl LineEmbedding {
    pub fn from_positions(mut positions: Vec<f64>) -> Self {
        let min = positions.iter().copied().fold(f64::INFINITY, f64::min);
        if min.is_finite() {
            for p in &mut positions {
                *p -= min;
            }
        }
        let mut ordering: Vec<usize> = (0..positions.len()).collect();
        ordering.sort_by(|&a, &b| positions[a].total_cmp(&positions[b]).then(a.cmp(&b)));
        Self { positions, ordering }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn to_embedding(&self) -> std::result::Result<EuclideanEmbedding, MetricError> {
        EuclideanEmbedding::new(1, self.positions.iter().map(|&x| vec![x]).collect())
    }

    pub fn distortion(&self, m: &FiniteMetric) -> std::result::Result<DistortionReport, MetricError> {
        crate::metric::distortion_of_map(m, &self.to_embedding()?)
    }
}

/// Decides whether increasing positions along `ordering` exist with
/// `ρ(a_i, a_j) ≤ x_j − x_i ≤ D·ρ(a_i, a_j)` for all `i < j`, returning
/// witness positions (indexed by point, minimum 0) when they do.
///
/// Difference constraints solved by Bellman–Ford from a virtual source.
/// Relaxations smaller than `1e-12·max|w|` are ignored so that cycles of
/// weight exactly zero are not mistaken for negative ones.
pub fn order_feasibility(m: &FiniteMetric, ordering: &[usize], d: f64) -> Option<Vec<f64>> {
    let n = ordering.len();
    let mut edges = Vec::with_capacity(n * (n - 1));
    let mut wmax: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let rho = m.get(ordering[i], ordering[j]);
            // x_i − x_j ≤ −ρ and x_j − x_i ≤ Dρ
            edges.push((j, i, -rho));
            edges.push((i, j, d * rho));
            wmax = wmax.max(d * rho);
        }
    }
    let tol = 1e-12 * wmax;
    let mut x = vec![0.0; n];
    for round in 0..=n {
        let mut changed = false;
        for &(u, v, w) in &edges {
            if x[u] + w < x[v] - tol {
                x[v] = x[u] + w;
                changed = true;
            }
        }
        if !changed {
            let min = x.iter().copied().fold(f64::INFINITY, f64::min);
            let mut positions = vec![0.0; n];
            for (k, &p) in ordering.iter().enumerate() {
                positions[p] = x[k] - min;
            }
            return Some(positions);
        }
        if round == n {
            break;
        }
    }
    None
}

/// Result of the exhaustive optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalLine {
    pub embedding: LineEmbedding,
    /// Smallest feasible `D` found by bisection.
    pub distortion: f64,
}

/// Visits the permutations of `0..n` in lexicographic order.
pub(crate) fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        visit(&perm);
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            return;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}

/// Minimum-distortion line embedding by enumerating the `n!/2` orderings up
/// to reversal and bisecting on `D` for each.
///
/// Orderings that are infeasible at the incumbent `D` are skipped, so the
/// bisection only runs on improving orderings. The first ordering (in
/// lexicographic order) attaining the optimum wins.
pub fn optimal_line_embedding_bruteforce(m: &FiniteMetric) -> Result<OptimalLine> {
    let n = m.len();
    if n > MAX_BRUTEFORCE {
        return Err(Error::TooLarge(format!("{n} points, limit {MAX_BRUTEFORCE}")));
    }
    if n < 2 {
        return Ok(OptimalLine {
            embedding: LineEmbedding::from_positions(vec![0.0; n]),
            distortion: 1.0,
        });
    }
    let upper = n as f64 * m.aspect_ratio()?;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for_each_permutation(n, |perm| {
        if perm[0] > perm[n - 1] {
            return;
        }
        let mut hi = best.as_ref().map_or(upper, |b| b.0);
        let Some(mut witness) = order_feasibility(m, perm, hi) else {
            return;
        };
        let mut lo = 1.0;
        if order_feasibility(m, perm, lo).is_some() {
            hi = lo;
            witness = order_feasibility(m, perm, lo).unwrap();
        } else {
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                match order_feasibility(m, perm, mid) {
                    Some(w) => {
                        hi = mid;
                        witness = w;
                    }
                    None => lo = mid,
                }
            }
        }
        if best.as_ref().is_none_or(|b| hi < b.0 * (1.0 - 1e-9)) {
            best = Some((hi, witness));
        }
    });
    let (d, positions) = best.expect("the greedy bound makes some ordering feasible");
    Ok(OptimalLine {
        embedding: LineEmbedding::from_positions(positions),
        distortion: d,
    })
}

/// Which of two layers the minimum-x₁ comparator puts outside.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outer {
    First,
    Second,
}

/// Lexicographically smallest `(x₁, x₂)` point of a layer.
fn min_x1_point(layer: &[Vec<f64>]) -> &[f64] {
    layer
        .iter()
        .min_by(|p, q| {
            p[0].total_cmp(&q[0])
                .then(p.get(1).unwrap_or(&0.0).total_cmp(q.get(1).unwrap_or(&0.0)))
        })
        .expect("nonempty layer")
}

fn as_polygon(layer: &[Vec<f64>]) -> Vec<Point2> {
    layer.iter().map(|p| [p[0], p[1]]).collect()
}

/// Decides which layer is outer: the one holding the minimum-x₁ point of the
/// union (ties: smaller x₂, then the first layer). In the plane the verdict
/// is cross-checked by point-in-polygon containment of the closed polylines
/// through each layer in net order; disagreement is `NotNested`.
pub fn nesting_comparator(a: &[Vec<f64>], b: &[Vec<f64>], ids: (usize, usize)) -> Result<Outer> {
    let pa = min_x1_point(a);
    let pb = min_x1_point(b);
    let key = |p: &[f64]| (p[0], p.get(1).copied().unwrap_or(0.0));
    let (ka, kb) = (key(pa), key(pb));
    let verdict = if ka.0 < kb.0 || (ka.0 == kb.0 && ka.1 <= kb.1) {
        Outer::First
    } else {
        Outer::Second
    };
    if a[0].len() == 2 {
        let (outer, inner) = match verdict {
            Outer::First => (a, b),
            Outer::Second => (b, a),
        };
        let outer_poly = as_polygon(outer);
        let inner_poly = as_polygon(inner);
        let inner_inside = point_in_polygon([inner[0][0], inner[0][1]], &outer_poly);
        let outer_outside = !point_in_polygon([outer[0][0], outer[0][1]], &inner_poly);
        if !(inner_inside && outer_outside) {
            return Err(Error::NotNested { a: ids.0, b: ids.1 });
        }
    }
    Ok(verdict)
}

/// Layer order (outermost first) with the gaps between consecutive layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestingOrder {
    pub order: Vec<usize>,
    pub gaps: Vec<f64>,
}

/// Outcome of [`extract_line_embedding`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub line: LineEmbedding,
    pub nesting: NestingOrder,
    /// Factor applied to `g` to make it noncontracting.
    pub scale: f64,
    /// Whether the contraction was measured on all pairs or on a structured sample.
    pub contraction_exact: bool,
    /// Additive error bound `2·D·ε` of the finite-set gap approximation.
    pub error_bound: f64,
}

/// Sorts layer indices outermost first with the pairwise comparator.
pub fn sort_layers(layers: &[&[Vec<f64>]]) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = Vec::with_capacity(layers.len());
    for l in 0..layers.len() {
        let mut pos = order.len();
        for (k, &o) in order.iter().enumerate() {
            if nesting_comparator(layers[l], layers[o], (l, o))? == Outer::First {
                pos = k;
                break;
            }
        }
        order.insert(pos, l);
    }
    // insertion only compared against a prefix; confirm every adjacent pair
    for w in order.windows(2) {
        if nesting_comparator(layers[w[0]], layers[w[1]], (w[0], w[1]))? != Outer::First {
            return Err(Error::NotTotallyOrdered(format!("layers {} and {}", w[0], w[1])));
        }
    }
    Ok(order)
}

/// Expansion and contraction of `g` against the product metric, exact for
/// small products and otherwise over cross-layer pairs sharing a net point,
/// consecutive net points within a layer, and a seeded uniform pair sample.
fn product_report(p: &ProductSpace, g: &EuclideanEmbedding) -> (DistortionReport, bool) {
    let n = p.len();
    if n <= EXACT_PAIRS_LIMIT {
        let m = FiniteMetric::from_fn(n, |i, j| p.distance(i, j));
        return (distortion_unchecked(&m, |i, j| g.distance(i, j)), true);
    }
    let nb = p.base.len();
    let nv = p.net.len();
    let mut exp: f64 = 0.0;
    let mut con: f64 = 0.0;
    let mut visit = |i: usize, j: usize| {
        let r = p.distance(i, j);
        let d = g.distance(i, j);
        exp = exp.max(d / r);
        con = con.max(r / d);
    };
    for v in 0..nv {
        for a in 0..nb {
            for b in (a + 1)..nb {
                visit(p.index(a, v), p.index(b, v));
            }
            visit(p.index(a, v), p.index(a, (v + 1) % nv));
        }
    }
    let mut rng = rng::stream(0, streams::SAMPLING, n as u64);
    for _ in 0..100_000 {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i != j {
            visit(i, j);
        }
    }
    (DistortionReport::new(exp, con), false)
}

/// Recovers a line embedding of the base space from an embedding `g` of the
/// product: rescale `g` to be noncontracting, order the image layers by the
/// nesting comparator, take `δ_i` as the finite-set distance between
/// consecutive layers and place the innermost layer at 0, each next layer
/// `δ_i` further out.
pub fn extract_line_embedding(p: &ProductSpace, g: &EuclideanEmbedding) -> Result<Extraction> {
    if g.len() != p.len() {
        return Err(MetricError::SizeMismatch {
            expected: p.len(),
            got: g.len(),
        }
        .into());
    }
    let nb = p.base.len();
    if nb == 1 {
        return Ok(Extraction {
            line: LineEmbedding::from_positions(vec![0.0]),
            nesting: NestingOrder {
                order: vec![0],
                gaps: vec![],
            },
            scale: 1.0,
            contraction_exact: true,
            error_bound: 0.0,
        });
    }
    g.check_injective()?;
    let nv = p.net.len();
    let (report, exact) = product_report(p, g);
    let scale = report.contraction;
    let layers: Vec<&[Vec<f64>]> = (0..nb).map(|a| &g.coords[a * nv..(a + 1) * nv]).collect();
    let order = sort_layers(&layers)?;
    let gaps: Vec<f64> = order
        .windows(2)
        .map(|w| closest_pair(layers[w[0]], layers[w[1]]).unwrap().0 * scale)
        .collect();
    let mut positions = vec![0.0; nb];
    let mut acc = 0.0;
    for (k, &layer) in order.iter().enumerate().rev() {
        positions[layer] = acc;
        if k > 0 {
            acc += gaps[k - 1];
        }
    }
    Ok(Extraction {
        line: LineEmbedding::from_positions(positions),
        nesting: NestingOrder { order, gaps },
        scale,
        contraction_exact: exact,
        error_bound: 2.0 * report.distortion * p.net.epsilon,
    })
}
