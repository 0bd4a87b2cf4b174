//! A K₃,₃-shaped planar metric whose small subspaces embed in the plane
//! almost isometrically while the whole space does not, a crossing-based
//! lower bound on the distortion of planar embeddings, and a weighted
//! planar graph built from a subdivided K₄ with a ladder.

use serde::{Deserialize, Serialize};

use crate::embedder::{measured_distortion, refine_local_search};
use crate::error::{Error, Result};
use crate::geometry::{segments_intersect, Point2};
use crate::metric::{shortest_path_closure, DistortionReport, EuclideanEmbedding, FiniteMetric, WeightedEdge};
use crate::rng::{self, streams};

/// Strip height constant: `w = C1·√ε/k`.
pub const C1: f64 = 0.25;
/// Admissible range constant: `k ≤ K33_C·√ε·n`.
pub const K33_C: f64 = 0.25;
/// Point spacing constant: `s = C_SP/n`.
pub const C_SP: f64 = 1.0;
/// The strip holds `⌊n/M_DIVISOR⌋` points of each of its two edges.
pub const M_DIVISOR: usize = 6;
/// Local-search iterations used to polish subspace embeddings.
pub const POLISH_ITERS: usize = 4000;

/// K₃,₃ vertices in point order: `A1, A2, A3, B1, B2, B3`.
pub const VERTEX_NAMES: [&str; 6] = ["A1", "A2", "A3", "B1", "B2", "B3"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K33Edge {
    /// index of the A-vertex (0..3)
    pub a: usize,
    /// index of the B-vertex (3..6)
    pub b: usize,
    /// points along the edge from `a` to `b`, both vertices included
    pub points: Vec<usize>,
}

impl K33Edge {
    pub fn disjoint(&self, other: &K33Edge) -> bool {
        self.a != other.a && self.b != other.b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct K33Space {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub w: f64,
    pub s: f64,
    pub m: usize,
    pub drawing: Vec<Point2>,
    pub labels: Vec<String>,
    /// `p_1..p_m` (on edge A1–B2) and `q_1..q_m` (on edge A3–B1)
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    pub edges: Vec<K33Edge>,
    /// edge of every non-vertex point; `None` for the six vertices
    pub edge_of: Vec<Option<usize>>,
    pub metric: FiniteMetric,
}

/// Sidecar of a serialized [`K33Space`]; the metric travels separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K33Sidecar {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub w: f64,
    pub s: f64,
    pub m: usize,
    pub drawing: Vec<Point2>,
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    pub edges: Vec<K33Edge>,
}

impl K33Space {
    pub fn sidecar(&self) -> K33Sidecar {
        K33Sidecar {
            n: self.n,
            k: self.k,
            eps: self.eps,
            w: self.w,
            s: self.s,
            m: self.m,
            drawing: self.drawing.clone(),
            p: self.p.clone(),
            q: self.q.clone(),
            edges: self.edges.clone(),
        }
    }

    /// Position of `x` in the strip as `(index 1..=m, is_p)`.
    pub fn strip_index(&self, x: usize) -> Option<(usize, bool)> {
        if let Some(i) = self.p.iter().position(|&y| y == x) {
            return Some((i + 1, true));
        }
        self.q.iter().position(|&y| y == x).map(|i| (i + 1, false))
    }

    /// Coordinates in the rectangle configuration: `p_i = (i·s, w)`, `q_j = (j·s, 0)`.
    pub fn rectangle_coords(&self, x: usize) -> Option<Point2> {
        self.strip_index(x)
            .map(|(i, is_p)| [i as f64 * self.s, if is_p { self.w } else { 0.0 }])
    }

    pub fn drawing_embedding(&self) -> EuclideanEmbedding {
        EuclideanEmbedding {
            dim: 2,
            coords: self.drawing.iter().map(|p| p.to_vec()).collect(),
        }
    }
}

fn polyline_length(w: &[Point2]) -> f64 {
    w.windows(2)
        .map(|s| crate::geometry::norm(crate::geometry::sub(s[1], s[0])))
        .sum()
}

/// `count` points spaced evenly by arclength strictly inside the polyline.
fn sample_interior(w: &[Point2], count: usize) -> Vec<Point2> {
    let total = polyline_length(w);
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    let mut before = 0.0;
    for j in 1..=count {
        let target = total * j as f64 / (count + 1) as f64;
        loop {
            let len = crate::geometry::norm(crate::geometry::sub(w[seg + 1], w[seg]));
            if before + len >= target || seg + 2 == w.len() {
                let t = if len > 0.0 { (target - before) / len } else { 0.0 };
                out.push([
                    w[seg][0] + t * (w[seg + 1][0] - w[seg][0]),
                    w[seg][1] + t * (w[seg + 1][1] - w[seg][1]),
                ]);
                break;
            }
            before += len;
            seg += 1;
        }
    }
    out
}

/// Largest-remainder apportionment of `total` proportional to `weights`.
fn apportion(weights: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        (quotas[b] - quotas[b].floor())
            .total_cmp(&(quotas[a] - quotas[a].floor()))
            .then(a.cmp(&b))
    });
    let short = total - counts.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        counts[i] += 1;
    }
    counts
}

/// Builds the K₃,₃ space.
///
/// The drawing is a hexagon `A1 B1 A2 B2 A3 B3` with the chord A2–B3 routed
/// around the outside. The chords A1–B2 and A3–B1 run side by side through
/// a horizontal strip of height `w` holding `p_1..p_m` and `q_1..q_m` at
/// spacing `s`; inside the strip the two sides swap places linearly, which
/// is where the drawing's single crossing sits. Metric distances are drawing
/// distances except for `p_i`–`q_j` pairs, which use the untwisted rectangle
/// configuration.
pub fn k33_space(n: usize, k: usize, eps: f64) -> Result<K33Space> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::ParameterRangeViolation(format!(
            "eps = {eps} must lie in (0, 1]"
        )));
    }
    let kf = k as f64;
    if kf < 1.0 / eps.sqrt() || kf > K33_C * eps.sqrt() * n as f64 {
        return Err(Error::ParameterRangeViolation(format!(
            "need 1/√ε ≤ k ≤ {K33_C}·√ε·n, got k = {k} (range [{:.3}, {:.3}])",
            1.0 / eps.sqrt(),
            K33_C * eps.sqrt() * n as f64
        )));
    }
    let m = n / M_DIVISOR;
    if m < 4 {
        return Err(Error::ParameterRangeViolation(format!(
            "n = {n} gives fewer than 4 strip points"
        )));
    }
    let s = C_SP / n as f64;
    let w = C1 * eps.sqrt() / kf;
    let mf = m as f64;
    let x = |i: usize| (i as f64 - (mf + 1.0) / 2.0) * s;
    let yp = |i: usize| w * (1.0 - (i as f64 - 0.75) / mf) - w / 2.0;

    let strip = (mf - 1.0) * s;
    let lead = s;
    let sigma = strip / 2.0;
    let a = strip / 2.0 + lead + sigma;
    let (b, c, g) = (sigma, 1.6 * sigma, 0.5 * sigma);
    // A1 A2 A3 B1 B2 B3
    let v: [Point2; 6] = [[-a, b], [0.0, -c], [a, b], [-a, -b], [a, -b], [0.0, c]];

    let p_first = [x(1), yp(1)];
    let p_last = [x(m), yp(m)];
    let q_first = [x(1), -yp(1)];
    let q_last = [x(m), -yp(m)];
    // pieces of drawing between fixed points, oriented from the A-vertex
    let pieces: Vec<Vec<Point2>> = vec![
        vec![v[0], v[3]],                          // 0: A1–B1
        vec![v[0], [x(1) - lead, yp(1)], p_first], // 1: A1 → p_1
        vec![p_last, [x(m) + lead, yp(m)], v[4]],  // 2: p_m → B2
        vec![v[0], v[5]],                          // 3: A1–B3
        vec![v[1], v[3]],                          // 4: A2–B1
        vec![v[1], v[4]],                          // 5: A2–B2
        vec![
            v[1],
            [0.0, -c - g],
            [-a - g, -c - g],
            [-a - g, c + g],
            [0.0, c + g],
            v[5],
        ], // 6: A2–B3
        vec![v[2], [x(m) + lead, -yp(m)], q_last], // 7: A3 → q_m
        vec![q_first, [x(1) - lead, -yp(1)], v[3]], // 8: q_1 → B1
        vec![v[2], v[4]],                          // 9: A3–B2
        vec![v[2], v[5]],                          // 10: A3–B3
    ];
    let lengths: Vec<f64> = pieces.iter().map(|p| polyline_length(p)).collect();
    let counts = apportion(&lengths, n - 6 - 2 * m);
    let interior: Vec<Vec<Point2>> = pieces
        .iter()
        .zip(&counts)
        .map(|(p, &c)| sample_interior(p, c))
        .collect();

    let mut drawing: Vec<Point2> = v.to_vec();
    let mut labels: Vec<String> = VERTEX_NAMES.iter().map(|s| s.to_string()).collect();
    let mut edge_of = vec![None; 6];
    let mut edges = Vec::with_capacity(9);
    let (mut p, mut q) = (Vec::new(), Vec::new());
    // (A, B, sequence of segments: Piece(i) or Strip(is_p))
    enum Part {
        Piece(usize),
        P,
        Q,
    }
    let layout: [(usize, usize, Vec<Part>); 9] = [
        (0, 3, vec![Part::Piece(0)]),
        (0, 4, vec![Part::Piece(1), Part::P, Part::Piece(2)]),
        (0, 5, vec![Part::Piece(3)]),
        (1, 3, vec![Part::Piece(4)]),
        (1, 4, vec![Part::Piece(5)]),
        (1, 5, vec![Part::Piece(6)]),
        (2, 3, vec![Part::Piece(7), Part::Q, Part::Piece(8)]),
        (2, 4, vec![Part::Piece(9)]),
        (2, 5, vec![Part::Piece(10)]),
    ];
    for (ei, (ea, eb, parts)) in layout.iter().enumerate() {
        let mut pts = vec![*ea];
        let mut j = 0;
        let mut push = |pt: Point2, label: String, drawing: &mut Vec<Point2>, labels: &mut Vec<String>| {
            drawing.push(pt);
            labels.push(label);
            edge_of.push(Some(ei));
            drawing.len() - 1
        };
        for part in parts {
            match part {
                Part::Piece(i) => {
                    for &pt in &interior[*i] {
                        j += 1;
                        let label = format!("{}{}:{j}", VERTEX_NAMES[*ea], VERTEX_NAMES[*eb]);
                        pts.push(push(pt, label, &mut drawing, &mut labels));
                    }
                }
                Part::P => {
                    for i in 1..=m {
                        let id = push([x(i), yp(i)], format!("p{i}"), &mut drawing, &mut labels);
                        p.push(id);
                        pts.push(id);
                    }
                }
                Part::Q => {
                    for i in (1..=m).rev() {
                        let id = push([x(i), -yp(i)], format!("q{i}"), &mut drawing, &mut labels);
                        q.push(id);
                        pts.push(id);
                    }
                }
            }
        }
        pts.push(*eb);
        edges.push(K33Edge {
            a: *ea,
            b: *eb,
            points: pts,
        });
    }
    q.reverse();
    debug_assert_eq!(drawing.len(), n);

    let mut space = K33Space {
        n,
        k,
        eps,
        w,
        s,
        m,
        drawing,
        labels: labels.clone(),
        p,
        q,
        edges,
        edge_of,
        metric: FiniteMetric::from_fn(0, |_, _| 0.0),
    };
    let rect: Vec<Option<Point2>> = (0..n).map(|i| space.rectangle_coords(i)).collect();
    let is_p: Vec<Option<bool>> = (0..n).map(|i| space.strip_index(i).map(|t| t.1)).collect();
    let drawing = &space.drawing;
    let metric = FiniteMetric::from_fn(n, |i, j| match (is_p[i], is_p[j]) {
        (Some(a), Some(b)) if a != b => {
            let (u, v) = (rect[i].unwrap(), rect[j].unwrap());
            crate::geometry::norm(crate::geometry::sub(u, v))
        }
        _ => crate::geometry::norm(crate::geometry::sub(drawing[i], drawing[j])),
    })
    .with_labels(labels)?;
    metric.validate()?;
    space.metric = metric;
    Ok(space)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceEmbedding {
    pub embedding: EuclideanEmbedding,
    pub report: DistortionReport,
    /// strip indices `≤ cut` keep `p` on top, later ones are swapped;
    /// `None` when the plain drawing was best
    pub cut: Option<usize>,
    /// longest run of strip indices with neither `p_i` nor `q_i` present,
    /// counting the transitions just outside the strip
    pub gap: usize,
    pub polished: bool,
}

/// Longest run of consecutive strip indices absent from `subset`, where the
/// positions just before `1` and just after `m` count as free.
pub fn strip_gap(s: &K33Space, subset: &[usize]) -> usize {
    let mut used = vec![false; s.m + 2];
    for &x in subset {
        if let Some((i, _)) = s.strip_index(x) {
            used[i] = true;
        }
    }
    let mut best = 0;
    let mut run = 0;
    for u in used {
        run = if u { 0 } else { run + 1 };
        best = best.max(run);
    }
    best
}

/// Plane embedding of a subspace: the drawing, except that strip points are
/// placed in the rectangle configuration with the two sides swapping at the
/// cut that distorts least. If the best candidate exceeds `1 + eps` it is
/// polished by local search.
pub fn k33_subspace_embedding(s: &K33Space, subset: &[usize]) -> Result<SubspaceEmbedding> {
    if subset.len() > s.k {
        return Err(Error::ParameterRangeViolation(format!(
            "subset has {} points, more than k = {}",
            subset.len(),
            s.k
        )));
    }
    if let Some(&bad) = subset.iter().find(|&&x| x >= s.n) {
        return Err(Error::ParameterRangeViolation(format!("point {bad} out of range")));
    }
    let gap = strip_gap(s, subset);
    if gap == 0 {
        return Err(Error::NoGapFound);
    }
    let sub = s.metric.subspace(subset);
    let half = s.w / 2.0;
    let place = |cut: Option<usize>| -> EuclideanEmbedding {
        let coords = subset
            .iter()
            .map(|&x| match (cut, s.strip_index(x)) {
                (Some(c), Some((i, is_p))) => {
                    let top = (i <= c) == is_p;
                    vec![s.drawing[x][0], if top { half } else { -half }]
                }
                _ => s.drawing[x].to_vec(),
            })
            .collect();
        EuclideanEmbedding { dim: 2, coords }
    };
    let mut best: Option<(EuclideanEmbedding, DistortionReport, Option<usize>)> = None;
    for cut in std::iter::once(None).chain((0..=s.m).map(Some)) {
        let e = place(cut);
        let r = measured_distortion(&sub, &e);
        if best.as_ref().is_none_or(|b| r.distortion < b.1.distortion) {
            best = Some((e, r, cut));
        }
    }
    let (mut embedding, mut report, cut) = best.unwrap();
    let mut polished = false;
    if report.distortion > 1.0 + s.eps {
        let (e, r) = refine_local_search(&sub, &embedding, POLISH_ITERS, 0);
        if r.distortion < report.distortion {
            embedding = e;
            report = r;
            polished = true;
        }
    }
    Ok(SubspaceEmbedding {
        embedding,
        report,
        cut,
        gap,
        polished,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingCertificate {
    /// lower bound on the distortion; 0 without a disjoint-edge crossing
    pub bound: f64,
    /// the two edges and the segments `(x, y)`, `(x′, y′)` realizing it
    pub edges: Option<(usize, usize)>,
    pub witness: Option<[usize; 4]>,
}

/// Crossing certificate of a planar embedding of all points of `s`.
pub fn crossing_certificate(s: &K33Space, e: &EuclideanEmbedding) -> Result<CrossingCertificate> {
    if e.len() != s.n {
        return Err(Error::IncompleteEmbedding {
            expected: s.n,
            got: e.len(),
        });
    }
    let all: Vec<usize> = (0..s.n).collect();
    crossing_certificate_on(s, &all, e)
}

/// Crossing certificate of a planar embedding of `subset`, where
/// `e.coords[j]` is the image of `subset[j]`. Each edge becomes the polyline
/// through its present points in order; every crossing of two vertex-disjoint
/// edges on segments `(x, y)`, `(x′, y′)` certifies
/// `dist ≥ max ρ(a, b) / (ρ(x, y) + ρ(x′, y′))` over endpoints `a ∈ {x, y}`,
/// `b ∈ {x′, y′}`. The bound is scale invariant.
pub fn crossing_certificate_on(s: &K33Space, subset: &[usize], e: &EuclideanEmbedding) -> Result<CrossingCertificate> {
    if e.len() != subset.len() {
        return Err(Error::IncompleteEmbedding {
            expected: subset.len(),
            got: e.len(),
        });
    }
    if e.dim != 2 {
        return Err(Error::UnsupportedDimension(e.dim));
    }
    let mut slot = vec![None; s.n];
    for (j, &x) in subset.iter().enumerate() {
        slot[x] = Some(j);
    }
    let at = |x: usize| -> Point2 {
        let c = &e.coords[slot[x].unwrap()];
        [c[0], c[1]]
    };
    let segs: Vec<Vec<(usize, usize)>> = s
        .edges
        .iter()
        .map(|ed| {
            let present: Vec<usize> = ed.points.iter().copied().filter(|&x| slot[x].is_some()).collect();
            present.windows(2).map(|w| (w[0], w[1])).collect()
        })
        .collect();
    let rho = |a: usize, b: usize| s.metric.get(a, b);
    let mut cert = CrossingCertificate {
        bound: 0.0,
        edges: None,
        witness: None,
    };
    for i in 0..s.edges.len() {
        for j in (i + 1)..s.edges.len() {
            if !s.edges[i].disjoint(&s.edges[j]) {
                continue;
            }
            for &(x, y) in &segs[i] {
                for &(x2, y2) in &segs[j] {
                    if !segments_intersect(at(x), at(y), at(x2), at(y2)) {
                        continue;
                    }
                    let denom = rho(x, y) + rho(x2, y2);
                    let num = [rho(x, x2), rho(x, y2), rho(y, x2), rho(y, y2)]
                        .into_iter()
                        .fold(0.0, f64::max);
                    let bound = num / denom;
                    if bound > cert.bound {
                        cert = CrossingCertificate {
                            bound,
                            edges: Some((i, j)),
                            witness: Some([x, y, x2, y2]),
                        };
                    }
                }
            }
        }
    }
    Ok(cert)
}

/// `k` distinct points of `s` drawn with a seeded generator.
pub fn random_subset(n: usize, k: usize, seed: u64, sub: u64) -> Vec<usize> {
    let mut r = rng::stream(seed, streams::SUBSET, sub);
    let mut v = rand::seq::index::sample(&mut r, n, k.min(n)).into_vec();
    v.sort_unstable();
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LadderEdgeKind {
    /// weight 1
    Single,
    /// weight `n^{−1/2}`
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    pub kind: LadderEdgeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarLadderSpace {
    pub n: usize,
    pub labels: Vec<String>,
    pub edges: Vec<LadderEdge>,
    /// straight-line planar drawing of the graph
    pub drawing: Vec<Point2>,
    /// the two ladder rails, from B to C
    pub rails: [Vec<usize>; 2],
    pub metric: FiniteMetric,
}

/// Subdivided K₄ on `A, B, C, O` (outer triangle `ABC`, `O` inside) whose
/// paths have `√n` unit edges, a pendant path of `√n` unit edges at each
/// branch vertex, and the side `B–C` replaced by a ladder: two rails of
/// `n/2` edges joined by rungs at every node, all of weight `n^{−1/2}`.
pub fn planar_ladder_space(n: usize) -> Result<PlanarLadderSpace> {
    let r = (n as f64).sqrt().round() as usize;
    if n < 16 || r * r != n {
        return Err(Error::BadSize(format!("n = {n} must be a perfect square ≥ 16")));
    }
    let rf = r as f64;
    let short = 1.0 / rf;
    let half = n / 2;
    let width = rf;
    let mut labels: Vec<String> = ["A", "B", "C", "O"].iter().map(|s| s.to_string()).collect();
    let mut drawing: Vec<Point2> = vec![
        [width / 2.0, width * 3f64.sqrt() / 2.0],
        [0.0, 0.0],
        [width, 0.0],
        [width / 2.0, width * 3f64.sqrt() / 6.0],
    ];
    let mut edges = Vec::new();
    let add_edge = |edges: &mut Vec<LadderEdge>, u, v, kind| {
        let weight = if kind == LadderEdgeKind::Single { 1.0 } else { short };
        edges.push(LadderEdge { u, v, weight, kind });
    };
    let path = |from: usize,
                to_point: Point2,
                to: Option<usize>,
                name: &str,
                drawing: &mut Vec<Point2>,
                labels: &mut Vec<String>,
                edges: &mut Vec<LadderEdge>| {
        let start = drawing[from];
        let mut prev = from;
        let inner = if to.is_some() { r - 1 } else { r };
        for j in 1..=inner {
            let t = j as f64 / r as f64;
            drawing.push([
                start[0] + t * (to_point[0] - start[0]),
                start[1] + t * (to_point[1] - start[1]),
            ]);
            labels.push(format!("{name}:{j}"));
            let id = drawing.len() - 1;
            add_edge(edges, prev, id, LadderEdgeKind::Single);
            prev = id;
        }
        if let Some(t) = to {
            add_edge(edges, prev, t, LadderEdgeKind::Single);
        }
    };
    let (a, b, c, o) = (drawing[0], drawing[1], drawing[2], drawing[3]);
    path(0, b, Some(1), "AB", &mut drawing, &mut labels, &mut edges);
    path(0, c, Some(2), "AC", &mut drawing, &mut labels, &mut edges);
    path(3, a, Some(0), "OA", &mut drawing, &mut labels, &mut edges);
    path(3, b, Some(1), "OB", &mut drawing, &mut labels, &mut edges);
    path(3, c, Some(2), "OC", &mut drawing, &mut labels, &mut edges);
    path(
        0,
        [a[0], a[1] + width],
        None,
        "tA",
        &mut drawing,
        &mut labels,
        &mut edges,
    );
    path(
        1,
        [b[0] - width / 2.0, b[1] - width / 2.0],
        None,
        "tB",
        &mut drawing,
        &mut labels,
        &mut edges,
    );
    path(
        2,
        [c[0] + width / 2.0, c[1] - width / 2.0],
        None,
        "tC",
        &mut drawing,
        &mut labels,
        &mut edges,
    );
    path(3, [o[0], o[1] * 0.3], None, "tO", &mut drawing, &mut labels, &mut edges);

    let cell = width / half as f64;
    let mut top = vec![1];
    for i in 1..half {
        drawing.push([i as f64 * cell, 0.0]);
        labels.push(format!("r1:{i}"));
        top.push(drawing.len() - 1);
    }
    top.push(2);
    let mut bottom = Vec::new();
    for i in 0..=half {
        drawing.push([i as f64 * cell, -cell]);
        labels.push(format!("r2:{i}"));
        bottom.push(drawing.len() - 1);
    }
    for rail in [&top, &bottom] {
        for w in rail.windows(2) {
            add_edge(&mut edges, w[0], w[1], LadderEdgeKind::Double);
        }
    }
    for (&u, &v) in top.iter().zip(&bottom) {
        add_edge(&mut edges, u, v, LadderEdgeKind::Double);
    }
    let wedges: Vec<WeightedEdge> = edges.iter().map(|e| WeightedEdge::new(e.u, e.v, e.weight)).collect();
    let metric = shortest_path_closure(labels.clone(), &wedges, None)?;
    metric.validate()?;
    Ok(PlanarLadderSpace {
        n,
        labels,
        edges,
        drawing,
        rails: [top, bottom],
        metric,
    })
}

impl PlanarLadderSpace {
    pub fn sqrt_n(&self) -> usize {
        (self.n as f64).sqrt().round() as usize
    }

    /// Rail positions left free by [`ladder_subspace`]: a window of `√n`
    /// rungs in the middle of the ladder.
    pub fn gap_window(&self) -> std::ops::Range<usize> {
        let len = self.rails[0].len();
        let r = self.sqrt_n();
        let start = (len - r) / 2;
        start..start + r
    }

    pub fn drawing_embedding(&self) -> EuclideanEmbedding {
        EuclideanEmbedding {
            dim: 2,
            coords: self.drawing.iter().map(|p| p.to_vec()).collect(),
        }
    }
}

/// `√n` seeded points avoiding the rail nodes of the gap window.
pub fn ladder_subspace(s: &PlanarLadderSpace, seed: u64) -> Vec<usize> {
    let window = s.gap_window();
    let banned: std::collections::HashSet<usize> =
        s.rails.iter().flat_map(|r| window.clone().map(move |i| r[i])).collect();
    let pool: Vec<usize> = (0..s.labels.len()).filter(|x| !banned.contains(x)).collect();
    let mut r = rng::stream(seed, streams::SUBSET, 0);
    let mut v: Vec<usize> = rand::seq::index::sample(&mut r, pool.len(), s.sqrt_n())
        .into_iter()
        .map(|i| pool[i])
        .collect();
    v.sort_unstable();
    v
}

/// Plane embedding of a subspace: the planar drawing restricted to the
/// subset, rerouted by local search (the gap leaves the ladder free to
/// stretch), keeping the better of the two.
pub fn ladder_subspace_embedding(s: &PlanarLadderSpace, subset: &[usize]) -> (EuclideanEmbedding, DistortionReport) {
    let sub = s.metric.subspace(subset);
    let init = s.drawing_embedding().subset(subset);
    refine_local_search(&sub, &init, POLISH_ITERS, 0)
}
