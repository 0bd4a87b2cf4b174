//! Ordering constraint instances and the spaces built from them: the
//! betweenness → non-betweenness conversion, exhaustive consistency, the
//! layered sphere space with punctures and glued paths, its embedding for a
//! consistent ordering, and the branching graph of 2- and 3-subsets.
//!
//! Elements are numbered `1..=n` throughout, as in the instance files;
//! orderings are sequences of elements, smallest first.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadget::{epsilon_dense_sphere, SphereNet};
use crate::geometry::Point2;
use crate::line::for_each_permutation;
use crate::metric::{euclidean, EuclideanEmbedding, FiniteMetric};
use crate::rng::{self, streams};
use crate::topology::{nesting_order, ClosedPolyline};

/// Largest instance accepted by the exhaustive consistency check.
pub const MAX_CONSISTENCY: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semantics {
    /// `(i, j, k)`: `i` lies strictly between `j` and `k`.
    Betweenness,
    /// `(i, j, k)`: `i` does not lie between `j` and `k`.
    NonBetweenness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetweennessInstance {
    pub n: usize,
    pub semantics: Semantics,
    pub triples: Vec<[usize; 3]>,
}

impl BetweennessInstance {
    pub fn new(n: usize, semantics: Semantics, triples: Vec<[usize; 3]>) -> Result<Self> {
        let inst = Self { n, semantics, triples };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.triples {
            let in_range = t.iter().all(|&x| (1..=self.n).contains(&x));
            if !in_range || t[0] == t[1] || t[0] == t[2] || t[1] == t[2] {
                return Err(Error::BadTriple(*t));
            }
        }
        Ok(())
    }

    /// Number of distinct unordered triples, i.e. loci of the layered space.
    pub fn locus_count(&self) -> usize {
        let sets: BTreeSet<[usize; 3]> = self
            .triples
            .iter()
            .map(|t| {
                let mut s = *t;
                s.sort_unstable();
                s
            })
            .collect();
        sets.len()
    }

    /// Whether `ordering` (a sequence of all elements) satisfies `triple`.
    pub fn satisfies(&self, ordering: &[usize], triple: [usize; 3]) -> bool {
        let mut pos = vec![0usize; self.n + 1];
        for (k, &e) in ordering.iter().enumerate() {
            pos[e] = k;
        }
        satisfied(self.semantics, &pos, triple)
    }

    /// First triple violated by `ordering`, if any.
    pub fn first_violation(&self, ordering: &[usize]) -> Option<[usize; 3]> {
        let mut pos = vec![0usize; self.n + 1];
        for (k, &e) in ordering.iter().enumerate() {
            pos[e] = k;
        }
        self.triples
            .iter()
            .copied()
            .find(|&t| !satisfied(self.semantics, &pos, t))
    }
}

fn satisfied(sem: Semantics, pos: &[usize], [i, j, k]: [usize; 3]) -> bool {
    let between = (pos[j] < pos[i] && pos[i] < pos[k]) || (pos[k] < pos[i] && pos[i] < pos[j]);
    match sem {
        Semantics::Betweenness => between,
        Semantics::NonBetweenness => !between,
    }
}

/// Replaces each betweenness constraint `(i, j, k)` by the two
/// non-betweenness constraints `(j, i, k)` and `(k, i, j)`.
pub fn to_non_betweenness(t: &BetweennessInstance) -> Result<BetweennessInstance> {
    if t.semantics != Semantics::Betweenness {
        return Err(Error::WrongSemantics("non-betweenness"));
    }
    t.validate()?;
    let triples = t.triples.iter().flat_map(|&[i, j, k]| [[j, i, k], [k, i, j]]).collect();
    Ok(BetweennessInstance {
        n: t.n,
        semantics: Semantics::NonBetweenness,
        triples,
    })
}

/// Lexicographically least consistent ordering, by exhaustive search.
pub fn consistency_check(t: &BetweennessInstance) -> Result<Option<Vec<usize>>> {
    t.validate()?;
    if t.n > MAX_CONSISTENCY {
        return Err(Error::TooLarge(format!("{} elements, limit {MAX_CONSISTENCY}", t.n)));
    }
    let mut found = None;
    let mut pos = vec![0usize; t.n + 1];
    for_each_permutation(t.n, |perm| {
        if found.is_some() {
            return;
        }
        for (k, &e) in perm.iter().enumerate() {
            pos[e + 1] = k;
        }
        if t.triples.iter().all(|&tr| satisfied(t.semantics, &pos, tr)) {
            found = Some(perm.iter().map(|e| e + 1).collect());
        }
    });
    Ok(found)
}

/// Seeded instance with `m` distinct-entry triples over `n` elements.
pub fn random_instance(n: usize, m: usize, semantics: Semantics, rng: &mut impl Rng) -> BetweennessInstance {
    let triples = (0..m)
        .map(|_| {
            let i = rng.random_range(1..=n);
            let mut j = rng.random_range(1..=n);
            while j == i {
                j = rng.random_range(1..=n);
            }
            let mut k = rng.random_range(1..=n);
            while k == i || k == j {
                k = rng.random_range(1..=n);
            }
            [i, j, k]
        })
        .collect();
    BetweennessInstance { n, semantics, triples }
}

/// Parameters of the layered puncture space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayeredParams {
    pub dim: usize,
    /// Distortion bound the construction targets.
    pub d_bound: f64,
    pub epsilon: f64,
    /// Path edge count `t = ⌊1/ε⌋`.
    pub t: usize,
    pub radius: f64,
    /// Minimum distance between loci of different unordered triples.
    pub separation: f64,
}

impl LayeredParams {
    pub fn new(dim: usize, d_bound: f64, epsilon: f64, radius: f64, separation: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0 && d_bound >= 1.0 && radius > 0.0) {
            return Err(Error::DegenerateParameters(format!(
                "need 0 < ε ≤ 1, D ≥ 1, R > 0; got ε = {epsilon}, D = {d_bound}, R = {radius}"
            )));
        }
        Ok(Self {
            dim,
            d_bound,
            epsilon,
            t: (1.0 / epsilon).floor() as usize,
            radius,
            separation,
        })
    }

    /// Default separation `8·(1 + D·ε)·D`.
    pub fn default_separation(d_bound: f64, epsilon: f64) -> f64 {
        8.0 * (1.0 + d_bound * epsilon) * d_bound
    }

    /// Desk-scale parameters: `ε = 1/(4D)` (so `2Dε = 1/2 < 1`), default
    /// separation, and the smallest radius (in steps of 5%) on which
    /// farthest-point traversal (started from `seed`) places `loci` loci that
    /// far apart.
    pub fn desk(dim: usize, d_bound: f64, loci: usize, seed: u64) -> Result<Self> {
        let epsilon = 1.0 / (4.0 * d_bound);
        let sep = Self::default_separation(d_bound, epsilon);
        let mut radius = if dim == 2 && loci >= 2 {
            sep / (2.0 * (std::f64::consts::PI / loci as f64).sin())
        } else {
            sep / 2.0
        }
        .max(2.0);
        for _ in 0..200 {
            let net = epsilon_dense_sphere(dim, radius, epsilon)?;
            if farthest_point_loci(&net, loci, seed).1 >= sep {
                return Self::new(dim, d_bound, epsilon, radius, sep);
            }
            radius *= 1.05;
        }
        Err(Error::LociTooCrowded(sep))
    }
}

/// Farthest-point traversal from a seeded start: net indices and the
/// smallest pairwise distance among them.
fn farthest_point_loci(net: &SphereNet, count: usize, seed: u64) -> (Vec<usize>, f64) {
    if count == 0 {
        return (vec![], f64::INFINITY);
    }
    let mut rng = rng::stream(seed, streams::LOCI, 0);
    let first = rng.random_range(0..net.len());
    let mut chosen = vec![first];
    let mut nearest: Vec<f64> = net.points.iter().map(|p| euclidean(p, &net.points[first])).collect();
    let mut min_sep = f64::INFINITY;
    while chosen.len() < count {
        let (best, d) =
            nearest.iter().copied().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, d)| if d > acc.1 { (i, d) } else { acc },
            );
        min_sep = min_sep.min(d);
        chosen.push(best);
        for (i, p) in net.points.iter().enumerate() {
            nearest[i] = nearest[i].min(euclidean(p, &net.points[best]));
        }
    }
    (chosen, min_sep)
}

/// Origin of a point of the layered space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointTag {
    /// `layer` is an element in `1..=n`.
    Layer { layer: usize, net_index: usize },
    /// Interior vertex `step ∈ 1..t` of the path glued for triple `path`.
    Path { path: usize, step: usize },
}

/// The glued path of one triple: endpoints are point indices of the layer
/// points `(j, v)` and `(k, v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluedPath {
    pub triple: [usize; 3],
    pub locus: usize,
    pub start: usize,
    pub end: usize,
    /// Point indices of the interior vertices `p_1 … p_{t−1}`.
    pub interior: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayeredSpace {
    pub instance: BetweennessInstance,
    pub params: LayeredParams,
    pub net: SphereNet,
    /// Net index of the locus of each triple.
    pub loci: Vec<usize>,
    /// Layer points first (by layer, then net index), then path interiors.
    pub points: Vec<PointTag>,
    pub paths: Vec<GluedPath>,
    pub metric: FiniteMetric,
    /// Number of layer points (a prefix of `points`).
    pub layer_points: usize,
}

/// Largest space whose full metric is materialized.
pub const MAX_SECTION5_POINTS: usize = 6000;

/// Builds the layered space for a non-betweenness instance.
///
/// Layers `{ℓ} × V` carry `‖v − v′‖ + [ℓ ≠ ℓ′]`. Each triple `(i, j, k)` gets
/// a locus `v`; layers outside `{i, j, k}` lose the points within 1 of `v`,
/// and a path of `t` edges of length `1/t` joins `(j, v)` to `(k, v)`. The
/// metric is the shortest-path closure, evaluated in closed form: layer
/// distances are unchanged by gluing (every path is exactly as long as the
/// base distance between its endpoints), and a path vertex reaches anything
/// else through one of its two endpoints.
pub fn layered_space(t: &BetweennessInstance, params: &LayeredParams, seed: u64) -> Result<LayeredSpace> {
    if t.semantics != Semantics::NonBetweenness {
        return Err(Error::WrongSemantics("betweenness"));
    }
    t.validate()?;
    let net = epsilon_dense_sphere(params.dim, params.radius, params.epsilon)?;
    let nv = net.len();

    // one locus per unordered triple; repeats take the next net points
    let mut groups: BTreeMap<[usize; 3], Vec<usize>> = BTreeMap::new();
    for (idx, tr) in t.triples.iter().enumerate() {
        let mut key = *tr;
        key.sort_unstable();
        groups.entry(key).or_default().push(idx);
    }
    let group_list: Vec<Vec<usize>> = {
        // keep first-appearance order of triples for determinism
        let mut seen: Vec<([usize; 3], Vec<usize>)> = groups.into_iter().collect();
        seen.sort_by_key(|(_, members)| members[0]);
        seen.into_iter().map(|(_, m)| m).collect()
    };
    let (centres, sep) = farthest_point_loci(&net, group_list.len(), seed);
    if group_list.len() >= 2 && sep < params.separation {
        return Err(Error::LociTooCrowded(params.separation));
    }
    let mut loci = vec![0usize; t.triples.len()];
    for (g, members) in group_list.iter().enumerate() {
        for (off, &idx) in members.iter().enumerate() {
            loci[idx] = (centres[g] + off) % nv;
        }
    }

    // punctures
    let mut removed = vec![vec![false; nv]; t.n];
    for (tr, &v) in t.triples.iter().zip(&loci) {
        for layer in 1..=t.n {
            if tr.contains(&layer) {
                continue;
            }
            for (u, p) in net.points.iter().enumerate() {
                if euclidean(p, &net.points[v]) <= 1.0 {
                    removed[layer - 1][u] = true;
                }
            }
        }
    }
    let mut points = Vec::new();
    let mut index_of = vec![vec![usize::MAX; nv]; t.n];
    for layer in 1..=t.n {
        for u in 0..nv {
            if !removed[layer - 1][u] {
                index_of[layer - 1][u] = points.len();
                points.push(PointTag::Layer { layer, net_index: u });
            }
        }
    }
    let layer_points = points.len();
    let mut paths = Vec::new();
    for (p, (tr, &v)) in t.triples.iter().zip(&loci).enumerate() {
        let start = index_of[tr[1] - 1][v];
        let end = index_of[tr[2] - 1][v];
        debug_assert!(start != usize::MAX && end != usize::MAX);
        let interior = (1..params.t)
            .map(|step| {
                points.push(PointTag::Path { path: p, step });
                points.len() - 1
            })
            .collect();
        paths.push(GluedPath {
            triple: *tr,
            locus: v,
            start,
            end,
            interior,
        });
    }
    if points.len() > MAX_SECTION5_POINTS {
        return Err(Error::TooLarge(format!(
            "{} points, limit {MAX_SECTION5_POINTS}",
            points.len()
        )));
    }

    let layer_dist = |a: usize, b: usize| -> f64 {
        match (points[a], points[b]) {
            (
                PointTag::Layer {
                    layer: la,
                    net_index: u,
                },
                PointTag::Layer {
                    layer: lb,
                    net_index: w,
                },
            ) => euclidean(&net.points[u], &net.points[w]) + if la == lb { 0.0 } else { 1.0 },
            _ => unreachable!(),
        }
    };
    let step_len = 1.0 / params.t as f64;
    // (path, step) of every point; step 0 / t are the endpoints
    let ends = |tag: PointTag| -> Option<(usize, f64)> {
        match tag {
            PointTag::Path { path, step } => Some((path, step as f64 * step_len)),
            PointTag::Layer { .. } => None,
        }
    };
    let n_pts = points.len();
    let metric = FiniteMetric::from_fn(n_pts, |a, b| match (ends(points[a]), ends(points[b])) {
        (None, None) => layer_dist(a, b),
        (Some((p, s)), None) | (None, Some((p, s))) => {
            let y = if ends(points[a]).is_none() { a } else { b };
            let path = &paths[p];
            (s + layer_dist(path.start, y)).min(1.0 - s + layer_dist(path.end, y))
        }
        (Some((p, s)), Some((q, r))) => {
            let (pp, pq) = (&paths[p], &paths[q]);
            let mut best = f64::INFINITY;
            if p == q {
                best = (s - r).abs();
            }
            for (e, de) in [(pp.start, s), (pp.end, 1.0 - s)] {
                for (f, df) in [(pq.start, r), (pq.end, 1.0 - r)] {
                    best = best.min(de + layer_dist(e, f) + df);
                }
            }
            best
        }
    });
    let labels = points
        .iter()
        .map(|tag| match *tag {
            PointTag::Layer { layer, net_index } => format!("{layer}#{net_index}"),
            PointTag::Path { path, step } => format!("p{path}:{step}"),
        })
        .collect();
    let metric = metric.with_labels(labels)?;
    Ok(LayeredSpace {
        instance: t.clone(),
        params: *params,
        net,
        loci,
        points,
        paths,
        metric,
        layer_points,
    })
}

impl LayeredSpace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point indices of a layer, in net order.
    pub fn layer_indices(&self, layer: usize) -> Vec<usize> {
        (0..self.layer_points)
            .filter(|&i| matches!(self.points[i], PointTag::Layer { layer: l, .. } if l == layer))
            .collect()
    }

    /// Edges of the glued paths, as consecutive point indices.
    pub fn path_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in &self.paths {
            let mut seq = vec![p.start];
            seq.extend(&p.interior);
            seq.push(p.end);
            out.extend(seq.windows(2).map(|w| (w[0], w[1])));
        }
        out
    }
}

/// Embedding for a consistent ordering: the layer at position `i` (0-based)
/// goes isometrically to the sphere of radius `R + i`, and each path runs
/// radially from `(j, v)` to `(k, v)` through the punctures of the layers
/// in between.
pub fn layered_embedding(s: &LayeredSpace, ordering: &[usize]) -> Result<EuclideanEmbedding> {
    let n = s.instance.n;
    let mut sorted = ordering.to_vec();
    sorted.sort_unstable();
    if sorted != (1..=n).collect::<Vec<_>>() {
        return Err(Error::DegenerateParameters(format!(
            "ordering must be a permutation of 1..={n}"
        )));
    }
    if let Some(tr) = s.instance.first_violation(ordering) {
        return Err(Error::InconsistentOrdering(tr));
    }
    let mut pos = vec![0usize; n + 1];
    for (k, &e) in ordering.iter().enumerate() {
        pos[e] = k;
    }
    let r = s.params.radius;
    let radial = |u: usize, rad: f64| -> Vec<f64> { s.net.points[u].iter().map(|x| x * rad / r).collect() };
    let coords = s
        .points
        .iter()
        .map(|tag| match *tag {
            PointTag::Layer { layer, net_index } => radial(net_index, r + pos[layer] as f64),
            PointTag::Path { path, step } => {
                let p = &s.paths[path];
                let (a, b) = (pos[p.triple[1]] as f64, pos[p.triple[2]] as f64);
                let f = step as f64 / s.params.t as f64;
                radial(p.locus, r + a + f * (b - a))
            }
        })
        .collect();
    Ok(EuclideanEmbedding::new(s.params.dim, coords)?)
}

/// Recovers an ordering from a planar embedding of the layered space: each
/// layer's surviving points, in net order, form a closed polyline; the
/// nesting order of these curves read innermost first is the ordering.
pub fn extract_ordering_2d(s: &LayeredSpace, e: &EuclideanEmbedding, h: f64) -> Result<Vec<usize>> {
    if e.dim != 2 {
        return Err(Error::UnsupportedDimension(e.dim));
    }
    let curves = (1..=s.instance.n)
        .map(|layer| {
            let verts: Vec<Point2> = s
                .layer_indices(layer)
                .into_iter()
                .map(|i| [e.coords[i][0], e.coords[i][1]])
                .collect();
            ClosedPolyline::new(verts)
        })
        .collect::<Result<Vec<_>>>()?;
    let nest = nesting_order(&curves, h)?;
    Ok(nest.order.iter().rev().map(|&c| c + 1).collect())
}

/// Graph on the 2- and 3-subsets of `[n]` with an edge from each pair to
/// each triple containing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchingGraph {
    pub n: usize,
    /// Sorted subsets (elements in `1..=n`): all pairs, then all triples.
    pub vertices: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
    /// `subgraphs[i − 1]`: vertex indices of the subsets containing `i`.
    pub subgraphs: Vec<Vec<usize>>,
}

impl BranchingGraph {
    /// Index of the triple vertex `{i, j, k}`.
    pub fn triple_vertex(&self, i: usize, j: usize, k: usize) -> Option<usize> {
        let mut key = vec![i, j, k];
        key.sort_unstable();
        self.vertices.iter().position(|v| *v == key)
    }

    fn induced_connected(&self, verts: &[usize]) -> bool {
        if verts.is_empty() {
            return false;
        }
        let mut inside = vec![false; self.vertices.len()];
        for &v in verts {
            inside[v] = true;
        }
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            if inside[a] && inside[b] {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([verts[0]]);
        seen[verts[0]] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == verts.len()
    }

    /// Checks the four structural properties; returns the first failure.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let n = self.n;
        for i in 1..=n {
            if !self.induced_connected(&self.subgraphs[i - 1]) {
                return Err(format!("G_{i} is disconnected"));
            }
            for j in (i + 1)..=n {
                let common: Vec<usize> = self.subgraphs[i - 1]
                    .iter()
                    .copied()
                    .filter(|v| self.subgraphs[j - 1].contains(v))
                    .collect();
                if !self.induced_connected(&common) {
                    return Err(format!("G_{i} ∩ G_{j} is disconnected"));
                }
            }
        }
        for v in 0..self.vertices.len() {
            let m = self.subgraphs.iter().filter(|g| g.contains(&v)).count();
            if m > 3 {
                return Err(format!("vertex {:?} lies in {m} subgraphs", self.vertices[v]));
            }
        }
        for i in 1..=n {
            for j in (i + 1)..=n {
                for k in (j + 1)..=n {
                    if self.triple_vertex(i, j, k).is_none() {
                        return Err(format!("no vertex for {{{i}, {j}, {k}}}"));
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn branching_graph(n: usize) -> Result<BranchingGraph> {
    if n < 3 {
        return Err(Error::TooSmall { min: 3, got: n });
    }
    let mut vertices = Vec::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            vertices.push(vec![i, j]);
        }
    }
    let pairs = vertices.len();
    for i in 1..=n {
        for j in (i + 1)..=n {
            for k in (j + 1)..=n {
                vertices.push(vec![i, j, k]);
            }
        }
    }
    let mut edges = Vec::new();
    for t in pairs..vertices.len() {
        for p in 0..pairs {
            if vertices[p].iter().all(|x| vertices[t].contains(x)) {
                edges.push((p, t));
            }
        }
    }
    let subgraphs = (1..=n)
        .map(|i| (0..vertices.len()).filter(|&v| vertices[v].contains(&i)).collect())
        .collect();
    let g = BranchingGraph {
        n,
        vertices,
        edges,
        subgraphs,
    };
    g.verify().map_err(Error::NotTotallyOrdered)?;
    Ok(g)
}
