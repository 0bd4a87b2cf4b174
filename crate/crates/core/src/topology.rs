//! Planar topology of closed curves: piecewise-linear extension of maps on
//! circle nets, hole detection by rasterization and flood fill, the nesting
//! order of disjoint curves, and the slack and narrow-holes checks.

use std::collections::{HashMap, HashSet, VecDeque};
use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadget::SphereNet;
use crate::geometry::{dist2, point_in_polygon, point_segment_distance, segments_intersect, winding_number, Point2};
use crate::rng::{self, streams};

/// Default grid pitch as a fraction of the curve diameter.
pub const DEFAULT_PITCH_FRACTION: f64 = 1.0 / 512.0;

/// Image of a circle under a map defined on a net, extended affinely on
/// each arc between consecutive net points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedPolyline {
    pub vertices: Vec<Point2>,
    /// Net points in circular order (the parametrizing circle), when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter_net: Option<SphereNet>,
}

impl ClosedPolyline {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateParameters(format!(
                "closed polyline needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        let n = vertices.len();
        if let Some(i) = (0..n).find(|&i| vertices[i] == vertices[(i + 1) % n]) {
            return Err(Error::DegenerateParameters(format!(
                "consecutive duplicate vertices at {i}"
            )));
        }
        if vertices.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
            return Err(Error::DegenerateParameters("non-finite vertex".into()));
        }
        Ok(Self {
            vertices,
            parameter_net: None,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn bbox(&self) -> (Point2, Point2) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Diameter of the vertex set, estimated by the bounding-box diagonal.
    pub fn extent(&self) -> f64 {
        let (lo, hi) = self.bbox();
        dist2(lo, hi)
    }

    pub fn default_pitch(&self) -> f64 {
        self.extent() * DEFAULT_PITCH_FRACTION
    }

    pub fn segment(&self, i: usize) -> (Point2, Point2) {
        (self.vertices[i], self.vertices[(i + 1) % self.len()])
    }

    /// Distance from `p` to the curve.
    pub fn distance_to(&self, p: Point2) -> f64 {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.segment(i);
                point_segment_distance(p, a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| [v[0] * factor, v[1] * factor]).collect(),
            parameter_net: self.parameter_net.clone(),
        }
    }
}

/// Lipschitz constants of a PL extension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlLipschitz {
    /// Largest `‖g(u) − g(v)‖ / ‖u − v‖` over consecutive net points.
    pub edge: f64,
    /// Largest ratio over all pairs of net points and arc midpoints, the
    /// measured Lipschitz constant of the extension on the circle.
    pub measured: f64,
}

/// Sample-set cap for the all-pairs Lipschitz measurement.
const LIPSCHITZ_PAIRS_LIMIT: usize = 2400;

/// Connects `images` in the circular order of the planar `net`.
pub fn pl_extension(net: &SphereNet, images: &[Point2]) -> Result<(ClosedPolyline, PlLipschitz)> {
    if net.dim != 2 {
        return Err(Error::UnsupportedDimension(net.dim));
    }
    if images.len() != net.len() {
        return Err(crate::metric::MetricError::SizeMismatch {
            expected: net.len(),
            got: images.len(),
        }
        .into());
    }
    let mut curve = ClosedPolyline::new(images.to_vec())?;
    curve.parameter_net = Some(net.clone());
    let n = net.len();
    let p = |k: usize| [net.points[k][0], net.points[k][1]];
    let edge = (0..n)
        .map(|k| dist2(images[k], images[(k + 1) % n]) / dist2(p(k), p((k + 1) % n)))
        .fold(0.0, f64::max);
    let measured = if 2 * n <= LIPSCHITZ_PAIRS_LIMIT {
        let mut dom = Vec::with_capacity(2 * n);
        let mut img = Vec::with_capacity(2 * n);
        for k in 0..n {
            dom.push(p(k));
            img.push(images[k]);
            let (x, y) = arc_point(net, k, 0.5);
            dom.push(x);
            img.push(lerp(images[k], images[(k + 1) % n], y));
        }
        let mut best: f64 = 0.0;
        for i in 0..dom.len() {
            for j in (i + 1)..dom.len() {
                best = best.max(dist2(img[i], img[j]) / dist2(dom[i], dom[j]));
            }
        }
        best
    } else {
        edge
    };
    Ok((curve, PlLipschitz { edge, measured }))
}

fn lerp(a: Point2, b: Point2, t: f64) -> Point2 {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

fn angle_of(p: &[f64]) -> f64 {
    p[1].atan2(p[0]).rem_euclid(TAU)
}

/// Point on the circle a fraction `t` of the way along the arc from net
/// point `k` to `k + 1`, with the interpolation weight for the images.
fn arc_point(net: &SphereNet, k: usize, t: f64) -> (Point2, f64) {
    let n = net.len();
    let a = angle_of(&net.points[k]);
    let mut b = angle_of(&net.points[(k + 1) % n]);
    if b <= a {
        b += TAU;
    }
    let th = a + t * (b - a);
    ([net.radius * th.cos(), net.radius * th.sin()], t)
}

/// Rasterized curve: cells meeting a segment are boundary; the rest is split
/// into 4-connected components, component 0 being the unbounded one.
pub struct Raster {
    pub pitch: f64,
    origin: Point2,
    width: usize,
    height: usize,
    /// `u32::MAX` marks boundary cells.
    labels: Vec<u32>,
    pub components: u32,
}

const BOUNDARY: u32 = u32::MAX;
const UNSET: u32 = u32::MAX - 1;

impl Raster {
    pub fn new(curve: &ClosedPolyline, h: f64) -> Result<Self> {
        let (lo, hi) = curve.bbox();
        if !(h > 0.0) {
            return Err(Error::DegenerateParameters(format!("grid pitch {h}")));
        }
        if (hi[0] - lo[0]).max(hi[1] - lo[1]) < h {
            return Err(Error::DegenerateCurve);
        }
        let pad = 2.0 * h;
        let origin = [lo[0] - pad, lo[1] - pad];
        let width = ((hi[0] - lo[0] + 2.0 * pad) / h).ceil() as usize + 1;
        let height = ((hi[1] - lo[1] + 2.0 * pad) / h).ceil() as usize + 1;
        if width.saturating_mul(height) > 400_000_000 {
            return Err(Error::TooLarge(format!("raster of {width}×{height} cells")));
        }
        let mut r = Self {
            pitch: h,
            origin,
            width,
            height,
            labels: vec![UNSET; width * height],
            components: 0,
        };
        for i in 0..curve.len() {
            let (a, b) = curve.segment(i);
            r.mark_segment(a, b);
        }
        r.label_components();
        Ok(r)
    }

    fn cell_of(&self, p: Point2) -> (usize, usize) {
        let x = ((p[0] - self.origin[0]) / self.pitch).floor() as isize;
        let y = ((p[1] - self.origin[1]) / self.pitch).floor() as isize;
        (
            x.clamp(0, self.width as isize - 1) as usize,
            y.clamp(0, self.height as isize - 1) as usize,
        )
    }

    pub fn cell_center(&self, x: usize, y: usize) -> Point2 {
        [
            self.origin[0] + (x as f64 + 0.5) * self.pitch,
            self.origin[1] + (y as f64 + 0.5) * self.pitch,
        ]
    }

    /// Marks every cell whose closed square meets segment `ab`.
    fn mark_segment(&mut self, a: Point2, b: Point2) {
        let (x0, y0) = self.cell_of([a[0].min(b[0]), a[1].min(b[1])]);
        let (x1, y1) = self.cell_of([a[0].max(b[0]), a[1].max(b[1])]);
        let x0 = x0.saturating_sub(1);
        let y0 = y0.saturating_sub(1);
        let x1 = (x1 + 1).min(self.width - 1);
        let y1 = (y1 + 1).min(self.height - 1);
        for y in y0..=y1 {
            for x in x0..=x1 {
                // a hair of slack so segments on a shared cell edge never
                // slip between both neighbours through rounding
                let slack = 1e-9 * self.pitch;
                let lo = [
                    self.origin[0] + x as f64 * self.pitch - slack,
                    self.origin[1] + y as f64 * self.pitch - slack,
                ];
                let hi = [lo[0] + self.pitch + 2.0 * slack, lo[1] + self.pitch + 2.0 * slack];
                if segment_meets_box(a, b, lo, hi) {
                    self.labels[y * self.width + x] = BOUNDARY;
                }
            }
        }
    }

    fn label_components(&mut self) {
        let mut queue = VecDeque::new();
        let mut next = 0u32;
        // the padded corner cell is outside the curve's bounding box
        for start in std::iter::once(0).chain(0..self.labels.len()) {
            if self.labels[start] != UNSET {
                continue;
            }
            self.labels[start] = next;
            queue.push_back(start);
            while let Some(c) = queue.pop_front() {
                let (x, y) = (c % self.width, c / self.width);
                let mut push = |nc: usize, labels: &mut Vec<u32>| {
                    if labels[nc] == UNSET {
                        labels[nc] = next;
                        queue.push_back(nc);
                    }
                };
                if x > 0 {
                    push(c - 1, &mut self.labels);
                }
                if x + 1 < self.width {
                    push(c + 1, &mut self.labels);
                }
                if y > 0 {
                    push(c - self.width, &mut self.labels);
                }
                if y + 1 < self.height {
                    push(c + self.width, &mut self.labels);
                }
            }
            next += 1;
        }
        self.components = next;
    }

    /// Component label at `p` (`None` on boundary cells); 0 is unbounded.
    pub fn component_at(&self, p: Point2) -> Option<u32> {
        let inside_grid = p[0] >= self.origin[0]
            && p[1] >= self.origin[1]
            && p[0] < self.origin[0] + self.width as f64 * self.pitch
            && p[1] < self.origin[1] + self.height as f64 * self.pitch;
        if !inside_grid {
            return Some(0);
        }
        let (x, y) = self.cell_of(p);
        match self.labels[y * self.width + x] {
            BOUNDARY => None,
            l => Some(l),
        }
    }

    /// Squared Euclidean distance transform (in cells²) to the nearest
    /// boundary cell centre.
    fn distance_transform(&self) -> Vec<f64> {
        let (w, h) = (self.width, self.height);
        let mut d: Vec<f64> = self
            .labels
            .iter()
            .map(|&l| if l == BOUNDARY { 0.0 } else { f64::INFINITY })
            .collect();
        let mut buf = vec![0.0; w.max(h)];
        let mut out = vec![0.0; w.max(h)];
        for y in 0..h {
            buf[..w].copy_from_slice(&d[y * w..(y + 1) * w]);
            edt_1d(&buf[..w], &mut out[..w]);
            d[y * w..(y + 1) * w].copy_from_slice(&out[..w]);
        }
        for x in 0..w {
            for y in 0..h {
                buf[y] = d[y * w + x];
            }
            edt_1d(&buf[..h], &mut out[..h]);
            for y in 0..h {
                d[y * w + x] = out[y];
            }
        }
        d
    }
}

/// One-dimensional squared distance transform of a sampled function
/// (lower envelope of parabolas).
fn edt_1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    let first = f.iter().position(|x| x.is_finite());
    let Some(first) = first else {
        out.fill(f64::INFINITY);
        return;
    };
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in (first + 1)..n {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            // z[0] = −∞, so k never underflows
            if s <= z[k] {
                k -= 1;
                continue;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        *o = dq * dq + f[p];
    }
}

/// Liang–Barsky test of a segment against a closed axis-aligned box.
fn segment_meets_box(a: Point2, b: Point2, lo: Point2, hi: Point2) -> bool {
    let d = [b[0] - a[0], b[1] - a[1]];
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for k in 0..2 {
        if d[k] == 0.0 {
            if a[k] < lo[k] || a[k] > hi[k] {
                return false;
            }
        } else {
            let mut ta = (lo[k] - a[k]) / d[k];
            let mut tb = (hi[k] - a[k]) / d[k];
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// A bounded complementary component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hole {
    pub cell_count: usize,
    pub inradius_estimate: f64,
    pub representative_point: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleReport {
    pub grid_pitch: f64,
    pub holes: Vec<Hole>,
    pub unbounded_component_id: u32,
}

/// Holes of a closed curve, ordered by their first cell in row-major order.
///
/// The inradius of a hole is estimated at the hole cell whose centre is
/// farthest (by the grid distance transform) from the boundary cells, as the
/// exact distance from that centre to the curve; the estimate is within
/// `2h` of the true inradius.
pub fn compute_holes(curve: &ClosedPolyline, h: f64) -> Result<HoleReport> {
    let raster = Raster::new(curve, h)?;
    let dt = raster.distance_transform();
    let nh = raster.components.saturating_sub(1) as usize;
    let mut count = vec![0usize; nh];
    let mut best = vec![(f64::NEG_INFINITY, 0usize); nh];
    for (c, &l) in raster.labels.iter().enumerate() {
        if l == BOUNDARY || l == 0 {
            continue;
        }
        let k = (l - 1) as usize;
        count[k] += 1;
        if dt[c] > best[k].0 {
            best[k] = (dt[c], c);
        }
    }
    let holes = (0..nh)
        .map(|k| {
            let c = best[k].1;
            let p = raster.cell_center(c % raster.width, c / raster.width);
            Hole {
                cell_count: count[k],
                inradius_estimate: curve.distance_to(p),
                representative_point: p,
            }
        })
        .collect();
    Ok(HoleReport {
        grid_pitch: h,
        holes,
        unbounded_component_id: 0,
    })
}

/// Outcome of [`nesting_order`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nesting {
    /// Curve indices, outermost first.
    pub order: Vec<usize>,
    /// Number of containment tests on which winding number and flood fill agreed.
    pub agreements: usize,
}

/// Pairs `(i, j)`, `i < j`, of curves that intersect, and pairs with
/// vertices within `r` of each other. All segments are bucketed into one
/// grid whose cells are at least `r` and the longest segment wide, so only
/// cells whose neighbourhood holds two curves need a closer look.
fn curve_conflicts(curves: &[ClosedPolyline], r: f64) -> (HashSet<(usize, usize)>, HashSet<(usize, usize)>) {
    let mut crossing = HashSet::new();
    let mut near = HashSet::new();
    let longest = curves
        .iter()
        .flat_map(|c| (0..c.len()).map(move |k| c.segment(k)))
        .map(|(a, b)| dist2(a, b))
        .fold(0.0, f64::max);
    let cell = r.max(longest).max(f64::MIN_POSITIVE);
    let key = |p: Point2| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
    // cell → (curve, segment) entries; a segment sits in every cell its box meets
    let mut buckets: HashMap<(i64, i64), Vec<(usize, usize)>> = HashMap::new();
    for (ci, c) in curves.iter().enumerate() {
        for k in 0..c.len() {
            let (a, b) = c.segment(k);
            let (ka, kb) = (key(a), key(b));
            for x in ka.0.min(kb.0)..=ka.0.max(kb.0) {
                for y in ka.1.min(kb.1)..=ka.1.max(kb.1) {
                    buckets.entry((x, y)).or_default().push((ci, k));
                }
            }
        }
    }
    let single: HashMap<(i64, i64), Option<usize>> = buckets
        .iter()
        .map(|(&k, v)| (k, v.iter().all(|e| e.0 == v[0].0).then_some(v[0].0)))
        .collect();
    for (&(kx, ky), entries) in &buckets {
        let neighbours: Vec<(i64, i64)> = (kx - 1..=kx + 1)
            .flat_map(|x| (ky - 1..=ky + 1).map(move |y| (x, y)))
            .filter(|k| buckets.contains_key(k))
            .collect();
        let only = single[&(kx, ky)];
        if only.is_some() && neighbours.iter().all(|k| single[k] == only) {
            continue;
        }
        for &(ci, k) in entries {
            let (a, b) = curves[ci].segment(k);
            for nk in &neighbours {
                for &(cj, l) in &buckets[nk] {
                    if cj <= ci {
                        continue;
                    }
                    let (c, d) = curves[cj].segment(l);
                    if *nk == (kx, ky) && segments_intersect(a, b, c, d) {
                        crossing.insert((ci, cj));
                    }
                    if dist2(a, c) <= r {
                        near.insert((ci, cj));
                    }
                }
            }
        }
    }
    (crossing, near)
}

/// Linear order of pairwise disjoint closed curves by containment,
/// outermost first.
///
/// For each ordered pair, the first vertex of curve `i` is tested against
/// curve `j` by winding number and by flood fill of `j`'s raster; the two
/// must agree. Exactly one of each pair must contain the other, and the
/// resulting relation must be transitive.
pub fn nesting_order(curves: &[ClosedPolyline], h: f64) -> Result<Nesting> {
    let n = curves.len();
    let (crossing, near) = curve_conflicts(curves, 2.0 * h);
    for i in 0..n {
        for j in (i + 1)..n {
            if crossing.contains(&(i, j)) {
                return Err(Error::CurvesIntersect { a: i, b: j });
            }
            if near.contains(&(i, j)) {
                return Err(Error::ResolutionTooCoarse { a: i, b: j });
            }
        }
    }
    // inside[i][j]: curve i lies inside curve j
    let mut inside = vec![vec![false; n]; n];
    let mut agreements = 0;
    for j in 0..n {
        let raster = Raster::new(&curves[j], h)?;
        for i in 0..n {
            if i == j {
                continue;
            }
            let p = curves[i].vertices[0];
            let by_winding = winding_number(p, &curves[j].vertices) != 0;
            let by_parity = point_in_polygon(p, &curves[j].vertices);
            let by_fill = match raster.component_at(p) {
                Some(l) => l != 0,
                None => return Err(Error::ResolutionTooCoarse { a: i, b: j }),
            };
            if by_winding != by_fill || by_parity != by_fill {
                return Err(Error::NotTotallyOrdered(format!(
                    "containment tests disagree for curve {i} in curve {j}"
                )));
            }
            agreements += 1;
            inside[i][j] = by_winding;
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if inside[i][j] == inside[j][i] {
                return Err(Error::NotTotallyOrdered(format!("curves {i} and {j} are not nested")));
            }
        }
    }
    // depth = number of enclosing curves; a linear order has depths 0..n−1
    let mut order: Vec<usize> = (0..n).collect();
    let depth: Vec<usize> = (0..n).map(|i| inside[i].iter().filter(|&&b| b).count()).collect();
    order.sort_by_key(|&i| depth[i]);
    for (k, &i) in order.iter().enumerate() {
        if depth[i] != k {
            return Err(Error::NotTotallyOrdered("containment is not transitive".into()));
        }
    }
    Ok(Nesting { order, agreements })
}

/// Outcome of [`slack_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlackReport {
    pub pass: bool,
    /// Minimum of `‖ḡ(x) − ḡ(y)‖ − ‖x − y‖` over the sampled pairs.
    pub worst_slack: f64,
    /// Parameter angles of the worst pair.
    pub witness: (f64, f64),
    /// Tolerance granted for replacing arcs by chords: twice the sagitta of
    /// the widest net arc.
    pub chord_error: f64,
}

/// Evaluates the PL extension at angle `theta` of the parametrizing circle.
fn evaluate_pl(net: &SphereNet, angles: &[f64], images: &[Point2], theta: f64) -> Point2 {
    let n = net.len();
    let theta = theta.rem_euclid(TAU);
    // last net point with angle ≤ theta, cyclically
    let k = match angles.partition_point(|&a| a <= theta) {
        0 => n - 1,
        k => k - 1,
    };
    let a = angles[k];
    let mut b = angles[(k + 1) % n];
    let mut th = theta;
    if b <= a {
        b += TAU;
    }
    if th < a {
        th += TAU;
    }
    lerp(images[k], images[(k + 1) % n], (th - a) / (b - a))
}

/// Samples `samples` seeded pairs of circle points and checks
/// `‖ḡ(x) − ḡ(y)‖ ≥ ‖x − y‖ − delta` for the PL extension `ḡ` of `images`.
///
/// The net must be planar and listed in increasing angle (as produced by
/// `epsilon_dense_sphere`). A pair passes when its slack is at least
/// `−(delta + chord_error)`.
pub fn slack_check(net: &SphereNet, images: &[Point2], delta: f64, samples: usize, seed: u64) -> Result<SlackReport> {
    if net.dim != 2 {
        return Err(Error::UnsupportedDimension(net.dim));
    }
    if images.len() != net.len() || net.len() < 3 {
        return Err(crate::metric::MetricError::SizeMismatch {
            expected: net.len(),
            got: images.len(),
        }
        .into());
    }
    let angles: Vec<f64> = net.points.iter().map(|p| angle_of(p)).collect();
    if angles.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::DegenerateParameters(
            "net points must be in increasing angle".into(),
        ));
    }
    let n = net.len();
    let widest = (0..n)
        .map(|k| (angles[(k + 1) % n] - angles[k]).rem_euclid(TAU))
        .fold(0.0, f64::max);
    let chord_error = 2.0 * net.radius * (1.0 - (widest / 2.0).cos());
    let mut rng = rng::stream(seed, streams::SLACK, 0);
    let mut worst = (f64::INFINITY, (0.0, 0.0));
    for _ in 0..samples {
        let s: f64 = rng.random_range(0.0..TAU);
        let t: f64 = rng.random_range(0.0..TAU);
        let x = [net.radius * s.cos(), net.radius * s.sin()];
        let y = [net.radius * t.cos(), net.radius * t.sin()];
        let gx = evaluate_pl(net, &angles, images, s);
        let gy = evaluate_pl(net, &angles, images, t);
        let slack = dist2(gx, gy) - dist2(x, y);
        if slack < worst.0 {
            worst = (slack, (s, t));
        }
    }
    Ok(SlackReport {
        pass: worst.0 >= -(delta + chord_error),
        worst_slack: worst.0,
        witness: worst.1,
        chord_error,
    })
}

/// Outcome of [`narrow_holes_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NarrowHolesReport {
    pub pass: bool,
    /// Radius a hole must reach to count as big: `4·D·δ + 2h`.
    pub threshold: f64,
    pub big_holes: usize,
    pub holes: HoleReport,
}

/// Passes iff at most one hole has inradius at least `4·D·δ + 2h`.
pub fn narrow_holes_check(curve: &ClosedPolyline, d: f64, delta: f64, h: f64) -> Result<NarrowHolesReport> {
    let holes = compute_holes(curve, h)?;
    let threshold = 4.0 * d * delta + 2.0 * h;
    let big_holes = holes.holes.iter().filter(|x| x.inradius_estimate >= threshold).count();
    Ok(NarrowHolesReport {
        pass: big_holes <= 1,
        threshold,
        big_holes,
        holes,
    })
}

/// Regular polygon approximating the circle of radius `r` centred at `c`.
pub fn circle_polyline(c: Point2, r: f64, segments: usize) -> ClosedPolyline {
    let vertices = (0..segments)
        .map(|k| {
            let t = TAU * k as f64 / segments as f64;
            [c[0] + r * t.cos(), c[1] + r * t.sin()]
        })
        .collect();
    ClosedPolyline::new(vertices).expect("regular polygon")
}
