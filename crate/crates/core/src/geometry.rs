//! Small computational-geometry kernel shared by the topology checks, the
//! nesting comparator and the crossing certificate.

use std::collections::HashMap;

pub type Point2 = [f64; 2];

#[inline]
pub fn sub(a: Point2, b: Point2) -> Point2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn norm(a: Point2) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn dist2(a: Point2, b: Point2) -> f64 {
    norm(sub(a, b))
}

/// Twice the signed area of (a, b, c); positive for a left turn.
#[inline]
pub fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Closed-segment intersection test (touching counts).
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)) {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

/// Crossing point of two closed segments, if they intersect. Collinear
/// overlaps report one shared endpoint.
pub fn segment_intersection_point(a: Point2, b: Point2, c: Point2, d: Point2) -> Option<Point2> {
    if !segments_intersect(a, b, c, d) {
        return None;
    }
    let r = sub(b, a);
    let s = sub(d, c);
    let denom = r[0] * s[1] - r[1] * s[0];
    if denom == 0.0 {
        for p in [c, d] {
            if on_segment(a, b, p) {
                return Some(p);
            }
        }
        return Some(a);
    }
    let qp = sub(c, a);
    let t = (qp[0] * s[1] - qp[1] * s[0]) / denom;
    Some([a[0] + t * r[0], a[1] + t * r[1]])
}

/// Distance from `p` to the closed segment `ab`.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = sub(b, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == 0.0 {
        return dist2(p, a);
    }
    let t = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
    dist2(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// Even-odd containment of `p` in the closed polygon `poly`.
///
/// Crossings are counted along the horizontal ray to +x. A vertex lying
/// exactly on the ray is treated as sitting infinitesimally above it, which
/// makes every tie deterministic.
pub fn point_in_polygon(p: Point2, poly: &[Point2]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[j], poly[i]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Winding number of the closed polygon `poly` around `p`.
pub fn winding_number(p: Point2, poly: &[Point2]) -> i32 {
    let n = poly.len();
    let mut wn = 0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if a[1] <= p[1] {
            if b[1] > p[1] && orient(a, b, p) > 0.0 {
                wn += 1;
            }
        } else if b[1] <= p[1] && orient(a, b, p) < 0.0 {
            wn -= 1;
        }
    }
    wn
}

/// Smallest Euclidean distance between a point of `a` and a point of `b`,
/// with the indices of a closest pair.
///
/// Uses a k-d tree over the larger set for dimensions 1 to 3 and falls back
/// to the exhaustive scan otherwise.
pub fn closest_pair(a: &[Vec<f64>], b: &[Vec<f64>]) -> Option<(f64, usize, usize)> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let dim = a[0].len();
    let small = a.len().min(b.len());
    if small * a.len().max(b.len()) <= 4096 || dim > 3 || dim == 0 {
        return Some(closest_pair_brute(a, b));
    }
    let (query, indexed, swapped) = if a.len() <= b.len() {
        (a, b, false)
    } else {
        (b, a, true)
    };
    let best = match dim {
        1 => closest_pair_tree::<1>(query, indexed),
        2 => closest_pair_tree::<2>(query, indexed),
        _ => closest_pair_tree::<3>(query, indexed),
    };
    let (d, qi, ii) = best;
    Some(if swapped { (d, ii, qi) } else { (d, qi, ii) })
}

fn to_array<const K: usize>(p: &[f64]) -> [f64; K] {
    let mut out = [0.0; K];
    out.copy_from_slice(&p[..K]);
    out
}

/// Box hierarchy over a point set: each node owns a contiguous range of
/// `order` and its bounding box; children split at the median of the widest
/// axis.
struct BoxTree<const K: usize> {
    pts: Vec<[f64; K]>,
    order: Vec<usize>,
    nodes: Vec<BoxNode<K>>,
}

struct BoxNode<const K: usize> {
    lo: [f64; K],
    hi: [f64; K],
    range: (usize, usize),
    children: Option<(usize, usize)>,
}

const LEAF_SIZE: usize = 16;

impl<const K: usize> BoxTree<K> {
    fn new(points: &[Vec<f64>]) -> Self {
        let mut t = Self {
            pts: points.iter().map(|p| to_array::<K>(p)).collect(),
            order: (0..points.len()).collect(),
            nodes: Vec::new(),
        };
        t.build(0, points.len());
        t
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let mut lo = [f64::INFINITY; K];
        let mut hi = [f64::NEG_INFINITY; K];
        for &i in &self.order[start..end] {
            for k in 0..K {
                lo[k] = lo[k].min(self.pts[i][k]);
                hi[k] = hi[k].max(self.pts[i][k]);
            }
        }
        let id = self.nodes.len();
        self.nodes.push(BoxNode {
            lo,
            hi,
            range: (start, end),
            children: None,
        });
        if end - start > LEAF_SIZE {
            let axis = (0..K)
                .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
                .unwrap();
            let mid = (start + end) / 2;
            let pts = &self.pts;
            self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| pts[a][axis].total_cmp(&pts[b][axis]));
            let l = self.build(start, mid);
            let r = self.build(mid, end);
            self.nodes[id].children = Some((l, r));
        }
        id
    }
}

fn box_gap2<const K: usize>(a: &BoxNode<K>, b: &BoxNode<K>) -> f64 {
    (0..K)
        .map(|k| {
            let g = (a.lo[k] - b.hi[k]).max(b.lo[k] - a.hi[k]).max(0.0);
            g * g
        })
        .sum()
}

/// Dual-tree search: node pairs whose boxes are farther apart than the best
/// pair so far are pruned, closer child pairs are visited first.
fn closest_pair_tree<const K: usize>(query: &[Vec<f64>], indexed: &[Vec<f64>]) -> (f64, usize, usize) {
    let ta = BoxTree::<K>::new(query);
    let tb = BoxTree::<K>::new(indexed);
    let mut best = (f64::INFINITY, 0, 0);
    let mut stack = vec![(0usize, 0usize)];
    while let Some((na, nb)) = stack.pop() {
        let (a, b) = (&ta.nodes[na], &tb.nodes[nb]);
        if box_gap2(a, b) >= best.0 {
            continue;
        }
        let split_a = match (a.children, b.children) {
            (None, None) => {
                for &i in &ta.order[a.range.0..a.range.1] {
                    for &j in &tb.order[b.range.0..b.range.1] {
                        let d2: f64 = (0..K).map(|k| (ta.pts[i][k] - tb.pts[j][k]).powi(2)).sum();
                        if d2 < best.0 {
                            best = (d2, i, j);
                        }
                    }
                }
                continue;
            }
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some(_), Some(_)) => a.range.1 - a.range.0 >= b.range.1 - b.range.0,
        };
        let pairs = if split_a {
            let (l, r) = a.children.unwrap();
            [(l, nb), (r, nb)]
        } else {
            let (l, r) = b.children.unwrap();
            [(na, l), (na, r)]
        };
        let gap = |&(x, y): &(usize, usize)| box_gap2(&ta.nodes[x], &tb.nodes[y]);
        let (near, far) = if gap(&pairs[0]) <= gap(&pairs[1]) {
            (pairs[0], pairs[1])
        } else {
            (pairs[1], pairs[0])
        };
        stack.push(far);
        stack.push(near);
    }
    // recompute exactly from the original coordinates
    let d = crate::metric::euclidean(&query[best.1], &indexed[best.2]);
    (d, best.1, best.2)
}

/// Some pair of points at distance ≤ `r`, found by sorting along the
/// coordinate of widest spread and sweeping a window of width `r`.
pub fn pair_within(points: &[Vec<f64>], r: f64) -> Option<(usize, usize)> {
    let dim = points.first()?.len();
    let spread = |k: usize| {
        let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p[k]), hi.max(p[k]))
        });
        hi - lo
    };
    let axis = (0..dim).max_by(|&a, &b| spread(a).total_cmp(&spread(b)))?;
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_unstable_by(|&a, &b| points[a][axis].total_cmp(&points[b][axis]));
    for (k, &i) in idx.iter().enumerate() {
        for &j in &idx[k + 1..] {
            if points[j][axis] - points[i][axis] > r {
                break;
            }
            if crate::metric::euclidean(&points[i], &points[j]) <= r {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}

pub fn closest_pair_brute(a: &[Vec<f64>], b: &[Vec<f64>]) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            let d = crate::metric::euclidean(p, q);
            if d < best.0 {
                best = (d, i, j);
            }
        }
    }
    best
}

/// Uniform-grid bucketing of the segments of a closed polyline, used to find
/// segment pairs that may intersect without an all-pairs scan.
pub struct SegmentGrid {
    cell: f64,
    origin: Point2,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl SegmentGrid {
    pub fn new(segments: &[(Point2, Point2)], cell: f64) -> Self {
        let mut origin = [f64::INFINITY, f64::INFINITY];
        for (a, b) in segments {
            origin[0] = origin[0].min(a[0]).min(b[0]);
            origin[1] = origin[1].min(a[1]).min(b[1]);
        }
        let mut grid = Self {
            cell,
            origin,
            buckets: HashMap::new(),
        };
        for (idx, (a, b)) in segments.iter().enumerate() {
            for key in grid.cells_of(*a, *b) {
                grid.buckets.entry(key).or_default().push(idx);
            }
        }
        grid
    }

    fn key(&self, p: Point2) -> (i64, i64) {
        (
            ((p[0] - self.origin[0]) / self.cell).floor() as i64,
            ((p[1] - self.origin[1]) / self.cell).floor() as i64,
        )
    }

    /// All cells overlapped by the bounding box of the segment.
    fn cells_of(&self, a: Point2, b: Point2) -> Vec<(i64, i64)> {
        let ka = self.key(a);
        let kb = self.key(b);
        let mut out = Vec::new();
        for x in ka.0.min(kb.0)..=ka.0.max(kb.0) {
            for y in ka.1.min(kb.1)..=ka.1.max(kb.1) {
                out.push((x, y));
            }
        }
        out
    }

    /// Indices of stored segments whose cells overlap the query segment's box.
    pub fn candidates(&self, a: Point2, b: Point2) -> Vec<usize> {
        let mut out = Vec::new();
        for key in self.cells_of(a, b) {
            if let Some(v) = self.buckets.get(&key) {
                out.extend_from_slice(v);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Segments of the closed polyline through `pts`.
pub fn closed_segments(pts: &[Point2]) -> Vec<(Point2, Point2)> {
    let n = pts.len();
    (0..n).map(|i| (pts[i], pts[(i + 1) % n])).collect()
}

/// Whether two closed polylines share a point.
pub fn polylines_intersect(a: &[Point2], b: &[Point2]) -> bool {
    let sa = closed_segments(a);
    let sb = closed_segments(b);
    let mean_len = sa.iter().chain(sb.iter()).map(|(p, q)| dist2(*p, *q)).sum::<f64>() / (sa.len() + sb.len()) as f64;
    let cell = mean_len.max(f64::MIN_POSITIVE) * 4.0;
    let grid = SegmentGrid::new(&sb, cell);
    sa.iter().any(|(p, q)| {
        grid.candidates(*p, *q)
            .into_iter()
            .any(|j| segments_intersect(*p, *q, sb[j].0, sb[j].1))
    })
}

/// Closed boundary of the set of points within `r` of segment `ab`: two
/// half circles of `arc_segments` pieces joined by parallel sides.
pub fn stadium(a: Point2, b: Point2, r: f64, arc_segments: usize) -> Vec<Point2> {
    let d = sub(b, a);
    let base = d[1].atan2(d[0]);
    let half = std::f64::consts::FRAC_PI_2;
    let arc = |c: Point2, from: f64, out: &mut Vec<Point2>| {
        for j in 0..=arc_segments {
            let t = from + std::f64::consts::PI * j as f64 / arc_segments as f64;
            out.push([c[0] + r * t.cos(), c[1] + r * t.sin()]);
        }
    };
    let mut out = Vec::with_capacity(2 * arc_segments + 2);
    arc(b, base - half, &mut out);
    arc(a, base + half, &mut out);
    out
}
