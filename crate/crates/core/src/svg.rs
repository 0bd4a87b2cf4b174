//! Deterministic SVG figures: fixed element order, coordinates with six
//! decimals, y axis pointing up, viewBox = bounding box padded by 5%.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::counterexamples::LadderEdgeKind;
use crate::error::{Error, Result};
use crate::geometry::{stadium, Point2};
use crate::io::{from_json, CurvesArtifact, Embedding2dArtifact, K33Artifact, LadderSidecar};
use crate::topology::{compute_holes, nesting_order, ClosedPolyline, HoleReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderKind {
    CurvesHoles,
    Embedding2d,
    K33Drawing,
    LadderGraph,
}

impl FromStr for RenderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "curves+holes" => Ok(Self::CurvesHoles),
            "embedding2d" => Ok(Self::Embedding2d),
            "k33-drawing" => Ok(Self::K33Drawing),
            "ladder-graph" => Ok(Self::LadderGraph),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

impl RenderKind {
    pub const ALL: [&'static str; 4] = ["curves+holes", "embedding2d", "k33-drawing", "ladder-graph"];
}

const PALETTE: [&str; 9] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf", "#7f7f7f",
];

fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Accumulates elements in document order and tracks the bounding box.
struct Canvas {
    body: String,
    lo: Point2,
    hi: Point2,
}

impl Canvas {
    fn new<'a>(points: impl IntoIterator<Item = &'a Point2>) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        if !lo[0].is_finite() {
            (lo, hi) = ([0.0, 0.0], [1.0, 1.0]);
        }
        Self {
            body: String::new(),
            lo,
            hi,
        }
    }

    fn diag(&self) -> f64 {
        let d = ((self.hi[0] - self.lo[0]).powi(2) + (self.hi[1] - self.lo[1]).powi(2)).sqrt();
        if d > 0.0 {
            d
        } else {
            1.0
        }
    }

    fn xy(p: Point2) -> String {
        format!("{} {}", num(p[0]), num(-p[1]))
    }

    fn path(&mut self, pts: &[Point2], closed: bool, attrs: &str) {
        if pts.is_empty() {
            return;
        }
        let mut d = format!("M {}", Self::xy(pts[0]));
        for &p in &pts[1..] {
            write!(d, " L {}", Self::xy(p)).unwrap();
        }
        if closed {
            d.push_str(" Z");
        }
        writeln!(self.body, "<path d=\"{d}\" {attrs}/>").unwrap();
    }

    fn circle(&mut self, c: Point2, r: f64, attrs: &str) {
        writeln!(
            self.body,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" {attrs}/>",
            num(c[0]),
            num(-c[1]),
            num(r)
        )
        .unwrap();
    }

    fn text(&mut self, at: Point2, size: f64, content: &str) {
        writeln!(
            self.body,
            "<text x=\"{}\" y=\"{}\" font-size=\"{}\" font-family=\"sans-serif\">{}</text>",
            num(at[0]),
            num(-at[1]),
            num(size),
            escape(content)
        )
        .unwrap();
    }

    fn finish(self, title: &str) -> String {
        let w = self.hi[0] - self.lo[0];
        let h = self.hi[1] - self.lo[1];
        let padx = if w > 0.0 { 0.05 * w } else { 0.05 * self.diag() };
        let pady = if h > 0.0 { 0.05 * h } else { 0.05 * self.diag() };
        let (x0, y0) = (self.lo[0] - padx, -self.hi[1] - pady);
        let (vw, vh) = (w + 2.0 * padx, h + 2.0 * pady);
        let px = 800.0;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"{}\" height=\"{}\">\n<title>{}</title>\n{}</svg>\n",
            num(x0),
            num(y0),
            num(vw),
            num(vh),
            num(px),
            num(px * vh / vw),
            escape(title),
            self.body
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Curves as closed paths, holes shaded as disks of their inradius estimate,
/// and, when `order` (outermost first) is given, the label `r` at the
/// rightmost vertex of the `r`-th curve.
pub fn curves_svg(curves: &[ClosedPolyline], holes: &[HoleReport], order: Option<&[usize]>) -> String {
    let mut c = Canvas::new(curves.iter().flat_map(|cv| cv.vertices.iter()));
    let sw = 0.003 * c.diag();
    for report in holes {
        for hole in &report.holes {
            c.circle(
                hole.representative_point,
                hole.inradius_estimate,
                "fill=\"#999999\" fill-opacity=\"0.3\" stroke=\"none\"",
            );
        }
    }
    for (i, cv) in curves.iter().enumerate() {
        let attrs = format!(
            "fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"",
            PALETTE[i % PALETTE.len()],
            num(sw)
        );
        c.path(&cv.vertices, true, &attrs);
    }
    if let Some(order) = order {
        let size = 0.03 * c.diag();
        for (rank, &i) in order.iter().enumerate() {
            let right = curves[i]
                .vertices
                .iter()
                .copied()
                .fold([f64::NEG_INFINITY, 0.0], |a, p| if p[0] > a[0] { p } else { a });
            c.text([right[0] + sw, right[1]], size, &(rank + 1).to_string());
        }
    }
    c.finish("curves")
}

pub fn render_curves(a: &CurvesArtifact) -> Result<String> {
    let curves = a
        .curves
        .iter()
        .map(|v| ClosedPolyline::new(v.clone()))
        .collect::<Result<Vec<_>>>()?;
    let pitch = |cv: &ClosedPolyline| a.pitch.unwrap_or_else(|| cv.default_pitch());
    let holes = curves
        .iter()
        .map(|cv| compute_holes(cv, pitch(cv)))
        .collect::<Result<Vec<_>>>()?;
    let order = match curves.len() {
        0 => None,
        1 => Some(vec![0]),
        _ => {
            let h = a
                .pitch
                .unwrap_or_else(|| curves.iter().map(|cv| cv.default_pitch()).fold(f64::INFINITY, f64::min));
            Some(nesting_order(&curves, h)?.order)
        }
    };
    Ok(curves_svg(&curves, &holes, order.as_deref()))
}

pub fn render_embedding2d(a: &Embedding2dArtifact) -> Result<String> {
    let e = &a.embedding;
    if e.dim != 2 {
        return Err(Error::UnsupportedDimension(e.dim));
    }
    let pts: Vec<Point2> = e.coords.iter().map(|c| [c[0], c[1]]).collect();
    let mut c = Canvas::new(pts.iter());
    let sw = 0.002 * c.diag();
    for &[u, v] in &a.edges {
        if u >= pts.len() || v >= pts.len() {
            return Err(Error::Parse(format!("edge [{u}, {v}] out of range")));
        }
        c.path(
            &[pts[u], pts[v]],
            false,
            &format!("stroke=\"#555555\" stroke-width=\"{}\"", num(sw)),
        );
    }
    let r = 0.004 * c.diag();
    for &p in &pts {
        c.circle(p, r, "fill=\"#1f77b4\"");
    }
    if let Some(labels) = &a.labels {
        for (p, l) in pts.iter().zip(labels) {
            c.text([p[0] + r, p[1] + r], 3.0 * r, l);
        }
    }
    Ok(c.finish("embedding"))
}

/// The drawing (or an embedding of a subset) with each K₃,₃ edge in its
/// own colour, the strip's stadium outline when showing the drawing, and
/// certified crossing segments in bold.
pub fn render_k33(a: &K33Artifact) -> Result<String> {
    let s = &a.sidecar;
    let subset: Vec<usize> = a.subset.clone().unwrap_or_else(|| (0..s.n).collect());
    let mut pos: Vec<Option<Point2>> = vec![None; s.n];
    match &a.embedding {
        Some(e) => {
            if e.dim != 2 {
                return Err(Error::UnsupportedDimension(e.dim));
            }
            if e.len() != subset.len() {
                return Err(Error::IncompleteEmbedding {
                    expected: subset.len(),
                    got: e.len(),
                });
            }
            for (c, &x) in e.coords.iter().zip(&subset) {
                pos[x] = Some([c[0], c[1]]);
            }
        }
        None => {
            for &x in &subset {
                pos[x] = Some(s.drawing[x]);
            }
        }
    }
    let mut c = Canvas::new(pos.iter().flatten());
    let sw = 0.002 * c.diag();
    if a.embedding.is_none() && !s.p.is_empty() {
        let (first, last) = (s.drawing[s.p[0]], s.drawing[*s.p.last().unwrap()]);
        let outline = stadium([first[0], 0.0], [last[0], 0.0], s.w / 2.0, 16);
        c.path(
            &outline,
            true,
            &format!(
                "fill=\"none\" stroke=\"#aaaaaa\" stroke-dasharray=\"{} {}\" stroke-width=\"{}\"",
                num(4.0 * sw),
                num(2.0 * sw),
                num(sw)
            ),
        );
    }
    for (i, edge) in s.edges.iter().enumerate() {
        let pts: Vec<Point2> = edge.points.iter().filter_map(|&x| pos[x]).collect();
        c.path(
            &pts,
            false,
            &format!(
                "fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"",
                PALETTE[i % PALETTE.len()],
                num(sw)
            ),
        );
    }
    if let Some([x, y, x2, y2]) = a.witness {
        for (u, v) in [(x, y), (x2, y2)] {
            if let (Some(pu), Some(pv)) = (pos[u], pos[v]) {
                c.path(
                    &[pu, pv],
                    false,
                    &format!("stroke=\"#000000\" stroke-width=\"{}\"", num(3.0 * sw)),
                );
            }
        }
    }
    let r = 1.5 * sw;
    for p in pos.iter().flatten() {
        c.circle(*p, r, "fill=\"#000000\"");
    }
    Ok(c.finish("k33"))
}

/// Unit edges as thin black lines, short ladder edges in blue.
pub fn render_ladder(l: &LadderSidecar) -> Result<String> {
    let mut c = Canvas::new(l.drawing.iter());
    let sw = 0.002 * c.diag();
    for e in &l.edges {
        let (u, v) = (l.drawing[e.u], l.drawing[e.v]);
        let attrs = match e.kind {
            LadderEdgeKind::Single => format!("stroke=\"#000000\" stroke-width=\"{}\"", num(sw)),
            LadderEdgeKind::Double => format!("stroke=\"#1f77b4\" stroke-width=\"{}\"", num(sw)),
        };
        c.path(&[u, v], false, &attrs);
    }
    for &p in &l.drawing {
        c.circle(p, 1.5 * sw, "fill=\"#000000\"");
    }
    Ok(c.finish("ladder"))
}

/// Renders an artifact given as JSON text.
pub fn render(kind: RenderKind, artifact: &str) -> Result<String> {
    match kind {
        RenderKind::CurvesHoles => render_curves(&from_json(artifact)?),
        RenderKind::Embedding2d => render_embedding2d(&from_json(artifact)?),
        RenderKind::K33Drawing => render_k33(&from_json(artifact)?),
        RenderKind::LadderGraph => render_ladder(&from_json(artifact)?),
    }
}
