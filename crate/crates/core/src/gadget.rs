//! Sphere nets, the product space `X ×₂ V` and the radial forward embedding
//! that lifts a line embedding of `X` to the plane or to 3-space.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{euclidean, EuclideanEmbedding, FiniteMetric, AXIOM_TOLERANCE};

/// Documented cardinality constant: `|V| ≤ C_NET · (R/ε)^(d−1)`.
pub const C_NET: f64 = 40.0;

/// Default master constant.
pub const DEFAULT_C: f64 = 100.0;

/// An ε-dense subset of the origin-centred sphere of radius `radius` in `R^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereNet {
    pub dim: usize,
    pub radius: f64,
    pub epsilon: f64,
    pub points: Vec<Vec<f64>>,
}

impl SphereNet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance from `x` (assumed on the sphere) to the nearest net point.
    pub fn distance_to_net(&self, x: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|p| euclidean(p, x))
            .fold(f64::INFINITY, f64::min)
    }
}

fn check_sphere_params(d: usize, r: f64, eps: f64) -> Result<()> {
    if d != 2 && d != 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    if !(r > 0.0 && eps > 0.0 && r.is_finite() && eps.is_finite() && eps <= 2.0 * r) {
        return Err(Error::DegenerateParameters(format!(
            "need R > 0 and 0 < eps ≤ 2R, got R = {r}, eps = {eps}"
        )));
    }
    Ok(())
}

/// Ring layout of the 3-sphere grid: polar ring count and points per ring.
///
/// Angular pitch `p = ε/R`: a sphere point is within `Rp/2` of its nearest
/// ring along a meridian and within `Rp/2` of a grid point along that ring,
/// so the geodesic (hence chordal) distance to the net is at most `ε`.
fn grid3_layout(r: f64, eps: f64) -> Vec<(f64, usize)> {
    let pitch = eps / r;
    let m = (PI / pitch).ceil() as usize;
    (0..=m)
        .map(|i| {
            let phi = i as f64 * PI / m as f64;
            let k = ((2.0 * PI * phi.sin() / pitch).ceil() as usize).max(1);
            // the poles are single points
            let k = if i == 0 || i == m { 1 } else { k };
            (phi, k)
        })
        .collect()
}

/// Number of points `epsilon_dense_sphere(d, r, eps)` will produce.
pub fn net_size(d: usize, r: f64, eps: f64) -> Result<usize> {
    check_sphere_params(d, r, eps)?;
    Ok(match d {
        2 => (2.0 * PI * r / eps).ceil() as usize,
        _ => grid3_layout(r, eps).iter().map(|(_, k)| k).sum(),
    })
}

/// Builds an ε-dense net on the sphere of radius `r` in dimension 2 or 3.
///
/// In the plane the net is `⌈2πR/ε⌉` equally spaced points starting on the
/// positive x-axis (arc gaps ≤ ε, hence chord gaps ≤ ε). In space it is a
/// latitude–longitude grid ordered by polar angle, then azimuth.
pub fn epsilon_dense_sphere(d: usize, r: f64, eps: f64) -> Result<SphereNet> {
    check_sphere_params(d, r, eps)?;
    let points = if d == 2 {
        let n = (2.0 * PI * r / eps).ceil() as usize;
        (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                vec![r * t.cos(), r * t.sin()]
            })
            .collect()
    } else {
        let mut pts = Vec::new();
        for (phi, k) in grid3_layout(r, eps) {
            let (sp, cp) = phi.sin_cos();
            for j in 0..k {
                let theta = 2.0 * PI * j as f64 / k as f64;
                pts.push(vec![r * sp * theta.cos(), r * sp * theta.sin(), r * cp]);
            }
        }
        pts
    };
    Ok(SphereNet {
        dim: d,
        radius: r,
        epsilon: eps,
        points,
    })
}

/// The product `X ×₂ V` with `ρ_Y((a,v),(a′,v′)) = sqrt(ρ_X(a,a′)² + ‖v−v′‖²)`.
///
/// Point `(a, v)` has index `a·|V| + v`. Distances are evaluated on demand;
/// [`ProductSpace::to_metric`] materializes the full matrix for small spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    pub base: FiniteMetric,
    pub net: SphereNet,
}

impl ProductSpace {
    pub fn len(&self) -> usize {
        self.base.len() * self.net.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, a: usize, v: usize) -> usize {
        a * self.net.len() + v
    }

    /// Inverse of [`ProductSpace::index`].
    pub fn split(&self, i: usize) -> (usize, usize) {
        (i / self.net.len(), i % self.net.len())
    }

    pub fn label(&self, i: usize) -> String {
        let (a, v) = self.split(i);
        format!("{}#{}", self.base.labels()[a], v)
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.label(i)).collect()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, v) = self.split(i);
        let (b, w) = self.split(j);
        self.base
            .get(a, b)
            .hypot(euclidean(&self.net.points[v], &self.net.points[w]))
    }

    /// Base index of every point of `Y`.
    pub fn layer_of(&self) -> Vec<usize> {
        (0..self.len()).map(|i| self.split(i).0).collect()
    }

    /// Full distance matrix; refuses spaces above `max_points`.
    pub fn to_metric(&self, max_points: usize) -> Result<FiniteMetric> {
        if self.len() > max_points {
            return Err(Error::TooLarge(format!(
                "product has {} points, limit {max_points}",
                self.len()
            )));
        }
        let m = FiniteMetric::from_fn(self.len(), |i, j| self.distance(i, j));
        Ok(m.with_labels(self.labels())?)
    }
}

/// Builds the product of a valid base metric with a nonempty net.
pub fn product_space(x: &FiniteMetric, net: &SphereNet) -> Result<ProductSpace> {
    x.validate()?;
    if net.is_empty() {
        return Err(Error::DegenerateParameters("empty net".into()));
    }
    Ok(ProductSpace {
        base: x.clone(),
        net: net.clone(),
    })
}

/// Parameters of the line-to-sphere gadget: `R = C·D_max·Δ`, `ε = 1/(C·D_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionParams {
    pub c: f64,
    pub d_max: f64,
    pub delta: f64,
    pub dim: usize,
    pub radius: f64,
    pub epsilon: f64,
    pub predicted_net_size: usize,
}

impl ReductionParams {
    pub fn from_parts(c: f64, d_max: f64, delta: f64, dim: usize) -> Result<Self> {
        if !(d_max >= 1.0 && c >= 64.0 && delta >= 1.0) {
            return Err(Error::DegenerateParameters(format!(
                "need D_max ≥ 1, C ≥ 64, Δ ≥ 1; got D_max = {d_max}, C = {c}, Δ = {delta}"
            )));
        }
        let radius = c * d_max * delta;
        let epsilon = 1.0 / (c * d_max);
        Ok(Self {
            c,
            d_max,
            delta,
            dim,
            radius,
            epsilon,
            predicted_net_size: net_size(dim, radius, epsilon)?,
        })
    }

    pub fn net(&self) -> Result<SphereNet> {
        epsilon_dense_sphere(self.dim, self.radius, self.epsilon)
    }
}

/// Parameters for a base metric already normalized to minimum distance 1.
pub fn reduction_parameters(x: &FiniteMetric, d_max: f64, d: usize, c: f64) -> Result<ReductionParams> {
    let min = x.min_distance();
    if x.len() >= 2 && (min - 1.0).abs() > AXIOM_TOLERANCE {
        return Err(Error::UnnormalizedInput(min));
    }
    let delta = if x.len() >= 2 { x.aspect_ratio()? } else { 1.0 };
    ReductionParams::from_parts(c, d_max, delta, d)
}

fn check_line(f: &[f64]) -> Result<()> {
    let min = f.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = f.iter().map(|x| x.abs()).fold(1.0, f64::max);
    if min.abs() > 1e-12 * scale {
        return Err(Error::NegativeLineValue(min));
    }
    Ok(())
}

/// `g(a, v) = (R + f(a))·v/R`: layer `a` lands on the sphere of radius `R + f(a)`.
pub fn forward_embedding(f: &[f64], p: &ProductSpace) -> Result<EuclideanEmbedding> {
    if f.len() != p.base.len() {
        return Err(crate::metric::MetricError::SizeMismatch {
            expected: p.base.len(),
            got: f.len(),
        }
        .into());
    }
    check_line(f)?;
    let r = p.net.radius;
    let mut coords = Vec::with_capacity(p.len());
    for &fa in f {
        let s = (r + fa) / r;
        for v in &p.net.points {
            coords.push(v.iter().map(|x| x * s).collect());
        }
    }
    Ok(EuclideanEmbedding::new(p.net.dim, coords)?)
}

/// Exact distortion of the forward embedding of `f`, computed without
/// enumerating all pairs when the net is the equally spaced planar one: both
/// metrics are then invariant under rotating every net index by the same
/// amount, so pairs `(a, v), (b, w)` only matter through `(a, b, w − v mod N)`.
pub fn forward_distortion(f: &[f64], p: &ProductSpace) -> Result<crate::metric::DistortionReport> {
    check_line(f)?;
    let n = p.base.len();
    let nv = p.net.len();
    let r = p.net.radius;
    if p.net.dim != 2 {
        let g = forward_embedding(f, p)?;
        let m = p.to_metric(6000)?;
        return Ok(crate::metric::distortion_of_map(&m, &g)?);
    }
    let mut expansion: f64 = 0.0;
    let mut contraction: f64 = 0.0;
    for a in 0..n {
        for b in a..n {
            let rho = p.base.get(a, b);
            let (ra, rb) = (r + f[a], r + f[b]);
            for k in 0..nv {
                if a == b && k == 0 {
                    continue;
                }
                let chord = euclidean(&p.net.points[0], &p.net.points[k]);
                let dy = rho.hypot(chord);
                let (c, s) = (p.net.points[k][0] / r, p.net.points[k][1] / r);
                let dg = (rb * c - ra).hypot(rb * s);
                expansion = expansion.max(dg / dy);
                contraction = contraction.max(dy / dg);
            }
        }
    }
    Ok(crate::metric::DistortionReport::new(expansion, contraction))
}
