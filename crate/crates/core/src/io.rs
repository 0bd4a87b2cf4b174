//! JSON file formats. Floats are written in shortest round-trip form, so
//! reading a file back reproduces every value bit for bit.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::counterexamples::{K33Sidecar, K33Space, LadderEdge, PlanarLadderSpace};
use crate::error::{Error, Result};
use crate::gadget::{ProductSpace, SphereNet};
use crate::geometry::Point2;
use crate::metric::{EuclideanEmbedding, FiniteMetric};
use crate::reductions::{BetweennessInstance, GluedPath, LayeredParams, LayeredSpace, PointTag};

/// `{"labels": [...], "dist": [[...], ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricFile {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<f64>>,
}

impl From<&FiniteMetric> for MetricFile {
    fn from(m: &FiniteMetric) -> Self {
        Self {
            labels: m.labels().to_vec(),
            dist: m.rows(),
        }
    }
}

impl MetricFile {
    /// Builds the metric and checks the axioms.
    pub fn into_metric(self) -> Result<FiniteMetric> {
        let m = FiniteMetric::from_rows(self.labels, &self.dist)?;
        m.validate()?;
        Ok(m)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn metric_to_json(m: &FiniteMetric) -> String {
    to_json(&MetricFile::from(m))
}

pub fn metric_from_json(text: &str) -> Result<FiniteMetric> {
    from_json::<MetricFile>(text)?.into_metric()
}

/// Point `i` of a product space is `(base[a], net[v])` with `index[i] = [a, v]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSidecar {
    pub base: MetricFile,
    pub net: SphereNet,
    pub index: Vec<[usize; 2]>,
}

impl From<&ProductSpace> for ProductSidecar {
    fn from(p: &ProductSpace) -> Self {
        Self {
            base: MetricFile::from(&p.base),
            net: p.net.clone(),
            index: (0..p.len())
                .map(|i| {
                    let (a, v) = p.split(i);
                    [a, v]
                })
                .collect(),
        }
    }
}

impl ProductSidecar {
    pub fn into_space(self) -> Result<ProductSpace> {
        let base = self.base.into_metric()?;
        let space = crate::gadget::product_space(&base, &self.net)?;
        let consistent = self.index.len() == space.len()
            && self
                .index
                .iter()
                .enumerate()
                .all(|(i, &[a, v])| space.split(i) == (a, v));
        if !consistent {
            return Err(Error::Parse("index map does not match base × net".into()));
        }
        Ok(space)
    }
}

/// Provenance of every point of a layered space; labels live in the metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredSidecar {
    pub instance: BetweennessInstance,
    pub params: LayeredParams,
    pub net: SphereNet,
    pub loci: Vec<usize>,
    pub points: Vec<PointTag>,
    pub paths: Vec<GluedPath>,
    pub layer_points: usize,
}

impl From<&LayeredSpace> for LayeredSidecar {
    fn from(s: &LayeredSpace) -> Self {
        Self {
            instance: s.instance.clone(),
            params: s.params,
            net: s.net.clone(),
            loci: s.loci.clone(),
            points: s.points.clone(),
            paths: s.paths.clone(),
            layer_points: s.layer_points,
        }
    }
}

impl LayeredSidecar {
    pub fn into_space(self, metric: FiniteMetric) -> Result<LayeredSpace> {
        if metric.len() != self.points.len() {
            return Err(Error::Parse(format!(
                "sidecar describes {} points, metric has {}",
                self.points.len(),
                metric.len()
            )));
        }
        Ok(LayeredSpace {
            instance: self.instance,
            params: self.params,
            net: self.net,
            loci: self.loci,
            points: self.points,
            paths: self.paths,
            metric,
            layer_points: self.layer_points,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderSidecar {
    pub n: usize,
    pub drawing: Vec<Point2>,
    pub edges: Vec<LadderEdge>,
    pub rails: [Vec<usize>; 2],
}

impl From<&PlanarLadderSpace> for LadderSidecar {
    fn from(l: &PlanarLadderSpace) -> Self {
        Self {
            n: l.n,
            drawing: l.drawing.clone(),
            edges: l.edges.clone(),
            rails: l.rails.clone(),
        }
    }
}

impl LadderSidecar {
    /// Rebuilds the space; the sidecar must match the construction for `n`.
    pub fn into_space(self) -> Result<PlanarLadderSpace> {
        let space = crate::counterexamples::planar_ladder_space(self.n)?;
        if LadderSidecar::from(&space) != self {
            return Err(Error::Parse(format!(
                "sidecar does not match the ladder of size {}",
                self.n
            )));
        }
        Ok(space)
    }
}

/// Rebuilds a K₃,₃ space from its parameters; the sidecar must match.
pub fn k33_from_sidecar(side: &K33Sidecar) -> Result<K33Space> {
    let space = crate::counterexamples::k33_space(side.n, side.k, side.eps)?;
    if space.sidecar() != *side {
        return Err(Error::Parse(format!(
            "sidecar does not match the space for (n, k, eps) = ({}, {}, {})",
            side.n, side.k, side.eps
        )));
    }
    Ok(space)
}

/// Input of the `curves+holes` figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvesArtifact {
    pub curves: Vec<Vec<Point2>>,
    /// grid pitch for hole and nesting computation; defaults per curve
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pitch: Option<f64>,
}

/// Input of the `embedding2d` figure: points plus segments between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding2dArtifact {
    pub embedding: EuclideanEmbedding,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// Input of the `k33-drawing` figure: the sidecar and, optionally, an
/// embedding of `subset` (all points when absent) to draw instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K33Artifact {
    #[serde(flatten)]
    pub sidecar: K33Sidecar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EuclideanEmbedding>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<usize>>,
    /// certified crossing segments `[x, y, x′, y′]` to highlight
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<[usize; 4]>,
}
