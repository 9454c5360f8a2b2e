//! JSON instance documents and their conversion to core types.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use setfix_core::contraction::{Coefficients, ContractionParams};
use setfix_core::oracle::Instance as GeneratedInstance;
use setfix_core::{CompactSet, MultiMap, PointId, PseudometricFamily};

/// An instance as it appears on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub points: Vec<String>,
    pub metrics: Vec<NamedMetric>,
    pub map: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedMetric {
    pub name: String,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDocument {
    /// Omitted means 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    /// One triple per metric, or a single triple for all of them.
    pub coeffs: Vec<CoefficientsDocument>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsDocument {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DocumentError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Structure(String),
    #[error("invalid params: {0}")]
    Params(setfix_core::Error),
}

/// A document resolved against the core types.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub labels: Vec<String>,
    pub metric_names: Vec<String>,
    pub family: PseudometricFamily,
    pub map: MultiMap,
    pub params: Option<ContractionParams>,
}

impl LoadedInstance {
    pub fn label(&self, x: PointId) -> &str {
        &self.labels[x.index()]
    }

    pub fn metric(&self, i: usize) -> &str {
        &self.metric_names[i]
    }

    pub fn point(&self, label: &str) -> Option<PointId> {
        self.labels.iter().position(|l| l == label).map(PointId)
    }
}

impl InstanceDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        serde_json::from_str(text).map_err(|e| {
            let full = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            DocumentError::Parse {
                line: e.line(),
                column: e.column(),
                message: full.strip_suffix(&suffix).unwrap_or(&full).to_owned(),
            }
        })
    }

    pub fn read(path: &std::path::Path) -> Result<Self, DocumentError> {
        let text = std::fs::read_to_string(path).map_err(|e| DocumentError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn render(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("documents always serialize");
        out.push('\n');
        out
    }

    /// Checks the document-level invariants and builds the core types. Axiom
    /// violations in the matrices are not errors here.
    pub fn load(&self) -> Result<LoadedInstance, DocumentError> {
        let structure = |msg: String| DocumentError::Structure(msg);
        let n = self.points.len();
        if n == 0 {
            return Err(structure("document has no points".into()));
        }
        if self.metrics.is_empty() {
            return Err(structure("document has no metrics".into()));
        }
        let mut ids = HashMap::with_capacity(n);
        for (k, label) in self.points.iter().enumerate() {
            if ids.insert(label.as_str(), PointId(k)).is_some() {
                return Err(structure(format!("duplicate point label {label:?}")));
            }
        }
        for metric in &self.metrics {
            if metric.matrix.len() != n || metric.matrix.iter().any(|row| row.len() != n) {
                return Err(structure(format!(
                    "metric {:?} is not a {n}x{n} matrix",
                    metric.name
                )));
            }
        }
        if self.map.len() != n {
            return Err(structure(format!(
                "map has {} images for {n} points",
                self.map.len()
            )));
        }
        let mut images = Vec::with_capacity(n);
        for (k, image) in self.map.iter().enumerate() {
            if image.is_empty() {
                return Err(structure(format!("image of {:?} is empty", self.points[k])));
            }
            let mut members = Vec::with_capacity(image.len());
            for label in image {
                let id = ids.get(label.as_str()).ok_or_else(|| {
                    structure(format!(
                        "image of {:?} references unknown label {label:?}",
                        self.points[k]
                    ))
                })?;
                members.push(*id);
            }
            images.push(CompactSet::new(members).expect("nonempty"));
        }

        let matrices: Vec<_> = self.metrics.iter().map(|m| m.matrix.clone()).collect();
        let family =
            PseudometricFamily::from_matrices(&matrices).map_err(|e| structure(e.to_string()))?;
        let map = MultiMap::new(&family, images).map_err(|e| structure(e.to_string()))?;
        let params = match &self.params {
            None => None,
            Some(p) => Some(p.resolve(self.metrics.len())?),
        };
        Ok(LoadedInstance {
            labels: self.points.clone(),
            metric_names: self.metrics.iter().map(|m| m.name.clone()).collect(),
            family,
            map,
            params,
        })
    }

    /// Renders a generated instance with labels `p0, p1, ...` and metrics
    /// `d0, d1, ...`.
    pub fn from_generated(instance: &GeneratedInstance) -> Self {
        let family = &instance.family;
        let n = family.point_count();
        let label = |x: PointId| format!("p{}", x.index());
        let metrics = (0..family.index_count())
            .map(|i| NamedMetric {
                name: format!("d{i}"),
                matrix: family.table(i).chunks(n).map(<[f64]>::to_vec).collect(),
            })
            .collect();
        let map = instance
            .map
            .images()
            .iter()
            .map(|image| image.iter().map(label).collect())
            .collect();
        let coeffs = instance
            .params
            .all_coefficients()
            .iter()
            .map(|c| CoefficientsDocument {
                a: c.a,
                b: c.b,
                c: c.c,
            })
            .collect();
        InstanceDocument {
            points: family.points().map(label).collect(),
            metrics,
            map,
            params: Some(ParamsDocument {
                r: Some(instance.params.r()),
                coeffs,
            }),
        }
    }
}

impl ParamsDocument {
    fn resolve(&self, metric_count: usize) -> Result<ContractionParams, DocumentError> {
        let triples: Vec<Coefficients> = match self.coeffs.len() {
            1 => vec![self.coeffs[0]; metric_count],
            len if len == metric_count => self.coeffs.clone(),
            len => {
                return Err(DocumentError::Structure(format!(
                    "params list {len} coefficient triples for {metric_count} metrics"
                )))
            }
        }
        .into_iter()
        .map(|t| Coefficients::new(t.a, t.b, t.c))
        .collect();
        ContractionParams::new(self.r.unwrap_or(1), triples).map_err(DocumentError::Params)
    }
}
