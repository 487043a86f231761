//! JSON interchange for complexes, metrics and cochains, content hashes,
//! and CSV export of optimizer traces.
//!
//! A complex document looks like
//!
//! ```json
//! {"vertices": 3, "edges": [[0,1],[0,2],[1,2]], "triangles": [[0,1,2]],
//!  "lengths": ["1.0000000000000000e0", "1.0000000000000000e0", "1.0000000000000000e0"],
//!  "cochains": [{"name": "a", "degree": 1, "support": [0]}]}
//! ```
//!
//! Lengths are written as decimal strings with 17 significant digits, which
//! round-trip every `f64` exactly; plain JSON numbers are accepted on input.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::complex::{Complex2, ComplexError};
use crate::metric::{MetricComplex, MetricError, PLMetric};
use crate::optimize::OptimizationTrace;
use crate::realization::SurfaceRealization;
use crate::z2::{AlgebraError, Z2Vector};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid complex: {0}")]
    Complex(#[from] ComplexError),
    #[error("invalid metric: {0}")]
    Metric(#[from] MetricError),
    #[error("document has no \"lengths\" field")]
    MissingLengths,
    #[error("cochain {name:?}: {source}")]
    Cochain { name: String, source: AlgebraError },
    #[error("no cochain named {0:?}")]
    UnknownCochain(String),
    #[error("length {0:?} is not a number")]
    BadLength(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedCochain {
    pub name: String,
    pub degree: usize,
    pub support: Vec<usize>,
}

impl NamedCochain {
    pub fn new(name: impl Into<String>, v: &Z2Vector) -> Self {
        Self { name: name.into(), degree: v.degree(), support: v.support() }
    }

    pub fn to_vector(&self, complex: &Complex2) -> Result<Z2Vector, IoError> {
        Z2Vector::from_support(complex, self.degree, self.support.iter().copied())
            .map_err(|source| IoError::Cochain { name: self.name.clone(), source })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexDocument {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub triangles: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "length_codec")]
    pub lengths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cochains: Vec<NamedCochain>,
}

impl ComplexDocument {
    pub fn from_complex(c: &Complex2) -> Self {
        Self {
            vertices: c.vertex_count(),
            edges: c.edges().to_vec(),
            triangles: c.triangles().to_vec(),
            lengths: None,
            cochains: Vec::new(),
        }
    }

    pub fn from_metric_complex(mc: &MetricComplex) -> Self {
        Self { lengths: Some(mc.metric().lengths().to_vec()), ..Self::from_complex(mc.complex()) }
    }

    pub fn with_cochain(mut self, c: NamedCochain) -> Self {
        self.cochains.push(c);
        self
    }

    pub fn to_complex(&self) -> Result<Complex2, IoError> {
        Ok(Complex2::new(self.vertices, self.edges.clone(), self.triangles.clone())?)
    }

    /// Lengths are matched to edges by position in the document, so the
    /// edge list must already be sorted; otherwise they are re-aligned.
    pub fn to_metric_complex(&self) -> Result<MetricComplex, IoError> {
        let lengths = self.lengths.as_ref().ok_or(IoError::MissingLengths)?;
        let complex = self.to_complex()?;
        if lengths.len() != self.edges.len() {
            return Err(MetricError::LengthCount { expected: self.edges.len(), got: lengths.len() }.into());
        }
        let mut aligned = vec![0.0; lengths.len()];
        for (&[u, v], &l) in self.edges.iter().zip(lengths) {
            let e = complex.edge_index(u, v).expect("edge present after validation");
            aligned[e] = l;
        }
        Ok(MetricComplex::new(complex, PLMetric::new(aligned))?)
    }

    pub fn cochain(&self, complex: &Complex2, name: &str) -> Result<Z2Vector, IoError> {
        self.cochains
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| IoError::UnknownCochain(name.to_string()))?
            .to_vector(complex)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn parse(s: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Serialized metric complex.
pub fn to_json(mc: &MetricComplex) -> String {
    ComplexDocument::from_metric_complex(mc).to_json()
}

pub fn parse_metric_complex(s: &str) -> Result<MetricComplex, IoError> {
    ComplexDocument::parse(s)?.to_metric_complex()
}

/// Exact decimal form of a length.
pub fn format_length(x: f64) -> String {
    format!("{x:.16e}")
}

mod length_codec {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(v) => s.collect_seq(v.iter().map(|&x| format_length(x))),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
        let raw: Option<Vec<Repr>> = Option::deserialize(d)?;
        raw.map(|v| {
            v.into_iter()
                .map(|r| match r {
                    Repr::Num(x) => Ok(x),
                    Repr::Str(s) => s
                        .trim()
                        .parse::<f64>()
                        .map_err(|_| serde::de::Error::custom(IoError::BadLength(s.clone()))),
                })
                .collect()
        })
        .transpose()
    }
}

fn hex_digest(h: Sha256) -> String {
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of the combinatorial structure.
pub fn complex_hash(c: &Complex2) -> String {
    let mut h = Sha256::new();
    h.update((c.vertex_count() as u64).to_le_bytes());
    h.update((c.edge_count() as u64).to_le_bytes());
    for e in c.edges() {
        for &v in e {
            h.update((v as u64).to_le_bytes());
        }
    }
    h.update((c.triangle_count() as u64).to_le_bytes());
    for t in c.triangles() {
        for &v in t {
            h.update((v as u64).to_le_bytes());
        }
    }
    hex_digest(h)
}

/// SHA-256 of the exact bit patterns of the edge lengths.
pub fn metric_hash(m: &PLMetric) -> String {
    let mut h = Sha256::new();
    for &l in m.lengths() {
        h.update(l.to_bits().to_le_bytes());
    }
    hex_digest(h)
}

/// Realization with the surface's own edge lengths when a metric is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationDocument {
    #[serde(flatten)]
    pub realization: SurfaceRealization,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "length_codec")]
    pub lengths: Option<Vec<f64>>,
}

impl RealizationDocument {
    pub fn new(realization: SurfaceRealization, metric: Option<&PLMetric>) -> Self {
        let lengths = metric.map(|m| realization.pullback_metric(m).into_lengths());
        Self { realization, lengths }
    }
}

/// Writes `iteration,ratio,accepted` rows.
pub fn write_trace_csv<W: std::io::Write>(trace: &OptimizationTrace, w: W) -> Result<(), IoError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iteration", "ratio", "accepted"])?;
    for step in &trace.steps {
        out.write_record([step.iteration.to_string(), format_length(step.ratio), step.accepted.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads rows written by [`write_trace_csv`] as `(iteration, ratio, accepted)`.
pub fn read_trace_csv<R: std::io::Read>(r: R) -> Result<Vec<(usize, f64, bool)>, IoError> {
    let mut rd = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for rec in rd.deserialize() {
        let (i, ratio, acc): (usize, String, bool) = rec?;
        let ratio = ratio.parse().map_err(|_| IoError::BadLength(ratio.clone()))?;
        rows.push((i, ratio, acc));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{hex_torus, rp2_minimal};

    #[test]
    fn round_trip_is_exact() {
        let mc = hex_torus(3, 4, 1.3).unwrap();
        let back = parse_metric_complex(&to_json(&mc)).unwrap();
        assert_eq!(back, mc);
        for (a, b) in back.metric().lengths().iter().zip(mc.metric().lengths()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(metric_hash(back.metric()), metric_hash(mc.metric()));
    }

    #[test]
    fn numbers_are_accepted() {
        let s = r#"{"vertices": 3, "edges": [[1,2],[0,1],[0,2]], "triangles": [[0,1,2]], "lengths": [5, 3, "4"]}"#;
        let mc = parse_metric_complex(s).unwrap();
        // Re-aligned to the sorted edge order (0,1), (0,2), (1,2).
        assert_eq!(mc.metric().lengths(), &[3.0, 4.0, 5.0]);
        assert_eq!(mc.total_area(), 6.0);
    }

    #[test]
    fn diagnostics() {
        let err = ComplexDocument::parse(r#"{"vertices": 3, "triangles": []}"#).unwrap_err();
        assert!(err.to_string().contains("edges"), "{err}");
        let err = parse_metric_complex(r#"{"vertices": 3, "edges": [[0,1]], "triangles": [[0,1,2]], "lengths": [1]}"#).unwrap_err();
        assert!(err.to_string().contains("missing face"), "{err}");
        let err = parse_metric_complex(r#"{"vertices": 2, "edges": [[0,1]], "triangles": [], "lengths": ["x"]}"#).unwrap_err();
        assert!(err.to_string().contains("not a number"), "{err}");
        let err = parse_metric_complex(r#"{"vertices": 2, "edges": [[0,1]], "triangles": []}"#).unwrap_err();
        assert!(matches!(err, IoError::MissingLengths));
    }

    #[test]
    fn cochains_travel_with_the_complex() {
        let mc = rp2_minimal().unwrap();
        let a = Z2Vector::from_support(mc.complex(), 1, [0, 4]).unwrap();
        let doc = ComplexDocument::from_metric_complex(&mc).with_cochain(NamedCochain::new("a", &a));
        let back = ComplexDocument::parse(&doc.to_json()).unwrap();
        assert_eq!(back.cochain(mc.complex(), "a").unwrap(), a);
        assert!(matches!(back.cochain(mc.complex(), "b"), Err(IoError::UnknownCochain(_))));
    }

    #[test]
    fn hashes_distinguish() {
        let a = rp2_minimal().unwrap();
        let b = a.scaled(2.0).unwrap();
        assert_eq!(complex_hash(a.complex()), complex_hash(b.complex()));
        assert_ne!(metric_hash(a.metric()), metric_hash(b.metric()));
        assert_eq!(complex_hash(a.complex()).len(), 64);
    }
}
