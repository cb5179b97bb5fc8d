//! JSON instances: a triangulated region and a correspondence over it.

use serde::{Deserialize, Serialize};

use super::complex::Complex;
use super::correspondence::SimplicialCorrespondence;
use super::pair::{Ambient, TriangulatedPair};
use super::SpanError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseFile {
    pub dimension: usize,
    pub ambient: Ambient,
    pub vertices: Vec<Vec<f64>>,
    /// top-dimensional simplices
    pub simplices: Vec<Vec<usize>>,
    /// ∂W as (d−1)-simplices; checked against the computed boundary
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrespondenceFile {
    pub labels: Vec<usize>,
    pub values: Vec<Vec<f64>>,
    pub simplices: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanFile {
    pub base: BaseFile,
    pub correspondence: CorrespondenceFile,
}

impl SpanFile {
    pub fn from_parts(pair: &TriangulatedPair, f: &SimplicialCorrespondence) -> Self {
        let d = pair.dimension();
        let top_f = f
            .complex()
            .all()
            .filter(|s| !is_face_of_larger(f.complex(), s))
            .cloned()
            .collect();
        Self {
            base: BaseFile {
                dimension: d,
                ambient: pair.ambient(),
                vertices: pair.coords().to_vec(),
                simplices: pair.top_simplices().to_vec(),
                boundary: Some(pair.boundary().simplices(d - 1).to_vec()),
            },
            correspondence: CorrespondenceFile {
                labels: f.labels().to_vec(),
                values: f.values().to_vec(),
                simplices: top_f,
            },
        }
    }

    pub fn into_parts(self) -> Result<(TriangulatedPair, SimplicialCorrespondence), SpanError> {
        let b = self.base;
        if b.dimension != b.ambient.dimension() {
            return Err(SpanError::Invalid(format!(
                "dimension {} does not match a {:?} ambient",
                b.dimension, b.ambient
            )));
        }
        let pair = TriangulatedPair::new(b.ambient, b.vertices, &b.simplices)?;
        if let Some(declared) = b.boundary {
            let declared = Complex::from_simplices(&declared);
            if &declared != pair.boundary() {
                return Err(SpanError::Invalid(
                    "declared boundary differs from the faces of exactly one top simplex".into(),
                ));
            }
        }
        let c = self.correspondence;
        let f = SimplicialCorrespondence::new(&pair, c.labels, c.values, &c.simplices)?;
        Ok((pair, f))
    }
}

/// Whether `s` is a proper face of some simplex of `c`.
fn is_face_of_larger(c: &Complex, s: &[usize]) -> bool {
    c.simplices(s.len())
        .iter()
        .any(|t| s.iter().all(|v| t.contains(v)))
}

pub fn span_instance_from_str(
    text: &str,
) -> Result<(TriangulatedPair, SimplicialCorrespondence), SpanError> {
    let file: SpanFile =
        serde_json::from_str(text).map_err(|e| SpanError::Invalid(format!("JSON: {e}")))?;
    file.into_parts()
}

pub fn span_instance_to_string(pair: &TriangulatedPair, f: &SimplicialCorrespondence) -> String {
    serde_json::to_string_pretty(&SpanFile::from_parts(pair, f)).expect("serializable")
}
