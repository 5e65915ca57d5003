//! JSON problem documents.
//!
//! ```json
//! { "n": 1, "m": 1, "k": 1, "t0": 0, "tau": 1,
//!   "F": {"constant": [[0]]}, "G": {"constant": [[1]]},
//!   "R": {"constant": [[1]]}, "C": {"constant": [[1]]},
//!   "Phi1": [[1]], "Phi2": [[1]], "q": [1] }
//! ```
//!
//! Time-varying entries use
//! `{"sampled": {"times": [..], "values": [[[..]]], "interp": "linear"|"previous"}}`.

use super::{Interp, LqProblem, TimeMatrix};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
struct Rows(Matrix);

impl TryFrom<Vec<Vec<f64>>> for Rows {
    type Error = String;

    fn try_from(rows: Vec<Vec<f64>>) -> std::result::Result<Self, String> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err("matrix must have at least one row and one column".into());
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err("matrix rows have different lengths".into());
        }
        Ok(Rows(Matrix::from_fn(rows.len(), cols, |i, j| rows[i][j])))
    }
}

impl From<Rows> for Vec<Vec<f64>> {
    fn from(r: Rows) -> Self {
        r.0.row_iter().map(|row| row.iter().copied().collect()).collect()
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum InterpDoc {
    Linear,
    Previous,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSampled {
    times: Vec<f64>,
    values: Vec<Rows>,
    interp: InterpDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawSampled", into = "RawSampled")]
struct SampledDoc(RawSampled);

impl TryFrom<RawSampled> for SampledDoc {
    type Error = String;

    fn try_from(raw: RawSampled) -> std::result::Result<Self, String> {
        if raw.times.is_empty() {
            return Err("sampled entry needs at least one time".into());
        }
        if raw.times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err("times not increasing".into());
        }
        if raw.times.len() != raw.values.len() {
            return Err(format!(
                "{} times but {} values",
                raw.times.len(),
                raw.values.len()
            ));
        }
        let shape = raw.values[0].0.shape();
        if raw.values.iter().any(|v| v.0.shape() != shape) {
            return Err("sampled values differ in shape".into());
        }
        Ok(SampledDoc(raw))
    }
}

impl From<SampledDoc> for RawSampled {
    fn from(s: SampledDoc) -> Self {
        s.0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MxDoc {
    Constant(Rows),
    Sampled(SampledDoc),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDoc {
    n: usize,
    m: usize,
    k: usize,
    t0: f64,
    tau: f64,
    #[serde(rename = "F")]
    f: MxDoc,
    #[serde(rename = "G")]
    g: MxDoc,
    #[serde(rename = "R")]
    r: MxDoc,
    #[serde(rename = "C")]
    c: MxDoc,
    #[serde(rename = "Phi1")]
    phi1: Rows,
    #[serde(rename = "Phi2")]
    phi2: Rows,
    q: Vec<f64>,
}

impl From<MxDoc> for TimeMatrix {
    fn from(doc: MxDoc) -> Self {
        match doc {
            MxDoc::Constant(rows) => TimeMatrix::Constant(rows.0),
            MxDoc::Sampled(SampledDoc(raw)) => TimeMatrix::Sampled {
                times: raw.times,
                values: raw.values.into_iter().map(|r| r.0).collect(),
                interp: match raw.interp {
                    InterpDoc::Linear => Interp::Linear,
                    InterpDoc::Previous => Interp::Previous,
                },
            },
        }
    }
}

impl From<&TimeMatrix> for MxDoc {
    fn from(tm: &TimeMatrix) -> Self {
        match tm {
            TimeMatrix::Constant(m) => MxDoc::Constant(Rows(m.clone())),
            TimeMatrix::Sampled {
                times,
                values,
                interp,
            } => MxDoc::Sampled(SampledDoc(RawSampled {
                times: times.clone(),
                values: values.iter().cloned().map(Rows).collect(),
                interp: match interp {
                    Interp::Linear => InterpDoc::Linear,
                    Interp::Previous => InterpDoc::Previous,
                },
            })),
        }
    }
}

/// Parse a JSON problem document.
///
/// Syntax and schema problems become `Error::Parse` with the line and
/// column reported by the JSON reader; payloads that disagree with the
/// declared `n`, `m`, `k` become `Error::Shape`.
pub fn parse_problem(text: &str) -> Result<LqProblem> {
    let doc: ProblemDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let k = doc.q.len();
    let p = LqProblem {
        n: doc.n,
        m: doc.m,
        k: doc.k,
        f: doc.f.into(),
        g: doc.g.into(),
        r: doc.r.into(),
        c: doc.c.into(),
        phi1: doc.phi1.0,
        phi2: doc.phi2.0,
        q: Matrix::from_column_slice(k, 1, &doc.q),
        t0: doc.t0,
        tau: doc.tau,
    };
    p.check_shapes()?;
    Ok(p)
}

pub fn serialize_problem(p: &LqProblem) -> String {
    let doc = ProblemDoc {
        n: p.n,
        m: p.m,
        k: p.k,
        t0: p.t0,
        tau: p.tau,
        f: (&p.f).into(),
        g: (&p.g).into(),
        r: (&p.r).into(),
        c: (&p.c).into(),
        phi1: Rows(p.phi1.clone()),
        phi2: Rows(p.phi2.clone()),
        q: p.q.iter().copied().collect(),
    };
    serde_json::to_string_pretty(&doc).expect("problem documents always serialize")
}
