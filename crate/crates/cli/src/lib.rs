//! Text format for the objects the `sequens` binary reads and writes.
//!
//! Every input and output is a JSON document with a `"kind"` discriminator:
//! `matrix`, `effect`, `state`, `observable`, `channel`, or `function-table`.
//! Complex entries are two-element arrays `[re, im]`, matrices are row-major
//! nested arrays, and every float is serialized with 17 significant decimal
//! digits so that serialize → parse → serialize is byte-identical and the
//! parsed value is bit-equal to the original.

use serde::Deserialize;
use sequens::{
    ClassicalChannel, Complex64, ComplexMatrix, Effect, Error, FunctionTable, Observable,
    Outcome, State,
};

/// A parsed and validated top-level document.
#[derive(Clone, Debug)]
pub enum Document {
    Matrix(ComplexMatrix),
    Effect(Effect),
    State(State),
    Observable(Observable),
    Channel(ClassicalChannel),
    FunctionTable(FunctionTable),
}

impl Document {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Document::Matrix(_) => "matrix",
            Document::Effect(_) => "effect",
            Document::State(_) => "state",
            Document::Observable(_) => "observable",
            Document::Channel(_) => "channel",
            Document::FunctionTable(_) => "function-table",
        }
    }

    pub fn into_matrix(self) -> Result<ComplexMatrix, DocError> {
        match self {
            Document::Matrix(m) => Ok(m),
            other => Err(DocError::WrongKind { expected: "matrix", got: other.kind_name() }),
        }
    }

    pub fn into_effect(self) -> Result<Effect, DocError> {
        match self {
            Document::Effect(e) => Ok(e),
            other => Err(DocError::WrongKind { expected: "effect", got: other.kind_name() }),
        }
    }

    pub fn into_state(self) -> Result<State, DocError> {
        match self {
            Document::State(s) => Ok(s),
            other => Err(DocError::WrongKind { expected: "state", got: other.kind_name() }),
        }
    }

    pub fn into_observable(self) -> Result<Observable, DocError> {
        match self {
            Document::Observable(a) => Ok(a),
            other => Err(DocError::WrongKind { expected: "observable", got: other.kind_name() }),
        }
    }

    pub fn into_channel(self) -> Result<ClassicalChannel, DocError> {
        match self {
            Document::Channel(c) => Ok(c),
            other => Err(DocError::WrongKind { expected: "channel", got: other.kind_name() }),
        }
    }

    pub fn into_function_table(self) -> Result<FunctionTable, DocError> {
        match self {
            Document::FunctionTable(t) => Ok(t),
            other => {
                Err(DocError::WrongKind { expected: "function-table", got: other.kind_name() })
            }
        }
    }
}

/// Document-level failures, split by exit code: malformed text is a parse
/// error (exit 2), a well-formed document violating a domain invariant is a
/// validation error (exit 1).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DocError {
    #[error("ParseError: {0}")]
    Parse(String),

    #[error("{0}")]
    Validation(#[from] Error),

    #[error("WrongKind: expected a {expected} document, got {got}")]
    WrongKind { expected: &'static str, got: &'static str },

    #[error("IoError: {0}")]
    Io(String),
}

impl DocError {
    pub fn exit_code(&self) -> i32 {
        match self {
            DocError::Parse(_) | DocError::Io(_) => 2,
            DocError::Validation(_) | DocError::WrongKind { .. } => 1,
        }
    }
}

type RawComplex = [f64; 2];
type RawMatrix = Vec<Vec<RawComplex>>;

#[derive(Deserialize)]
struct KindProbe {
    kind: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperatorDoc {
    #[allow(dead_code)]
    kind: String,
    dim: usize,
    matrix: RawMatrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObservableDoc {
    #[allow(dead_code)]
    kind: String,
    dim: usize,
    entries: Vec<RawObservableEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObservableEntry {
    label: String,
    #[serde(default)]
    value: Option<f64>,
    matrix: RawMatrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannelDoc {
    #[allow(dead_code)]
    kind: String,
    rows: Vec<String>,
    cols: Vec<RawOutcome>,
    probs: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutcome {
    label: String,
    #[serde(default)]
    value: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunctionTableDoc {
    #[allow(dead_code)]
    kind: String,
    entries: Vec<RawFunctionEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunctionEntry {
    label: String,
    value: f64,
}

fn parse_raw<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, DocError> {
    serde_json::from_str(text).map_err(|e| DocError::Parse(e.to_string()))
}

fn convert_matrix(declared_dim: usize, raw: &RawMatrix) -> Result<ComplexMatrix, DocError> {
    if raw.len() != declared_dim {
        return Err(DocError::Validation(Error::ShapeMismatch {
            reason: format!("declared dim {declared_dim} but matrix has {} rows", raw.len()),
        }));
    }
    let rows: Vec<Vec<Complex64>> = raw
        .iter()
        .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    Ok(ComplexMatrix::from_rows(&rows)?)
}

fn raw_outcome(label: String, value: Option<f64>) -> Outcome {
    match value {
        Some(v) => Outcome::with_value(label, v),
        None => Outcome::labeled(label),
    }
}

/// Parses a document and runs the validation of the corresponding domain
/// type, so a returned [`Document`] is always a usable object.
pub fn parse_document(text: &str) -> Result<Document, DocError> {
    let probe: KindProbe = parse_raw(text)?;
    match probe.kind.as_str() {
        "matrix" => {
            let raw: RawOperatorDoc = parse_raw(text)?;
            Ok(Document::Matrix(convert_matrix(raw.dim, &raw.matrix)?))
        }
        "effect" => {
            let raw: RawOperatorDoc = parse_raw(text)?;
            Ok(Document::Effect(Effect::new(convert_matrix(raw.dim, &raw.matrix)?)?))
        }
        "state" => {
            let raw: RawOperatorDoc = parse_raw(text)?;
            Ok(Document::State(State::new(convert_matrix(raw.dim, &raw.matrix)?)?))
        }
        "observable" => {
            let raw: RawObservableDoc = parse_raw(text)?;
            let mut entries = Vec::with_capacity(raw.entries.len());
            for entry in raw.entries {
                let matrix = convert_matrix(raw.dim, &entry.matrix)?;
                entries.push((raw_outcome(entry.label, entry.value), Effect::new(matrix)?));
            }
            Ok(Document::Observable(Observable::new(entries)?))
        }
        "channel" => {
            let raw: RawChannelDoc = parse_raw(text)?;
            let cols: Vec<Outcome> =
                raw.cols.into_iter().map(|c| raw_outcome(c.label, c.value)).collect();
            Ok(Document::Channel(ClassicalChannel::new(raw.rows, cols, raw.probs)?))
        }
        "function-table" => {
            let raw: RawFunctionTableDoc = parse_raw(text)?;
            let entries = raw.entries.into_iter().map(|e| (e.label, e.value)).collect();
            Ok(Document::FunctionTable(FunctionTable::new(entries)?))
        }
        other => Err(DocError::Parse(format!("unknown document kind {other:?}"))),
    }
}

/// 17-significant-digit decimal rendering; the unique shortest width that
/// round-trips every finite `f64` exactly.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn complex_json(z: Complex64) -> String {
    format!("[{}, {}]", format_number(z.re), format_number(z.im))
}

/// Row-major nested-array rendering of a matrix, one row per line, each line
/// prefixed with `indent` spaces. Used for the `"matrix"` field of documents
/// and for embedding matrices in report output.
pub fn matrix_json(m: &ComplexMatrix, indent: usize) -> String {
    let pad = " ".repeat(indent);
    let rows: Vec<String> = (0..m.dim())
        .map(|i| {
            let cells: Vec<String> = (0..m.dim()).map(|j| complex_json(m[(i, j)])).collect();
            format!("{pad}  [{}]", cells.join(", "))
        })
        .collect();
    format!("[\n{}\n{pad}]", rows.join(",\n"))
}

fn operator_doc_json(kind: &str, m: &ComplexMatrix) -> String {
    format!(
        "{{\n  \"kind\": {},\n  \"dim\": {},\n  \"matrix\": {}\n}}",
        json_string(kind),
        m.dim(),
        matrix_json(m, 2)
    )
}

fn outcome_fields(outcome: &Outcome) -> String {
    match outcome.value {
        Some(v) => format!(
            "\"label\": {}, \"value\": {}",
            json_string(&outcome.label),
            format_number(v)
        ),
        None => format!("\"label\": {}", json_string(&outcome.label)),
    }
}

fn observable_doc_json(a: &Observable) -> String {
    let entries: Vec<String> = a
        .entries()
        .iter()
        .map(|(outcome, effect)| {
            let value_line = match outcome.value {
                Some(v) => format!("\n      \"value\": {},", format_number(v)),
                None => String::new(),
            };
            format!(
                "    {{\n      \"label\": {},{}\n      \"matrix\": {}\n    }}",
                json_string(&outcome.label),
                value_line,
                matrix_json(&effect.matrix().symmetrized(), 6)
            )
        })
        .collect();
    format!(
        "{{\n  \"kind\": \"observable\",\n  \"dim\": {},\n  \"entries\": [\n{}\n  ]\n}}",
        a.dim(),
        entries.join(",\n")
    )
}

fn channel_doc_json(c: &ClassicalChannel) -> String {
    let rows: Vec<String> = c.row_labels().iter().map(|l| json_string(l)).collect();
    let cols: Vec<String> =
        c.cols().iter().map(|o| format!("    {{{}}}", outcome_fields(o))).collect();
    let probs: Vec<String> = c
        .probs()
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|&p| format_number(p)).collect();
            format!("    [{}]", cells.join(", "))
        })
        .collect();
    format!(
        "{{\n  \"kind\": \"channel\",\n  \"rows\": [{}],\n  \"cols\": [\n{}\n  ],\n  \"probs\": [\n{}\n  ]\n}}",
        rows.join(", "),
        cols.join(",\n"),
        probs.join(",\n")
    )
}

fn function_table_doc_json(t: &FunctionTable) -> String {
    let entries: Vec<String> = t
        .entries()
        .iter()
        .map(|(label, value)| {
            format!(
                "    {{\"label\": {}, \"value\": {}}}",
                json_string(label),
                format_number(*value)
            )
        })
        .collect();
    format!("{{\n  \"kind\": \"function-table\",\n  \"entries\": [\n{}\n  ]\n}}", entries.join(",\n"))
}

/// Canonical text form of a document; no trailing newline. Matrices backed
/// by Hermitian types (effect, state, observable entries) are emitted in
/// canonical Hermitian form — lower triangle the exact conjugate of the
/// upper — which is the form the validating constructors store, so
/// serialize → parse → serialize is byte-identical.
pub fn serialize_document(doc: &Document) -> String {
    match doc {
        Document::Matrix(m) => operator_doc_json("matrix", m),
        Document::Effect(e) => operator_doc_json("effect", &e.matrix().symmetrized()),
        Document::State(s) => operator_doc_json("state", &s.matrix().symmetrized()),
        Document::Observable(a) => observable_doc_json(a),
        Document::Channel(c) => channel_doc_json(c),
        Document::FunctionTable(t) => function_table_doc_json(t),
    }
}
