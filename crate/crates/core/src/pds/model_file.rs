//! Line-oriented model files.
//!
//! ```text
//! # two-species exchange
//! kind linear
//! dim 2
//! matrix
//! -1 1
//! 1 -1
//! y0 2 1
//! ```
//!
//! A document may instead consist of a single builtin address such as
//! `builtin:paper-stiff?K=100`, optionally followed by a `y0` line that
//! replaces the registry start vector.

use super::{Builtin, LinearPds, PdsError};
use crate::linalg::Matrix;

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    Linear,
    Builtin(Builtin),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelDocument {
    pub kind: ModelKind,
    pub matrix: Matrix,
    pub y0: Vec<f64>,
}

impl ModelDocument {
    pub fn from_builtin(builtin: Builtin) -> Self {
        Self {
            kind: ModelKind::Builtin(builtin),
            matrix: builtin.matrix(),
            y0: builtin.y0(),
        }
    }

    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    pub fn to_model(&self) -> Result<LinearPds, PdsError> {
        LinearPds::new(self.matrix.clone())
    }

    /// Serialize in the format accepted by [`parse_model`].
    pub fn to_text(&self) -> String {
        let y0_line = format!("y0 {}\n", join(&self.y0));
        match &self.kind {
            ModelKind::Builtin(b) => {
                let mut out = format!("{}\n", b.address());
                if self.y0 != b.y0() {
                    out.push_str(&y0_line);
                }
                out
            }
            ModelKind::Linear => {
                let mut out = format!("kind linear\ndim {}\nmatrix\n", self.dim());
                for i in 0..self.matrix.rows() {
                    out.push_str(&join(self.matrix.row(i)));
                    out.push('\n');
                }
                out.push_str(&y0_line);
                out
            }
        }
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_err(line: usize, message: impl Into<String>) -> PdsError {
    PdsError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_reals(
    line: usize,
    fields: &[&str],
    expected: usize,
    what: &str,
) -> Result<Vec<f64>, PdsError> {
    if fields.len() != expected {
        return Err(parse_err(
            line,
            format!("{what} has {} entries, expected {expected}", fields.len()),
        ));
    }
    fields
        .iter()
        .map(|s| {
            let v: f64 = s
                .parse()
                .map_err(|_| parse_err(line, format!("'{s}' is not a decimal number")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(line, format!("non-finite literal '{s}'")))
            }
        })
        .collect()
}

/// Parse a model document, resolving builtin addresses against the registry.
pub fn parse_model(text: &str) -> Result<ModelDocument, PdsError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (first_no, first) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty model document"))?;

    if first.starts_with("builtin:") {
        let builtin = Builtin::resolve(first).map_err(|e| match e {
            PdsError::Parse { message, .. } => parse_err(first_no, message),
            other => other,
        })?;
        let mut doc = ModelDocument::from_builtin(builtin);
        if let Some((no, line)) = lines.next() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields[0] != "y0" {
                return Err(parse_err(
                    no,
                    format!("expected 'y0' after builtin address, found '{}'", fields[0]),
                ));
            }
            doc.y0 = parse_reals(no, &fields[1..], doc.dim(), "y0")?;
        }
        if let Some((no, _)) = lines.next() {
            return Err(parse_err(no, "unexpected content after y0"));
        }
        return Ok(doc);
    }

    let fields: Vec<&str> = first.split_whitespace().collect();
    if fields != ["kind", "linear"] {
        return Err(parse_err(
            first_no,
            format!("expected 'kind linear' or a builtin address, found '{first}'"),
        ));
    }

    let (no, line) = lines
        .next()
        .ok_or_else(|| parse_err(first_no + 1, "missing 'dim N'"))?;
    let fields: Vec<&str> = line.split_whitespace().collect();
    let n: usize = match fields.as_slice() {
        ["dim", v] => v
            .parse()
            .map_err(|_| parse_err(no, format!("'{v}' is not a dimension")))?,
        _ => return Err(parse_err(no, format!("expected 'dim N', found '{line}'"))),
    };
    if n == 0 {
        return Err(parse_err(no, "dimension must be at least 1"));
    }

    let (no, line) = lines
        .next()
        .ok_or_else(|| parse_err(no + 1, "missing 'matrix'"))?;
    if line != "matrix" {
        return Err(parse_err(no, format!("expected 'matrix', found '{line}'")));
    }
    let mut data = Vec::with_capacity(n * n);
    let mut last = no;
    for r in 0..n {
        let (no, line) = lines
            .next()
            .ok_or_else(|| parse_err(last + 1, format!("matrix has {r} rows, expected {n}")))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "y0" {
            return Err(parse_err(no, format!("matrix has {r} rows, expected {n}")));
        }
        data.extend(parse_reals(no, &fields, n, "matrix row")?);
        last = no;
    }

    let (no, line) = lines
        .next()
        .ok_or_else(|| parse_err(last + 1, "missing 'y0' line"))?;
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields[0] != "y0" {
        return Err(parse_err(no, format!("expected 'y0', found '{line}'")));
    }
    let y0 = parse_reals(no, &fields[1..], n, "y0")?;
    if let Some((no, _)) = lines.next() {
        return Err(parse_err(no, "unexpected content after y0"));
    }
    let matrix = Matrix::from_row_major(n, n, data)?;
    Ok(ModelDocument {
        kind: ModelKind::Linear,
        matrix,
        y0,
    })
}
