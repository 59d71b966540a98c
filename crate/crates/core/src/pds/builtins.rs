use super::{LinearPds, PdsError};
use crate::linalg::Matrix;

/// The registry of built-in linear test problems.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Builtin {
    /// `[[−ac, bc], [a, −b]]`, start `(2, 1)`.
    Paper2x2 { a: f64, b: f64, c: f64 },
    /// The 5×5 integer Metzler matrix with spectrum `{0, −5±√3, −5±i}`,
    /// start `(0, 3, 3, 3, 4)`.
    Paper5x5,
    /// The stiff chain `[[−K, 0, 0], [K, −1, 0], [0, 1, 0]]`, start
    /// `(0.98, 0.01, 0.01)`.
    PaperStiff { k: f64 },
}

pub fn paper_2x2(a: f64, b: f64, c: f64) -> Matrix {
    Matrix::from_rows(&[[-a * c, b * c], [a, -b]]).expect("2x2 literal")
}

pub fn paper_5x5() -> Matrix {
    Matrix::from_rows(&[
        [-4.0, 2.0, 1.0, 2.0, 2.0],
        [1.0, -4.0, 1.0, 0.0, 2.0],
        [0.0, 0.0, -4.0, 2.0, 0.0],
        [2.0, 2.0, 2.0, -4.0, 0.0],
        [1.0, 0.0, 0.0, 0.0, -4.0],
    ])
    .expect("5x5 literal")
}

pub fn paper_stiff(k: f64) -> Matrix {
    Matrix::from_rows(&[[-k, 0.0, 0.0], [k, -1.0, 0.0], [0.0, 1.0, 0.0]]).expect("3x3 literal")
}

/// Direction of the perturbed start `ỹ⁰ = y* + 1e−5·(−2, 1, 1, −1, 1)` used
/// with the 5×5 problem.
pub fn perturbation_direction_5x5() -> [f64; 5] {
    [-2.0, 1.0, 1.0, -1.0, 1.0]
}

impl Builtin {
    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Paper2x2 { .. } => "paper-2x2",
            Builtin::Paper5x5 => "paper-5x5",
            Builtin::PaperStiff { .. } => "paper-stiff",
        }
    }

    pub fn matrix(&self) -> Matrix {
        match *self {
            Builtin::Paper2x2 { a, b, c } => paper_2x2(a, b, c),
            Builtin::Paper5x5 => paper_5x5(),
            Builtin::PaperStiff { k } => paper_stiff(k),
        }
    }

    pub fn y0(&self) -> Vec<f64> {
        match self {
            Builtin::Paper2x2 { .. } => vec![2.0, 1.0],
            Builtin::Paper5x5 => vec![0.0, 3.0, 3.0, 3.0, 4.0],
            Builtin::PaperStiff { .. } => vec![0.98, 0.01, 0.01],
        }
    }

    pub fn model(&self) -> LinearPds {
        LinearPds::new(self.matrix()).expect("builtin matrices are Metzler")
    }

    /// Address of the form `builtin:name?key=value&...`.
    pub fn address(&self) -> String {
        match *self {
            Builtin::Paper2x2 { a, b, c } => format!("builtin:paper-2x2?a={a}&b={b}&c={c}"),
            Builtin::Paper5x5 => "builtin:paper-5x5".to_string(),
            Builtin::PaperStiff { k } => format!("builtin:paper-stiff?K={k}"),
        }
    }

    /// Resolve an address such as `builtin:paper-stiff?K=100`; the
    /// `builtin:` prefix is optional.
    pub fn resolve(address: &str) -> Result<Self, PdsError> {
        let err = |message: String| PdsError::Parse { line: 1, message };
        let body = address.trim();
        let body = body.strip_prefix("builtin:").unwrap_or(body);
        let (name, query) = match body.split_once('?') {
            Some((n, q)) => (n, q),
            None => (body, ""),
        };
        let mut params: Vec<(&str, f64)> = Vec::new();
        for pair in query.split('&').filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| err(format!("parameter '{pair}' is not key=value")))?;
            let v: f64 = value
                .parse()
                .map_err(|_| err(format!("parameter {key} has non-numeric value '{value}'")))?;
            if !v.is_finite() || v <= 0.0 {
                return Err(err(format!(
                    "parameter {key} must be finite and positive, got {value}"
                )));
            }
            params.push((key, v));
        }
        let mut take = |key: &str, default: f64| match params.iter().position(|(k, _)| *k == key) {
            Some(i) => params.remove(i).1,
            None => default,
        };
        let builtin = match name {
            "paper-2x2" => Builtin::Paper2x2 {
                a: take("a", 1.0),
                b: take("b", 1.0),
                c: take("c", 1.0),
            },
            "paper-5x5" => Builtin::Paper5x5,
            "paper-stiff" => Builtin::PaperStiff { k: take("K", 10.0) },
            other => return Err(err(format!("unknown builtin model '{other}'"))),
        };
        if let Some((key, _)) = params.first() {
            return Err(err(format!("builtin {name} has no parameter '{key}'")));
        }
        Ok(builtin)
    }
}
