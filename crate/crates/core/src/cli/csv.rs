use std::fmt::Write as _;
use std::io;
use std::path::Path;

/// Render a real with 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Comma-separated table with a fixed column count and LF line endings.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    /// Append a row of preformatted cells.
    ///
    /// # Panics
    /// If the cell count differs from the header width.
    pub fn push(&mut self, cells: Vec<String>) {
        assert_eq!(
            cells.len(),
            self.header.len(),
            "row width differs from header width"
        );
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.header.join(",")).expect("write to String");
        for row in &self.rows {
            writeln!(out, "{}", row.join(",")).expect("write to String");
        }
        out
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_real(-2.0), "-2.0000000000000000e0");
        let v = 1.0 / 3.0;
        assert_eq!(fmt_real(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn render_layout() {
        let mut t = CsvTable::new(["a", "b"]);
        t.push(vec!["1".into(), fmt_real(0.5)]);
        assert_eq!(t.render(), "a,b\n1,5.0000000000000000e-1\n");
    }

    #[test]
    #[should_panic]
    fn ragged_rows_rejected() {
        CsvTable::new(["a", "b"]).push(vec!["1".into()]);
    }
}
