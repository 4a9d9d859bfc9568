//! CSV and JSON emission with a fixed 17-significant-digit number format.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::CliError;

/// Scientific notation with 17 significant digits.
pub fn num(x: f64) -> String {
    // -0 prints as 0
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// Rounds to 17 significant digits before JSON serialization.
pub fn round17(x: f64) -> f64 {
    if x.is_finite() {
        num(x).parse().unwrap_or(x)
    } else {
        x
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for JsonComplex {
    fn from(c: Complex64) -> Self {
        Self { re: round17(c.re), im: round17(c.im) }
    }
}

pub struct Csv {
    text: String,
    width: usize,
}

impl Csv {
    pub fn new(sha256: &str, experiment: &str, columns: &[String]) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "# config_sha256={sha256} experiment={experiment}");
        let _ = writeln!(text, "{}", columns.join(","));
        Self { text, width: columns.len() }
    }

    pub fn row(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.width);
        let cells: Vec<String> = values.iter().map(|&v| num(v)).collect();
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn comment(&mut self, line: &str) {
        let _ = writeln!(self.text, "# {line}");
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Writes to `path`, or stdout when absent.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}
