//! Field data ingestion.

use std::io::{BufRead, BufReader};
use std::path::Path;

use conductor_core::numberfield::{parse_field_line, NumberField};

use crate::error::CliError;

/// A line that could not be parsed, with its 1-based number.
#[derive(Clone, Debug, PartialEq)]
pub struct LineWarning {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for LineWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Reads a JSON-lines field file. Blank lines and lines starting with `#` are skipped;
/// malformed lines are reported and skipped. Unlabelled fields get `line<N>`.
pub fn load_fields(path: &Path) -> Result<(Vec<NumberField>, Vec<LineWarning>), CliError> {
    let file =
        std::fs::File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut fields = Vec::new();
    let mut warnings = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match parse_field_line(trimmed) {
            Ok(mut k) => {
                if k.label.is_empty() {
                    k.label = format!("line{}", i + 1);
                }
                fields.push(k);
            }
            Err(e) => {
                let w = LineWarning {
                    line: i + 1,
                    message: e.to_string(),
                };
                log::warn!("{}: {w}", path.display());
                warnings.push(w);
            }
        }
    }
    Ok((fields, warnings))
}
