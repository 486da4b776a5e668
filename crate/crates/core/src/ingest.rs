//! Loading, validation, and normalization of raw series data.
//!
//! Input is UTF-8 CSV with LF or CRLF line endings: either one value per
//! row or `timestamp,value` rows. Lines starting with `#` are skipped. A
//! header row is auto-detected when the first row's value column does not
//! parse as a number. Parsing is plain decimal or scientific notation with
//! `.` as the decimal separator, independent of locale.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Input layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Format {
    /// One value per row.
    SingleColumn,
    /// `timestamp,value` rows; the timestamp is carried as an opaque label
    /// and never interpreted.
    TimestampValue,
}

/// Sign convention applied on load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignConvention {
    AsIs,
    /// Multiply every value by -1 (returns-to-losses convention).
    Negate,
}

/// An ordered series of finite loss observations (larger = worse).
#[derive(Debug, Clone, Serialize)]
pub struct LossSeries {
    values: Vec<f64>,
    label: String,
    timestamps: Option<Vec<String>>,
}

impl LossSeries {
    pub fn new(values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("series has no observations".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("series contains non-finite values".into()));
        }
        Ok(Self {
            values,
            label: label.into(),
            timestamps: None,
        })
    }

    pub fn with_timestamps(
        values: Vec<f64>,
        timestamps: Vec<String>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if timestamps.len() != values.len() {
            return Err(Error::Input(
                "timestamp column length does not match value column".into(),
            ));
        }
        let mut series = Self::new(values, label)?;
        series.timestamps = Some(timestamps);
        Ok(series)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn timestamps(&self) -> Option<&[String]> {
        self.timestamps.as_deref()
    }

    /// Render as single-column text, one value per line, using the shortest
    /// decimal form that parses back to the identical float.
    pub fn to_single_column(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 12);
        for v in &self.values {
            out.push_str(&format!("{v}\n"));
        }
        out
    }
}

fn parse_value(field: &str) -> Option<f64> {
    let parsed: f64 = field.trim().parse().ok()?;
    parsed.is_finite().then_some(parsed)
}

/// Parse series text. `label` names the series in downstream reports.
pub fn parse_series(
    text: &str,
    format: Format,
    sign: SignConvention,
    label: &str,
) -> Result<LossSeries> {
    let mut values = Vec::new();
    let mut timestamps = Vec::new();
    let mut header_allowed = true;

    for (idx, raw_line) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line).trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }

        let (timestamp, value_field) = match format {
            Format::SingleColumn => (None, line),
            Format::TimestampValue => match line.split_once(',') {
                Some((ts, value)) => (Some(ts.trim()), value),
                None => {
                    if header_allowed {
                        header_allowed = false;
                        continue;
                    }
                    return Err(Error::InputAt {
                        line: line_no,
                        message: "expected `timestamp,value`".into(),
                    });
                }
            },
        };

        match parse_value(value_field) {
            Some(v) => {
                header_allowed = false;
                let v = match sign {
                    SignConvention::AsIs => v,
                    SignConvention::Negate => -v,
                };
                values.push(v);
                if let Some(ts) = timestamp {
                    timestamps.push(ts.to_string());
                }
            }
            None => {
                // Only the first row may be a non-numeric header.
                if header_allowed {
                    header_allowed = false;
                    continue;
                }
                return Err(Error::InputAt {
                    line: line_no,
                    message: format!("value column is not a finite number: {value_field:?}"),
                });
            }
        }
    }

    if values.is_empty() {
        return Err(Error::Input("no data rows found".into()));
    }
    match format {
        Format::SingleColumn => LossSeries::new(values, label),
        Format::TimestampValue => LossSeries::with_timestamps(values, timestamps, label),
    }
}

/// Load a series from a file. The series label is the file stem.
pub fn load_series(path: &Path, format: Format, sign: SignConvention) -> Result<LossSeries> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".to_string());
    parse_series(&text, format, sign, &label)
}

/// Write a series as single-column text.
pub fn write_single_column(series: &LossSeries, path: &Path) -> Result<()> {
    std::fs::write(path, series.to_single_column())
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}
