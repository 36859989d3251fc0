use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::{LabError, SweepRecord};

pub const CSV_HEADER: &str =
    "epsilon,dimension,seed,noise,lambda,gamma,iterations,max_gap,bound,slope,pass";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for ReportFormat {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "jsonl" => Ok(ReportFormat::Jsonl),
            other => Err(LabError::InvalidConfig(format!(
                "unknown report format `{other}`"
            ))),
        }
    }
}

/// Serializes records; floats use the shortest round-trip representation.
pub fn render_report(records: &[SweepRecord], format: ReportFormat) -> Result<String, LabError> {
    let err = |e: &dyn std::fmt::Display| LabError::Report {
        path: "<memory>".into(),
        message: e.to_string(),
    };
    match format {
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(Vec::new());
            for r in records {
                w.serialize(r).map_err(|e| err(&e))?;
            }
            let body = w.into_inner().map_err(|e| err(&e))?;
            let body = String::from_utf8(body).map_err(|e| err(&e))?;
            Ok(format!("{CSV_HEADER}\n{body}"))
        }
        ReportFormat::Jsonl => {
            let mut out = String::new();
            for r in records {
                out.push_str(&serde_json::to_string(r).map_err(|e| err(&e))?);
                out.push('\n');
            }
            Ok(out)
        }
    }
}

pub fn write_report(
    records: &[SweepRecord],
    path: &Path,
    format: ReportFormat,
) -> Result<(), LabError> {
    let text = render_report(records, format)?;
    fs::write(path, text).map_err(|e| LabError::Report {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> SweepRecord {
        SweepRecord {
            epsilon: 0.6,
            dimension: 2,
            seed: 3,
            noise: "sine".into(),
            lambda: 0.0,
            gamma: 2.0 / 3.0,
            iterations: 15,
            max_gap: 0.1,
            bound: 0.4,
            slope: Some(-1.386),
            pass: true,
            error: None,
        }
    }

    #[test]
    fn csv_shapes() {
        assert_eq!(
            render_report(&[], ReportFormat::Csv).unwrap(),
            format!("{CSV_HEADER}\n")
        );
        let text = render_report(&[record()], ReportFormat::Csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1].split(',').count(), 11);
        assert!(lines[1].starts_with("0.6,2,3,sine,"));
        assert!(lines[1].ends_with(",true"));
    }

    #[test]
    fn jsonl_mirrors_header() {
        let text = render_report(&[record(), record()], ReportFormat::Jsonl).unwrap();
        assert_eq!(text.lines().count(), 2);
        let v: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        let obj = v.as_object().unwrap();
        assert_eq!(obj.len(), 11);
        for key in CSV_HEADER.split(',') {
            assert!(obj.contains_key(key), "{key}");
        }
    }

    #[test]
    fn io_errors_carry_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("out.csv");
        let err = write_report(&[record()], &path, ReportFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("missing"));
    }

    #[test]
    fn format_parse() {
        assert_eq!(
            "JSONL".parse::<ReportFormat>().unwrap(),
            ReportFormat::Jsonl
        );
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}
