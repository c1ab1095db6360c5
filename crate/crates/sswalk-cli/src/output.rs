//! Result emission: CSV or NDJSON, to stdout or atomically to a file, with
//! the resolved config embedded as metadata so every artifact is
//! self-describing.

use crate::config::{ExperimentConfig, OutputFormat};
use anyhow::{Context, Result};
use std::io::Write;
use std::path::Path;

fn meta_object(config: &ExperimentConfig) -> serde_json::Value {
    serde_json::json!({
        "tool": "sswalk",
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
    })
}

/// A fully rendered result document.
pub struct Document {
    text: String,
}

impl Document {
    /// CSV: '#'-prefixed metadata comment, header row, then data rows.
    pub fn csv(config: &ExperimentConfig, header: &[&str], rows: &[Vec<String>]) -> Self {
        let mut text = String::new();
        text.push_str("# meta: ");
        text.push_str(&meta_object(config).to_string());
        text.push('\n');
        text.push_str(&header.join(","));
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        Document { text }
    }

    /// NDJSON: a metadata object on the first line, one record per line after.
    pub fn ndjson(config: &ExperimentConfig, records: &[serde_json::Value]) -> Self {
        let mut text = String::new();
        text.push_str(&serde_json::json!({ "meta": meta_object(config) }).to_string());
        text.push('\n');
        for r in records {
            text.push_str(&r.to_string());
            text.push('\n');
        }
        Document { text }
    }

    /// Writes to the path (atomically, temp file + rename) or to stdout.
    pub fn emit(&self, out: Option<&Path>) -> Result<()> {
        match out {
            None => {
                std::io::stdout()
                    .write_all(self.text.as_bytes())
                    .context("cannot write to stdout")?;
                Ok(())
            }
            Some(path) => {
                let parent = match path.parent() {
                    Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                    _ => std::path::PathBuf::from("."),
                };
                let mut tmp = tempfile::NamedTempFile::new_in(&parent).with_context(|| {
                    format!("cannot create temporary file in {}", parent.display())
                })?;
                tmp.write_all(self.text.as_bytes())
                    .with_context(|| format!("cannot write {}", path.display()))?;
                tmp.flush()?;
                tmp.persist(path)
                    .with_context(|| format!("cannot move output into {}", path.display()))?;
                Ok(())
            }
        }
    }
}

/// Formats an f64 with shortest-roundtrip precision, locale-independent.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

/// Convenience for optional values: empty cell when absent.
pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Renders records either way based on the config's format field.
pub fn render(
    config: &ExperimentConfig,
    header: &[&str],
    rows: &[Vec<String>],
    records: &[serde_json::Value],
) -> Document {
    match config.format {
        OutputFormat::Csv => Document::csv(config, header, rows),
        OutputFormat::Ndjson => Document::ndjson(config, records),
    }
}

/// Renders and emits in one call, honoring the config's `out` path.
pub fn write_document(
    config: &ExperimentConfig,
    header: &[&str],
    rows: &[Vec<String>],
    records: &[serde_json::Value],
) -> Result<()> {
    render(config, header, rows, records).emit(config.out.as_deref().map(Path::new))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::OutputFormat;

    fn sample_config() -> ExperimentConfig {
        ExperimentConfig {
            command: "spectrum".into(),
            claim: None,
            theta1: Some(0.5),
            theta2: None,
            theta2b: None,
            n: None,
            n2: None,
            steps: None,
            kgrid: Some(8),
            tgrid: None,
            tolerance: None,
            window: None,
            boundary: None,
            smoothing: None,
            twod: None,
            format: OutputFormat::Csv,
            out: None,
            seed: None,
            threads: None,
        }
    }

    #[test]
    fn csv_document_embeds_metadata_comment() {
        let doc = Document::csv(
            &sample_config(),
            &["a", "b"],
            &[vec!["1".into(), "2".into()]],
        );
        let mut lines = doc.text.lines();
        let meta = lines.next().unwrap();
        assert!(meta.starts_with("# meta: {"));
        assert!(meta.contains("\"command\":\"spectrum\""));
        assert_eq!(lines.next().unwrap(), "a,b");
        assert_eq!(lines.next().unwrap(), "1,2");
    }

    #[test]
    fn ndjson_document_is_one_object_per_line() {
        let doc = Document::ndjson(&sample_config(), &[serde_json::json!({"x": 1})]);
        let lines: Vec<&str> = doc.text.lines().collect();
        assert_eq!(lines.len(), 2);
        let meta: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(meta["meta"]["tool"], "sswalk");
        let rec: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(rec["x"], 1);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        std::fs::write(&path, "old").unwrap();
        let doc = Document::csv(&sample_config(), &["h"], &[]);
        doc.emit(Some(&path)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("# meta"));
        assert!(!text.contains("old"));
    }

    #[test]
    fn numbers_render_without_locale_separators() {
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(-1.5e-13), "-0.00000000000015");
        assert_eq!(opt_num(None), "");
    }
}
