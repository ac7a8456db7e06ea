//! CSV text and run manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Fixed 12-significant-digit scientific notation, `nan` for non-finite.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        "nan".to_string()
    }
}

/// Accumulates CSV text; the first line is a `#` comment.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(comment: &str, header: &[&str]) -> Self {
        let mut text = format!("# {}\n", comment.replace('\n', " "));
        text.push_str(&header.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn numbers(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&x| num(x)).collect();
        self.row(&cells);
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// Free text safe inside one CSV cell.
pub fn cell(text: &str) -> String {
    text.replace([',', '\n', '\r'], ";")
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Writes `text` to `path` and records its checksum.
pub fn write_output(path: &Path, text: &str) -> Result<OutputFile, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(OutputFile {
        path: path.display().to_string(),
        sha256: hex(&Sha256::digest(text.as_bytes())),
        bytes: text.len(),
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
pub struct Manifest<C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub engine: String,
    pub config: C,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputFile>,
}

impl<C: Serialize> Manifest<C> {
    pub fn new(
        command: &str,
        engine: &str,
        config: C,
        elapsed: Duration,
        outputs: Vec<OutputFile>,
    ) -> Self {
        Self {
            tool: "tripod",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            engine: engine.to_string(),
            config,
            wall_clock_seconds: elapsed.as_secs_f64(),
            outputs,
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Io(format!("cannot encode manifest: {e}")))?;
        fs::write(path, text + "\n")
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
    }
}

/// `out.csv` -> `out.csv.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(1.0), "1.00000000000e0");
        assert_eq!(num(-0.000123456789012345), "-1.23456789012e-4");
        assert_eq!(num(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let mut c = Csv::new("config: a=1", &["x", "y"]);
        c.numbers(&[0.5, 2.0]);
        assert_eq!(
            c.as_str(),
            "# config: a=1\nx,y\n5.00000000000e-1,2.00000000000e0\n"
        );
        assert_eq!(cell("a,b\nc"), "a;b;c");
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            manifest_path(Path::new("d/run.csv")),
            Path::new("d/run.csv.manifest.json")
        );
    }
}
