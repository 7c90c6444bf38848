//! Deterministic CSV formatting, atomic file writes and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

/// 17 significant digits in scientific notation.
pub fn fmt_f(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}

/// In-memory CSV table with a fixed header.
#[derive(Debug, Clone)]
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Csv { buf, columns: header.len() }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        debug_assert_eq!(cells.len(), self.columns);
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            match c {
                Cell::F(x) => self.buf.push_str(&fmt_f(*x)),
                Cell::U(n) => {
                    let _ = write!(self.buf, "{n}");
                }
            }
        }
        self.buf.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }
}

pub enum Cell {
    F(f64),
    U(usize),
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// `spec.csv` + `vectors` → `spec_vectors.csv`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}_{suffix}{ext}"))
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub version: String,
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn path_for(out: &Path) -> PathBuf {
        let name = out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        out.with_file_name(format!("{name}.manifest.json"))
    }

    pub fn write(&self, out: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        write_atomic(&Self::path_for(out), &(text + "\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_stable() {
        assert_eq!(fmt_f(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f(-0.0), "0.0000000000000000e0");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_f(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_rows() {
        let mut c = Csv::new(&["index", "value"]);
        c.row(&[Cell::U(3), Cell::F(0.5)]);
        assert_eq!(c.as_str(), "index,value\n3,5.0000000000000000e-1\n");
    }

    #[test]
    fn atomic_write_and_siblings() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("spec.csv");
        write_atomic(&p, "a\n").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "a\n");
        assert_eq!(sibling(&p, "vectors").file_name().unwrap(), "spec_vectors.csv");
        assert_eq!(RunManifest::path_for(&p).file_name().unwrap(), "spec.csv.manifest.json");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
