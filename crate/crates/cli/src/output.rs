//! CSV and JSON writers. Floats are written as `{:.16e}` (17 significant
//! digits), rows end in LF, so identical inputs give identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::CliError;

pub struct CsvWriter {
    path: PathBuf,
    inner: BufWriter<File>,
    line: String,
}

/// One CSV cell.
pub enum Cell {
    Int(usize),
    Real(f64),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl CsvWriter {
    pub fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self, CliError> {
        let path = dir.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = Self { path, inner: BufWriter::new(file), line: String::new() };
        w.raw(&header.join(","))?;
        Ok(w)
    }

    fn raw(&mut self, line: &str) -> Result<(), CliError> {
        self.inner
            .write_all(line.as_bytes())
            .and_then(|_| self.inner.write_all(b"\n"))
            .map_err(|e| CliError::io(&self.path, e))
    }

    pub fn row(&mut self, cells: &[Cell]) -> Result<(), CliError> {
        use std::fmt::Write as _;
        let mut line = std::mem::take(&mut self.line);
        line.clear();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            let _ = match cell {
                Cell::Int(v) => write!(line, "{v}"),
                Cell::Real(v) => write!(line, "{v:.16e}"),
            };
        }
        let result = self.raw(&line);
        self.line = line;
        result
    }

    /// Appends re, im and |z|² of `z` to `prefix`.
    pub fn complex_row(&mut self, prefix: &[f64], z: Complex64) -> Result<(), CliError> {
        let mut cells: Vec<Cell> = prefix.iter().map(|&v| Cell::Real(v)).collect();
        cells.extend([Cell::Real(z.re), Cell::Real(z.im), Cell::Real(z.norm_sqr())]);
        self.row(&cells)
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.inner.flush().map_err(|e| CliError::io(&self.path, e))?;
        Ok(self.path)
    }
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_float_format() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = CsvWriter::create(dir.path(), "t.csv", &["n", "x"]).unwrap();
        w.row(&[Cell::Int(3), Cell::Real(0.1)]).unwrap();
        w.complex_row(&[-2.5], Complex64::new(1.0, -1.0)).unwrap();
        let path = w.finish().unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(
            text,
            "n,x\n3,1.0000000000000001e-1\n-2.5000000000000000e0,1.0000000000000000e0,-1.0000000000000000e0,2.0000000000000000e0\n"
        );
    }
}
