use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::SubjectDay;

/// Dense row-major matrix of f64.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn max(&self) -> f64 {
        self.data.iter().cloned().fold(0.0, f64::max)
    }

    /// Square, symmetric, zero-diagonal, nonnegative and finite.
    pub fn check_dissimilarity(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::InvalidMatrix(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        for i in 0..self.rows {
            if self.get(i, i) != 0.0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                let v = self.get(i, j);
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i},{j}) = {v} is not a finite nonnegative distance"
                    )));
                }
                if v != self.get(j, i) {
                    return Err(Error::InvalidMatrix(format!(
                        "asymmetric entries at ({i},{j})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// What a subject-day distance matrix holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixKind {
    Mismatch,
    Rrdm,
    Raw,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixKind::Mismatch => "Mismatch",
            MatrixKind::Rrdm => "RRDM",
            MatrixKind::Raw => "Raw",
        })
    }
}

impl FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Mismatch" => Ok(MatrixKind::Mismatch),
            "RRDM" | "Rrdm" => Ok(MatrixKind::Rrdm),
            "Raw" => Ok(MatrixKind::Raw),
            other => Err(Error::Parse(format!("unknown matrix kind `{other}`"))),
        }
    }
}

/// Symmetric pairwise distances between subject-days.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub ids: Vec<SubjectDay>,
    pub values: Matrix,
    pub kind: MatrixKind,
    /// Free-form `key=value` notes carried as header comments.
    #[serde(default)]
    pub notes: Vec<(String, String)>,
}

impl DistanceMatrix {
    pub fn new(ids: Vec<SubjectDay>, values: Matrix, kind: MatrixKind) -> Result<Self> {
        if !values.is_square() || values.rows() != ids.len() {
            return Err(Error::InvalidMatrix(format!(
                "{} ids for a {}x{} matrix",
                ids.len(),
                values.rows(),
                values.cols()
            )));
        }
        Ok(DistanceMatrix {
            ids,
            values,
            kind,
            notes: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn with_note(mut self, key: &str, value: impl Into<String>) -> Self {
        self.notes.push((key.to_string(), value.into()));
        self
    }

    /// Restrict to the listed positions, in the given order.
    pub fn select(&self, idx: &[usize]) -> DistanceMatrix {
        let mut m = Matrix::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.set(a, b, self.values.get(i, j));
            }
        }
        DistanceMatrix {
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            values: m,
            kind: self.kind,
            notes: self.notes.clone(),
        }
    }

    /// CSV text: `# kind=...` and note comment lines, a header of ids, then
    /// one row of values per id. Values use shortest round-trip formatting.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# kind={}\n", self.kind);
        for (k, v) in &self.notes {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let header: Vec<String> = self.ids.iter().map(|id| id.to_string()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..self.len() {
            let row: Vec<String> = self.values.row(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut kind = MatrixKind::Raw;
        let mut notes = Vec::new();
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = loop {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("distance CSV has no header".into()))?;
            match line.strip_prefix('#') {
                Some(comment) => {
                    if let Some((k, v)) = comment.trim().split_once('=') {
                        if k.trim() == "kind" {
                            kind = v.parse()?;
                        } else {
                            notes.push((k.trim().to_string(), v.trim().to_string()));
                        }
                    }
                }
                None => break line,
            }
        };
        let ids = header
            .split(',')
            .map(SubjectDay::from_str)
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::with_capacity(ids.len());
        for line in lines {
            let row = line
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("`{v}` is not a number")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let values = Matrix::from_rows(&rows)?;
        let mut dm = DistanceMatrix::new(ids, values, kind)?;
        dm.notes = notes;
        Ok(dm)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text)
    }

    /// Raw little-endian f64 values at `path`, ids one per line at `<path>.ids`
    /// (preceded by the same `#` comment lines as the CSV form).
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::with_capacity(self.values.as_slice().len() * 8);
        for v in self.values.as_slice() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
        let ids_path = ids_path(path);
        let mut f = fs::File::create(&ids_path).map_err(|e| Error::io(&ids_path, e))?;
        let mut text = format!("# kind={}\n", self.kind);
        for (k, v) in &self.notes {
            text.push_str(&format!("# {k}={v}\n"));
        }
        for id in &self.ids {
            text.push_str(&id.to_string());
            text.push('\n');
        }
        f.write_all(text.as_bytes()).map_err(|e| Error::io(&ids_path, e))
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let ids_path = ids_path(path);
        let text = fs::read_to_string(&ids_path).map_err(|e| Error::io(&ids_path, e))?;
        let mut kind = MatrixKind::Raw;
        let mut notes = Vec::new();
        let mut ids = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            match line.strip_prefix('#') {
                Some(c) => {
                    if let Some((k, v)) = c.trim().split_once('=') {
                        if k.trim() == "kind" {
                            kind = v.parse()?;
                        } else {
                            notes.push((k.trim().to_string(), v.trim().to_string()));
                        }
                    }
                }
                None => ids.push(line.parse::<SubjectDay>()?),
            }
        }
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let n = ids.len();
        if bytes.len() != n * n * 8 {
            return Err(Error::Unreadable {
                path: path.to_path_buf(),
                reason: format!("expected {} bytes for {n} ids, found {}", n * n * 8, bytes.len()),
            });
        }
        let data = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let mut dm = DistanceMatrix::new(ids, Matrix::from_vec(n, n, data)?, kind)?;
        dm.notes = notes;
        Ok(dm)
    }
}

fn ids_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".ids");
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::ClassLabel;

    fn sample() -> DistanceMatrix {
        let ids = vec![
            SubjectDay::new("S1", 0, ClassLabel::Control),
            SubjectDay::new("S2", 3, ClassLabel::PreTx),
            SubjectDay::new("S3", 1, ClassLabel::PreTx),
        ];
        let m = Matrix::from_rows(&[
            vec![0.0, 0.1, 1.0 / 3.0],
            vec![0.1, 0.0, 2e-17],
            vec![1.0 / 3.0, 2e-17, 0.0],
        ])
        .unwrap();
        DistanceMatrix::new(ids, m, MatrixKind::Mismatch)
            .unwrap()
            .with_note("symmetrization", "max")
    }

    #[test]
    fn csv_round_trip_exact() {
        let dm = sample();
        let back = DistanceMatrix::from_csv(&dm.to_csv()).unwrap();
        assert_eq!(back, dm);
        assert!(dm.to_csv().starts_with("# kind=Mismatch\n"));
    }

    #[test]
    fn binary_round_trip_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.bin");
        sample().write_binary(&path).unwrap();
        assert_eq!(DistanceMatrix::read_binary(&path).unwrap(), sample());
    }

    #[test]
    fn dissimilarity_checks() {
        assert!(sample().values.check_dissimilarity().is_ok());
        let mut m = sample().values;
        m.set(0, 1, 0.2);
        assert!(m.check_dissimilarity().is_err());
        let neg = Matrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap();
        assert!(neg.check_dissimilarity().is_err());
    }

    #[test]
    fn select_reorders() {
        let s = sample().select(&[2, 0]);
        assert_eq!(s.ids[0].subject, "S3");
        assert_eq!(s.values.get(0, 1), 1.0 / 3.0);
    }
}
