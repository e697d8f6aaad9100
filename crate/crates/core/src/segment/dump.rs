//! Segment dumps: a little-endian f64 matrix (one row per normalized pulse)
//! with a CSV sidecar naming each row's source.
//!
//! Binary layout: `b"SEGD"`, `u32` version, `u64` rows, `u64` cols, then
//! `rows * cols` f64 values row-major. Sidecar columns:
//! `subject,day,label,start_sample,raw_length`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::pulses::{PulseSegment, PulseSource};
use crate::error::{Error, Result};
use crate::label::{ClassLabel, SubjectDay};

const MAGIC: &[u8; 4] = b"SEGD";
const VERSION: u32 = 1;

/// All normalized pulses of one subject-day.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentSet {
    pub id: SubjectDay,
    pub segments: Vec<PulseSegment>,
}

impl SegmentSet {
    /// Common segment length, or 0 when empty.
    pub fn width(&self) -> usize {
        self.segments.first().map_or(0, |s| s.values.len())
    }

    pub fn rows(&self) -> Vec<&[f64]> {
        self.segments.iter().map(|s| s.values.as_slice()).collect()
    }
}

pub fn index_path(matrix_path: &Path) -> PathBuf {
    let mut name = matrix_path.file_name().unwrap_or_default().to_os_string();
    name.push(".idx.csv");
    matrix_path.with_file_name(name)
}

fn check_rectangular(set: &SegmentSet) -> Result<usize> {
    let width = set.width();
    for s in &set.segments {
        if s.values.len() != width {
            return Err(Error::LengthMismatch {
                expected: width,
                got: s.values.len(),
            });
        }
    }
    Ok(width)
}

fn write_index(path: &Path, set: &SegmentSet) -> Result<()> {
    let mut text = String::from("subject,day,label,start_sample,raw_length\n");
    for s in &set.segments {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            s.source.subject_id, s.source.day_index, set.id.label, s.source.start_sample, s.raw_length
        ));
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_index(path: &Path) -> Result<(Vec<(PulseSource, usize)>, Option<ClassLabel>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    let mut label = None;
    for (n, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Parse(format!("{}:{}: malformed index row", path.display(), n + 1));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(bad());
        }
        let day = f[1].parse().map_err(|_| bad())?;
        label = Some(f[2].parse()?);
        let start = f[3].parse().map_err(|_| bad())?;
        let raw = f[4].parse().map_err(|_| bad())?;
        rows.push((PulseSource::new(f[0], day, start), raw));
    }
    Ok((rows, label))
}

/// Write `<path>` (binary) and `<path>.idx.csv`.
pub fn write_segment_dump(path: &Path, set: &SegmentSet) -> Result<()> {
    let width = check_rectangular(set)?;
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    w.write_all(MAGIC).map_err(io)?;
    w.write_all(&VERSION.to_le_bytes()).map_err(io)?;
    w.write_all(&(set.segments.len() as u64).to_le_bytes()).map_err(io)?;
    w.write_all(&(width as u64).to_le_bytes()).map_err(io)?;
    for s in &set.segments {
        for v in &s.values {
            w.write_all(&v.to_le_bytes()).map_err(io)?;
        }
    }
    w.flush().map_err(io)?;
    write_index(&index_path(path), set)
}

pub fn read_segment_dump(path: &Path) -> Result<SegmentSet> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |why: &str| Error::Unreadable {
        path: path.to_path_buf(),
        reason: why.to_string(),
    };
    if bytes.len() < 24 || &bytes[..4] != MAGIC {
        return Err(bad("not a segment dump"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(bad("unsupported segment dump version"));
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    if bytes.len() != 24 + rows * cols * 8 {
        return Err(bad("truncated segment dump"));
    }
    let (index, label) = read_index(&index_path(path))?;
    if index.len() != rows {
        return Err(bad("index row count does not match matrix"));
    }
    let mut segments = Vec::with_capacity(rows);
    for (r, (source, raw_length)) in index.into_iter().enumerate() {
        let start = 24 + r * cols * 8;
        let values = bytes[start..start + cols * 8]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        segments.push(PulseSegment {
            values,
            source,
            raw_length,
        });
    }
    let id = match segments.first() {
        Some(s) => SubjectDay::new(
            s.source.subject_id.clone(),
            s.source.day_index,
            label.unwrap_or(ClassLabel::Unlabeled),
        ),
        None => return Err(bad("segment dump is empty")),
    };
    Ok(SegmentSet { id, segments })
}

/// Write the matrix as CSV (one row per segment, no header) plus the sidecar.
pub fn write_segment_csv(path: &Path, set: &SegmentSet) -> Result<()> {
    check_rectangular(set)?;
    let mut text = String::new();
    for s in &set.segments {
        let row: Vec<String> = s.values.iter().map(|v| v.to_string()).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))?;
    write_index(&index_path(path), set)
}
