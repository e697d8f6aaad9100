use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{ClassLabel, SubjectDay};

/// Tolerance on the frequencies summing to one.
pub const FREQUENCY_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    pub centroid: Vec<f64>,
    pub frequency: f64,
}

/// A subject-day summarized as centroid shapes with occurrence frequencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolVector {
    pub id: SubjectDay,
    pub symbols: Vec<Symbol>,
}

impl SymbolVector {
    pub fn new(id: SubjectDay, symbols: Vec<Symbol>) -> Result<Self> {
        let first = symbols
            .first()
            .ok_or(Error::EmptyInput("a symbol vector needs at least one symbol"))?;
        let len = first.centroid.len();
        if len == 0 {
            return Err(Error::EmptyInput("symbol centroids must be nonempty"));
        }
        let mut total = 0.0;
        for s in &symbols {
            if s.centroid.len() != len {
                return Err(Error::LengthMismatch {
                    expected: len,
                    got: s.centroid.len(),
                });
            }
            if !(0.0..=1.0).contains(&s.frequency) {
                return Err(Error::InvalidParameter(format!(
                    "symbol frequency {} outside [0, 1]",
                    s.frequency
                )));
            }
            total += s.frequency;
        }
        if (total - 1.0).abs() > FREQUENCY_SUM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "symbol frequencies sum to {total}, not 1"
            )));
        }
        Ok(SymbolVector { id, symbols })
    }

    /// Frequencies from member counts; symbols with no members are dropped.
    pub fn from_counts(id: SubjectDay, centroids: Vec<Vec<f64>>, counts: &[usize]) -> Result<Self> {
        let total: usize = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyInput("no members in any cluster"));
        }
        let symbols = centroids
            .into_iter()
            .zip(counts)
            .filter(|(_, &c)| c > 0)
            .map(|(centroid, &c)| Symbol {
                centroid,
                frequency: c as f64 / total as f64,
            })
            .collect();
        Self::new(id, symbols)
    }

    pub fn k(&self) -> usize {
        self.symbols.len()
    }

    pub fn centroid_len(&self) -> usize {
        self.symbols[0].centroid.len()
    }

    /// Text record:
    ///
    /// ```text
    /// [symbol_vector]
    /// subject = S01
    /// day = 3
    /// label = PreTx
    /// k = 2
    /// length = 111
    /// frequencies = 7.0000000000000000e-1,3.0000000000000000e-1
    /// centroids
    /// <one CSV row per symbol>
    /// [end]
    /// ```
    pub fn to_text(&self) -> String {
        let num = |v: &f64| format!("{v:.16e}");
        let mut out = String::new();
        let _ = writeln!(out, "[symbol_vector]");
        let _ = writeln!(out, "subject = {}", self.id.subject);
        let _ = writeln!(out, "day = {}", self.id.day);
        let _ = writeln!(out, "label = {}", self.id.label);
        let _ = writeln!(out, "k = {}", self.k());
        let _ = writeln!(out, "length = {}", self.centroid_len());
        let freqs: Vec<String> = self.symbols.iter().map(|s| num(&s.frequency)).collect();
        let _ = writeln!(out, "frequencies = {}", freqs.join(","));
        let _ = writeln!(out, "centroids");
        for s in &self.symbols {
            let row: Vec<String> = s.centroid.iter().map(num).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        let _ = writeln!(out, "[end]");
        out
    }
}

fn parse_f64s(line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("`{v}` is not a number")))
        })
        .collect()
}

fn field<'a>(lines: &mut impl Iterator<Item = &'a str>, key: &str) -> Result<&'a str> {
    let line = lines
        .next()
        .ok_or_else(|| Error::Parse(format!("missing `{key}`")))?;
    match line.split_once('=') {
        Some((k, v)) if k.trim() == key => Ok(v.trim()),
        _ => Err(Error::Parse(format!("expected `{key} = ...`, found `{line}`"))),
    }
}

fn parse_int<T: std::str::FromStr>(v: &str, key: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse(format!("bad {key} `{v}`")))
}

/// Parse every record in `text`.
pub fn parse_symbol_vectors(text: &str) -> Result<Vec<SymbolVector>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let mut out = Vec::new();
    while let Some(head) = lines.next() {
        if head != "[symbol_vector]" {
            return Err(Error::Parse(format!("expected `[symbol_vector]`, found `{head}`")));
        }
        let subject = field(&mut lines, "subject")?.to_string();
        let day: u32 = parse_int(field(&mut lines, "day")?, "day")?;
        let label: ClassLabel = field(&mut lines, "label")?.parse()?;
        let k: usize = parse_int(field(&mut lines, "k")?, "k")?;
        let length: usize = parse_int(field(&mut lines, "length")?, "length")?;
        let freqs = parse_f64s(field(&mut lines, "frequencies")?)?;
        if lines.next() != Some("centroids") {
            return Err(Error::Parse("expected `centroids`".into()));
        }
        if freqs.len() != k {
            return Err(Error::Parse(format!("{} frequencies for k = {k}", freqs.len())));
        }
        let mut symbols = Vec::with_capacity(k);
        for f in freqs {
            let row = parse_f64s(lines.next().ok_or_else(|| Error::Parse("missing centroid row".into()))?)?;
            if row.len() != length {
                return Err(Error::Parse(format!("centroid of length {} for length = {length}", row.len())));
            }
            symbols.push(Symbol {
                centroid: row,
                frequency: f,
            });
        }
        if lines.next() != Some("[end]") {
            return Err(Error::Parse("expected `[end]`".into()));
        }
        out.push(SymbolVector::new(SubjectDay::new(subject, day, label), symbols)?);
    }
    Ok(out)
}

pub fn write_symbol_vectors(path: &Path, vectors: &[SymbolVector]) -> Result<()> {
    let text: String = vectors.iter().map(SymbolVector::to_text).collect();
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_symbol_vectors(path: &Path) -> Result<Vec<SymbolVector>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_symbol_vectors(&text)
}
