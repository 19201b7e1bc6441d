//! Bundled transcriptions of the four published energy tables.
//!
//! Text format, one table row cell per line, `#` starts a comment:
//!
//! ```text
//! n n_prime m a b value1 [value2]
//! ```
//!
//! The CSV written by `drs table` is accepted as well; its `class` column
//! then becomes the expected class of each entry.

use super::{RootClass, SpectrumError};
use crate::model::{ProblemSpec, QuantumNumbers, SymmetryKind};
use serde::Serialize;

/// The (a, b) column order of every table.
pub const RING_COLUMNS: [(f64, f64); 4] = [(1.0, 1.0), (0.0, 1.0), (1.0, 0.0), (0.0, 0.0)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableInfo {
    pub id: u32,
    pub symmetry: SymmetryKind,
    pub kratzer: bool,
}

impl TableInfo {
    pub fn get(id: u32) -> Result<Self, SpectrumError> {
        let (symmetry, kratzer) = match id {
            1 => (SymmetryKind::Pseudospin, true),
            2 => (SymmetryKind::Pseudospin, false),
            3 => (SymmetryKind::Spin, true),
            4 => (SymmetryKind::Spin, false),
            _ => return Err(SpectrumError::UnknownTable(id)),
        };
        Ok(Self { id, symmetry, kratzer })
    }

    pub fn potential_name(&self) -> &'static str {
        if self.kratzer {
            "kratzer"
        } else {
            "oscillator"
        }
    }

    pub fn spec(&self, qn: QuantumNumbers, a: f64, b: f64) -> ProblemSpec {
        ProblemSpec::reference(self.symmetry, self.kratzer, a, b, qn)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableEntry {
    pub qn: QuantumNumbers,
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub expected_class: Option<RootClass>,
    pub line: usize,
}

pub fn bundled_text(id: u32) -> Result<&'static str, SpectrumError> {
    Ok(match id {
        1 => include_str!("../../data/table1.txt"),
        2 => include_str!("../../data/table2.txt"),
        3 => include_str!("../../data/table3.txt"),
        4 => include_str!("../../data/table4.txt"),
        _ => return Err(SpectrumError::UnknownTable(id)),
    })
}

pub fn bundled(id: u32) -> Result<Vec<TableEntry>, SpectrumError> {
    parse(bundled_text(id)?)
}

fn num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, SpectrumError> {
    tok.trim()
        .parse()
        .map_err(|_| SpectrumError::Parse { line, message: format!("bad {what} {tok:?}") })
}

/// Parses either the whitespace table format or `drs table` CSV.
pub fn parse(text: &str) -> Result<Vec<TableEntry>, SpectrumError> {
    let mut out = Vec::new();
    let mut csv = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if body.starts_with("n,n_prime") {
            csv = true;
            continue;
        }
        let toks: Vec<&str> = if csv { body.split(',').collect() } else { body.split_whitespace().collect() };
        let min = if csv { 10 } else { 6 };
        if toks.len() < min {
            return Err(SpectrumError::Parse { line, message: format!("expected at least {min} fields") });
        }
        let qn = QuantumNumbers::new(num(toks[0], line, "n")?, num(toks[1], line, "n_prime")?, num(toks[2], line, "m")?);
        let a: f64 = num(toks[3], line, "a")?;
        let b: f64 = num(toks[4], line, "b")?;
        if csv {
            let value = num(toks[7], line, "energy_re")?;
            let expected_class = RootClass::parse(toks[9]);
            out.push(TableEntry { qn, a, b, value, expected_class, line });
        } else {
            if toks.len() > 7 {
                return Err(SpectrumError::Parse { line, message: "at most two values per cell".into() });
            }
            for tok in &toks[5..] {
                out.push(TableEntry { qn, a, b, value: num(tok, line, "value")?, expected_class: None, line });
            }
        }
    }
    Ok(out)
}

/// Distinct (n, n′, m) rows in order of first appearance.
pub fn row_keys(entries: &[TableEntry]) -> Vec<QuantumNumbers> {
    let mut keys: Vec<QuantumNumbers> = Vec::new();
    for e in entries {
        if !keys.contains(&e.qn) {
            keys.push(e.qn);
        }
    }
    keys
}
