//! Line-oriented text formats and synthetic probe data.
//!
//! Every file starts with a one-line header naming the format and version.
//! Real numbers are written with 17 significant digits, which round-trips
//! every `f64` exactly.

mod dataset;
pub mod prng;
mod state_file;
mod synthetic;
mod tensor_file;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::FockCutoff;
use crate::tomography::ProbeRecord;

pub use dataset::{read_dataset, write_dataset};
pub use state_file::{read_state, write_state};
pub use synthetic::{check_truncation, generate_synthetic, NoiseSpec};
pub use tensor_file::{read_tensor, write_tensor, TensorFile, SYMMETRY_WARNING};

pub const SCHEMA_VERSION: u32 = 1;

/// Outputs deviating from Hermitian by at most this much are symmetrized on
/// read; larger deviations are rejected.
pub const INGEST_HERMITIAN_TOLERANCE: f64 = 1e-9;

/// Probe records plus free-form metadata, all on one cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeDataset {
    schema_version: u32,
    cutoff: FockCutoff,
    records: Vec<ProbeRecord>,
    pub metadata: BTreeMap<String, String>,
}

impl ProbeDataset {
    pub fn new(cutoff: FockCutoff, records: Vec<ProbeRecord>, metadata: BTreeMap<String, String>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            if r.cutoff() != cutoff {
                return Err(Error::InvariantViolation {
                    record: i,
                    message: format!("cutoff {} differs from dataset cutoff {cutoff}", r.cutoff()),
                });
            }
        }
        if let Some(first) = records.first() {
            let heralded = first.herald_probability().is_some();
            if let Some(i) = records
                .iter()
                .position(|r| r.herald_probability().is_some() != heralded)
            {
                return Err(Error::InvariantViolation {
                    record: i,
                    message: "herald probability must be given for all records or none".into(),
                });
            }
        }
        for key in metadata.keys() {
            if key.is_empty() || key.contains(['=', '\n']) {
                return Err(Error::InvalidInput(format!("metadata key `{key}`")));
            }
        }
        if metadata.values().any(|v| v.contains('\n')) {
            return Err(Error::InvalidInput("metadata values must be single-line".into()));
        }
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            cutoff,
            records,
            metadata,
        })
    }

    pub fn schema_version(&self) -> u32 {
        self.schema_version
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn records(&self) -> &[ProbeRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<ProbeRecord> {
        self.records
    }
}

/// 17 significant digits; `-0` is written as `0`.
pub(crate) fn fmt_real(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

pub(crate) fn fmt_complex(z: Complex64) -> String {
    format!("{},{}", fmt_real(z.re), fmt_real(z.im))
}

/// Writes through a temporary file in the target directory, then renames.
pub(crate) fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut builder = tempfile::Builder::new();
    // tempfile defaults to 0600; outputs should get ordinary file permissions
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        builder.permissions(std::fs::Permissions::from_mode(0o644));
    }
    let mut tmp = builder.tempfile_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Line cursor that skips blank lines and reports 1-based line numbers.
pub(crate) struct Lines<'a> {
    path: String,
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    pub fn new(path: &Path, text: &'a str) -> Self {
        Self {
            path: path.display().to_string(),
            inner: text.lines().enumerate().peekable(),
        }
    }

    pub fn next_line(&mut self) -> Option<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            let line = line.trim();
            if !line.is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }

    pub fn peek_line(&mut self) -> Option<(usize, &'a str)> {
        while let Some(&(i, line)) = self.inner.peek() {
            if line.trim().is_empty() {
                self.inner.next();
            } else {
                return Some((i + 1, line.trim()));
            }
        }
        None
    }

    pub fn malformed(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Malformed {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }
}

/// Parses `FORMAT vN key=value ...`, checking the format name and version.
/// `label` (when present) takes the rest of the line.
pub(crate) fn parse_header(lines: &mut Lines<'_>, format: &str) -> Result<(usize, BTreeMap<String, String>)> {
    let (no, line) = lines
        .next_line()
        .ok_or_else(|| lines.malformed(1, format!("empty file, expected `{format}` header")))?;
    let rest = line
        .strip_prefix(format)
        .ok_or_else(|| lines.malformed(no, format!("expected `{format}` header")))?;
    let mut words = rest.trim_start().splitn(2, ' ');
    let version = words.next().unwrap_or("");
    if version != format!("v{SCHEMA_VERSION}") {
        return Err(Error::VersionMismatch {
            found: version.to_string(),
            expected: SCHEMA_VERSION,
        });
    }
    let mut fields = BTreeMap::new();
    let mut rest = words.next().unwrap_or("").trim();
    while !rest.is_empty() {
        if let Some(label) = rest.strip_prefix("label=") {
            fields.insert("label".to_string(), label.to_string());
            break;
        }
        let (word, tail) = rest.split_once(' ').unwrap_or((rest, ""));
        let (k, v) = word
            .split_once('=')
            .ok_or_else(|| lines.malformed(no, format!("header field `{word}` is not key=value")))?;
        fields.insert(k.to_string(), v.to_string());
        rest = tail.trim_start();
    }
    Ok((no, fields))
}

pub(crate) fn header_cutoff(lines: &Lines<'_>, no: usize, fields: &BTreeMap<String, String>) -> Result<FockCutoff> {
    let get = |key: &str| -> Result<usize> {
        fields
            .get(key)
            .ok_or_else(|| lines.malformed(no, format!("header lacks `{key}=`")))?
            .parse()
            .map_err(|_| lines.malformed(no, format!("header `{key}` is not a nonnegative integer")))
    };
    FockCutoff::new(get("nmax")?, get("modes")?).map_err(|e| lines.malformed(no, e.to_string()))
}

pub(crate) fn parse_real(lines: &Lines<'_>, no: usize, s: &str) -> Result<f64> {
    let x: f64 = s
        .parse()
        .map_err(|_| lines.malformed(no, format!("`{s}` is not a number")))?;
    if !x.is_finite() {
        return Err(lines.malformed(no, format!("non-finite value `{s}`")));
    }
    Ok(x)
}

pub(crate) fn parse_complex(lines: &Lines<'_>, no: usize, s: &str) -> Result<Complex64> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| lines.malformed(no, format!("`{s}` is not `re,im`")))?;
    Ok(Complex64::new(parse_real(lines, no, re)?, parse_real(lines, no, im)?))
}

/// Reads `dim` rows of `dim` complex entries.
pub(crate) fn parse_matrix(lines: &mut Lines<'_>, dim: usize, what: &str) -> Result<nalgebra::DMatrix<Complex64>> {
    let mut m = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
    for row in 0..dim {
        let (no, line) = lines
            .next_line()
            .ok_or_else(|| lines.malformed(0, format!("file ends inside {what} (row {row} of {dim})")))?;
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != dim {
            return Err(lines.malformed(no, format!("{what} row has {} entries, expected {dim}", entries.len())));
        }
        for (col, e) in entries.iter().enumerate() {
            m[(row, col)] = parse_complex(lines, no, e)?;
        }
    }
    Ok(m)
}

pub(crate) fn push_matrix(out: &mut String, m: &nalgebra::DMatrix<Complex64>) {
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|z| fmt_complex(*z)).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip_exactly() {
        for x in [
            0.1,
            -1.0 / 3.0,
            6.02214076e23,
            f64::MIN_POSITIVE,
            5e-324,
            f64::MAX,
            -f64::MAX,
        ] {
            assert_eq!(fmt_real(x).parse::<f64>().unwrap().to_bits(), x.to_bits(), "{x}");
        }
    }

    #[test]
    fn negative_zero_is_written_as_zero() {
        assert_eq!(fmt_real(-0.0), fmt_real(0.0));
    }
}
