//! Probe dataset format.
//!
//! ```text
//! CSQPT-DATASET v1 modes=<M> nmax=<N>
//! # key=value
//! alpha <re>,<im> [<re>,<im>]
//! herald <p>
//! <d^M rows of d^M entries re,im>
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use super::{
    fmt_complex, fmt_real, header_cutoff, parse_complex, parse_header, parse_matrix, parse_real, push_matrix,
    read_text, write_atomic, Lines, ProbeDataset, INGEST_HERMITIAN_TOLERANCE, SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::fock::{CoherentAmplitude, DensityMatrix};
use crate::linalg;
use crate::tomography::ProbeRecord;

const FORMAT: &str = "CSQPT-DATASET";

pub(crate) fn render_dataset(ds: &ProbeDataset) -> String {
    let cutoff = ds.cutoff();
    let mut out = format!(
        "{FORMAT} v{SCHEMA_VERSION} modes={} nmax={}\n",
        cutoff.modes(),
        cutoff.n_max()
    );
    for (k, v) in &ds.metadata {
        out.push_str(&format!("# {k}={v}\n"));
    }
    for rec in ds.records() {
        let alpha: Vec<String> = rec.amplitude().values().iter().map(|z| fmt_complex(*z)).collect();
        out.push_str(&format!("alpha {}\n", alpha.join(" ")));
        if let Some(p) = rec.herald_probability() {
            out.push_str(&format!("herald {}\n", fmt_real(p)));
        }
        push_matrix(&mut out, rec.output().entries());
    }
    out
}

pub fn write_dataset(ds: &ProbeDataset, path: &Path) -> Result<()> {
    write_atomic(path, &render_dataset(ds))
}

pub fn read_dataset(path: &Path) -> Result<ProbeDataset> {
    let text = read_text(path)?;
    parse_dataset(path, &text)
}

pub(crate) fn parse_dataset(path: &Path, text: &str) -> Result<ProbeDataset> {
    let mut lines = Lines::new(path, text);
    let (no, fields) = parse_header(&mut lines, FORMAT)?;
    let cutoff = header_cutoff(&lines, no, &fields)?;
    let mut metadata = BTreeMap::new();
    let mut records = Vec::new();
    while let Some((no, line)) = lines.next_line() {
        if let Some(meta) = line.strip_prefix('#') {
            let (k, v) = meta
                .trim()
                .split_once('=')
                .ok_or_else(|| lines.malformed(no, "metadata line is not `# key=value`"))?;
            metadata.insert(k.trim().to_string(), v.trim().to_string());
            continue;
        }
        let index = records.len();
        let values = line
            .strip_prefix("alpha ")
            .ok_or_else(|| lines.malformed(no, format!("expected `alpha` line for record {index}")))?;
        let alpha: Vec<_> = values
            .split_whitespace()
            .map(|s| parse_complex(&lines, no, s))
            .collect::<Result<_>>()?;
        if alpha.len() != cutoff.modes() {
            return Err(lines.malformed(
                no,
                format!(
                    "record {index} has {} amplitudes for {} modes",
                    alpha.len(),
                    cutoff.modes()
                ),
            ));
        }
        let amplitude = CoherentAmplitude::new(alpha).map_err(|e| lines.malformed(no, e.to_string()))?;
        let mut herald = None;
        if let Some((hno, hline)) = lines.peek_line() {
            if let Some(p) = hline.strip_prefix("herald ") {
                herald = Some(parse_real(&lines, hno, p.trim())?);
                lines.next_line();
            }
        }
        let raw = parse_matrix(&mut lines, cutoff.dim(), &format!("record {index} output"))?;
        let dev = linalg::hermiticity_deviation(&raw);
        if dev > INGEST_HERMITIAN_TOLERANCE {
            return Err(Error::InvariantViolation {
                record: index,
                message: format!("output is not Hermitian (deviation {dev:.3e})"),
            });
        }
        let output = DensityMatrix::from_hermitian_part(cutoff, &raw)?;
        let record = ProbeRecord::new(amplitude, output, herald).map_err(|e| Error::InvariantViolation {
            record: index,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    ProbeDataset::new(cutoff, records, metadata)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{self, FockCutoff};
    use num_complex::Complex64;

    fn sample() -> ProbeDataset {
        let cut = FockCutoff::single(2);
        let alpha = CoherentAmplitude::single(Complex64::new(0.3, -0.7)).unwrap();
        let rho = fock::coherent_density(&alpha, cut).unwrap();
        let rho = rho.scaled(1.0 / rho.trace());
        let rec = ProbeRecord::new(alpha, rho, Some(0.25)).unwrap();
        let mut meta = BTreeMap::new();
        meta.insert("process".to_string(), "identity".to_string());
        ProbeDataset::new(cut, vec![rec.clone(), rec], meta).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let ds = sample();
        let text = render_dataset(&ds);
        let back = parse_dataset(Path::new("mem"), &text).unwrap();
        assert_eq!(back, ds);
        assert_eq!(render_dataset(&back), text);
    }

    #[test]
    fn mixed_herald_is_rejected() {
        let text = render_dataset(&sample());
        let stripped = text.replacen("herald 2.5000000000000000e-1\n", "", 1);
        assert!(matches!(
            parse_dataset(Path::new("mem"), &stripped),
            Err(Error::InvariantViolation { record: 1, .. })
        ));
    }

    #[test]
    fn non_hermitian_record_reports_index() {
        let text = "CSQPT-DATASET v1 modes=1 nmax=1\n\
                    alpha 0,0\n1,0 0,0\n0,0 0,0\n\
                    alpha 0,0\n1,0 1e-3,0\n0,0 0,0\n";
        assert!(matches!(
            parse_dataset(Path::new("mem"), text),
            Err(Error::InvariantViolation { record: 1, .. })
        ));
    }

    #[test]
    fn small_asymmetry_is_symmetrized() {
        let text = "CSQPT-DATASET v1 modes=1 nmax=1\nalpha 0,0\n1,0 1e-10,0\n0,0 0,0\n";
        let ds = parse_dataset(Path::new("mem"), text).unwrap();
        assert_eq!(ds.records()[0].output().get(0, 1), Complex64::new(5e-11, 0.0));
    }

    #[test]
    fn version_and_format_errors() {
        assert!(matches!(
            parse_dataset(Path::new("mem"), "CSQPT-DATASET v2 modes=1 nmax=1\n"),
            Err(Error::VersionMismatch { .. })
        ));
        assert!(matches!(
            parse_dataset(Path::new("mem"), ""),
            Err(Error::Malformed { .. })
        ));
        assert!(matches!(
            parse_dataset(
                Path::new("mem"),
                "CSQPT-DATASET v1 modes=1 nmax=1\nalpha 0,0\n1,0 0,0\n"
            ),
            Err(Error::Malformed { .. })
        ));
    }
}
