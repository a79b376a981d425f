//! Density-matrix format: `CSQPT-STATE v1 modes=<M> nmax=<N>` followed by
//! `d^M` rows of `re,im` entries.

use std::path::Path;

use super::{
    header_cutoff, parse_header, parse_matrix, push_matrix, read_text, write_atomic, Lines, INGEST_HERMITIAN_TOLERANCE,
    SCHEMA_VERSION,
};
use crate::error::Result;
use crate::fock::DensityMatrix;

const FORMAT: &str = "CSQPT-STATE";

pub(crate) fn render_state(rho: &DensityMatrix) -> String {
    let cutoff = rho.cutoff();
    let mut out = format!(
        "{FORMAT} v{SCHEMA_VERSION} modes={} nmax={}\n",
        cutoff.modes(),
        cutoff.n_max()
    );
    push_matrix(&mut out, rho.entries());
    out
}

pub fn write_state(rho: &DensityMatrix, path: &Path) -> Result<()> {
    write_atomic(path, &render_state(rho))
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    let text = read_text(path)?;
    parse_state(path, &text)
}

pub(crate) fn parse_state(path: &Path, text: &str) -> Result<DensityMatrix> {
    let mut lines = Lines::new(path, text);
    let (no, fields) = parse_header(&mut lines, FORMAT)?;
    let cutoff = header_cutoff(&lines, no, &fields)?;
    let m = parse_matrix(&mut lines, cutoff.dim(), "state")?;
    if let Some((no, _)) = lines.next_line() {
        return Err(lines.malformed(no, "trailing content after state matrix"));
    }
    DensityMatrix::with_tolerance(cutoff, m, INGEST_HERMITIAN_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{self, CoherentAmplitude, FockCutoff};
    use num_complex::Complex64;

    #[test]
    fn round_trip() {
        let cut = FockCutoff::two_mode(2);
        let a = CoherentAmplitude::pair(Complex64::new(0.1, 0.2), Complex64::new(-0.5, 0.0)).unwrap();
        let rho = fock::coherent_density(&a, cut).unwrap();
        let back = parse_state(Path::new("mem"), &render_state(&rho)).unwrap();
        assert_eq!(back, rho);
    }
}
