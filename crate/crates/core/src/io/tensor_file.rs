//! Sparse tensor format.
//!
//! ```text
//! CSQPT-TENSOR v1 modes=<M> nmax=<N> label=<rest of line>
//! m n j k re im                      (one mode)
//! m1 m2 n1 n2 j1 j2 k1 k2 re im      (two modes)
//! ```
//!
//! Only nonzero entries are listed.

use std::path::Path;

use num_complex::Complex64;

use super::{fmt_real, header_cutoff, parse_header, parse_real, read_text, write_atomic, Lines, SCHEMA_VERSION};
use crate::error::Result;
use crate::processes::ProcessTensor;

const FORMAT: &str = "CSQPT-TENSOR";

/// Symmetry deviation above which [`TensorFile::symmetry_warning`] is set.
pub const SYMMETRY_WARNING: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct TensorFile {
    pub tensor: ProcessTensor,
    pub symmetry_deviation: f64,
    pub symmetry_warning: bool,
}

pub(crate) fn render_tensor(t: &ProcessTensor) -> String {
    let cutoff = t.cutoff();
    let mut out = format!(
        "{FORMAT} v{SCHEMA_VERSION} modes={} nmax={} label={}\n",
        cutoff.modes(),
        cutoff.n_max(),
        t.label().replace('\n', " ")
    );
    for (idx, v) in t.nonzero() {
        let indices: Vec<String> = idx
            .iter()
            .flat_map(|&i| {
                if cutoff.modes() == 1 {
                    vec![i.to_string()]
                } else {
                    cutoff.split(i).iter().map(|n| n.to_string()).collect()
                }
            })
            .collect();
        out.push_str(&format!(
            "{} {} {}\n",
            indices.join(" "),
            fmt_real(v.re),
            fmt_real(v.im)
        ));
    }
    out
}

pub fn write_tensor(t: &ProcessTensor, path: &Path) -> Result<()> {
    write_atomic(path, &render_tensor(t))
}

pub fn read_tensor(path: &Path) -> Result<TensorFile> {
    let text = read_text(path)?;
    parse_tensor(path, &text)
}

pub(crate) fn parse_tensor(path: &Path, text: &str) -> Result<TensorFile> {
    let mut lines = Lines::new(path, text);
    let (no, fields) = parse_header(&mut lines, FORMAT)?;
    let cutoff = header_cutoff(&lines, no, &fields)?;
    let label = fields.get("label").cloned().unwrap_or_default();
    let mut tensor = ProcessTensor::zeros(cutoff, label).map_err(|e| lines.malformed(no, e.to_string()))?;
    let per_index = cutoff.modes();
    let expected = 4 * per_index + 2;
    while let Some((no, line)) = lines.next_line() {
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.len() != expected {
            return Err(lines.malformed(no, format!("expected {expected} fields, found {}", words.len())));
        }
        let mut idx = [0usize; 4];
        for (slot, chunk) in idx.iter_mut().zip(words[..4 * per_index].chunks(per_index)) {
            let mut photons = Vec::with_capacity(per_index);
            for w in chunk {
                let n: usize = w
                    .parse()
                    .map_err(|_| lines.malformed(no, format!("index `{w}` is not a nonnegative integer")))?;
                if n > cutoff.n_max() {
                    return Err(lines.malformed(no, format!("index {n} exceeds nmax {}", cutoff.n_max())));
                }
                photons.push(n);
            }
            *slot = cutoff.join(&photons);
        }
        let re = parse_real(&lines, no, words[expected - 2])?;
        let im = parse_real(&lines, no, words[expected - 1])?;
        let [m, n, j, k] = idx;
        tensor.set(m, n, j, k, Complex64::new(re, im));
    }
    let symmetry_deviation = tensor.symmetry_deviation();
    Ok(TensorFile {
        tensor,
        symmetry_deviation,
        symmetry_warning: symmetry_deviation > SYMMETRY_WARNING,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::fock::FockCutoff;
    use crate::processes::{analytic_tensor, ProcessParams};

    #[test]
    fn round_trip_single_and_two_mode() {
        for (p, cut) in [
            (ProcessParams::Attenuation { eta: 0.8 }, FockCutoff::single(4)),
            (ProcessParams::Cat, FockCutoff::single(3)),
            (ProcessParams::Pdc { r: 0.2 }, FockCutoff::two_mode(2)),
        ] {
            let t = analytic_tensor(p, cut).unwrap();
            let back = parse_tensor(Path::new("mem"), &render_tensor(&t)).unwrap();
            assert_eq!(back.tensor, t);
            assert!(!back.symmetry_warning);
        }
    }

    #[test]
    fn asymmetric_tensor_is_flagged() {
        let text = "CSQPT-TENSOR v1 modes=1 nmax=1 label=bad\n0 1 0 0 1 0\n";
        let f = parse_tensor(Path::new("mem"), text).unwrap();
        assert!(f.symmetry_warning);
        assert_eq!(f.tensor.label(), "bad");
    }

    #[test]
    fn empty_file_is_malformed() {
        assert!(matches!(
            parse_tensor(Path::new("mem"), ""),
            Err(Error::Malformed { .. })
        ));
    }

    #[test]
    fn label_keeps_spaces() {
        let text = "CSQPT-TENSOR v1 modes=1 nmax=0 label=two words\n";
        assert_eq!(
            parse_tensor(Path::new("mem"), text).unwrap().tensor.label(),
            "two words"
        );
    }

    #[test]
    fn out_of_range_index() {
        let text = "CSQPT-TENSOR v1 modes=1 nmax=1 label=x\n0 2 0 0 1 0\n";
        assert!(matches!(
            parse_tensor(Path::new("mem"), text),
            Err(Error::Malformed { line: 2, .. })
        ));
    }
}
