//! Truncated Fock-space states: cutoffs, coherent probes, density matrices,
//! trace distance and cutoff projection.
//!
//! Multi-mode indices are flattened lexicographically, first mode major:
//! `|n1, n2>` lives at `n1 * d + n2` with `d = nmax + 1`.

use std::fmt;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

/// Largest Hermiticity violation accepted by [`DensityMatrix::new`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Slack on the upper trace bound of a physical state.
pub const TRACE_SLACK: f64 = 1e-9;

const LN_FACTORIAL_TABLE: usize = 4096;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACTORIAL_TABLE);
        let mut acc = 0.0f64;
        t.push(0.0);
        for n in 1..LN_FACTORIAL_TABLE {
            acc += (n as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)` from a cumulative table.
pub fn ln_factorial(n: usize) -> f64 {
    let table = ln_factorial_table();
    if n < table.len() {
        return table[n];
    }
    let mut acc = table[table.len() - 1];
    for k in table.len()..=n {
        acc += (k as f64).ln();
    }
    acc
}

/// `sqrt(n!)`, finite for every `n` that matters here (overflows past n ≈ 340).
pub fn sqrt_factorial(n: usize) -> f64 {
    (0.5 * ln_factorial(n)).exp()
}

/// Photon-number cutoff `nmax` applied to each of `modes` modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockCutoff {
    n_max: usize,
    modes: usize,
}

impl FockCutoff {
    pub fn new(n_max: usize, modes: usize) -> Result<Self> {
        if !(1..=2).contains(&modes) {
            return Err(Error::InvalidInput(format!("modes must be 1 or 2, got {modes}")));
        }
        Ok(Self { n_max, modes })
    }

    pub fn single(n_max: usize) -> Self {
        Self { n_max, modes: 1 }
    }

    pub fn two_mode(n_max: usize) -> Self {
        Self { n_max, modes: 2 }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// `d = nmax + 1`.
    pub fn dim_per_mode(&self) -> usize {
        self.n_max + 1
    }

    /// `d^M`, the size of a density matrix.
    pub fn dim(&self) -> usize {
        self.dim_per_mode().pow(self.modes as u32)
    }

    /// Per-mode photon numbers of a flattened index.
    pub fn split(&self, flat: usize) -> [usize; 2] {
        let d = self.dim_per_mode();
        match self.modes {
            1 => [flat, 0],
            _ => [flat / d, flat % d],
        }
    }

    /// Flattened index of per-mode photon numbers.
    pub fn join(&self, n: &[usize]) -> usize {
        let d = self.dim_per_mode();
        n.iter().take(self.modes).fold(0, |acc, &x| acc * d + x)
    }

    /// Total photon number of a flattened index.
    pub fn total_photons(&self, flat: usize) -> usize {
        let [a, b] = self.split(flat);
        a + b
    }
}

impl fmt::Display for FockCutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "modes={} nmax={}", self.modes, self.n_max)
    }
}

/// Coherent-state amplitudes, one per mode.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentAmplitude(Vec<Complex64>);

impl CoherentAmplitude {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() || values.len() > 2 {
            return Err(Error::InvalidInput(format!(
                "coherent amplitude needs 1 or 2 modes, got {}",
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coherent amplitude {values:?}")));
        }
        Ok(Self(values))
    }

    pub fn single(alpha: Complex64) -> Result<Self> {
        Self::new(vec![alpha])
    }

    pub fn real(r: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(r, 0.0)])
    }

    pub fn pair(a: Complex64, b: Complex64) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    /// `sum |alpha_s|^2`, the mean photon number.
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    fn check_modes(&self, cutoff: FockCutoff) -> Result<()> {
        if self.modes() != cutoff.modes() {
            return Err(Error::CutoffMismatch(format!(
                "amplitude has {} mode(s), cutoff has {}",
                self.modes(),
                cutoff.modes()
            )));
        }
        Ok(())
    }
}

/// `alpha^n / sqrt(n!)` for `n = 0..=nmax`.
pub(crate) fn scaled_powers(alpha: Complex64, n_max: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut p = Complex64::new(1.0, 0.0);
    for n in 0..=n_max {
        if n > 0 {
            p *= alpha;
        }
        out.push(p / sqrt_factorial(n));
    }
    out
}

/// Truncated coherent ket, `e^{-|a|^2/2} a^n / sqrt(n!)` per mode.
///
/// The vector is not renormalized; the lost weight is `1 - truncation_weight`.
pub fn coherent_ket(alpha: &CoherentAmplitude, cutoff: FockCutoff) -> Result<DVector<Complex64>> {
    alpha.check_modes(cutoff)?;
    let per_mode: Vec<Vec<Complex64>> = alpha
        .values()
        .iter()
        .map(|&a| scaled_powers(a, cutoff.n_max()))
        .collect();
    let envelope = (-0.5 * alpha.norm_sqr()).exp();
    Ok(DVector::from_fn(cutoff.dim(), |flat, _| {
        let n = cutoff.split(flat);
        let mut v = Complex64::new(envelope, 0.0);
        for (s, powers) in per_mode.iter().enumerate() {
            v *= powers[n[s]];
        }
        v
    }))
}

/// `|alpha><alpha|` restricted to the cutoff.
pub fn coherent_density(alpha: &CoherentAmplitude, cutoff: FockCutoff) -> Result<DensityMatrix> {
    let ket = coherent_ket(alpha, cutoff)?;
    let dim = cutoff.dim();
    let entries = DMatrix::from_fn(dim, dim, |j, k| {
        if j == k {
            Complex64::new(ket[j].norm_sqr(), 0.0)
        } else {
            ket[j] * ket[k].conj()
        }
    });
    Ok(DensityMatrix { cutoff, entries })
}

/// Poisson weight of a coherent state inside the cutoff, multiplied across modes.
pub fn truncation_weight(alpha: &CoherentAmplitude, cutoff: FockCutoff) -> f64 {
    alpha
        .values()
        .iter()
        .map(|a| {
            let mean = a.norm_sqr();
            let mut term = (-mean).exp();
            let mut sum = term;
            for n in 1..=cutoff.n_max() {
                term *= mean / n as f64;
                sum += term;
            }
            sum.min(1.0)
        })
        .product()
}

/// Hermitian matrix on the truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    cutoff: FockCutoff,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates shape, finiteness and Hermiticity (within
    /// [`HERMITIAN_TOLERANCE`]), then stores the exact Hermitian part.
    pub fn new(cutoff: FockCutoff, entries: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerance(cutoff, entries, HERMITIAN_TOLERANCE)
    }

    pub(crate) fn with_tolerance(cutoff: FockCutoff, entries: DMatrix<Complex64>, tolerance: f64) -> Result<Self> {
        let dim = cutoff.dim();
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: entries.nrows().max(entries.ncols()),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite density-matrix entry".into()));
        }
        let dev = linalg::hermiticity_deviation(&entries);
        if dev > tolerance {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self {
            cutoff,
            entries: linalg::hermitian_part(&entries),
        })
    }

    /// Stores `(X + X†)/2` without checking how far `X` was from Hermitian.
    pub fn from_hermitian_part(cutoff: FockCutoff, entries: &DMatrix<Complex64>) -> Result<Self> {
        let dim = cutoff.dim();
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: entries.nrows(),
            });
        }
        Ok(Self {
            cutoff,
            entries: linalg::hermitian_part(entries),
        })
    }

    /// Fock projector `|n><n|` for per-mode photon numbers `n`.
    pub fn fock(cutoff: FockCutoff, n: &[usize]) -> Result<Self> {
        if n.len() != cutoff.modes() {
            return Err(Error::CutoffMismatch(format!(
                "Fock state has {} mode(s), cutoff has {}",
                n.len(),
                cutoff.modes()
            )));
        }
        if let Some(&big) = n.iter().find(|&&x| x > cutoff.n_max()) {
            return Err(Error::CutoffMismatch(format!(
                "photon number {big} exceeds nmax = {}",
                cutoff.n_max()
            )));
        }
        let dim = cutoff.dim();
        let mut entries = DMatrix::zeros(dim, dim);
        let idx = cutoff.join(n);
        entries[(idx, idx)] = Complex64::new(1.0, 0.0);
        Ok(Self { cutoff, entries })
    }

    pub fn zeros(cutoff: FockCutoff) -> Self {
        let dim = cutoff.dim();
        Self {
            cutoff,
            entries: DMatrix::zeros(dim, dim),
        }
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries[(j, k)]
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            cutoff: self.cutoff,
            entries: &self.entries * Complex64::new(factor, 0.0),
        }
    }

    /// `a * self + b * other`, for matching cutoffs.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        check_same_cutoff(self.cutoff, other.cutoff)?;
        Ok(Self {
            cutoff: self.cutoff,
            entries: &self.entries * Complex64::new(a, 0.0) + &other.entries * Complex64::new(b, 0.0),
        })
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        linalg::hermiticity_deviation(&self.entries)
    }

    /// Checks the physical-state trace bound `0 <= Tr <= 1 + TRACE_SLACK`.
    ///
    /// Process outputs of trace-increasing maps (photon addition or
    /// subtraction) legitimately fail this; it is applied to inputs only.
    pub fn validate_state(&self) -> Result<()> {
        let tr = self.trace();
        if !(-TRACE_SLACK..=1.0 + TRACE_SLACK).contains(&tr) {
            return Err(Error::InvalidInput(format!("trace {tr} outside [0, 1]")));
        }
        Ok(())
    }

    /// Zero-pads into a larger cutoff with the same mode count.
    pub fn embed(&self, larger: FockCutoff) -> Result<Self> {
        if larger.modes() != self.cutoff.modes() || larger.n_max() < self.cutoff.n_max() {
            return Err(Error::CutoffMismatch(format!(
                "cannot embed {} into {}",
                self.cutoff, larger
            )));
        }
        let map = index_map(self.cutoff, larger);
        let dim = larger.dim();
        let mut entries = DMatrix::zeros(dim, dim);
        for (j, &bj) in map.iter().enumerate() {
            for (k, &bk) in map.iter().enumerate() {
                entries[(bj, bk)] = self.entries[(j, k)];
            }
        }
        Ok(Self {
            cutoff: larger,
            entries,
        })
    }
}

/// Flat index in `larger` of each flat index in `smaller`.
pub(crate) fn index_map(smaller: FockCutoff, larger: FockCutoff) -> Vec<usize> {
    (0..smaller.dim())
        .map(|i| {
            let n = smaller.split(i);
            larger.join(&n[..smaller.modes()])
        })
        .collect()
}

pub(crate) fn check_same_cutoff(a: FockCutoff, b: FockCutoff) -> Result<()> {
    if a != b {
        return Err(Error::CutoffMismatch(format!("{a} vs {b}")));
    }
    Ok(())
}

/// Trace norm `||a - b||_1`, summed absolute eigenvalues of the difference.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let diff = &a.entries - &b.entries;
    Ok(linalg::hermitian_eigenvalues(&diff).iter().map(|x| x.abs()).sum())
}

/// Trace-normalized projection `P rho P / Tr[rho P]` onto a smaller cutoff.
pub fn project_cutoff(rho: &DensityMatrix, smaller: FockCutoff) -> Result<DensityMatrix> {
    let from = rho.cutoff();
    if smaller.modes() != from.modes() || smaller.n_max() > from.n_max() {
        return Err(Error::CutoffMismatch(format!("cannot project {from} onto {smaller}")));
    }
    let map = index_map(smaller, from);
    let dim = smaller.dim();
    let block = DMatrix::from_fn(dim, dim, |j, k| rho.entries[(map[j], map[k])]);
    let weight: f64 = block.diagonal().iter().map(|z| z.re).sum();
    if weight <= 0.0 {
        return Err(Error::DegenerateInput(format!(
            "projected trace {weight} is not positive"
        )));
    }
    Ok(DensityMatrix {
        cutoff: smaller,
        entries: block / Complex64::new(weight, 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_ket() {
        let ket = coherent_ket(&CoherentAmplitude::real(0.0).unwrap(), FockCutoff::single(3)).unwrap();
        assert_eq!(ket.as_slice(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn unit_amplitude_ket_at_nmax_one() {
        let ket = coherent_ket(&CoherentAmplitude::real(1.0).unwrap(), FockCutoff::single(1)).unwrap();
        let e = (-0.5f64).exp();
        assert!((ket[0] - c(e, 0.0)).norm() < 1e-15);
        assert!((ket[1] - c(e, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn long_ket_is_normalized() {
        let ket = coherent_ket(&CoherentAmplitude::real(1.0).unwrap(), FockCutoff::single(60)).unwrap();
        assert!((ket.norm_squared() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_finite_amplitude_is_rejected() {
        assert!(CoherentAmplitude::single(c(f64::NAN, 0.0)).is_err());
        assert!(CoherentAmplitude::single(c(0.0, f64::INFINITY)).is_err());
    }

    #[test]
    fn ket_mode_mismatch() {
        let a = CoherentAmplitude::real(0.5).unwrap();
        assert!(matches!(
            coherent_ket(&a, FockCutoff::two_mode(2)),
            Err(Error::CutoffMismatch(_))
        ));
    }

    #[test]
    fn coherent_density_entries() {
        let rho = coherent_density(&CoherentAmplitude::real(0.0).unwrap(), FockCutoff::single(2)).unwrap();
        assert_eq!(rho, DensityMatrix::fock(FockCutoff::single(2), &[0]).unwrap());

        let rho = coherent_density(&CoherentAmplitude::real(1.0).unwrap(), FockCutoff::single(1)).unwrap();
        assert!((rho.get(0, 1) - c((-1.0f64).exp(), 0.0)).norm() < 1e-15);

        let rho = coherent_density(&CoherentAmplitude::single(c(0.0, 1.0)).unwrap(), FockCutoff::single(2)).unwrap();
        assert!((rho.get(1, 1) - c((-1.0f64).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_mode_ket_is_product() {
        let cut = FockCutoff::two_mode(3);
        let a = c(0.3, -0.2);
        let b = c(-0.5, 0.4);
        let ket = coherent_ket(&CoherentAmplitude::pair(a, b).unwrap(), cut).unwrap();
        let ka = coherent_ket(&CoherentAmplitude::single(a).unwrap(), FockCutoff::single(3)).unwrap();
        let kb = coherent_ket(&CoherentAmplitude::single(b).unwrap(), FockCutoff::single(3)).unwrap();
        for n1 in 0..4 {
            for n2 in 0..4 {
                let v = ket[cut.join(&[n1, n2])];
                assert!((v - ka[n1] * kb[n2]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn truncation_weight_examples() {
        let w = |r: f64, n: usize| truncation_weight(&CoherentAmplitude::real(r).unwrap(), FockCutoff::single(n));
        assert_eq!(w(0.0, 0), 1.0);
        assert!((w(1.0, 0) - (-1.0f64).exp()).abs() < 1e-16);
        assert!(w(2.0, 20) >= 0.999999);
    }

    #[test]
    fn trace_distance_examples() {
        let cut = FockCutoff::single(1);
        let zero = DensityMatrix::fock(cut, &[0]).unwrap();
        let one = DensityMatrix::fock(cut, &[1]).unwrap();
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 2.0).abs() < 1e-14);
        let mixed = zero.combine(0.5, &one, 0.5).unwrap();
        assert!((trace_distance(&zero, &mixed).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_distance_dimension_mismatch() {
        let a = DensityMatrix::fock(FockCutoff::single(1), &[0]).unwrap();
        let b = DensityMatrix::fock(FockCutoff::single(2), &[0]).unwrap();
        assert!(matches!(trace_distance(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn projection_examples() {
        let cut = FockCutoff::single(3);
        let zero = DensityMatrix::fock(cut, &[0]).unwrap();
        for n in 0..=3 {
            let p = project_cutoff(&zero, FockCutoff::single(n)).unwrap();
            assert_eq!(p, DensityMatrix::fock(FockCutoff::single(n), &[0]).unwrap());
        }
        let one = DensityMatrix::fock(cut, &[1]).unwrap();
        let mixed = zero.combine(0.5, &one, 0.5).unwrap();
        let p = project_cutoff(&mixed, FockCutoff::single(0)).unwrap();
        assert_eq!(p.get(0, 0), c(1.0, 0.0));
        assert!(matches!(
            project_cutoff(&one, FockCutoff::single(0)),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(FockCutoff::single(1), m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn flat_index_is_lexicographic() {
        let cut = FockCutoff::two_mode(2);
        assert_eq!(cut.join(&[1, 2]), 5);
        assert_eq!(cut.split(5), [1, 2]);
        assert_eq!(cut.dim(), 9);
    }

    #[test]
    fn large_factorials_stay_finite() {
        assert!(sqrt_factorial(200).is_finite());
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-13);
    }
}
