use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{self, CoherentAmplitude, DensityMatrix, FockCutoff};
use crate::linalg;

/// Largest per-mode cutoff for which a dense two-mode tensor is allocated
/// (`36^4` complex entries, about 27 MB).
pub const TWO_MODE_CAP: usize = 5;

/// Dense process tensor `E[m][n][j][k] = <j| E(|m><n|) |k>`.
///
/// For two modes each of `m, n, j, k` is a flattened multi-index (see
/// [`FockCutoff::join`]).
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessTensor {
    cutoff: FockCutoff,
    entries: Vec<Complex64>,
    label: String,
}

impl ProcessTensor {
    pub fn zeros(cutoff: FockCutoff, label: impl Into<String>) -> Result<Self> {
        if cutoff.modes() == 2 && cutoff.n_max() > TWO_MODE_CAP {
            return Err(Error::MemoryGuard {
                n_max: cutoff.n_max(),
                cap: TWO_MODE_CAP,
            });
        }
        let dim = cutoff.dim();
        Ok(Self {
            cutoff,
            entries: vec![Complex64::new(0.0, 0.0); dim.pow(4)],
            label: label.into(),
        })
    }

    /// Builds a tensor that satisfies `E[n][m][k][j] = conj(E[m][n][j][k])`
    /// bit-for-bit: `f` is evaluated on one member of each conjugate pair
    /// and the partner is filled by conjugation.
    pub fn from_hermitian_fn<F>(cutoff: FockCutoff, label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(usize, usize, usize, usize) -> Complex64,
    {
        let mut t = Self::zeros(cutoff, label)?;
        let d = t.dim();
        for m in 0..d {
            for j in 0..d {
                for n in 0..d {
                    for k in 0..d {
                        let this = m * d + j;
                        let mirror = n * d + k;
                        if this > mirror {
                            continue;
                        }
                        let mut v = f(m, n, j, k);
                        if this == mirror {
                            v.im = 0.0;
                        }
                        let a = t.index(m, n, j, k);
                        let b = t.index(n, m, k, j);
                        t.entries[a] = v;
                        t.entries[b] = v.conj();
                    }
                }
            }
        }
        Ok(t)
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    /// Flattened per-index dimension `d^M`.
    pub fn dim(&self) -> usize {
        self.cutoff.dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn index(&self, m: usize, n: usize, j: usize, k: usize) -> usize {
        let d = self.dim();
        ((m * d + n) * d + j) * d + k
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize, j: usize, k: usize) -> Complex64 {
        self.entries[self.index(m, n, j, k)]
    }

    #[inline]
    pub fn set(&mut self, m: usize, n: usize, j: usize, k: usize, v: Complex64) {
        let i = self.index(m, n, j, k);
        self.entries[i] = v;
    }

    /// Inverse of [`index`](Self::index).
    pub fn unravel(&self, flat: usize) -> [usize; 4] {
        let d = self.dim();
        [flat / (d * d * d), (flat / (d * d)) % d, (flat / d) % d, flat % d]
    }

    /// Largest violation of `E[n][m][k][j] = conj(E[m][n][j][k])`.
    pub fn symmetry_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for m in 0..d {
            for n in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        let dev = (self.get(m, n, j, k) - self.get(n, m, k, j).conj()).norm();
                        worst = worst.max(dev);
                    }
                }
            }
        }
        worst
    }

    /// Largest elementwise `|a - b|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        fock::check_same_cutoff(self.cutoff, other.cutoff)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `[E(rho)]_{jk} = sum_{mn} E[m][n][j][k] rho_{mn}`.
    ///
    /// The output keeps the Hermitian part, which is the whole output when
    /// the tensor satisfies its symmetry. Its trace is not normalized.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        fock::check_same_cutoff(self.cutoff, rho.cutoff())?;
        let d = self.dim();
        let mut out = DMatrix::<Complex64>::zeros(d, d);
        let rho = rho.entries();
        for m in 0..d {
            for n in 0..d {
                let w = rho[(m, n)];
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let base = self.index(m, n, 0, 0);
                let block = &self.entries[base..base + d * d];
                for j in 0..d {
                    for k in 0..d {
                        out[(j, k)] += block[j * d + k] * w;
                    }
                }
            }
        }
        DensityMatrix::from_hermitian_part(self.cutoff, &out)
    }

    /// Process output on the probe `|alpha><alpha|`:
    /// `<j|rho(alpha)|k> = e^{-|alpha|^2} sum_{m,n <= N} alpha^m conj(alpha)^n / sqrt(m! n!) E[m][n][j][k]`.
    ///
    /// This is the same finite contraction as `apply(coherent_density(alpha))`.
    /// Probes whose [`fock::truncation_weight`] is small see a visibly
    /// truncated series; callers decide whether that matters.
    pub fn synthesize_probe_output(&self, alpha: &CoherentAmplitude) -> Result<DensityMatrix> {
        let probe = fock::coherent_density(alpha, self.cutoff)?;
        self.apply(&probe)
    }

    /// Choi matrix `J[(j,m),(k,n)] = E[m][n][j][k]`, of size `d^{2M}`.
    pub fn choi_matrix(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_fn(d * d, d * d, |row, col| {
            let (j, m) = (row / d, row % d);
            let (k, n) = (col / d, col % d);
            self.get(m, n, j, k)
        })
    }

    /// Smallest Choi eigenvalue; nonnegative (to rounding) for a CP map.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        let choi = linalg::hermitian_part(&self.choi_matrix());
        linalg::hermitian_eigenvalues(&choi).first().copied().unwrap_or(0.0)
    }

    /// `sum_j E[m][n][j][j]`, the trace of the image of `|m><n|`.
    pub fn image_trace(&self, m: usize, n: usize) -> Complex64 {
        (0..self.dim()).map(|j| self.get(m, n, j, j)).sum()
    }

    /// Largest `|sum_j E[m][n][j][j] - delta_{mn}|` over inputs whose
    /// total photon numbers are both at most `max_input_photons`.
    pub fn trace_rule_deviation(&self, max_input_photons: usize) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for m in 0..d {
            if self.cutoff.total_photons(m) > max_input_photons {
                continue;
            }
            for n in 0..d {
                if self.cutoff.total_photons(n) > max_input_photons {
                    continue;
                }
                let want = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((self.image_trace(m, n) - want).norm());
            }
        }
        worst
    }

    /// Largest `|E[m][n][j][k]|` among entries that break the rule
    /// `m - j = n - k` (total photon numbers for two modes).
    pub fn parity_rule_deviation(&self) -> f64 {
        let c = self.cutoff;
        self.nonzero()
            .filter(|([m, n, j, k], _)| {
                let shift_left = c.total_photons(*m) as i64 - c.total_photons(*j) as i64;
                let shift_right = c.total_photons(*n) as i64 - c.total_photons(*k) as i64;
                shift_left != shift_right
            })
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// Nonzero entries in storage order.
    pub fn nonzero(&self) -> impl Iterator<Item = ([usize; 4], Complex64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
            .map(|(i, v)| (self.unravel(i), *v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memory_guard() {
        assert!(matches!(
            ProcessTensor::zeros(FockCutoff::two_mode(6), "x"),
            Err(Error::MemoryGuard { .. })
        ));
        assert!(ProcessTensor::zeros(FockCutoff::two_mode(5), "x").is_ok());
    }

    #[test]
    fn hermitian_fn_is_exactly_symmetric() {
        let t = ProcessTensor::from_hermitian_fn(FockCutoff::single(3), "t", |m, n, j, k| {
            Complex64::new((m + 2 * n) as f64 * 0.1, (j as f64 - k as f64) * 0.37)
        })
        .unwrap();
        assert_eq!(t.symmetry_deviation(), 0.0);
    }

    #[test]
    fn unravel_inverts_index() {
        let t = ProcessTensor::zeros(FockCutoff::single(2), "x").unwrap();
        for i in 0..t.entries().len() {
            let [m, n, j, k] = t.unravel(i);
            assert_eq!(t.index(m, n, j, k), i);
        }
    }

    #[test]
    fn apply_cutoff_mismatch() {
        let t = ProcessTensor::zeros(FockCutoff::single(2), "x").unwrap();
        let rho = DensityMatrix::fock(FockCutoff::single(3), &[0]).unwrap();
        assert!(matches!(t.apply(&rho), Err(Error::CutoffMismatch(_))));
    }
}
