//! Estimation for arbitrary processes from probes spread over phase space.
//!
//! `e^{|alpha|^2} <j|rho_E(alpha)|k>` is a polynomial in `alpha` and
//! `conj(alpha)` (per mode) with per-variable degree at most `N`; the
//! coefficient of `alpha^m conj(alpha)^n` times `sqrt(m! n!)` is
//! `E[m][n][j][k]`. The basis below folds the Gaussian and the factorials
//! into each column, so the fitted coefficients are the tensor entries.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::lstsq::LeastSquares;
use super::{
    check_records, low_weight_records, par_map, rescale_heralded, summarize, upper_pairs, ElementFit, Estimate,
    EstimateOptions, ProbeRecord,
};
use crate::error::{Error, Result};
use crate::fock::{self, FockCutoff};
use crate::processes::ProcessTensor;

/// Largest per-mode cutoff accepted by the two-mode estimator
/// (`(N+1)^4 = 256` unknowns per output element).
pub const TWO_MODE_ESTIMATE_CAP: usize = 3;

struct PhaseSpaceData {
    /// One row per distinct amplitude: `<m|alpha><alpha|n>` at column `m * D + n`.
    design: DMatrix<Complex64>,
    weights: Vec<f64>,
    outputs: Vec<DMatrix<Complex64>>,
}

fn group_by_amplitude(records: &[ProbeRecord], cutoff: FockCutoff) -> Result<PhaseSpaceData> {
    let mut groups: BTreeMap<Vec<u64>, (usize, usize, DMatrix<Complex64>)> = BTreeMap::new();
    for (i, rec) in records.iter().enumerate() {
        let key: Vec<u64> = rec
            .amplitude()
            .values()
            .iter()
            .flat_map(|z| [(z.re + 0.0).to_bits(), (z.im + 0.0).to_bits()])
            .collect();
        let out = rescale_heralded(rec).entries().clone();
        groups
            .entry(key)
            .and_modify(|(n, _, sum)| {
                *n += 1;
                *sum += &out;
            })
            .or_insert((1, i, out));
    }
    // keep first-appearance order so the design is independent of float bit patterns
    let mut groups: Vec<_> = groups.into_values().collect();
    groups.sort_by_key(|&(_, first, _)| first);

    let d = cutoff.dim();
    let mut design = DMatrix::<Complex64>::zeros(groups.len(), d * d);
    let mut weights = Vec::with_capacity(groups.len());
    let mut outputs = Vec::with_capacity(groups.len());
    for (row, (n, first, sum)) in groups.into_iter().enumerate() {
        let probe = fock::coherent_density(records[first].amplitude(), cutoff)?;
        for m in 0..d {
            for col in 0..d {
                design[(row, m * d + col)] = probe.get(m, col);
            }
        }
        weights.push((n as f64).sqrt());
        outputs.push(sum / Complex64::new(n as f64, 0.0));
    }
    Ok(PhaseSpaceData {
        design,
        weights,
        outputs,
    })
}

fn estimate(records: &[ProbeRecord], cutoff: FockCutoff, options: EstimateOptions) -> Result<Estimate> {
    check_records(records, cutoff)?;
    let d = cutoff.dim();
    let data = group_by_amplitude(records, cutoff)?;
    let unknowns = d * d;
    if data.outputs.len() < unknowns {
        return Err(Error::Underdetermined {
            needed: unknowns,
            got: data.outputs.len(),
            context: "distinct probe amplitudes".into(),
        });
    }
    let ls = LeastSquares::new(&data.design, data.weights.clone(), "phase-space fit")?;

    let pairs = upper_pairs(d);
    let solutions = par_map(options.threads, &pairs, |&(j, k)| {
        let rhs = DVector::from_fn(data.outputs.len(), |i, _| data.outputs[i][(j, k)]);
        ls.solve(&rhs)
    })?;

    let mut tensor = ProcessTensor::zeros(cutoff, "estimated")?;
    for (&(j, k), sol) in pairs.iter().zip(&solutions) {
        for m in 0..d {
            for n in 0..d {
                let mut v = sol.coeffs[m * d + n];
                if j == k {
                    // (m, n) and (n, m) come from the same fit; average them
                    // so the symmetry holds exactly
                    v = (v + sol.coeffs[n * d + m].conj()) * 0.5;
                    if m == n {
                        v.im = 0.0;
                    }
                }
                tensor.set(m, n, j, k, v);
                tensor.set(n, m, k, j, v.conj());
            }
        }
    }

    let fits = pairs
        .iter()
        .zip(&solutions)
        .map(|(&(j, k), s)| ElementFit {
            j,
            k,
            residual_rms: s.residual_rms,
            condition_number: ls.condition_number(),
        })
        .collect();
    let report = summarize(fits, ls.leverage(), low_weight_records(records, cutoff));
    Ok(Estimate { tensor, report })
}

/// Estimates a single-mode process from complex probe amplitudes.
///
/// Needs at least `(N+1)^2` distinct amplitudes that resolve every monomial.
pub fn estimate_general(records: &[ProbeRecord], cutoff: FockCutoff, options: EstimateOptions) -> Result<Estimate> {
    if cutoff.modes() != 1 {
        return Err(Error::ModeMismatch {
            process: "single-mode estimation",
            required: 1,
            got: cutoff.modes(),
        });
    }
    estimate(records, cutoff, options)
}

/// Estimates a two-mode process from probe amplitude pairs.
///
/// Needs at least `(N+1)^4` distinct pairs; a product of per-mode
/// ring-by-phase grids works.
pub fn estimate_general_two_mode(
    records: &[ProbeRecord],
    cutoff: FockCutoff,
    options: EstimateOptions,
) -> Result<Estimate> {
    if cutoff.modes() != 2 {
        return Err(Error::ModeMismatch {
            process: "two-mode estimation",
            required: 2,
            got: cutoff.modes(),
        });
    }
    if cutoff.n_max() > TWO_MODE_ESTIMATE_CAP {
        return Err(Error::MemoryGuard {
            n_max: cutoff.n_max(),
            cap: TWO_MODE_ESTIMATE_CAP,
        });
    }
    estimate(records, cutoff, options)
}
