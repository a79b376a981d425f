//! Estimation for processes that commute with phase rotation, from probes
//! on the nonnegative real axis.
//!
//! For such a process `<j|rho_E(r)|k>` is `e^{-r^2}` times a polynomial in
//! `r` whose powers all share the parity of `j - k`, and whose coefficient
//! of `r^{m+n}` is `E[m][n][j][k] / sqrt(m! n!)` with `m - j = n - k`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::lstsq::LeastSquares;
use super::{
    check_records, low_weight_records, par_map, rescale_heralded, summarize, upper_pairs, ElementFit, Estimate,
    EstimateOptions, FitDiagnostics, ProbeRecord,
};
use crate::error::{Error, Result};
use crate::fock::{ln_factorial, sqrt_factorial, FockCutoff};
use crate::processes::ProcessTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn of(j: usize, k: usize) -> Self {
        if (j + k) % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Fitted power series of one output element `<j|rho_E(r)|k>`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyFit {
    pub j: usize,
    pub k: usize,
    pub parity: Parity,
    /// Highest power kept, `2N`.
    pub degree: usize,
    /// Taylor coefficients of the output element in `r`, powers `0..=degree`;
    /// powers of the other parity are exactly zero.
    pub coeffs: Vec<Complex64>,
    pub diagnostics: FitDiagnostics,
}

/// Probes grouped by radius, outputs averaged within a group.
struct RadialData {
    radii: Vec<f64>,
    counts: Vec<usize>,
    outputs: Vec<DMatrix<Complex64>>,
}

fn group_by_radius(records: &[ProbeRecord]) -> Result<RadialData> {
    let mut groups: BTreeMap<u64, (usize, DMatrix<Complex64>)> = BTreeMap::new();
    for (i, rec) in records.iter().enumerate() {
        let alpha = rec.amplitude().values()[0];
        if alpha.im != 0.0 || alpha.re < 0.0 {
            return Err(Error::InvariantViolation {
                record: i,
                message: format!("phase-invariant estimation needs real nonnegative amplitudes, got {alpha}"),
            });
        }
        // +0.0 and -0.0 must land in the same group
        let key = (alpha.re + 0.0).to_bits();
        let out = rescale_heralded(rec).entries().clone();
        groups
            .entry(key)
            .and_modify(|(n, sum)| {
                *n += 1;
                *sum += &out;
            })
            .or_insert((1, out));
    }
    let mut data = RadialData {
        radii: Vec::with_capacity(groups.len()),
        counts: Vec::with_capacity(groups.len()),
        outputs: Vec::with_capacity(groups.len()),
    };
    for (key, (n, sum)) in groups {
        data.radii.push(f64::from_bits(key));
        data.counts.push(n);
        data.outputs.push(sum / Complex64::new(n as f64, 0.0));
    }
    Ok(data)
}

/// Design rows: every radius, plus its mirror `-r` when `r > 0`.
/// Returns `(radius, group index, sign)` per row.
fn mirrored_rows(data: &RadialData) -> Vec<(f64, usize, f64)> {
    let mut rows = Vec::with_capacity(2 * data.radii.len());
    for (g, &r) in data.radii.iter().enumerate() {
        rows.push((r, g, 1.0));
        if r > 0.0 {
            rows.push((-r, g, -1.0));
        }
    }
    rows
}

/// Basis `r^l e^{-r^2}` for the powers `l = m + n` reachable by an element
/// with `|j - k| = offset`: `m - j = n - k` and `m, n <= N` leave
/// `l = offset, offset + 2, ..., 2N - offset`.
fn basis_powers(offset: usize, n_max: usize) -> Vec<usize> {
    (offset..=2 * n_max - offset).step_by(2).collect()
}

fn design(rows: &[(f64, usize, f64)], powers: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows.len(), powers.len(), |i, c| {
        let r = rows[i].0;
        Complex64::new(r.powi(powers[c] as i32) * (-r * r).exp(), 0.0)
    })
}

/// Taylor coefficients of `e^{-r^2} sum_l p_l r^l`, truncated at `degree`.
fn taylor_from_gaussian_series(p: &[Complex64], degree: usize) -> Vec<Complex64> {
    (0..=degree)
        .map(|l| {
            (0..=l / 2)
                .map(|s| {
                    let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
                    p[l - 2 * s] * (sign / ln_factorial(s).exp())
                })
                .sum()
        })
        .collect()
}

/// `E[m][n][j][k] = sqrt(m! n!) sum_{s <= (m+n)/2} C_{m+n-2s} / s!`.
fn tensor_entry(coeffs: &[Complex64], m: usize, n: usize) -> Complex64 {
    let l = m + n;
    let sum: Complex64 = (0..=l / 2).map(|s| coeffs[l - 2 * s] / ln_factorial(s).exp()).sum();
    sum * (sqrt_factorial(m) * sqrt_factorial(n))
}

/// Estimates a single-mode phase-invariant process from probes `|r>`,
/// `r >= 0`.
///
/// Needs at least `N + 1` distinct radii. Entries off the rule
/// `m - j = n - k` are exactly zero.
pub fn estimate_phase_invariant(
    records: &[ProbeRecord],
    cutoff: FockCutoff,
    options: EstimateOptions,
) -> Result<(Estimate, Vec<PolyFit>)> {
    if cutoff.modes() != 1 {
        return Err(Error::ModeMismatch {
            process: "phase-invariant estimation",
            required: 1,
            got: cutoff.modes(),
        });
    }
    check_records(records, cutoff)?;
    let n_max = cutoff.n_max();
    let data = group_by_radius(records)?;
    if data.radii.len() < n_max + 1 {
        return Err(Error::Underdetermined {
            needed: n_max + 1,
            got: data.radii.len(),
            context: "distinct probe radii".into(),
        });
    }
    let rows = mirrored_rows(&data);
    let weights: Vec<f64> = rows.iter().map(|&(_, g, _)| (data.counts[g] as f64).sqrt()).collect();

    // one factorization per offset |j - k|, shared by all elements with that offset
    let solvers = (0..=n_max)
        .map(|offset| {
            let powers = basis_powers(offset, n_max);
            let context = format!("phase-invariant fit of elements with |j - k| = {offset}");
            let ls = LeastSquares::new(&design(&rows, &powers), weights.clone(), &context)?;
            Ok((powers, ls))
        })
        .collect::<Result<Vec<_>>>()?;

    let degree = 2 * n_max;
    let pairs = upper_pairs(cutoff.dim());
    let fits = par_map(options.threads, &pairs, |&(j, k)| {
        let parity = Parity::of(j, k);
        let (powers, ls) = &solvers[k - j];
        let rhs = DVector::from_fn(rows.len(), |i, _| {
            let (_, g, mirror_sign) = rows[i];
            let sign = if parity == Parity::Odd { mirror_sign } else { 1.0 };
            data.outputs[g][(j, k)] * sign
        });
        let sol = ls.solve(&rhs);
        let mut gaussian_series = vec![Complex64::new(0.0, 0.0); degree + 1];
        for (c, &l) in powers.iter().enumerate() {
            gaussian_series[l] = sol.coeffs[c];
        }
        PolyFit {
            j,
            k,
            parity,
            degree,
            coeffs: taylor_from_gaussian_series(&gaussian_series, degree),
            diagnostics: FitDiagnostics {
                residual_rms: sol.residual_rms,
                condition_number: ls.condition_number(),
                leverage: ls.leverage(),
            },
        }
    })?;

    let mut tensor = ProcessTensor::zeros(cutoff, "estimated")?;
    for fit in &fits {
        let (j, k) = (fit.j, fit.k);
        // m - j = n - k with n = m + k - j
        for m in 0..=n_max {
            let n = m as i64 + k as i64 - j as i64;
            if n < 0 || n > n_max as i64 {
                continue;
            }
            let n = n as usize;
            let mut v = tensor_entry(&fit.coeffs, m, n);
            if j == k {
                v.im = 0.0;
            }
            tensor.set(m, n, j, k, v);
            tensor.set(n, m, k, j, v.conj());
        }
    }

    let element_fits = fits
        .iter()
        .map(|f| ElementFit {
            j: f.j,
            k: f.k,
            residual_rms: f.diagnostics.residual_rms,
            condition_number: f.diagnostics.condition_number,
        })
        .collect();
    let leverage = solvers[0].1.leverage();
    let report = summarize(element_fits, leverage, low_weight_records(records, cutoff));
    Ok((Estimate { tensor, report }, fits))
}
