//! Process estimation from coherent-state probe records.
//!
//! Each output matrix element `<j|rho_E(alpha)|k>` is a Gaussian-weighted
//! polynomial in `(alpha, conj(alpha))` whose coefficients are the tensor
//! entries. The estimators fit that polynomial by least squares.

mod general;
mod lstsq;
mod phase_invariant;

use crate::error::{Error, Result};
use crate::fock::{CoherentAmplitude, DensityMatrix, FockCutoff};
use crate::processes::ProcessTensor;

pub use general::{estimate_general, estimate_general_two_mode, TWO_MODE_ESTIMATE_CAP};
pub use phase_invariant::{estimate_phase_invariant, Parity, PolyFit};

/// Outputs must have unit trace to within this slack.
pub const UNIT_TRACE_TOLERANCE: f64 = 1e-6;

/// Condition number above which a fit is flagged as ill-conditioned.
pub const ILL_CONDITIONED: f64 = 1e12;

/// Probes whose in-cutoff weight falls below this are listed in the report.
pub const LOW_TRUNCATION_WEIGHT: f64 = 0.99;

/// One probe: the input amplitude, the reconstructed unit-trace output and,
/// for heralded processes, the probability of the heralding event.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRecord {
    amplitude: CoherentAmplitude,
    output: DensityMatrix,
    herald_probability: Option<f64>,
}

impl ProbeRecord {
    /// `herald_probability` must be finite and nonnegative. Idealized
    /// photon addition and subtraction are not trace-nonincreasing, so
    /// values above 1 are accepted.
    pub fn new(amplitude: CoherentAmplitude, output: DensityMatrix, herald_probability: Option<f64>) -> Result<Self> {
        if amplitude.modes() != output.cutoff().modes() {
            return Err(Error::InvalidInput(format!(
                "amplitude has {} modes but output has {}",
                amplitude.modes(),
                output.cutoff().modes()
            )));
        }
        let trace = output.trace();
        if (trace - 1.0).abs() > UNIT_TRACE_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "output trace {trace} is not 1 (outputs are stored normalized)"
            )));
        }
        if let Some(p) = herald_probability {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::ParameterOutOfRange(format!("herald probability {p}")));
            }
        }
        Ok(Self {
            amplitude,
            output,
            herald_probability,
        })
    }

    pub fn amplitude(&self) -> &CoherentAmplitude {
        &self.amplitude
    }

    pub fn output(&self) -> &DensityMatrix {
        &self.output
    }

    pub fn herald_probability(&self) -> Option<f64> {
        self.herald_probability
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.output.cutoff()
    }
}

/// Unnormalized process output: the stored output scaled by the herald
/// probability when one is present.
pub fn rescale_heralded(record: &ProbeRecord) -> DensityMatrix {
    match record.herald_probability {
        Some(p) => record.output.scaled(p),
        None => record.output.clone(),
    }
}

/// Probe radii `[0, sqrt(N)]` for a cutoff `N`.
///
/// A heuristic: the mean photon number `|alpha|^2` of the widest probe
/// reaches the cutoff, so every Fock level is excited while the design
/// stays reasonably conditioned.
pub fn recommended_radius_range(cutoff: FockCutoff) -> (f64, f64) {
    (0.0, (cutoff.n_max() as f64).sqrt())
}

/// Per-fit quality numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct FitDiagnostics {
    pub residual_rms: f64,
    pub condition_number: f64,
    /// Hat-matrix diagonal, one value per design row.
    pub leverage: Vec<f64>,
}

/// Least-squares summary for one output element `(j, k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementFit {
    pub j: usize,
    pub k: usize,
    pub residual_rms: f64,
    pub condition_number: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub fits: Vec<ElementFit>,
    /// Largest condition number over all fits.
    pub condition_number: f64,
    /// Root mean square of the per-element residuals.
    pub residual_rms: f64,
    /// Hat-matrix diagonal of the (first) design, one value per design row.
    pub leverage: Vec<f64>,
    /// Indices of records whose truncation weight is below [`LOW_TRUNCATION_WEIGHT`].
    pub low_weight_records: Vec<usize>,
}

impl EstimateReport {
    pub fn ill_conditioned(&self) -> bool {
        self.condition_number > ILL_CONDITIONED
    }
}

#[derive(Clone, Debug)]
pub struct Estimate {
    pub tensor: ProcessTensor,
    pub report: EstimateReport,
}

/// Worker-thread count for the per-element solves. Results do not depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EstimateOptions {
    pub threads: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self { threads: 1 }
    }
}

/// Common record checks: nonempty, shared cutoff, herald all-or-none.
fn check_records(records: &[ProbeRecord], cutoff: FockCutoff) -> Result<bool> {
    if records.is_empty() {
        return Err(Error::Underdetermined {
            needed: 1,
            got: 0,
            context: "no probe records".into(),
        });
    }
    for (i, r) in records.iter().enumerate() {
        if r.cutoff() != cutoff {
            return Err(Error::CutoffMismatch(format!(
                "record {i} has cutoff {} but estimation uses {cutoff}",
                r.cutoff()
            )));
        }
    }
    let heralded = records[0].herald_probability.is_some();
    if let Some(i) = records.iter().position(|r| r.herald_probability.is_some() != heralded) {
        return Err(Error::InvariantViolation {
            record: i,
            message: "herald probability must be given for all records or none".into(),
        });
    }
    Ok(heralded)
}

fn low_weight_records(records: &[ProbeRecord], cutoff: FockCutoff) -> Vec<usize> {
    records
        .iter()
        .enumerate()
        .filter(|(_, r)| crate::fock::truncation_weight(&r.amplitude, cutoff) < LOW_TRUNCATION_WEIGHT)
        .map(|(i, _)| i)
        .collect()
}

/// Output pairs `(j, k)` with `j <= k`; the rest follow by conjugation.
fn upper_pairs(dim: usize) -> Vec<(usize, usize)> {
    (0..dim).flat_map(|j| (j..dim).map(move |k| (j, k))).collect()
}

/// Runs `f` over `items` on a pool of `threads` workers, keeping input order.
fn par_map<T, U, F>(threads: usize, items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    if threads <= 1 {
        return Ok(items.iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start {threads} worker threads: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

fn summarize(fits: Vec<ElementFit>, leverage: Vec<f64>, low_weight_records: Vec<usize>) -> EstimateReport {
    let condition_number = fits.iter().map(|f| f.condition_number).fold(0.0, f64::max);
    let residual_rms = if fits.is_empty() {
        0.0
    } else {
        (fits.iter().map(|f| f.residual_rms.powi(2)).sum::<f64>() / fits.len() as f64).sqrt()
    };
    EstimateReport {
        fits,
        condition_number,
        residual_rms,
        leverage,
        low_weight_records,
    }
}
