//! Synthetic probe datasets from analytic process tensors.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::prng::SplitMix64;
use super::ProbeDataset;
use crate::error::{Error, Result};
use crate::fock::{self, CoherentAmplitude, DensityMatrix, FockCutoff};
use crate::processes::{analytic_tensor, ProcessParams};
use crate::tomography::ProbeRecord;

/// Gaussian noise with standard deviation `sigma` on the real and imaginary
/// part of every output entry, drawn from the [`SplitMix64`] stream `seed`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self { sigma: 0.0, seed: 0 }
    }
}

/// Fails on the first amplitude whose in-cutoff weight is below `minimum`;
/// otherwise returns the smallest weight seen (1 for an empty list).
pub fn check_truncation(amplitudes: &[CoherentAmplitude], cutoff: FockCutoff, minimum: f64) -> Result<f64> {
    let mut lowest = 1.0f64;
    for (index, a) in amplitudes.iter().enumerate() {
        let weight = fock::truncation_weight(a, cutoff);
        if weight < minimum {
            return Err(Error::TruncationLoss { index, weight, minimum });
        }
        lowest = lowest.min(weight);
    }
    Ok(lowest)
}

/// Probe outputs of the analytic process, stored as homodyne
/// reconstruction would give them: normalized to unit trace, with the
/// in-cutoff trace recorded as the herald probability on every record.
///
/// Noise is added to the normalized output, which is then symmetrized and
/// renormalized. A probe with zero output trace (photon subtraction on
/// vacuum) stores the vacuum with herald probability 0.
pub fn generate_synthetic(
    params: ProcessParams,
    cutoff: FockCutoff,
    amplitudes: &[CoherentAmplitude],
    noise: NoiseSpec,
) -> Result<ProbeDataset> {
    if !(noise.sigma.is_finite() && noise.sigma >= 0.0) {
        return Err(Error::ParameterOutOfRange(format!("noise sigma {}", noise.sigma)));
    }
    let tensor = analytic_tensor(params, cutoff)?;
    let mut rng = SplitMix64::new(noise.seed);
    let vacuum = DensityMatrix::fock(cutoff, &vec![0; cutoff.modes()])?;
    let mut records = Vec::with_capacity(amplitudes.len());
    for alpha in amplitudes {
        let out = tensor.synthesize_probe_output(alpha)?;
        let trace = out.trace();
        let normalized = if trace > 0.0 {
            out.scaled(1.0 / trace)
        } else {
            vacuum.clone()
        };
        let herald = trace.max(0.0);
        let output = if noise.sigma > 0.0 {
            add_noise(&normalized, noise.sigma, &mut rng)?
        } else {
            normalized
        };
        records.push(ProbeRecord::new(alpha.clone(), output, Some(herald))?);
    }
    let mut metadata = BTreeMap::new();
    metadata.insert("process".to_string(), params.to_string());
    metadata.insert("noise_sigma".to_string(), format!("{}", noise.sigma));
    metadata.insert("seed".to_string(), noise.seed.to_string());
    ProbeDataset::new(cutoff, records, metadata)
}

fn add_noise(rho: &DensityMatrix, sigma: f64, rng: &mut SplitMix64) -> Result<DensityMatrix> {
    let d = rho.dim();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    // row-major draw order, real part before imaginary part
    for j in 0..d {
        for k in 0..d {
            let re = rng.next_normal() * sigma;
            let im = rng.next_normal() * sigma;
            m[(j, k)] = rho.get(j, k) + Complex64::new(re, im);
        }
    }
    let noisy = DensityMatrix::from_hermitian_part(rho.cutoff(), &m)?;
    let trace = noisy.trace();
    if trace <= 0.0 {
        return Err(Error::DegenerateInput(format!(
            "noise sigma {sigma} drove an output trace to {trace}"
        )));
    }
    Ok(noisy.scaled(1.0 / trace))
}
