//! Energy-cutoff error calculus.
//!
//! A state with mean energy at most `U` keeps weight at least `1 - gamma`
//! inside the cutoff `N` once `U / h_{N+1} <= gamma`, where
//! `h_n = (n + 1/2) omega`. The trace-norm error of working in the cutoff
//! is then at most `epsilon = 2 sqrt(gamma) + gamma / (1 - gamma)`.

use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, FockCutoff};

/// Largest cutoff [`required_cutoff`] will return.
pub const MAX_CUTOFF: u64 = 1_000_000_000;

/// `2 sqrt(gamma) + gamma / (1 - gamma)`, for `0 < gamma < 1`.
pub fn epsilon_from_gamma(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::ParameterOutOfRange(format!("gamma = {gamma} outside (0, 1)")));
    }
    Ok(2.0 * gamma.sqrt() + gamma / (1.0 - gamma))
}

fn epsilon_unchecked(gamma: f64) -> f64 {
    2.0 * gamma.sqrt() + gamma / (1.0 - gamma)
}

/// Inverse of [`epsilon_from_gamma`] by bisection, run until the bracket
/// cannot shrink further.
pub fn gamma_from_epsilon(epsilon: f64) -> Result<f64> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::ParameterOutOfRange(format!("epsilon = {epsilon} must be > 0")));
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0 - f64::EPSILON / 2.0;
    if !epsilon.is_finite() || epsilon_unchecked(hi) < epsilon {
        return Err(Error::Saturation(epsilon));
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if epsilon_unchecked(mid) < epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // return whichever endpoint is closer in epsilon
    let (elo, ehi) = (epsilon_unchecked(lo), epsilon_unchecked(hi));
    Ok(if lo > 0.0 && (epsilon - elo).abs() < (ehi - epsilon).abs() {
        lo
    } else {
        hi
    })
}

fn cutoff_satisfies(n: u64, energy: f64, omega: f64, gamma: f64) -> bool {
    energy / ((n as f64 + 1.5) * omega) <= gamma
}

/// Smallest `N` with `U / ((N + 3/2) omega) <= gamma`.
pub fn required_cutoff(energy: f64, omega: f64, gamma: f64) -> Result<u64> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!(
            "energy bound U = {energy} must be > 0"
        )));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!("omega = {omega} must be > 0")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::ParameterOutOfRange(format!("gamma = {gamma} outside (0, 1)")));
    }
    let estimate = (energy / (gamma * omega) - 1.5).ceil().max(0.0);
    if estimate > MAX_CUTOFF as f64 {
        return Err(Error::Overflow { limit: MAX_CUTOFF });
    }
    // settle rounding in the closed form against the inequality itself
    let mut n = estimate as u64;
    while n > 0 && cutoff_satisfies(n - 1, energy, omega, gamma) {
        n -= 1;
    }
    while !cutoff_satisfies(n, energy, omega, gamma) {
        n += 1;
    }
    if n > MAX_CUTOFF {
        return Err(Error::Overflow { limit: MAX_CUTOFF });
    }
    Ok(n)
}

/// Energy bound, cutoff and error budget that belong together.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffBound {
    pub energy: f64,
    pub omega: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub required_n: u64,
}

impl CutoffBound {
    pub fn from_epsilon(energy: f64, omega: f64, epsilon: f64) -> Result<Self> {
        let gamma = gamma_from_epsilon(epsilon)?;
        Self::from_gamma(energy, omega, gamma)
    }

    pub fn from_gamma(energy: f64, omega: f64, gamma: f64) -> Result<Self> {
        let epsilon = epsilon_from_gamma(gamma)?;
        let required_n = required_cutoff(energy, omega, gamma)?;
        Ok(Self {
            energy,
            omega,
            gamma,
            epsilon,
            required_n,
        })
    }

    /// The cutoff fixed first: `gamma = U / h_{N+1}`. Fails when that
    /// `gamma` is not below 1.
    pub fn from_cutoff(energy: f64, omega: f64, n: u64) -> Result<Self> {
        let gamma = energy / ((n as f64 + 1.5) * omega);
        let epsilon = epsilon_from_gamma(gamma)?;
        Ok(Self {
            energy,
            omega,
            gamma,
            epsilon,
            required_n: required_cutoff(energy, omega, gamma)?,
        })
    }

    /// `U / gamma`, the cutoff scale quoted without the `h_{N+1}` offset
    /// and `omega`.
    pub fn naive_cutoff(&self) -> f64 {
        self.energy / self.gamma
    }
}

/// Trace distance between a state and its cutoff approximation, which
/// bounds the output error of any trace-nonincreasing process. The smaller
/// matrix is zero-padded to the larger cutoff first.
pub fn output_error_bound(rho: &DensityMatrix, projected: &DensityMatrix) -> Result<f64> {
    let (a, b) = (rho.cutoff(), projected.cutoff());
    if a.modes() != b.modes() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let larger = FockCutoff::new(a.n_max().max(b.n_max()), a.modes())?;
    fock::trace_distance(&rho.embed(larger)?, &projected.embed(larger)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingRow {
    pub n: u64,
    pub gamma: f64,
    /// Infinite when `gamma >= 1`.
    pub epsilon: f64,
}

/// `epsilon` implied by `gamma = U / h_{N+1}` for each `N`.
pub fn scaling_table(energy: f64, omega: f64, n_values: &[u64]) -> Vec<ScalingRow> {
    n_values
        .iter()
        .map(|&n| {
            let gamma = energy / ((n as f64 + 1.5) * omega);
            let epsilon = if gamma > 0.0 && gamma < 1.0 {
                epsilon_unchecked(gamma)
            } else {
                f64::INFINITY
            };
            ScalingRow { n, gamma, epsilon }
        })
        .collect()
}
