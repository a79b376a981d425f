//! Closed-form process tensors of seven standard quantum-optical processes.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::hypergeometric::{hyp2f1_terminating, shifted_regularized};
use super::tensor::ProcessTensor;
use crate::error::{Error, Result};
use crate::fock::{ln_factorial, FockCutoff};

/// A process and its parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProcessParams {
    Identity,
    /// `|alpha> -> |eta alpha>`, `0 <= eta < 1`.
    Attenuation {
        eta: f64,
    },
    /// `rho -> a† rho a`.
    PhotonAdd,
    /// `rho -> a rho a†`.
    PhotonSub,
    /// Kerr evolution `exp(-i pi/2 (a†a)^2)`.
    Cat,
    /// `exp(-(theta/2) (a2† a1 - a1† a2))`, mapping `|a1, a2>` to
    /// `|T a1 - R a2, R a1 + T a2>` with `T = cos(theta/2)`, `R = sin(-theta/2)`.
    BeamSplitter {
        theta: f64,
    },
    /// Two-mode squeezing `S2(r) = exp(r (a1 a2 - a1† a2†))`, `rho -> S2 rho S2†`.
    Pdc {
        r: f64,
    },
}

impl ProcessParams {
    pub const NAMES: [&'static str; 7] = [
        "identity",
        "attenuation",
        "photon_add",
        "photon_sub",
        "cat",
        "beam_splitter",
        "pdc",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Attenuation { .. } => "attenuation",
            Self::PhotonAdd => "photon_add",
            Self::PhotonSub => "photon_sub",
            Self::Cat => "cat",
            Self::BeamSplitter { .. } => "beam_splitter",
            Self::Pdc { .. } => "pdc",
        }
    }

    /// Natural mode count; identity works for either.
    pub fn modes(&self) -> usize {
        match self {
            Self::BeamSplitter { .. } | Self::Pdc { .. } => 2,
            _ => 1,
        }
    }

    pub fn supports_modes(&self, modes: usize) -> bool {
        matches!(self, Self::Identity) && (1..=2).contains(&modes) || self.modes() == modes
    }

    /// Whether `Tr E(rho) = Tr rho` for inputs that stay inside the cutoff.
    pub fn is_trace_preserving(&self) -> bool {
        !matches!(self, Self::PhotonAdd | Self::PhotonSub)
    }

    /// Whether the process commutes with optical phase rotation.
    pub fn is_phase_invariant(&self) -> bool {
        self.modes() == 1
    }

    /// Transmission and reflection amplitudes `(T, R)` of a beam splitter.
    pub fn beam_splitter_amplitudes(theta: f64) -> (f64, f64) {
        ((theta / 2.0).cos(), (-theta / 2.0).sin())
    }

    /// Parses a process name and a `key=value[,key=value]` parameter list.
    pub fn parse(name: &str, params: &str) -> Result<Self> {
        let mut values = std::collections::BTreeMap::new();
        for item in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("parameter `{item}` is not key=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("parameter `{k}` has non-numeric value `{v}`")))?;
            values.insert(k.trim().to_string(), v);
        }
        let mut take = |key: &str| {
            values
                .remove(key)
                .ok_or_else(|| Error::InvalidInput(format!("process `{name}` requires parameter `{key}`")))
        };
        let p = match name {
            "identity" => Self::Identity,
            "attenuation" => Self::Attenuation { eta: take("eta")? },
            "photon_add" => Self::PhotonAdd,
            "photon_sub" => Self::PhotonSub,
            "cat" => Self::Cat,
            "beam_splitter" => Self::BeamSplitter { theta: take("theta")? },
            "pdc" => Self::Pdc { r: take("r")? },
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown process `{other}` (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        };
        if let Some(extra) = values.keys().next() {
            return Err(Error::InvalidInput(format!(
                "process `{name}` does not take parameter `{extra}`"
            )));
        }
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Attenuation { eta } if !(0.0..1.0).contains(&eta) => Err(Error::ParameterOutOfRange(format!(
                "attenuation eta = {eta} outside [0, 1)"
            ))),
            Self::BeamSplitter { theta } if !theta.is_finite() => {
                Err(Error::ParameterOutOfRange(format!("beam splitter theta = {theta}")))
            }
            Self::Pdc { r } if !(r.is_finite() && r >= 0.0) => Err(Error::ParameterOutOfRange(format!(
                "pdc r = {r} must be finite and >= 0"
            ))),
            _ => Ok(()),
        }
    }

    /// `key=value` parameter string, empty for parameter-free processes.
    pub fn params_string(&self) -> String {
        match self {
            Self::Attenuation { eta } => format!("eta={eta}"),
            Self::BeamSplitter { theta } => format!("theta={theta}"),
            Self::Pdc { r } => format!("r={r}"),
            _ => String::new(),
        }
    }
}

impl fmt::Display for ProcessParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.params_string();
        if p.is_empty() {
            f.write_str(self.name())
        } else {
            write!(f, "{}({})", self.name(), p)
        }
    }
}

impl FromStr for ProcessParams {
    type Err = Error;

    /// `name` or `name(key=value,...)`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('(') {
            Some((name, rest)) => Self::parse(name, rest.trim_end_matches(')')),
            None => Self::parse(s, ""),
        }
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn sqrt_factorial_ratio(num: &[usize], den: &[usize]) -> f64 {
    let ln: f64 = num.iter().map(|&n| ln_factorial(n)).sum::<f64>() - den.iter().map(|&n| ln_factorial(n)).sum::<f64>();
    (0.5 * ln).exp()
}

fn binomial(n: usize, k: i64) -> f64 {
    if k < 0 || k as usize > n {
        return 0.0;
    }
    let k = k as usize;
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().round()
}

fn parity_sign(x: i64) -> f64 {
    if x.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Closed-form tensor restricted to all indices `<= nmax`.
///
/// Entries excluded by a Kronecker-delta selection rule are exactly zero.
pub fn analytic_tensor(params: ProcessParams, cutoff: FockCutoff) -> Result<ProcessTensor> {
    params.validate()?;
    if !params.supports_modes(cutoff.modes()) {
        return Err(Error::ModeMismatch {
            process: params.name(),
            required: params.modes(),
            got: cutoff.modes(),
        });
    }
    let label = params.to_string();
    match params {
        ProcessParams::Identity => {
            ProcessTensor::from_hermitian_fn(
                cutoff,
                label,
                |m, n, j, k| {
                    if m == j && n == k {
                        real(1.0)
                    } else {
                        real(0.0)
                    }
                },
            )
        }
        ProcessParams::Attenuation { eta } => {
            let loss = 1.0 - eta * eta;
            ProcessTensor::from_hermitian_fn(cutoff, label, move |m, n, j, k| {
                if m < j || n < k || m - j != n - k {
                    return real(0.0);
                }
                let l = m - j;
                let v = sqrt_factorial_ratio(&[m, n], &[j, k]) * eta.powi((j + k) as i32) * loss.powi(l as i32)
                    / ln_factorial(l).exp();
                real(v)
            })
        }
        ProcessParams::PhotonAdd => ProcessTensor::from_hermitian_fn(cutoff, label, |m, n, j, k| {
            if j >= 1 && k >= 1 && m == j - 1 && n == k - 1 {
                real(((j * k) as f64).sqrt())
            } else {
                real(0.0)
            }
        }),
        ProcessParams::PhotonSub => ProcessTensor::from_hermitian_fn(cutoff, label, |m, n, j, k| {
            if m == j + 1 && n == k + 1 {
                real((((j + 1) * (k + 1)) as f64).sqrt())
            } else {
                real(0.0)
            }
        }),
        ProcessParams::Cat => ProcessTensor::from_hermitian_fn(cutoff, label, |m, n, j, k| {
            if m != j || n != k {
                return real(0.0);
            }
            // exp(-i pi/2 (j^2 - k^2)), exactly one of 1, -i, -1, i
            let q = (j * j) as i64 - (k * k) as i64;
            match q.rem_euclid(4) {
                0 => real(1.0),
                1 => Complex64::new(0.0, -1.0),
                2 => real(-1.0),
                _ => Complex64::new(0.0, 1.0),
            }
        }),
        ProcessParams::BeamSplitter { theta } => {
            let (t, r) = ProcessParams::beam_splitter_amplitudes(theta);
            ProcessTensor::from_hermitian_fn(cutoff, label, move |m, n, j, k| {
                real(beam_splitter_entry(
                    cutoff.split(m),
                    cutoff.split(n),
                    cutoff.split(j),
                    cutoff.split(k),
                    t,
                    r,
                ))
            })
        }
        ProcessParams::Pdc { r } => ProcessTensor::from_hermitian_fn(cutoff, label, move |m, n, j, k| {
            real(pdc_entry(
                cutoff.split(m),
                cutoff.split(n),
                cutoff.split(j),
                cutoff.split(k),
                r,
            ))
        }),
    }
}

fn beam_splitter_entry(m: [usize; 2], n: [usize; 2], j: [usize; 2], k: [usize; 2], t: f64, r: f64) -> f64 {
    if m[0] + m[1] != j[0] + j[1] || n[0] + n[1] != k[0] + k[1] {
        return 0.0;
    }
    let (m1, n1) = (m[0] as i64, n[0] as i64);
    let (j1, j2, k1, k2) = (j[0] as i64, j[1] as i64, k[0] as i64, k[1] as i64);
    let mut sum = 0.0;
    for p in 0..=j1 {
        let bp = binomial(j[0], p) * binomial(j[1], m1 - p);
        if bp == 0.0 {
            continue;
        }
        for q in 0..=k1 {
            let bq = binomial(k[0], q) * binomial(k[1], n1 - q);
            if bq == 0.0 {
                continue;
            }
            // Both exponents are nonnegative whenever the binomials are nonzero.
            let t_pow = 2 * p + 2 * q + j2 + k2 - m1 - n1;
            let r_pow = j1 + k1 + m1 + n1 - 2 * p - 2 * q;
            sum += bp * bq * parity_sign(j1 + k1 - p - q) * t.powi(t_pow as i32) * r.powi(r_pow as i32);
        }
    }
    sum * sqrt_factorial_ratio(&[m[0], m[1], n[0], n[1]], &[j[0], j[1], k[0], k[1]])
}

/// Single factor `tanh^{m1-j1} 2F1(-j1, m2+1; m1-j1+1; tanh^2) / (m1-j1)!`.
///
/// For `m1 >= j1` this is the terminating series directly; below the
/// diagonal the regularized continuation applies (the unregularized form
/// has a pole in `c` there while the product with `1/(m1-j1)!` stays finite).
fn pdc_factor(m1: usize, j1: usize, m2: usize, tanh: f64) -> f64 {
    if m1 >= j1 {
        let shift = m1 - j1;
        let f = hyp2f1_terminating(-(j1 as i64), m2 as i64 + 1, shift as i64 + 1, tanh * tanh)
            .expect("c = m1 - j1 + 1 >= 1 cannot hit a pole");
        tanh.powi(shift as i32) * f / ln_factorial(shift).exp()
    } else {
        shifted_regularized(m1, j1, m2 + 1, tanh)
    }
}

fn pdc_entry(m: [usize; 2], n: [usize; 2], j: [usize; 2], k: [usize; 2], r: f64) -> f64 {
    let dm = m[1] as i64 - m[0] as i64;
    let dn = n[1] as i64 - n[0] as i64;
    if dm != j[1] as i64 - j[0] as i64 || dn != k[1] as i64 - k[0] as i64 {
        return 0.0;
    }
    let tanh = r.tanh();
    let cosh = r.cosh();
    let cosh_pow = j[1] as i64 + k[1] as i64 - j[0] as i64 - k[0] as i64 + 2;
    sqrt_factorial_ratio(&[n[0], m[0], m[1], n[1]], &[j[0], k[0], k[1], j[1]])
        * pdc_factor(m[0], j[0], m[1], tanh)
        * pdc_factor(n[0], k[0], n[1], tanh)
        / cosh.powi(cosh_pow as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_is_delta() {
        let t = analytic_tensor(ProcessParams::Identity, FockCutoff::single(3)).unwrap();
        for m in 0..4 {
            for n in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        let want = if m == j && n == k { 1.0 } else { 0.0 };
                        assert_eq!(t.get(m, n, j, k), c(want));
                    }
                }
            }
        }
    }

    #[test]
    fn attenuation_single_loss_entry() {
        let eta = 0.8;
        let t = analytic_tensor(ProcessParams::Attenuation { eta }, FockCutoff::single(3)).unwrap();
        assert!((t.get(1, 1, 0, 0).re - (1.0 - eta * eta)).abs() < 1e-15);
    }

    #[test]
    fn attenuation_near_unity_is_identity() {
        let t = analytic_tensor(ProcessParams::Attenuation { eta: 1.0 - 1e-13 }, FockCutoff::single(4)).unwrap();
        let id = analytic_tensor(ProcessParams::Identity, FockCutoff::single(4)).unwrap();
        assert!(t.max_abs_diff(&id).unwrap() < 1e-10);
    }

    #[test]
    fn attenuation_rejects_eta_out_of_range() {
        for eta in [1.0, -0.1, 1.5] {
            assert!(matches!(
                analytic_tensor(ProcessParams::Attenuation { eta }, FockCutoff::single(2)),
                Err(Error::ParameterOutOfRange(_))
            ));
        }
    }

    #[test]
    fn photon_sub_entry() {
        let t = analytic_tensor(ProcessParams::PhotonSub, FockCutoff::single(3)).unwrap();
        assert!((t.get(2, 2, 1, 1).re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn cat_phase() {
        let t = analytic_tensor(ProcessParams::Cat, FockCutoff::single(3)).unwrap();
        assert_eq!(t.get(2, 0, 2, 0), c(1.0));
        assert_eq!(t.get(1, 0, 1, 0), Complex64::new(0.0, -1.0));
        assert_eq!(t.get(0, 1, 0, 1), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn mode_mismatch() {
        assert!(matches!(
            analytic_tensor(ProcessParams::Cat, FockCutoff::two_mode(2)),
            Err(Error::ModeMismatch { .. })
        ));
        assert!(matches!(
            analytic_tensor(ProcessParams::BeamSplitter { theta: 0.3 }, FockCutoff::single(2)),
            Err(Error::ModeMismatch { .. })
        ));
        assert!(analytic_tensor(ProcessParams::Identity, FockCutoff::two_mode(2)).is_ok());
    }

    #[test]
    fn beam_splitter_at_zero_angle_is_identity() {
        let cut = FockCutoff::two_mode(3);
        let bs = analytic_tensor(ProcessParams::BeamSplitter { theta: 0.0 }, cut).unwrap();
        let id = analytic_tensor(ProcessParams::Identity, cut).unwrap();
        assert!(bs.max_abs_diff(&id).unwrap() < 1e-15);
    }

    #[test]
    fn pdc_at_zero_squeezing_is_identity() {
        let cut = FockCutoff::two_mode(3);
        let pdc = analytic_tensor(ProcessParams::Pdc { r: 0.0 }, cut).unwrap();
        let id = analytic_tensor(ProcessParams::Identity, cut).unwrap();
        assert!(pdc.max_abs_diff(&id).unwrap() < 1e-15);
    }

    #[test]
    fn pdc_vacuum_goes_to_two_mode_squeezed_vacuum() {
        // S2|00> = sum_l (-tanh r)^l |ll> / cosh r
        let r: f64 = 0.3;
        let cut = FockCutoff::two_mode(3);
        let t = analytic_tensor(ProcessParams::Pdc { r }, cut).unwrap();
        let vac = cut.join(&[0, 0]);
        for l in 0..=3 {
            for l2 in 0..=3 {
                let want = (-r.tanh()).powi(l as i32 + l2 as i32) / r.cosh().powi(2);
                let got = t.get(vac, vac, cut.join(&[l, l]), cut.join(&[l2, l2]));
                assert!((got.re - want).abs() < 1e-15, "{l} {l2}");
            }
        }
    }

    #[test]
    fn beam_splitter_amplitudes_are_unit() {
        for theta in [0.0, 0.3, 1.0, 2.5, -4.0] {
            let (t, r) = ProcessParams::beam_splitter_amplitudes(theta);
            assert!((t * t + r * r - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn parse_round_trip() {
        for p in [
            ProcessParams::Identity,
            ProcessParams::Attenuation { eta: 0.8 },
            ProcessParams::BeamSplitter {
                theta: std::f64::consts::FRAC_PI_2,
            },
            ProcessParams::Pdc { r: 0.2 },
            ProcessParams::Cat,
        ] {
            assert_eq!(p.to_string().parse::<ProcessParams>().unwrap(), p);
        }
        assert!(ProcessParams::parse("attenuation", "").is_err());
        assert!(ProcessParams::parse("attenuation", "eta=0.5,r=1").is_err());
        assert!(ProcessParams::parse("kerr", "").is_err());
    }
}
