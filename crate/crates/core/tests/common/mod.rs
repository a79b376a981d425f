//! Brute-force reference tensors built from padded matrix exponentials.
#![allow(dead_code)]

use csqpt::fock::FockCutoff;
use csqpt::processes::ProcessTensor;
use nalgebra::DMatrix;
use num_complex::Complex64;

fn annihilation(d: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |r, c| {
        if c == r + 1 {
            Complex64::new((c as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `(a1, a2)` on two modes with `padded + 1` levels each, flat index `n1 * d + n2`.
fn two_mode_ladders(padded: usize) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let d = padded + 1;
    let a = annihilation(d);
    let id = DMatrix::<Complex64>::identity(d, d);
    (a.kronecker(&id), id.kronecker(&a))
}

/// Tensor of `rho -> U rho U†`, reading `U` on the padded space and keeping
/// indices inside `cutoff`.
fn conjugation_tensor(u: &DMatrix<Complex64>, padded: usize, cutoff: FockCutoff) -> ProcessTensor {
    let dp = padded + 1;
    let d = cutoff.dim();
    let map: Vec<usize> = (0..d)
        .map(|i| {
            let [a, b] = cutoff.split(i);
            a * dp + b
        })
        .collect();
    let mut t = ProcessTensor::zeros(cutoff, "oracle").unwrap();
    for m in 0..d {
        for n in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let v = u[(map[j], map[m])] * u[(map[k], map[n])].conj();
                    t.set(m, n, j, k, v);
                }
            }
        }
    }
    t
}

/// Beam splitter: `U = exp(-(theta/2)(a2† a1 - a1† a2))`.
pub fn beam_splitter_oracle(theta: f64, cutoff: FockCutoff, padded: usize) -> ProcessTensor {
    let (a1, a2) = two_mode_ladders(padded);
    let g = a2.adjoint() * &a1 - a1.adjoint() * &a2;
    let u = (g * Complex64::new(-theta / 2.0, 0.0)).exp();
    conjugation_tensor(&u, padded, cutoff)
}

/// Two-mode squeezing: `U = exp(r (a1 a2 - a1† a2†))`.
pub fn pdc_oracle(r: f64, cutoff: FockCutoff, padded: usize) -> ProcessTensor {
    let (a1, a2) = two_mode_ladders(padded);
    let g = &a1 * &a2 - a1.adjoint() * a2.adjoint();
    let u = (g * Complex64::new(r, 0.0)).exp();
    conjugation_tensor(&u, padded, cutoff)
}
