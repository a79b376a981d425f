//! Terminating Gauss hypergeometric sums.

use crate::error::{Error, Result};
use crate::fock::ln_factorial;

/// `2F1(a, b; c; z)` for a nonpositive integer `a`, summed exactly over its
/// `|a| + 1` terms.
///
/// A nonpositive `c` is accepted as long as the series stops before the
/// Pochhammer symbol `(c)_n` reaches zero, i.e. when `c <= a`.
pub fn hyp2f1_terminating(a: i64, b: i64, c: i64, z: f64) -> Result<f64> {
    if a > 0 {
        return Err(Error::InvalidInput(format!(
            "first parameter must be a nonpositive integer, got {a}"
        )));
    }
    if c <= 0 && c > a {
        return Err(Error::Pole { a, c });
    }
    let terms = (-a) as usize;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for n in 0..terms {
        let n = n as i64;
        term *= (a + n) as f64 * (b + n) as f64 / ((c + n) as f64 * (n + 1) as f64) * z;
        sum += term;
    }
    Ok(sum)
}

/// `t^{shift} * 2F1(-j, b; shift + 1; t^2) / shift!` with `shift = m - j`,
/// continued to `m < j` through the regularized function `2F1 / Gamma(c)`.
///
/// When `shift < 0` the terms with `shift + n < 0` carry `1/Gamma` of a
/// nonpositive integer and vanish; the survivors all have a nonnegative
/// power of `t`, so the result is finite at `t = 0`.
pub(crate) fn shifted_regularized(m: usize, j: usize, b: usize, t: f64) -> f64 {
    let shift = m as i64 - j as i64;
    let first = if shift < 0 { (-shift) as usize } else { 0 };
    let mut sum = 0.0f64;
    for n in first..=j {
        // (-j)_n (b)_n / (n! (shift+n)!)
        let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
        let ln_mag = ln_factorial(j) - ln_factorial(j - n) + ln_factorial(b + n - 1)
            - ln_factorial(b - 1)
            - ln_factorial(n)
            - ln_factorial((shift + n as i64) as usize);
        let power = (shift + 2 * n as i64) as i32;
        sum += sign * ln_mag.exp() * t.powi(power);
    }
    sum
}
