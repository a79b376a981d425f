//! Least squares on a column-scaled design matrix, factored once and
//! reused for many right-hand sides.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Singular-value ratio below which the design is treated as rank deficient.
const RANK_TOLERANCE: f64 = 1e-13;

/// Thin QR of `W D S`, where `W` holds row weights and `S` scales every
/// column of the design `D` to unit norm.
pub(crate) struct LeastSquares {
    q: DMatrix<Complex64>,
    r: DMatrix<Complex64>,
    column_scale: Vec<f64>,
    row_weight: Vec<f64>,
    weighted_design: DMatrix<Complex64>,
    condition_number: f64,
}

/// Solution for one right-hand side.
pub(crate) struct Solution {
    pub coeffs: DVector<Complex64>,
    pub residual_rms: f64,
}

impl LeastSquares {
    pub fn new(design: &DMatrix<Complex64>, row_weight: Vec<f64>, context: &str) -> Result<Self> {
        let (rows, cols) = design.shape();
        debug_assert_eq!(row_weight.len(), rows);
        if rows < cols {
            return Err(Error::Underdetermined {
                needed: cols,
                got: rows,
                context: context.to_string(),
            });
        }
        let column_scale: Vec<f64> = (0..cols)
            .map(|c| {
                let norm = design.column(c).norm();
                if norm > 0.0 {
                    1.0 / norm
                } else {
                    0.0
                }
            })
            .collect();
        if column_scale.contains(&0.0) {
            return Err(Error::RankDeficient(format!(
                "{context}: a basis function vanishes on every probe"
            )));
        }
        let weighted_design = DMatrix::from_fn(rows, cols, |r, c| design[(r, c)] * (row_weight[r] * column_scale[c]));
        let qr = weighted_design.clone().qr();
        let (q, r) = (qr.q(), qr.r());
        let sv = r.clone().singular_values();
        let smax = sv.iter().copied().fold(0.0, f64::max);
        let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if smin.is_nan() || smin <= RANK_TOLERANCE * smax {
            return Err(Error::RankDeficient(format!(
                "{context}: probe set does not resolve all {cols} coefficients (singular value ratio {:.3e})",
                smin / smax
            )));
        }
        Ok(Self {
            q,
            r,
            column_scale,
            row_weight,
            weighted_design,
            condition_number: smax / smin,
        })
    }

    /// 2-norm condition number of the column-scaled, row-weighted design.
    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    /// Diagonal of the hat matrix, one value per design row.
    pub fn leverage(&self) -> Vec<f64> {
        self.q.row_iter().map(|row| row.norm_squared()).collect()
    }

    pub fn solve(&self, rhs: &DVector<Complex64>) -> Solution {
        let b = DVector::from_fn(rhs.len(), |r, _| rhs[r] * self.row_weight[r]);
        let y = self.q.adjoint() * &b;
        let x = self
            .r
            .solve_upper_triangular(&y)
            .expect("rank was checked at factorization");
        let residual = &self.weighted_design * &x - &b;
        let total_weight: f64 = self.row_weight.iter().map(|w| w * w).sum();
        let residual_rms = (residual.norm_squared() / total_weight).sqrt();
        let coeffs = DVector::from_fn(x.len(), |c, _| x[c] * self.column_scale[c]);
        Solution { coeffs, residual_rms }
    }
}
