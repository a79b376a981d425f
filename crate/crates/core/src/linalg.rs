//! Small dense helpers shared by the state and process layers.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Largest `|a[j][k] - conj(a[k][j])|` over the matrix.
pub fn hermiticity_deviation(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in j..n {
            worst = worst.max((a[(j, k)] - a[(k, j)].conj()).norm());
        }
    }
    worst
}

/// `(A + A†) / 2`, with a real diagonal.
pub fn hermitian_part(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            Complex64::new(a[(j, j)].re, 0.0)
        } else {
            (a[(j, k)] + a[(k, j)].conj()) * 0.5
        }
    })
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The matrix is first split into the connected components of its nonzero
/// pattern; each block goes through Householder tridiagonalization and
/// implicit symmetric QR (nalgebra's `SymmetricEigen`). Process Choi
/// matrices are extremely sparse and the unsplit solver can return NaN on
/// their large exactly-zero blocks.
pub fn hermitian_eigenvalues(a: &DMatrix<Complex64>) -> Vec<f64> {
    let n = a.nrows();
    let mut values = Vec::with_capacity(n);
    for block in components(a) {
        if block.len() == 1 {
            values.push(a[(block[0], block[0])].re);
            continue;
        }
        let sub = DMatrix::from_fn(block.len(), block.len(), |r, c| a[(block[r], block[c])]);
        let eig = nalgebra::SymmetricEigen::try_new(sub, f64::EPSILON, 0)
            .expect("symmetric eigensolver with unlimited iterations always converges");
        values.extend(eig.eigenvalues.iter().copied());
    }
    values.sort_by(f64::total_cmp);
    values
}

/// Index sets of the connected components of the graph `j ~ k` iff `a[j][k] != 0`.
fn components(a: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for j in 0..n {
        for k in (j + 1)..n {
            if a[(j, k)] != Complex64::new(0.0, 0.0) || a[(k, j)] != Complex64::new(0.0, 0.0) {
                let (rj, rk) = (root(&mut parent, j), root(&mut parent, k));
                if rj != rk {
                    parent[rj.max(rk)] = rj.min(rk);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}
