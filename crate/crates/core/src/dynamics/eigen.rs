//! Dense symmetric eigendecomposition.

use nalgebra::{DMatrix, DVector};

use crate::dynamics::hamiltonian::Hamiltonian;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 10_000;

/// Ascending eigenvalues with eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// ‖V Λ Vᵀ − H‖_max.
    pub fn reconstruction_error(&self, h: &DMatrix<f64>) -> f64 {
        let lam = DMatrix::from_diagonal(&self.values);
        (&self.vectors * lam * self.vectors.transpose() - h).abs().max()
    }

    /// ‖VᵀV − I‖_max.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.dim();
        (self.vectors.transpose() * &self.vectors - DMatrix::identity(n, n)).abs().max()
    }
}

fn sorted(values: DVector<f64>, vectors: DMatrix<f64>) -> Eigen {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let values = DVector::from_iterator(n, order.iter().map(|&i| values[i]));
    let vectors = DMatrix::from_fn(vectors.nrows(), n, |r, c| vectors[(r, order[c])]);
    Eigen { values, vectors }
}

/// Full symmetric eigendecomposition, eigenvalues ascending.
pub fn eigensolve(h: &DMatrix<f64>) -> Result<Eigen> {
    let dec = h.clone().try_symmetric_eigen(f64::EPSILON, MAX_SWEEPS).ok_or(Error::ConvergenceFailure)?;
    Ok(sorted(dec.eigenvalues, dec.eigenvectors))
}

/// Eigendecomposition performed block by block in excitation-number sectors.
///
/// Exact, since the Hamiltonian conserves total excitation number, and free of
/// accidental mixing between degenerate states of different sectors.
pub fn eigensolve_by_sector(h: &Hamiltonian) -> Result<Eigen> {
    let dim = h.dim();
    let max_exc = (0..dim).map(|i| h.basis.excitations(i)).max().unwrap_or(0);
    let mut values = DVector::zeros(dim);
    let mut vectors = DMatrix::zeros(dim, dim);
    let mut col = 0;
    for n in 0..=max_exc {
        let idx: Vec<usize> = (0..dim).filter(|&i| h.basis.excitations(i) == n).collect();
        let block = DMatrix::from_fn(idx.len(), idx.len(), |r, c| h.matrix[(idx[r], idx[c])]);
        let e = eigensolve(&block)?;
        for k in 0..idx.len() {
            values[col] = e.values[k];
            for (r, &i) in idx.iter().enumerate() {
                vectors[(i, col)] = e.vectors[(r, k)];
            }
            col += 1;
        }
    }
    Ok(sorted(values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::hamiltonian::build_truncated_hamiltonian;

    #[test]
    fn diagonal_input() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 2.0]));
        let e = eigensolve(&h).unwrap();
        assert_eq!(e.values.as_slice(), &[-1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let (g, d) = (0.13, 0.7);
        let h = DMatrix::from_row_slice(2, 2, &[0.0, g, g, d]);
        let e = eigensolve(&h).unwrap();
        let s = (d * d + 4.0 * g * g).sqrt();
        assert!((e.values[0] - (d - s) / 2.0).abs() < 1e-15);
        assert!((e.values[1] - (d + s) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn sector_solve_matches_full_solve() {
        let h = build_truncated_hamiltonian([4.25, 4.7], [5.0, 7.9], [[0.05, 0.13], [0.16, -0.012]]);
        let a = eigensolve(&h.matrix).unwrap();
        let b = eigensolve_by_sector(&h).unwrap();
        for i in 0..16 {
            assert!((a.values[i] - b.values[i]).abs() < 1e-12);
        }
        assert!(b.reconstruction_error(&h.matrix) < 1e-12);
        assert!(b.orthonormality_error() < 1e-12);
    }
}
