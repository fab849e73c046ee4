//! Unitary propagation, t in ns with energies as E/h in GHz.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dynamics::eigen::{eigensolve, Eigen};
use crate::error::Result;

/// exp(−i 2π H t) through the eigendecomposition of H.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub eigen: Eigen,
}

impl Propagator {
    pub fn new(h: &DMatrix<f64>) -> Result<Self> {
        Ok(Propagator { eigen: eigensolve(h)? })
    }

    pub fn from_eigen(eigen: Eigen) -> Self {
        Propagator { eigen }
    }

    /// Coefficients of ψ0 in the eigenbasis.
    pub fn project(&self, psi0: &DVector<Complex64>) -> DVector<Complex64> {
        let v = self.eigen.vectors.map(|x| Complex64::new(x, 0.0));
        v.transpose() * psi0
    }

    /// ψ(t) from eigenbasis coefficients `c`.
    pub fn evolve_projected(&self, c: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let phased = DVector::from_iterator(
            c.len(),
            c.iter().zip(self.eigen.values.iter()).map(|(ci, &e)| ci * Complex64::from_polar(1.0, -TAU * e * t)),
        );
        self.eigen.vectors.map(|x| Complex64::new(x, 0.0)) * phased
    }

    pub fn state_at(&self, psi0: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        self.evolve_projected(&self.project(psi0), t)
    }

    /// Dense single-step operator U(dt).
    pub fn step_operator(&self, dt: f64) -> DMatrix<Complex64> {
        let v = self.eigen.vectors.map(|x| Complex64::new(x, 0.0));
        let d = DMatrix::from_diagonal(&self.eigen.values.map(|e| Complex64::from_polar(1.0, -TAU * e * dt)));
        &v * d * v.transpose()
    }
}

/// States at each time in `times`.
pub fn time_evolve(h: &DMatrix<f64>, psi0: &DVector<Complex64>, times: &[f64]) -> Result<Vec<DVector<Complex64>>> {
    let prop = Propagator::new(h)?;
    let c = prop.project(psi0);
    Ok(times.iter().map(|&t| prop.evolve_projected(&c, t)).collect())
}

/// Basis vector `i` of dimension `dim`.
pub fn basis_state(dim: usize, i: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(dim);
    v[i] = Complex64::new(1.0, 0.0);
    v
}
