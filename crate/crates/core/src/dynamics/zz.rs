//! ZZ interaction from tracked dressed energies.

use serde::Serialize;

use crate::dynamics::tracking::AdiabaticTrack;
use crate::error::Result;

/// Labels |0…0⟩, |1 0…0⟩, |0…0 1⟩, |1 0…0 1⟩ for `n_modes` coupler modes.
pub fn zz_labels(n_modes: usize) -> Vec<Vec<usize>> {
    let mk = |q1: usize, q2: usize| {
        let mut v = vec![0; n_modes + 2];
        v[0] = q1;
        v[n_modes + 1] = q2;
        v
    };
    vec![mk(0, 0), mk(1, 0), mk(0, 1), mk(1, 1)]
}

/// ξ = E(11) + E(00) − E(10) − E(01) with energies in `zz_labels` order.
pub fn xi_from_energies(e: &[f64]) -> f64 {
    e[3] + e[0] - e[1] - e[2]
}

/// ξ at every tracked point (GHz).
pub fn zz_strength(track: &AdiabaticTrack) -> Result<Vec<f64>> {
    let n_modes = track.labels.first().map(|l| l.len() - 2).unwrap_or(0);
    let idx: Vec<usize> = zz_labels(n_modes)
        .iter()
        .map(|l| track.label_index(l))
        .collect::<Result<_>>()?;
    Ok(track
        .points
        .iter()
        .map(|p| {
            let e: Vec<f64> = idx.iter().map(|&i| p.energies[i]).collect();
            xi_from_energies(&e)
        })
        .collect())
}

/// Located extrema of |ξ|.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZZExtrema {
    pub max_flux: f64,
    /// Signed ξ at the maximum of |ξ| (GHz).
    pub max_xi: f64,
    /// (flux, ξ) of each refined suppression point.
    pub minima: Vec<(f64, f64)>,
    /// max |ξ| / min |ξ| over the suppression points.
    pub contrast: f64,
}

impl ZZExtrema {
    /// Deepest suppression point.
    pub fn deepest(&self) -> Option<(f64, f64)> {
        self.minima.iter().copied().min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::eigen::eigensolve_by_sector;
    use crate::dynamics::hamiltonian::{build_truncated_hamiltonian, FockBasis};
    use crate::dynamics::tracking::{track_adiabatic, TrackOptions};

    fn track_for(g: [[f64; 2]; 2]) -> AdiabaticTrack {
        let grid: Vec<f64> = (0..40).map(|i| 5.2 + 0.05 * i as f64).collect();
        let solve = move |nu: f64| eigensolve_by_sector(&build_truncated_hamiltonian([4.25, 4.7], [nu, 7.9], g));
        let eig: Vec<_> = grid.iter().map(|&x| solve(x)).collect();
        track_adiabatic(&grid, eig, &FockBasis::new(4, 2), &zz_labels(2), solve, &TrackOptions::default()).unwrap()
    }

    #[test]
    fn vanishes_without_coupling() {
        let xi = zz_strength(&track_for([[0.0; 2]; 2])).unwrap();
        assert!(xi.iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn nonzero_with_coupling_and_weyl_bound() {
        let g = [[0.05, 0.13], [0.16, -0.012]];
        let t = track_for(g);
        let xi = zz_strength(&t).unwrap();
        assert!(xi.iter().any(|&x| x.abs() > 1e-6));
        let gsum: f64 = g.iter().flatten().map(|v| v.abs()).sum();
        for p in &t.points {
            let nu = p.param;
            let vac = -(4.25 + 4.7 + nu + 7.9) / 2.0;
            let e11 = p.energies[3] - vac;
            assert!((e11 - (4.25 + 4.7)).abs() <= gsum);
        }
    }

    #[test]
    fn labels_layout() {
        assert_eq!(zz_labels(2), vec![vec![0, 0, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 1], vec![1, 0, 0, 1]]);
    }
}
