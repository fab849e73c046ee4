//! Truncated qubit–mode–mode–qubit Hamiltonian on a Fock product basis.

use nalgebra::DMatrix;
use serde::Serialize;

/// Product basis |q1 m1 … mM q2⟩ with `levels` states per body, last body fastest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FockBasis {
    pub bodies: usize,
    pub levels: usize,
    states: Vec<Vec<usize>>,
}

impl FockBasis {
    pub fn new(bodies: usize, levels: usize) -> Self {
        assert!(levels >= 2, "need at least two levels per body");
        let dim = levels.pow(bodies as u32);
        let states = (0..dim)
            .map(|mut i| {
                let mut occ = vec![0; bodies];
                for slot in occ.iter_mut().rev() {
                    *slot = i % levels;
                    i /= levels;
                }
                occ
            })
            .collect();
        FockBasis { bodies, levels, states }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &[usize] {
        &self.states[i]
    }

    pub fn index(&self, occ: &[usize]) -> Option<usize> {
        if occ.len() != self.bodies || occ.iter().any(|&n| n >= self.levels) {
            return None;
        }
        Some(occ.iter().fold(0, |acc, &n| acc * self.levels + n))
    }

    pub fn excitations(&self, i: usize) -> usize {
        self.states[i].iter().sum()
    }
}

/// Frequencies and couplings entering the Hamiltonian, E/h in GHz.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HamiltonianParams {
    pub qubit_frequencies: [f64; 2],
    /// Qubit anharmonicities (negative for transmons); unused with two levels.
    pub qubit_anharmonicities: [f64; 2],
    pub mode_frequencies: Vec<f64>,
    pub mode_anharmonicities: Vec<f64>,
    /// `g[j][m]` couples qubit j to mode m.
    pub g: [Vec<f64>; 2],
    /// Optional direct qubit–qubit exchange.
    pub direct: f64,
}

impl HamiltonianParams {
    /// Two-level parameters: qubit and mode frequencies with their couplings.
    pub fn two_level(omega: [f64; 2], nu: Vec<f64>, g: [Vec<f64>; 2]) -> Self {
        let n = nu.len();
        HamiltonianParams {
            qubit_frequencies: omega,
            qubit_anharmonicities: [0.0; 2],
            mode_frequencies: nu,
            mode_anharmonicities: vec![0.0; n],
            g,
            direct: 0.0,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.mode_frequencies.len()
    }

    fn body_frequencies(&self) -> Vec<(f64, f64)> {
        let mut out = vec![(self.qubit_frequencies[0], self.qubit_anharmonicities[0])];
        out.extend(self.mode_frequencies.iter().copied().zip(self.mode_anharmonicities.iter().copied()));
        out.push((self.qubit_frequencies[1], self.qubit_anharmonicities[1]));
        out
    }
}

/// Real symmetric Hamiltonian together with its basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub matrix: DMatrix<f64>,
    pub basis: FockBasis,
}

impl Hamiltonian {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Bare-state labels in qubit/mode order, e.g. `[1, 0, 0, 1]`.
    pub fn index_of(&self, occ: &[usize]) -> Option<usize> {
        self.basis.index(occ)
    }
}

/// Add `v (b_i† b_j + h.c.)` between bodies i and j.
fn add_exchange(h: &mut DMatrix<f64>, basis: &FockBasis, i: usize, j: usize, v: f64) {
    if v == 0.0 {
        return;
    }
    for s in 0..basis.dim() {
        let occ = basis.state(s);
        if occ[j] == 0 || occ[i] + 1 >= basis.levels {
            continue;
        }
        let mut to = occ.to_vec();
        to[i] += 1;
        to[j] -= 1;
        let t = basis.index(&to).unwrap();
        let amp = v * ((occ[i] + 1) as f64).sqrt() * (occ[j] as f64).sqrt();
        h[(t, s)] += amp;
        h[(s, t)] += amp;
    }
}

/// Σ ω_i (n_i − 1/2) + α_i n_i(n_i − 1)/2 + Σ g_jm (b_j† a_m + h.c.).
///
/// With two levels the diagonal reduces to ±ω/2 per body.
pub fn build_hamiltonian(p: &HamiltonianParams, levels: usize) -> Hamiltonian {
    let n_modes = p.n_modes();
    let basis = FockBasis::new(n_modes + 2, levels);
    let dim = basis.dim();
    let bodies = p.body_frequencies();
    let mut h = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        let occ = basis.state(s);
        h[(s, s)] = occ
            .iter()
            .zip(&bodies)
            .map(|(&n, &(w, a))| {
                let n = n as f64;
                w * (n - 0.5) + 0.5 * a * n * (n - 1.0)
            })
            .sum();
    }
    let q2 = n_modes + 1;
    for m in 0..n_modes {
        add_exchange(&mut h, &basis, 0, 1 + m, p.g[0][m]);
        add_exchange(&mut h, &basis, q2, 1 + m, p.g[1][m]);
    }
    add_exchange(&mut h, &basis, 0, q2, p.direct);
    Hamiltonian { matrix: h, basis }
}

/// The sixteen-dimensional two-level Hamiltonian of two qubits and two modes.
pub fn build_truncated_hamiltonian(omega: [f64; 2], nu: [f64; 2], g: [[f64; 2]; 2]) -> Hamiltonian {
    let p = HamiltonianParams::two_level(omega, nu.to_vec(), [g[0].to_vec(), g[1].to_vec()]);
    build_hamiltonian(&p, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_round_trip() {
        let b = FockBasis::new(4, 3);
        assert_eq!(b.dim(), 81);
        for i in 0..b.dim() {
            assert_eq!(b.index(b.state(i)), Some(i));
        }
        assert_eq!(b.index(&[1, 0, 0, 1]), Some(27 + 1));
        assert_eq!(b.index(&[3, 0, 0, 0]), None);
    }

    #[test]
    fn diagonal_case_sums() {
        let h = build_truncated_hamiltonian([4.25, 4.7], [5.0, 7.9], [[0.0; 2]; 2]);
        for s in 0..16 {
            let occ = h.basis.state(s);
            let want: f64 = occ
                .iter()
                .zip([4.25, 5.0, 7.9, 4.7])
                .map(|(&n, w)| if n == 1 { w / 2.0 } else { -w / 2.0 })
                .sum();
            assert!((h.matrix[(s, s)] - want).abs() < 1e-14);
        }
        assert_eq!(h.matrix.clone().map(f64::abs).sum() - h.matrix.diagonal().map(f64::abs).sum(), 0.0);
    }

    #[test]
    fn excitation_number_blocks() {
        let h = build_truncated_hamiltonian([4.25, 4.7], [5.0, 7.9], [[0.05, 0.13], [0.16, -0.012]]);
        let mut counts = [0usize; 5];
        for a in 0..16 {
            counts[h.basis.excitations(a)] += 1;
            for b in 0..16 {
                if h.basis.excitations(a) != h.basis.excitations(b) {
                    assert_eq!(h.matrix[(a, b)], 0.0);
                }
            }
        }
        assert_eq!(counts, [1, 4, 6, 4, 1]);
        assert_eq!(h.matrix, h.matrix.transpose());
    }

    #[test]
    fn single_excitation_block_matches_direct_assembly() {
        let (w, nu) = ([4.25, 4.7], [5.0, 7.9]);
        let g = [[0.05, 0.13], [0.16, -0.012]];
        let h = build_truncated_hamiltonian(w, nu, g);
        // Rows (Q1, M1, M2, Q2) shifted by the vacuum energy.
        let e0 = -(w[0] + w[1] + nu[0] + nu[1]) / 2.0;
        let direct = [
            [w[0], g[0][0], g[0][1], 0.0],
            [g[0][0], nu[0], 0.0, g[1][0]],
            [g[0][1], 0.0, nu[1], g[1][1]],
            [0.0, g[1][0], g[1][1], w[1]],
        ];
        let idx = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]].map(|o| h.index_of(&o).unwrap());
        for r in 0..4 {
            for c in 0..4 {
                let shift = if r == c { e0 } else { 0.0 };
                assert!((h.matrix[(idx[r], idx[c])] - shift - direct[r][c]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn multilevel_ladder_factors() {
        let p = HamiltonianParams {
            qubit_frequencies: [4.0, 4.5],
            qubit_anharmonicities: [-0.2, -0.2],
            mode_frequencies: vec![5.0],
            mode_anharmonicities: vec![-0.01],
            g: [vec![0.1], vec![0.2]],
            direct: 0.0,
        };
        let h = build_hamiltonian(&p, 3);
        let a = h.index_of(&[2, 0, 0]).unwrap();
        let b = h.index_of(&[1, 1, 0]).unwrap();
        assert!((h.matrix[(a, b)] - 0.1 * 2f64.sqrt()).abs() < 1e-15);
        let diag = h.matrix[(a, a)] - h.matrix[(h.index_of(&[0, 0, 0]).unwrap(), h.index_of(&[0, 0, 0]).unwrap())];
        assert!((diag - (8.0 - 0.2)).abs() < 1e-14);
    }
}
