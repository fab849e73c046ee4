//! Effective qubit–qubit exchange: dispersive estimate and exact splitting.

use serde::Serialize;

use crate::dynamics::eigen::eigensolve_by_sector;
use crate::dynamics::hamiltonian::{build_hamiltonian, HamiltonianParams};
use crate::error::{Error, Result};
use crate::model::LambShift;
use crate::optimize::golden_min;

/// Above this |g/Δ| the dispersive estimate is considered invalid.
pub const DISPERSIVE_LIMIT: f64 = 0.3;
/// Above this |g/Δ| a warning is logged.
pub const DISPERSIVE_WARN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XXResult {
    /// Effective exchange J12 (GHz).
    pub j12: f64,
    /// Lamb shifts of the two qubits (GHz).
    pub lamb: [f64; 2],
    /// Lamb-shifted qubit frequencies (GHz).
    pub dressed: [f64; 2],
    /// Largest |g_jm/Δ_jm|.
    pub max_ratio: f64,
}

impl XXResult {
    pub fn dispersive(&self) -> bool {
        self.max_ratio < DISPERSIVE_LIMIT
    }
}

/// Second-order exchange Σ_m g1m g2m (1/Δ1m + 1/Δ2m) with Δ_jm = ω_j − ν_m.
pub fn effective_xx(omega: [f64; 2], nu: &[f64], g: &[Vec<f64>; 2], lamb: LambShift) -> Result<XXResult> {
    for (m, &n) in nu.iter().enumerate() {
        for j in 0..2 {
            let (gj, d) = (g[j][m], omega[j] - n);
            if gj != 0.0 && d.abs() < 10.0 * gj.abs() {
                return Err(Error::ResonantDivergence { qubit: j + 1, mode: m, detuning: d, g: gj });
            }
        }
    }
    let r = xx_terms(omega, nu, g, lamb);
    if r.max_ratio > DISPERSIVE_WARN {
        log::warn!("dispersive ratio |g/Δ| = {:.3} exceeds {DISPERSIVE_WARN}", r.max_ratio);
    }
    Ok(r)
}

/// The same sums without the resonance guard, for flagged sweep rows.
pub fn xx_terms(omega: [f64; 2], nu: &[f64], g: &[Vec<f64>; 2], lamb: LambShift) -> XXResult {
    let mut j12 = 0.0;
    let mut shift = [0.0; 2];
    let mut max_ratio: f64 = 0.0;
    for (m, &n) in nu.iter().enumerate() {
        let d = [omega[0] - n, omega[1] - n];
        for j in 0..2 {
            let gj = g[j][m];
            if gj == 0.0 {
                continue;
            }
            max_ratio = max_ratio.max((gj / d[j]).abs());
            shift[j] += match lamb {
                LambShift::Standard => gj * gj / d[j],
                LambShift::PairSum => gj * gj / (d[0] + d[1]),
            };
        }
        if g[0][m] != 0.0 && g[1][m] != 0.0 {
            j12 += g[0][m] * g[1][m] * (1.0 / d[0] + 1.0 / d[1]);
        }
    }
    XXResult {
        j12,
        lamb: shift,
        dressed: [omega[0] + shift[0], omega[1] + shift[1]],
        max_ratio,
    }
}

/// Exact exchange from the single-excitation spectrum of the two-level Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactSplitting {
    /// ω2 at which the two qubit-like levels come closest (GHz).
    pub omega2: f64,
    /// Minimum gap (GHz); 2|J| on resonance.
    pub gap: f64,
    /// Signed exchange inferred from the symmetry of the lower qubit-like state.
    pub j12: f64,
}

/// Gap between the two single-excitation eigenstates with the largest qubit
/// weight, and the sign of the effective exchange.
pub fn qubit_like_gap(p: &HamiltonianParams) -> Result<(f64, f64)> {
    let h = build_hamiltonian(p, 2);
    let eig = eigensolve_by_sector(&h)?;
    let n_modes = p.n_modes();
    let mut q1 = vec![0; n_modes + 2];
    q1[0] = 1;
    let mut q2 = vec![0; n_modes + 2];
    q2[n_modes + 1] = 1;
    let (i1, i2) = (h.index_of(&q1).unwrap(), h.index_of(&q2).unwrap());
    let mut cands: Vec<(f64, usize)> = (0..h.dim())
        .filter(|&c| h.basis.excitations(eig.vectors.column(c).iamax()) == 1)
        .map(|c| (eig.vectors[(i1, c)].powi(2) + eig.vectors[(i2, c)].powi(2), c))
        .collect();
    cands.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let (a, b) = (cands[0].1, cands[1].1);
    let (lo, hi) = if eig.values[a] <= eig.values[b] { (a, b) } else { (b, a) };
    let gap = eig.values[hi] - eig.values[lo];
    // For [[ω, J], [J, ω]] the lower state is antisymmetric when J > 0.
    let sym = eig.vectors[(i1, lo)] * eig.vectors[(i2, lo)];
    Ok((gap, if sym > 0.0 { -1.0 } else { 1.0 }))
}

/// Minimize the qubit-like gap over ω2 with all couplings held fixed.
pub fn exact_splitting(p: &HamiltonianParams, lamb: LambShift) -> Result<ExactSplitting> {
    let est = xx_terms(p.qubit_frequencies, &p.mode_frequencies, &p.g, lamb);
    let center = p.qubit_frequencies[0] + est.lamb[0] - est.lamb[1];
    let mut width = 4.0 * est.j12.abs() + 0.5 * (est.lamb[0] - est.lamb[1]).abs() + 0.02;
    let gap_at = |w2: f64| {
        let mut q = p.clone();
        q.qubit_frequencies[1] = w2;
        qubit_like_gap(&q).map(|(g, _)| g).unwrap_or(f64::NAN)
    };
    let mut found = None;
    for _ in 0..6 {
        let (w, g) = golden_min(gap_at, center - width, center + width, 1e-12, 400);
        // A minimum pinned to the window edge means the window missed it.
        if (w - center).abs() < 0.999 * width {
            found = Some((w, g));
            break;
        }
        width *= 2.0;
    }
    let (omega2, gap) = found.ok_or(Error::ConvergenceFailure)?;
    let mut q = p.clone();
    q.qubit_frequencies[1] = omega2;
    let (_, sign) = qubit_like_gap(&q)?;
    Ok(ExactSplitting { omega2, gap, j12: sign * gap / 2.0 })
}
