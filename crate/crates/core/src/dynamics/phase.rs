//! Conditional phase accumulated by the target qubit, as a time-domain check of ξ.

use std::f64::consts::{PI, TAU};

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::evolve::Propagator;
use crate::dynamics::hamiltonian::Hamiltonian;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseResult {
    /// ξ recovered from the phase slope (GHz).
    pub xi: f64,
    pub hold_time: f64,
    pub times: Vec<f64>,
    /// Unwrapped conditional phase (rad).
    pub phases: Vec<f64>,
}

/// Hold time that accumulates about one radian, clamped to [10 ns, 10 ms].
pub fn default_hold_time(xi: f64) -> f64 {
    if xi == 0.0 {
        return 1e7;
    }
    (1.0 / (TAU * xi.abs())).clamp(10.0, 1e7)
}

pub fn unwrap_phases(raw: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    let mut offset = 0.0;
    for (i, &p) in raw.iter().enumerate() {
        if i > 0 {
            let d = p - raw[i - 1];
            if d > PI {
                offset -= TAU;
            } else if d < -PI {
                offset += TAU;
            }
        }
        out.push(p + offset);
    }
    out
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn to_complex(v: &DVector<f64>) -> DVector<Complex64> {
    v.map(|x| Complex64::new(x, 0.0))
}

/// Evolve (|00⟩ + |01⟩)/√2 and (|10⟩ + |11⟩)/√2 in the dressed basis under the
/// full Hamiltonian and fit the rate of the target's relative phase difference.
///
/// `dressed` holds the dressed vectors of |00⟩, |10⟩, |01⟩, |11⟩ in that order.
pub fn conditional_phase(h: &Hamiltonian, dressed: &[DVector<f64>], hold_time: f64, samples: usize) -> Result<PhaseResult> {
    if dressed.len() != 4 {
        return Err(Error::MissingLabel(format!("expected 4 dressed states, got {}", dressed.len())));
    }
    let prop = Propagator::new(&h.matrix)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let d: Vec<DVector<Complex64>> = dressed.iter().map(to_complex).collect();
    let ground = (&d[0] + &d[2]) * Complex64::new(s, 0.0);
    let excited = (&d[1] + &d[3]) * Complex64::new(s, 0.0);
    let cg = prop.project(&ground);
    let ce = prop.project(&excited);
    let times: Vec<f64> = (0..samples).map(|i| hold_time * i as f64 / (samples - 1) as f64).collect();
    let mut raw = Vec::with_capacity(samples);
    for &t in &times {
        let pg = prop.evolve_projected(&cg, t);
        let pe = prop.evolve_projected(&ce, t);
        let amp = |v: &DVector<Complex64>, k: usize| d[k].dotc(v);
        let rel_g = amp(&pg, 2) / amp(&pg, 0);
        let rel_e = amp(&pe, 3) / amp(&pe, 1);
        raw.push((rel_e * rel_g.conj()).arg());
    }
    let phases = unwrap_phases(&raw);
    let xi = -slope(&times, &phases) / TAU;
    Ok(PhaseResult { xi, hold_time, times, phases })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::eigen::eigensolve_by_sector;
    use crate::dynamics::hamiltonian::build_truncated_hamiltonian;
    use crate::dynamics::tracking::{label_from_bare, TrackOptions};
    use crate::dynamics::zz::{xi_from_energies, zz_labels};

    fn dressed(h: &Hamiltonian) -> (Vec<DVector<f64>>, f64) {
        let eig = eigensolve_by_sector(h).unwrap();
        let cols = label_from_bare(&eig, &h.basis, &zz_labels(2), &TrackOptions::default()).unwrap();
        let e: Vec<f64> = cols.iter().map(|&c| eig.values[c]).collect();
        (cols.iter().map(|&c| eig.vectors.column(c).into_owned()).collect(), xi_from_energies(&e))
    }

    #[test]
    fn unwrap_removes_jumps() {
        let raw: Vec<f64> = (0..50).map(|i| ((i as f64 * 0.9) + PI).rem_euclid(TAU) - PI).collect();
        let u = unwrap_phases(&raw);
        for w in u.windows(2) {
            assert!((w[1] - w[0] - 0.9).abs() < 1e-12);
        }
    }

    #[test]
    fn no_coupling_no_phase() {
        let h = build_truncated_hamiltonian([4.25, 4.7], [5.0, 7.9], [[0.0; 2]; 2]);
        let (d, xi) = dressed(&h);
        assert!(xi.abs() < 1e-12);
        let r = conditional_phase(&h, &d, 100.0, 50).unwrap();
        assert!(r.phases.iter().all(|p| p.abs() < 1e-9));
    }

    #[test]
    fn phase_rate_equals_xi() {
        let h = build_truncated_hamiltonian([4.25, 4.7], [5.0, 7.9], [[0.05, 0.13], [0.16, -0.012]]);
        let (d, xi) = dressed(&h);
        let r = conditional_phase(&h, &d, default_hold_time(xi), 200).unwrap();
        assert!((r.xi - xi).abs() < 1e-6 * xi.abs(), "{} vs {}", r.xi, xi);
    }
}
