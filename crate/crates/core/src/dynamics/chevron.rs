//! Vacuum-Rabi chevron: excitation exchange between the qubits versus ω2 and time.

use nalgebra::DVector;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::dynamics::evolve::{basis_state, Propagator};
use crate::dynamics::hamiltonian::{build_hamiltonian, HamiltonianParams};
use crate::error::{Error, Result};

/// Zero-padding factor used for frequency extraction.
pub const ZERO_PADDING: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChevronResult {
    pub omega2: Vec<f64>,
    /// ω1 − ω2 (GHz).
    pub detunings: Vec<f64>,
    pub times: Vec<f64>,
    /// Qubit-2 excited population, one row per ω2.
    pub population: Vec<Vec<f64>>,
    /// Dominant oscillation frequency per row (GHz).
    pub frequencies: Vec<f64>,
    /// Largest deviation of the single-excitation population from one.
    pub conservation_error: f64,
}

/// Dominant frequency of a uniformly sampled real signal (mean removed, Hann
/// window, zero padding, parabolic peak interpolation).
pub fn dominant_frequency(signal: &[f64], dt: f64) -> f64 {
    let n = signal.len();
    if n < 4 {
        return f64::NAN;
    }
    let mean = signal.iter().sum::<f64>() / n as f64;
    let len = ZERO_PADDING * n;
    let mut buf: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); len];
    for (i, &s) in signal.iter().enumerate() {
        let w = 0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / (n - 1) as f64).cos();
        buf[i] = Complex64::new((s - mean) * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let mag: Vec<f64> = buf[..len / 2].iter().map(|c| c.norm()).collect();
    let (k, _) = mag
        .iter()
        .enumerate()
        .skip(1)
        .fold((1, f64::NEG_INFINITY), |acc, (i, &m)| if m > acc.1 { (i, m) } else { acc });
    let delta = if k + 1 < mag.len() {
        let (a, b, c) = (mag[k - 1], mag[k], mag[k + 1]);
        let den = a - 2.0 * b + c;
        if den != 0.0 {
            0.5 * (a - c) / den
        } else {
            0.0
        }
    } else {
        0.0
    };
    (k as f64 + delta) / (len as f64 * dt)
}

/// Start in |1 0…0⟩ and record the qubit-2 population for each ω2.
pub fn chevron(base: &HamiltonianParams, levels: usize, omega2: &[f64], times: &[f64]) -> Result<ChevronResult> {
    if times.len() < 4 {
        return Err(Error::InvalidParameter("chevron needs at least four time samples".into()));
    }
    let dt = times[1] - times[0];
    let n_modes = base.n_modes();
    let mut population = Vec::with_capacity(omega2.len());
    let mut frequencies = Vec::with_capacity(omega2.len());
    let mut conservation_error: f64 = 0.0;
    for &w2 in omega2 {
        let mut p = base.clone();
        p.qubit_frequencies[1] = w2;
        let h = build_hamiltonian(&p, levels);
        let mut start = vec![0; n_modes + 2];
        start[0] = 1;
        let psi0: DVector<Complex64> = basis_state(h.dim(), h.index_of(&start).unwrap());
        let prop = Propagator::new(&h.matrix)?;
        let c = prop.project(&psi0);
        let single: Vec<usize> = (0..h.dim()).filter(|&i| h.basis.excitations(i) == 1).collect();
        let q2 = h.index_of(&{
            let mut o = vec![0; n_modes + 2];
            o[n_modes + 1] = 1;
            o
        })
        .unwrap();
        let mut row = Vec::with_capacity(times.len());
        for &t in times {
            let psi = prop.evolve_projected(&c, t);
            let total: f64 = single.iter().map(|&i| psi[i].norm_sqr()).sum();
            conservation_error = conservation_error.max((total - 1.0).abs());
            row.push(psi[q2].norm_sqr());
        }
        frequencies.push(dominant_frequency(&row, dt));
        population.push(row);
    }
    Ok(ChevronResult {
        omega2: omega2.to_vec(),
        detunings: omega2.iter().map(|w| base.qubit_frequencies[0] - w).collect(),
        times: times.to_vec(),
        population,
        frequencies,
        conservation_error,
    })
}

/// `n` uniform samples from 0 to `t_max` inclusive.
pub fn time_grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_recovers_tone() {
        let dt = 0.05;
        let f = 0.0473;
        let s: Vec<f64> = (0..8000).map(|i| (std::f64::consts::TAU * f * i as f64 * dt).sin().powi(2)).collect();
        // sin² oscillates at twice the tone.
        let got = dominant_frequency(&s, dt);
        assert!((got - 2.0 * f).abs() < 1e-3 * 2.0 * f, "{got}");
    }

    #[test]
    fn chevron_widens_and_fades_off_resonance() {
        let base = HamiltonianParams::two_level([5.5, 5.5], vec![4.9, 7.6], [vec![0.08, 0.12], vec![0.15, -0.1]]);
        let times = time_grid(800.0, 8001);
        let w2 = [5.48, 5.52, 5.56, 5.60];
        let r = chevron(&base, 2, &w2, &times).unwrap();
        assert!(r.conservation_error < 1e-9);
        for row in &r.population {
            assert!(row.iter().all(|&p| (-1e-12..=1.0 + 1e-12).contains(&p)));
        }
        let contrast: Vec<f64> = r.population.iter().map(|row| row.iter().cloned().fold(0.0, f64::max)).collect();
        // The exchange resonance sits near ω2 ≈ 5.52 once Lamb shifts are included.
        assert!(r.frequencies[3] > r.frequencies[2] && r.frequencies[2] > r.frequencies[1]);
        assert!(contrast[3] < contrast[2] && contrast[2] < contrast[1]);
    }
}
