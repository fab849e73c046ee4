//! Quantized mode energies, the qubit–mode capacitance network and coupling strengths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{ModeBasis, ModeSolution};
use crate::params::{josephson_energy, DeviceParams, FluxBias};
use crate::units::{joules_to_ghz, ELEMENTARY_CHARGE, PLANCK, REDUCED_FLUX_QUANTUM};

/// Junction participation below which a mode is treated as decoupled.
pub const DELTA_U_FLOOR: f64 = 1e-10;

/// Quantized single-mode energies, all E/h in GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeEnergies {
    pub e_c: f64,
    pub e_l: f64,
    /// Self-Kerr coefficient.
    pub kerr: f64,
    /// 0 → 1 transition frequency.
    pub omega_c: f64,
    /// 1 → 2 minus 0 → 1 transition frequency.
    pub eta: f64,
    /// Effective mode capacitance C_Σ/Δu² (F).
    pub c_prime: f64,
}

impl ModeEnergies {
    /// Harmonic frequency sqrt(8 E_C E_L).
    pub fn plasma_frequency(&self) -> f64 {
        (8.0 * self.e_c * self.e_l).sqrt()
    }

    /// Level energy E_n = n sqrt(8 E_C E_L) − K (n² + n)/2 above the ground state.
    pub fn level(&self, n: usize) -> f64 {
        let n = n as f64;
        n * self.plasma_frequency() - 0.5 * self.kerr * (n * n + n)
    }

    /// E_{n+1} − E_n.
    pub fn transition(&self, n: usize) -> f64 {
        self.level(n + 1) - self.level(n)
    }
}

/// Per-mode charging, inductive and Kerr energies.
pub fn mode_energies(mode: &ModeSolution, basis: &ModeBasis, params: &DeviceParams, flux: FluxBias) -> Result<ModeEnergies> {
    let du = mode.delta_u;
    if du.abs() < DELTA_U_FLOOR {
        return Err(Error::JunctionDecoupledMode { m: mode.index, delta_u: du });
    }
    let cs = basis.total_capacitance;
    let c_prime = cs / (du * du);
    let e_c = joules_to_ghz(ELEMENTARY_CHARGE.powi(2) / (2.0 * c_prime));
    // L'_m = L_m Δu² with L_m = 1/(C_Σ ω²).
    let e_l = joules_to_ghz(REDUCED_FLUX_QUANTUM.powi(2) * cs * mode.omega * mode.omega / (du * du));
    let ej = josephson_energy(params, flux);
    let kerr = if ej == 0.0 || e_l == 0.0 { 0.0 } else { e_c * ej / e_l };
    let mut en = ModeEnergies { e_c, e_l, kerr, omega_c: 0.0, eta: 0.0, c_prime };
    en.omega_c = en.transition(0);
    en.eta = en.transition(1) - en.transition(0);
    Ok(en)
}

/// Symmetric 3×3 capacitance matrix in (Q1, mode, Q2) order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacitanceMatrix {
    pub c_sigma1: f64,
    pub c_prime: f64,
    pub c_sigma2: f64,
    /// C_g1 u(−l)/Δu.
    pub g1: f64,
    /// C_g2 u(+l)/Δu.
    pub g2: f64,
}

impl CapacitanceMatrix {
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.c_sigma1, -self.g1, 0.0],
            [-self.g1, self.c_prime, -self.g2],
            [0.0, -self.g2, self.c_sigma2],
        ]
    }

    /// C' C_Σ1 C_Σ2 − C_Σ2 G1² − C_Σ1 G2².
    pub fn determinant(&self) -> f64 {
        self.c_prime * self.c_sigma1 * self.c_sigma2
            - self.c_sigma2 * self.g1 * self.g1
            - self.c_sigma1 * self.g2 * self.g2
    }
}

pub fn capacitance_matrix(params: &DeviceParams, mode: &ModeSolution) -> Result<CapacitanceMatrix> {
    let du = mode.delta_u;
    if du.abs() < DELTA_U_FLOOR {
        return Err(Error::JunctionDecoupledMode { m: mode.index, delta_u: du });
    }
    Ok(CapacitanceMatrix {
        c_sigma1: params.qubit_capacitance(1),
        c_prime: params.total_capacitance() / (du * du),
        c_sigma2: params.qubit_capacitance(2),
        g1: params.c_g1 * mode.left_end() / du,
        g2: params.c_g2 * mode.right_end() / du,
    })
}

/// Closed-form inverse of the capacitance matrix.
pub fn invert_capacitance_matrix(c: &CapacitanceMatrix) -> Result<[[f64; 3]; 3]> {
    let det = c.determinant();
    if det.is_nan() || det <= 0.0 {
        return Err(Error::SingularMatrix { det });
    }
    let (s1, s2, cp, g1, g2) = (c.c_sigma1, c.c_sigma2, c.c_prime, c.g1, c.g2);
    let a11 = (s2 * cp - g2 * g2) / det;
    let a12 = s2 * g1 / det;
    let a13 = g1 * g2 / det;
    let a22 = s1 * s2 / det;
    let a23 = s1 * g2 / det;
    let a33 = (s1 * cp - g1 * g1) / det;
    Ok([[a11, a12, a13], [a12, a22, a23], [a13, a23, a33]])
}

/// Transmon parameters, E/h in GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitParams {
    pub e_c: f64,
    pub e_j: f64,
    pub omega: f64,
}

/// sqrt(8 E_C E_J) − E_C.
pub fn qubit_frequency(e_c: f64, e_j: f64) -> f64 {
    (8.0 * e_c * e_j).sqrt() - e_c
}

/// Invert the transmon frequency formula for E_J.
pub fn qubit_from_frequency(omega: f64, e_c: f64) -> Result<QubitParams> {
    if !(omega > 0.0 && e_c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "qubit frequency {omega} and charging energy {e_c} must be positive"
        )));
    }
    let e_j = (omega + e_c).powi(2) / (8.0 * e_c);
    if e_j / e_c <= 10.0 {
        log::warn!("E_J/E_C = {:.2} is outside the transmon regime", e_j / e_c);
    }
    Ok(QubitParams { e_c, e_j, omega })
}

pub fn qubit_from_josephson(e_j: f64, e_c: f64) -> QubitParams {
    QubitParams { e_c, e_j, omega: qubit_frequency(e_c, e_j) }
}

/// Which charging energy fixes a qubit's E_J when only its frequency is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitCharge {
    /// The device-file E_C_Qj.
    #[default]
    Bare,
    /// e² A_jj / 2 from the inverse capacitance matrix of each mode.
    Renormalized,
}

impl QubitCharge {
    pub fn as_str(self) -> &'static str {
        match self {
            QubitCharge::Bare => "bare",
            QubitCharge::Renormalized => "renormalized",
        }
    }
}

/// How each qubit is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QubitSpec {
    /// Target transition frequency in GHz.
    Frequency(f64),
    /// Josephson energy in GHz.
    Josephson(f64),
}

/// Signed couplings between both qubits and one mode, E/h in GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingSet {
    pub mode: usize,
    pub e_1m: f64,
    pub e_2m: f64,
    pub g_1m: f64,
    pub g_2m: f64,
    pub e_c_q1: f64,
    pub e_c_q2: f64,
    pub e_c_m: f64,
    /// e² |A13| / h, the qubit–qubit entry of the inverse.
    pub e_13: f64,
    pub qubits: [QubitParams; 2],
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// E/√2 (E_J E_L/(E_C E'_C))^{1/4}.
pub fn coupling_strength(e: f64, e_j: f64, e_l: f64, e_c_q: f64, e_c_m: f64) -> f64 {
    e / 2f64.sqrt() * (e_j * e_l / (e_c_q * e_c_m)).powf(0.25)
}

pub fn coupling_set(
    inverse: &[[f64; 3]; 3],
    mode: &ModeSolution,
    energies: &ModeEnergies,
    qubits: [QubitSpec; 2],
    charge: QubitCharge,
    params: &DeviceParams,
) -> Result<CouplingSet> {
    let e2 = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / PLANCK / 1e9;
    let e_1m = sign(mode.left_end()) * e2 * inverse[0][1].abs();
    let e_2m = sign(mode.right_end()) * e2 * inverse[1][2].abs();
    let e_c_q1 = e2 * inverse[0][0] / 2.0;
    let e_c_m = e2 * inverse[1][1] / 2.0;
    let e_c_q2 = e2 * inverse[2][2] / 2.0;
    let e_13 = e2 * inverse[0][2].abs();
    let renorm = [e_c_q1, e_c_q2];
    let mut resolved = [QubitParams { e_c: 0.0, e_j: 0.0, omega: 0.0 }; 2];
    for (j, spec) in qubits.iter().enumerate() {
        let e_c = match charge {
            QubitCharge::Bare => params.qubit_charging_energy(j + 1),
            QubitCharge::Renormalized => renorm[j],
        };
        resolved[j] = match *spec {
            QubitSpec::Frequency(w) => qubit_from_frequency(w, e_c)?,
            QubitSpec::Josephson(ej) => qubit_from_josephson(ej, e_c),
        };
    }
    let g_1m = coupling_strength(e_1m, resolved[0].e_j, energies.e_l, e_c_q1, e_c_m);
    let g_2m = coupling_strength(e_2m, resolved[1].e_j, energies.e_l, e_c_q2, e_c_m);
    Ok(CouplingSet { mode: mode.index, e_1m, e_2m, g_1m, g_2m, e_c_q1, e_c_q2, e_c_m, e_13, qubits: resolved })
}

/// Capacitive qubit–qubit exchange implied by E_13, with the same scaling as g.
pub fn direct_coupling(set: &CouplingSet) -> f64 {
    let [q1, q2] = set.qubits;
    set.e_13 / 2f64.sqrt() * (q1.e_j * q2.e_j / (set.e_c_q1 * set.e_c_q2)).powf(0.25)
}

/// Mode energies and couplings at one flux point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplerPoint {
    pub flux: f64,
    pub basis: ModeBasis,
    pub energies: Vec<ModeEnergies>,
    pub couplings: Vec<CouplingSet>,
}

impl CouplerPoint {
    /// Quantized mode frequencies ω_C,m.
    pub fn mode_frequencies(&self) -> Vec<f64> {
        self.energies.iter().map(|e| e.omega_c).collect()
    }

    /// Mode anharmonicities η_m.
    pub fn mode_anharmonicities(&self) -> Vec<f64> {
        self.energies.iter().map(|e| e.eta).collect()
    }

    /// g[j][m] for qubit j ∈ {0, 1}.
    pub fn g(&self) -> [Vec<f64>; 2] {
        [
            self.couplings.iter().map(|c| c.g_1m).collect(),
            self.couplings.iter().map(|c| c.g_2m).collect(),
        ]
    }

    /// Mean direct qubit–qubit coupling over the retained modes.
    pub fn direct_coupling(&self) -> f64 {
        let n = self.couplings.len().max(1) as f64;
        self.couplings.iter().map(direct_coupling).sum::<f64>() / n
    }
}

/// Quantize every mode of `basis` and couple it to the two qubits.
pub fn quantize_basis(basis: ModeBasis, params: &DeviceParams, qubits: [QubitSpec; 2], charge: QubitCharge) -> Result<CouplerPoint> {
    let flux = FluxBias(basis.flux);
    let mut energies = Vec::with_capacity(basis.modes.len());
    let mut couplings = Vec::with_capacity(basis.modes.len());
    for mode in &basis.modes {
        let en = mode_energies(mode, &basis, params, flux)?;
        let cm = capacitance_matrix(params, mode)?;
        let inv = invert_capacitance_matrix(&cm)?;
        couplings.push(coupling_set(&inv, mode, &en, qubits, charge, params)?);
        energies.push(en);
    }
    Ok(CouplerPoint { flux: basis.flux, basis, energies, couplings })
}
