//! Glue from device parameters to the per-flux Hamiltonian.

use serde::{Deserialize, Serialize};

use crate::dynamics::hamiltonian::{build_hamiltonian, Hamiltonian, HamiltonianParams};
use crate::error::Result;
use crate::modes::{solve_modes, SolverOptions};
use crate::params::{DeviceParams, FluxBias};
use crate::quantization::{quantize_basis, CouplerPoint, QubitCharge, QubitSpec};

/// Which Lamb-shift expression the dispersive model reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambShift {
    /// Σ_m g_jm² / Δ_jm.
    #[default]
    Standard,
    /// Σ_m g_jm² / (Δ_1m + Δ_2m).
    PairSum,
}

impl LambShift {
    pub fn as_str(self) -> &'static str {
        match self {
            LambShift::Standard => "standard",
            LambShift::PairSum => "pair_sum",
        }
    }
}

/// Model switches shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelOptions {
    pub solver: SolverOptions,
    /// Retained coupler modes.
    pub n_modes: usize,
    /// Fock levels per body in the many-body Hamiltonian.
    pub levels: usize,
    pub qubit_charge: QubitCharge,
    pub lamb_shift: LambShift,
    /// Add the capacitive qubit–qubit term to the Hamiltonian.
    pub include_direct: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            solver: SolverOptions::default(),
            n_modes: 2,
            levels: 3,
            qubit_charge: QubitCharge::Bare,
            lamb_shift: LambShift::Standard,
            include_direct: false,
        }
    }
}

impl ModelOptions {
    /// Flags written into result metadata.
    pub fn describe(&self) -> Vec<(String, String)> {
        vec![
            ("n_modes".into(), self.n_modes.to_string()),
            ("levels".into(), self.levels.to_string()),
            ("qubit_charge".into(), self.qubit_charge.as_str().into()),
            ("lamb_shift".into(), self.lamb_shift.as_str().into()),
            ("include_direct".into(), self.include_direct.to_string()),
            ("pole_guard".into(), format!("{:e}", self.solver.pole_guard)),
            ("scan_points_per_interval".into(), self.solver.points_per_interval.to_string()),
            ("bisection".into(), "to machine precision".into()),
        ]
    }
}

/// Modes, energies and couplings for qubits at frequencies `omega` (GHz).
pub fn coupler_point(params: &DeviceParams, flux: f64, omega: [f64; 2], opts: &ModelOptions) -> Result<CouplerPoint> {
    let basis = solve_modes(params, FluxBias(flux), opts.n_modes, &opts.solver)?;
    quantize_basis(basis, params, [QubitSpec::Frequency(omega[0]), QubitSpec::Frequency(omega[1])], opts.qubit_charge)
}

/// Hamiltonian parameters at one coupler point.
pub fn hamiltonian_params(point: &CouplerPoint, params: &DeviceParams, omega: [f64; 2], opts: &ModelOptions) -> HamiltonianParams {
    HamiltonianParams {
        qubit_frequencies: omega,
        qubit_anharmonicities: [-params.e_c_q1, -params.e_c_q2],
        mode_frequencies: point.mode_frequencies(),
        mode_anharmonicities: point.mode_anharmonicities(),
        g: point.g(),
        direct: if opts.include_direct { point.direct_coupling() } else { 0.0 },
    }
}

/// Many-body Hamiltonian at flux `flux`.
pub fn hamiltonian_at(params: &DeviceParams, flux: f64, omega: [f64; 2], opts: &ModelOptions) -> Result<(CouplerPoint, Hamiltonian)> {
    let point = coupler_point(params, flux, omega, opts)?;
    let h = build_hamiltonian(&hamiltonian_params(&point, params, omega, opts), opts.levels);
    Ok((point, h))
}
