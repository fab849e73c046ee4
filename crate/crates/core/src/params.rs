//! Device parameters and the flux to Josephson-energy map.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{ghz_to_joules, REDUCED_FLUX_QUANTUM};

/// How the SQUID flux bias enters the Josephson energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxConvention {
    /// `E_J^max |cos(π Φ/Φ0)|`, period one flux quantum.
    #[default]
    HalfPeriod,
    /// `E_J^max |cos(2π Φ/Φ0)|`, period half a flux quantum.
    PaperLiteral,
}

impl FluxConvention {
    /// Flux period in units of Φ0.
    pub fn period(self) -> f64 {
        match self {
            FluxConvention::HalfPeriod => 1.0,
            FluxConvention::PaperLiteral => 0.5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FluxConvention::HalfPeriod => "half_period",
            FluxConvention::PaperLiteral => "paper_literal",
        }
    }
}

impl fmt::Display for FluxConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FluxConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "half_period" => Ok(FluxConvention::HalfPeriod),
            "paper_literal" => Ok(FluxConvention::PaperLiteral),
            other => Err(Error::Config(format!(
                "flux_convention `{other}` must be half_period or paper_literal"
            ))),
        }
    }
}

/// External flux bias in units of the flux quantum.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct FluxBias(pub f64);

impl FluxBias {
    pub fn ratio(self) -> f64 {
        self.0
    }
}

impl From<f64> for FluxBias {
    fn from(v: f64) -> Self {
        FluxBias(v)
    }
}

/// Circuit constants of one coupler device plus its two qubits.
///
/// Lengths and capacitances are SI; energies are E/h in GHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    /// Junction position measured from the resonator center (m).
    pub x_j: f64,
    /// Half the resonator length (m).
    pub l: f64,
    pub c_g1: f64,
    pub c_g2: f64,
    pub c_q1: f64,
    pub c_q2: f64,
    /// Shunt capacitance across the SQUID.
    pub c_j: f64,
    /// Capacitance per unit length (F/m).
    pub c_0: f64,
    /// Inductance per unit length (H/m).
    pub l_0: f64,
    pub e_j_max: f64,
    pub e_c_q1: f64,
    pub e_c_q2: f64,
    pub e_j1: Option<f64>,
    pub e_j2: Option<f64>,
    pub flux_convention: FluxConvention,
}

impl DeviceParams {
    /// The sample device: a 1.05 cm line with the SQUID 0.395 cm right of center.
    pub fn table1() -> Self {
        DeviceParams {
            x_j: 0.395e-2,
            l: 1.05e-2 / 2.0,
            c_g1: 9e-15,
            c_g2: 9e-15,
            c_q1: 80e-15,
            c_q2: 85e-15,
            c_j: 30e-15,
            c_0: 85.644e-12,
            l_0: 0.744e-6,
            e_j_max: 34.186,
            e_c_q1: 0.222,
            e_c_q2: 0.196,
            e_j1: None,
            e_j2: None,
            flux_convention: FluxConvention::HalfPeriod,
        }
    }

    pub fn with_convention(mut self, convention: FluxConvention) -> Self {
        self.flux_convention = convention;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("l", self.l),
            ("C_g1", self.c_g1),
            ("C_g2", self.c_g2),
            ("C_Q1", self.c_q1),
            ("C_Q2", self.c_q2),
            ("C_J", self.c_j),
            ("C_0", self.c_0),
            ("L_0", self.l_0),
            ("E_J_max", self.e_j_max),
            ("E_C_Q1", self.e_c_q1),
            ("E_C_Q2", self.e_c_q2),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        for (name, v) in [("E_J1", self.e_j1), ("E_J2", self.e_j2)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
                }
            }
        }
        if !(self.x_j.is_finite() && self.x_j > -self.l && self.x_j < self.l) {
            return Err(Error::InvalidParameter(format!(
                "x_J = {} must lie strictly inside (-l, l) = ({}, {})",
                self.x_j, -self.l, self.l
            )));
        }
        Ok(())
    }

    /// Total capacitance C_Σ = 2l C_0 + C_g1 + C_g2 + C_J.
    pub fn total_capacitance(&self) -> f64 {
        2.0 * self.l * self.c_0 + self.c_g1 + self.c_g2 + self.c_j
    }

    /// Qubit island capacitance C_Σj = C_Qj + C_gj.
    pub fn qubit_capacitance(&self, j: usize) -> f64 {
        match j {
            1 => self.c_q1 + self.c_g1,
            2 => self.c_q2 + self.c_g2,
            _ => panic!("qubit index {j} not in 1..=2"),
        }
    }

    /// Bare charging energy of qubit `j` as given in the device description.
    pub fn qubit_charging_energy(&self, j: usize) -> f64 {
        match j {
            1 => self.e_c_q1,
            2 => self.e_c_q2,
            _ => panic!("qubit index {j} not in 1..=2"),
        }
    }
}

/// Flux-tunable SQUID Josephson energy in GHz.
pub fn josephson_energy(params: &DeviceParams, flux: FluxBias) -> f64 {
    let x = match params.flux_convention {
        FluxConvention::HalfPeriod => flux.0,
        FluxConvention::PaperLiteral => 2.0 * flux.0,
    };
    // |cos πx| written as sin(π(1/2 − r)) with r ∈ [0, 1/2] so the zero is exact.
    let mut r = x.rem_euclid(1.0);
    if r > 0.5 {
        r = 1.0 - r;
    }
    params.e_j_max * (PI * (0.5 - r)).sin()
}

/// Junction inductance L_J = (Φ0/2π)² / E_J (H).
pub fn junction_inductance(params: &DeviceParams, flux: FluxBias) -> Result<f64> {
    let ej = josephson_energy(params, flux);
    if ej <= 0.0 {
        return Err(Error::FluxAtZeroJosephsonEnergy { flux: flux.0 });
    }
    Ok(REDUCED_FLUX_QUANTUM.powi(2) / ghz_to_joules(ej))
}

/// Inverse junction inductance 1/L_J (1/H); zero where E_J vanishes.
pub fn inverse_junction_inductance(params: &DeviceParams, flux: FluxBias) -> f64 {
    ghz_to_joules(josephson_energy(params, flux)) / REDUCED_FLUX_QUANTUM.powi(2)
}

/// Phase velocity 1/sqrt(L_0 C_0) (m/s).
pub fn phase_velocity(params: &DeviceParams) -> f64 {
    1.0 / (params.l_0 * params.c_0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn josephson_energy_anchors() {
        let p = DeviceParams::table1();
        assert_eq!(josephson_energy(&p, FluxBias(0.0)), 34.186);
        assert_eq!(josephson_energy(&p, FluxBias(0.5)), 0.0);
        let expected = 34.186 * (PI / 4.0).cos();
        assert!((josephson_energy(&p, FluxBias(0.25)) - expected).abs() < 1e-12);
        assert!((josephson_energy(&p, FluxBias(0.25)) - 24.175).abs() < 5e-3);
    }

    #[test]
    fn paper_literal_halves_the_period() {
        let p = DeviceParams::table1().with_convention(FluxConvention::PaperLiteral);
        assert_eq!(josephson_energy(&p, FluxBias(0.25)), 0.0);
        assert!((josephson_energy(&p, FluxBias(0.5)) - 34.186).abs() < 1e-12);
    }

    #[test]
    fn junction_inductance_anchor() {
        let p = DeviceParams::table1();
        // (h/2e/2π)² / (h · 34.186 GHz), evaluated by hand.
        let phi0 = 6.626_070_15e-34 / (2.0 * 1.602_176_634e-19);
        let oracle = (phi0 / (2.0 * PI)).powi(2) / (6.626_070_15e-34 * 34.186e9);
        let lj = junction_inductance(&p, FluxBias(0.0)).unwrap();
        assert!((lj - oracle).abs() / oracle < 1e-14);
        assert!((lj - 4.78e-9).abs() < 0.01e-9);
        let third = junction_inductance(&p, FluxBias(1.0 / 3.0)).unwrap();
        assert!((third / lj - 2.0).abs() < 1e-12);
        assert!(matches!(
            junction_inductance(&p, FluxBias(0.5)),
            Err(Error::FluxAtZeroJosephsonEnergy { .. })
        ));
    }

    #[test]
    fn phase_velocity_anchors() {
        let p = DeviceParams::table1();
        assert!((phase_velocity(&p) - 1.2526e8).abs() / 1.2526e8 < 2e-4);
        let mut unit = p.clone();
        unit.l_0 = 1.0;
        unit.c_0 = 1.0;
        assert_eq!(phase_velocity(&unit), 1.0);
    }

    #[test]
    fn validate_rejects_nonpositive_and_misplaced_junction() {
        let p = DeviceParams::table1();
        assert!(p.validate().is_ok());
        let mut q = p.clone();
        q.c_j = 0.0;
        assert!(q.validate().is_err());
        let mut q = p.clone();
        q.l_0 = -1.0;
        assert!(q.validate().is_err());
        let mut q = p.clone();
        q.x_j = q.l;
        assert!(q.validate().is_err());
        let mut q = p;
        q.e_j1 = Some(0.0);
        assert!(q.validate().is_err());
    }

    proptest! {
        #[test]
        fn josephson_energy_even_and_periodic(phi in -3.0f64..3.0) {
            let p = DeviceParams::table1();
            let e = josephson_energy(&p, FluxBias(phi));
            prop_assert!((e - josephson_energy(&p, FluxBias(-phi))).abs() < 1e-12);
            prop_assert!((e - josephson_energy(&p, FluxBias(phi + 1.0))).abs() < 1e-9);
            prop_assert!((0.0..=p.e_j_max).contains(&e));
        }

        #[test]
        fn inductance_energy_product_is_constant(phi in -0.49f64..0.49) {
            let p = DeviceParams::table1();
            let prod = junction_inductance(&p, FluxBias(phi)).unwrap()
                * ghz_to_joules(josephson_energy(&p, FluxBias(phi)));
            let c = REDUCED_FLUX_QUANTUM.powi(2);
            prop_assert!((prod - c).abs() / c < 1e-12);
        }

        #[test]
        fn validate_rejects_any_nonpositive_capacitance(v in -1e-12f64..=0.0, which in 0usize..6) {
            let mut p = DeviceParams::table1();
            match which {
                0 => p.c_g1 = v,
                1 => p.c_g2 = v,
                2 => p.c_q1 = v,
                3 => p.c_q2 = v,
                4 => p.c_j = v,
                _ => p.c_0 = v,
            }
            prop_assert!(p.validate().is_err());
        }
    }
}
