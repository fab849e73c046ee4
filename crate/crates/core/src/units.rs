//! Physical constants and unit conversions.
//!
//! Energies are carried as E/h in GHz throughout the crate; lengths, capacitances
//! and inductances are SI.

use std::f64::consts::PI;

/// Planck constant (J s), exact SI value.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge (C), exact SI value.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Magnetic flux quantum h/2e (Wb).
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);
/// Reduced flux quantum Φ0/2π (Wb).
pub const REDUCED_FLUX_QUANTUM: f64 = FLUX_QUANTUM / (2.0 * PI);

pub const GHZ: f64 = 1e9;
pub const MHZ: f64 = 1e6;

/// Energy in joules to E/h in GHz.
pub fn joules_to_ghz(e: f64) -> f64 {
    e / PLANCK / GHZ
}

/// E/h in GHz to joules.
pub fn ghz_to_joules(f: f64) -> f64 {
    f * GHZ * PLANCK
}

/// Angular frequency (rad/s) to GHz.
pub fn angular_to_ghz(omega: f64) -> f64 {
    omega / (2.0 * PI * GHZ)
}

/// Parse a quantity such as `9 fF` or `0.395cm` into SI units.
///
/// `allowed` lists the accepted suffixes with their SI scale factor.
pub fn parse_quantity(text: &str, allowed: &[(&str, f64)]) -> Result<f64, String> {
    let text = text.trim();
    let split = text
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .ok_or_else(|| format!("missing unit in `{text}`"))?;
    let (num, unit) = text.split_at(split);
    let unit = unit.trim();
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("bad number `{}`", num.trim()))?;
    let scale = allowed
        .iter()
        .find(|(u, _)| *u == unit)
        .map(|(_, s)| *s)
        .ok_or_else(|| {
            let names: Vec<&str> = allowed.iter().map(|(u, _)| *u).collect();
            format!("unit `{unit}` not one of {}", names.join(", "))
        })?;
    Ok(value * scale)
}

pub const LENGTH_UNITS: &[(&str, f64)] = &[("m", 1.0), ("cm", 1e-2), ("mm", 1e-3), ("um", 1e-6)];
pub const CAPACITANCE_UNITS: &[(&str, f64)] = &[("F", 1.0), ("pF", 1e-12), ("fF", 1e-15), ("aF", 1e-18)];
pub const CAPACITANCE_PER_LENGTH_UNITS: &[(&str, f64)] = &[("F/m", 1.0), ("nF/m", 1e-9), ("pF/m", 1e-12)];
pub const INDUCTANCE_PER_LENGTH_UNITS: &[(&str, f64)] = &[("H/m", 1.0), ("uH/m", 1e-6), ("nH/m", 1e-9)];
/// Energies stay in GHz after parsing.
pub const ENERGY_UNITS: &[(&str, f64)] = &[("GHz", 1.0), ("MHz", 1e-3)];
