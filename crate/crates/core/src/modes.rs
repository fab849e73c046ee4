//! Normal modes of the SQUID-embedded transmission-line resonator.
//!
//! The envelope is `A sin(k(x+l)+θ1)` left of the junction and
//! `A B sin(k(x-l)+θ2)` right of it. Wavenumbers are the roots of the junction
//! current-continuity condition, found by scanning a pole-free rescaling of the
//! residual and bisecting inside each sign change.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{inverse_junction_inductance, josephson_energy, phase_velocity, DeviceParams, FluxBias};
use crate::quadrature::simpson;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Minimum |cos α| accepted when evaluating the tangent form.
    pub pole_guard: f64,
    /// Scan points per π/(2l) interval.
    pub points_per_interval: usize,
    /// Extra π/(2l) intervals scanned beyond the number of requested modes.
    pub extra_intervals: usize,
    /// Panels per segment used by the built-in orthonormality check.
    pub verify_panels: usize,
    /// Allowed off-diagonal overlap relative to C_Σ.
    pub orthogonality_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            pole_guard: 1e-8,
            points_per_interval: 200,
            extra_intervals: 4,
            verify_panels: 4000,
            orthogonality_tol: 1e-6,
        }
    }
}

/// One normal mode at one flux bias.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSolution {
    pub index: usize,
    /// Wavenumber (1/m); zero only for the junction mode when E_J vanishes.
    pub k: f64,
    /// Angular frequency k v_p (rad/s).
    pub omega: f64,
    pub theta_1: f64,
    pub theta_2: f64,
    pub a: f64,
    pub b: f64,
    /// u(x_J⁺) − u(x_J⁻).
    pub delta_u: f64,
    pub flux: f64,
    pub x_j: f64,
    pub l: f64,
}

impl ModeSolution {
    fn alpha_1(&self, x: f64) -> f64 {
        self.k * (x + self.l) + self.theta_1
    }

    fn alpha_2(&self, x: f64) -> f64 {
        self.k * (x - self.l) + self.theta_2
    }

    /// Frequency in GHz.
    pub fn frequency_ghz(&self) -> f64 {
        crate::units::angular_to_ghz(self.omega)
    }

    /// Envelope value; at `x_J` the left-sided limit is returned.
    pub fn envelope(&self, x: f64) -> Result<f64> {
        if !(x >= -self.l && x <= self.l) {
            return Err(Error::OutOfDomain { x });
        }
        Ok(if x <= self.x_j {
            self.a * self.alpha_1(x).sin()
        } else {
            self.a * self.b * self.alpha_2(x).sin()
        })
    }

    /// One-sided envelope limits at the junction: `(u(x_J⁻), u(x_J⁺))`.
    pub fn junction_limits(&self) -> (f64, f64) {
        (
            self.a * self.alpha_1(self.x_j).sin(),
            self.a * self.b * self.alpha_2(self.x_j).sin(),
        )
    }

    /// Envelope slope; at `x_J` the left-sided limit is returned.
    pub fn slope(&self, x: f64) -> Result<f64> {
        if !(x >= -self.l && x <= self.l) {
            return Err(Error::OutOfDomain { x });
        }
        Ok(if x <= self.x_j {
            self.a * self.k * self.alpha_1(x).cos()
        } else {
            self.a * self.b * self.k * self.alpha_2(x).cos()
        })
    }

    /// One-sided slopes at the junction: `(u'(x_J⁻), u'(x_J⁺))`.
    pub fn junction_slopes(&self) -> (f64, f64) {
        (
            self.a * self.k * self.alpha_1(self.x_j).cos(),
            self.a * self.b * self.k * self.alpha_2(self.x_j).cos(),
        )
    }

    /// u(−l), the field at the qubit-1 port.
    pub fn left_end(&self) -> f64 {
        self.a * self.theta_1.sin()
    }

    /// u(+l), the field at the qubit-2 port.
    pub fn right_end(&self) -> f64 {
        self.a * self.b * self.theta_2.sin()
    }
}

/// Modes at a single flux point, lowest first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeBasis {
    pub modes: Vec<ModeSolution>,
    pub total_capacitance: f64,
    pub flux: f64,
}

/// Boundary phases (θ1, θ2) fixed by the coupling capacitors at the two ends.
pub fn boundary_phases(k: f64, params: &DeviceParams) -> (f64, f64) {
    // atan2 keeps the C_g → 0 and k → 0 limits exact at ∓π/2.
    let t1 = -params.c_0.atan2(params.c_g1 * k);
    let t2 = params.c_0.atan2(params.c_g2 * k);
    (t1, t2)
}

/// (α1(x_J), α2(x_J)) together with the boundary phases.
fn junction_phases(k: f64, params: &DeviceParams) -> (f64, f64, f64, f64) {
    let (t1, t2) = boundary_phases(k, params);
    let a1 = k * (params.x_j + params.l) + t1;
    let a2 = k * (params.x_j - params.l) + t2;
    (a1, a2, t1, t2)
}

/// L_0/L_J − (C_J/C_0) k².
fn junction_factor(k: f64, params: &DeviceParams, flux: FluxBias) -> f64 {
    params.l_0 * inverse_junction_inductance(params, flux) - params.c_j / params.c_0 * k * k
}

/// Residual of the wavenumber condition in its tangent form.
pub fn transcendental_residual(k: f64, params: &DeviceParams, flux: FluxBias, pole_guard: f64) -> Result<f64> {
    let (a1, a2, _, _) = junction_phases(k, params);
    if a1.cos().abs() < pole_guard || a2.cos().abs() < pole_guard {
        return Err(Error::PoleProximity { k });
    }
    Ok(junction_factor(k, params, flux) * (a2.tan() - a1.tan()) - k)
}

/// The residual multiplied by cos α1 cos α2, which has the same roots but no poles.
pub fn bracket_function(k: f64, params: &DeviceParams, flux: FluxBias) -> f64 {
    let (a1, a2, _, _) = junction_phases(k, params);
    junction_factor(k, params, flux) * (a2 - a1).sin() - k * a1.cos() * a2.cos()
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The `n_modes` smallest positive wavenumbers at this flux.
pub fn solve_wavenumbers(params: &DeviceParams, flux: FluxBias, n_modes: usize, opts: &SolverOptions) -> Result<Vec<f64>> {
    if n_modes == 0 {
        return Err(Error::InvalidParameter("n_modes must be at least 1".into()));
    }
    let unit = std::f64::consts::PI / (2.0 * params.l);
    let k_min = 1e-3 * unit;
    let intervals = n_modes + opts.extra_intervals;
    let k_max = intervals as f64 * unit;
    let count = intervals * opts.points_per_interval;
    let g = |k: f64| bracket_function(k, params, flux);

    let mut roots = Vec::with_capacity(n_modes);

    // g/k tends to (L_0/L_J)(L_L + L_R) > 0 as k → 0, so a root below the scan
    // start shows up as a negative value at k_min.
    let mut prev_k = k_min;
    let mut prev_g = g(k_min);
    if josephson_energy(params, flux) > 0.0 && prev_g < 0.0 {
        let lo = k_min * 1e-15;
        if g(lo) <= 0.0 {
            return Err(Error::BracketingFailure { found: 0, requested: n_modes, k_max });
        }
        roots.push(bisect(g, lo, k_min));
    }

    for i in 1..=count {
        if roots.len() >= n_modes {
            break;
        }
        let k = k_min + (k_max - k_min) * i as f64 / count as f64;
        let gk = g(k);
        if prev_g == 0.0 {
            roots.push(prev_k);
        } else if gk != 0.0 && (gk > 0.0) != (prev_g > 0.0) {
            roots.push(bisect(g, prev_k, k));
        }
        prev_k = k;
        prev_g = gk;
    }

    if roots.len() < n_modes {
        return Err(Error::BracketingFailure { found: roots.len(), requested: n_modes, k_max });
    }
    roots.truncate(n_modes);
    Ok(roots)
}

/// Right-segment amplitude ratio enforcing slope continuity at the junction.
///
/// When the right segment sits on its own open-end resonance (cos α2 → 0, as
/// for modes confined right of a weak junction) the ratio is taken from the
/// junction current condition instead, which is equivalent at a root.
pub fn amplitude_b(k: f64, theta_1: f64, theta_2: f64, params: &DeviceParams, flux: FluxBias, pole_guard: f64) -> Result<f64> {
    let a1 = k * (params.x_j + params.l) + theta_1;
    let a2 = k * (params.x_j - params.l) + theta_2;
    if a2.cos().abs() >= pole_guard {
        return Ok(a1.cos() / a2.cos());
    }
    let j = junction_factor(k, params, flux);
    if j == 0.0 || a2.sin().abs() < pole_guard {
        return Err(Error::PoleProximity { k });
    }
    Ok((k * a1.cos() / j + a1.sin()) / a2.sin())
}

/// The four closed-form normalization integrals (I1, I2, I3, I4).
pub fn normalization_integrals(k: f64, b: f64, theta_1: f64, theta_2: f64, params: &DeviceParams) -> [f64; 4] {
    let (xj, l) = (params.x_j, params.l);
    let a1 = k * (xj + l) + theta_1;
    let a2 = k * (xj - l) + theta_2;
    let (i1, i2) = if k == 0.0 {
        (
            params.c_0 * (xj + l) * theta_1.sin().powi(2),
            params.c_0 * b * b * (l - xj) * theta_2.sin().powi(2),
        )
    } else {
        (
            params.c_0 * ((xj + l) / 2.0 - ((2.0 * a1).sin() - (2.0 * theta_1).sin()) / (4.0 * k)),
            params.c_0 * b * b * ((l - xj) / 2.0 + ((2.0 * a2).sin() - (2.0 * theta_2).sin()) / (4.0 * k)),
        )
    };
    let i3 = params.c_g1 * theta_1.sin().powi(2) + params.c_g2 * b * b * theta_2.sin().powi(2);
    let i4 = params.c_j * (b * a2.sin() - a1.sin()).powi(2);
    [i1, i2, i3, i4]
}

/// Amplitude A = sqrt(C_Σ / (I1 + I2 + I3 + I4)).
pub fn normalization_a(k: f64, b: f64, theta_1: f64, theta_2: f64, params: &DeviceParams) -> Result<f64> {
    let sum: f64 = normalization_integrals(k, b, theta_1, theta_2, params).iter().sum();
    if sum.is_nan() || sum <= 0.0 {
        return Err(Error::DegenerateNormalization { sum });
    }
    Ok((params.total_capacitance() / sum).sqrt())
}

fn assemble(index: usize, k: f64, b: f64, params: &DeviceParams, flux: FluxBias) -> Result<ModeSolution> {
    let (t1, t2) = boundary_phases(k, params);
    let a = normalization_a(k, b, t1, t2, params)?;
    let a1 = k * (params.x_j + params.l) + t1;
    let a2 = k * (params.x_j - params.l) + t2;
    Ok(ModeSolution {
        index,
        k,
        omega: k * phase_velocity(params),
        theta_1: t1,
        theta_2: t2,
        a,
        b,
        delta_u: a * (b * a2.sin() - a1.sin()),
        flux: flux.0,
        x_j: params.x_j,
        l: params.l,
    })
}

/// Mode with wavenumber `k` (assumed to be a root).
pub fn mode_from_wavenumber(index: usize, k: f64, params: &DeviceParams, flux: FluxBias, opts: &SolverOptions) -> Result<ModeSolution> {
    let (a1, a2, t1, t2) = junction_phases(k, params);
    let b = if a1.cos().abs() < opts.pole_guard && a2.cos().abs() < opts.pole_guard {
        // Both segments have zero slope at the junction, so no current flows
        // through it and the envelope must be continuous there.
        a1.sin() / a2.sin()
    } else {
        amplitude_b(k, t1, t2, params, flux, opts.pole_guard)?
    };
    assemble(index, k, b, params, flux)
}

/// The zero-frequency junction mode that exists when E_J vanishes: the two
/// segments carry uniform, opposite charge, in the ratio of their capacitances.
pub fn zero_mode(params: &DeviceParams, flux: FluxBias) -> Result<ModeSolution> {
    let c_left = params.c_0 * (params.x_j + params.l) + params.c_g1;
    let c_right = params.c_0 * (params.l - params.x_j) + params.c_g2;
    assemble(0, 0.0, c_left / c_right, params, flux)
}

/// Solve the lowest `n_modes` modes without the quadrature check.
pub fn solve_modes(params: &DeviceParams, flux: FluxBias, n_modes: usize, opts: &SolverOptions) -> Result<ModeBasis> {
    if n_modes == 0 {
        return Err(Error::InvalidParameter("n_modes must be at least 1".into()));
    }
    let mut modes = Vec::with_capacity(n_modes);
    let zero = josephson_energy(params, flux) == 0.0;
    if zero {
        modes.push(zero_mode(params, flux)?);
    }
    let need = n_modes - modes.len();
    if need > 0 {
        let ks = solve_wavenumbers(params, flux, need, opts)?;
        for k in ks {
            let idx = modes.len();
            modes.push(mode_from_wavenumber(idx, k, params, flux, opts)?);
        }
    }
    Ok(ModeBasis {
        modes,
        total_capacitance: params.total_capacitance(),
        flux: flux.0,
    })
}

/// Charge inner product ⟨u_m, u_n⟩ by Simpson quadrature split at x_J.
pub fn charge_overlap(m: &ModeSolution, n: &ModeSolution, params: &DeviceParams, panels: usize) -> f64 {
    let left = |x: f64| m.a * m.alpha_1(x).sin() * n.a * n.alpha_1(x).sin();
    let right = |x: f64| m.a * m.b * m.alpha_2(x).sin() * n.a * n.b * n.alpha_2(x).sin();
    let bulk = simpson(left, -params.l, params.x_j, panels) + simpson(right, params.x_j, params.l, panels);
    params.c_0 * bulk
        + params.c_g1 * m.left_end() * n.left_end()
        + params.c_g2 * m.right_end() * n.right_end()
        + params.c_j * m.delta_u * n.delta_u
}

/// Flux inner product ⟨∂u_m, ∂u_n⟩ by Simpson quadrature split at x_J.
pub fn flux_overlap(m: &ModeSolution, n: &ModeSolution, params: &DeviceParams, flux: FluxBias, panels: usize) -> f64 {
    let left = |x: f64| m.a * m.k * m.alpha_1(x).cos() * n.a * n.k * n.alpha_1(x).cos();
    let right = |x: f64| m.a * m.b * m.k * m.alpha_2(x).cos() * n.a * n.b * n.k * n.alpha_2(x).cos();
    let bulk = simpson(left, -params.l, params.x_j, panels) + simpson(right, params.x_j, params.l, panels);
    bulk / params.l_0 + inverse_junction_inductance(params, flux) * m.delta_u * n.delta_u
}

/// Solve and verify charge orthonormality of the lowest `n_modes` modes.
pub fn build_mode_basis(params: &DeviceParams, flux: FluxBias, n_modes: usize, opts: &SolverOptions) -> Result<ModeBasis> {
    let basis = solve_modes(params, flux, n_modes, opts)?;
    let cs = basis.total_capacitance;
    for (i, m) in basis.modes.iter().enumerate() {
        for n in &basis.modes[i + 1..] {
            let v = charge_overlap(m, n, params, opts.verify_panels) / cs;
            if v.abs() > opts.orthogonality_tol {
                return Err(Error::OrthogonalityViolation { m: m.index, n: n.index, value: v });
            }
        }
    }
    Ok(basis)
}
