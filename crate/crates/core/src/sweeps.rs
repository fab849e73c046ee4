//! Flux and design-parameter sweeps on a bounded worker pool.
//!
//! Every sweep is a pure map over grid points collected in grid order, so the
//! output does not depend on the number of workers. Adiabatic tracking runs as
//! a second, sequential pass.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::eigen::{eigensolve_by_sector, Eigen};
use crate::dynamics::hamiltonian::{build_hamiltonian, FockBasis};
use crate::dynamics::tracking::{label_by_reference, track_adiabatic, TrackOptions};
use crate::dynamics::xx::{exact_splitting, xx_terms, DISPERSIVE_LIMIT};
use crate::dynamics::zz::{xi_from_energies, zz_labels, ZZExtrema};
use crate::error::{Error, Result};
use crate::model::{coupler_point, hamiltonian_params, ModelOptions};
use crate::modes::solve_modes;
use crate::optimize::golden_min;
use crate::params::{DeviceParams, FluxBias};
use crate::quantization::mode_energies;

/// MHz per GHz, for the MHz-valued columns.
const MHZ_PER_GHZ: f64 = 1e3;

/// `count` points from `start` to `stop`, both included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        let g = Grid { start, stop, count };
        g.validate()?;
        Ok(g)
    }

    pub fn single(value: f64) -> Self {
        Grid { start: value, stop: value, count: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::InvalidParameter("grid bounds must be finite".into()));
        }
        if self.count == 0 {
            return Err(Error::InvalidParameter("grid count must be at least 1".into()));
        }
        if self.count > 1 && self.start == self.stop {
            return Err(Error::InvalidParameter("grid with several points needs start != stop".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = (self.count - 1) as f64;
        // Symmetric in (start, stop) so a reversed grid gives bit-identical points.
        (0..self.count)
            .map(|i| (self.start * (n - i as f64) + self.stop * i as f64) / n)
            .collect()
    }

    pub fn describe(&self) -> String {
        format!("{}:{}:{}", self.start, self.stop, self.count)
    }
}

/// Column table with one error code per row ("" when the row succeeded).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub errors: Vec<String>,
    pub metadata: Vec<(String, String)>,
}

impl SweepResult {
    fn new(columns: Vec<String>, metadata: Vec<(String, String)>) -> Self {
        SweepResult { columns, rows: Vec::new(), errors: Vec::new(), metadata }
    }

    fn push(&mut self, row: Result<Vec<f64>>, leading: &[f64]) {
        let width = self.columns.len();
        match row {
            Ok(mut r) => {
                let mut full = leading.to_vec();
                full.append(&mut r);
                debug_assert_eq!(full.len(), width);
                self.rows.push(full);
                self.errors.push(String::new());
            }
            Err(e) => {
                let mut full = leading.to_vec();
                full.resize(width, f64::NAN);
                self.rows.push(full);
                self.errors.push(e.code().to_string());
            }
        }
    }

    pub fn failed(&self) -> usize {
        self.errors.iter().filter(|e| !e.is_empty()).count()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Pool with exactly `workers` threads (0 means one per core).
pub fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Ordered parallel map.
fn par_map<T, R, F>(pool: &rayon::ThreadPool, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    pool.install(|| items.par_iter().map(f).collect())
}

fn base_metadata(kind: &str, params: &DeviceParams, opts: &ModelOptions) -> Vec<(String, String)> {
    let mut m = vec![
        ("tool".to_string(), format!("hybrid-coupler {}", env!("CARGO_PKG_VERSION"))),
        ("sweep".to_string(), kind.to_string()),
        ("flux_convention".to_string(), params.flux_convention.as_str().to_string()),
    ];
    m.extend(opts.describe());
    m
}

fn numbered(prefix: &str, n: usize, suffix: &str) -> Vec<String> {
    (1..=n).map(|m| format!("{prefix}{m}{suffix}")).collect()
}

/// Classical mode frequencies plus quantized ω_C and η per mode.
pub fn flux_spectrum_sweep(params: &DeviceParams, flux: &Grid, opts: &ModelOptions, pool: &rayon::ThreadPool) -> Result<SweepResult> {
    params.validate()?;
    flux.validate()?;
    let n = opts.n_modes;
    let mut columns = vec!["flux".to_string()];
    columns.extend(numbered("nu_", n, "_ghz"));
    columns.extend(numbered("omega_c_", n, "_ghz"));
    columns.extend(numbered("eta_", n, "_mhz"));
    let mut out = SweepResult::new(columns, base_metadata("spectrum", params, opts));
    out.metadata.push(("flux_grid".into(), flux.describe()));
    let values = flux.values();
    let rows = par_map(pool, &values, |&phi| -> Result<Vec<f64>> {
        let basis = solve_modes(params, FluxBias(phi), n, &opts.solver)?;
        let mut nu = Vec::with_capacity(n);
        let mut wc = Vec::with_capacity(n);
        let mut eta = Vec::with_capacity(n);
        for mode in &basis.modes {
            nu.push(mode.frequency_ghz());
            match mode_energies(mode, &basis, params, FluxBias(phi)) {
                Ok(e) => {
                    wc.push(e.omega_c);
                    eta.push(e.eta * MHZ_PER_GHZ);
                }
                Err(_) => {
                    wc.push(f64::NAN);
                    eta.push(f64::NAN);
                }
            }
        }
        nu.extend(wc);
        nu.extend(eta);
        Ok(nu)
    });
    for (phi, r) in values.iter().zip(rows) {
        out.push(r, &[*phi]);
    }
    Ok(out)
}

/// Mode table (k, ν, θ1, θ2, A, B, Δu) at one flux.
pub fn modes_table(params: &DeviceParams, flux: f64, opts: &ModelOptions) -> Result<SweepResult> {
    params.validate()?;
    let basis = solve_modes(params, FluxBias(flux), opts.n_modes, &opts.solver)?;
    let columns = ["flux", "m", "k_per_m", "nu_ghz", "theta_1", "theta_2", "a", "b", "delta_u"];
    let mut out = SweepResult::new(columns.iter().map(|s| s.to_string()).collect(), base_metadata("modes", params, opts));
    out.metadata.push(("flux".into(), flux.to_string()));
    for (i, m) in basis.modes.iter().enumerate() {
        out.push(
            Ok(vec![(i + 1) as f64, m.k, m.frequency_ghz(), m.theta_1, m.theta_2, m.a, m.b, m.delta_u]),
            &[flux],
        );
    }
    Ok(out)
}

/// g_jm(Φ) in MHz plus the mean direct coupling.
pub fn coupling_sweep(params: &DeviceParams, flux: &Grid, omega: [f64; 2], opts: &ModelOptions, pool: &rayon::ThreadPool) -> Result<SweepResult> {
    params.validate()?;
    flux.validate()?;
    let n = opts.n_modes;
    let mut columns = vec!["flux".to_string()];
    columns.extend(numbered("nu_", n, "_ghz"));
    for j in 1..=2 {
        columns.extend(numbered(&format!("g_{j}"), n, "_mhz"));
    }
    columns.push("direct_mhz".into());
    let mut out = SweepResult::new(columns, base_metadata("couplings", params, opts));
    out.metadata.push(("flux_grid".into(), flux.describe()));
    out.metadata.push(("omega_ghz".into(), format!("{},{}", omega[0], omega[1])));
    let values = flux.values();
    let rows = par_map(pool, &values, |&phi| -> Result<Vec<f64>> {
        let pt = coupler_point(params, phi, omega, opts)?;
        let mut row = pt.mode_frequencies();
        let g = pt.g();
        for gj in &g {
            row.extend(gj.iter().map(|v| v * MHZ_PER_GHZ));
        }
        row.push(pt.direct_coupling() * MHZ_PER_GHZ);
        Ok(row)
    });
    for (phi, r) in values.iter().zip(rows) {
        out.push(r, &[*phi]);
    }
    Ok(out)
}

/// Dispersive J12 next to the exact half-splitting at qubit resonance.
///
/// `resonant_divergence` is 1 where some |Δ| < 10|g|; those rows keep their
/// values. `dispersive` is 1 where every |g/Δ| < 0.3.
pub fn xx_sweep(params: &DeviceParams, flux: &Grid, omega: [f64; 2], opts: &ModelOptions, pool: &rayon::ThreadPool) -> Result<SweepResult> {
    params.validate()?;
    flux.validate()?;
    let n = opts.n_modes;
    let mut columns = vec!["flux".to_string()];
    columns.extend(numbered("nu_", n, "_ghz"));
    for j in 1..=2 {
        columns.extend(numbered(&format!("g_{j}"), n, "_mhz"));
    }
    for c in ["j12_sw_mhz", "j12_exact_mhz", "lamb_1_mhz", "lamb_2_mhz", "max_g_over_delta", "dispersive", "resonant_divergence"] {
        columns.push(c.into());
    }
    let mut out = SweepResult::new(columns, base_metadata("xx", params, opts));
    out.metadata.push(("flux_grid".into(), flux.describe()));
    out.metadata.push(("omega_ghz".into(), format!("{},{}", omega[0], omega[1])));
    out.metadata.push(("exact_model".into(), "two-level single-excitation splitting minimized over omega_2".into()));
    let values = flux.values();
    let rows = par_map(pool, &values, |&phi| -> Result<Vec<f64>> {
        let pt = coupler_point(params, phi, omega, opts)?;
        let hp = hamiltonian_params(&pt, params, omega, opts);
        let sw = xx_terms(omega, &hp.mode_frequencies, &hp.g, opts.lamb_shift);
        let exact = exact_splitting(&hp, opts.lamb_shift).map(|e| e.j12).unwrap_or(f64::NAN);
        let resonant = hp.mode_frequencies.iter().enumerate().any(|(m, &nu)| {
            (0..2).any(|j| hp.g[j][m] != 0.0 && (omega[j] - nu).abs() < 10.0 * hp.g[j][m].abs())
        });
        let mut row = hp.mode_frequencies.clone();
        for gj in &hp.g {
            row.extend(gj.iter().map(|v| v * MHZ_PER_GHZ));
        }
        row.extend([
            sw.j12 * MHZ_PER_GHZ,
            exact * MHZ_PER_GHZ,
            sw.lamb[0] * MHZ_PER_GHZ,
            sw.lamb[1] * MHZ_PER_GHZ,
            sw.max_ratio,
            if sw.max_ratio < DISPERSIVE_LIMIT { 1.0 } else { 0.0 },
            if resonant { 1.0 } else { 0.0 },
        ]);
        Ok(row)
    });
    for (phi, r) in values.iter().zip(rows) {
        out.push(r, &[*phi]);
    }
    Ok(out)
}

/// ξ(Φ) from adiabatically tracked levels, with refined extrema.
#[derive(Debug, Clone, PartialEq)]
pub struct ZZSweep {
    pub table: SweepResult,
    pub extrema: Option<ZZExtrema>,
}

fn fold_flux(phi: f64, period: f64) -> f64 {
    let r = phi.rem_euclid(period);
    if r > 0.5 * period {
        period - r
    } else {
        r
    }
}

struct ZZModel<'a> {
    params: &'a DeviceParams,
    omega: [f64; 2],
    opts: &'a ModelOptions,
}

impl ZZModel<'_> {
    fn eigen(&self, phi: f64) -> Result<Eigen> {
        let pt = coupler_point(self.params, phi, self.omega, self.opts)?;
        let hp = hamiltonian_params(&pt, self.params, self.omega, self.opts);
        eigensolve_by_sector(&build_hamiltonian(&hp, self.opts.levels))
    }
}

/// ZZ strength over `flux`. Points are folded onto [0, P/2] and tracked from
/// the E_J = 0 end, where the junction decouples and bare labels are exact.
pub fn zz_sweep(params: &DeviceParams, flux: &Grid, omega: [f64; 2], opts: &ModelOptions, pool: &rayon::ThreadPool) -> Result<ZZSweep> {
    params.validate()?;
    flux.validate()?;
    let n = opts.n_modes;
    let period = params.flux_convention.period();
    let model = ZZModel { params, omega, opts };
    let values = flux.values();

    // Unique folded points, tracked by descending r (ascending E_J).
    let mut folded: BTreeMap<u64, f64> = BTreeMap::new();
    folded.insert((0.5 * period).to_bits(), 0.5 * period);
    for &phi in &values {
        let r = fold_flux(phi, period);
        folded.insert(r.to_bits(), r);
    }
    let mut track_params: Vec<f64> = folded.into_values().collect();
    track_params.sort_by(|a, b| b.total_cmp(a));
    let eigens = par_map(pool, &track_params, |&r| model.eigen(r));
    let labels = zz_labels(n);
    let basis = FockBasis::new(n + 2, opts.levels);
    let track_opts = TrackOptions::default();
    let track = track_adiabatic(&track_params, eigens, &basis, &labels, |r| model.eigen(r), &track_opts)?;
    let by_r: BTreeMap<u64, usize> = track.points.iter().enumerate().map(|(i, p)| (p.param.to_bits(), i)).collect();

    let mut columns = vec!["flux".to_string()];
    columns.extend(numbered("nu_", n, "_ghz"));
    columns.push("xi_mhz".into());
    columns.push("min_overlap".into());
    let mut table = SweepResult::new(columns, base_metadata("zz", params, opts));
    table.metadata.push(("flux_grid".into(), flux.describe()));
    table.metadata.push(("omega_ghz".into(), format!("{},{}", omega[0], omega[1])));
    table.metadata.push(("tracking".into(), format!("folded to [0, {}], from E_J = 0 toward E_J max; min overlap {}", 0.5 * period, track_opts.min_overlap)));

    let nus = par_map(pool, &values, |&phi| solve_modes(params, FluxBias(phi), n, &opts.solver).map(|b| b.modes.iter().map(|m| m.frequency_ghz()).collect::<Vec<f64>>()));
    let mut xi = Vec::with_capacity(values.len());
    for (&phi, nu) in values.iter().zip(nus) {
        let p = &track.points[by_r[&fold_flux(phi, period).to_bits()]];
        let row = match (&p.error, nu) {
            (Some(e), _) => Err(e.clone()),
            (None, Err(e)) => Err(e),
            (None, Ok(mut nu)) => {
                let x = xi_from_energies(&p.energies);
                nu.push(x * MHZ_PER_GHZ);
                nu.push(p.min_overlap);
                Ok(nu)
            }
        };
        xi.push(row.as_ref().map(|r| r[n] / MHZ_PER_GHZ).unwrap_or(f64::NAN));
        table.push(row, &[phi]);
    }

    // Off-grid ξ, labelled against the nearest tracked point.
    let xi_at = |phi: f64| -> f64 {
        let r = fold_flux(phi, period);
        let nearest = track
            .points
            .iter()
            .filter(|p| p.error.is_none())
            .min_by(|a, b| (a.param - r).abs().total_cmp(&(b.param - r).abs()));
        let Some(reference) = nearest else { return f64::NAN };
        match model.eigen(r).and_then(|e| label_by_reference(&e, reference, &track_opts)) {
            Ok((e, _)) => xi_from_energies(&e),
            Err(_) => f64::NAN,
        }
    };
    let extrema = refine_extrema(&values, &xi, &xi_at);
    if let Some(ex) = &extrema {
        table.metadata.push(("max_abs_xi_mhz".into(), format!("{:.12e}", ex.max_xi.abs() * MHZ_PER_GHZ)));
        table.metadata.push(("max_abs_xi_flux".into(), format!("{:.12}", ex.max_flux)));
        for (i, (f, x)) in ex.minima.iter().enumerate() {
            table.metadata.push((format!("suppression_{}", i + 1), format!("flux={f:.12} xi_mhz={:.6e}", x * MHZ_PER_GHZ)));
        }
        table.metadata.push(("contrast".into(), format!("{:.6e}", ex.contrast)));
    }
    Ok(ZZSweep { table, extrema })
}

/// Below this |ξ| (GHz) a grid-local minimum is refined as a suppression point.
pub const SUPPRESSION_CANDIDATE: f64 = 1e-2 / MHZ_PER_GHZ;

/// Golden-section refinement of max |ξ| and of the suppression points
/// (sign changes and shallow local minima) found on the grid.
pub fn refine_extrema<F: Fn(f64) -> f64>(flux: &[f64], xi: &[f64], xi_at: &F) -> Option<ZZExtrema> {
    let ok: Vec<usize> = (0..flux.len()).filter(|&i| xi[i].is_finite()).collect();
    let &imax = ok.iter().max_by(|&&a, &&b| xi[a].abs().total_cmp(&xi[b].abs()).then(b.cmp(&a)))?;
    let tol = 1e-12;
    let (lo, hi) = (imax.saturating_sub(1), (imax + 1).min(flux.len() - 1));
    let (mut max_flux, mut max_xi) = (flux[imax], xi[imax]);
    if lo != hi {
        let (a, b) = (flux[lo].min(flux[hi]), flux[lo].max(flux[hi]));
        let (f, v) = golden_min(|x| -xi_at(x).abs(), a, b, tol, 200);
        if -v > max_xi.abs() {
            max_flux = f;
            max_xi = xi_at(f);
        }
    }

    let mut brackets: Vec<(f64, f64, usize)> = Vec::new();
    for i in 0..flux.len().saturating_sub(1) {
        let (a, b) = (xi[i], xi[i + 1]);
        if a.is_finite() && b.is_finite() && (a == 0.0 || a * b < 0.0) {
            brackets.push((flux[i], flux[i + 1], i));
        }
    }
    for i in 1..flux.len().saturating_sub(1) {
        let (a, b, c) = (xi[i - 1].abs(), xi[i].abs(), xi[i + 1].abs());
        let near_sign_change = brackets.iter().any(|&(_, _, k)| k + 1 == i || k == i);
        if b.is_finite() && b <= a && b <= c && b < SUPPRESSION_CANDIDATE && !near_sign_change {
            brackets.push((flux[i - 1], flux[i + 1], i));
        }
    }
    brackets.sort_by_key(|x| x.2);
    let mut minima = Vec::with_capacity(brackets.len());
    for (a, b, _) in brackets {
        let (lo, hi) = (a.min(b), a.max(b));
        let (f, _) = golden_min(|x| xi_at(x).abs(), lo, hi, tol, 200);
        minima.push((f, xi_at(f)));
    }
    let floor = if minima.is_empty() {
        ok.iter().map(|&i| xi[i].abs()).fold(f64::INFINITY, f64::min)
    } else {
        minima.iter().map(|m| m.1.abs()).fold(f64::INFINITY, f64::min)
    };
    Some(ZZExtrema { max_flux, max_xi, minima, contrast: max_xi.abs() / floor })
}

/// Which device constant a design sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DesignParam {
    XJ,
    L,
    CJ,
    EJMax,
}

impl DesignParam {
    pub fn as_str(self) -> &'static str {
        match self {
            DesignParam::XJ => "x_j",
            DesignParam::L => "l",
            DesignParam::CJ => "c_j",
            DesignParam::EJMax => "e_j_max",
        }
    }

    pub fn apply(self, params: &DeviceParams, value: f64) -> DeviceParams {
        let mut p = params.clone();
        match self {
            DesignParam::XJ => p.x_j = value,
            DesignParam::L => p.l = value,
            DesignParam::CJ => p.c_j = value,
            DesignParam::EJMax => p.e_j_max = value,
        }
        p
    }
}

impl std::str::FromStr for DesignParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x_j" | "x_J" => Ok(DesignParam::XJ),
            "l" => Ok(DesignParam::L),
            "c_j" | "C_J" => Ok(DesignParam::CJ),
            "e_j_max" | "E_J_max" => Ok(DesignParam::EJMax),
            _ => Err(Error::Config(format!("unknown design parameter '{s}' (expected x_j, l, c_j or e_j_max)"))),
        }
    }
}

/// ν1, ν2 and their gap for every (design value, flux) pair.
pub fn design_sweep(params: &DeviceParams, which: DesignParam, design: &Grid, flux: &Grid, opts: &ModelOptions, pool: &rayon::ThreadPool) -> Result<SweepResult> {
    flux.validate()?;
    design.validate()?;
    let designs = design.values();
    for &v in &designs {
        which.apply(params, v).validate()?;
    }
    let n = opts.n_modes.max(2);
    let mut columns = vec!["flux".to_string(), which.as_str().to_string()];
    columns.extend(numbered("nu_", n, "_ghz"));
    columns.push("gap_ghz".into());
    let mut out = SweepResult::new(columns, base_metadata("design", params, opts));
    out.metadata.push(("design_parameter".into(), which.as_str().into()));
    out.metadata.push(("design_grid".into(), design.describe()));
    out.metadata.push(("flux_grid".into(), flux.describe()));
    let points: Vec<(f64, f64)> = designs.iter().flat_map(|&v| flux.values().into_iter().map(move |f| (v, f))).collect();
    let rows = par_map(pool, &points, |&(v, phi)| -> Result<Vec<f64>> {
        let p = which.apply(params, v);
        let basis = solve_modes(&p, FluxBias(phi), n, &opts.solver)?;
        let mut row: Vec<f64> = basis.modes.iter().map(|m| m.frequency_ghz()).collect();
        row.push(row[1] - row[0]);
        Ok(row)
    });
    for (&(v, phi), r) in points.iter().zip(rows) {
        out.push(r, &[phi, v]);
    }
    Ok(out)
}

/// Long-form u_m(x; Φ) table for heat maps; x_J is sampled from both sides.
pub fn envelope_field_map(params: &DeviceParams, flux: &Grid, x_points: usize, mode: usize, opts: &ModelOptions, pool: &rayon::ThreadPool) -> Result<SweepResult> {
    params.validate()?;
    flux.validate()?;
    if mode == 0 {
        return Err(Error::InvalidParameter("mode index starts at 1".into()));
    }
    if x_points < 2 {
        return Err(Error::InvalidParameter("field map needs at least two x points".into()));
    }
    let xs: Vec<f64> = (0..x_points).map(|i| -params.l + 2.0 * params.l * i as f64 / (x_points - 1) as f64).collect();
    let columns = ["flux", "x_m", "u", "delta_u"].iter().map(|s| s.to_string()).collect();
    let mut out = SweepResult::new(columns, base_metadata("fieldmap", params, opts));
    out.metadata.push(("flux_grid".into(), flux.describe()));
    out.metadata.push(("mode".into(), mode.to_string()));
    out.metadata.push(("x_points".into(), x_points.to_string()));
    let values = flux.values();
    let maps = par_map(pool, &values, |&phi| -> Result<DMatrix<f64>> {
        let basis = solve_modes(params, FluxBias(phi), mode.max(opts.n_modes), &opts.solver)?;
        let m = &basis.modes[mode - 1];
        let (left, right) = m.junction_limits();
        let mut rows = Vec::with_capacity(3 * (xs.len() + 2));
        let mut emitted_junction = false;
        for &x in &xs {
            if !emitted_junction && x >= params.x_j {
                rows.extend([params.x_j, left, m.delta_u, params.x_j, right, m.delta_u]);
                emitted_junction = true;
                if x == params.x_j {
                    continue;
                }
            }
            rows.extend([x, m.envelope(x)?, m.delta_u]);
        }
        Ok(DMatrix::from_row_slice(rows.len() / 3, 3, &rows))
    });
    for (&phi, map) in values.iter().zip(maps) {
        match map {
            Ok(mat) => {
                for r in 0..mat.nrows() {
                    out.push(Ok(vec![mat[(r, 0)], mat[(r, 1)], mat[(r, 2)]]), &[phi]);
                }
            }
            Err(e) => out.push(Err(e), &[phi]),
        }
    }
    Ok(out)
}
