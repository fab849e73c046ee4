//! `hcoupler`: sweeps of the SQUID-embedded CPW coupler from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info, warn};

use hybrid_coupler::io::{self, Format};
use hybrid_coupler::model::{LambShift, ModelOptions};
use hybrid_coupler::quantization::QubitCharge;
use hybrid_coupler::sweeps::{self, DesignParam, Grid, SweepResult};
use hybrid_coupler::{DeviceParams, Error, FluxConvention};

const EXIT_CONFIG: u8 = 2;
const EXIT_TOTAL: u8 = 3;
const EXIT_PARTIAL: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "hcoupler", version, about = "Normal modes and qubit interactions of a SQUID-embedded CPW coupler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mode table (k, ν, θ, A, B, Δu) at one flux point.
    Modes {
        #[command(flatten)]
        common: Common,
        /// Reduced flux Φ/Φ0.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        flux: f64,
    },
    /// Mode frequencies, ω_c and anharmonicities over flux.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flux: FluxArg,
    },
    /// Qubit–mode couplings g_jm over flux.
    Couplings {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flux: FluxArg,
        #[command(flatten)]
        qubits: Qubits,
    },
    /// Effective XX exchange (dispersive sum and exact splitting).
    Xx {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flux: FluxArg,
        #[command(flatten)]
        qubits: Qubits,
    },
    /// Static ZZ strength with located maximum and suppression points.
    Zz {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flux: FluxArg,
        #[command(flatten)]
        qubits: Qubits,
    },
    /// Lowest-mode gap ν2 − ν1 over a design parameter and flux.
    Design {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flux: FluxArg,
        /// x_j (m), l (half length, m), c_j (F) or e_j_max (GHz).
        #[arg(long)]
        param: DesignParam,
        /// Design values as start:stop:count in SI units (GHz for e_j_max).
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        values: Grid,
    },
    /// Envelope u_m(x) of one mode over flux, in long form.
    Fieldmap {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flux: FluxArg,
        /// 1-based mode index.
        #[arg(long, default_value_t = 1)]
        mode: usize,
        /// Positions per flux point along the resonator.
        #[arg(long, default_value_t = 201)]
        x_points: usize,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Modes { common, .. }
            | Command::Spectrum { common, .. }
            | Command::Couplings { common, .. }
            | Command::Xx { common, .. }
            | Command::Zz { common, .. }
            | Command::Design { common, .. }
            | Command::Fieldmap { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Modes { .. } => "modes",
            Command::Spectrum { .. } => "spectrum",
            Command::Couplings { .. } => "couplings",
            Command::Xx { .. } => "xx",
            Command::Zz { .. } => "zz",
            Command::Design { .. } => "design",
            Command::Fieldmap { .. } => "fieldmap",
        }
    }
}

#[derive(Args, Debug)]
struct Common {
    /// Device INI file.
    #[arg(long)]
    device: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Overrides the device file's flux convention (half_period or paper_literal).
    #[arg(long)]
    convention: Option<FluxConvention>,
    /// Retained coupler modes.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Fock levels per body for many-body quantities.
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Lamb-shift expression: standard or pair_sum.
    #[arg(long, default_value = "standard", value_parser = parse_lamb)]
    lamb: LambShift,
    /// Qubit charging energy used to fix E_J: bare or renormalized.
    #[arg(long, default_value = "bare", value_parser = parse_charge)]
    qubit_charge: QubitCharge,
    /// Add the capacitive qubit–qubit term.
    #[arg(long)]
    include_direct: bool,
    /// Minimum |cos α| accepted by the root finder.
    #[arg(long)]
    pole_guard: Option<f64>,
    /// Scan points per π/(2l) interval of the root finder.
    #[arg(long)]
    scan_points: Option<usize>,
    /// Worker threads (0 = one per core).
    #[arg(long, env = "HCOUPLER_WORKERS", default_value_t = 0)]
    workers: usize,
}

#[derive(Args, Debug)]
struct FluxArg {
    /// Flux grid start:stop:count in units of Φ0.
    #[arg(long, default_value = "-0.5:0.5:401", value_parser = parse_grid, allow_hyphen_values = true)]
    flux: Grid,
}

#[derive(Args, Debug)]
struct Qubits {
    /// Qubit 1 frequency (GHz).
    #[arg(long)]
    w1: f64,
    /// Qubit 2 frequency (GHz).
    #[arg(long)]
    w2: f64,
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(format!("expected start:stop:count, got {s:?}"));
    };
    let start: f64 = a.trim().parse().map_err(|_| format!("bad start {a:?}"))?;
    let stop: f64 = b.trim().parse().map_err(|_| format!("bad stop {b:?}"))?;
    let count: usize = n.trim().parse().map_err(|_| format!("bad count {n:?}"))?;
    Grid::new(start, stop, count).map_err(|e| e.to_string())
}

fn parse_lamb(s: &str) -> Result<LambShift, String> {
    match s {
        "standard" => Ok(LambShift::Standard),
        "pair_sum" => Ok(LambShift::PairSum),
        _ => Err(format!("unknown Lamb-shift form {s:?} (standard, pair_sum)")),
    }
}

fn parse_charge(s: &str) -> Result<QubitCharge, String> {
    match s {
        "bare" => Ok(QubitCharge::Bare),
        "renormalized" => Ok(QubitCharge::Renormalized),
        _ => Err(format!("unknown qubit charge {s:?} (bare, renormalized)")),
    }
}

/// Everything a subcommand needs after validation.
struct Setup {
    params: DeviceParams,
    opts: ModelOptions,
    metadata: Vec<(String, String)>,
}

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn setup(common: &Common, command: &str) -> Result<Setup, Error> {
    if common.n < 1 {
        return Err(config("--n must be at least 1"));
    }
    if common.levels < 2 {
        return Err(config("--levels must be at least 2"));
    }
    let device = io::load_device(&common.device)?;
    let mut params = device.params;
    if let Some(c) = common.convention {
        params = params.with_convention(c);
    }
    params.validate()?;
    let mut opts = ModelOptions {
        n_modes: common.n,
        levels: common.levels,
        lamb_shift: common.lamb,
        qubit_charge: common.qubit_charge,
        include_direct: common.include_direct,
        ..ModelOptions::default()
    };
    if let Some(g) = common.pole_guard {
        if !(g > 0.0 && g < 1.0) {
            return Err(config("--pole-guard must lie in (0, 1)"));
        }
        opts.solver.pole_guard = g;
    }
    if let Some(p) = common.scan_points {
        if p < 4 {
            return Err(config("--scan-points must be at least 4"));
        }
        opts.solver.points_per_interval = p;
    }
    let metadata = vec![
        ("command".to_string(), command.to_string()),
        ("device_sha256".to_string(), device.sha256),
    ];
    Ok(Setup { params, opts, metadata })
}

fn check_qubits(q: &Qubits) -> Result<[f64; 2], Error> {
    for (name, w) in [("--w1", q.w1), ("--w2", q.w2)] {
        if !(w.is_finite() && w > 0.0) {
            return Err(config(format!("{name} must be a positive frequency in GHz")));
        }
    }
    Ok([q.w1, q.w2])
}

fn check_sweep_grid(g: &Grid) -> Result<(), Error> {
    if g.count < 2 {
        return Err(config("--flux needs at least 2 points"));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<SweepResult, Error> {
    let common = cli.command.common();
    let s = setup(common, cli.command.name())?;
    let pool = || sweeps::worker_pool(common.workers);
    let (p, o) = (&s.params, &s.opts);
    let mut result = match &cli.command {
        Command::Modes { flux, .. } => {
            if !flux.is_finite() {
                return Err(config("--flux must be finite"));
            }
            sweeps::modes_table(p, *flux, o)?
        }
        Command::Spectrum { flux, .. } => {
            check_sweep_grid(&flux.flux)?;
            sweeps::flux_spectrum_sweep(p, &flux.flux, o, &pool()?)?
        }
        Command::Couplings { flux, qubits, .. } => {
            check_sweep_grid(&flux.flux)?;
            let w = check_qubits(qubits)?;
            sweeps::coupling_sweep(p, &flux.flux, w, o, &pool()?)?
        }
        Command::Xx { flux, qubits, .. } => {
            check_sweep_grid(&flux.flux)?;
            let w = check_qubits(qubits)?;
            let r = sweeps::xx_sweep(p, &flux.flux, w, o, &pool()?)?;
            if let Some(col) = r.column("resonant_divergence") {
                let n = col.iter().filter(|&&v| v == 1.0).count();
                if n > 0 {
                    warn!("{n} flux points have a qubit within 10 g of a mode; dispersive values there are unreliable");
                }
            }
            r
        }
        Command::Zz { flux, qubits, .. } => {
            check_sweep_grid(&flux.flux)?;
            let w = check_qubits(qubits)?;
            let r = sweeps::zz_sweep(p, &flux.flux, w, o, &pool()?)?;
            if let Some(x) = &r.extrema {
                info!("max |xi| = {:.6} MHz at flux {:.6}; contrast {:.3e}", x.max_xi.abs() * 1e3, x.max_flux, x.contrast);
            }
            r.table
        }
        Command::Design { flux, param, values, .. } => sweeps::design_sweep(p, *param, values, &flux.flux, o, &pool()?)?,
        Command::Fieldmap { flux, mode, x_points, .. } => {
            if *mode < 1 || *mode > o.n_modes {
                return Err(config(format!("--mode must lie in 1..={}", o.n_modes)));
            }
            if *x_points < 2 {
                return Err(config("--x-points must be at least 2"));
            }
            sweeps::envelope_field_map(p, &flux.flux, *x_points, *mode, o, &pool()?)?
        }
    };
    let mut meta = s.metadata;
    meta.append(&mut result.metadata);
    result.metadata = meta;
    Ok(result)
}

fn emit(result: &SweepResult, format: Format, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => io::write_result(result, format, path),
        None => {
            use std::io::Write;
            let text = io::render(result, format)?;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (format, out) = (cli.command.common().format, cli.command.common().out.clone());
    let result = match run(cli) {
        Ok(r) => r,
        Err(e @ (Error::Config(_) | Error::InvalidParameter(_))) => {
            error!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => {
            error!("{e}");
            return ExitCode::from(EXIT_TOTAL);
        }
    };
    let failed = result.failed();
    let total = result.rows.len();
    if total > 0 && failed == total {
        error!("every grid point failed");
        return ExitCode::from(EXIT_TOTAL);
    }
    if let Err(e) = emit(&result, format, out.as_deref()) {
        error!("{e}");
        return ExitCode::from(EXIT_TOTAL);
    }
    if failed > 0 {
        warn!("{failed} of {total} grid points failed; see the error column");
        return ExitCode::from(EXIT_PARTIAL);
    }
    ExitCode::SUCCESS
}
