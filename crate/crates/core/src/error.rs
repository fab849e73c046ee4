use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Josephson energy vanishes at flux {flux}; junction inductance is infinite")]
    FluxAtZeroJosephsonEnergy { flux: f64 },
    #[error("wavenumber {k} lies within the pole guard of a segment tangent")]
    PoleProximity { k: f64 },
    #[error("isolated {found} of {requested} roots below k_max = {k_max}")]
    BracketingFailure { found: usize, requested: usize, k_max: f64 },
    #[error("normalization integral {sum} is not positive")]
    DegenerateNormalization { sum: f64 },
    #[error("position {x} outside the resonator")]
    OutOfDomain { x: f64 },
    #[error("modes {m} and {n} overlap by {value} (relative to C_sigma)")]
    OrthogonalityViolation { m: usize, n: usize, value: f64 },
    #[error("mode {m} does not thread the junction (|delta_u| = {delta_u})")]
    JunctionDecoupledMode { m: usize, delta_u: f64 },
    #[error("capacitance matrix is singular (det = {det})")]
    SingularMatrix { det: f64 },
    #[error("eigensolver did not converge")]
    ConvergenceFailure,
    #[error("adiabatic tracking lost continuity between flux {from} and {to}")]
    TrackingBreak { from: f64, to: f64 },
    #[error("state label {0} not tracked")]
    MissingLabel(String),
    #[error("qubit {qubit} is within 10 g of mode {mode} (detuning {detuning} GHz, g {g} GHz)")]
    ResonantDivergence { qubit: usize, mode: usize, detuning: f64, g: f64 },
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Short stable identifier written into sweep error columns.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::FluxAtZeroJosephsonEnergy { .. } => "zero_josephson_energy",
            Error::PoleProximity { .. } => "pole_proximity",
            Error::BracketingFailure { .. } => "bracketing_failure",
            Error::DegenerateNormalization { .. } => "degenerate_normalization",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::OrthogonalityViolation { .. } => "orthogonality_violation",
            Error::JunctionDecoupledMode { .. } => "junction_decoupled_mode",
            Error::SingularMatrix { .. } => "singular_matrix",
            Error::ConvergenceFailure => "convergence_failure",
            Error::TrackingBreak { .. } => "tracking_break",
            Error::MissingLabel(_) => "missing_label",
            Error::ResonantDivergence { .. } => "resonant_divergence",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
