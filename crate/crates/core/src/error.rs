use thiserror::Error;

/// Every failure the simulation library can report.
///
/// Variants carry enough context to reproduce the failing call; the CLI maps
/// them onto exit codes via [`Error::is_config`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("resonance ordering violated: need Omega0 < |omega_b| < Omega1, got Omega0 = {omega0}, |omega_b| = {omega_b}, Omega1 = {omega1}")]
    ResonanceOrdering { omega0: f64, omega_b: f64, omega1: f64 },

    #[error("scale separation violated: {what} = {ratio:.3e} is below the required {required:.3e}")]
    ScaleSeparation {
        what: &'static str,
        ratio: f64,
        required: f64,
    },

    #[error("non-physical parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("missing parameter {0}")]
    MissingParameter(&'static str),

    #[error("quadrature cannot resolve the integrand: {0}")]
    QuadratureResolution(String),

    #[error("Fock truncation at n_max = {n_max} leaves tail mass {tail:.3e} (limit {limit:.1e})")]
    Truncation { n_max: usize, tail: f64, limit: f64 },

    #[error("time step too large: dt * E_max = {product:.4} exceeds {limit}")]
    StepSize { product: f64, limit: f64 },

    #[error("norm drift {drift:.3e} exceeds {limit:.1e} without an absorber")]
    IntegratorDrift { drift: f64, limit: f64 },

    #[error("grid too small: {0}")]
    GridExtent(String),

    #[error("cavity mode is not an integer: omega_c * ell / (pi c) = {mode}")]
    CavityMode { mode: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by malformed input rather than by physics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Io(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
