use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spectrum kind {0} has no pointwise density")]
    KindHasNoDensity(&'static str),

    #[error("tabulated samples must contain at least two points with strictly increasing detuning and non-negative density")]
    EmptyOrUnsorted,

    #[error("tabulated samples are all zero")]
    AllZero,

    #[error("unsupported spectrum kind for this operation: {0}")]
    UnsupportedKind(&'static str),

    #[error("cannot read tabulated spectrum {path}: {reason}")]
    TabulatedInput { path: String, reason: String },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid channel parameters: {0}")]
    InvalidChannel(String),

    #[error("tabulated spectra have no closed-form correlation; use quadrature")]
    TabulatedNeedsQuadrature,

    #[error("the white spectrum has a singular (delta) correlation and cannot be integrated")]
    WhiteIsSingular,

    #[error("quadrature tolerance {0:e} outside [1e-13, 1e-6]")]
    InvalidTolerance(f64),

    #[error("quadrature did not converge: estimate {re:e}{im:+e}i, error bound {error:e}")]
    NotConverged { re: f64, im: f64, error: f64 },

    #[error("amplitudes are not normalized: |x|^2 + |y|^2 = {0}")]
    NotNormalized(f64),

    #[error("correlation modulus {0} exceeds 1")]
    CorrelationOutOfRange(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("Jacobi eigenvalue iteration did not converge after {0} sweeps")]
    EigenNotConverged(usize),

    #[error("closed form and quadrature disagree by {difference:e} at l = {length} m")]
    OracleMismatch { length: f64, difference: f64 },

    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
