//! Error type shared by all modules.

use std::fmt;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when constructing models, evaluating
/// norms, or running scenarios.
#[derive(Debug)]
pub enum Error {
    /// A resolvent was requested within tolerance of the spectrum.
    SpectrumHit { s: f64, dist: f64 },
    /// Dense factorization failed (matrix numerically singular).
    SingularMatrix,
    /// Semigroup quantities are only defined for t >= 0.
    NegativeTime(f64),
    /// Laplace-transform evaluation point collides with a density pole
    /// or falls outside a term's convergence half-plane.
    LaplaceDomain(String),
    /// A convolution result leaves the representable measure class.
    NotRepresentable(String),
    /// Inverse evaluation outside the sampled range of a monotone function.
    OutOfRange { y: f64, lo: f64, hi: f64 },
    /// omega never drops to the requested level within the sampled window.
    NotAttained { s: f64 },
    /// A nonzero eigenvalue sits on the imaginary axis inside the unit
    /// window, so the minimal dominating function m would be infinite.
    SpectrumInWindow { re: f64, im: f64 },
    /// The tail of ||T(t) A R(1,A)|| beyond the sampled window cannot be
    /// bounded for this operator.
    TailUnbounded(String),
    /// A theorem hypothesis is violated by the supplied data.
    HypothesisFailed(String),
    /// Operator construction rejected its input.
    InvalidOperator(String),
    /// Measure construction rejected its input.
    InvalidMeasure(String),
    /// Sampled-function construction rejected its input.
    InvalidFunction(String),
    /// Grid construction rejected its input.
    InvalidGrid(String),
    /// Configuration syntax error.
    Parse { line: usize, msg: String },
    /// Configuration key is not recognised (unknown keys are hard errors).
    UnknownKey { line: usize, key: String },
    /// Configuration value is outside its admissible domain.
    Range { line: usize, msg: String },
    /// Underlying I/O failure.
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SpectrumHit { s, dist } => write!(
                f,
                "resolvent evaluation at i*{s} is within {dist:.3e} of the spectrum"
            ),
            Self::SingularMatrix => write!(f, "matrix factorization failed (singular)"),
            Self::NegativeTime(t) => write!(f, "negative time t = {t}"),
            Self::LaplaceDomain(msg) => write!(f, "Laplace domain violation: {msg}"),
            Self::NotRepresentable(msg) => write!(f, "not representable: {msg}"),
            Self::OutOfRange { y, lo, hi } => {
                write!(f, "value {y} outside sampled range [{lo}, {hi}]")
            }
            Self::NotAttained { s } => {
                write!(f, "omega never drops to {s} within the sampled window")
            }
            Self::SpectrumInWindow { re, im } => write!(
                f,
                "nonzero eigenvalue {re}+{im}i lies on the imaginary axis inside the unit window"
            ),
            Self::TailUnbounded(msg) => write!(f, "tail cannot be bounded: {msg}"),
            Self::HypothesisFailed(msg) => write!(f, "hypothesis failed: {msg}"),
            Self::InvalidOperator(msg) => write!(f, "invalid operator: {msg}"),
            Self::InvalidMeasure(msg) => write!(f, "invalid measure: {msg}"),
            Self::InvalidFunction(msg) => write!(f, "invalid sampled function: {msg}"),
            Self::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Self::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            Self::UnknownKey { line, key } => write!(f, "unknown key `{key}` at line {line}"),
            Self::Range { line, msg } => write!(f, "range error at line {line}: {msg}"),
            Self::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}
