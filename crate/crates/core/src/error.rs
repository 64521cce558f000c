use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong inside the numerical core.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Mesh construction received a non-positive size or count.
    InvalidMesh(&'static str),
    /// A function of the entropy pair was evaluated outside `(0, +inf)`.
    Domain { what: &'static str, value: f64 },
    /// The adiabatic exponent must satisfy `gamma > 1`.
    InvalidGamma(f64),
    /// The tangent-intersection point fell outside `[min(a,b), max(a,b)]`,
    /// which only happens for a function that is not strictly convex.
    NotConvex { x_k: f64, x_l: f64, x_kl: f64 },
    /// A density or internal energy became non-positive.
    Positivity {
        field: &'static str,
        cell: usize,
        value: f64,
    },
    /// The energy source hook returned a negative value.
    NegativeSource { cell: usize, value: f64 },
    /// Picard iteration of the implicit limited scheme did not settle.
    Picard { iterations: usize, residual: f64 },
    /// The linear solver did not reach the requested tolerance.
    LinearSolver { iterations: usize, residual: f64 },
    /// A field does not have one entry per cell (or per face).
    SizeMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// Inconsistent configuration value.
    InvalidConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMesh(msg) => write!(f, "invalid mesh: {msg}"),
            Error::Domain { what, value } => {
                write!(f, "{what} evaluated outside its domain at {value:e}")
            }
            Error::InvalidGamma(g) => write!(f, "gamma must be > 1, got {g}"),
            Error::NotConvex { x_k, x_l, x_kl } => write!(
                f,
                "tangent intersection {x_kl:e} lies outside [{x_k:e}, {x_l:e}]"
            ),
            Error::Positivity { field, cell, value } => {
                write!(f, "{field} lost positivity in cell {cell}: {value:e}")
            }
            Error::NegativeSource { cell, value } => {
                write!(f, "energy source is negative in cell {cell}: {value:e}")
            }
            Error::Picard {
                iterations,
                residual,
            } => write!(
                f,
                "Picard iteration did not converge after {iterations} iterations (last update {residual:e})"
            ),
            Error::LinearSolver {
                iterations,
                residual,
            } => write!(
                f,
                "linear solver did not converge after {iterations} sweeps (residual {residual:e})"
            ),
            Error::SizeMismatch {
                what,
                expected,
                found,
            } => write!(f, "{what}: expected {expected} entries, found {found}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
