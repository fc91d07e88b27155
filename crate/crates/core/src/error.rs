use thiserror::Error;

/// Errors raised by the numerical kernels and the physics solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    QuadratureNonConvergence { estimate: f64, error_bound: f64 },

    #[error("improper integral appears to diverge (estimate {estimate:e})")]
    Divergent { estimate: f64 },

    #[error("no sign change on [{lo:e}, {hi:e}] (f(lo) = {f_lo:e}, f(hi) = {f_hi:e}); expand the bracket")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("bracket search failed: {0}")]
    BracketFailure(String),

    #[error("eigensolver failed: residual {residual:e} exceeds {tolerance:e}")]
    EigenFailure { residual: f64, tolerance: f64 },

    #[error("matrix is singular to working precision (pivot ratio {pivot_ratio:e})")]
    Singular { pivot_ratio: f64 },

    #[error("point {x} lies outside the interpolation range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("dispersion is singular: T = 0, delta = 0 and p^2 = mu (p = {p})")]
    SingularDispersion { p: f64 },

    #[error("scattering length undefined or infinite: {0}")]
    ScatteringLengthUndefined(String),

    #[error("angular kernel representations disagree at (p, q) = ({p}, {q}): {momentum_form:e} vs {position_form:e}")]
    KernelMismatch {
        p: f64,
        q: f64,
        momentum_form: f64,
        position_form: f64,
    },

    #[error("gap iteration did not converge after {iterations} iterations (last relative change {residual:e})")]
    GapNonConvergence { iterations: usize, residual: f64 },

    #[error("gap iteration oscillates (relative change {residual:e}); retry with a smaller mixing parameter")]
    GapOscillation { residual: f64 },

    #[error("state violates 0 <= Gamma <= 1 at p = {p}: eigenvalue {eigenvalue:e}")]
    ConstraintViolation { p: f64, eigenvalue: f64 },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the error stems from bad configuration or input rather than
    /// from a solver failing on valid input.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::InvalidInput(_) | Error::Io(_) | Error::Csv(_) => true,
            Error::Context { source, .. } => source.is_config_error(),
            _ => false,
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
