use thiserror::Error;

use crate::constructions::ScenarioVerdict;
use crate::profiles::Jet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller-supplied data violates a documented precondition.
    #[error("invalid input: {0}")]
    Input(String),

    /// An integration stopped before reaching the requested end point.
    #[error("integration stopped at t = {reached} before reaching {requested}: {reason}")]
    DomainTruncation {
        reached: f64,
        requested: f64,
        reason: String,
    },

    #[error("integration quality check failed: {what} = {value:e} exceeds {bound:e}")]
    IntegrationQuality {
        what: String,
        value: f64,
        bound: f64,
    },

    #[error("construction failed its post-checks: {0}")]
    Construction(String),

    #[error("glue mismatch at t = {at}: left {left:?}, right {right:?}")]
    GlueMismatch { at: f64, left: Jet, right: Jet },

    #[error("t = {t} lies inside the exclusion zone of the closure point {closure}")]
    SingularPoint { t: f64, closure: f64 },

    #[error("t = {t} is outside the domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("missing data: {0}")]
    MissingData(String),

    /// A parameter search found no certified value; the verdict carries the
    /// per-candidate diagnostics.
    #[error("search failed: {message}")]
    SearchFailure {
        message: String,
        diagnostics: Box<ScenarioVerdict>,
    },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// True when the error stems from bad caller input rather than a failed
    /// computation.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Input(_) | Error::MissingData(_))
    }
}
