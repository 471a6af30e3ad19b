use crate::exprfn::{EvalError, ParseError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("g has a pole at R = (k-1)/k = {pole}; got R = {r}")]
    Pole { r: f64, pole: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("scenario construction failed: {0}")]
    Construction(String),
    #[error("step size underflow at tau = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("state left the invariant region at tau = {t}: {state:?}")]
    LeftDomain { t: f64, state: Vec<f64> },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
