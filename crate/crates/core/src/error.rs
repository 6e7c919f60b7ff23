use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("{name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// The weight lies too close to 1/(6p) for the endpoint argument to apply.
    #[error("u = {u} is within {tolerance} of 1/(6p) = {limit}; the leading term of f vanishes")]
    Degenerate { u: f64, limit: f64, tolerance: f64 },

    /// An interval operation was asked to leave its domain.
    #[error("interval [{lo}, {hi}] is outside the domain of {op}")]
    IntervalDomain { op: &'static str, lo: f64, hi: f64 },

    #[error("unknown oracle expression `{0}`")]
    UnknownExpression(String),

    #[error("oracle expression `{expr}` expects {expected} inputs, got {got}")]
    OracleArity {
        expr: String,
        expected: usize,
        got: usize,
    },

    #[error("oracle for `{0}` did not converge to the requested digits")]
    OracleNotConverged(String),
}

pub(crate) fn check(ok: bool, name: &'static str, value: f64, domain: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain,
        })
    }
}
