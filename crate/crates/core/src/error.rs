use thiserror::Error;

/// Errors raised by the counting, estimation and distribution routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The formula needs a degree sum (or trace) of a particular parity.
    #[error("parity: {0}")]
    Parity(&'static str),

    /// The density parameter sits on the boundary where a formula degenerates.
    #[error("degenerate density: {0}")]
    Density(&'static str),

    #[error("zero degree at position {0}; strip zero degrees first")]
    ZeroDegree(usize),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    /// The memo table grew past its configured entry cap.
    #[error("memo table exceeded {cap} entries; instance too large")]
    ResourceLimit { cap: usize },

    #[error("empty class: {0}")]
    EmptyClass(&'static str),

    #[error("log of zero count")]
    LogOfZero,

    #[error("hypothesis violated: {0}")]
    Hypothesis(&'static str),

    #[error("unsupported moment order {0}")]
    UnsupportedOrder(u32),

    #[error("cache snapshot: {0}")]
    Snapshot(String),
}

pub type Result<T> = std::result::Result<T, Error>;
