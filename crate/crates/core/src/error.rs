use thiserror::Error;

/// Errors raised by the interface laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("mollifier under-resolved: eps = {eps} < 2*dx = {min}")]
    UnderResolvedMollifier { eps: f64, min: f64 },

    #[error("geometry range violated at x = {x}: f = {value} ({reason})")]
    RangeViolation { x: f64, value: f64, reason: String },

    #[error("strip kernel singular at lattice point (y, r) = ({y}, {r}) with l = {l}")]
    SingularLattice { y: f64, r: f64, l: f64 },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("time step collapsed after {halvings} halvings at t = {t}: {reason}")]
    DtCollapse { t: f64, halvings: u32, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    #[error("csv parse error at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
