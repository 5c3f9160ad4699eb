use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the numerical routines, the registries and the
/// experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite integrand at node {node}")]
    NonFiniteIntegrand { node: f64 },

    #[error("bessel range: order {order} and argument {x} outside the supported range")]
    BesselRange { order: f64, x: f64 },

    #[error("unbracketed: no crossing of target {target} found in [{lo}, {hi}]")]
    Unbracketed { target: f64, lo: f64, hi: f64 },

    #[error("unsupported dimension {0} (supported: 1..=3)")]
    UnsupportedDimension(usize),

    #[error("moment may diverge: decay exponent {decay} <= alpha + dimension = {}", alpha + *dim as f64)]
    MomentMayDiverge { alpha: f64, decay: f64, dim: usize },

    #[error("insufficient truncation radius {radius}: tail estimate {tail:e} exceeds tolerance {tolerance:e}")]
    InsufficientTruncation {
        radius: usize,
        tail: f64,
        tolerance: f64,
    },

    #[error("arity mismatch: expected {expected}, got {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("invalid exponent vector: {0}")]
    InvalidExponents(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown kernel '{id}' (known: {known})")]
    UnknownKernel { id: String, known: String },

    #[error("unknown function '{label}' (known: {known})")]
    UnknownFunction { label: String, known: String },

    #[error("unknown Orlicz family '{id}' (known: {known})")]
    UnknownOrlicz { id: String, known: String },

    #[error("positivity violated: phi({u}) = 0 for a non-degenerate family")]
    PositivityViolated { u: f64 },

    #[error("vacuous bound: right-hand modular is infinite")]
    VacuousBound,

    #[error("norm underflow: Luxemburg norm is zero for a function that is not identically zero")]
    NormUnderflow,

    #[error("lambda too large: modular is infinite for every w; retry with a smaller lambda")]
    LambdaTooLarge,

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;
