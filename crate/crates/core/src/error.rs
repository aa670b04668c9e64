use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("register mismatch: {0}")]
    RegisterMismatch(String),
    #[error("gate {0} has no inverse")]
    NotInvertible(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("rotation {0} needs a synthesis accuracy")]
    MissingDelta(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("width mismatch: circuit has {circuit} qubits, state has {state}")]
    WidthMismatch { circuit: usize, state: usize },
    #[error("impossible outcome (probability {0:e})")]
    ImpossibleOutcome(f64),
    #[error("{what} needs {qubits} qubits, cap is {cap}")]
    CapExceeded { what: &'static str, qubits: usize, cap: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("infeasible target: {0}")]
    Infeasible(String),
    #[error("singular weight solve: {0}")]
    Singular(String),
    #[error("input is not a linear state (distance {0:e})")]
    NotLinearState(f64),
    #[error("unsupported base {0}")]
    UnsupportedBase(f64),
    #[error("measurement gates cannot be simulated coherently")]
    MeasureInCircuit,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
