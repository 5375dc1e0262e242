//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("gate is not unitary (deviation {deviation:.3e})")]
    NonUnitaryGate { deviation: f64 },

    #[error("controlled-Z needs two distinct qubits, got {0} twice")]
    IdenticalQubits(usize),

    #[error("amplitude vector of length {len} is not a power of two register")]
    BadDimension { len: usize },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix trace {trace} is not 1")]
    BadTrace { trace: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("Kraus operators do not sum to the identity (deviation {deviation:.3e})")]
    IncompleteKraus { deviation: f64 },

    #[error("impossible postselection: branch probability {prob:.3e}")]
    ImpossibleBranch { prob: f64 },

    #[error("partial trace requires a nonempty set of kept qubits")]
    EmptyKeepSet,

    #[error("dimension mismatch: {left} qubits vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("residual is not a pure state (secondary eigenvalue {0:.3e})")]
    ResidualNotPure(f64),

    #[error("parameter {name} = {value} outside [{lo}, {hi}]")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("calibration target {target} is unreachable: {reason}")]
    UnreachableTarget { target: f64, reason: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid measurement pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid trap test: {0}")]
    InvalidTest(String),

    #[error("byproduct exponent references outcome s{index} but only {available} outcomes are present")]
    MissingOutcome { index: usize, available: usize },

    #[error("session mix probabilities sum to {0}, expected 1")]
    InvalidMix(f64),

    #[error("adversary ancilla states must share one size <= {max} qubits, got {got}")]
    BadAncilla { max: usize, got: usize },

    #[error("tomography record is missing setting {0}")]
    MissingSetting(String),

    #[error("tomography needs at least one shot per setting")]
    ZeroShots,
}
