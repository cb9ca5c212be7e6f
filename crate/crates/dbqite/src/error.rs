use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects built for different register widths were combined.
    #[error("incompatible qubit counts: {left} vs {right}")]
    IncompatibleQubitCounts { left: usize, right: usize },

    /// A Pauli factor addresses a qubit outside the register.
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitIndexOutOfRange { index: usize, num_qubits: usize },

    /// A Pauli string listed the same qubit twice or out of order.
    #[error("pauli factors must have strictly increasing qubit indices")]
    UnorderedPauliFactors,

    /// Singlet products exist only on an even number of qubits.
    #[error("singlet product state requires an even qubit count, got {0}")]
    OddQubitCount(usize),

    /// A dense-only operation was requested above the dense cutoff.
    #[error("dense mode requires at most {threshold} qubits, got {num_qubits} (set DBQITE_DENSE_THRESHOLD to override)")]
    DenseThresholdExceeded { num_qubits: usize, threshold: usize },

    /// Iterative eigensolver stalled before reaching the target residual.
    #[error("iterative eigensolver did not converge: residual {residual:.3e} after {iterations} iterations")]
    EigensolverDidNotConverge { residual: f64, iterations: usize },

    /// Imaginary-time propagation drove the norm below representable range.
    #[error("state annihilated: imaginary-time propagator norm underflowed")]
    StateAnnihilated,

    /// The initial state has no ground-state component.
    #[error("initial state has zero overlap with the ground state")]
    ZeroGroundOverlap,

    /// Theorem schedules assume a unique ground state.
    #[error("unique ground state required (gap {gap:.3e} at scale {scale:.3e})")]
    DegenerateGroundState { gap: f64, scale: f64 },

    /// Catch-all for violated call preconditions.
    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
