//! Quantum teleportation of a single qubit through three-qubit shared
//! states: state construction, measurement bases and branch operators,
//! protocol simulation, and feasibility analysis.
//!
//! Qubits are ordered big-endian. In a register of `n` qubits, position 0 is
//! the most significant bit of the computational index. Shared states hold
//! Alice's qubits first and Bob's qubit last.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod feasibility;
pub mod protocol;
pub mod states;

pub use algebra::{Amplitude, Matrix};
pub use error::{Error, Result};
pub use feasibility::{analyze, protocol_feasible, unitarity_verdict, FeasibilityReport};
pub use protocol::{
    basis_from_s, bell_protocol, branch_operators, ghz_protocol, protocol_from_basis, run_teleport, sample_teleport,
    w_like_protocol, MeasurementBasis, TeleportProtocol,
};
pub use states::{make_named_state, DensityMatrix, NamedState, PureState};
