//! Exact equivalence checking for Clifford protocols.
//!
//! Hermitian operators on n qubits have a basis of `4^n` stabilizer-state
//! density matrices ([`basis`]). Because a protocol acts linearly on
//! density matrices, running it on each basis state with a tableau
//! simulator ([`tableau`]) and comparing exact output-Pauli expectations
//! ([`equiv`]) decides whether two protocols implement the same channel.
//! [`oracle`] is a dense state-vector reference for cross-checking.

pub mod basis;
pub mod corpus;
pub mod equiv;
pub mod exact;
pub mod lang;
pub mod oracle;
pub mod pauli;
pub mod tableau;

pub use basis::{BasisCircuit, BasisElement, BasisKind};
pub use equiv::{check_equivalence, fingerprint, CheckOptions, Counterexample, SuperopFingerprint, Verdict};
pub use lang::{load, ProtocolAst, ValidProtocol};
pub use pauli::{Pauli, PauliString};
pub use tableau::{Gate, GateKind, Tableau};
