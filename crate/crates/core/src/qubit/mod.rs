//! Pauli-string algebra and the Jordan-Wigner transform.
//!
//! Qubit `k` is spin-orbital `k` and the least significant bit of a basis
//! index; Jordan-Wigner parity strings run over the qubits below the mode.

mod jordan_wigner;
mod operator;
mod pauli;

pub use jordan_wigner::jordan_wigner;
pub use operator::{QubitOperator, SIMPLIFY_FLOOR};
pub use pauli::{i_pow, parse_pauli_string, pauli_product, Pauli, PauliString, MAX_QUBITS};
