//! Energy-sorting VQE and its supporting stack: integrals, second-quantized
//! operators, Jordan–Wigner mapping, operator pools, a dense statevector
//! simulator, BFGS-driven VQE, ES-VQE and ADAPT-VQE engines, and an exact
//! diagonalization oracle.

pub mod adapt;
pub mod analysis;
pub mod error;
pub mod es;
pub mod fermion;
pub mod integrals;
pub mod parallel;
pub mod pools;
pub mod qubit;
pub mod simulator;
pub mod trace;
pub mod vqe;

pub use error::{Error, Result};

/// 1 kcal/mol in Hartree.
pub const KCAL_PER_MOL: f64 = 1.0 / 627.509474;

/// Absolute error versus FCI counted as chemically accurate.
pub const CHEMICAL_ACCURACY: f64 = 1.6e-3;
