//! Exact diagonalization, contracted Schrödinger-equation residuals and
//! circuit-cost estimates.

mod acse;
mod cost;
mod fci;

pub use acse::{acse_residuals, AcseResiduals};
pub use cost::{circuit_cost, CostReport, CNOT_CONVENTION};
pub use fci::{fci_ground_state, sector_basis, FciResult, Sector};
