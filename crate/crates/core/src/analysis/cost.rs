use serde::{Deserialize, Serialize};

use crate::pools::PoolEntry;

/// Counting rule stated alongside every cost report.
pub const CNOT_CONVENTION: &str =
    "CNOT staircase per Pauli rotation: 2(w-1) CNOTs for weight w; single-qubit gates and cancellations between rotations ignored";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub n_operators: usize,
    pub n_pauli_rotations: usize,
    pub cnot_count: usize,
    /// Rotations applied one after another with no parallel layering.
    pub naive_depth: usize,
}

pub fn circuit_cost(ops: &[PoolEntry]) -> CostReport {
    let mut r = CostReport { n_operators: ops.len(), ..Default::default() };
    for op in ops {
        for (p, _) in op.rotations() {
            r.n_pauli_rotations += 1;
            r.cnot_count += 2 * p.weight().saturating_sub(1);
        }
    }
    r.naive_depth = r.n_pauli_rotations;
    r
}
