use num_complex::Complex64;

use super::operator::{QubitOperator, SIMPLIFY_FLOOR};
use super::pauli::{Pauli, PauliString};
use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, LadderOp};

/// Qubit image of one ladder operator:
/// `a_p = ½(X_p + iY_p) Z_{p−1}…Z_0`, `a†_p = ½(X_p − iY_p) Z_{p−1}…Z_0`.
fn ladder_image(op: LadderOp, n_qubits: usize) -> [(PauliString, Complex64); 2] {
    let below = (1u64 << op.mode) - 1;
    let bit = 1u64 << op.mode;
    let x = PauliString::from_masks(n_qubits, bit, below).expect("mode checked");
    let y = PauliString::from_masks(n_qubits, bit, below | bit).expect("mode checked");
    let sign = if op.creation { -1.0 } else { 1.0 };
    debug_assert_eq!(y.get(op.mode), Pauli::Y);
    [(x, Complex64::new(0.5, 0.0)), (y, Complex64::new(0.0, 0.5 * sign))]
}

/// Jordan-Wigner image of a fermionic operator on `n_qubits` qubits, with
/// like terms merged and coefficients below the global floor dropped.
pub fn jordan_wigner(f: &FermionOperator, n_qubits: usize) -> Result<QubitOperator> {
    if let Some(m) = f.n_modes().checked_sub(1).filter(|&m| m >= n_qubits) {
        return Err(Error::Bounds(format!("mode {m} needs more than {n_qubits} qubits")));
    }
    let mut out = QubitOperator::zero(n_qubits);
    for (factors, coeff) in f.iter() {
        // Expand the product of two-term images factor by factor.
        let mut acc = vec![(PauliString::identity(n_qubits), coeff)];
        for &op in factors {
            let image = ladder_image(op, n_qubits);
            let mut next = Vec::with_capacity(acc.len() * 2);
            for (p, c) in &acc {
                for (q, d) in &image {
                    let (phase, r) = super::pauli_product(p, q)?;
                    next.push((r, phase * c * d));
                }
            }
            acc = next;
        }
        for (p, c) in acc {
            out.add_term(p, c)?;
        }
    }
    Ok(out.simplify(SIMPLIFY_FLOOR))
}
