use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pools::{EntryKind, PoolEntry};
use crate::qubit::{jordan_wigner, SIMPLIFY_FLOOR};
use crate::simulator::Statevector;
use crate::vqe::Hamiltonian;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AcseResiduals {
    /// `max_u |⟨ψ|[T_u − T_u†, H]|ψ⟩|`
    pub max_real: f64,
    /// `max_u |⟨ψ|[T_u + T_u†, H]|ψ⟩|`
    pub max_imag: f64,
}

/// Largest contracted-Schrödinger-equation residuals over the excitations of
/// `basis`. Pauli entries carry no excitation and are skipped.
pub fn acse_residuals(psi: &Statevector, h: &Hamiltonian, basis: &[PoolEntry]) -> Result<AcseResiduals> {
    let h_psi = h.apply(psi)?;
    let n = psi.n_qubits();
    let mut out = AcseResiduals::default();
    for e in basis.iter().filter(|e| e.kind() != EntryKind::Pauli) {
        let t = e.excitation_operator();
        let a = jordan_wigner(&(t.clone() - t.adjoint()), n)?.simplify(SIMPLIFY_FLOOR);
        let b = jordan_wigner(&(t.clone() + t.adjoint()), n)?.simplify(SIMPLIFY_FLOOR);
        // With φ = Hψ: ⟨[A,H]⟩ = ⟨A†ψ|φ⟩ − ⟨φ|Aψ⟩ for any A.
        let commutator = |x: &crate::qubit::QubitOperator| -> Result<Complex64> {
            let x_psi = psi.apply_qubit_operator(x)?;
            let xd_psi = psi.apply_qubit_operator(&x.adjoint())?;
            Ok(xd_psi.inner(&h_psi) - h_psi.inner(&x_psi))
        };
        out.max_real = out.max_real.max(commutator(&a)?.norm());
        out.max_imag = out.max_imag.max(commutator(&b)?.norm());
    }
    Ok(out)
}
