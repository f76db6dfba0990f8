//! VQE objective, adjoint-method gradients and the optimization loop.

pub mod bfgs;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::build_hamiltonian;
use crate::integrals::IntegralSet;
use crate::pools::{OperatorPool, PoolEntry};
use crate::qubit::{jordan_wigner, PauliString, QubitOperator, SIMPLIFY_FLOOR};
use crate::simulator::{pauli_matrix_element, CompiledOperator, Statevector};

pub use bfgs::{BfgsOptions, BfgsResult, Objective};

/// Largest imaginary part tolerated in a Hermitian operator's coefficients.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// A Hermitian qubit Hamiltonian prepared for repeated application.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    operator: QubitOperator,
    compiled: CompiledOperator,
}

impl Hamiltonian {
    pub fn new(operator: QubitOperator) -> Result<Self> {
        let imag = operator.max_abs_imag();
        if imag > HERMITIAN_TOL {
            return Err(Error::Validation(format!("Hamiltonian has an imaginary coefficient of size {imag:e}")));
        }
        let compiled = CompiledOperator::new(&operator);
        Ok(Self { operator, compiled })
    }

    /// Jordan–Wigner image of the second-quantized Hamiltonian.
    pub fn from_integrals(s: &IntegralSet) -> Result<Self> {
        let q = jordan_wigner(&build_hamiltonian(s), s.n_spin_orbitals())?;
        Self::new(q.simplify(SIMPLIFY_FLOOR))
    }

    pub fn operator(&self) -> &QubitOperator {
        &self.operator
    }

    pub fn compiled(&self) -> &CompiledOperator {
        &self.compiled
    }

    pub fn n_qubits(&self) -> usize {
        self.operator.n_qubits()
    }

    pub fn apply(&self, psi: &Statevector) -> Result<Statevector> {
        self.compiled.apply(psi)
    }

    /// `Re⟨ψ|H|ψ⟩`
    pub fn energy(&self, psi: &Statevector) -> Result<f64> {
        let e = self.compiled.expectation(psi)?;
        debug_assert!(e.im.abs() < 1e-8 * e.re.abs().max(1.0), "complex energy {e}");
        Ok(e.re)
    }
}

/// Product of generator exponentials applied to a fixed start state.
struct Circuit<'a> {
    h: &'a Hamiltonian,
    start: &'a Statevector,
    ops: Vec<&'a [(PauliString, f64)]>,
}

impl Circuit<'_> {
    fn state(&self, theta: &[f64]) -> Statevector {
        let mut psi = self.start.clone();
        for (rots, &t) in self.ops.iter().zip(theta) {
            psi.apply_rotations(rots, t);
        }
        psi
    }

    fn energy(&self, theta: &[f64]) -> Result<f64> {
        self.h.energy(&self.state(theta))
    }

    /// Energy and gradient by back-propagating `λ = Hψ` through the product.
    fn energy_and_gradient(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        let mut psi = self.state(theta);
        let mut lam = self.h.apply(&psi)?;
        let energy = psi.inner(&lam).re;
        let mut grad = vec![0.0; theta.len()];
        for j in (0..self.ops.len()).rev() {
            for &(p, c) in self.ops[j].iter().rev() {
                // d/dφ ⟨ψ|H|ψ⟩ for ψ ← exp(iφP)ψ is −2 Im⟨λ|P|ψ⟩.
                let m = pauli_matrix_element(lam.amplitudes(), psi.amplitudes(), &p);
                grad[j] -= 2.0 * c * m.im;
                let angle = -theta[j] * c;
                psi.rotate(&p, angle)?;
                lam.rotate(&p, angle)?;
            }
        }
        Ok((energy, grad))
    }
}

impl Objective for Circuit<'_> {
    fn dim(&self) -> usize {
        self.ops.len()
    }

    fn evaluate(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.energy_and_gradient(x)
    }
}

/// Ordered generators with their parameters, acting on a reference state.
#[derive(Clone, Debug)]
pub struct AnsatzState {
    hamiltonian: Arc<Hamiltonian>,
    reference: Statevector,
    ops: Vec<PoolEntry>,
    params: Vec<f64>,
}

impl AnsatzState {
    pub fn new(hamiltonian: Arc<Hamiltonian>, reference: Statevector) -> Result<Self> {
        if reference.n_qubits() != hamiltonian.n_qubits() {
            return Err(Error::SizeMismatch { expected: hamiltonian.n_qubits(), found: reference.n_qubits() });
        }
        Ok(Self { hamiltonian, reference, ops: Vec::new(), params: Vec::new() })
    }

    pub fn hamiltonian(&self) -> &Arc<Hamiltonian> {
        &self.hamiltonian
    }

    pub fn reference(&self) -> &Statevector {
        &self.reference
    }

    pub fn ops(&self) -> &[PoolEntry] {
        &self.ops
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: PoolEntry, theta: f64) -> Result<()> {
        if op.n_qubits() != self.reference.n_qubits() {
            return Err(Error::SizeMismatch { expected: self.reference.n_qubits(), found: op.n_qubits() });
        }
        self.ops.push(op);
        self.params.push(theta);
        Ok(())
    }

    pub fn pop(&mut self) -> Option<(PoolEntry, f64)> {
        Some((self.ops.pop()?, self.params.pop()?))
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        self.check_len(params)?;
        self.params = params.to_vec();
        Ok(())
    }

    fn check_len(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.ops.len() {
            return Err(Error::ParameterLength { expected: self.ops.len(), found: theta.len() });
        }
        Ok(())
    }

    fn circuit(&self) -> Circuit<'_> {
        Circuit { h: &self.hamiltonian, start: &self.reference, ops: self.ops.iter().map(|o| o.rotations()).collect() }
    }

    /// Trial state at `theta`.
    pub fn state(&self, theta: &[f64]) -> Result<Statevector> {
        self.check_len(theta)?;
        Ok(self.circuit().state(theta))
    }

    pub fn current_state(&self) -> Statevector {
        self.circuit().state(&self.params)
    }

    pub fn energy(&self, theta: &[f64]) -> Result<f64> {
        self.check_len(theta)?;
        self.circuit().energy(theta)
    }

    pub fn current_energy(&self) -> Result<f64> {
        self.circuit().energy(&self.params)
    }

    pub fn gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_len(theta)?;
        Ok(self.circuit().energy_and_gradient(theta)?.1)
    }

    pub fn energy_and_gradient(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_len(theta)?;
        self.circuit().energy_and_gradient(theta)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptMode {
    /// Re-optimize every parameter.
    #[default]
    Full,
    /// Optimize only the most recently added parameter.
    Single,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimizeOptions {
    pub gtol: f64,
    /// Defaults to `10·n + 50` for `n` optimized parameters.
    pub max_iter: Option<usize>,
    pub mode: OptMode,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { gtol: 1e-7, max_iter: None, mode: OptMode::Full }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub energy: f64,
    pub params: Vec<f64>,
    pub n_objective_evals: usize,
    pub n_gradient_evals: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Largest component of the gradient over the optimized parameters.
    pub gradient_norm: f64,
}

/// Quasi-Newton minimization of the ansatz energy from `theta0`.
pub fn minimize(a: &AnsatzState, theta0: &[f64], opts: &MinimizeOptions) -> Result<VqeResult> {
    a.check_len(theta0)?;
    if opts.gtol.is_nan() || opts.gtol <= 0.0 {
        return Err(Error::Validation(format!("gtol must be positive, got {}", opts.gtol)));
    }
    match opts.mode {
        OptMode::Single if !a.is_empty() => {
            let k = a.len() - 1;
            let prefix = a.circuit().state(&theta0[..k]);
            let circuit = Circuit { h: &a.hamiltonian, start: &prefix, ops: vec![a.ops[k].rotations()] };
            let r = run_bfgs(&circuit, &theta0[k..], opts)?;
            let mut params = theta0.to_vec();
            params[k] = r.x[0];
            Ok(result(r, params))
        }
        _ => {
            let r = run_bfgs(&a.circuit(), theta0, opts)?;
            let params = r.x.clone();
            Ok(result(r, params))
        }
    }
}

/// Plain VQE over a whole pool: every entry in generation order, all
/// amplitudes starting at zero.
pub fn pool_vqe(
    h: &Arc<Hamiltonian>,
    pool: &OperatorPool,
    reference: &Statevector,
    opts: &MinimizeOptions,
) -> Result<(AnsatzState, VqeResult)> {
    let mut a = AnsatzState::new(h.clone(), reference.clone())?;
    for e in pool.entries() {
        a.push(e.clone(), 0.0)?;
    }
    let opts = MinimizeOptions { mode: OptMode::Full, ..*opts };
    let r = minimize(&a, &vec![0.0; a.len()], &opts)?;
    a.set_params(&r.params)?;
    Ok((a, r))
}

fn run_bfgs(c: &Circuit<'_>, x0: &[f64], opts: &MinimizeOptions) -> Result<BfgsResult> {
    let mut bo = BfgsOptions::for_dim(x0.len(), opts.gtol);
    if let Some(m) = opts.max_iter {
        bo.max_iter = m;
    }
    bfgs::minimize(c, x0, &bo)
}

fn result(r: BfgsResult, params: Vec<f64>) -> VqeResult {
    VqeResult {
        energy: r.f,
        params,
        n_objective_evals: r.n_evals,
        n_gradient_evals: r.n_evals,
        iterations: r.iterations,
        converged: r.converged,
        gradient_norm: r.grad_inf_norm,
    }
}
