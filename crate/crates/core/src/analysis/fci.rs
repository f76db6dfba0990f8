use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::IntegralSet;
use crate::simulator::{CompiledOperator, Statevector};
use crate::vqe::Hamiltonian;

/// Largest register accepted by the exact solver.
const MAX_QUBITS: usize = 16;
/// Sectors up to this dimension are diagonalized densely.
const DENSE_LIMIT: usize = 1200;
const KRYLOV_DIM: usize = 120;
const MAX_RESTARTS: usize = 60;
const RITZ_TOL: f64 = 1e-11;

/// Which block of the Hamiltonian to diagonalize.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sector {
    Full,
    /// Fixed electron number and, optionally, fixed `2 S_z = N_α − N_β`.
    Particles {
        n_electrons: usize,
        two_sz: Option<i32>,
    },
}

impl Sector {
    /// The closed- or open-shell sector the integrals describe.
    pub fn of(s: &IntegralSet) -> Self {
        Sector::Particles { n_electrons: s.n_electrons(), two_sz: Some(s.spin_2s()) }
    }

    fn contains(&self, b: usize) -> bool {
        match *self {
            Sector::Full => true,
            Sector::Particles { n_electrons, two_sz } => {
                let alpha = (b & 0x5555_5555_5555_5555usize).count_ones() as i32;
                let beta = (b & 0xAAAA_AAAA_AAAA_AAAAusize).count_ones() as i32;
                (alpha + beta) as usize == n_electrons && two_sz.is_none_or(|t| alpha - beta == t)
            }
        }
    }
}

/// Basis indices of a sector, ascending.
pub fn sector_basis(n_qubits: usize, sector: Sector) -> Vec<usize> {
    (0..1usize << n_qubits).filter(|&b| sector.contains(b)).collect()
}

#[derive(Clone, Debug)]
pub struct FciResult {
    pub energy: f64,
    pub state: Statevector,
    /// `‖Hv − Ev‖` on the full register.
    pub residual: f64,
    pub sector_dim: usize,
}

/// Lowest eigenpair of `h` restricted to `sector`.
pub fn fci_ground_state(h: &Hamiltonian, sector: Sector) -> Result<FciResult> {
    let n = h.n_qubits();
    if n > MAX_QUBITS {
        return Err(Error::Bounds(format!("{n} qubits exceed the exact-diagonalization limit of {MAX_QUBITS}")));
    }
    let basis = sector_basis(n, sector);
    if basis.is_empty() {
        return Err(Error::Domain(format!("sector {sector:?} is empty on {n} qubits")));
    }
    let mut index_of = vec![usize::MAX; 1 << n];
    for (i, &b) in basis.iter().enumerate() {
        index_of[b] = i;
    }
    let op = h.compiled();
    let (energy, coeffs) =
        if basis.len() <= DENSE_LIMIT { dense(op, &basis, &index_of) } else { lanczos(op, &basis, &index_of)? };
    let mut amps = vec![Complex64::default(); 1 << n];
    for (c, &b) in coeffs.iter().zip(&basis) {
        amps[b] = *c;
    }
    let mut state = Statevector::from_amplitudes(amps)?;
    state.normalize();
    let hv = h.apply(&state)?;
    let residual =
        hv.amplitudes().iter().zip(state.amplitudes()).map(|(a, v)| (a - v * energy).norm_sqr()).sum::<f64>().sqrt();
    Ok(FciResult { energy, state, residual, sector_dim: basis.len() })
}

fn dense(op: &CompiledOperator, basis: &[usize], index_of: &[usize]) -> (f64, Vec<Complex64>) {
    let d = basis.len();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for (j, &b) in basis.iter().enumerate() {
        for (t, c) in op.column(b) {
            let i = index_of[t];
            if i != usize::MAX {
                m[(i, j)] += c;
            }
        }
    }
    // Symmetrize away rounding so the Hermitian solver sees an exact Hermitian matrix.
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(m);
    let k = eig.eigenvalues.imin();
    (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect())
}

fn matvec(op: &CompiledOperator, basis: &[usize], index_of: &[usize], v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); v.len()];
    for (j, &b) in basis.iter().enumerate() {
        if v[j] == Complex64::default() {
            continue;
        }
        for (t, c) in op.column(b) {
            let i = index_of[t];
            if i != usize::MAX {
                out[i] += c * v[j];
            }
        }
    }
    out
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Restarted Lanczos with full reorthogonalization.
fn lanczos(op: &CompiledOperator, basis: &[usize], index_of: &[usize]) -> Result<(f64, Vec<Complex64>)> {
    let d = basis.len();
    let m = KRYLOV_DIM.min(d);
    // Deterministic start with overlap on every basis state.
    let mut start: Vec<Complex64> = (0..d).map(|i| Complex64::new(1.0 + 0.1 * (i as f64 * 0.7).sin(), 0.0)).collect();
    let mut best = (f64::INFINITY, start.clone());
    for _ in 0..MAX_RESTARTS {
        let n0 = norm(&start);
        start.iter_mut().for_each(|x| *x /= n0);
        let mut vs: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..m {
            let mut w = matvec(op, basis, index_of, &vs[j]);
            alpha.push(dot(&vs[j], &w).re);
            for _ in 0..2 {
                for v in &vs {
                    let c = dot(v, &w);
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            if j + 1 == m || b < 1e-12 {
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            vs.push(w);
        }
        let k = alpha.len();
        let t = DMatrix::from_fn(k, k, |i, j| match i.abs_diff(j) {
            0 => alpha[i],
            1 => beta[i.min(j)],
            _ => 0.0,
        });
        let eig = SymmetricEigen::new(t);
        let idx = eig.eigenvalues.imin();
        let theta = eig.eigenvalues[idx];
        let y: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
        let mut x = vec![Complex64::default(); d];
        for (v, &yk) in vs.iter().zip(y.iter()) {
            x.iter_mut().zip(v).for_each(|(a, b)| *a += b * yk);
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|a| *a /= nx);
        let hx = matvec(op, basis, index_of, &x);
        let res = hx.iter().zip(&x).map(|(a, b)| (a - b * theta).norm_sqr()).sum::<f64>().sqrt();
        best = (theta, x.clone());
        if res < RITZ_TOL {
            return Ok(best);
        }
        start = x;
    }
    log::warn!("Lanczos stopped at the restart limit");
    Ok(best)
}
