//! Dense reference implementations used by the integration tests. Nothing
//! here goes through the crate's Jordan–Wigner map or simulator: ladder
//! operators act directly on occupation-number bitstrings and Pauli strings
//! are built one tensor factor at a time.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use esvqe::fermion::FermionOperator;
use esvqe::integrals::{parse_fcidump, IntegralSet};
use esvqe::qubit::{Pauli, PauliString, QubitOperator};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ALL_FIXTURES: [&str; 10] =
    ["h2_0.74", "h4_0.90", "h4_1.20", "h4_1.60", "h4_2.00", "lih_1.20", "lih_1.60", "h6_1.00", "h6_1.50", "h2pbc_2.00"];

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub struct Fixture {
    pub name: String,
    pub integrals: IntegralSet,
    pub e_hf: f64,
    pub e_fci: f64,
    pub meta: serde_json::Value,
}

pub fn fixture(name: &str) -> Fixture {
    let dir = fixture_dir();
    let text = std::fs::read_to_string(dir.join(format!("{name}.fcidump"))).unwrap();
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap()).unwrap();
    Fixture {
        name: name.to_string(),
        integrals: parse_fcidump(&text).unwrap(),
        e_hf: meta["e_hf"].as_f64().unwrap(),
        e_fci: meta["e_fci"].as_f64().unwrap(),
        meta,
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Applies a ladder product (rightmost factor first) to an occupation
/// bitstring. `None` when the product annihilates the state.
fn ladder_on_basis(factors: &[esvqe::fermion::LadderOp], mut b: usize) -> Option<(f64, usize)> {
    let mut sign = 1.0;
    for f in factors.iter().rev() {
        let bit = 1usize << f.mode;
        let occupied = b & bit != 0;
        if occupied == f.creation {
            return None;
        }
        if (b & (bit - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        b ^= bit;
    }
    Some((sign, b))
}

pub fn fermion_matrix(f: &FermionOperator, n_modes: usize) -> CMat {
    let dim = 1usize << n_modes;
    let mut m = CMat::zeros(dim, dim);
    for (factors, coef) in f.iter() {
        for b in 0..dim {
            if let Some((s, out)) = ladder_on_basis(factors, b) {
                m[(out, b)] += coef * s;
            }
        }
    }
    m
}

fn single_qubit(p: Pauli) -> CMat {
    let i = Complex64::i();
    match p {
        Pauli::I => CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(1.0)]),
        Pauli::X => CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        Pauli::Y => CMat::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]),
        Pauli::Z => CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
    }
}

/// Kronecker product with qubit 0 as the least significant index.
pub fn pauli_matrix(p: &PauliString) -> CMat {
    let mut m = CMat::from_element(1, 1, c(1.0));
    for q in 0..p.n_qubits() {
        m = single_qubit(p.get(q)).kronecker(&m);
    }
    m
}

pub fn qubit_matrix(q: &QubitOperator) -> CMat {
    let dim = 1usize << q.n_qubits();
    let mut m = CMat::zeros(dim, dim);
    for (p, coef) in q.iter() {
        m += pauli_matrix(p) * *coef;
    }
    m
}

pub fn number_operator(n_modes: usize) -> CMat {
    let dim = 1usize << n_modes;
    CMat::from_diagonal(&CVec::from_fn(dim, |b, _| c(b.count_ones() as f64)))
}

/// `2·S_z` for interleaved spin ordering (even modes alpha).
pub fn two_sz_operator(n_modes: usize) -> CMat {
    let dim = 1usize << n_modes;
    let alpha: usize = (0..n_modes).step_by(2).map(|k| 1 << k).sum();
    CMat::from_diagonal(&CVec::from_fn(dim, |b, _| {
        let na = (b & alpha).count_ones() as f64;
        let nb = (b & !alpha).count_ones() as f64;
        c(na - nb)
    }))
}

pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let e = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&k| e.eigenvalues[k]).collect();
    let vecs = CMat::from_columns(&idx.iter().map(|&k| e.eigenvectors.column(k).into_owned()).collect::<Vec<_>>());
    (vals, vecs)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn to_cvec(amps: &[Complex64]) -> CVec {
    CVec::from_column_slice(amps)
}

/// Random real symmetric integrals over `n` spatial orbitals with 8-fold
/// two-body symmetry; complex ones get the 4-fold Hermitian symmetry.
pub fn random_integrals(n: usize, n_electrons: usize, complex: bool, rng: &mut impl rand::Rng) -> IntegralSet {
    let e_nuc = rng.random_range(0.0..1.0);
    let mut s = IntegralSet::new(n, n_electrons, 0, e_nuc).unwrap();
    s.set_complex(complex).unwrap();
    let mut draw = |scale: f64| {
        let re = scale * (rng.random::<f64>() - 0.5);
        let im = if complex { scale * (rng.random::<f64>() - 0.5) } else { 0.0 };
        Complex64::new(re, im)
    };
    for p in 0..n {
        for q in 0..=p {
            let mut v = draw(1.0);
            if p == q {
                v.im = 0.0;
            }
            s.set_one_body(p, q, v).unwrap();
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for t in 0..n {
                    if s.two_body(p, q, r, t) != Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut v = draw(0.5);
                    if (p == q && r == t) || (p == t && q == r) {
                        v.im = 0.0;
                    }
                    s.set_two_body(p, q, r, t, v).unwrap();
                }
            }
        }
    }
    s.validate().unwrap();
    s
}
