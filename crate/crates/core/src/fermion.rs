//! Second-quantized operators over spin-orbitals.
//!
//! Spin-orbitals are interleaved: index `2k` is the alpha and `2k + 1` the
//! beta spin-orbital of spatial orbital `k`. Factor lists are written left to
//! right and act on a state right to left, as in `a†_2 a_0`.
//!
//! There is no normal-ordering engine. The canonical form of an operator is
//! its term map keyed by factor sequence, with coefficients of identical
//! sequences merged.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrals::IntegralSet;

/// Coefficients below this magnitude are discarded.
const ZERO: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LadderOp {
    pub mode: usize,
    pub creation: bool,
}

impl LadderOp {
    pub fn create(mode: usize) -> Self {
        Self { mode, creation: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self { mode, creation: false }
    }

    pub fn dagger(self) -> Self {
        Self { mode: self.mode, creation: !self.creation }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderTerm {
    pub factors: Vec<LadderOp>,
    pub coefficient: Complex64,
}

/// Spin-orbital index of `spatial` orbital with spin `spin` (0 = alpha).
pub fn spin_orbital(spatial: usize, spin: usize) -> usize {
    2 * spatial + spin
}

/// Spin (0 = alpha, 1 = beta) of a spin-orbital.
pub fn spin_of(mode: usize) -> usize {
    mode % 2
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FermionOperator {
    terms: BTreeMap<Vec<LadderOp>, Complex64>,
}

impl FermionOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity(c: impl Into<Complex64>) -> Self {
        Self::term(Vec::new(), c)
    }

    pub fn term(factors: Vec<LadderOp>, c: impl Into<Complex64>) -> Self {
        let mut op = Self::zero();
        op.add_term(factors, c.into());
        op
    }

    /// `a†_p a_q`
    pub fn hopping(p: usize, q: usize) -> Self {
        Self::term(vec![LadderOp::create(p), LadderOp::annihilate(q)], 1.0)
    }

    pub fn add_term(&mut self, factors: Vec<LadderOp>, c: Complex64) {
        match self.terms.entry(factors) {
            Entry::Vacant(v) => {
                if c.norm() >= ZERO {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().norm() < ZERO {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = LadderTerm> + '_ {
        self.terms.iter().map(|(f, &c)| LadderTerm { factors: f.clone(), coefficient: c })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[LadderOp], Complex64)> {
        self.terms.iter().map(|(f, &c)| (f.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest mode index plus one.
    pub fn n_modes(&self) -> usize {
        self.terms.keys().flatten().map(|f| f.mode + 1).max().unwrap_or(0)
    }

    /// Hermitian conjugate: reversed factor lists, flipped creation flags,
    /// conjugated coefficients.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (factors, c) in &self.terms {
            let f = factors.iter().rev().map(|op| op.dagger()).collect();
            out.add_term(f, c.conj());
        }
        out
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let mut out = Self::zero();
        for (f, v) in &self.terms {
            out.add_term(f.clone(), v * c);
        }
        out
    }

    /// Operator product (factor concatenation).
    pub fn product(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (fa, ca) in &self.terms {
            for (fb, cb) in &rhs.terms {
                let mut f = fa.clone();
                f.extend_from_slice(fb);
                out.add_term(f, ca * cb);
            }
        }
        out
    }

    /// Termwise comparison of canonical forms.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let diff = self.clone() - other.clone();
        diff.terms.values().all(|c| c.norm() <= tol)
    }

    /// True when the operator equals its adjoint termwise.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&self.adjoint(), tol)
    }

    /// True when the adjoint equals the negated operator termwise.
    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&-self.adjoint(), tol)
    }
}

impl Add for FermionOperator {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        for (f, c) in rhs.terms {
            self.add_term(f, c);
        }
        self
    }
}

impl Sub for FermionOperator {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for FermionOperator {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul<Complex64> for FermionOperator {
    type Output = Self;

    fn mul(self, rhs: Complex64) -> Self {
        self.scale(rhs)
    }
}

impl fmt::Display for FermionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (factors, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "({:+e}{:+e}i)", c.re, c.im)?;
            for op in factors {
                let dag = if op.creation { "^" } else { "" };
                write!(f, " a{}{}", op.mode, dag)?;
            }
        }
        Ok(())
    }
}

/// Spin-orbital Hamiltonian
/// `H = Σ h_pq a†_p a_q + ½ Σ (pq|rs) a†_{pσ} a†_{rτ} a_{sτ} a_{qσ} + E_nuc`.
///
/// The chemists' integral `(pq|rs)` couples electron 1 in `p,q` and
/// electron 2 in `r,s`; terms that create or annihilate the same
/// spin-orbital twice vanish and are omitted.
pub fn build_hamiltonian(s: &IntegralSet) -> FermionOperator {
    let n = s.n_orbitals();
    let mut h = FermionOperator::zero();
    if s.e_nuclear() != 0.0 {
        h.add_term(Vec::new(), Complex64::new(s.e_nuclear(), 0.0));
    }
    for p in 0..n {
        for q in 0..n {
            let v = s.one_body(p, q);
            if v.norm() == 0.0 {
                continue;
            }
            for sigma in 0..2 {
                let f = vec![LadderOp::create(spin_orbital(p, sigma)), LadderOp::annihilate(spin_orbital(q, sigma))];
                h.add_term(f, v);
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for t in 0..n {
                    let v = s.two_body(p, q, r, t);
                    if v.norm() == 0.0 {
                        continue;
                    }
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            let (ps, qs) = (spin_orbital(p, sigma), spin_orbital(q, sigma));
                            let (rt, ts) = (spin_orbital(r, tau), spin_orbital(t, tau));
                            if ps == rt || qs == ts {
                                continue;
                            }
                            let f = vec![
                                LadderOp::create(ps),
                                LadderOp::create(rt),
                                LadderOp::annihilate(ts),
                                LadderOp::annihilate(qs),
                            ];
                            h.add_term(f, 0.5 * v);
                        }
                    }
                }
            }
        }
    }
    h
}

/// `T = a†_{c0} a†_{c1} … a_{a0} a_{a1} …` in written order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Excitation {
    pub creators: Vec<usize>,
    pub annihilators: Vec<usize>,
}

impl Excitation {
    pub fn single(p: usize, q: usize) -> Self {
        Self { creators: vec![p], annihilators: vec![q] }
    }

    /// `a†_p a†_q a_r a_s`
    pub fn double(p: usize, q: usize, r: usize, s: usize) -> Self {
        Self { creators: vec![p, q], annihilators: vec![r, s] }
    }

    pub fn rank(&self) -> usize {
        self.creators.len()
    }

    /// Repeated creators or repeated annihilators make the product vanish.
    pub fn has_repeated_index(&self) -> bool {
        let dup = |v: &[usize]| v.iter().enumerate().any(|(i, a)| v[..i].contains(a));
        dup(&self.creators) || dup(&self.annihilators)
    }

    /// Net change in the number of alpha electrons.
    pub fn alpha_change(&self) -> i64 {
        let count = |v: &[usize]| v.iter().filter(|&&m| spin_of(m) == 0).count() as i64;
        count(&self.creators) - count(&self.annihilators)
    }

    pub fn to_operator(&self) -> FermionOperator {
        let factors = self
            .creators
            .iter()
            .map(|&m| LadderOp::create(m))
            .chain(self.annihilators.iter().map(|&m| LadderOp::annihilate(m)))
            .collect();
        FermionOperator::term(factors, 1.0)
    }

    pub fn max_mode(&self) -> usize {
        self.creators.iter().chain(&self.annihilators).copied().max().unwrap_or(0)
    }
}

/// How a weighted sum of excitations `T = Σ w_k T_k` becomes a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorForm {
    /// `T − T†`
    AntiHermitian,
    /// `i(T + T†)`
    Auxiliary,
}

/// Builds the generator of a weighted excitation sum. The result `G`
/// always satisfies `G† = −G`.
pub fn excitation_generator(components: &[(f64, Excitation)], form: GeneratorForm) -> Result<FermionOperator> {
    let mut t = FermionOperator::zero();
    for (w, ex) in components {
        if ex.creators.len() != ex.annihilators.len() || ex.creators.is_empty() {
            return Err(Error::InvalidEntry(format!("unbalanced excitation {ex:?}")));
        }
        if ex.has_repeated_index() {
            return Err(Error::InvalidEntry(format!("repeated index in excitation {ex:?}")));
        }
        t = t + ex.to_operator().scale(*w);
    }
    let g = match form {
        GeneratorForm::AntiHermitian => t.clone() - t.adjoint(),
        GeneratorForm::Auxiliary => (t.clone() + t.adjoint()).scale(Complex64::i()),
    };
    Ok(g)
}
