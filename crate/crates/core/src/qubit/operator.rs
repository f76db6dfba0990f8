use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;

use super::pauli::{parse_pauli_string, pauli_product, PauliString};
use crate::error::{Error, Result};

/// Global simplification floor for qubit-operator coefficients.
pub const SIMPLIFY_FLOOR: f64 = 1e-12;

/// Linear combination of Pauli strings on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitOperator {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl QubitOperator {
    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize, c: impl Into<Complex64>) -> Self {
        Self::from_term(PauliString::identity(n_qubits), c)
    }

    pub fn from_term(p: PauliString, c: impl Into<Complex64>) -> Self {
        let mut op = Self::zero(p.n_qubits());
        op.add_term(p, c.into()).expect("register sizes agree");
        op
    }

    /// Sums the given terms; duplicates merge.
    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = (PauliString, Complex64)>) -> Result<Self> {
        let mut op = Self::zero(n_qubits);
        for (p, c) in terms {
            op.add_term(p, c)?;
        }
        Ok(op)
    }

    pub fn add_term(&mut self, p: PauliString, c: Complex64) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, found: p.n_qubits() });
        }
        match self.terms.entry(p) {
            Entry::Vacant(v) => {
                if c != Complex64::default() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == Complex64::default() {
                    o.remove();
                }
            }
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical string order.
    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let terms = self.terms.iter().map(|(p, v)| (*p, v * c)).filter(|(_, v)| *v != Complex64::default());
        Self { n_qubits: self.n_qubits, terms: terms.collect() }
    }

    pub fn product(&self, rhs: &Self) -> Result<Self> {
        if self.n_qubits != rhs.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, found: rhs.n_qubits });
        }
        let mut out = Self::zero(self.n_qubits);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let (phase, p) = pauli_product(a, b)?;
                out.add_term(p, phase * ca * cb)?;
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let terms = self.terms.iter().map(|(p, c)| (*p, c.conj()));
        Self { n_qubits: self.n_qubits, terms: terms.collect() }
    }

    /// `[self, rhs]`
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        Ok(self.product(rhs)? - rhs.product(self)?)
    }

    /// Removes terms with `|c| < floor`. Duplicate strings are already merged
    /// by construction.
    pub fn simplify(&self, floor: f64) -> Self {
        let terms = self.terms.iter().filter(|(_, c)| c.norm() >= floor).map(|(p, c)| (*p, *c));
        Self { n_qubits: self.n_qubits, terms: terms.collect() }
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_real(&self) -> f64 {
        self.terms.values().map(|c| c.re.abs()).fold(0.0, f64::max)
    }

    /// Coefficient of the identity string.
    pub fn constant(&self) -> Complex64 {
        self.coefficient(&PauliString::identity(self.n_qubits))
    }

    /// Sum of `|c|` over all terms, a bound on the operator norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Parses the line-oriented `c * X0 Z1` notation produced by `Display`.
    pub fn parse(text: &str, n_qubits: usize) -> Result<Self> {
        let mut op = Self::zero(n_qubits);
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (coef, string) =
                line.split_once('*').ok_or_else(|| Error::Validation(format!("expected `c * P`, got {line:?}")))?;
            op.add_term(parse_pauli_string(string, n_qubits)?, parse_complex(coef.trim())?)?;
        }
        Ok(op)
    }
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::Validation(format!("bad coefficient {s:?}"));
    let s = s.trim_start_matches('(').trim_end_matches(')');
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not an exponent sign or the leading sign.
    let bytes = body.as_bytes();
    let split =
        (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            let im = body[k..].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                b => b.parse::<f64>().map_err(|_| bad())?,
            };
            Ok(Complex64::new(0.0, im))
        }
    }
}

fn format_complex(c: Complex64) -> String {
    match (c.re == 0.0, c.im == 0.0) {
        (_, true) => format!("{}", c.re),
        (true, false) => format!("{}i", c.im),
        (false, false) => format!("({}{:+}i)", c.re, c.im),
    }
}

impl fmt::Display for QubitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (p, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{} * {}", format_complex(*c), p)?;
        }
        Ok(())
    }
}

impl Add for QubitOperator {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        assert_eq!(self.n_qubits, rhs.n_qubits, "register size mismatch");
        for (p, c) in rhs.terms {
            self.add_term(p, c).expect("sizes checked");
        }
        self
    }
}

impl Sub for QubitOperator {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for QubitOperator {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}
