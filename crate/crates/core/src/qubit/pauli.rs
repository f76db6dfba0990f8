use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis on a register of `n_qubits`.
///
/// Stored in symplectic form: bit `k` of `x` / `z` marks an X / Z component on
/// qubit `k`, and a qubit with both bits set carries Y. As an operator the
/// string equals `i^{|x & z|} X^x Z^z`, so Y = iXZ qubit by qubit.
///
/// The derived ordering (register size, then `x`, then `z` as integers) is the
/// canonical order used wherever a sequence of strings must be fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits are supported");
        Self { n_qubits, x: 0, z: 0 }
    }

    pub fn from_masks(n_qubits: usize, x: u64, z: u64) -> Result<Self> {
        let s = Self::identity(n_qubits);
        let limit = if n_qubits == 64 { u64::MAX } else { (1u64 << n_qubits) - 1 };
        if (x | z) & !limit != 0 {
            return Err(Error::Bounds(format!("Pauli mask exceeds {n_qubits} qubits")));
        }
        Ok(Self { x, z, ..s })
    }

    /// Builds a string from `(qubit, pauli)` pairs; later pairs on the same qubit overwrite earlier ones.
    pub fn from_ops(n_qubits: usize, ops: impl IntoIterator<Item = (usize, Pauli)>) -> Result<Self> {
        let mut s = Self::identity(n_qubits);
        for (q, p) in ops {
            s = s.with(q, p)?;
        }
        Ok(s)
    }

    pub fn with(mut self, qubit: usize, p: Pauli) -> Result<Self> {
        if qubit >= self.n_qubits {
            return Err(Error::Bounds(format!("qubit {qubit} outside a {}-qubit register", self.n_qubits)));
        }
        let bit = 1u64 << qubit;
        let (x, z) = p.bits();
        self.x = (self.x & !bit) | if x { bit } else { 0 };
        self.z = (self.z & !bit) | if z { bit } else { 0 };
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    /// Non-identity factors in ascending qubit order.
    pub fn ops(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        let support = self.x | self.z;
        (0..self.n_qubits).filter(move |q| support >> q & 1 == 1).map(|q| (q, self.get(q)))
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn y_count(&self) -> usize {
        (self.x & self.z).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Action on a basis state: `P|b⟩ = phase · |b ^ x⟩`.
    pub fn apply_to_basis(&self, b: u64) -> (Complex64, u64) {
        let sign = if (b & self.z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        (i_pow(self.y_count() as u32) * sign, b ^ self.x)
    }
}

/// `i^k`
pub fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `a · b = phase · P` with `phase ∈ {±1, ±i}`.
pub fn pauli_product(a: &PauliString, b: &PauliString) -> Result<(Complex64, PauliString)> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::SizeMismatch { expected: a.n_qubits, found: b.n_qubits });
    }
    let x = a.x ^ b.x;
    let z = a.z ^ b.z;
    // i^{ya} X^{xa} Z^{za} · i^{yb} X^{xb} Z^{zb}: moving Z^{za} past X^{xb} costs (-1)^{|za & xb|}.
    let ya = a.y_count() as u32;
    let yb = b.y_count() as u32;
    let yc = (x & z).count_ones();
    let swaps = (a.z & b.x).count_ones();
    let k = (ya + yb + 4 * 64 - yc + 2 * swaps) % 4;
    Ok((i_pow(k), PauliString { n_qubits: a.n_qubits, x, z }))
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for (q, p) in self.ops() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}{}", p.symbol(), q)?;
            first = false;
        }
        Ok(())
    }
}

/// Parses `X0 Z1 Y4` (or `I`) into a string on a register of the given size.
pub fn parse_pauli_string(text: &str, n_qubits: usize) -> Result<PauliString> {
    let mut s = PauliString::identity(n_qubits);
    for tok in text.split_whitespace() {
        if tok == "I" {
            continue;
        }
        let (head, idx) = tok.split_at(1);
        let p = Pauli::from_str(head)?;
        let q: usize = idx.parse().map_err(|_| Error::Validation(format!("bad Pauli factor {tok:?}")))?;
        s = s.with(q, p)?;
    }
    Ok(s)
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(Pauli::I),
            "X" => Ok(Pauli::X),
            "Y" => Ok(Pauli::Y),
            "Z" => Ok(Pauli::Z),
            _ => Err(Error::Validation(format!("unknown Pauli {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(text: &str, n: usize) -> PauliString {
        parse_pauli_string(text, n).unwrap()
    }

    #[test]
    fn products() {
        let (c, p) = pauli_product(&ps("X0", 1), &ps("Y0", 1)).unwrap();
        assert_eq!((c, p), (Complex64::i(), ps("Z0", 1)));
        let (c, p) = pauli_product(&ps("Z0", 1), &ps("Z0", 1)).unwrap();
        assert_eq!((c, p), (Complex64::new(1.0, 0.0), PauliString::identity(1)));
        let (c, p) = pauli_product(&ps("X0 Z1", 2), &ps("Y0 Z1", 2)).unwrap();
        assert_eq!((c, p), (Complex64::i(), ps("Z0", 2)));
        let (c, p) = pauli_product(&ps("Y0", 1), &ps("X0", 1)).unwrap();
        assert_eq!((c, p), (-Complex64::i(), ps("Z0", 1)));
    }

    #[test]
    fn size_mismatch() {
        assert!(matches!(pauli_product(&ps("X0", 1), &ps("X0", 2)), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn display_round_trip() {
        let s = ps("X0 Z1 Y4", 5);
        assert_eq!(s.to_string(), "X0 Z1 Y4");
        assert_eq!(s.weight(), 3);
        assert_eq!(PauliString::identity(3).to_string(), "I");
        assert!(parse_pauli_string("X7", 3).is_err());
    }

    #[test]
    fn basis_action() {
        // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
        let y = ps("Y0", 1);
        assert_eq!(y.apply_to_basis(0), (Complex64::i(), 1));
        assert_eq!(y.apply_to_basis(1), (-Complex64::i(), 0));
        assert_eq!(ps("Z0", 1).apply_to_basis(1), (Complex64::new(-1.0, 0.0), 1));
    }
}
