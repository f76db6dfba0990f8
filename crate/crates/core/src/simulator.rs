//! Dense statevector engine.
//!
//! Basis index bit `k` is the occupation of qubit (spin-orbital) `k`.
//! Operations that mutate in place take `&mut self`; functional variants
//! return a fresh state.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qubit::{i_pow, PauliString, QubitOperator};

/// Largest real part tolerated in a generator coefficient.
pub const CONTRACT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > 30 {
            return Err(Error::Bounds(format!("{n_qubits} qubits exceed the dense simulator")));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Bounds(format!("basis index {index} outside dimension {dim}")));
        }
        let mut amps = vec![Complex64::default(); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Reference determinant with spin-orbitals `0..n_electrons` occupied.
    pub fn hf_state(n_qubits: usize, n_electrons: usize) -> Result<Self> {
        if n_electrons > n_qubits {
            return Err(Error::Bounds(format!("{n_electrons} electrons on {n_qubits} qubits")));
        }
        Self::basis(n_qubits, (1usize << n_electrons) - 1)
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() {
            return Err(Error::Validation(format!("{dim} amplitudes is not a power of two")));
        }
        Ok(Self { n_qubits: dim.trailing_zeros() as usize, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn check(&self, n_qubits: usize) -> Result<()> {
        if n_qubits != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, found: n_qubits });
        }
        Ok(())
    }

    /// In-place `ψ ← exp(i·angle·P) ψ = cos(angle) ψ + i sin(angle) P ψ`.
    pub fn rotate(&mut self, p: &PauliString, angle: f64) -> Result<()> {
        self.check(p.n_qubits())?;
        rotate_unchecked(&mut self.amps, p, angle);
        Ok(())
    }

    pub fn apply_pauli_rotation(&self, p: &PauliString, angle: f64) -> Result<Self> {
        let mut out = self.clone();
        out.rotate(p, angle)?;
        Ok(out)
    }

    /// Single-step Trotter product `Π_j exp(i θ c_j P_j)` of an anti-Hermitian
    /// generator `Σ_j i c_j P_j`, applied in canonical string order.
    pub fn apply_generator(&self, g: &QubitOperator, theta: f64) -> Result<Self> {
        let rotations = generator_rotations(g)?;
        self.check(g.n_qubits())?;
        let mut out = self.clone();
        out.apply_rotations(&rotations, theta);
        Ok(out)
    }

    /// Applies precomputed `(P_j, c_j)` rotations scaled by `theta`.
    pub fn apply_rotations(&mut self, rotations: &[(PauliString, f64)], theta: f64) {
        for (p, c) in rotations {
            debug_assert_eq!(p.n_qubits(), self.n_qubits);
            rotate_unchecked(&mut self.amps, p, theta * c);
        }
    }

    /// `(Σ c_k P_k) ψ`
    pub fn apply_qubit_operator(&self, q: &QubitOperator) -> Result<Self> {
        self.check(q.n_qubits())?;
        let mut out = vec![Complex64::default(); self.dim()];
        for (p, c) in q.iter() {
            accumulate_pauli(&mut out, &self.amps, p, *c);
        }
        Ok(Self { n_qubits: self.n_qubits, amps: out })
    }

    /// `⟨ψ|q|ψ⟩`
    pub fn expectation(&self, q: &QubitOperator) -> Result<Complex64> {
        self.check(q.n_qubits())?;
        Ok(q.iter().map(|(p, c)| c * pauli_matrix_element(&self.amps, &self.amps, p)).sum())
    }
}

/// `(P_j, c_j)` pairs of a generator whose coefficients are all `i·c_j`.
pub fn generator_rotations(g: &QubitOperator) -> Result<Vec<(PauliString, f64)>> {
    g.iter()
        .map(|(p, c)| {
            if c.re.abs() > CONTRACT_TOL {
                Err(Error::Contract(format!(
                    "generator term {p} has coefficient {c}; expected a purely imaginary value"
                )))
            } else {
                Ok((*p, c.im))
            }
        })
        .collect()
}

fn rotate_unchecked(amps: &mut [Complex64], p: &PauliString, angle: f64) {
    if angle == 0.0 {
        return;
    }
    let (s, c) = angle.sin_cos();
    let x = p.x_mask() as usize;
    let z = p.z_mask() as usize;
    // i·sin·i^{ny}: the ±1 parity sign is applied per amplitude.
    let base = Complex64::new(0.0, s) * i_pow(p.y_count() as u32);
    let parity = |b: usize| if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
    if x == 0 {
        for (b, a) in amps.iter_mut().enumerate() {
            *a *= c + base * parity(b);
        }
        return;
    }
    let high = 1usize << (usize::BITS - 1 - x.leading_zeros());
    for b in 0..amps.len() {
        if b & high != 0 {
            continue;
        }
        let b2 = b ^ x;
        let (a1, a2) = (amps[b], amps[b2]);
        // P|b⟩ = base·parity(b)|b2⟩ / i sin, P|b2⟩ = …|b⟩
        amps[b2] = a2 * c + base * parity(b) * a1;
        amps[b] = a1 * c + base * parity(b2) * a2;
    }
}

/// `out += c · P · amps`
fn accumulate_pauli(out: &mut [Complex64], amps: &[Complex64], p: &PauliString, c: Complex64) {
    let x = p.x_mask() as usize;
    let z = p.z_mask() as usize;
    let phase = c * i_pow(p.y_count() as u32);
    for (b, a) in amps.iter().enumerate() {
        if *a == Complex64::default() {
            continue;
        }
        let sign = if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[b ^ x] += phase * sign * a;
    }
}

/// `⟨bra|P|ket⟩`
pub(crate) fn pauli_matrix_element(bra: &[Complex64], ket: &[Complex64], p: &PauliString) -> Complex64 {
    let x = p.x_mask() as usize;
    let z = p.z_mask() as usize;
    let mut acc = Complex64::default();
    for (b, a) in ket.iter().enumerate() {
        let term = bra[b ^ x].conj() * a;
        if (b & z).count_ones() % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    acc * i_pow(p.y_count() as u32)
}

/// Entries above which per-basis coefficient tables are not precomputed.
const TABLE_BUDGET: usize = 1 << 23;

/// A qubit operator prepared for repeated application to statevectors.
///
/// Terms are grouped by X mask; every group acts as `|b⟩ ↦ d_x(b) |b ^ x⟩`.
/// When memory allows, `d_x(b)` is tabulated once per basis state.
#[derive(Clone, Debug)]
pub struct CompiledOperator {
    n_qubits: usize,
    groups: Vec<Group>,
}

#[derive(Clone, Debug)]
struct Group {
    x: usize,
    terms: Vec<(usize, Complex64)>,
    table: Option<Vec<Complex64>>,
}

impl Group {
    #[inline]
    fn coefficient(&self, b: usize) -> Complex64 {
        match &self.table {
            Some(t) => t[b],
            None => self.terms.iter().map(|&(z, c)| if (b & z).count_ones() % 2 == 1 { -c } else { c }).sum(),
        }
    }
}

impl CompiledOperator {
    pub fn new(q: &QubitOperator) -> Self {
        let n = q.n_qubits();
        let mut groups: Vec<Group> = Vec::new();
        for (p, c) in q.iter() {
            let x = p.x_mask() as usize;
            let term = (p.z_mask() as usize, c * i_pow(p.y_count() as u32));
            // Terms arrive sorted by x, so groups are contiguous.
            match groups.last_mut() {
                Some(g) if g.x == x => g.terms.push(term),
                _ => groups.push(Group { x, terms: vec![term], table: None }),
            }
        }
        let dim = 1usize << n;
        if groups.len().saturating_mul(dim) <= TABLE_BUDGET {
            for g in &mut groups {
                let table = (0..dim).map(|b| g.coefficient(b)).collect();
                g.table = Some(table);
            }
        }
        Self { n_qubits: n, groups }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn apply(&self, psi: &Statevector) -> Result<Statevector> {
        psi.check(self.n_qubits)?;
        let mut out = vec![Complex64::default(); psi.dim()];
        self.apply_into(psi.amplitudes(), &mut out);
        Ok(Statevector { n_qubits: self.n_qubits, amps: out })
    }

    /// `out = O · amps`
    pub fn apply_into(&self, amps: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::default());
        for g in &self.groups {
            for (b, a) in amps.iter().enumerate() {
                out[b ^ g.x] += g.coefficient(b) * a;
            }
        }
    }

    pub fn expectation(&self, psi: &Statevector) -> Result<Complex64> {
        psi.check(self.n_qubits)?;
        let amps = psi.amplitudes();
        let mut acc = Complex64::default();
        for g in &self.groups {
            for (b, a) in amps.iter().enumerate() {
                acc += amps[b ^ g.x].conj() * g.coefficient(b) * a;
            }
        }
        Ok(acc)
    }

    /// Nonzero entries `(b', ⟨b'|O|b⟩)` of column `b`.
    pub fn column(&self, b: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.groups.iter().map(move |g| (b ^ g.x, g.coefficient(b))).filter(|(_, c)| *c != Complex64::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::parse_pauli_string;

    fn ps(t: &str, n: usize) -> PauliString {
        parse_pauli_string(t, n).unwrap()
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn hf_state_indices() {
        let s = Statevector::hf_state(4, 2).unwrap();
        assert_eq!(s.amplitudes()[3], Complex64::new(1.0, 0.0));
        assert_eq!(Statevector::hf_state(5, 0).unwrap().amplitudes()[0], Complex64::new(1.0, 0.0));
        let s = Statevector::hf_state(12, 4).unwrap();
        assert_eq!(s.amplitudes()[15], Complex64::new(1.0, 0.0));
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert!(Statevector::hf_state(2, 3).is_err());
    }

    #[test]
    fn z_rotation_is_a_phase() {
        let t = 0.37;
        let s = Statevector::basis(1, 0).unwrap().apply_pauli_rotation(&ps("Z0", 1), t).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::from_polar(1.0, t)));
        assert!(close(s.amplitudes()[1], Complex64::default()));
    }

    #[test]
    fn x_rotation() {
        let t = 0.37;
        let s = Statevector::basis(1, 0).unwrap().apply_pauli_rotation(&ps("X0", 1), t).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::new(t.cos(), 0.0)));
        assert!(close(s.amplitudes()[1], Complex64::new(0.0, t.sin())));
    }

    #[test]
    fn size_mismatch_errors() {
        let s = Statevector::basis(2, 0).unwrap();
        assert!(matches!(s.apply_pauli_rotation(&ps("X0", 1), 0.1), Err(Error::SizeMismatch { .. })));
        let q = QubitOperator::identity(3, 1.0);
        assert!(s.expectation(&q).is_err());
        assert!(s.apply_qubit_operator(&q).is_err());
    }

    #[test]
    fn zero_angle_is_identity() {
        let g = QubitOperator::parse("0.5i * Y0 Z1 X2\n-0.5i * X0 Z1 Y2", 3).unwrap();
        let s = Statevector::basis(3, 1).unwrap();
        assert_eq!(s.apply_generator(&g, 0.0).unwrap(), s);
    }

    #[test]
    fn hermitian_generator_is_rejected() {
        let g = QubitOperator::parse("0.5 * X0", 1).unwrap();
        let s = Statevector::basis(1, 0).unwrap();
        assert!(matches!(s.apply_generator(&g, 0.1), Err(Error::Contract(_))));
    }

    #[test]
    fn projector_action() {
        let proj = QubitOperator::parse("0.5 * I\n-0.5 * Z0", 1).unwrap();
        let one = Statevector::basis(1, 1).unwrap();
        assert_eq!(one.apply_qubit_operator(&proj).unwrap(), one);
        let zero = Statevector::basis(1, 0).unwrap().apply_qubit_operator(&proj).unwrap();
        assert!(zero.norm() == 0.0);
        let id = QubitOperator::identity(1, 1.0);
        assert_eq!(one.apply_qubit_operator(&id).unwrap(), one);
    }

    #[test]
    fn expectation_basics() {
        let z = QubitOperator::parse("1 * Z0", 1).unwrap();
        assert_eq!(Statevector::basis(1, 0).unwrap().expectation(&z).unwrap(), Complex64::new(1.0, 0.0));
        let mut s = Statevector::from_amplitudes(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]).unwrap();
        s.normalize();
        let id = QubitOperator::identity(1, 1.0);
        assert!(close(s.expectation(&id).unwrap(), Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn compiled_matches_direct() {
        let q =
            QubitOperator::parse("0.3 * I\n-0.2 * Z0 Z2\n0.1 * X0 X1\n0.25 * Y1 Y2\n(0.1+0.2i) * X2 Z0", 3).unwrap();
        let amps = (0..8).map(|k| Complex64::new((k as f64).sin(), (k as f64 * 0.7).cos())).collect();
        let mut psi = Statevector::from_amplitudes(amps).unwrap();
        psi.normalize();
        let compiled = CompiledOperator::new(&q);
        let a = compiled.apply(&psi).unwrap();
        let b = psi.apply_qubit_operator(&q).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!(close(*x, *y));
        }
        assert!(close(compiled.expectation(&psi).unwrap(), psi.expectation(&q).unwrap()));
    }
}
