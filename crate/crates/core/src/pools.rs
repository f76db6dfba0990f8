//! Candidate generator pools: UCCSD, UCCGSD, QCC, and auxiliary extensions.
//!
//! Every entry caches the Jordan–Wigner image of its anti-Hermitian generator
//! together with the rotation list `(P_j, c_j)` used by the simulator, so no
//! downstream stage maps operators again.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{excitation_generator, spin_orbital, Excitation, FermionOperator, GeneratorForm};
use crate::integrals::IntegralSet;
use crate::qubit::{jordan_wigner, Pauli, PauliString, QubitOperator, SIMPLIFY_FLOOR};
use crate::simulator::generator_rotations;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Single,
    Double,
    Gsingle,
    Gdouble,
    AuxSingle,
    AuxDouble,
    Pauli,
}

impl EntryKind {
    pub fn name(self) -> &'static str {
        match self {
            EntryKind::Single => "single",
            EntryKind::Double => "double",
            EntryKind::Gsingle => "gsingle",
            EntryKind::Gdouble => "gdouble",
            EntryKind::AuxSingle => "aux_single",
            EntryKind::AuxDouble => "aux_double",
            EntryKind::Pauli => "pauli",
        }
    }

    fn auxiliary(self) -> Option<Self> {
        match self {
            EntryKind::Single | EntryKind::Gsingle => Some(EntryKind::AuxSingle),
            EntryKind::Double | EntryKind::Gdouble => Some(EntryKind::AuxDouble),
            _ => None,
        }
    }

    fn form(self) -> GeneratorForm {
        match self {
            EntryKind::AuxSingle | EntryKind::AuxDouble => GeneratorForm::Auxiliary,
            _ => GeneratorForm::AntiHermitian,
        }
    }
}

/// How spatial-orbital excitations are combined into pool entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolConvention {
    /// Spin-summed generators over spatial orbitals. Singles are
    /// `E_pq − E_qp` with `E_pq = Σ_σ a†_pσ a_qσ`; doubles couple a creator
    /// pair type `(a ≥ b)` with an annihilator pair type `(i ≥ j)` through
    /// the two spin couplings
    /// `T1 = Σ_στ a†_aσ a†_bτ a_jτ a_iσ` and, when `a ≠ b` and `i ≠ j`,
    /// `T2 = Σ_στ a†_aσ a†_bτ a_iτ a_jσ`.
    #[default]
    SpinAdapted,
    /// One entry per spin-conserving spin-orbital excitation.
    SpinOrbital,
}

impl PoolConvention {
    pub fn name(self) -> &'static str {
        match self {
            PoolConvention::SpinAdapted => "spin-adapted",
            PoolConvention::SpinOrbital => "spin-orbital",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolFamily {
    Uccsd,
    Uccgsd,
    Qcc,
    Aux,
}

/// One candidate generator.
#[derive(Clone, Debug, PartialEq)]
pub struct PoolEntry {
    kind: EntryKind,
    /// Weighted excitations whose sum is `T`; empty for Pauli entries.
    components: Vec<(f64, Excitation)>,
    pauli: Option<PauliString>,
    generation_order: usize,
    label: String,
    qubit_image: QubitOperator,
    rotations: Vec<(PauliString, f64)>,
}

impl PoolEntry {
    /// Fermionic entry; the generator is built and mapped immediately.
    pub fn fermionic(
        kind: EntryKind,
        components: Vec<(f64, Excitation)>,
        n_qubits: usize,
        generation_order: usize,
        label: impl Into<String>,
    ) -> Result<Self> {
        if kind == EntryKind::Pauli {
            return Err(Error::InvalidEntry("Pauli entries carry no excitations".into()));
        }
        let g = excitation_generator(&components, kind.form())?;
        let qubit_image = jordan_wigner(&g, n_qubits)?;
        let rotations = generator_rotations(&qubit_image)?;
        Ok(Self { kind, components, pauli: None, generation_order, label: label.into(), qubit_image, rotations })
    }

    /// Entry with generator `i·P`.
    pub fn pauli(p: PauliString, generation_order: usize) -> Self {
        let qubit_image = QubitOperator::from_term(p, Complex64::i());
        Self {
            kind: EntryKind::Pauli,
            components: Vec::new(),
            pauli: Some(p),
            generation_order,
            label: p.to_string(),
            qubit_image,
            rotations: vec![(p, 1.0)],
        }
    }

    pub fn kind(&self) -> EntryKind {
        self.kind
    }

    pub fn components(&self) -> &[(f64, Excitation)] {
        &self.components
    }

    pub fn pauli_string(&self) -> Option<&PauliString> {
        self.pauli.as_ref()
    }

    pub fn generation_order(&self) -> usize {
        self.generation_order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_qubits(&self) -> usize {
        self.qubit_image.n_qubits()
    }

    pub fn qubit_image(&self) -> &QubitOperator {
        &self.qubit_image
    }

    /// `(P_j, c_j)` with image `Σ_j i c_j P_j`, in canonical string order.
    pub fn rotations(&self) -> &[(PauliString, f64)] {
        &self.rotations
    }

    /// The anti-Hermitian fermionic generator. Pauli entries have none.
    pub fn generator(&self) -> Result<FermionOperator> {
        if self.kind == EntryKind::Pauli {
            return Err(Error::InvalidCombination("Pauli entries have no fermionic generator".into()));
        }
        excitation_generator(&self.components, self.kind.form())
    }

    /// Excitation part `T` of the generator (`Σ w_k T_k`).
    pub fn excitation_operator(&self) -> FermionOperator {
        self.components.iter().fold(FermionOperator::zero(), |acc, (w, ex)| acc + ex.to_operator().scale(*w))
    }

    fn with_order(mut self, order: usize) -> Self {
        self.generation_order = order;
        self
    }
}

/// Why an entry was dropped by [`screen_pool`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScreenReason {
    SpinProjection,
    Momentum,
    EmptyImage,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorPool {
    entries: Vec<PoolEntry>,
    n_qubits: usize,
    provenance: Vec<PoolFamily>,
    convention: Option<PoolConvention>,
    removed: BTreeMap<ScreenReason, usize>,
}

impl OperatorPool {
    pub fn new(n_qubits: usize, provenance: Vec<PoolFamily>, convention: Option<PoolConvention>) -> Self {
        Self { entries: Vec::new(), n_qubits, provenance, convention, removed: BTreeMap::new() }
    }

    /// Builds a pool from explicit entries, renumbering generation order.
    pub fn from_entries(n_qubits: usize, entries: Vec<PoolEntry>) -> Result<Self> {
        let mut pool = Self::new(n_qubits, Vec::new(), None);
        for e in entries {
            if e.n_qubits() != n_qubits {
                return Err(Error::SizeMismatch { expected: n_qubits, found: e.n_qubits() });
            }
            let k = pool.entries.len();
            pool.entries.push(e.with_order(k));
        }
        Ok(pool)
    }

    pub fn entries(&self) -> &[PoolEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn provenance(&self) -> &[PoolFamily] {
        &self.provenance
    }

    pub fn convention(&self) -> Option<PoolConvention> {
        self.convention
    }

    pub fn is_qcc(&self) -> bool {
        self.provenance.contains(&PoolFamily::Qcc)
    }

    /// Number of entries removed by screening, per reason.
    pub fn removed(&self) -> &BTreeMap<ScreenReason, usize> {
        &self.removed
    }

    fn push_fermionic(&mut self, kind: EntryKind, components: Vec<(f64, Excitation)>, label: String) -> Result<()> {
        let order = self.entries.len();
        self.entries.push(PoolEntry::fermionic(kind, components, self.n_qubits, order, label)?);
        Ok(())
    }

    /// Per-kind counts, screening removals and the enumeration convention.
    pub fn stats(&self) -> PoolStats {
        let mut counts = BTreeMap::new();
        for e in &self.entries {
            *counts.entry(e.kind.name().to_string()).or_insert(0) += 1;
        }
        PoolStats {
            provenance: self.provenance.clone(),
            convention: self.convention,
            n_qubits: self.n_qubits,
            total: self.entries.len(),
            counts,
            removed: self.removed.iter().map(|(r, n)| (*r, *n)).collect(),
        }
    }
}

/// Occupied and virtual spatial orbitals, or all orbitals twice when generalized.
fn orbital_ranges(s: &IntegralSet, generalized: bool) -> (Vec<usize>, Vec<usize>) {
    let n = s.n_orbitals();
    if generalized {
        return ((0..n).collect(), (0..n).collect());
    }
    let n_occ = s.n_occupied_orbitals().min(n);
    ((0..n_occ).collect(), (n_occ..n).collect())
}

fn single_components(p: usize, q: usize) -> Vec<(f64, Excitation)> {
    (0..2).map(|sigma| (1.0, Excitation::single(spin_orbital(p, sigma), spin_orbital(q, sigma)))).collect()
}

/// `T1` (`swap = false`) or `T2` (`swap = true`) spin coupling of a spatial double.
fn double_components(c: (usize, usize), a: (usize, usize), swap: bool) -> Vec<(f64, Excitation)> {
    let mut out = Vec::new();
    for sigma in 0..2 {
        for tau in 0..2 {
            let (first, second) = if swap { (a.0, a.1) } else { (a.1, a.0) };
            let ex = Excitation::double(
                spin_orbital(c.0, sigma),
                spin_orbital(c.1, tau),
                spin_orbital(first, tau),
                spin_orbital(second, sigma),
            );
            if !ex.has_repeated_index() {
                out.push((1.0, ex));
            }
        }
    }
    out
}

fn spin_adapted(s: &IntegralSet, generalized: bool, pool: &mut OperatorPool) -> Result<()> {
    let (occ, vir) = orbital_ranges(s, generalized);
    let (k_single, k_double) =
        if generalized { (EntryKind::Gsingle, EntryKind::Gdouble) } else { (EntryKind::Single, EntryKind::Double) };
    for &q in &occ {
        for &p in &vir {
            if p != q {
                pool.push_fermionic(k_single, single_components(p, q), format!("E[{p}<-{q}]"))?;
            }
        }
    }
    let pair_types = |v: &[usize]| {
        let mut out = Vec::new();
        for &a in v {
            for &b in v {
                if a >= b {
                    out.push((a, b));
                }
            }
        }
        out
    };
    let creators = pair_types(&vir);
    for ann in pair_types(&occ) {
        for &cre in &creators {
            // Generalized mode sees every unordered pair of pair types once.
            if cre == ann || (generalized && cre < ann) {
                continue;
            }
            let (a, b) = cre;
            let (i, j) = ann;
            pool.push_fermionic(k_double, double_components(cre, ann, false), format!("D1[{a},{b}<-{i},{j}]"))?;
            if a != b && i != j {
                pool.push_fermionic(k_double, double_components(cre, ann, true), format!("D2[{a},{b}<-{i},{j}]"))?;
            }
        }
    }
    Ok(())
}

fn spin_orbital_pool(s: &IntegralSet, generalized: bool, pool: &mut OperatorPool) -> Result<()> {
    let n_so = s.n_spin_orbitals();
    let n_occ = s.n_electrons().min(n_so);
    let (occ, vir): (Vec<usize>, Vec<usize>) = if generalized {
        ((0..n_so).collect(), (0..n_so).collect())
    } else {
        ((0..n_occ).collect(), (n_occ..n_so).collect())
    };
    let (k_single, k_double) =
        if generalized { (EntryKind::Gsingle, EntryKind::Gdouble) } else { (EntryKind::Single, EntryKind::Double) };
    let same_spin = |a: usize, b: usize| a % 2 == b % 2;
    for &q in &occ {
        for &p in &vir {
            if p > q && same_spin(p, q) {
                pool.push_fermionic(k_single, vec![(1.0, Excitation::single(p, q))], format!("a{p}^ a{q}"))?;
            }
        }
    }
    let pairs = |v: &[usize]| {
        let mut out = Vec::new();
        for &a in v {
            for &b in v {
                if a > b {
                    out.push((a, b));
                }
            }
        }
        out
    };
    let creators = pairs(&vir);
    let mut annihilators = pairs(&occ);
    annihilators.sort_by_key(|&(r, s)| (s, r));
    for &(r, s_) in &annihilators {
        for &(p, q) in &creators {
            if (p, q) == (r, s_) || (generalized && (p, q) < (r, s_)) {
                continue;
            }
            let alpha = |x: usize| usize::from(x.is_multiple_of(2));
            if alpha(p) + alpha(q) != alpha(r) + alpha(s_) {
                continue;
            }
            let ex = Excitation::double(p, q, r, s_);
            pool.push_fermionic(k_double, vec![(1.0, ex)], format!("a{p}^ a{q}^ a{r} a{s_}"))?;
        }
    }
    Ok(())
}

fn fermionic_pool(s: &IntegralSet, generalized: bool, convention: PoolConvention) -> Result<OperatorPool> {
    let family = if generalized { PoolFamily::Uccgsd } else { PoolFamily::Uccsd };
    let mut pool = OperatorPool::new(s.n_spin_orbitals(), vec![family], Some(convention));
    match convention {
        PoolConvention::SpinAdapted => spin_adapted(s, generalized, &mut pool)?,
        PoolConvention::SpinOrbital => spin_orbital_pool(s, generalized, &mut pool)?,
    }
    Ok(pool)
}

/// Occupied-to-virtual singles and doubles.
pub fn generate_uccsd_pool(s: &IntegralSet, convention: PoolConvention) -> Result<OperatorPool> {
    fermionic_pool(s, false, convention)
}

/// Singles and doubles over all orbitals irrespective of occupation.
pub fn generate_uccgsd_pool(s: &IntegralSet, convention: PoolConvention) -> Result<OperatorPool> {
    fermionic_pool(s, true, convention)
}

/// Pauli strings over {X, Y} of weight `1..=max_len` with an odd number of Y
/// factors, ordered by weight, then support, then X/Y pattern.
pub fn generate_qcc_pool(n_qubits: usize, max_len: usize) -> Result<OperatorPool> {
    if max_len > n_qubits {
        return Err(Error::Bounds(format!("max length {max_len} exceeds {n_qubits} qubits")));
    }
    let mut pool = OperatorPool::new(n_qubits, vec![PoolFamily::Qcc], None);
    for w in 1..=max_len {
        for support in combinations(n_qubits, w) {
            for pattern in 0u32..(1 << w) {
                if pattern.count_ones() % 2 == 0 {
                    continue;
                }
                let ops = support
                    .iter()
                    .enumerate()
                    .map(|(k, &q)| (q, if pattern >> k & 1 == 1 { Pauli::Y } else { Pauli::X }));
                let p = PauliString::from_ops(n_qubits, ops)?;
                let order = pool.entries.len();
                pool.entries.push(PoolEntry::pauli(p, order));
            }
        }
    }
    Ok(pool)
}

/// `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Appends `i(T + T†)` partners of every fermionic entry.
pub fn extend_with_auxiliary(pool: &OperatorPool) -> Result<OperatorPool> {
    if pool.is_qcc() {
        return Err(Error::InvalidCombination("auxiliary operators need a fermionic pool".into()));
    }
    let mut out = pool.clone();
    for e in &pool.entries {
        let kind = e
            .kind
            .auxiliary()
            .ok_or_else(|| Error::InvalidCombination(format!("entry {} has no auxiliary partner", e.label)))?;
        out.push_fermionic(kind, e.components.clone(), format!("aux:{}", e.label))?;
    }
    if !out.provenance.contains(&PoolFamily::Aux) {
        out.provenance.push(PoolFamily::Aux);
    }
    Ok(out)
}

/// Drops entries that change S_z, violate additive tag conservation (when
/// the integrals declare a group order), or map to an empty qubit operator.
/// Relative order and generation order of survivors are preserved.
pub fn screen_pool(pool: &OperatorPool, s: &IntegralSet) -> OperatorPool {
    let mut out = OperatorPool { entries: Vec::new(), removed: pool.removed.clone(), ..pool.clone() };
    let tags = s.orbital_tags();
    for e in &pool.entries {
        let reason = if e.components.iter().any(|(_, ex)| ex.alpha_change() != 0) {
            Some(ScreenReason::SpinProjection)
        } else if e.components.iter().any(|(_, ex)| {
            let spatial = |v: &[usize]| v.iter().map(|m| m / 2).collect::<Vec<_>>();
            tags.and_then(|t| t.imbalance(&spatial(&ex.creators), &spatial(&ex.annihilators))).is_some_and(|d| d != 0)
        }) {
            Some(ScreenReason::Momentum)
        } else if e.qubit_image.simplify(SIMPLIFY_FLOOR).is_empty() {
            Some(ScreenReason::EmptyImage)
        } else {
            None
        };
        match reason {
            Some(r) => *out.removed.entry(r).or_insert(0) += 1,
            None => out.entries.push(e.clone()),
        }
    }
    out
}

/// Pool-size summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolStats {
    pub provenance: Vec<PoolFamily>,
    pub convention: Option<PoolConvention>,
    pub n_qubits: usize,
    pub total: usize,
    pub counts: BTreeMap<String, usize>,
    pub removed: Vec<(ScreenReason, usize)>,
}

impl fmt::Display for PoolStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let families: Vec<_> = self
            .provenance
            .iter()
            .map(|p| serde_json::to_value(p).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default())
            .collect();
        writeln!(f, "pool: {}", families.join("+"))?;
        writeln!(f, "qubits: {}", self.n_qubits)?;
        match self.convention {
            Some(PoolConvention::SpinAdapted) => writeln!(
                f,
                "convention: spin-adapted (singles E_pq - E_qp for every ordered orbital pair; \
                 doubles per pair-type pair, two spin couplings when both pairs are open)"
            )?,
            Some(PoolConvention::SpinOrbital) => {
                writeln!(f, "convention: spin-orbital (one entry per spin-conserving excitation, p>q, r>s)")?
            }
            None => writeln!(f, "convention: qubit strings (no Z, odd Y count)")?,
        }
        for (kind, n) in &self.counts {
            writeln!(f, "  {kind}: {n}")?;
        }
        for (reason, n) in &self.removed {
            writeln!(f, "  screened ({reason:?}): {n}")?;
        }
        write!(f, "total: {}", self.total)
    }
}
