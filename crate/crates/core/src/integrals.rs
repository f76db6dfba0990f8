//! Electronic-structure integrals and the FCIDUMP interchange format.
//!
//! Orbital indices are 1-based in files and 0-based everywhere in memory.
//! Two-electron integrals use chemists' notation `(pq|rs)` over spatial
//! orbitals. Two dialects are understood:
//!
//! * real: `value p q r s`, with the usual 8-fold permutational symmetry;
//! * complex (`ICMPLX=1` in the header): `re im p q r s`, with the 4-fold
//!   symmetry of a Hermitian Hamiltonian,
//!   `(pq|rs) = (rs|pq) = (qp|sr)* = (sr|qp)*`.
//!
//! Sentinel rows follow the standard convention: `v 0 0 0 0` is the nuclear
//! repulsion, `v p q 0 0` a one-body element, and `v p 0 0 0` an orbital
//! energy (ignored).
//!
//! Beyond the standard keys, `ORBSYM` is kept as an opaque per-orbital tag
//! and an optional `SYMMOD=m` declares that tags combine additively modulo
//! `m` (crystal momentum on a k-point mesh).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Integrals smaller than this are dropped on ingest.
pub const INGEST_FLOOR: f64 = 1e-12;

/// Largest tolerated mismatch between symmetry-equivalent integrals.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Per-orbital symmetry labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitalTags {
    pub labels: Vec<i64>,
    /// When set, labels are conserved additively modulo this group order.
    pub modulus: Option<u32>,
}

impl OrbitalTags {
    /// Net label change of an excitation, reduced modulo the group order.
    /// `None` when the tags carry no conservation law.
    pub fn imbalance(&self, created: &[usize], annihilated: &[usize]) -> Option<i64> {
        let m = i64::from(self.modulus?);
        let sum = |idx: &[usize]| idx.iter().map(|&i| self.labels[i]).sum::<i64>();
        Some((sum(created) - sum(annihilated)).rem_euclid(m))
    }
}

/// One- and two-electron integrals plus the metadata defining a Hamiltonian
/// instance. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralSet {
    n_orbitals: usize,
    n_electrons: usize,
    spin_2s: i32,
    e_nuclear: f64,
    one_body: Vec<Complex64>,
    two_body: Vec<Complex64>,
    orbital_tags: Option<OrbitalTags>,
    is_complex: bool,
}

impl IntegralSet {
    /// An all-zero integral set. Use [`IntegralSet::set_one_body`] and
    /// [`IntegralSet::set_two_body`] to populate it.
    pub fn new(n_orbitals: usize, n_electrons: usize, spin_2s: i32, e_nuclear: f64) -> Result<Self> {
        if n_electrons > 2 * n_orbitals {
            return Err(Error::Bounds(format!("{n_electrons} electrons do not fit in {n_orbitals} spatial orbitals")));
        }
        Ok(Self {
            n_orbitals,
            n_electrons,
            spin_2s,
            e_nuclear,
            one_body: vec![Complex64::default(); n_orbitals * n_orbitals],
            two_body: vec![Complex64::default(); n_orbitals.pow(4)],
            orbital_tags: None,
            is_complex: false,
        })
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    /// Number of spin-orbitals, which is also the qubit count under Jordan-Wigner.
    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_orbitals
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn spin_2s(&self) -> i32 {
        self.spin_2s
    }

    pub fn e_nuclear(&self) -> f64 {
        self.e_nuclear
    }

    pub fn is_complex(&self) -> bool {
        self.is_complex
    }

    pub fn orbital_tags(&self) -> Option<&OrbitalTags> {
        self.orbital_tags.as_ref()
    }

    pub fn one_body(&self, p: usize, q: usize) -> Complex64 {
        self.one_body[p * self.n_orbitals + q]
    }

    /// Chemists' notation `(pq|rs)`.
    pub fn two_body(&self, p: usize, q: usize, r: usize, s: usize) -> Complex64 {
        self.two_body[self.idx4(p, q, r, s)]
    }

    /// Number of spatial orbitals occupied (doubly or singly) by the reference determinant.
    pub fn n_occupied_orbitals(&self) -> usize {
        self.n_electrons.div_ceil(2)
    }

    pub fn set_complex(&mut self, is_complex: bool) -> Result<()> {
        if !is_complex {
            let has_imag = self.one_body.iter().chain(&self.two_body).any(|v| v.im != 0.0);
            if has_imag {
                return Err(Error::Validation("cannot mark an integral set with imaginary parts as real".into()));
            }
        }
        self.is_complex = is_complex;
        Ok(())
    }

    pub fn set_orbital_tags(&mut self, tags: Option<OrbitalTags>) -> Result<()> {
        if let Some(t) = &tags {
            if t.labels.len() != self.n_orbitals {
                return Err(Error::Validation(format!(
                    "{} orbital tags for {} orbitals",
                    t.labels.len(),
                    self.n_orbitals
                )));
            }
            if t.modulus == Some(0) {
                return Err(Error::Validation("tag modulus must be positive".into()));
            }
        }
        self.orbital_tags = tags;
        Ok(())
    }

    pub fn set_e_nuclear(&mut self, e: f64) {
        self.e_nuclear = e;
    }

    /// Sets `h(p,q)` and its Hermitian partner. Fails if an already stored
    /// partner disagrees.
    pub fn set_one_body(&mut self, p: usize, q: usize, v: Complex64) -> Result<()> {
        self.check_index(&[p, q])?;
        self.check_realness(v, &[p, q])?;
        if v.norm() < INGEST_FLOOR {
            return Ok(());
        }
        let n = self.n_orbitals;
        for (i, j, val) in [(p, q, v), (q, p, v.conj())] {
            store(&mut self.one_body[i * n + j], val, || format!("h({},{})", i + 1, j + 1))?;
        }
        Ok(())
    }

    /// Sets `(pq|rs)` and every symmetry-equivalent permutation.
    pub fn set_two_body(&mut self, p: usize, q: usize, r: usize, s: usize, v: Complex64) -> Result<()> {
        self.check_index(&[p, q, r, s])?;
        self.check_realness(v, &[p, q, r, s])?;
        if v.norm() < INGEST_FLOOR {
            return Ok(());
        }
        for ((a, b, c, d), conj) in self.symmetry_class(p, q, r, s) {
            let val = if conj { v.conj() } else { v };
            let slot = self.idx4(a, b, c, d);
            store(&mut self.two_body[slot], val, || format!("({} {}|{} {})", a + 1, b + 1, c + 1, d + 1))?;
        }
        Ok(())
    }

    /// Permutations sharing a value with `(pq|rs)`, flagged when the value is conjugated.
    fn symmetry_class(&self, p: usize, q: usize, r: usize, s: usize) -> Vec<((usize, usize, usize, usize), bool)> {
        let mut class = vec![((p, q, r, s), false), ((r, s, p, q), false), ((q, p, s, r), true), ((s, r, q, p), true)];
        if !self.is_complex {
            class.extend([((q, p, r, s), false), ((p, q, s, r), false), ((s, r, p, q), false), ((r, s, q, p), false)]);
        }
        class
    }

    fn check_index(&self, idx: &[usize]) -> Result<()> {
        match idx.iter().find(|&&i| i >= self.n_orbitals) {
            Some(i) => Err(Error::Bounds(format!("orbital index {} exceeds NORB={}", i + 1, self.n_orbitals))),
            None => Ok(()),
        }
    }

    fn check_realness(&self, v: Complex64, idx: &[usize]) -> Result<()> {
        if !self.is_complex && v.im != 0.0 {
            let idx: Vec<_> = idx.iter().map(|i| i + 1).collect();
            return Err(Error::Validation(format!("imaginary value at {idx:?} in a real integral set")));
        }
        Ok(())
    }

    fn idx4(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        let n = self.n_orbitals;
        ((p * n + q) * n + r) * n + s
    }

    /// Checks every stored element against its symmetry partners.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_orbitals;
        for p in 0..n {
            for q in 0..n {
                let d = self.one_body(p, q) - self.one_body(q, p).conj();
                if d.norm() > HERMITICITY_TOL {
                    return Err(Error::Validation(format!(
                        "one-body integrals not Hermitian at h({},{})",
                        p + 1,
                        q + 1
                    )));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.two_body(p, q, r, s);
                        for ((a, b, c, d), conj) in self.symmetry_class(p, q, r, s) {
                            let w = self.two_body(a, b, c, d);
                            let w = if conj { w.conj() } else { w };
                            if (v - w).norm() > HERMITICITY_TOL {
                                return Err(Error::Validation(format!(
                                    "two-body integrals break symmetry between ({} {}|{} {}) and ({} {}|{} {})",
                                    p + 1,
                                    q + 1,
                                    r + 1,
                                    s + 1,
                                    a + 1,
                                    b + 1,
                                    c + 1,
                                    d + 1
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Reference determinant energy with the lowest `n_electrons`
    /// spin-orbitals occupied (interleaved ordering: spin-orbital `2k` is
    /// alpha and `2k + 1` beta of spatial orbital `k`).
    pub fn hartree_fock_energy(&self) -> Result<f64> {
        if self.n_electrons > self.n_spin_orbitals() {
            return Err(Error::Bounds(format!(
                "{} electrons exceed {} spin-orbitals",
                self.n_electrons,
                self.n_spin_orbitals()
            )));
        }
        let occ: Vec<(usize, usize)> = (0..self.n_electrons).map(|i| (i / 2, i % 2)).collect();
        let mut e = Complex64::new(self.e_nuclear, 0.0);
        for &(i, _) in &occ {
            e += self.one_body(i, i);
        }
        for (a, &(i, si)) in occ.iter().enumerate() {
            for (b, &(j, sj)) in occ.iter().enumerate() {
                if a == b {
                    continue;
                }
                let mut pair = self.two_body(i, i, j, j);
                if si == sj {
                    pair -= self.two_body(i, j, j, i);
                }
                e += 0.5 * pair;
            }
        }
        Ok(e.re)
    }

    /// Canonical FCIDUMP text: one representative per symmetry class, the
    /// largest index tuple, emitted in descending order.
    pub fn write_fcidump(&self) -> String {
        let n = self.n_orbitals;
        let mut out = String::new();
        let _ = writeln!(out, " &FCI NORB={},NELEC={},MS2={},", n, self.n_electrons, self.spin_2s);
        if let Some(tags) = &self.orbital_tags {
            let labels: Vec<String> = tags.labels.iter().map(|l| l.to_string()).collect();
            let _ = writeln!(out, "  ORBSYM={},", labels.join(","));
        }
        out.push_str("  ISYM=1,\n");
        if self.is_complex {
            out.push_str("  ICMPLX=1,\n");
        }
        if let Some(m) = self.orbital_tags.as_ref().and_then(|t| t.modulus) {
            let _ = writeln!(out, "  SYMMOD={m},");
        }
        out.push_str(" &END\n");

        let mut reps = BTreeMap::new();
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        if self.two_body(p, q, r, s).norm() < INGEST_FLOOR {
                            continue;
                        }
                        let key =
                            self.symmetry_class(p, q, r, s).into_iter().map(|(t, _)| t).max().unwrap_or((p, q, r, s));
                        reps.entry(key).or_insert(());
                    }
                }
            }
        }
        for &(p, q, r, s) in reps.keys().rev() {
            self.write_value(&mut out, self.two_body(p, q, r, s), [p + 1, q + 1, r + 1, s + 1]);
        }
        for p in (0..n).rev() {
            for q in (0..=p).rev() {
                let v = self.one_body(p, q);
                if v.norm() >= INGEST_FLOOR {
                    self.write_value(&mut out, v, [p + 1, q + 1, 0, 0]);
                }
            }
        }
        self.write_value(&mut out, Complex64::new(self.e_nuclear, 0.0), [0; 4]);
        out
    }

    fn write_value(&self, out: &mut String, v: Complex64, idx: [usize; 4]) {
        let [p, q, r, s] = idx;
        if self.is_complex {
            let _ = writeln!(out, "{:24.16e} {:24.16e} {p:3} {q:3} {r:3} {s:3}", v.re, v.im);
        } else {
            let _ = writeln!(out, "{:24.16e} {p:3} {q:3} {r:3} {s:3}", v.re);
        }
    }
}

fn store(slot: &mut Complex64, v: Complex64, name: impl Fn() -> String) -> Result<()> {
    if slot.norm() != 0.0 && (*slot - v).norm() > HERMITICITY_TOL {
        return Err(Error::Validation(format!("Hermiticity violation at {}: {} vs {}", name(), slot, v)));
    }
    *slot = v;
    Ok(())
}

#[derive(Default)]
struct Header {
    norb: Option<usize>,
    nelec: Option<usize>,
    ms2: i32,
    orbsym: Option<Vec<i64>>,
    complex: bool,
    symmod: Option<u32>,
}

/// Parses FCIDUMP text into an [`IntegralSet`], filling in all
/// symmetry-equivalent permutations and validating Hermiticity.
pub fn parse_fcidump(text: &str) -> Result<IntegralSet> {
    let (header, body_start) = parse_header(text)?;
    let norb = header.norb.ok_or_else(|| format_err(1, "header lacks NORB"))?;
    let nelec = header.nelec.ok_or_else(|| format_err(1, "header lacks NELEC"))?;
    let mut set = IntegralSet::new(norb, nelec, header.ms2, 0.0)?;
    set.is_complex = header.complex;
    if let Some(labels) = header.orbsym {
        if labels.len() != norb {
            return Err(format_err(1, format!("ORBSYM lists {} labels for NORB={norb}", labels.len())));
        }
        set.set_orbital_tags(Some(OrbitalTags { labels, modulus: header.symmod }))?;
    } else if header.symmod.is_some() {
        return Err(format_err(1, "SYMMOD given without ORBSYM"));
    }

    let n_values = if header.complex { 2 } else { 1 };
    for (lineno, line) in text.lines().enumerate().skip(body_start) {
        let line_no = lineno + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != n_values + 4 {
            return Err(format_err(line_no, format!("expected {} fields, found {}", n_values + 4, fields.len())));
        }
        let num = |s: &str| -> Result<f64> {
            s.replace(['D', 'd'], "e").parse::<f64>().map_err(|_| format_err(line_no, format!("bad number {s:?}")))
        };
        let re = num(fields[0])?;
        let im = if header.complex { num(fields[1])? } else { 0.0 };
        let mut idx = [0usize; 4];
        for (k, f) in fields[n_values..].iter().enumerate() {
            idx[k] = f.parse::<usize>().map_err(|_| format_err(line_no, format!("bad index {f:?}")))?;
            if idx[k] > norb {
                return Err(Error::Bounds(format!("line {line_no}: orbital index {} exceeds NORB={norb}", idx[k])));
            }
        }
        let v = Complex64::new(re, im);
        match idx {
            [0, 0, 0, 0] => set.e_nuclear = re,
            [_, 0, 0, 0] => {} // orbital energy
            [p, q, 0, 0] if p > 0 && q > 0 => set.set_one_body(p - 1, q - 1, v)?,
            [p, q, r, s] if p > 0 && q > 0 && r > 0 && s > 0 => set.set_two_body(p - 1, q - 1, r - 1, s - 1, v)?,
            _ => return Err(format_err(line_no, format!("invalid index pattern {idx:?}"))),
        }
    }
    set.validate()?;
    Ok(set)
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format { line, message: message.into() }
}

/// Returns the header and the line index where value lines start.
fn parse_header(text: &str) -> Result<(Header, usize)> {
    let mut collected = String::new();
    let mut end_line = None;
    let mut started = false;
    for (i, line) in text.lines().enumerate() {
        let mut l = line.trim();
        if !started {
            if l.is_empty() {
                continue;
            }
            let upper = l.to_ascii_uppercase();
            match upper.strip_prefix("&FCI") {
                Some(_) => l = &l[4..],
                None => return Err(format_err(i + 1, "file must start with &FCI")),
            }
            started = true;
        }
        let upper = l.to_ascii_uppercase();
        let terminator = upper.find("&END").or_else(|| upper.find('/'));
        match terminator {
            Some(pos) => {
                collected.push_str(&l[..pos]);
                end_line = Some(i + 1);
                break;
            }
            None => {
                collected.push_str(l);
                collected.push(' ');
            }
        }
    }
    let end_line = end_line.ok_or_else(|| format_err(1, "header not terminated by &END or /"))?;

    let mut header = Header::default();
    let mut current: Option<(String, Vec<String>)> = None;
    let mut pairs = Vec::new();
    for token in collected.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        if let Some((k, v)) = token.split_once('=') {
            if let Some(done) = current.take() {
                pairs.push(done);
            }
            let values = if v.is_empty() { vec![] } else { vec![v.to_string()] };
            current = Some((k.trim().to_ascii_uppercase(), values));
        } else if let Some((_, values)) = current.as_mut() {
            values.push(token.to_string());
        } else {
            return Err(format_err(1, format!("stray header token {token:?}")));
        }
    }
    pairs.extend(current);

    let single = |key: &str, values: &[String]| -> Result<String> {
        match values {
            [v] => Ok(v.clone()),
            _ => Err(format_err(1, format!("{key} expects one value"))),
        }
    };
    let int = |key: &str, v: &str| -> Result<i64> {
        v.parse::<i64>().map_err(|_| format_err(1, format!("{key}: bad integer {v:?}")))
    };
    for (key, values) in pairs {
        match key.as_str() {
            "NORB" => header.norb = Some(to_count(int(&key, &single(&key, &values)?)?, &key)?),
            "NELEC" => header.nelec = Some(to_count(int(&key, &single(&key, &values)?)?, &key)?),
            "MS2" => header.ms2 = int(&key, &single(&key, &values)?)? as i32,
            "ORBSYM" => header.orbsym = Some(values.iter().map(|v| int(&key, v)).collect::<Result<_>>()?),
            "ICMPLX" => header.complex = int(&key, &single(&key, &values)?)? != 0,
            "SYMMOD" => {
                let m = int(&key, &single(&key, &values)?)?;
                header.symmod = Some(
                    u32::try_from(m)
                        .ok()
                        .filter(|&m| m > 0)
                        .ok_or_else(|| format_err(1, format!("SYMMOD must be positive, got {m}")))?,
                );
            }
            "UHF" | "IUHF" => {
                let v = single(&key, &values)?.to_ascii_uppercase();
                if v.contains('T') || v == "1" {
                    return Err(format_err(1, "unrestricted FCIDUMP files are not supported"));
                }
            }
            _ => {} // ISYM, IPRTIM, ...
        }
    }
    Ok((header, end_line))
}

fn to_count(v: i64, key: &str) -> Result<usize> {
    usize::try_from(v).map_err(|_| format_err(1, format!("{key} must be non-negative")))
}
