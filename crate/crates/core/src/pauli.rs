//! n-qubit Pauli operators in the symplectic representation.
//!
//! An operator is stored as `i^phase * X(x) Z(z)`, so `Y = i X Z` carries phase 1.
//! `multiply` tracks the phase exactly; `mul_unsigned` is the phase-free product
//! used by the noise calculus.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVec;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PauliError {
    #[error("qubit count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("qubit {0} out of range for {1} qubits")]
    OutOfRange(usize, usize),
    #[error("gates in a layer overlap on qubit {0}")]
    OverlappingGates(usize),
    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("cannot parse Pauli text {0:?}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli1 {
    I,
    X,
    Y,
    Z,
}

impl Pauli1 {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli1::I => (false, false),
            Pauli1::X => (true, false),
            Pauli1::Y => (true, true),
            Pauli1::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli1::I,
            (true, false) => Pauli1::X,
            (true, true) => Pauli1::Y,
            (false, true) => Pauli1::Z,
        }
    }
}

/// Single-qubit gates of the generating set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate1 {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate2 {
    Cnot,
    Cz,
    Swap,
}

impl Gate1 {
    pub const ALL: [Gate1; 7] = [Gate1::I, Gate1::X, Gate1::Y, Gate1::Z, Gate1::H, Gate1::S, Gate1::Sdg];

    pub fn name(self) -> &'static str {
        match self {
            Gate1::I => "I",
            Gate1::X => "X",
            Gate1::Y => "Y",
            Gate1::Z => "Z",
            Gate1::H => "H",
            Gate1::S => "S",
            Gate1::Sdg => "Sdg",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == s)
    }

    /// Conjugation table: maps (x, z) to (x', z') and the added power of i.
    #[inline]
    pub fn conjugate_bits(self, x: bool, z: bool) -> (bool, bool, u8) {
        let (xi, zi) = (x as u8, z as u8);
        match self {
            Gate1::I => (x, z, 0),
            Gate1::X => (x, z, 2 * zi),
            Gate1::Z => (x, z, 2 * xi),
            Gate1::Y => (x, z, 2 * (xi ^ zi)),
            Gate1::H => (z, x, 2 * (xi & zi)),
            Gate1::S => (x, z ^ x, xi),
            Gate1::Sdg => (x, z ^ x, 3 * xi),
        }
    }
}

impl Gate2 {
    pub const ALL: [Gate2; 3] = [Gate2::Cnot, Gate2::Cz, Gate2::Swap];

    pub fn name(self) -> &'static str {
        match self {
            Gate2::Cnot => "CNOT",
            Gate2::Cz => "CZ",
            Gate2::Swap => "SWAP",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == s)
    }

    /// Conjugation table on (xa, za, xb, zb); returns the new bits and the added power of i.
    #[inline]
    pub fn conjugate_bits(self, xa: bool, za: bool, xb: bool, zb: bool) -> ([bool; 4], u8) {
        match self {
            Gate2::Cnot => ([xa, za ^ zb, xb ^ xa, zb], 0),
            Gate2::Cz => ([xa, za ^ xb, xb, zb ^ xa], 2 * (xa & xb) as u8),
            Gate2::Swap => ([xb, zb, xa, za], 0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CliffordGate {
    One(Gate1, usize),
    Two(Gate2, usize, usize),
}

impl CliffordGate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            CliffordGate::One(_, q) => vec![q],
            CliffordGate::Two(_, a, b) => vec![a, b],
        }
    }
}

/// A depth-one layer of gates with pairwise disjoint supports.
pub type CliffordLayer = [CliffordGate];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliOp {
    n: usize,
    x: BitVec,
    z: BitVec,
    phase: u8,
}

/// Sorted qubit indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SupportSet(pub Vec<usize>);

impl SupportSet {
    pub fn new(mut idx: Vec<usize>) -> Self {
        idx.sort_unstable();
        idx.dedup();
        SupportSet(idx)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset_of(&self, other: &SupportSet) -> bool {
        self.0.iter().all(|i| other.0.binary_search(i).is_ok())
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&s.join(";"))
    }
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        PauliOp { n, x: BitVec::zeros(n), z: BitVec::zeros(n), phase: 0 }
    }

    /// `X(x) Z(z)` with phase 0.
    pub fn from_bits(x: BitVec, z: BitVec) -> Self {
        assert_eq!(x.len(), z.len());
        PauliOp { n: x.len(), x, z, phase: 0 }
    }

    /// Hermitian single-qubit Pauli (Y means the usual Y).
    pub fn single(n: usize, q: usize, p: Pauli1) -> Self {
        let mut op = Self::identity(n);
        op.set_hermitian(q, p);
        op
    }

    pub fn from_paulis(ps: &[Pauli1]) -> Self {
        let mut op = Self::identity(ps.len());
        for (q, p) in ps.iter().enumerate() {
            op.set_hermitian(q, *p);
        }
        op
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    /// Power of i in `i^phase X(x) Z(z)`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    pub fn get(&self, q: usize) -> Pauli1 {
        Pauli1::from_bits(self.x.get(q), self.z.get(q))
    }

    /// Replaces the factor on `q` by the Hermitian Pauli `p`, keeping the
    /// Hermitian sign of the rest.
    pub fn set_hermitian(&mut self, q: usize, p: Pauli1) {
        let old_y = self.x.get(q) && self.z.get(q);
        let (x, z) = p.bits();
        self.x.set(q, x);
        self.z.set(q, z);
        let new_y = x && z;
        self.phase = (self.phase + 4 + new_y as u8 - old_y as u8) % 4;
    }

    fn y_count(&self) -> usize {
        self.x.and_count(&self.z)
    }

    /// Sign relative to the Hermitian operator with the same bits:
    /// 0 for +, 1 for +i, 2 for -, 3 for -i.
    pub fn hermitian_phase(&self) -> u8 {
        ((self.phase as usize + 4 - self.y_count() % 4) % 4) as u8
    }

    /// `Some(true)` if the operator is minus a Hermitian Pauli, `None` if it is anti-Hermitian.
    pub fn sign_bit(&self) -> Option<bool> {
        match self.hermitian_phase() {
            0 => Some(false),
            2 => Some(true),
            _ => None,
        }
    }

    pub fn support(&self) -> SupportSet {
        let mut s = self.x.clone();
        s.or_assign(&self.z);
        SupportSet(s.iter_ones().collect())
    }

    pub fn support_bits(&self) -> BitVec {
        let mut s = self.x.clone();
        s.or_assign(&self.z);
        s
    }

    pub fn weight(&self) -> usize {
        self.support_bits().count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn commutes_with(&self, other: &PauliOp) -> bool {
        (self.x.and_count(&other.z) + self.z.and_count(&other.x)) % 2 == 0
    }

    /// Group product `self * other`, phase tracked exactly.
    pub fn multiply(&self, other: &PauliOp) -> Result<PauliOp, PauliError> {
        if self.n != other.n {
            return Err(PauliError::SizeMismatch(self.n, other.n));
        }
        let swap = (2 * self.z.and_count(&other.x)) % 4;
        let mut x = self.x.clone();
        x.xor_assign(&other.x);
        let mut z = self.z.clone();
        z.xor_assign(&other.z);
        Ok(PauliOp { n: self.n, x, z, phase: ((self.phase as usize + other.phase as usize + swap) % 4) as u8 })
    }

    /// Product with the phase discarded: X(x1+x2) Z(z1+z2).
    pub fn mul_unsigned(&self, other: &PauliOp) -> Result<PauliOp, PauliError> {
        if self.n != other.n {
            return Err(PauliError::SizeMismatch(self.n, other.n));
        }
        let mut x = self.x.clone();
        x.xor_assign(&other.x);
        let mut z = self.z.clone();
        z.xor_assign(&other.z);
        Ok(PauliOp::from_bits(x, z))
    }

    pub fn without_phase(&self) -> PauliOp {
        PauliOp::from_bits(self.x.clone(), self.z.clone())
    }

    /// In-place conjugation `U P U^dagger` by one gate.
    pub fn conjugate_gate(&mut self, g: &CliffordGate) -> Result<(), PauliError> {
        match *g {
            CliffordGate::One(gate, q) => {
                if q >= self.n {
                    return Err(PauliError::OutOfRange(q, self.n));
                }
                let (x, z, d) = gate.conjugate_bits(self.x.get(q), self.z.get(q));
                self.x.set(q, x);
                self.z.set(q, z);
                self.phase = (self.phase + d) % 4;
            }
            CliffordGate::Two(gate, a, b) => {
                for q in [a, b] {
                    if q >= self.n {
                        return Err(PauliError::OutOfRange(q, self.n));
                    }
                }
                if a == b {
                    return Err(PauliError::OverlappingGates(a));
                }
                let (bits, d) = gate.conjugate_bits(self.x.get(a), self.z.get(a), self.x.get(b), self.z.get(b));
                self.x.set(a, bits[0]);
                self.z.set(a, bits[1]);
                self.x.set(b, bits[2]);
                self.z.set(b, bits[3]);
                self.phase = (self.phase + d) % 4;
            }
        }
        Ok(())
    }

    pub fn conjugate_by_layer(&self, layer: &CliffordLayer) -> Result<PauliOp, PauliError> {
        let mut used = BitVec::zeros(self.n);
        for g in layer {
            for q in g.qubits() {
                if q >= self.n {
                    return Err(PauliError::OutOfRange(q, self.n));
                }
                if used.get(q) {
                    return Err(PauliError::OverlappingGates(q));
                }
                used.set(q, true);
            }
        }
        let mut out = self.clone();
        for g in layer {
            out.conjugate_gate(g)?;
        }
        Ok(out)
    }

    /// Output acts on qubit `perm[i]` as `self` acts on qubit `i`.
    pub fn permute(&self, perm: &[usize]) -> Result<PauliOp, PauliError> {
        if perm.len() != self.n {
            return Err(PauliError::InvalidPermutation(self.n));
        }
        let mut seen = BitVec::zeros(self.n);
        for &p in perm {
            if p >= self.n || seen.get(p) {
                return Err(PauliError::InvalidPermutation(self.n));
            }
            seen.set(p, true);
        }
        let mut out = PauliOp::identity(self.n);
        out.phase = self.phase;
        for (i, &p) in perm.iter().enumerate() {
            out.x.set(p, self.x.get(i));
            out.z.set(p, self.z.get(i));
        }
        Ok(out)
    }

    /// Factors on the listed qubits, in list order; phase dropped.
    pub fn restrict(&self, qubits: &[usize]) -> PauliOp {
        let mut out = PauliOp::identity(qubits.len());
        for (k, &q) in qubits.iter().enumerate() {
            out.x.set(k, self.x.get(q));
            out.z.set(k, self.z.get(q));
        }
        out
    }

    /// Places the factors of `self` on `qubits` of an `n`-qubit identity; phase kept.
    pub fn embed(&self, n: usize, qubits: &[usize]) -> PauliOp {
        assert_eq!(qubits.len(), self.n);
        let mut out = PauliOp::identity(n);
        out.phase = self.phase;
        for (k, &q) in qubits.iter().enumerate() {
            out.x.set(q, self.x.get(k));
            out.z.set(q, self.z.get(k));
        }
        out
    }

    /// Hex form `xbits.zbits`, highest qubit first.
    pub fn to_hex(&self) -> String {
        format!("{}.{}", self.x.to_hex(), self.z.to_hex())
    }

    pub fn from_hex(n: usize, s: &str) -> Result<PauliOp, PauliError> {
        let err = || PauliError::Parse(s.to_string());
        let (xs, zs) = s.split_once('.').ok_or_else(err)?;
        let x = BitVec::from_hex(n, xs).ok_or_else(err)?;
        let z = BitVec::from_hex(n, zs).ok_or_else(err)?;
        Ok(PauliOp::from_bits(x, z))
    }

    /// Parses text like `X0 Z3 Y7`, optionally prefixed by `-`, `i` or `-i`.
    pub fn parse(n: usize, s: &str) -> Result<PauliOp, PauliError> {
        let err = || PauliError::Parse(s.to_string());
        let mut t = s.trim();
        let mut herm = 0u8;
        for (pre, h) in [("-i", 3u8), ("+i", 1), ("-", 2), ("+", 0), ("i", 1)] {
            if let Some(rest) = t.strip_prefix(pre) {
                if pre == "i" && !rest.starts_with(|c: char| c.is_whitespace()) && !rest.is_empty() {
                    continue;
                }
                t = rest.trim_start();
                herm = h;
                break;
            }
        }
        let mut op = PauliOp::identity(n);
        let mut seen = BitVec::zeros(n);
        if t != "I" && !t.is_empty() {
            for tok in t.split_whitespace() {
                let mut cs = tok.chars();
                let p = match cs.next() {
                    Some('X') => Pauli1::X,
                    Some('Y') => Pauli1::Y,
                    Some('Z') => Pauli1::Z,
                    _ => return Err(err()),
                };
                let q: usize = cs.as_str().parse().map_err(|_| err())?;
                if q >= n || seen.get(q) {
                    return Err(err());
                }
                seen.set(q, true);
                op.set_hermitian(q, p);
            }
        }
        op.phase = (op.phase + herm) % 4;
        Ok(op)
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.hermitian_phase() as usize];
        f.write_str(prefix)?;
        if prefix == "i" || prefix == "-i" {
            f.write_str(" ")?;
        }
        if self.is_identity() {
            return f.write_str("I");
        }
        let mut first = true;
        for q in self.support().0 {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let c = match self.get(q) {
                Pauli1::X => 'X',
                Pauli1::Y => 'Y',
                Pauli1::Z => 'Z',
                Pauli1::I => unreachable!(),
            };
            write!(f, "{c}{q}")?;
        }
        Ok(())
    }
}
