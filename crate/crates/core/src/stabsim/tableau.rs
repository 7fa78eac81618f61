//! Aaronson-Gottesman tableau with a pluggable sign type.
//!
//! Rows 0..n are destabilizers, rows n..2n stabilizers. Only stabilizer signs
//! are stored; destabilizer signs never influence outcomes.

use std::fmt;

use crate::bits::BitVec;
use crate::pauli::{CliffordGate, Gate1, Gate2, Pauli1, PauliOp};

use super::StabError;

/// Sign of a stabilizer row: a concrete bit, or a symbolic function of the
/// random measurement outcomes.
pub trait Sign: Clone + PartialEq + Eq + fmt::Debug {
    fn constant(b: bool) -> Self;
    fn flip(&mut self);
    fn add_assign(&mut self, other: &Self);
    fn as_const(&self) -> Option<bool>;
}

impl Sign for bool {
    fn constant(b: bool) -> Self {
        b
    }

    #[inline]
    fn flip(&mut self) {
        *self = !*self;
    }

    #[inline]
    fn add_assign(&mut self, other: &Self) {
        *self ^= *other;
    }

    fn as_const(&self) -> Option<bool> {
        Some(*self)
    }
}

/// c + sum of the listed variables over F2. Trailing zero words are trimmed
/// so equal forms compare equal.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Affine {
    vars: Vec<u64>,
    pub c: bool,
}

impl Affine {
    pub fn var(i: usize) -> Self {
        let mut vars = vec![0; i / 64 + 1];
        vars[i / 64] |= 1 << (i % 64);
        Affine { vars, c: false }
    }

    pub fn has_var(&self, i: usize) -> bool {
        self.vars.get(i / 64).is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.vars
            .iter()
            .enumerate()
            .flat_map(|(k, &w)| (0..64).filter(move |b| (w >> b) & 1 == 1).map(move |b| 64 * k + b))
    }

    pub fn eval(&self, assignment: &BitVec) -> bool {
        self.vars().fold(self.c, |acc, v| acc ^ assignment.get(v))
    }

    /// Coefficient vector padded to `len` variables.
    pub fn var_bits(&self, len: usize) -> BitVec {
        BitVec::from_indices(len, self.vars())
    }

    fn trim(&mut self) {
        while self.vars.last() == Some(&0) {
            self.vars.pop();
        }
    }
}

impl Sign for Affine {
    fn constant(b: bool) -> Self {
        Affine { vars: Vec::new(), c: b }
    }

    fn flip(&mut self) {
        self.c = !self.c;
    }

    fn add_assign(&mut self, other: &Self) {
        if other.vars.len() > self.vars.len() {
            self.vars.resize(other.vars.len(), 0);
        }
        for (a, b) in self.vars.iter_mut().zip(&other.vars) {
            *a ^= *b;
        }
        self.c ^= other.c;
        self.trim();
    }

    fn as_const(&self) -> Option<bool> {
        self.vars.is_empty().then_some(self.c)
    }
}

impl fmt::Debug for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.vars().map(|v| format!("v{v}")).collect();
        if self.c || parts.is_empty() {
            parts.insert(0, (self.c as u8).to_string());
        }
        write!(f, "{}", parts.join("+"))
    }
}

/// (x', z', sign flip) for each input (x, z) of a one-qubit gate.
fn table1(g: Gate1) -> [(bool, bool, bool); 4] {
    let mut t = [(false, false, false); 4];
    for (k, e) in t.iter_mut().enumerate() {
        let (x, z) = (k & 2 != 0, k & 1 != 0);
        let (x2, z2, d) = g.conjugate_bits(x, z);
        let e4 = ((x & z) as i32 + d as i32 - (x2 & z2) as i32).rem_euclid(4);
        debug_assert!(e4 % 2 == 0);
        *e = (x2, z2, e4 == 2);
    }
    t
}

fn table2(g: Gate2) -> [([bool; 4], bool); 16] {
    let mut t = [([false; 4], false); 16];
    for (k, e) in t.iter_mut().enumerate() {
        let b = [k & 8 != 0, k & 4 != 0, k & 2 != 0, k & 1 != 0];
        let (n, d) = g.conjugate_bits(b[0], b[1], b[2], b[3]);
        let y_old = (b[0] & b[1]) as i32 + (b[2] & b[3]) as i32;
        let y_new = (n[0] & n[1]) as i32 + (n[2] & n[3]) as i32;
        *e = (n, (y_old + d as i32 - y_new).rem_euclid(4) == 2);
    }
    t
}

/// Flip of the Hermitian sign when row h is replaced by h * i (both Hermitian, commuting).
#[inline]
fn product_flip(xh: &[u64], zh: &[u64], xi: &[u64], zi: &[u64]) -> bool {
    let mut e: u32 = 0;
    for k in 0..xh.len() {
        let (xn, zn) = (xh[k] ^ xi[k], zh[k] ^ zi[k]);
        e = e
            .wrapping_add((xh[k] & zh[k]).count_ones())
            .wrapping_add((xi[k] & zi[k]).count_ones())
            .wrapping_add(2 * (zh[k] & xi[k]).count_ones())
            .wrapping_sub((xn & zn).count_ones());
    }
    e % 4 == 2
}

pub enum MeasureStart<S> {
    /// The outcome is fixed by the current state.
    Deterministic(S),
    /// Uniformly random; the caller must supply the value via `measure_finish`.
    Random(usize),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Tableau<S> {
    n: usize,
    w: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    signs: Vec<S>,
}

impl<S: Sign> Tableau<S> {
    /// |0...0>: destabilizers X_i, stabilizers +Z_i.
    pub fn new(n: usize) -> Self {
        let w = n.div_ceil(64).max(1);
        let mut t = Tableau { n, w, x: vec![0; 2 * n * w], z: vec![0; 2 * n * w], signs: vec![S::constant(false); n] };
        for i in 0..n {
            t.x[i * w + i / 64] |= 1 << (i % 64);
            t.z[(n + i) * w + i / 64] |= 1 << (i % 64);
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn bit(v: &[u64], w: usize, r: usize, q: usize) -> bool {
        (v[r * w + q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    fn put(v: &mut [u64], w: usize, r: usize, q: usize, b: bool) {
        let m = 1u64 << (q % 64);
        let word = &mut v[r * w + q / 64];
        if b {
            *word |= m;
        } else {
            *word &= !m;
        }
    }

    fn check_qubit(&self, q: usize) -> Result<(), StabError> {
        if q >= self.n {
            return Err(StabError::Dimension(format!("qubit {q} out of range for {} qubits", self.n)));
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, g: &CliffordGate) -> Result<(), StabError> {
        let (n, w) = (self.n, self.w);
        match *g {
            CliffordGate::One(g1, q) => {
                self.check_qubit(q)?;
                if g1 == Gate1::I {
                    return Ok(());
                }
                let t = table1(g1);
                for r in 0..2 * n {
                    let k = ((Self::bit(&self.x, w, r, q) as usize) << 1) | Self::bit(&self.z, w, r, q) as usize;
                    let (x2, z2, flip) = t[k];
                    Self::put(&mut self.x, w, r, q, x2);
                    Self::put(&mut self.z, w, r, q, z2);
                    if flip && r >= n {
                        self.signs[r - n].flip();
                    }
                }
            }
            CliffordGate::Two(g2, a, b) => {
                self.check_qubit(a)?;
                self.check_qubit(b)?;
                if a == b {
                    return Err(StabError::Dimension(format!("two-qubit gate on repeated qubit {a}")));
                }
                let t = table2(g2);
                for r in 0..2 * n {
                    let k = ((Self::bit(&self.x, w, r, a) as usize) << 3)
                        | ((Self::bit(&self.z, w, r, a) as usize) << 2)
                        | ((Self::bit(&self.x, w, r, b) as usize) << 1)
                        | Self::bit(&self.z, w, r, b) as usize;
                    let (nb, flip) = t[k];
                    Self::put(&mut self.x, w, r, a, nb[0]);
                    Self::put(&mut self.z, w, r, a, nb[1]);
                    Self::put(&mut self.x, w, r, b, nb[2]);
                    Self::put(&mut self.z, w, r, b, nb[3]);
                    if flip && r >= n {
                        self.signs[r - n].flip();
                    }
                }
            }
        }
        Ok(())
    }

    /// Adds `cond` to the sign of every stabilizer anticommuting with P on q.
    pub fn apply_ctrl_pauli(&mut self, q: usize, p: Pauli1, cond: &S) {
        let (px, pz) = p.bits();
        for k in 0..self.n {
            let r = self.n + k;
            let anti = (px && Self::bit(&self.z, self.w, r, q)) ^ (pz && Self::bit(&self.x, self.w, r, q));
            if anti {
                self.signs[k].add_assign(cond);
            }
        }
    }

    pub fn apply_pauli1(&mut self, q: usize, p: Pauli1) {
        self.apply_ctrl_pauli(q, p, &S::constant(true));
    }

    /// Applies a Pauli error (its global phase is irrelevant).
    pub fn apply_pauli(&mut self, e: &PauliOp) -> Result<(), StabError> {
        if e.num_qubits() != self.n {
            return Err(StabError::Dimension(format!("error on {} qubits, state has {}", e.num_qubits(), self.n)));
        }
        let (ex, ez) = (e.x_bits().words(), e.z_bits().words());
        let w = self.w;
        for k in 0..self.n {
            let r = (self.n + k) * w;
            let mut par = 0u32;
            for j in 0..ex.len() {
                par ^= (self.x[r + j] & ez[j]).count_ones() ^ (self.z[r + j] & ex[j]).count_ones();
            }
            if par & 1 == 1 {
                self.signs[k].flip();
            }
        }
        Ok(())
    }

    /// Row h *= row i. Signs are updated only for stabilizer rows.
    fn rowmul(&mut self, h: usize, i: usize) {
        let w = self.w;
        if h >= self.n {
            let flip = product_flip(
                &self.x[h * w..(h + 1) * w],
                &self.z[h * w..(h + 1) * w],
                &self.x[i * w..(i + 1) * w],
                &self.z[i * w..(i + 1) * w],
            );
            if i >= self.n {
                let si = self.signs[i - self.n].clone();
                self.signs[h - self.n].add_assign(&si);
            }
            if flip {
                self.signs[h - self.n].flip();
            }
        }
        for k in 0..w {
            self.x[h * w + k] ^= self.x[i * w + k];
            self.z[h * w + k] ^= self.z[i * w + k];
        }
    }

    /// First half of a Z measurement. In the random case the row updates are
    /// done and only the new stabilizer's sign is left to `measure_finish`.
    pub fn measure_start(&mut self, q: usize) -> MeasureStart<S> {
        let (n, w) = (self.n, self.w);
        if let Some(p) = (n..2 * n).find(|&r| Self::bit(&self.x, w, r, q)) {
            for r in 0..2 * n {
                if r != p && r != p - n && Self::bit(&self.x, w, r, q) {
                    self.rowmul(r, p);
                }
            }
            self.x.copy_within(p * w..(p + 1) * w, (p - n) * w);
            self.z.copy_within(p * w..(p + 1) * w, (p - n) * w);
            MeasureStart::Random(p)
        } else {
            let mut sx = vec![0u64; w];
            let mut sz = vec![0u64; w];
            let mut sign = S::constant(false);
            for i in 0..n {
                if Self::bit(&self.x, w, i, q) {
                    let r = n + i;
                    let (rx, rz) = (&self.x[r * w..(r + 1) * w], &self.z[r * w..(r + 1) * w]);
                    if product_flip(&sx, &sz, rx, rz) {
                        sign.flip();
                    }
                    sign.add_assign(&self.signs[i]);
                    for k in 0..w {
                        sx[k] ^= rx[k];
                        sz[k] ^= rz[k];
                    }
                }
            }
            MeasureStart::Deterministic(sign)
        }
    }

    pub fn measure_finish(&mut self, q: usize, p: usize, value: S) {
        let w = self.w;
        for k in 0..w {
            self.x[p * w + k] = 0;
            self.z[p * w + k] = 0;
        }
        Self::put(&mut self.z, w, p, q, true);
        self.signs[p - self.n] = value;
    }

    /// Concrete measurement with the given coin for the random case.
    pub fn measure(&mut self, q: usize, coin: impl FnOnce() -> S) -> S {
        match self.measure_start(q) {
            MeasureStart::Deterministic(s) => s,
            MeasureStart::Random(p) => {
                let v = coin();
                self.measure_finish(q, p, v.clone());
                v
            }
        }
    }

    /// Stabilizer generator k as a bit pattern (phase 0) plus the sign of the
    /// Hermitian operator with those bits.
    pub fn stabilizer(&self, k: usize) -> (PauliOp, S) {
        let r = self.n + k;
        (self.row_pauli(r), self.signs[k].clone())
    }

    pub fn destabilizer(&self, k: usize) -> PauliOp {
        self.row_pauli(k)
    }

    fn row_pauli(&self, r: usize) -> PauliOp {
        let mut x = BitVec::zeros(self.n);
        let mut z = BitVec::zeros(self.n);
        for q in 0..self.n {
            x.set(q, Self::bit(&self.x, self.w, r, q));
            z.set(q, Self::bit(&self.z, self.w, r, q));
        }
        PauliOp::from_bits(x, z)
    }

    pub fn stabilizers(&self) -> Vec<(PauliOp, S)> {
        (0..self.n).map(|k| self.stabilizer(k)).collect()
    }

    /// Some(s) iff (-1)^s P is in the stabilizer group, where P is the
    /// Hermitian operator with the bits of `p` (its phase is ignored).
    pub fn stabilizer_sign_of(&self, p: &PauliOp) -> Option<S> {
        assert_eq!(p.num_qubits(), self.n, "operator size must match the tableau");
        let (n, w) = (self.n, self.w);
        let (px, pz) = (p.x_bits().words(), p.z_bits().words());
        let anti = |r: usize| {
            let mut par = 0u32;
            for k in 0..px.len() {
                par ^= (self.x[r * w + k] & pz[k]).count_ones() ^ (self.z[r * w + k] & px[k]).count_ones();
            }
            par & 1 == 1
        };
        if (n..2 * n).any(anti) {
            return None;
        }
        let mut sx = vec![0u64; w];
        let mut sz = vec![0u64; w];
        let mut sign = S::constant(false);
        for i in 0..n {
            if anti(i) {
                let r = n + i;
                let (rx, rz) = (&self.x[r * w..(r + 1) * w], &self.z[r * w..(r + 1) * w]);
                if product_flip(&sx, &sz, rx, rz) {
                    sign.flip();
                }
                sign.add_assign(&self.signs[i]);
                for k in 0..w {
                    sx[k] ^= rx[k];
                    sz[k] ^= rz[k];
                }
            }
        }
        (sx[..px.len()] == *px && sz[..pz.len()] == *pz).then_some(sign)
    }

    /// Generators in reduced row echelon form for the given column order,
    /// each column being (qubit, is_z). The result depends only on the group.
    pub fn echelon(&self, columns: &[(usize, bool)]) -> Vec<(PauliOp, S)> {
        let w = self.w;
        let mut rows: Vec<(Vec<u64>, Vec<u64>, S)> = (0..self.n)
            .map(|k| {
                let r = self.n + k;
                (self.x[r * w..(r + 1) * w].to_vec(), self.z[r * w..(r + 1) * w].to_vec(), self.signs[k].clone())
            })
            .collect();
        let get = |row: &(Vec<u64>, Vec<u64>, S), (q, is_z): (usize, bool)| {
            let v = if is_z { &row.1 } else { &row.0 };
            (v[q / 64] >> (q % 64)) & 1 == 1
        };
        let mut rank = 0;
        for &col in columns {
            let Some(piv) = (rank..rows.len()).find(|&r| get(&rows[r], col)) else { continue };
            rows.swap(rank, piv);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && get(row, col) {
                    if product_flip(&row.0, &row.1, &pivot.0, &pivot.1) {
                        row.2.flip();
                    }
                    row.2.add_assign(&pivot.2);
                    for k in 0..w {
                        row.0[k] ^= pivot.0[k];
                        row.1[k] ^= pivot.1[k];
                    }
                }
            }
            rank += 1;
        }
        rows.into_iter()
            .map(|(x, z, s)| {
                let mut xb = BitVec::zeros(self.n);
                let mut zb = BitVec::zeros(self.n);
                for q in 0..self.n {
                    xb.set(q, (x[q / 64] >> (q % 64)) & 1 == 1);
                    zb.set(q, (z[q / 64] >> (q % 64)) & 1 == 1);
                }
                (PauliOp::from_bits(xb, zb), s)
            })
            .collect()
    }

    /// Canonical generators (natural column order, X before Z per qubit).
    pub fn canonical_stabilizers(&self) -> Vec<(PauliOp, S)> {
        let cols: Vec<(usize, bool)> = (0..self.n).flat_map(|q| [(q, false), (q, true)]).collect();
        self.echelon(&cols)
    }

    /// The group restricted to `keep`, relabeled so keep[i] becomes qubit i,
    /// in canonical form. Fails unless the state is a product of a pure state
    /// on `keep` with a state on the other qubits.
    pub fn reduced_group(&self, keep: &[usize]) -> Result<Vec<(PauliOp, S)>, StabError> {
        let mut in_keep = vec![false; self.n];
        for &q in keep {
            self.check_qubit(q)?;
            if std::mem::replace(&mut in_keep[q], true) {
                return Err(StabError::Dimension(format!("qubit {q} kept twice")));
            }
        }
        let mut cols: Vec<(usize, bool)> =
            (0..self.n).filter(|&q| !in_keep[q]).flat_map(|q| [(q, false), (q, true)]).collect();
        cols.extend(keep.iter().flat_map(|&q| [(q, false), (q, true)]));
        let rows = self.echelon(&cols);
        let local: Vec<(PauliOp, S)> = rows
            .into_iter()
            .filter(|(p, _)| !p.is_identity() && p.support().0.iter().all(|&q| in_keep[q]))
            .map(|(p, s)| (p.restrict(keep), s))
            .collect();
        if local.len() != keep.len() {
            return Err(StabError::Inconclusive(format!(
                "only {} of {} generators live on the kept qubits; they are entangled with the rest",
                local.len(),
                keep.len()
            )));
        }
        Ok(local)
    }
}

impl Tableau<bool> {
    /// Canonical generators as signed text, e.g. "+XX", "-ZI".
    pub fn stabilizer_strings(&self) -> Vec<String> {
        self.canonical_stabilizers().iter().map(|(p, s)| signed_string(p, *s)).collect()
    }
}

/// "+XIZ" style rendering, qubit 0 first.
pub fn signed_string(p: &PauliOp, sign: bool) -> String {
    let mut s = String::from(if sign { "-" } else { "+" });
    for q in 0..p.num_qubits() {
        s.push(match p.get(q) {
            Pauli1::I => 'I',
            Pauli1::X => 'X',
            Pauli1::Y => 'Y',
            Pauli1::Z => 'Z',
        });
    }
    s
}

impl<S: Sign> fmt::Debug for Tableau<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            self.stabilizers().iter().map(|(p, s)| format!("{}{:?}", signed_string(p, false), s)).collect();
        f.debug_struct("Tableau").field("n", &self.n).field("stabilizers", &rows).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Gate2;
    use proptest::prelude::*;

    fn g1(g: Gate1, q: usize) -> CliffordGate {
        CliffordGate::One(g, q)
    }

    fn bell() -> Tableau<bool> {
        let mut t = Tableau::new(2);
        t.apply_gate(&g1(Gate1::H, 0)).unwrap();
        t.apply_gate(&CliffordGate::Two(Gate2::Cnot, 0, 1)).unwrap();
        t
    }

    #[test]
    fn bell_pair_stabilizers() {
        assert_eq!(bell().stabilizer_strings(), vec!["+XX", "+ZZ"]);
        let mut t = bell();
        t.apply_pauli1(0, Pauli1::Z);
        assert_eq!(t.stabilizer_strings(), vec!["-XX", "+ZZ"]);
        let mut t = bell();
        t.apply_pauli1(1, Pauli1::Y);
        assert_eq!(t.stabilizer_strings(), vec!["-XX", "-ZZ"]);
        let xx = PauliOp::parse(2, "X0 X1").unwrap();
        assert_eq!(bell().stabilizer_sign_of(&xx), Some(false));
        assert_eq!(bell().stabilizer_sign_of(&PauliOp::parse(2, "Y0 Y1").unwrap()), Some(true));
        assert_eq!(bell().stabilizer_sign_of(&PauliOp::parse(2, "X0").unwrap()), None);
        assert_eq!(Tableau::<bool>::new(2).stabilizer_sign_of(&xx), None);
    }

    #[test]
    fn s_gates_and_y() {
        let mut t = Tableau::<bool>::new(1);
        t.apply_gate(&g1(Gate1::H, 0)).unwrap();
        t.apply_gate(&g1(Gate1::S, 0)).unwrap();
        assert_eq!(t.stabilizer_strings(), vec!["+Y"]);
        t.apply_gate(&g1(Gate1::S, 0)).unwrap();
        assert_eq!(t.stabilizer_strings(), vec!["-X"]);
        t.apply_gate(&g1(Gate1::Sdg, 0)).unwrap();
        t.apply_gate(&g1(Gate1::Sdg, 0)).unwrap();
        t.apply_gate(&g1(Gate1::Sdg, 0)).unwrap();
        assert_eq!(t.stabilizer_strings(), vec!["-Y"]);
    }

    #[test]
    fn deterministic_and_random_measurements() {
        let mut t = Tableau::<bool>::new(2);
        t.apply_pauli1(1, Pauli1::X);
        assert!(!t.measure(0, || panic!("deterministic")));
        assert!(t.measure(1, || panic!("deterministic")));
        let mut t = bell();
        let a = t.measure(0, || true);
        assert!(a);
        assert!(t.measure(1, || panic!("deterministic after collapse")));
    }

    #[test]
    fn symbolic_measurement_correlates_outcomes() {
        let mut t = Tableau::<Affine>::new(3);
        t.apply_gate(&g1(Gate1::H, 0)).unwrap();
        t.apply_gate(&CliffordGate::Two(Gate2::Cnot, 0, 1)).unwrap();
        t.apply_gate(&CliffordGate::Two(Gate2::Cnot, 1, 2)).unwrap();
        let a = t.measure(2, || Affine::var(0));
        let b = t.measure(0, || unreachable!());
        assert_eq!(a, Affine::var(0));
        assert_eq!(b, Affine::var(0));
        t.apply_ctrl_pauli(1, Pauli1::X, &a);
        let c = t.measure(1, || unreachable!());
        assert_eq!(c.as_const(), Some(false));
    }

    #[test]
    fn reduced_group_examples() {
        let mut t = Tableau::<bool>::new(4);
        t.apply_gate(&g1(Gate1::H, 2)).unwrap();
        t.apply_gate(&CliffordGate::Two(Gate2::Cnot, 2, 0)).unwrap();
        t.apply_gate(&g1(Gate1::H, 1)).unwrap();
        let r = t.reduced_group(&[2, 0]).unwrap();
        let s: Vec<String> = r.iter().map(|(p, s)| signed_string(p, *s)).collect();
        assert_eq!(s, vec!["+XX", "+ZZ"]);
        assert!(matches!(t.reduced_group(&[0, 1]), Err(StabError::Inconclusive(_))));
        assert_eq!(t.reduced_group(&[1]).unwrap()[0].0, PauliOp::parse(1, "X0").unwrap().without_phase());
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = CliffordGate> {
        prop_oneof![
            (0..7usize, 0..n).prop_map(|(g, q)| CliffordGate::One(Gate1::ALL[g], q)),
            (0..3usize, 0..n, 1..n).prop_map(move |(g, a, d)| CliffordGate::Two(Gate2::ALL[g], a, (a + d) % n)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        /// Gate action on stabilizers agrees with Pauli conjugation.
        #[test]
        fn gates_match_pauli_conjugation(gates in prop::collection::vec(arb_gate(5), 0..40)) {
            let mut t = Tableau::<bool>::new(5);
            let mut gens: Vec<PauliOp> = (0..5).map(|q| PauliOp::single(5, q, Pauli1::Z)).collect();
            for g in &gates {
                t.apply_gate(g).unwrap();
                for p in gens.iter_mut() {
                    p.conjugate_gate(g).unwrap();
                }
            }
            for (k, p) in gens.iter().enumerate() {
                let (bits, sign) = t.stabilizer(k);
                prop_assert_eq!(bits.without_phase(), p.without_phase());
                prop_assert_eq!(Some(sign), p.sign_bit());
                prop_assert_eq!(t.stabilizer_sign_of(p), p.sign_bit());
            }
        }

        #[test]
        fn symbolic_and_concrete_runs_agree(gates in prop::collection::vec(arb_gate(4), 0..30), qs in prop::collection::vec(0..4usize, 1..6), coins in any::<u32>()) {
            let mut a = Tableau::<bool>::new(4);
            let mut b = Tableau::<Affine>::new(4);
            let mut fresh = 0;
            let mut assign = Vec::new();
            for g in &gates {
                a.apply_gate(g).unwrap();
                b.apply_gate(g).unwrap();
            }
            for &q in &qs {
                let coin = (coins >> fresh) & 1 == 1;
                let va = a.measure(q, || coin);
                let vb = b.measure(q, || { assign.push(coin); fresh += 1; Affine::var(fresh - 1) });
                let bits = BitVec::from_bools(&assign);
                prop_assert_eq!(vb.eval(&bits), va);
            }
            let bits = BitVec::from_bools(&assign);
            for k in 0..4 {
                let (pa, sa) = a.stabilizer(k);
                let (pb, sb) = b.stabilizer(k);
                prop_assert_eq!(pa, pb);
                prop_assert_eq!(sb.eval(&bits), sa);
            }
        }
    }
}
