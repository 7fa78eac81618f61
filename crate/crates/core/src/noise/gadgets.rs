//! Effective-error samplers for the small gadgets whose strength bounds the
//! calculus predicts: Clifford layers, products, adaptive corrections,
//! entanglement swapping chains and teleportation.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::pauli::{CliffordGate, Gate1, Gate2, PauliOp};

use super::{
    commute_through_adaptive, sample_iid_noise, strength_adaptive, strength_clifford, strength_entanglement_swap,
    strength_product_dependent, strength_product_disjoint, strength_teleport, LinearControl, NoiseError, NoiseStrength,
};

/// Bell measurement on (first, second): CNOT first->second, then H on first.
/// Measuring first gives the Z-correction bit, second the X-correction bit.
pub fn bell_measure_layer(pairs: &[(usize, usize)]) -> [Vec<CliffordGate>; 2] {
    [
        pairs.iter().map(|&(a, b)| CliffordGate::Two(Gate2::Cnot, a, b)).collect(),
        pairs.iter().map(|&(a, _)| CliffordGate::One(Gate1::H, a)).collect(),
    ]
}

/// Teleporting `copies` qubits. Corrected qubits are the receivers; measured
/// qubits are ordered (sender half, input) per copy, so A = [1 0], B = [0 1] blockwise.
pub fn teleport_control(copies: usize) -> LinearControl {
    let mut c = LinearControl::zero(copies, 2 * copies);
    for i in 0..copies {
        c.set_a(i, 2 * i, true);
        c.set_b(i, 2 * i + 1, true);
    }
    c
}

/// Swapping along `copies` chains of k Bell pairs (A_0 B_0)...(A_{k-1} B_{k-1}).
/// Corrected qubits per chain are (A_0, B_{k-1}); measured qubits per chain are
/// B_0, A_1, B_1, A_2, ..., B_{k-2}, A_{k-1}.
pub fn swap_chain_control(k: usize, copies: usize) -> Result<LinearControl, NoiseError> {
    if k < 2 {
        return Err(NoiseError::ChainTooShort(k));
    }
    let per = 2 * (k - 1);
    let mut c = LinearControl::zero(2 * copies, per * copies);
    for ch in 0..copies {
        for alpha in 0..k - 1 {
            c.set_b(2 * ch + 1, ch * per + 2 * alpha, true);
            c.set_a(2 * ch + 1, ch * per + 2 * alpha + 1, true);
        }
    }
    Ok(c)
}

/// Moves every error factor of each Bell pair (s, t) onto s using the
/// stabilizers XX and ZZ; phase is dropped.
pub fn reduce_bell_pair_error(e: &PauliOp, pairs: &[(usize, usize)]) -> PauliOp {
    let n = e.num_qubits();
    let mut x = e.x_bits().clone();
    let mut z = e.z_bits().clone();
    for &(s, t) in pairs {
        if x.get(t) {
            x.flip(t);
            x.flip(s);
        }
        if z.get(t) {
            z.flip(t);
            z.flip(s);
        }
    }
    debug_assert_eq!(x.len(), n);
    PauliOp::from_bits(x, z)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gadget", rename_all = "snake_case")]
pub enum GadgetKind {
    /// Plain i.i.d. noise on n qubits.
    Iid {
        n: usize,
    },
    /// i.i.d. noise conjugated through a random depth-one Clifford layer.
    Clifford {
        n: usize,
    },
    /// E * F where F is a fixed relabeling of E (fully dependent factors).
    ProductDependent {
        n: usize,
    },
    /// E on the first half times independent F on the second half.
    ProductDisjoint {
        n: usize,
    },
    /// Noise commuted through a linear correction with row weight w.
    Adaptive {
        n1: usize,
        w: usize,
    },
    SwapChain {
        k: usize,
        copies: usize,
    },
    Teleport {
        copies: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetSpec {
    #[serde(flatten)]
    pub kind: GadgetKind,
    /// Overrides the calculus bound (for negative controls).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_strength: Option<f64>,
}

impl GadgetSpec {
    pub fn new(kind: GadgetKind) -> Self {
        GadgetSpec { kind, claimed_strength: None }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        let bad = |m: &str| Err(NoiseError::Parameter(m.to_string()));
        match self.kind {
            GadgetKind::Iid { n } | GadgetKind::Clifford { n } | GadgetKind::ProductDependent { n } if n == 0 => {
                bad("n must be positive")
            }
            GadgetKind::ProductDisjoint { n } if n < 2 => bad("disjoint product needs n >= 2"),
            GadgetKind::Adaptive { n1, w } if n1 == 0 || w == 0 => bad("adaptive gadget needs n1, w >= 1"),
            GadgetKind::SwapChain { k, .. } if k < 2 => Err(NoiseError::ChainTooShort(k)),
            GadgetKind::SwapChain { copies: 0, .. } | GadgetKind::Teleport { copies: 0 } => {
                bad("copies must be positive")
            }
            _ => match self.claimed_strength {
                Some(c) if !(0.0..=1.0).contains(&c) => Err(NoiseError::InvalidStrength(c)),
                _ => Ok(()),
            },
        }
    }

    pub fn output_qubits(&self) -> usize {
        match self.kind {
            GadgetKind::Iid { n }
            | GadgetKind::Clifford { n }
            | GadgetKind::ProductDependent { n }
            | GadgetKind::ProductDisjoint { n } => n,
            GadgetKind::Adaptive { n1, .. } => n1,
            GadgetKind::SwapChain { copies, .. } => 2 * copies,
            GadgetKind::Teleport { copies } => copies,
        }
    }

    /// Strength the calculus assigns to the effective error at physical strength p.
    pub fn nominal_bound(&self, p: NoiseStrength) -> Result<NoiseStrength, NoiseError> {
        Ok(match self.kind {
            GadgetKind::Iid { .. } => p,
            GadgetKind::Clifford { .. } => strength_clifford(p),
            GadgetKind::ProductDependent { .. } => strength_product_dependent(p, p),
            GadgetKind::ProductDisjoint { .. } => strength_product_disjoint(p, p),
            GadgetKind::Adaptive { w, .. } => strength_adaptive(p, w as u32)?,
            GadgetKind::SwapChain { k, .. } => strength_entanglement_swap(p, k)?,
            GadgetKind::Teleport { .. } => strength_teleport(p),
        })
    }

    pub fn bound(&self, p: NoiseStrength) -> Result<NoiseStrength, NoiseError> {
        match self.claimed_strength {
            Some(c) => NoiseStrength::new(c),
            None => self.nominal_bound(p),
        }
    }

    pub fn sample_effective<R: Rng + ?Sized>(&self, p: NoiseStrength, rng: &mut R) -> PauliOp {
        match self.kind {
            GadgetKind::Iid { n } => sample_iid_noise(n, p, rng),
            GadgetKind::Clifford { n } => {
                let e = sample_iid_noise(n, p, rng);
                let layer = random_layer(n, rng);
                e.conjugate_by_layer(&layer).expect("layer is disjoint").without_phase()
            }
            GadgetKind::ProductDependent { n } => {
                let e = sample_iid_noise(n, p, rng);
                let shift: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
                let f = e.permute(&shift).expect("cyclic shift");
                e.mul_unsigned(&f).expect("same size")
            }
            GadgetKind::ProductDisjoint { n } => {
                let h = n / 2;
                let first: Vec<usize> = (0..h).collect();
                let second: Vec<usize> = (h..n).collect();
                let e = sample_iid_noise(h, p, rng).embed(n, &first);
                let f = sample_iid_noise(n - h, p, rng).embed(n, &second);
                e.mul_unsigned(&f).expect("same size")
            }
            GadgetKind::Adaptive { n1, w } => {
                let n2 = n1 * w;
                let mut c = LinearControl::zero(n1, n2);
                for i in 0..n1 {
                    for j in i * w..(i + 1) * w {
                        c.set_a(i, j, true);
                        c.set_b(i, j, true);
                    }
                }
                let e = sample_iid_noise(n1 + n2, p, rng);
                commute_through_adaptive(&e, &c).expect("dimensions match")
            }
            GadgetKind::SwapChain { k, copies } => {
                let n = 2 * k * copies;
                let q = |ch: usize, alpha: usize, side: usize| ch * 2 * k + 2 * alpha + side;
                let stitches: Vec<(usize, usize)> =
                    (0..copies).flat_map(|ch| (0..k - 1).map(move |a| (q(ch, a, 1), q(ch, a + 1, 0)))).collect();
                let e = sample_iid_noise(n, p, rng);
                let e = through_layers(&e, &bell_measure_layer(&stitches));
                let mut order = Vec::with_capacity(n);
                for ch in 0..copies {
                    order.push(q(ch, 0, 0));
                    order.push(q(ch, k - 1, 1));
                }
                for ch in 0..copies {
                    for a in 0..k - 1 {
                        order.push(q(ch, a, 1));
                        order.push(q(ch, a + 1, 0));
                    }
                }
                let ctrl = swap_chain_control(k, copies).expect("k >= 2");
                commute_through_adaptive(&e.restrict(&order), &ctrl).expect("dimensions match")
            }
            GadgetKind::Teleport { copies } => {
                // per copy: input 3c, sender half 3c+1, receiver 3c+2
                let e = sample_iid_noise(3 * copies, p, rng);
                let bm: Vec<(usize, usize)> = (0..copies).map(|c| (3 * c, 3 * c + 1)).collect();
                let e = through_layers(&e, &bell_measure_layer(&bm));
                let mut order: Vec<usize> = (0..copies).map(|c| 3 * c + 2).collect();
                for c in 0..copies {
                    order.push(3 * c + 1);
                    order.push(3 * c);
                }
                commute_through_adaptive(&e.restrict(&order), &teleport_control(copies)).expect("dimensions match")
            }
        }
    }
}

fn through_layers(e: &PauliOp, layers: &[Vec<CliffordGate>]) -> PauliOp {
    let mut out = e.clone();
    for l in layers {
        out = out.conjugate_by_layer(l).expect("disjoint layer");
    }
    out.without_phase()
}

/// Uniformly shuffled qubits grouped into random one- and two-qubit Cliffords.
pub(crate) fn random_layer<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<CliffordGate> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut layer = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && rng.gen_bool(0.5) {
            let g = Gate2::ALL[rng.gen_range(0..3)];
            layer.push(CliffordGate::Two(g, order[i], order[i + 1]));
            i += 2;
        } else {
            layer.push(CliffordGate::One(Gate1::ALL[rng.gen_range(0..7)], order[i]));
            i += 1;
        }
    }
    layer
}

impl GadgetKind {
    pub fn physical_qubits(&self) -> usize {
        match *self {
            GadgetKind::Iid { n }
            | GadgetKind::Clifford { n }
            | GadgetKind::ProductDependent { n }
            | GadgetKind::ProductDisjoint { n } => n,
            GadgetKind::Adaptive { n1, w } => n1 + n1 * w,
            GadgetKind::SwapChain { k, copies } => 2 * k * copies,
            GadgetKind::Teleport { copies } => 3 * copies,
        }
    }
}
