//! Dense state-vector reference for small Clifford circuits. It shares no code
//! with the tableau simulator: gates are 2x2 / 4x4 matrices on amplitudes.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64 as C;
use qlocal::circuit::{AdaptiveCircuit, OutcomeId, PrimOp};
use qlocal::pauli::{Gate1, Gate2, Pauli1, PauliOp};

const EPS: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct StateVec {
    pub n: usize,
    pub amps: Vec<C>,
}

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn pauli_matrix(p: Pauli1) -> [[C; 2]; 2] {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match p {
        Pauli1::I => [[o, z], [z, o]],
        Pauli1::X => [[z, o], [o, z]],
        Pauli1::Y => [[z, -i], [i, z]],
        Pauli1::Z => [[o, z], [z, -o]],
    }
}

pub fn gate_matrix(g: Gate1) -> [[C; 2]; 2] {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match g {
        Gate1::I => pauli_matrix(Pauli1::I),
        Gate1::X => pauli_matrix(Pauli1::X),
        Gate1::Y => pauli_matrix(Pauli1::Y),
        Gate1::Z => pauli_matrix(Pauli1::Z),
        Gate1::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        Gate1::S => [[o, z], [z, i]],
        Gate1::Sdg => [[o, z], [z, -i]],
    }
}

impl StateVec {
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        amps[0] = c(1.0, 0.0);
        StateVec { n, amps }
    }

    pub fn apply1(&mut self, m: [[C; 2]; 2], q: usize) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    pub fn apply2(&mut self, g: Gate2, a: usize, b: usize) {
        let (ba, bb) = (1 << a, 1 << b);
        let old = self.amps.clone();
        for (i, amp) in self.amps.iter_mut().enumerate() {
            let (xa, xb) = (i & ba != 0, i & bb != 0);
            *amp = match g {
                // control a, target b
                Gate2::Cnot => old[if xa { i ^ bb } else { i }],
                Gate2::Cz => {
                    if xa && xb {
                        -old[i]
                    } else {
                        old[i]
                    }
                }
                Gate2::Swap => {
                    let j = if xa != xb { i ^ ba ^ bb } else { i };
                    old[j]
                }
            };
        }
    }

    pub fn prob_one(&self, q: usize) -> f64 {
        self.amps.iter().enumerate().filter(|(i, _)| i & (1 << q) != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Projects qubit q onto `value` and renormalises; returns the probability.
    pub fn project(&mut self, q: usize, value: bool) -> f64 {
        let p = if value { self.prob_one(q) } else { 1.0 - self.prob_one(q) };
        if p > EPS {
            let s = 1.0 / p.sqrt();
            for (i, a) in self.amps.iter_mut().enumerate() {
                *a = if (i & (1 << q) != 0) == value { *a * s } else { c(0.0, 0.0) };
            }
        }
        p
    }

    /// <psi| P |psi> for the Hermitian Pauli with the letters of `p`.
    pub fn expectation(&self, p: &PauliOp) -> f64 {
        let mut t = self.clone();
        for q in 0..self.n {
            t.apply1(pauli_matrix(p.get(q)), q);
        }
        self.amps.iter().zip(&t.amps).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

#[derive(Clone, Debug)]
pub struct OracleBranch {
    pub outcomes: BTreeMap<OutcomeId, bool>,
    pub prob: f64,
    pub state: StateVec,
}

/// Every measurement and reset branch of a Clifford adaptive circuit.
pub fn enumerate_branches(circ: &AdaptiveCircuit) -> Vec<OracleBranch> {
    let mut live = vec![OracleBranch { outcomes: BTreeMap::new(), prob: 1.0, state: StateVec::zero(circ.n) }];
    for layer in &circ.layers {
        for op in &layer.ops {
            let mut next = Vec::with_capacity(live.len());
            for br in live {
                match op {
                    PrimOp::Clifford1(g, q) => {
                        let mut b = br;
                        b.state.apply1(gate_matrix(*g), *q);
                        next.push(b);
                    }
                    PrimOp::Clifford2(g, a, q) => {
                        let mut b = br;
                        b.state.apply2(*g, *a, *q);
                        next.push(b);
                    }
                    PrimOp::CtrlPauli { target, terms } => {
                        let mut b = br;
                        for (axis, ids) in terms {
                            let parity = ids.iter().fold(false, |acc, id| acc ^ b.outcomes[id]);
                            if parity {
                                b.state.apply1(pauli_matrix(*axis), *target);
                            }
                        }
                        next.push(b);
                    }
                    PrimOp::MeasureZ { qubit, outcome } => {
                        for v in [false, true] {
                            let mut b = br.clone();
                            let p = b.state.project(*qubit, v);
                            if p > EPS {
                                b.prob *= p;
                                b.outcomes.insert(*outcome, v);
                                next.push(b);
                            }
                        }
                    }
                    PrimOp::PrepZero(q) => {
                        for v in [false, true] {
                            let mut b = br.clone();
                            let p = b.state.project(*q, v);
                            if p > EPS {
                                b.prob *= p;
                                if v {
                                    b.state.apply1(pauli_matrix(Pauli1::X), *q);
                                }
                                next.push(b);
                            }
                        }
                    }
                    other => panic!("state-vector oracle cannot run {other:?}"),
                }
            }
            live = next;
        }
    }
    live
}

/// Exact outcome marginal over `ids`, keyed by '0'/'1' strings.
pub fn oracle_marginal(branches: &[OracleBranch], ids: &[OutcomeId]) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for b in branches {
        let key: String = ids.iter().map(|i| if b.outcomes[i] { '1' } else { '0' }).collect();
        *out.entry(key).or_insert(0.0) += b.prob;
    }
    out
}
