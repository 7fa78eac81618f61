//! Layered adaptive circuits: preparations, Clifford gates, Z measurements
//! and Pauli corrections controlled by parities of earlier outcomes.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{CliffordGate, Gate1, Gate2, Pauli1};

pub type OutcomeId = u32;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("malformed circuit JSON: {0}")]
    Json(String),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("layer {layer}, op {op}: {msg}")]
    Op { layer: usize, op: usize, msg: String },
    #[error("circuit is invalid: {0}")]
    Invalid(String),
    #[error("layer pairing needs an even qubit count, got {0}")]
    OddQubitCount(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PrimOp {
    PrepZero(usize),
    /// Non-Clifford resource state; carried through localization untouched.
    PrepMagic(usize),
    Clifford1(Gate1, usize),
    Clifford2(Gate2, usize, usize),
    MeasureZ {
        qubit: usize,
        outcome: OutcomeId,
    },
    /// Applies the product over terms of P^(parity of the listed outcomes).
    CtrlPauli {
        target: usize,
        terms: Vec<(Pauli1, Vec<OutcomeId>)>,
    },
    /// Opaque classical control; only transported, never simulated.
    CtrlGeneral {
        targets: Vec<usize>,
        descriptor: String,
        inputs: Vec<OutcomeId>,
    },
}

impl PrimOp {
    pub fn ctrl(target: usize, axis: Pauli1, parity_of: Vec<OutcomeId>) -> PrimOp {
        PrimOp::CtrlPauli { target, terms: vec![(axis, parity_of)] }
    }

    pub fn targets(&self) -> Vec<usize> {
        match self {
            PrimOp::PrepZero(q) | PrimOp::PrepMagic(q) | PrimOp::Clifford1(_, q) => vec![*q],
            PrimOp::Clifford2(_, a, b) => vec![*a, *b],
            PrimOp::MeasureZ { qubit, .. } => vec![*qubit],
            PrimOp::CtrlPauli { target, .. } => vec![*target],
            PrimOp::CtrlGeneral { targets, .. } => targets.clone(),
        }
    }

    /// Outcome ids read by this op.
    pub fn inputs(&self) -> Vec<OutcomeId> {
        match self {
            PrimOp::CtrlPauli { terms, .. } => terms.iter().flat_map(|(_, s)| s.iter().copied()).collect(),
            PrimOp::CtrlGeneral { inputs, .. } => inputs.clone(),
            _ => Vec::new(),
        }
    }

    pub fn is_clifford(&self) -> bool {
        !matches!(self, PrimOp::PrepMagic(_) | PrimOp::CtrlGeneral { .. })
    }

    pub fn as_clifford_gate(&self) -> Option<CliffordGate> {
        match *self {
            PrimOp::Clifford1(g, q) => Some(CliffordGate::One(g, q)),
            PrimOp::Clifford2(g, a, b) => Some(CliffordGate::Two(g, a, b)),
            _ => None,
        }
    }

    /// The same op with qubit q replaced by map(q).
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> PrimOp {
        match self {
            PrimOp::PrepZero(q) => PrimOp::PrepZero(map(*q)),
            PrimOp::PrepMagic(q) => PrimOp::PrepMagic(map(*q)),
            PrimOp::Clifford1(g, q) => PrimOp::Clifford1(*g, map(*q)),
            PrimOp::Clifford2(g, a, b) => PrimOp::Clifford2(*g, map(*a), map(*b)),
            PrimOp::MeasureZ { qubit, outcome } => PrimOp::MeasureZ { qubit: map(*qubit), outcome: *outcome },
            PrimOp::CtrlPauli { target, terms } => PrimOp::CtrlPauli { target: map(*target), terms: terms.clone() },
            PrimOp::CtrlGeneral { targets, descriptor, inputs } => PrimOp::CtrlGeneral {
                targets: targets.iter().map(|&q| map(q)).collect(),
                descriptor: descriptor.clone(),
                inputs: inputs.clone(),
            },
        }
    }
}

impl fmt::Display for PrimOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimOp::PrepZero(q) => write!(f, "prep_zero {q}"),
            PrimOp::PrepMagic(q) => write!(f, "prep_magic {q}"),
            PrimOp::Clifford1(g, q) => write!(f, "{} {q}", g.name()),
            PrimOp::Clifford2(g, a, b) => write!(f, "{} {a} {b}", g.name()),
            PrimOp::MeasureZ { qubit, outcome } => write!(f, "measure_z {qubit} -> m{outcome}"),
            PrimOp::CtrlPauli { target, terms } => {
                write!(f, "ctrl {target}")?;
                for (p, s) in terms {
                    write!(f, " {p:?}^{s:?}")?;
                }
                Ok(())
            }
            PrimOp::CtrlGeneral { targets, descriptor, .. } => write!(f, "ctrl_general {targets:?} {descriptor}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Layer {
    pub ops: Vec<PrimOp>,
}

impl Layer {
    pub fn new(ops: Vec<PrimOp>) -> Self {
        Layer { ops }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptiveCircuit {
    pub n: usize,
    pub layers: Vec<Layer>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    QubitOutOfRange,
    RepeatedTarget,
    Overlap,
    DuplicateOutcome,
    UndefinedOutcome,
    Causality,
    BadControl,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub layer: usize,
    pub op: usize,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "layer {}, op {}: {}", self.layer, self.op, self.message)
    }
}

impl AdaptiveCircuit {
    pub fn new(n: usize) -> Self {
        AdaptiveCircuit { n, layers: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn push(&mut self, ops: Vec<PrimOp>) {
        self.layers.push(Layer::new(ops));
    }

    pub fn ops(&self) -> impl Iterator<Item = &PrimOp> {
        self.layers.iter().flat_map(|l| &l.ops)
    }

    pub fn measurements(&self) -> impl Iterator<Item = (usize, OutcomeId)> + '_ {
        self.ops().filter_map(|op| match op {
            PrimOp::MeasureZ { qubit, outcome } => Some((*qubit, *outcome)),
            _ => None,
        })
    }

    pub fn outcome_ids(&self) -> Vec<OutcomeId> {
        self.measurements().map(|(_, o)| o).collect()
    }

    pub fn max_outcome_id(&self) -> Option<OutcomeId> {
        self.measurements().map(|(_, o)| o).max()
    }

    pub fn count_ops(&self, pred: impl Fn(&PrimOp) -> bool) -> usize {
        self.ops().filter(|op| pred(op)).count()
    }

    /// First op that the stabilizer simulator cannot handle.
    pub fn first_non_clifford(&self) -> Option<(usize, usize)> {
        self.layers.iter().enumerate().find_map(|(t, l)| l.ops.iter().position(|op| !op.is_clifford()).map(|i| (t, i)))
    }

    /// All invariant violations, in layer order.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut defined: HashMap<OutcomeId, usize> = HashMap::new();
        let mut all_ids: HashSet<OutcomeId> = HashSet::new();
        for op in self.ops() {
            if let PrimOp::MeasureZ { outcome, .. } = op {
                all_ids.insert(*outcome);
            }
        }
        for (t, layer) in self.layers.iter().enumerate() {
            let mut used: HashMap<usize, usize> = HashMap::new();
            let mut diag = |op: usize, kind, message: String| out.push(Diagnostic { layer: t, op, kind, message });
            for (i, op) in layer.ops.iter().enumerate() {
                let targets = op.targets();
                if targets.is_empty() || targets.len() > 2 {
                    diag(i, DiagnosticKind::BadControl, format!("op acts on {} qubits", targets.len()));
                }
                for (k, &q) in targets.iter().enumerate() {
                    if q >= self.n {
                        diag(i, DiagnosticKind::QubitOutOfRange, format!("qubit {q} out of range for n = {}", self.n));
                    }
                    if targets[..k].contains(&q) {
                        diag(i, DiagnosticKind::RepeatedTarget, format!("qubit {q} targeted twice"));
                    } else if let Some(j) = used.insert(q, i) {
                        diag(i, DiagnosticKind::Overlap, format!("qubit {q} already used by op {j}"));
                    }
                }
                if let PrimOp::CtrlPauli { terms, .. } = op {
                    if terms.iter().any(|(p, _)| *p == Pauli1::I) {
                        diag(i, DiagnosticKind::BadControl, "controlled identity".into());
                    }
                }
                for o in op.inputs() {
                    match defined.get(&o) {
                        Some(_) => {}
                        None if all_ids.contains(&o) => diag(
                            i,
                            DiagnosticKind::Causality,
                            format!("outcome {o} is not produced by an earlier layer"),
                        ),
                        None => diag(i, DiagnosticKind::UndefinedOutcome, format!("outcome {o} is never produced")),
                    }
                }
            }
            let mut here = HashSet::new();
            for (i, op) in layer.ops.iter().enumerate() {
                if let PrimOp::MeasureZ { outcome, .. } = op {
                    if let Some(&prev) = defined.get(outcome) {
                        diag(
                            i,
                            DiagnosticKind::DuplicateOutcome,
                            format!("outcome {outcome} already produced in layer {prev}"),
                        );
                    } else if !here.insert(*outcome) {
                        diag(
                            i,
                            DiagnosticKind::DuplicateOutcome,
                            format!("outcome {outcome} produced twice in this layer"),
                        );
                    }
                }
            }
            for op in &layer.ops {
                if let PrimOp::MeasureZ { outcome, .. } = op {
                    defined.entry(*outcome).or_insert(t);
                }
            }
        }
        out
    }

    pub fn check(&self) -> Result<(), CircuitError> {
        match self.validate().first() {
            None => Ok(()),
            Some(d) => Err(CircuitError::Invalid(d.to_string())),
        }
    }

    /// Adds one idle qubit when n is odd.
    pub fn padded_to_even(&self) -> AdaptiveCircuit {
        let mut c = self.clone();
        c.n += c.n % 2;
        c
    }

    pub fn from_json(s: &str) -> Result<AdaptiveCircuit, CircuitError> {
        let doc: CircuitDoc = serde_json::from_str(s).map_err(|e| CircuitError::Json(e.to_string()))?;
        doc.into_circuit()
    }

    /// Parses and rejects any circuit with diagnostics.
    pub fn from_json_checked(s: &str) -> Result<AdaptiveCircuit, CircuitError> {
        let c = Self::from_json(s)?;
        c.check()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CircuitDoc::from_circuit(self)).expect("circuit documents always serialize")
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(CircuitDoc::from_circuit(self)).expect("circuit documents always serialize")
    }

    pub fn from_value(v: serde_json::Value) -> Result<AdaptiveCircuit, CircuitError> {
        let doc: CircuitDoc = serde_json::from_value(v).map_err(|e| CircuitError::Json(e.to_string()))?;
        doc.into_circuit()
    }
}

// Interchange format.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    version: u32,
    n: usize,
    layers: Vec<LayerDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerDoc {
    ops: Vec<OpDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpDoc {
    kind: String,
    targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    params: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outcome_id: Option<OutcomeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parity_of: Option<Vec<Vec<OutcomeId>>>,
}

fn axis_name(p: Pauli1) -> &'static str {
    match p {
        Pauli1::I => "I",
        Pauli1::X => "X",
        Pauli1::Y => "Y",
        Pauli1::Z => "Z",
    }
}

fn axis_from_name(s: &str) -> Option<Pauli1> {
    match s {
        "X" => Some(Pauli1::X),
        "Y" => Some(Pauli1::Y),
        "Z" => Some(Pauli1::Z),
        _ => None,
    }
}

impl OpDoc {
    fn from_op(op: &PrimOp) -> OpDoc {
        let mut d =
            OpDoc { kind: String::new(), targets: op.targets(), params: vec![], outcome_id: None, parity_of: None };
        match op {
            PrimOp::PrepZero(_) => d.kind = "prep_zero".into(),
            PrimOp::PrepMagic(_) => d.kind = "prep_magic".into(),
            PrimOp::Clifford1(g, _) => {
                d.kind = "clifford1".into();
                d.params = vec![g.name().into()];
            }
            PrimOp::Clifford2(g, _, _) => {
                d.kind = "clifford2".into();
                d.params = vec![g.name().into()];
            }
            PrimOp::MeasureZ { outcome, .. } => {
                d.kind = "measure_z".into();
                d.outcome_id = Some(*outcome);
            }
            PrimOp::CtrlPauli { terms, .. } => {
                d.kind = "ctrl_pauli".into();
                d.params = terms.iter().map(|(p, _)| axis_name(*p).into()).collect();
                d.parity_of = Some(terms.iter().map(|(_, s)| s.clone()).collect());
            }
            PrimOp::CtrlGeneral { descriptor, inputs, .. } => {
                d.kind = "ctrl_general".into();
                d.params = vec![descriptor.clone()];
                d.parity_of = Some(vec![inputs.clone()]);
            }
        }
        d
    }

    fn into_op(self, layer: usize, op: usize) -> Result<PrimOp, CircuitError> {
        let err = |msg: String| CircuitError::Op { layer, op, msg };
        let arity = |k: usize| -> Result<(), CircuitError> {
            if self.targets.len() == k {
                Ok(())
            } else {
                Err(err(format!("{} takes {k} target(s), got {}", self.kind, self.targets.len())))
            }
        };
        let one_param = || -> Result<&str, CircuitError> {
            match self.params.as_slice() {
                [p] => Ok(p.as_str()),
                _ => Err(err(format!("{} takes exactly one param", self.kind))),
            }
        };
        let t = &self.targets;
        Ok(match self.kind.as_str() {
            "prep_zero" => {
                arity(1)?;
                PrimOp::PrepZero(t[0])
            }
            "prep_magic" => {
                arity(1)?;
                PrimOp::PrepMagic(t[0])
            }
            "clifford1" => {
                arity(1)?;
                let name = one_param()?;
                let g = Gate1::from_name(name).ok_or_else(|| err(format!("unknown one-qubit gate {name:?}")))?;
                PrimOp::Clifford1(g, t[0])
            }
            "clifford2" => {
                arity(2)?;
                let name = one_param()?;
                let g = Gate2::from_name(name).ok_or_else(|| err(format!("unknown two-qubit gate {name:?}")))?;
                PrimOp::Clifford2(g, t[0], t[1])
            }
            "measure_z" => {
                arity(1)?;
                let outcome = self.outcome_id.ok_or_else(|| err("measure_z needs outcome_id".into()))?;
                PrimOp::MeasureZ { qubit: t[0], outcome }
            }
            "ctrl_pauli" => {
                arity(1)?;
                let sets = self.parity_of.clone().ok_or_else(|| err("ctrl_pauli needs parity_of".into()))?;
                if sets.len() != self.params.len() || sets.is_empty() {
                    return Err(err("ctrl_pauli needs one parity set per axis".into()));
                }
                let mut terms = Vec::new();
                for (p, s) in self.params.iter().zip(sets) {
                    let axis = axis_from_name(p).ok_or_else(|| err(format!("unknown axis {p:?}")))?;
                    terms.push((axis, s));
                }
                PrimOp::CtrlPauli { target: t[0], terms }
            }
            "ctrl_general" => {
                let descriptor = one_param()?.to_string();
                let inputs = match self.parity_of.as_deref() {
                    None => Vec::new(),
                    Some([s]) => s.clone(),
                    Some(_) => return Err(err("ctrl_general takes one input list".into())),
                };
                PrimOp::CtrlGeneral { targets: t.clone(), descriptor, inputs }
            }
            other => return Err(err(format!("unknown op kind {other:?}"))),
        })
    }
}

impl CircuitDoc {
    fn from_circuit(c: &AdaptiveCircuit) -> Self {
        CircuitDoc {
            version: FORMAT_VERSION,
            n: c.n,
            layers: c.layers.iter().map(|l| LayerDoc { ops: l.ops.iter().map(OpDoc::from_op).collect() }).collect(),
        }
    }

    fn into_circuit(self) -> Result<AdaptiveCircuit, CircuitError> {
        if self.version != FORMAT_VERSION {
            return Err(CircuitError::Version(self.version));
        }
        let mut layers = Vec::with_capacity(self.layers.len());
        for (t, l) in self.layers.into_iter().enumerate() {
            let ops = l.ops.into_iter().enumerate().map(|(i, o)| o.into_op(t, i)).collect::<Result<_, _>>()?;
            layers.push(Layer { ops });
        }
        Ok(AdaptiveCircuit { n: self.n, layers })
    }
}

/// A layer rewritten as one (possibly identity) two-qubit operation per pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerPairing {
    pub pairs: Vec<(usize, usize)>,
    /// Ops of the layer acting inside each pair, in their original order.
    pub ops: Vec<Vec<PrimOp>>,
}

/// Two-qubit ops give their own pairs; the remaining qubits are paired
/// consecutively, single-op qubits first (ascending), then idle qubits.
pub fn extract_layer_pairing(layer: &Layer, n: usize) -> Result<LayerPairing, CircuitError> {
    if n % 2 == 1 {
        return Err(CircuitError::OddQubitCount(n));
    }
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, op) in layer.ops.iter().enumerate() {
        for q in op.targets() {
            if q >= n {
                return Err(CircuitError::Invalid(format!("qubit {q} out of range for n = {n}")));
            }
            if owner.insert(q, i).is_some() {
                return Err(CircuitError::Invalid(format!("qubit {q} is used twice in one layer")));
            }
        }
    }
    let mut pairs = Vec::new();
    let mut ops = Vec::new();
    for op in &layer.ops {
        let t = op.targets();
        if t.len() == 2 {
            pairs.push((t[0], t[1]));
            ops.push(vec![op.clone()]);
        }
    }
    let singles: Vec<usize> =
        owner.iter().filter(|(_, &i)| layer.ops[i].targets().len() == 1).map(|(&q, _)| q).collect();
    let idle: Vec<usize> = (0..n).filter(|q| !owner.contains_key(q)).collect();
    let rest: Vec<usize> = singles.into_iter().chain(idle).collect();
    for c in rest.chunks(2) {
        pairs.push((c[0], c[1]));
        ops.push(c.iter().filter_map(|q| owner.get(q).map(|&i| layer.ops[i].clone())).collect());
    }
    Ok(LayerPairing { pairs, ops })
}

/// Knobs for `random_adaptive_circuit`.
#[derive(Clone, Copy, Debug)]
pub struct RandomCircuitConfig {
    pub n: usize,
    pub depth: usize,
    pub max_measurements: usize,
    /// Probability that a free qubit receives some operation.
    pub density: f64,
}

/// Random Clifford adaptive circuit over the full generating set, with
/// measurements, resets and parity-controlled corrections of earlier outcomes.
pub fn random_adaptive_circuit<R: Rng + ?Sized>(cfg: RandomCircuitConfig, rng: &mut R) -> AdaptiveCircuit {
    let mut c = AdaptiveCircuit::new(cfg.n);
    let mut outcomes: Vec<OutcomeId> = Vec::new();
    let mut next_id: OutcomeId = 0;
    for _ in 0..cfg.depth {
        let mut free: Vec<usize> = (0..cfg.n).collect();
        free.shuffle(rng);
        let mut ops = Vec::new();
        let mut produced = Vec::new();
        while let Some(q) = free.pop() {
            if !rng.gen_bool(cfg.density) {
                continue;
            }
            let roll = rng.gen_range(0..100);
            let op = if roll < 35 && !free.is_empty() {
                let b = free.pop().unwrap();
                PrimOp::Clifford2(*Gate2::ALL.choose(rng).unwrap(), q, b)
            } else if roll < 65 {
                PrimOp::Clifford1(*Gate1::ALL.choose(rng).unwrap(), q)
            } else if roll < 80 && next_id < cfg.max_measurements as OutcomeId {
                produced.push(next_id);
                next_id += 1;
                PrimOp::MeasureZ { qubit: q, outcome: next_id - 1 }
            } else if roll < 93 && !outcomes.is_empty() {
                let mut terms = Vec::new();
                for axis in [Pauli1::X, Pauli1::Z] {
                    if rng.gen_bool(0.6) {
                        let k = rng.gen_range(1..=outcomes.len().min(3));
                        let mut s: Vec<OutcomeId> = outcomes.choose_multiple(rng, k).copied().collect();
                        s.sort_unstable();
                        terms.push((axis, s));
                    }
                }
                if terms.is_empty() {
                    terms.push((Pauli1::Y, vec![*outcomes.choose(rng).unwrap()]));
                }
                PrimOp::CtrlPauli { target: q, terms }
            } else {
                PrimOp::PrepZero(q)
            };
            ops.push(op);
        }
        outcomes.extend(produced);
        c.push(ops);
    }
    c
}
