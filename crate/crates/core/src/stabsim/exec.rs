//! Running adaptive circuits on a tableau: sampled, symbolic, or by full
//! branch enumeration with exact dyadic probabilities.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use rand::Rng;

use crate::circuit::{AdaptiveCircuit, OutcomeId, PrimOp};
use crate::noise::ErrorSchedule;
use crate::pauli::{CliffordGate, Pauli1, PauliOp};

use super::tableau::{Affine, MeasureStart, Sign, Tableau};
use super::StabError;

/// Largest number of potentially random events (measurements and resets)
/// that `run_all_branches` will enumerate.
pub const BRANCH_BUDGET: usize = 20;

#[derive(Clone, Debug)]
enum Instr {
    Gate(CliffordGate),
    Error(PauliOp),
    Prep(usize),
    Measure(usize, usize),
    Ctrl(usize, Vec<(Pauli1, Vec<usize>)>),
}

/// A validated Clifford circuit with its error schedule interleaved and
/// outcome ids mapped to dense slots.
#[derive(Clone, Debug)]
pub struct Program {
    n: usize,
    instrs: Vec<Instr>,
    ids: Vec<OutcomeId>,
    events: usize,
}

impl Program {
    pub fn compile(c: &AdaptiveCircuit, schedule: Option<&ErrorSchedule>) -> Result<Program, StabError> {
        c.check().map_err(|e| StabError::InvalidCircuit(e.to_string()))?;
        if let Some((layer, op)) = c.first_non_clifford() {
            return Err(StabError::NonClifford { layer, op, what: c.layers[layer].ops[op].to_string() });
        }
        if let Some(s) = schedule {
            s.check(c.n, c.depth()).map_err(|e| StabError::Schedule(e.to_string()))?;
        }
        let mut slot: HashMap<OutcomeId, usize> = HashMap::new();
        let mut ids = Vec::new();
        let mut instrs = Vec::new();
        let mut events = 0;
        let err = |t: usize, instrs: &mut Vec<Instr>| {
            if let Some(e) = schedule.map(|s| &s.errors[t]).filter(|e| !e.is_identity()) {
                instrs.push(Instr::Error(e.clone()));
            }
        };
        err(0, &mut instrs);
        for (t, layer) in c.layers.iter().enumerate() {
            for op in &layer.ops {
                match op {
                    PrimOp::PrepZero(q) => {
                        events += 1;
                        instrs.push(Instr::Prep(*q));
                    }
                    PrimOp::Clifford1(..) | PrimOp::Clifford2(..) => {
                        instrs.push(Instr::Gate(op.as_clifford_gate().unwrap()));
                    }
                    PrimOp::MeasureZ { qubit, outcome } => {
                        events += 1;
                        let s = ids.len();
                        slot.insert(*outcome, s);
                        ids.push(*outcome);
                        instrs.push(Instr::Measure(*qubit, s));
                    }
                    PrimOp::CtrlPauli { target, terms } => {
                        let terms = terms.iter().map(|(p, set)| (*p, set.iter().map(|o| slot[o]).collect())).collect();
                        instrs.push(Instr::Ctrl(*target, terms));
                    }
                    PrimOp::PrepMagic(_) | PrimOp::CtrlGeneral { .. } => unreachable!("rejected above"),
                }
            }
            err(t + 1, &mut instrs);
        }
        Ok(Program { n: c.n, instrs, ids, events })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Outcome ids in the order they are produced.
    pub fn outcome_ids(&self) -> &[OutcomeId] {
        &self.ids
    }

    /// Measurements plus resets: an upper bound on the random events of one run.
    pub fn random_events(&self) -> usize {
        self.events
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PendingKind {
    Measure(usize),
    Prep,
}

/// Resumable execution: `advance` runs until the next random measurement,
/// `resolve` feeds its outcome.
#[derive(Clone)]
pub struct Executor<'p, S> {
    prog: &'p Program,
    pc: usize,
    tab: Tableau<S>,
    outcomes: Vec<Option<S>>,
    pending: Option<(usize, usize, PendingKind)>,
}

impl<'p, S: Sign> Executor<'p, S> {
    pub fn new(prog: &'p Program) -> Self {
        Self::with_state(prog, Tableau::new(prog.n))
    }

    pub fn with_state(prog: &'p Program, tab: Tableau<S>) -> Self {
        assert_eq!(tab.n(), prog.n, "initial state size must match the program");
        Executor { prog, pc: 0, tab, outcomes: vec![None; prog.ids.len()], pending: None }
    }

    fn finish_event(&mut self, q: usize, kind: PendingKind, value: S) {
        match kind {
            PendingKind::Measure(s) => self.outcomes[s] = Some(value),
            // reset: flip back to |0> when the outcome was 1
            PendingKind::Prep => self.tab.apply_ctrl_pauli(q, Pauli1::X, &value),
        }
    }

    /// Returns true when a random outcome is pending, false when the program finished.
    pub fn advance(&mut self) -> bool {
        assert!(self.pending.is_none(), "resolve the pending measurement first");
        while self.pc < self.prog.instrs.len() {
            let ins = &self.prog.instrs[self.pc];
            self.pc += 1;
            match ins {
                Instr::Gate(g) => self.tab.apply_gate(g).expect("compiled programs are in range"),
                Instr::Error(e) => self.tab.apply_pauli(e).expect("schedule checked at compile time"),
                Instr::Ctrl(q, terms) => {
                    for (p, set) in terms {
                        let mut cond = S::constant(false);
                        for &s in set {
                            cond.add_assign(self.outcomes[s].as_ref().expect("causality checked at compile time"));
                        }
                        if cond.as_const() != Some(false) {
                            self.tab.apply_ctrl_pauli(*q, *p, &cond);
                        }
                    }
                }
                Instr::Prep(q) | Instr::Measure(q, _) => {
                    let kind = match ins {
                        Instr::Measure(_, s) => PendingKind::Measure(*s),
                        _ => PendingKind::Prep,
                    };
                    let q = *q;
                    match self.tab.measure_start(q) {
                        MeasureStart::Deterministic(v) => self.finish_event(q, kind, v),
                        MeasureStart::Random(p) => {
                            self.pending = Some((q, p, kind));
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    pub fn resolve(&mut self, value: S) {
        let (q, p, kind) = self.pending.take().expect("no pending measurement");
        self.tab.measure_finish(q, p, value.clone());
        self.finish_event(q, kind, value);
    }

    pub fn tableau(&self) -> &Tableau<S> {
        &self.tab
    }

    pub fn into_parts(self) -> (Tableau<S>, Vec<S>) {
        let outs = self.outcomes.into_iter().map(|o| o.expect("every measurement executed")).collect();
        (self.tab, outs)
    }
}

/// Outcome bits, in the order the measurements were executed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OutcomeRecord {
    pub ids: Vec<OutcomeId>,
    pub bits: Vec<bool>,
}

impl OutcomeRecord {
    pub fn get(&self, id: OutcomeId) -> Option<bool> {
        self.ids.iter().position(|&i| i == id).map(|k| self.bits[k])
    }

    /// Bits of the listed ids as a '0'/'1' string.
    pub fn project(&self, ids: &[OutcomeId]) -> Result<String, StabError> {
        ids.iter()
            .map(|&i| self.get(i).map(|b| if b { '1' } else { '0' }).ok_or(StabError::UnknownOutcome(i)))
            .collect()
    }
}

/// Samples one run with fair coins from `rng`.
pub fn run_program<R: Rng + ?Sized>(prog: &Program, rng: &mut R) -> (Tableau<bool>, OutcomeRecord) {
    let mut ex = Executor::<bool>::new(prog);
    while ex.advance() {
        ex.resolve(rng.gen());
    }
    let (tab, bits) = ex.into_parts();
    (tab, OutcomeRecord { ids: prog.ids.clone(), bits })
}

pub fn run<R: Rng + ?Sized>(
    c: &AdaptiveCircuit,
    schedule: Option<&ErrorSchedule>,
    rng: &mut R,
) -> Result<(Tableau<bool>, OutcomeRecord), StabError> {
    let prog = Program::compile(c, schedule)?;
    Ok(run_program(&prog, rng))
}

/// One run in which every random outcome is a fresh variable, so the final
/// signs and recorded outcomes describe all branches at once.
#[derive(Clone, Debug)]
pub struct SymbolicRun {
    pub tableau: Tableau<Affine>,
    pub ids: Vec<OutcomeId>,
    pub outcomes: Vec<Affine>,
    pub num_vars: usize,
}

impl SymbolicRun {
    pub fn outcome(&self, id: OutcomeId) -> Result<&Affine, StabError> {
        self.ids.iter().position(|&i| i == id).map(|k| &self.outcomes[k]).ok_or(StabError::UnknownOutcome(id))
    }
}

pub fn run_symbolic_program(prog: &Program, init: Tableau<Affine>) -> SymbolicRun {
    let mut ex = Executor::with_state(prog, init);
    let mut fresh = 0;
    while ex.advance() {
        ex.resolve(Affine::var(fresh));
        fresh += 1;
    }
    let (tableau, outcomes) = ex.into_parts();
    SymbolicRun { tableau, ids: prog.ids.clone(), outcomes, num_vars: fresh }
}

pub fn run_symbolic(c: &AdaptiveCircuit, schedule: Option<&ErrorSchedule>) -> Result<SymbolicRun, StabError> {
    let prog = Program::compile(c, schedule)?;
    Ok(run_symbolic_program(&prog, Tableau::new(c.n)))
}

/// Probability numerator / 2^log2_den, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dyadic {
    pub numerator: u64,
    pub log2_den: u32,
}

impl Dyadic {
    pub fn new(numerator: u64, log2_den: u32) -> Self {
        let mut d = Dyadic { numerator, log2_den };
        while d.log2_den > 0 && d.numerator % 2 == 0 {
            d.numerator /= 2;
            d.log2_den -= 1;
        }
        if d.numerator == 0 {
            d.log2_den = 0;
        }
        d
    }

    pub fn add(self, other: Dyadic) -> Dyadic {
        let k = self.log2_den.max(other.log2_den);
        Dyadic::new((self.numerator << (k - self.log2_den)) + (other.numerator << (k - other.log2_den)), k)
    }

    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / 2f64.powi(self.log2_den as i32)
    }
}

/// One point of the exact joint law of (outcomes, output stabilizer group).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub outcomes: Vec<bool>,
    /// Canonical generators of the output state with their signs.
    pub group: Vec<(PauliOp, bool)>,
    pub prob: Dyadic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchDistribution {
    pub ids: Vec<OutcomeId>,
    pub branches: Vec<Branch>,
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl BranchDistribution {
    pub fn total(&self) -> Dyadic {
        self.branches.iter().fold(Dyadic::new(0, 0), |acc, b| acc.add(b.prob))
    }

    /// Exact marginal law of the listed outcome ids, keyed by '0'/'1' strings.
    pub fn marginal(&self, ids: &[OutcomeId]) -> Result<BTreeMap<String, Dyadic>, StabError> {
        let pos: Vec<usize> = ids
            .iter()
            .map(|&i| self.ids.iter().position(|&j| j == i).ok_or(StabError::UnknownOutcome(i)))
            .collect::<Result<_, _>>()?;
        let mut out: BTreeMap<String, Dyadic> = BTreeMap::new();
        for b in &self.branches {
            let key = bits_string(&pos.iter().map(|&k| b.outcomes[k]).collect::<Vec<_>>());
            let e = out.entry(key).or_insert(Dyadic::new(0, 0));
            *e = e.add(b.prob);
        }
        Ok(out)
    }

    /// CSV with columns outcome_string, numerator, log2_denominator, one row
    /// per outcome string (output states summed over).
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["outcome_string", "numerator", "log2_denominator"])?;
        let m = self.marginal(&self.ids.clone()).expect("own ids");
        for (k, d) in m {
            out.write_record([k, d.numerator.to_string(), d.log2_den.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Exact enumeration of every measurement branch. Branches with equal
/// outcomes and equal output states are merged.
pub fn run_all_branches(
    c: &AdaptiveCircuit,
    schedule: Option<&ErrorSchedule>,
) -> Result<BranchDistribution, StabError> {
    let prog = Program::compile(c, schedule)?;
    branches_of_program(&prog, Tableau::new(c.n))
}

pub fn branches_of_program(prog: &Program, init: Tableau<bool>) -> Result<BranchDistribution, StabError> {
    if prog.events > BRANCH_BUDGET {
        return Err(StabError::BranchBudget { events: prog.events, limit: BRANCH_BUDGET });
    }
    let mut merged: BTreeMap<(Vec<bool>, Vec<(String, bool)>), (Vec<(PauliOp, bool)>, Dyadic)> = BTreeMap::new();
    let mut stack = vec![(Executor::with_state(prog, init), 0u32)];
    while let Some((mut ex, depth)) = stack.pop() {
        if ex.advance() {
            let mut other = ex.clone();
            other.resolve(true);
            ex.resolve(false);
            stack.push((other, depth + 1));
            stack.push((ex, depth + 1));
            continue;
        }
        let (tab, outs) = ex.into_parts();
        let group = tab.canonical_stabilizers();
        let key = (outs, group.iter().map(|(p, s)| (p.to_hex(), *s)).collect());
        let e = merged.entry(key).or_insert((group, Dyadic::new(0, 0)));
        e.1 = e.1.add(Dyadic::new(1, depth));
    }
    let branches = merged.into_iter().map(|((outcomes, _), (group, prob))| Branch { outcomes, group, prob }).collect();
    Ok(BranchDistribution { ids: prog.ids.clone(), branches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Gate1, Gate2};
    use crate::rng::SeedStream;

    fn m(q: usize, o: OutcomeId) -> PrimOp {
        PrimOp::MeasureZ { qubit: q, outcome: o }
    }

    fn bell_measured() -> AdaptiveCircuit {
        let mut c = AdaptiveCircuit::new(2);
        c.push(vec![PrimOp::Clifford1(Gate1::H, 0)]);
        c.push(vec![PrimOp::Clifford2(Gate2::Cnot, 0, 1)]);
        c.push(vec![m(0, 0), m(1, 1)]);
        c
    }

    #[test]
    fn prep_measure_examples() {
        let mut c = AdaptiveCircuit::new(1);
        c.push(vec![PrimOp::PrepZero(0)]);
        c.push(vec![m(0, 0)]);
        let mut rng = SeedStream::new(1).rng(0);
        for _ in 0..20 {
            assert_eq!(run(&c, None, &mut rng).unwrap().1.get(0), Some(false));
        }
        let x = ErrorSchedule::single(1, 2, 1, PauliOp::single(1, 0, Pauli1::X));
        assert_eq!(run(&c, Some(&x), &mut rng).unwrap().1.get(0), Some(true));
        let z = ErrorSchedule::single(1, 2, 1, PauliOp::single(1, 0, Pauli1::Z));
        assert_eq!(run(&c, Some(&z), &mut rng).unwrap().1.get(0), Some(false));
        let d = run_all_branches(&c, None).unwrap();
        assert_eq!(d.branches.len(), 1);
        assert_eq!(d.branches[0].prob, Dyadic::new(1, 0));
    }

    #[test]
    fn bell_outcomes_are_equal_and_fair() {
        let c = bell_measured();
        let prog = Program::compile(&c, None).unwrap();
        let mut rng = SeedStream::new(2).rng(0);
        let trials = 10_000;
        let mut ones = 0;
        for _ in 0..trials {
            let (_, r) = run_program(&prog, &mut rng);
            assert_eq!(r.bits[0], r.bits[1]);
            ones += r.bits[0] as u32;
        }
        let sd = (0.25f64 / trials as f64).sqrt();
        assert!((ones as f64 / trials as f64 - 0.5).abs() <= 3.0 * sd);
        let d = run_all_branches(&c, None).unwrap();
        let marg = d.marginal(&[0, 1]).unwrap();
        assert_eq!(marg.len(), 2);
        assert_eq!(marg["00"], Dyadic::new(1, 1));
        assert_eq!(marg["11"], Dyadic::new(1, 1));
        assert_eq!(d.total(), Dyadic::new(1, 0));
    }

    #[test]
    fn reset_of_entangled_qubit_mixes_the_partner() {
        let mut c = AdaptiveCircuit::new(2);
        c.push(vec![PrimOp::Clifford1(Gate1::H, 0)]);
        c.push(vec![PrimOp::Clifford2(Gate2::Cnot, 0, 1)]);
        c.push(vec![PrimOp::PrepZero(0)]);
        let d = run_all_branches(&c, None).unwrap();
        assert!(d.ids.is_empty());
        assert_eq!(d.branches.len(), 2);
        assert!(d.branches.iter().all(|b| b.prob == Dyadic::new(1, 1)));
    }

    #[test]
    fn corrections_use_parities() {
        // teleport qubit 0 (prepared |1>) onto qubit 2
        let mut c = AdaptiveCircuit::new(3);
        c.push(vec![PrimOp::Clifford1(Gate1::X, 0), PrimOp::Clifford1(Gate1::H, 1)]);
        c.push(vec![PrimOp::Clifford2(Gate2::Cnot, 1, 2)]);
        c.push(vec![PrimOp::Clifford2(Gate2::Cnot, 0, 1)]);
        c.push(vec![PrimOp::Clifford1(Gate1::H, 0), m(1, 7)]);
        c.push(vec![m(0, 3)]);
        c.push(vec![PrimOp::CtrlPauli { target: 2, terms: vec![(Pauli1::X, vec![7]), (Pauli1::Z, vec![3])] }]);
        let d = run_all_branches(&c, None).unwrap();
        assert_eq!(d.branches.len(), 4);
        for b in &d.branches {
            assert_eq!(b.prob, Dyadic::new(1, 2));
        }
        let s = run_symbolic(&c, None).unwrap();
        assert_eq!(s.num_vars, 2);
        let z2 = PauliOp::single(3, 2, Pauli1::Z);
        assert_eq!(s.tableau.stabilizer_sign_of(&z2), Some(Affine::constant(true)));
    }

    #[test]
    fn non_clifford_and_budget_errors() {
        let mut c = AdaptiveCircuit::new(1);
        c.push(vec![PrimOp::PrepMagic(0)]);
        assert!(matches!(run_all_branches(&c, None), Err(StabError::NonClifford { layer: 0, op: 0, .. })));
        let mut c = AdaptiveCircuit::new(1);
        for i in 0..21 {
            c.push(vec![m(0, i)]);
        }
        assert!(matches!(run_all_branches(&c, None), Err(StabError::BranchBudget { events: 21, .. })));
        let bad = ErrorSchedule::identity(1, 3);
        assert!(matches!(run(&c, Some(&bad), &mut SeedStream::new(0).rng(0)), Err(StabError::Schedule(_))));
    }

    #[test]
    fn csv_dump() {
        let d = run_all_branches(&bell_measured(), None).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "outcome_string,numerator,log2_denominator\n00,1,1\n11,1,1\n");
    }

    #[test]
    fn dyadic_arithmetic() {
        assert_eq!(Dyadic::new(4, 3), Dyadic::new(1, 1));
        assert_eq!(Dyadic::new(1, 2).add(Dyadic::new(1, 2)), Dyadic::new(1, 1));
        assert_eq!(Dyadic::new(0, 5), Dyadic::new(0, 0));
        assert_eq!(Dyadic::new(3, 2).to_f64(), 0.75);
    }
}
