//! Exact stabilizer simulation of adaptive Clifford circuits under Pauli errors.

mod exec;
mod tableau;

pub use exec::{
    branches_of_program, run, run_all_branches, run_program, run_symbolic, run_symbolic_program, Branch,
    BranchDistribution, Dyadic, Executor, OutcomeRecord, Program, SymbolicRun, BRANCH_BUDGET,
};
pub use tableau::{signed_string, Affine, MeasureStart, Sign, Tableau};

use thiserror::Error;

use crate::bits::BitVec;
use crate::circuit::OutcomeId;
use crate::pauli::PauliOp;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StabError {
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("non-Clifford operation at layer {layer}, op {op} ({what}); the stabilizer simulator cannot run it")]
    NonClifford { layer: usize, op: usize, what: String },
    #[error("error schedule: {0}")]
    Schedule(String),
    #[error("{events} measurements and resets exceed the branch budget of {limit}")]
    BranchBudget { events: usize, limit: usize },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("outcome id {0} is not produced by the circuit")]
    UnknownOutcome(OutcomeId),
    #[error("{0}")]
    Dimension(String),
}

/// +XX and +ZZ both stabilize qubits (a, b).
pub fn check_bell<S: Sign>(t: &Tableau<S>, a: usize, b: usize) -> bool {
    let n = t.n();
    if a >= n || b >= n || a == b {
        return false;
    }
    let xx = PauliOp::from_bits(BitVec::from_indices(n, [a, b]), BitVec::zeros(n));
    let zz = PauliOp::from_bits(BitVec::zeros(n), BitVec::from_indices(n, [a, b]));
    let plus = Some(S::constant(false));
    t.stabilizer_sign_of(&xx) == plus && t.stabilizer_sign_of(&zz) == plus
}

/// Reduced states of t1 on the first map components and of t2 on the second
/// agree after relabeling. Errors when either side is entangled with the
/// qubits outside the map.
pub fn tableau_equivalent_under_relabeling<S: Sign>(
    t1: &Tableau<S>,
    t2: &Tableau<S>,
    map: &[(usize, usize)],
) -> Result<bool, StabError> {
    let k1: Vec<usize> = map.iter().map(|p| p.0).collect();
    let k2: Vec<usize> = map.iter().map(|p| p.1).collect();
    Ok(t1.reduced_group(&k1)? == t2.reduced_group(&k2)?)
}

/// The law of a vector of affine forms in uniform independent variables:
/// uniform on offset + span(basis). Both parts are in canonical form, so two
/// laws are equal iff the images are equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineImage {
    pub basis: Vec<BitVec>,
    pub offset: BitVec,
}

impl AffineImage {
    pub fn of(forms: &[Affine]) -> Self {
        let k = forms.len();
        let nv = forms.iter().flat_map(|f| f.vars()).max().map_or(0, |m| m + 1);
        let mut cols = vec![BitVec::zeros(k); nv];
        for (i, f) in forms.iter().enumerate() {
            for v in f.vars() {
                cols[v].set(i, true);
            }
        }
        let mut basis: Vec<BitVec> = Vec::new();
        for mut c in cols {
            for b in &basis {
                if c.get(b.first_one().unwrap()) {
                    c.xor_assign(b);
                }
            }
            if let Some(p) = c.first_one() {
                for b in basis.iter_mut() {
                    if b.get(p) {
                        b.xor_assign(&c);
                    }
                }
                basis.push(c);
            }
        }
        basis.sort_by_key(|b| b.first_one());
        let mut offset = BitVec::from_bools(&forms.iter().map(|f| f.c).collect::<Vec<_>>());
        for b in &basis {
            if offset.get(b.first_one().unwrap()) {
                offset.xor_assign(b);
            }
        }
        AffineImage { basis, offset }
    }

    /// The law is uniform on 2^dimension points.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, point: &BitVec) -> bool {
        let mut p = point.clone();
        p.xor_assign(&self.offset);
        for b in &self.basis {
            if p.get(b.first_one().unwrap()) {
                p.xor_assign(b);
            }
        }
        p.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equal,
    /// The joint outcome law already differs on the ids up to this one.
    OutcomesDiffer {
        first_id: OutcomeId,
    },
    StateDiffers(String),
}

/// Exact comparison of two symbolic runs: the joint law of the listed
/// outcomes together with the reduced output state on `keep_a` / `keep_b`.
pub fn symbolic_equivalent(
    a: &SymbolicRun,
    b: &SymbolicRun,
    ids: &[OutcomeId],
    keep_a: &[usize],
    keep_b: &[usize],
) -> Result<Equivalence, StabError> {
    let fa: Vec<Affine> = ids.iter().map(|&i| a.outcome(i).cloned()).collect::<Result<_, _>>()?;
    let fb: Vec<Affine> = ids.iter().map(|&i| b.outcome(i).cloned()).collect::<Result<_, _>>()?;
    if AffineImage::of(&fa) != AffineImage::of(&fb) {
        let k = (1..=ids.len()).find(|&k| AffineImage::of(&fa[..k]) != AffineImage::of(&fb[..k])).unwrap();
        return Ok(Equivalence::OutcomesDiffer { first_id: ids[k - 1] });
    }
    let ga = a.tableau.reduced_group(keep_a)?;
    let gb = b.tableau.reduced_group(keep_b)?;
    for (k, ((pa, _), (pb, _))) in ga.iter().zip(&gb).enumerate() {
        if pa != pb {
            return Ok(Equivalence::StateDiffers(format!(
                "canonical generator {k} is {} vs {}",
                signed_string(pa, false),
                signed_string(pb, false)
            )));
        }
    }
    let mut ja = fa;
    let mut jb = fb;
    ja.extend(ga.into_iter().map(|(_, s)| s));
    jb.extend(gb.into_iter().map(|(_, s)| s));
    if AffineImage::of(&ja) != AffineImage::of(&jb) {
        return Ok(Equivalence::StateDiffers("output signs differ or correlate differently with the outcomes".into()));
    }
    Ok(Equivalence::Equal)
}
