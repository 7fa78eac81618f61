mod common;

use common::{enumerate_branches, oracle_marginal, StateVec};
use proptest::prelude::*;
use qlocal::circuit::{random_adaptive_circuit, AdaptiveCircuit, PrimOp, RandomCircuitConfig};
use qlocal::pauli::{Gate1, Gate2, PauliOp};
use qlocal::stabsim::{run_all_branches, run_program, Program};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn stabilized(state: &StateVec, group: &[(PauliOp, bool)]) -> bool {
    group.iter().all(|(p, neg)| {
        let e = state.expectation(p);
        (e - if *neg { -1.0 } else { 1.0 }).abs() < 1e-8
    })
}

fn compare(circ: &AdaptiveCircuit) {
    let ids = circ.outcome_ids();
    let exact = run_all_branches(circ, None).unwrap();
    let oracle = enumerate_branches(circ);

    let tab = exact.marginal(&ids).unwrap();
    let dense = oracle_marginal(&oracle, &ids);
    for (k, p) in &dense {
        let q = tab.get(k).map_or(0.0, |d| d.to_f64());
        assert!((p - q).abs() < 1e-9, "outcome {k}: dense {p} vs tableau {q}\n{circ:?}");
    }
    assert!(tab.keys().all(|k| dense.contains_key(k)));

    // every dense branch is an eigenstate of some tableau branch with the
    // same outcomes, and the weights agree branch by branch
    let mut claimed = vec![false; oracle.len()];
    for b in &exact.branches {
        let mut mass = 0.0;
        for (i, ob) in oracle.iter().enumerate() {
            let same = ids.iter().zip(&b.outcomes).all(|(id, v)| ob.outcomes[id] == *v);
            if same && stabilized(&ob.state, &b.group) {
                mass += ob.prob;
                claimed[i] = true;
            }
        }
        assert!((mass - b.prob.to_f64()).abs() < 1e-9, "branch {:?}: {mass} vs {}", b.outcomes, b.prob.to_f64());
    }
    assert!(claimed.iter().all(|&c| c), "a dense branch matches no tableau branch\n{circ:?}");
}

#[test]
fn bell_pair_measurements_are_correlated() {
    let mut c = AdaptiveCircuit::new(2);
    c.push(vec![PrimOp::Clifford1(Gate1::H, 0)]);
    c.push(vec![PrimOp::Clifford2(Gate2::Cnot, 0, 1)]);
    c.push(vec![PrimOp::MeasureZ { qubit: 0, outcome: 0 }, PrimOp::MeasureZ { qubit: 1, outcome: 1 }]);
    let m = oracle_marginal(&enumerate_branches(&c), &[0, 1]);
    assert_eq!(m.len(), 2);
    assert!((m["00"] - 0.5).abs() < 1e-12 && (m["11"] - 0.5).abs() < 1e-12);
    compare(&c);
}

#[test]
fn teleportation_with_corrections() {
    use qlocal::pauli::Pauli1;
    // teleport S H |0> from qubit 0 to qubit 2
    let mut c = AdaptiveCircuit::new(3);
    c.push(vec![PrimOp::Clifford1(Gate1::H, 0), PrimOp::Clifford1(Gate1::H, 1)]);
    c.push(vec![PrimOp::Clifford1(Gate1::S, 0), PrimOp::Clifford2(Gate2::Cnot, 1, 2)]);
    c.push(vec![PrimOp::Clifford2(Gate2::Cnot, 0, 1)]);
    c.push(vec![PrimOp::Clifford1(Gate1::H, 0)]);
    c.push(vec![PrimOp::MeasureZ { qubit: 0, outcome: 0 }, PrimOp::MeasureZ { qubit: 1, outcome: 1 }]);
    c.push(vec![PrimOp::CtrlPauli { target: 2, terms: vec![(Pauli1::X, vec![1]), (Pauli1::Z, vec![0])] }]);
    compare(&c);
    for b in enumerate_branches(&c) {
        // +Y on the receiver
        let y = PauliOp::single(3, 2, Pauli1::Y);
        assert!((b.state.expectation(&y) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn sampling_matches_exact_law_within_three_sigma() {
    let shots = 100_000u64;
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let circ = random_adaptive_circuit(
            RandomCircuitConfig { n: 3, depth: 4, max_measurements: 4, density: 0.9 },
            &mut rng,
        );
        let ids = circ.outcome_ids();
        let exact = run_all_branches(&circ, None).unwrap().marginal(&ids).unwrap();
        let prog = Program::compile(&circ, None).unwrap();
        let mut counts = std::collections::BTreeMap::<String, u64>::new();
        for _ in 0..shots {
            let (_, rec) = run_program(&prog, &mut rng);
            *counts.entry(rec.project(&ids).unwrap()).or_default() += 1;
        }
        for k in counts.keys() {
            assert!(exact.contains_key(k), "sampled impossible outcome {k}");
        }
        for (k, d) in &exact {
            let p = d.to_f64();
            let f = *counts.get(k).unwrap_or(&0) as f64 / shots as f64;
            let sigma = (p * (1.0 - p) / shots as f64).sqrt();
            assert!((f - p).abs() <= 3.0 * sigma + 1e-12, "seed {seed} outcome {k}: {f} vs {p}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]
    #[test]
    fn tableau_matches_state_vector(seed in any::<u64>(), n in 1usize..=5, depth in 1usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circ = random_adaptive_circuit(
            RandomCircuitConfig { n, depth, max_measurements: 6, density: 0.9 },
            &mut rng,
        );
        prop_assume!(circ.count_ops(|op| matches!(op, PrimOp::MeasureZ { .. } | PrimOp::PrepZero(_))) <= 12);
        compare(&circ);
    }
}
