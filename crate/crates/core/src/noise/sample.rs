use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitVec;
use crate::pauli::{PauliOp, SupportSet};
use crate::rng::SeedStream;

use super::{NoiseError, NoiseStrength};

/// Uniform X, Y or Z as (x, z) bits.
pub fn random_nonidentity<R: Rng + ?Sized>(rng: &mut R) -> (bool, bool) {
    match rng.gen_range(0..3) {
        0 => (true, false),
        1 => (true, true),
        _ => (false, true),
    }
}

/// Each qubit is hit independently with probability p by a uniform X, Y or Z.
pub fn sample_iid_noise<R: Rng + ?Sized>(n: usize, p: NoiseStrength, rng: &mut R) -> PauliOp {
    let mut x = BitVec::zeros(n);
    let mut z = BitVec::zeros(n);
    if p.value() > 0.0 {
        for q in 0..n {
            if rng.gen_bool(p.value()) {
                let (a, b) = random_nonidentity(rng);
                x.set(q, a);
                z.set(q, b);
            }
        }
    }
    PauliOp::from_bits(x, z)
}

/// Correlated sampler: qubits (2i, 2i+1) are hit together with probability p^2
/// and never alone, so Pr[F in supp] <= p^|F| holds while the support is far
/// from independent. A trailing odd qubit is hit alone with probability p.
pub fn sample_burst_noise<R: Rng + ?Sized>(n: usize, p: NoiseStrength, rng: &mut R) -> PauliOp {
    let mut x = BitVec::zeros(n);
    let mut z = BitVec::zeros(n);
    let pv = p.value();
    let mut hit = |q: usize, rng: &mut R| {
        let (a, b) = random_nonidentity(rng);
        x.set(q, a);
        z.set(q, b);
    };
    for i in 0..n / 2 {
        if pv > 0.0 && rng.gen_bool(pv * pv) {
            hit(2 * i, rng);
            hit(2 * i + 1, rng);
        }
    }
    if n % 2 == 1 && pv > 0.0 && rng.gen_bool(pv) {
        hit(n - 1, rng);
    }
    PauliOp::from_bits(x, z)
}

/// `count` uniformly random subsets of [n] of the given size.
pub fn sample_subsets<R: Rng + ?Sized>(n: usize, size: usize, count: usize, rng: &mut R) -> Vec<SupportSet> {
    (0..count).map(|_| SupportSet::new(rand::seq::index::sample(rng, n, size).into_vec())).collect()
}

/// One-sided test: empirical <= bound + sigma * sqrt(bound (1 - bound) / samples).
pub fn one_sided_pass(empirical: f64, bound: f64, samples: u64, sigma: f64) -> bool {
    let sd = (bound * (1.0 - bound) / samples as f64).sqrt();
    empirical <= bound + sigma * sd
}

/// Counts, for a fixed list of subsets F, how many samples have F inside their support.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportCounter {
    pub subsets: Vec<SupportSet>,
    pub hits: Vec<u64>,
    pub samples: u64,
}

impl SupportCounter {
    pub fn new(subsets: Vec<SupportSet>) -> Self {
        let hits = vec![0; subsets.len()];
        SupportCounter { subsets, hits, samples: 0 }
    }

    pub fn add(&mut self, e: &PauliOp) {
        let supp = e.support_bits();
        self.samples += 1;
        if supp.is_zero() {
            return;
        }
        for (s, h) in self.subsets.iter().zip(self.hits.iter_mut()) {
            if s.0.iter().all(|&q| supp.get(q)) {
                *h += 1;
            }
        }
    }

    pub fn merge(&mut self, other: &SupportCounter) {
        assert_eq!(self.subsets, other.subsets, "merging counters over different subsets");
        for (a, b) in self.hits.iter_mut().zip(&other.hits) {
            *a += *b;
        }
        self.samples += other.samples;
    }

    /// Rows against the bound q^|F|, with a `trial_block` label.
    pub fn rows(&self, label: &str, q: NoiseStrength, sigma: f64) -> Vec<LsRow> {
        self.rows_with(label, sigma, |size| q.value().powi(size as i32))
    }

    pub fn rows_with(&self, label: &str, sigma: f64, bound: impl Fn(usize) -> f64) -> Vec<LsRow> {
        self.subsets
            .iter()
            .zip(&self.hits)
            .map(|(s, &h)| {
                let empirical = if self.samples == 0 { 0.0 } else { h as f64 / self.samples as f64 };
                let b = bound(s.len());
                LsRow {
                    trial_block: label.to_string(),
                    subset_size: s.len(),
                    subset: s.clone(),
                    hits: h,
                    samples: self.samples,
                    empirical_prob: empirical,
                    bound: b,
                    pass: one_sided_pass(empirical, b, self.samples.max(1), sigma),
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LsRow {
    pub trial_block: String,
    pub subset_size: usize,
    pub subset: SupportSet,
    pub hits: u64,
    pub samples: u64,
    pub empirical_prob: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct LsReport {
    pub rows: Vec<LsRow>,
}

impl LsReport {
    /// Pass/fail per subset size, ascending.
    pub fn per_size(&self) -> Vec<(usize, bool)> {
        let mut sizes: Vec<usize> = self.rows.iter().map(|r| r.subset_size).collect();
        sizes.sort_unstable();
        sizes.dedup();
        sizes.into_iter().map(|s| (s, self.rows.iter().filter(|r| r.subset_size == s).all(|r| r.pass))).collect()
    }

    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn first_failure(&self) -> Option<&LsRow> {
        self.rows.iter().find(|r| !r.pass)
    }

    /// Columns: trial_block, subset_size, subset, empirical_prob, bound, pass.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["trial_block", "subset_size", "subset", "empirical_prob", "bound", "pass"])?;
        for r in &self.rows {
            out.write_record([
                r.trial_block.clone(),
                r.subset_size.to_string(),
                r.subset.to_string(),
                r.empirical_prob.to_string(),
                r.bound.to_string(),
                r.pass.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Uniform over the 4^n - 1 non-identity Paulis on n qubits (phase 0).
pub fn random_nonidentity_pauli<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PauliOp {
    assert!(n > 0, "no non-identity Pauli on zero qubits");
    loop {
        let x = BitVec::from_bools(&(0..n).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
        let z = BitVec::from_bools(&(0..n).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
        if !(x.is_zero() && z.is_zero()) {
            return PauliOp::from_bits(x, z);
        }
    }
}

/// Fixed shard count, so results never depend on the worker count.
pub const SHARDS: u64 = 16;

/// Runs `trials` samples split over `SHARDS` counter-seeded streams and merges
/// the counts in shard order. Identical seeds give identical counts.
pub fn sharded_support_count<F>(subsets: Vec<SupportSet>, trials: u64, seeds: &SeedStream, sample: F) -> SupportCounter
where
    F: Fn(&mut ChaCha8Rng) -> PauliOp + Sync,
{
    let shards: Vec<SupportCounter> = (0..SHARDS)
        .into_par_iter()
        .map(|k| {
            let mut rng = seeds.rng(k);
            let quota = trials / SHARDS + u64::from(k < trials % SHARDS);
            let mut c = SupportCounter::new(subsets.clone());
            for _ in 0..quota {
                c.add(&sample(&mut rng));
            }
            c
        })
        .collect();
    let mut total = SupportCounter::new(subsets);
    for c in &shards {
        total.merge(c);
    }
    total
}

/// Checks Pr[F in supp(E)] <= p^|F| on `trials` random subsets per size
/// 1..=max_subset, each with a one-sided `sigma` tolerance.
pub fn estimate_ls_bound<R: Rng + ?Sized>(
    samples: &[PauliOp],
    p: NoiseStrength,
    max_subset: usize,
    trials: usize,
    sigma: f64,
    rng: &mut R,
) -> Result<LsReport, NoiseError> {
    let first = samples.first().ok_or(NoiseError::EmptySamples)?;
    let n = first.num_qubits();
    if max_subset > 4 {
        return Err(NoiseError::Parameter(format!("max_subset {max_subset} exceeds 4")));
    }
    if samples.iter().any(|s| s.num_qubits() != n) {
        return Err(NoiseError::Dimension("samples have different qubit counts".into()));
    }
    let mut subsets = Vec::new();
    for size in 1..=max_subset.min(n) {
        subsets.extend(sample_subsets(n, size, trials, rng));
    }
    let mut counter = SupportCounter::new(subsets);
    for s in samples {
        counter.add(s);
    }
    Ok(LsReport { rows: counter.rows("all", p, sigma) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;

    fn s(p: f64) -> NoiseStrength {
        NoiseStrength::new(p).unwrap()
    }

    #[test]
    fn extremes() {
        let mut rng = SeedStream::new(3).rng(0);
        for _ in 0..50 {
            assert!(sample_iid_noise(20, s(0.0), &mut rng).is_identity());
            assert_eq!(sample_iid_noise(20, s(1.0), &mut rng).weight(), 20);
        }
    }

    #[test]
    fn pair_inclusion_rate_matches_p_squared() {
        let mut rng = SeedStream::new(11).rng(0);
        let n = 100;
        let trials = 100_000;
        let mut hits = 0u64;
        for _ in 0..trials {
            let e = sample_iid_noise(n, s(0.1), &mut rng);
            let b = e.support_bits();
            if b.get(3) && b.get(17) {
                hits += 1;
            }
        }
        let mean = 0.01;
        let sd = (mean * (1.0 - mean) / trials as f64).sqrt();
        assert!((hits as f64 / trials as f64 - mean).abs() <= 3.0 * sd, "{hits}");
    }

    #[test]
    fn identity_samples_always_pass() {
        let samples = vec![PauliOp::identity(10); 100];
        let mut rng = SeedStream::new(5).rng(0);
        let r = estimate_ls_bound(&samples, s(0.01), 3, 20, 3.0, &mut rng).unwrap();
        assert!(r.pass());
        assert_eq!(r.per_size().len(), 3);
        assert!(estimate_ls_bound(&[], s(0.1), 2, 5, 3.0, &mut rng).is_err());
    }

    #[test]
    fn iid_samples_pass_at_their_own_strength() {
        let st = SeedStream::new(21);
        let mut rng = st.rng(0);
        let samples: Vec<_> = (0..100_000).map(|_| sample_iid_noise(30, s(0.05), &mut rng)).collect();
        let r = estimate_ls_bound(&samples, s(0.05), 2, 10, 3.0, &mut st.rng(1)).unwrap();
        assert!(r.pass(), "{:?}", r.first_failure());
    }

    #[test]
    fn too_strong_noise_fails_at_size_one() {
        let st = SeedStream::new(22);
        let mut rng = st.rng(0);
        let samples: Vec<_> = (0..10_000).map(|_| sample_iid_noise(30, s(0.2), &mut rng)).collect();
        let r = estimate_ls_bound(&samples, s(0.05), 2, 10, 3.0, &mut st.rng(1)).unwrap();
        assert_eq!(r.per_size()[0], (1, false));
    }

    #[test]
    fn burst_sampler_meets_the_definition_but_is_correlated() {
        let st = SeedStream::new(23);
        let mut rng = st.rng(0);
        let p = s(0.2);
        let samples: Vec<_> = (0..50_000).map(|_| sample_burst_noise(9, p, &mut rng)).collect();
        let r = estimate_ls_bound(&samples, p, 3, 30, 3.0, &mut st.rng(1)).unwrap();
        assert!(r.pass(), "{:?}", r.first_failure());
        // qubits 0 and 1 always fail together
        assert!(samples.iter().all(|e| e.support_bits().get(0) == e.support_bits().get(1)));
    }

    #[test]
    fn csv_has_fixed_columns() {
        let mut c = SupportCounter::new(vec![SupportSet::new(vec![3, 1])]);
        c.add(&PauliOp::parse(4, "X1 Z3").unwrap());
        c.add(&PauliOp::identity(4));
        let r = LsReport { rows: c.rows("0", s(0.5), 3.0) };
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "trial_block,subset_size,subset,empirical_prob,bound,pass\n0,2,1;3,0.5,0.25,true\n");
    }
}
