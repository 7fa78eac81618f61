//! Local stochastic Pauli noise: sampling, empirical strength checks, the
//! strength calculus and exact error commutation through adaptive corrections.

mod adaptive;
mod calculus;
mod gadgets;
mod sample;

pub use adaptive::{commute_through_adaptive, LinearControl};
pub use calculus::{
    parallel_repetition_bound, strength_adaptive, strength_clifford, strength_entanglement_swap,
    strength_product_dependent, strength_product_disjoint, strength_teleport,
};
pub use gadgets::{
    bell_measure_layer, reduce_bell_pair_error, swap_chain_control, teleport_control, GadgetKind, GadgetSpec,
};
pub use sample::{
    estimate_ls_bound, one_sided_pass, random_nonidentity, random_nonidentity_pauli, sample_burst_noise,
    sample_iid_noise, sample_subsets, sharded_support_count, LsReport, LsRow, SupportCounter, SHARDS,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::PauliOp;

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("noise strength {0} is outside [0, 1]")]
    InvalidStrength(f64),
    #[error("p = {p} exceeds the threshold {p0} of profile {index}")]
    ThresholdExceeded { index: usize, p: f64, p0: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("no samples supplied")]
    EmptySamples,
    #[error("entanglement swapping needs a chain of at least 2 Bell pairs, got {0}")]
    ChainTooShort(usize),
    #[error("control hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// A probability bound p in [0, 1].
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct NoiseStrength(f64);

impl NoiseStrength {
    pub const ZERO: NoiseStrength = NoiseStrength(0.0);
    pub const ONE: NoiseStrength = NoiseStrength(1.0);

    pub fn new(p: f64) -> Result<Self, NoiseError> {
        if (0.0..=1.0).contains(&p) {
            Ok(NoiseStrength(p))
        } else {
            Err(NoiseError::InvalidStrength(p))
        }
    }

    /// Clamps into [0, 1]; NaN maps to 1 (a vacuous bound).
    pub fn clamped(p: f64) -> Self {
        if p.is_nan() {
            NoiseStrength(1.0)
        } else {
            NoiseStrength(p.clamp(0.0, 1.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for NoiseStrength {
    type Error = NoiseError;
    fn try_from(p: f64) -> Result<Self, NoiseError> {
        NoiseStrength::new(p)
    }
}

impl From<NoiseStrength> for f64 {
    fn from(p: NoiseStrength) -> f64 {
        p.0
    }
}

/// Strength map f(p) = a * p^b.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub a: f64,
    pub b: f64,
}

impl Monomial {
    pub fn new(a: f64, b: f64) -> Self {
        Monomial { a, b }
    }

    pub fn eval(&self, p: NoiseStrength) -> NoiseStrength {
        if p.value() == 0.0 {
            return NoiseStrength::ZERO;
        }
        NoiseStrength::clamped(self.a * p.value().powf(self.b))
    }

    /// f(p)^e as a monomial.
    pub fn pow(&self, e: f64) -> Monomial {
        Monomial::new(self.a.powf(e), self.b * e)
    }

    pub fn scale(&self, c: f64) -> Monomial {
        Monomial::new(self.a * c, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessProfile {
    pub p0: f64,
    pub f: Monomial,
    pub r: u32,
    pub r_tilde: u32,
}

impl RobustnessProfile {
    pub fn new(p0: f64, f: Monomial, r: u32, r_tilde: u32) -> Result<Self, NoiseError> {
        if !(p0 > 0.0 && p0 <= 1.0) {
            return Err(NoiseError::Parameter(format!("threshold p0 = {p0} not in (0, 1]")));
        }
        if !(f.a > 0.0 && f.b > 0.0) {
            return Err(NoiseError::Parameter(format!("strength map {f:?} must have a, b > 0")));
        }
        if r_tilde < 1 || r_tilde > r {
            return Err(NoiseError::Parameter(format!("need 1 <= r_tilde <= r, got r = {r}, r_tilde = {r_tilde}")));
        }
        Ok(RobustnessProfile { p0, f, r, r_tilde })
    }

    pub fn strength(&self, p: NoiseStrength) -> Option<NoiseStrength> {
        (p.value() <= self.p0).then(|| self.f.eval(p))
    }
}

/// Errors E(0)..E(T) interleaved with the T layers of a circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorSchedule {
    pub errors: Vec<PauliOp>,
}

impl ErrorSchedule {
    pub fn identity(n: usize, depth: usize) -> Self {
        ErrorSchedule { errors: vec![PauliOp::identity(n); depth + 1] }
    }

    /// Identity everywhere except `e` at boundary `at`.
    pub fn single(n: usize, depth: usize, at: usize, e: PauliOp) -> Self {
        let mut s = Self::identity(n, depth);
        s.errors[at] = e;
        s
    }

    pub fn check(&self, n: usize, depth: usize) -> Result<(), NoiseError> {
        if self.errors.len() != depth + 1 {
            return Err(NoiseError::Dimension(format!(
                "schedule has {} errors, circuit depth {depth} needs {}",
                self.errors.len(),
                depth + 1
            )));
        }
        if let Some(e) = self.errors.iter().find(|e| e.num_qubits() != n) {
            return Err(NoiseError::Dimension(format!("error on {} qubits, circuit has {n}", e.num_qubits())));
        }
        Ok(())
    }
}
