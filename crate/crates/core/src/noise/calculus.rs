//! Closed-form strength composition rules. Every output is clamped to 1.

use super::{Monomial, NoiseError, NoiseStrength, RobustnessProfile};

/// Product of two (possibly dependent) noise terms: 2 max(sqrt p, sqrt q).
pub fn strength_product_dependent(p: NoiseStrength, q: NoiseStrength) -> NoiseStrength {
    NoiseStrength::clamped(2.0 * p.value().sqrt().max(q.value().sqrt()))
}

/// Noise conjugated through a depth-one Clifford layer: sqrt(2p).
pub fn strength_clifford(p: NoiseStrength) -> NoiseStrength {
    NoiseStrength::clamped((2.0 * p.value()).sqrt())
}

/// Product of noise on disjoint registers: max(sqrt p, sqrt q).
pub fn strength_product_disjoint(p: NoiseStrength, q: NoiseStrength) -> NoiseStrength {
    NoiseStrength::clamped(p.value().sqrt().max(q.value().sqrt()))
}

/// Noise pushed through a row-weight-w linear Pauli correction: 4 p^(1/(4w)).
pub fn strength_adaptive(p: NoiseStrength, w: u32) -> Result<NoiseStrength, NoiseError> {
    if w == 0 {
        return Err(NoiseError::Parameter("row weight w must be positive".into()));
    }
    Ok(root_scaled(4.0, p.value(), 4.0 * w as f64))
}

/// Entanglement swapping along k Bell pairs: 4 (sqrt(2p))^(1/(4(k-1))).
pub fn strength_entanglement_swap(p: NoiseStrength, k: usize) -> Result<NoiseStrength, NoiseError> {
    if k < 2 {
        return Err(NoiseError::ChainTooShort(k));
    }
    Ok(root_scaled(4.0, 2.0 * p.value(), 8.0 * (k - 1) as f64))
}

/// Teleportation with noisy Bell pairs: 2^(17/8) p^(1/8).
pub fn strength_teleport(p: NoiseStrength) -> NoiseStrength {
    root_scaled(2f64.powf(17.0 / 8.0), p.value(), 8.0)
}

fn root_scaled(c: f64, x: f64, root: f64) -> NoiseStrength {
    if x == 0.0 {
        NoiseStrength::ZERO
    } else {
        NoiseStrength::clamped(c * x.powf(1.0 / root))
    }
}

/// (max_j f_j(p))^(1/r) with r the largest output size (or minimal-support weight).
pub fn parallel_repetition_bound(
    profiles: &[RobustnessProfile],
    p: NoiseStrength,
    use_r_tilde: bool,
) -> Result<NoiseStrength, NoiseError> {
    if profiles.is_empty() {
        return Ok(NoiseStrength::ZERO);
    }
    let mut worst = 0.0f64;
    let mut r = 1u32;
    for (index, prof) in profiles.iter().enumerate() {
        let f = prof.strength(p).ok_or(NoiseError::ThresholdExceeded { index, p: p.value(), p0: prof.p0 })?;
        worst = worst.max(f.value());
        r = r.max(if use_r_tilde { prof.r_tilde } else { prof.r });
    }
    Ok(root_scaled(1.0, worst, r as f64))
}

impl Monomial {
    pub fn through_clifford(&self) -> Monomial {
        self.scale(2.0).pow(0.5)
    }

    pub fn through_adaptive(&self, w: u32) -> Monomial {
        self.pow(1.0 / (4.0 * w as f64)).scale(4.0)
    }

    pub fn through_swap(&self, k: usize) -> Monomial {
        self.scale(2.0).pow(1.0 / (8.0 * (k - 1) as f64)).scale(4.0)
    }

    pub fn through_teleport(&self) -> Monomial {
        self.pow(1.0 / 8.0).scale(2f64.powf(17.0 / 8.0))
    }

    /// The monomial of `parallel_repetition_bound` when every profile shares this map.
    pub fn repeated(&self, r: u32) -> Monomial {
        self.pow(1.0 / r as f64)
    }
}
