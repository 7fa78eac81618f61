use crate::bits::BitVec;
use crate::pauli::PauliOp;

use super::NoiseError;

/// Pauli correction C(z) = X(Az) Z(Bz) applied to the first n1 qubits as a
/// function of the outcomes z of measuring the last n2 qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearControl {
    n1: usize,
    n2: usize,
    a: Vec<BitVec>,
    b: Vec<BitVec>,
}

impl LinearControl {
    pub fn zero(n1: usize, n2: usize) -> Self {
        LinearControl { n1, n2, a: vec![BitVec::zeros(n2); n1], b: vec![BitVec::zeros(n2); n1] }
    }

    pub fn from_rows(a: Vec<BitVec>, b: Vec<BitVec>) -> Result<Self, NoiseError> {
        let n1 = a.len();
        let n2 = a.first().map_or(0, |r| r.len());
        if b.len() != n1 || a.iter().chain(&b).any(|r| r.len() != n2) {
            return Err(NoiseError::Dimension("A and B must both be n1 x n2".into()));
        }
        Ok(LinearControl { n1, n2, a, b })
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn a(&self) -> &[BitVec] {
        &self.a
    }

    pub fn b(&self) -> &[BitVec] {
        &self.b
    }

    pub fn set_a(&mut self, row: usize, col: usize, v: bool) {
        self.a[row].set(col, v);
    }

    pub fn set_b(&mut self, row: usize, col: usize, v: bool) {
        self.b[row].set(col, v);
    }

    fn apply(m: &[BitVec], v: &BitVec) -> BitVec {
        BitVec::from_bools(&m.iter().map(|row| row.dot(v)).collect::<Vec<_>>())
    }

    /// C(z) on the n1 corrected qubits.
    pub fn correction(&self, z: &BitVec) -> PauliOp {
        let x = Self::apply(&self.a, z);
        let zz = Self::apply(&self.b, z);
        PauliOp::from_bits(x, zz)
    }

    /// Rows of A and B have weight at most w, columns at most 1, and n1 * w <= n2.
    pub fn check_hypothesis(&self, w: usize) -> Result<(), NoiseError> {
        for (name, m) in [("A", &self.a), ("B", &self.b)] {
            for (i, row) in m.iter().enumerate() {
                if row.count_ones() > w {
                    return Err(NoiseError::Hypothesis(format!("row {i} of {name} has weight above {w}")));
                }
            }
            for j in 0..self.n2 {
                if m.iter().filter(|row| row.get(j)).count() > 1 {
                    return Err(NoiseError::Hypothesis(format!("column {j} of {name} has weight above 1")));
                }
            }
        }
        if self.n1 * w > self.n2 {
            return Err(NoiseError::Hypothesis(format!("n1 * w = {} exceeds n2 = {}", self.n1 * w, self.n2)));
        }
        Ok(())
    }
}

/// F = X(e1 + A e2) Z(f1 + B e2) for E = X(e) Z(f) on n1 + n2 qubits, phase ignored.
pub fn commute_through_adaptive(e: &PauliOp, ctrl: &LinearControl) -> Result<PauliOp, NoiseError> {
    let (n1, n2) = (ctrl.n1, ctrl.n2);
    if e.num_qubits() != n1 + n2 {
        return Err(NoiseError::Dimension(format!(
            "error acts on {} qubits, control expects {} + {}",
            e.num_qubits(),
            n1,
            n2
        )));
    }
    let e2 = e.x_bits().slice(n1, n1 + n2);
    let mut x = e.x_bits().slice(0, n1);
    x.xor_assign(&LinearControl::apply(&ctrl.a, &e2));
    let mut z = e.z_bits().slice(0, n1);
    z.xor_assign(&LinearControl::apply(&ctrl.b, &e2));
    Ok(PauliOp::from_bits(x, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli1;

    fn teleport_like() -> LinearControl {
        LinearControl::from_rows(vec![BitVec::from_indices(2, [0])], vec![BitVec::from_indices(2, [1])]).unwrap()
    }

    #[test]
    fn identity_maps_to_identity() {
        let c = teleport_like();
        assert!(commute_through_adaptive(&PauliOp::identity(3), &c).unwrap().is_identity());
    }

    #[test]
    fn z_errors_on_measured_qubits_are_invisible() {
        let c = teleport_like();
        let e = PauliOp::parse(3, "Y0 Z1 Z2").unwrap();
        let f = commute_through_adaptive(&e, &c).unwrap();
        assert_eq!(f.get(0), Pauli1::Y);
        assert_eq!(f.num_qubits(), 1);
    }

    #[test]
    fn x_on_measured_qubit_becomes_x_on_output() {
        let c = teleport_like();
        let e = PauliOp::single(3, 1, Pauli1::X);
        let f = commute_through_adaptive(&e, &c).unwrap();
        assert_eq!(f, PauliOp::single(1, 0, Pauli1::X));
        let e = PauliOp::single(3, 2, Pauli1::Y);
        let f = commute_through_adaptive(&e, &c).unwrap();
        assert_eq!(f.x_bits().count_ones(), 0);
        assert!(f.z_bits().get(0));
    }

    #[test]
    fn dimension_and_hypothesis_checks() {
        let c = teleport_like();
        assert!(commute_through_adaptive(&PauliOp::identity(2), &c).is_err());
        assert!(c.check_hypothesis(1).is_ok());
        let mut wide = LinearControl::zero(1, 2);
        wide.set_a(0, 0, true);
        wide.set_a(0, 1, true);
        assert!(wide.check_hypothesis(1).is_err());
        assert!(wide.check_hypothesis(2).is_ok());
        let mut tall = LinearControl::zero(2, 2);
        tall.set_b(0, 0, true);
        tall.set_b(1, 0, true);
        assert!(tall.check_hypothesis(1).is_err());
        assert!(LinearControl::from_rows(vec![BitVec::zeros(2)], vec![BitVec::zeros(3)]).is_err());
    }
}
