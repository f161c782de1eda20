//! State-vector check of deterministic remote state preparation.
//!
//! Alice and Bob share `n` Bell pairs. Alice measures her `n` qubits in the
//! basis given by the columns of a special orthogonal matrix instantiated at
//! the target amplitudes; whatever the outcome `i`, Bob holds column `i`,
//! which is a signed permutation of the target and is undone exactly.
//!
//! Register layout: qubit 0 is the most significant bit of an amplitude
//! index. Pairs are created in the interleaved order (Alice, Bob, Alice,
//! Bob, ...) and then moved to Alice's qubits first, so the joint amplitude of
//! Alice state `a` and Bob state `b` sits at `a * N + b`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{
    instantiate_numeric, validate_special_orthogonal, Mode, ParameterVector, Sign,
    SymbolicMatrix, TOLERANCE,
};
use crate::operator::SignedPermutation;

/// Largest simulated register: 3 qubits per side.
pub const MAX_QUBITS: u32 = 3;

/// Normalized amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(Complex64::norm_sqr).sum();
        if (norm2 - 1.0).abs() > TOLERANCE {
            return Err(Error::NonUnitParameters(format!("state norm squared {norm2}")));
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &[Complex64]) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// `n` Bell pairs, Alice's qubits high-order.
pub fn shared_bell_pairs(n: u32) -> Vec<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = [h, 0.0, 0.0, h];
    let mut state = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..n {
        state = state
            .iter()
            .flat_map(|&s| bell.iter().map(move |&b| s * b))
            .collect();
    }
    // interleaved qubit 2p -> p, 2p+1 -> n+p
    let q = 2 * n as usize;
    let target: Vec<usize> = (0..q)
        .map(|old| if old % 2 == 0 { old / 2 } else { n as usize + old / 2 })
        .collect();
    permute_qubits(&state, &target)
}

/// Move qubit `q` to position `target[q]`.
pub fn permute_qubits(state: &[Complex64], target: &[usize]) -> Vec<Complex64> {
    let q = target.len();
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for (idx, &amp) in state.iter().enumerate() {
        let mut moved = 0;
        for (old, &new) in target.iter().enumerate() {
            if idx >> (q - 1 - old) & 1 == 1 {
                moved |= 1 << (q - 1 - new);
            }
        }
        out[moved] = amp;
    }
    out
}

/// Column `c` as a signed permutation of the parameters:
/// `column[r] = (-1)^neg[r] * a[perm[r]]`.
pub fn column_operator(s: &SymbolicMatrix, c: usize) -> Result<SignedPermutation> {
    let n = s.order();
    let perm = (0..n).map(|r| s.entry(r, c).index).collect();
    let neg = (0..n).map(|r| s.entry(r, c).sign == Sign::Minus).collect();
    SignedPermutation::new(perm, neg)
}

/// Bob's correction after outcome `c`: the inverse of [`column_operator`].
pub fn recovery_operator(s: &SymbolicMatrix, c: usize) -> Result<SignedPermutation> {
    Ok(column_operator(s, c)?.transpose())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub index: usize,
    pub probability: f64,
    pub fidelity: f64,
    /// `max_b |sqrt(N) phi[b] - S[b][index]|` for Bob's unnormalized state.
    pub column_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DrspReport {
    pub qubits: u32,
    pub outcomes: Vec<Outcome>,
}

impl DrspReport {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// Every outcome has probability `1/N` and fidelity 1 within `tol`.
    pub fn is_deterministic(&self, tol: f64) -> bool {
        let p = 1.0 / self.outcomes.len() as f64;
        self.outcomes
            .iter()
            .all(|o| (o.probability - p).abs() <= tol && o.fidelity >= 1.0 - tol)
    }
}

/// Simulate every measurement branch exactly.
pub fn simulate_drsp(n: u32, psi: &[f64], s: &SymbolicMatrix) -> Result<DrspReport> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::DimensionMismatch {
            expected: MAX_QUBITS as usize,
            found: n as usize,
        });
    }
    let order = 1usize << n;
    if psi.len() != order || s.order() != order {
        return Err(Error::DimensionMismatch {
            expected: order,
            found: if psi.len() != order { psi.len() } else { s.order() },
        });
    }
    if s.mode() != Mode::Special || !validate_special_orthogonal(s)? {
        return Err(Error::InvalidMatrix(
            "measurement matrix is not special orthogonal".into(),
        ));
    }
    let target = StateVector::from_real(psi)?;
    let basis = instantiate_numeric(s, &ParameterVector::new(psi.to_vec())?)?;
    let joint = shared_bell_pairs(n);
    let root = (order as f64).sqrt();
    let mut outcomes = Vec::with_capacity(order);
    for i in 0..order {
        // project Alice onto tau_i = column i
        let phi: Vec<Complex64> = (0..order)
            .map(|b| {
                (0..order)
                    .map(|a| basis[(a, i)] * joint[a * order + b])
                    .sum()
            })
            .collect();
        let probability: f64 = phi.iter().map(Complex64::norm_sqr).sum();
        let column_residual = (0..order)
            .map(|b| (phi[b] * root - basis[(b, i)]).norm())
            .fold(0.0, f64::max);
        let theta: Vec<Complex64> = phi.iter().map(|x| x / probability.sqrt()).collect();
        let recovered = recovery_operator(s, i)?.apply(&theta)?;
        let fidelity = target.inner(&recovered).norm_sqr();
        outcomes.push(Outcome {
            index: i,
            probability,
            fidelity,
            column_residual,
        });
    }
    Ok(DrspReport { qubits: n, outcomes })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseCheck {
    /// `max |(U^dagger U - I)_{rc}|` for the phased matrix.
    pub unitarity_residual: f64,
    /// Largest deviation of `s(i)^dagger s(j)` from
    /// `e^{i(phi_j - phi_i)} * (base_i^T base_j)`.
    pub factorization_residual: f64,
}

impl PhaseCheck {
    pub fn holds(&self) -> bool {
        self.unitarity_residual <= TOLERANCE && self.factorization_residual <= TOLERANCE
    }
}

/// Multiply column `c` of the instantiated matrix by `e^{i phases[c]}` and
/// compare against the unphased Gram matrix.
pub fn phase_equivalence_check(
    s: &SymbolicMatrix,
    params: &ParameterVector,
    phases: &[f64],
) -> Result<PhaseCheck> {
    let n = s.order();
    if phases.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: phases.len(),
        });
    }
    if s.mode() != Mode::Special {
        return Err(Error::InvalidMatrix("phase check needs a signed matrix".into()));
    }
    let base = instantiate_numeric(s, params)?;
    let phased = DMatrix::from_fn(n, n, |r, c| {
        Complex64::from_polar(1.0, phases[c]) * base[(r, c)]
    });
    let gram = phased.adjoint() * &phased;
    let base_gram = base.transpose() * &base;
    let mut unitarity: f64 = 0.0;
    let mut factor: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { 1.0 } else { 0.0 };
            unitarity = unitarity.max((gram[(i, j)] - id).norm());
            let expected = Complex64::from_polar(1.0, phases[j] - phases[i]) * base_gram[(i, j)];
            factor = factor.max((gram[(i, j)] - expected).norm());
        }
    }
    Ok(PhaseCheck {
        unitarity_residual: unitarity,
        factorization_residual: factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::feasibility;
    use crate::io::parse_text;
    use crate::operator::MatchingOperator;
    use crate::solver::compute_divisions;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bell_layout() {
        let s = shared_bell_pairs(2);
        for a in 0..4 {
            for b in 0..4 {
                let expect = if a == b { 0.5 } else { 0.0 };
                assert!((s[a * 4 + b].re - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn single_qubit_basis_state() {
        let s = parse_text("a0 a1\na1 -a0").unwrap();
        let r = simulate_drsp(1, &[1.0, 0.0], &s).unwrap();
        for o in &r.outcomes {
            assert!((o.probability - 0.5).abs() < 1e-12);
            assert!((o.fidelity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn witnesses_are_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=3 {
            let s = feasibility(n).witness.unwrap();
            for _ in 0..10 {
                let psi = ParameterVector::random(1 << n, &mut rng);
                let r = simulate_drsp(n, psi.values(), &s).unwrap();
                assert!(r.is_deterministic(1e-12));
                assert!((r.total_probability() - 1.0).abs() < 1e-12);
                assert!(r.outcomes.iter().all(|o| o.column_residual < 1e-12));
            }
        }
    }

    #[test]
    fn recovery_is_negated_matching_operator() {
        let s = feasibility(3).witness.unwrap();
        let t = compute_divisions(&s).unwrap();
        for c in 1..8 {
            let m = MatchingOperator::from_division(t.division(c - 1)).unwrap();
            assert_eq!(recovery_operator(&s, c).unwrap(), m.matrix().negated());
        }
    }

    #[test]
    fn rejects_non_orthogonal() {
        let s = parse_text("a0 a1\na1 a0\n# mode: special").unwrap();
        let err = simulate_drsp(1, &[1.0, 0.0], &s).unwrap_err();
        assert_eq!(err.kind(), "InvalidMatrix");
    }

    #[test]
    fn phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = feasibility(2).witness.unwrap();
        let p = ParameterVector::random(4, &mut rng);
        assert!(phase_equivalence_check(&s, &p, &[0.0; 4]).unwrap().holds());
        let phases: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..6.3)).collect();
        assert!(phase_equivalence_check(&s, &p, &phases).unwrap().holds());
        let bad = parse_text("# mode: special\na0 a1\na1 a0").unwrap();
        let p = ParameterVector::new(vec![0.6, 0.8]).unwrap();
        let check = phase_equivalence_check(&bad, &p, &[0.3, 1.1]).unwrap();
        assert!(!check.holds());
        assert!(check.factorization_residual < 1e-12);
    }
}
