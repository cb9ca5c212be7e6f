//! Matrix-free statevectors over `L` qubits and the Pauli-string primitives
//! every other module builds on.
//!
//! Bit ordering is fixed once for the whole crate: **qubit 0 is the least
//! significant bit of the amplitude index**. The basis state written
//! `|q_{L-1} … q_1 q_0⟩` lives at index `q_{L-1}·2^{L-1} + … + q_1·2 + q_0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single-qubit Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub fn as_char(self) -> char {
        match self {
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }
}

/// A product of single-qubit Pauli operators, e.g. `X_0 X_1` or `Z_3`.
///
/// Factors are kept with strictly increasing qubit indices; the empty string
/// is the identity. Serializes as a bare factor list `[[qubit, axis], …]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<(usize, PauliAxis)>",
    into = "Vec<(usize, PauliAxis)>"
)]
pub struct PauliString {
    factors: Vec<(usize, PauliAxis)>,
}

impl From<PauliString> for Vec<(usize, PauliAxis)> {
    fn from(p: PauliString) -> Self {
        p.factors
    }
}

impl TryFrom<Vec<(usize, PauliAxis)>> for PauliString {
    type Error = Error;
    fn try_from(factors: Vec<(usize, PauliAxis)>) -> Result<Self> {
        PauliString::new(factors)
    }
}

impl PauliString {
    /// Builds a string from `(qubit, axis)` factors.
    ///
    /// Fails if the indices are not strictly increasing.
    pub fn new(factors: Vec<(usize, PauliAxis)>) -> Result<Self> {
        for pair in factors.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::UnorderedPauliFactors);
            }
        }
        Ok(PauliString { factors })
    }

    /// The identity string.
    pub fn identity() -> Self {
        PauliString { factors: Vec::new() }
    }

    /// Single-factor convenience constructor.
    pub fn single(qubit: usize, axis: PauliAxis) -> Self {
        PauliString { factors: vec![(qubit, axis)] }
    }

    /// Two-factor convenience constructor; the indices may come in any order.
    pub fn pair(a: (usize, PauliAxis), b: (usize, PauliAxis)) -> Result<Self> {
        if a.0 == b.0 {
            return Err(Error::UnorderedPauliFactors);
        }
        let factors = if a.0 < b.0 { vec![a, b] } else { vec![b, a] };
        Ok(PauliString { factors })
    }

    pub fn factors(&self) -> &[(usize, PauliAxis)] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// Largest qubit index touched, if any.
    pub fn max_qubit(&self) -> Option<usize> {
        self.factors.last().map(|&(q, _)| q)
    }

    /// Checks that every factor fits a register of `num_qubits` qubits.
    pub fn check_fits(&self, num_qubits: usize) -> Result<()> {
        if let Some(&(q, _)) = self.factors.iter().find(|&&(q, _)| q >= num_qubits) {
            return Err(Error::QubitIndexOutOfRange { index: q, num_qubits });
        }
        Ok(())
    }

    /// Bit masks describing the action on a basis state: `flip` collects X/Y
    /// qubits (bits toggled), `phase` collects Y/Z qubits (sign from set
    /// bits), and `y_count` counts Y factors (each contributes a factor i).
    pub(crate) fn masks(&self) -> PauliMasks {
        let mut flip = 0usize;
        let mut phase = 0usize;
        let mut y_count = 0u32;
        for &(q, axis) in &self.factors {
            match axis {
                PauliAxis::X => flip |= 1 << q,
                PauliAxis::Y => {
                    flip |= 1 << q;
                    phase |= 1 << q;
                    y_count += 1;
                }
                PauliAxis::Z => phase |= 1 << q,
            }
        }
        PauliMasks { flip, phase, y_count }
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "I");
        }
        for (i, &(q, axis)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", axis.as_char(), q)?;
        }
        Ok(())
    }
}

pub(crate) struct PauliMasks {
    pub flip: usize,
    pub phase: usize,
    pub y_count: u32,
}

impl PauliMasks {
    /// Phase picked up when the string acts on basis state `n`:
    /// `P|n⟩ = coeff(n) |n ⊕ flip⟩` with `coeff(n) = i^y_count · (−1)^{|n ∧ phase|}`.
    #[inline]
    pub fn coeff(&self, n: usize) -> Complex64 {
        let sign = if (n & self.phase).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        match self.y_count % 4 {
            0 => Complex64::new(sign, 0.0),
            1 => Complex64::new(0.0, sign),
            2 => Complex64::new(-sign, 0.0),
            _ => Complex64::new(0.0, -sign),
        }
    }
}

/// A pure state of `L` qubits: `2^L` complex amplitudes, kept at unit norm by
/// every operation documented as norm-preserving.
///
/// Values are immutable once returned and safe to share across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros basis state `|0…0⟩`.
    pub fn zero_state(num_qubits: usize) -> Self {
        Self::basis_state(num_qubits, 0)
    }

    /// The computational basis state at `index`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Self {
        assert!(num_qubits >= 1, "state needs at least one qubit");
        let dim = 1usize << num_qubits;
        assert!(index < dim, "basis index {index} out of range for {num_qubits} qubits");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        StateVector { num_qubits, amplitudes }
    }

    /// Wraps raw amplitudes. The length must be a power of two `2^L`, `L ≥ 1`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::invalid(format!(
                "amplitude count {dim} is not 2^L for some L ≥ 1"
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        Ok(StateVector { num_qubits, amplitudes })
    }

    /// Tensor product of singlet pairs `2^{-L/4} (|10⟩ − |01⟩)^{⊗ L/2}` on
    /// consecutive qubit pairs `(0,1), (2,3), …`.
    ///
    /// Within a pair, `|q_{2p+1} q_{2p}⟩ = |10⟩` carries the plus sign.
    pub fn singlet_state(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits % 2 != 0 {
            return Err(Error::OddQubitCount(num_qubits));
        }
        let pairs = num_qubits / 2;
        let dim = 1usize << num_qubits;
        let scale = 0.5f64.powi(pairs as i32 / 2)
            * if pairs % 2 == 1 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        for n in 0..dim {
            let mut sign = 1.0f64;
            let mut ok = true;
            for p in 0..pairs {
                let low = (n >> (2 * p)) & 1;
                let high = (n >> (2 * p + 1)) & 1;
                match (high, low) {
                    (1, 0) => {}
                    (0, 1) => sign = -sign,
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                amplitudes[n] = Complex64::new(sign * scale, 0.0);
            }
        }
        Ok(StateVector { num_qubits, amplitudes })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm. Fails on (near-)zero vectors.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::StateAnnihilated);
        }
        let inv = 1.0 / n;
        for a in &mut self.amplitudes {
            *a *= inv;
        }
        Ok(self)
    }

    fn check_same_width(&self, other: &StateVector) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::IncompatibleQubitCounts {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(())
    }

    /// `⟨self|other⟩ = Σ_i conj(self_i)·other_i`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_width(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`, invariant under global phases on either side.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    /// Applies `e^{+iθP}` in one pass: `cos θ · ψ + i sin θ · (Pψ)`.
    ///
    /// Callers needing `e^{-iθP}` pass `-θ`. Norm-preserving.
    pub fn apply_pauli_exponential(&self, pauli: &PauliString, theta: f64) -> Result<StateVector> {
        pauli.check_fits(self.num_qubits)?;
        let masks = pauli.masks();
        let (c, s) = (theta.cos(), theta.sin());
        let is = Complex64::new(0.0, s);
        let mut out = self.clone();
        if masks.flip == 0 {
            for (n, a) in out.amplitudes.iter_mut().enumerate() {
                // diagonal action: coeff(n) = ±1, so the factor is e^{±iθ}
                *a *= Complex64::new(c, 0.0) + is * masks.coeff(n);
            }
        } else {
            for n in 0..self.amplitudes.len() {
                let m = n ^ masks.flip;
                if m < n {
                    continue;
                }
                let (an, am) = (self.amplitudes[n], self.amplitudes[m]);
                out.amplitudes[n] = c * an + is * masks.coeff(m) * am;
                out.amplitudes[m] = c * am + is * masks.coeff(n) * an;
            }
        }
        Ok(out)
    }

    /// `Pψ` as a new vector (unit norm whenever ψ is).
    pub fn apply_pauli(&self, pauli: &PauliString) -> Result<StateVector> {
        pauli.check_fits(self.num_qubits)?;
        let masks = pauli.masks();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (n, &a) in self.amplitudes.iter().enumerate() {
            amplitudes[n ^ masks.flip] = masks.coeff(n) * a;
        }
        Ok(StateVector { num_qubits: self.num_qubits, amplitudes })
    }

    /// Componentwise `self + c·other`.
    pub fn axpy(&self, c: Complex64, other: &StateVector) -> Result<StateVector> {
        self.check_same_width(other)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a + c * b)
            .collect();
        Ok(StateVector { num_qubits: self.num_qubits, amplitudes })
    }

    /// Componentwise scaling by a complex factor.
    pub fn scaled(&self, c: Complex64) -> StateVector {
        let amplitudes = self.amplitudes.iter().map(|a| c * a).collect();
        StateVector { num_qubits: self.num_qubits, amplitudes }
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.check_same_width(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_product_basis_states() {
        let zero = StateVector::zero_state(3);
        assert_eq!(zero.inner_product(&zero).unwrap(), c(1.0, 0.0));
        let one = StateVector::basis_state(3, 0b001);
        assert_eq!(zero.inner_product(&one).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn inner_product_matches_summation_oracle() {
        // seeded random normalized vectors, L = 3
        let a = random_state_for_tests(3, 11);
        let b = random_state_for_tests(3, 12);
        let mut oracle = c(0.0, 0.0);
        for i in 0..8 {
            oracle += a.amplitudes()[i].conj() * b.amplitudes()[i];
        }
        let got = a.inner_product(&b).unwrap();
        assert!((got - oracle).norm() <= 1e-12);
        let swapped = b.inner_product(&a).unwrap();
        assert!((swapped - got.conj()).norm() <= 1e-12);
    }

    #[test]
    fn inner_product_rejects_width_mismatch() {
        let a = StateVector::zero_state(2);
        let b = StateVector::zero_state(3);
        let err = a.inner_product(&b).unwrap_err();
        assert!(err.to_string().contains("incompatible qubit counts"));
    }

    #[test]
    fn fidelity_identity_orthogonal_and_phase() {
        let psi = random_state_for_tests(3, 5);
        assert!((psi.fidelity(&psi).unwrap() - 1.0).abs() <= 1e-12);

        let zero = StateVector::basis_state(1, 0);
        let one = StateVector::basis_state(1, 1);
        assert!(zero.fidelity(&one).unwrap() <= 1e-15);

        let theta = 0.37;
        let rotated = psi.scaled(Complex64::from_polar(1.0, theta));
        assert!((rotated.fidelity(&psi).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn pauli_exponential_eigenstate_phase() {
        let theta = 0.81;
        let zero = StateVector::zero_state(1);
        let out = zero
            .apply_pauli_exponential(&PauliString::single(0, PauliAxis::Z), theta)
            .unwrap();
        let expected = zero.scaled(Complex64::from_polar(1.0, theta));
        assert!(out.distance(&expected).unwrap() <= 1e-12);
    }

    #[test]
    fn pauli_exponential_x_half_pi_flips() {
        let zero = StateVector::zero_state(1);
        let out = zero
            .apply_pauli_exponential(
                &PauliString::single(0, PauliAxis::X),
                std::f64::consts::FRAC_PI_2,
            )
            .unwrap();
        // e^{iπX/2}|0⟩ = i|1⟩
        let expected = StateVector::basis_state(1, 1).scaled(c(0.0, 1.0));
        assert!(out.distance(&expected).unwrap() <= 1e-12);
    }

    #[test]
    fn pauli_exponential_rejects_out_of_range() {
        let zero = StateVector::zero_state(2);
        let err = zero
            .apply_pauli_exponential(&PauliString::single(2, PauliAxis::X), 0.1)
            .unwrap_err();
        assert!(matches!(err, Error::QubitIndexOutOfRange { .. }));
    }

    #[test]
    fn singlet_two_qubits_matches_definition() {
        let s = StateVector::singlet_state(2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [c(0.0, 0.0), c(-r, 0.0), c(r, 0.0), c(0.0, 0.0)];
        for (a, e) in s.amplitudes().iter().zip(expected.iter()) {
            assert!((a - e).norm() <= 1e-15);
        }
    }

    #[test]
    fn singlet_four_qubits_structure() {
        let s = StateVector::singlet_state(4).unwrap();
        assert!((s.norm() - 1.0).abs() <= 1e-12);
        let nonzero: Vec<f64> = s
            .amplitudes()
            .iter()
            .filter(|a| a.norm() > 1e-15)
            .map(|a| a.norm())
            .collect();
        assert_eq!(nonzero.len(), 4);
        for m in nonzero {
            assert!((m - 0.5).abs() <= 1e-12);
        }
    }

    #[test]
    fn odd_singlet_rejected() {
        let err = StateVector::singlet_state(3).unwrap_err();
        assert!(matches!(err, Error::OddQubitCount(3)));
    }

    /// Deterministic pseudo-random unit vector for tests.
    pub(crate) fn random_state_for_tests(num_qubits: usize, seed: u64) -> StateVector {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dim = 1usize << num_qubits;
        let amplitudes: Vec<Complex64> = (0..dim)
            .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        StateVector { num_qubits, amplitudes }.normalized().unwrap()
    }

    proptest! {
        #[test]
        fn prop_pauli_exponential_preserves_norm(
            seed in 0u64..500,
            theta in -6.0f64..6.0,
            qubit in 0usize..3,
        ) {
            let psi = random_state_for_tests(3, seed);
            for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] {
                let out = psi
                    .apply_pauli_exponential(&PauliString::single(qubit, axis), theta)
                    .unwrap();
                prop_assert!((out.norm() - 1.0).abs() <= 1e-9);
            }
        }

        #[test]
        fn prop_pauli_exponential_composes(
            seed in 0u64..200,
            theta in -3.0f64..3.0,
            phi in -3.0f64..3.0,
        ) {
            let psi = random_state_for_tests(2, seed);
            let p = PauliString::pair((0, PauliAxis::X), (1, PauliAxis::Y)).unwrap();
            let a = psi
                .apply_pauli_exponential(&p, theta)
                .unwrap()
                .apply_pauli_exponential(&p, phi)
                .unwrap();
            let b = psi.apply_pauli_exponential(&p, theta + phi).unwrap();
            prop_assert!(a.distance(&b).unwrap() <= 1e-10);
        }

        #[test]
        fn prop_fidelity_symmetric_and_bounded(sa in 0u64..100, sb in 0u64..100) {
            let a = random_state_for_tests(3, sa);
            let b = random_state_for_tests(3, sb.wrapping_add(1000));
            let fab = a.fidelity(&b).unwrap();
            let fba = b.fidelity(&a).unwrap();
            prop_assert!((fab - fba).abs() <= 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&fab));
        }
    }
}
