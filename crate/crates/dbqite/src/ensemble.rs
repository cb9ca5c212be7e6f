//! Seeded random states and Hamiltonians for the verification suites.
//!
//! A single 64-bit root seed expands into independent child seeds through
//! SplitMix64 applied to the root XOR an FNV-1a hash of a textual label, so
//! every stochastic choice in a run is addressable and reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_complex::Complex64;

use crate::error::Result;
use crate::hamiltonian::{PauliSum, SpectralMode, SpectralSummary};
use crate::state::{PauliAxis, PauliString, StateVector};

/// Derives the child seed for `label` from a root seed (SplitMix64 over
/// `root XOR fnv1a(label)`).
pub fn child_seed(root: u64, label: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = root ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng_for(root: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(child_seed(root, label))
}

/// A Haar-ish random unit vector (complex Gaussian amplitudes, normalized).
pub fn random_state(num_qubits: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let dim = 1usize << num_qubits;
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
        .collect();
    StateVector::from_amplitudes(amps)
        .expect("power-of-two length")
        .normalized()
        .expect("gaussian vector has nonzero norm")
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; avoids pulling a distributions dependency for one use.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// A random Hermitian Pauli sum with `num_terms` strings of weight 1 or 2
/// and coefficients uniform in [-1, 1].
pub fn random_pauli_sum(num_qubits: usize, num_terms: usize, rng: &mut ChaCha8Rng) -> PauliSum {
    let axes = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];
    let mut terms = Vec::with_capacity(num_terms);
    for _ in 0..num_terms {
        let coeff: f64 = rng.gen_range(-1.0..1.0);
        let axis = axes[rng.gen_range(0..3)];
        if num_qubits == 1 || rng.gen_bool(0.4) {
            terms.push((coeff, PauliString::single(rng.gen_range(0..num_qubits), axis)));
        } else {
            let a = rng.gen_range(0..num_qubits);
            let mut b = rng.gen_range(0..num_qubits);
            while b == a {
                b = rng.gen_range(0..num_qubits);
            }
            let axis_b = axes[rng.gen_range(0..3)];
            terms.push((
                coeff,
                PauliString::pair((a, axis), (b, axis_b)).expect("distinct indices"),
            ));
        }
    }
    PauliSum::new(num_qubits, terms).expect("indices validated by construction")
}

/// A gapped random Hamiltonian prepared for the theorem checkers: unique
/// ground state (relative gap ≥ 2%), ground energy shifted to zero, and the
/// spectrum rescaled so the shifted spectral radius is at least 1.
///
/// Returns the Hamiltonian together with its dense spectral summary.
pub fn random_gapped_hamiltonian(
    num_qubits: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(PauliSum, SpectralSummary)> {
    loop {
        let candidate = random_pauli_sum(num_qubits, 2 + 3 * num_qubits, rng);
        let summary = candidate.spectral_summary(SpectralMode::Dense)?;
        let spread = summary.lambda_max - summary.lambda0;
        if spread <= 1e-9 || summary.gap < 0.02 * spread {
            continue;
        }
        let mut h = candidate.shift(-summary.lambda0);
        if spread < 1.0 {
            h = h.scaled(1.0 / spread);
        }
        let summary = h.spectral_summary(SpectralMode::Dense)?;
        return Ok((h, summary));
    }
}

/// A random state with a prescribed ground-state fidelity `f0 ∈ (0, 1)`:
/// `√f0 · |λ0⟩ + √(1-f0) · |r⊥⟩` for a random orthogonal complement vector.
pub fn random_state_with_fidelity(
    ground: &StateVector,
    f0: f64,
    rng: &mut ChaCha8Rng,
) -> Result<StateVector> {
    assert!((0.0..=1.0).contains(&f0));
    let mut rest = random_state(ground.num_qubits(), rng);
    let overlap = ground.inner_product(&rest)?;
    rest = rest.axpy(-overlap, ground)?.normalized()?;
    ground
        .scaled(Complex64::new(f0.sqrt(), 0.0))
        .axpy(Complex64::new((1.0 - f0).sqrt(), 0.0), &rest)?
        .normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn child_seeds_differ_by_label() {
        assert_ne!(child_seed(7, "a"), child_seed(7, "b"));
        assert_eq!(child_seed(7, "a"), child_seed(7, "a"));
    }

    #[test]
    fn gapped_hamiltonian_contract() {
        let mut rng = rng_for(1234, "test/gapped");
        let (h, s) = random_gapped_hamiltonian(3, &mut rng).unwrap();
        assert!(s.lambda0.abs() <= 1e-9 * s.spectral_norm.max(1.0));
        assert!(s.gap > 0.0);
        assert!(!s.degenerate_ground);
        assert!(s.shifted_norm() >= 1.0 - 1e-9);
        assert_eq!(h.num_qubits(), 3);
    }

    #[test]
    fn fidelity_targeting() {
        let mut rng = rng_for(99, "test/fid");
        let (_, s) = random_gapped_hamiltonian(3, &mut rng).unwrap();
        let psi = random_state_with_fidelity(&s.ground_state, 0.4, &mut rng).unwrap();
        let f = s.ground_fidelity(&psi).unwrap();
        assert!((f - 0.4).abs() <= 1e-10);
    }
}
