//! Pauli-sum Hamiltonians: matrix-free action, energy and variance
//! observables, spectral analysis, and real-time evolution.
//!
//! A [`PauliSum`] carries an optional scalar identity offset symbolically.
//! Evolutions and commutators are exactly independent of the offset; only
//! reported energies and eigenvalues include it. This makes affine
//! invariance of the flows bit-exact rather than approximate.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{self, EigenBasis};
use crate::error::{Error, Result};
use crate::lanczos;
use crate::state::{PauliAxis, PauliString, StateVector};

/// One weighted Pauli string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    #[serde(rename = "coeff")]
    pub coefficient: f64,
    #[serde(rename = "factors")]
    pub string: PauliString,
}

/// A real-weighted sum of Pauli strings plus a scalar identity offset.
/// Hermitian by construction; duplicate strings are merged on build.
#[derive(Debug)]
pub struct PauliSum {
    num_qubits: usize,
    terms: Vec<PauliTerm>,
    offset: f64,
    eigen_cache: OnceLock<Arc<EigenBasis>>,
}

impl Clone for PauliSum {
    fn clone(&self) -> Self {
        let cache = OnceLock::new();
        if let Some(basis) = self.eigen_cache.get() {
            let _ = cache.set(basis.clone());
        }
        PauliSum {
            num_qubits: self.num_qubits,
            terms: self.terms.clone(),
            offset: self.offset,
            eigen_cache: cache,
        }
    }
}

impl PartialEq for PauliSum {
    fn eq(&self, other: &Self) -> bool {
        self.num_qubits == other.num_qubits
            && self.terms == other.terms
            && self.offset == other.offset
    }
}

#[derive(Serialize, Deserialize)]
struct PauliSumRepr {
    num_qubits: usize,
    offset: f64,
    terms: Vec<PauliTerm>,
}

impl Serialize for PauliSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PauliSumRepr {
            num_qubits: self.num_qubits,
            offset: self.offset,
            terms: self.terms.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PauliSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PauliSumRepr::deserialize(d)?;
        let sum = PauliSum::new(
            repr.num_qubits,
            repr.terms.into_iter().map(|t| (t.coefficient, t.string)).collect(),
        )
        .map_err(serde::de::Error::custom)?;
        Ok(sum.shift(repr.offset))
    }
}

impl PauliSum {
    /// Builds a Pauli sum, merging duplicate strings and dropping exact
    /// zeros. Term order is canonical (sorted by string) so that equal sums
    /// compare equal and evolutions are reproducible.
    pub fn new(num_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::invalid("a Pauli sum needs at least one qubit"));
        }
        let mut merged: BTreeMap<PauliString, f64> = BTreeMap::new();
        let mut offset = 0.0;
        for (coeff, string) in terms {
            string.check_fits(num_qubits)?;
            if string.is_identity() {
                offset += coeff;
            } else {
                *merged.entry(string).or_insert(0.0) += coeff;
            }
        }
        let terms = merged
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|(string, coefficient)| PauliTerm { coefficient, string })
            .collect();
        Ok(PauliSum { num_qubits, terms, offset, eigen_cache: OnceLock::new() })
    }

    /// The open antiferromagnetic Heisenberg chain
    /// `Σ_{i=0}^{L-2} (X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1})`.
    pub fn heisenberg_chain(num_qubits: usize) -> Result<Self> {
        if num_qubits < 2 {
            return Err(Error::invalid(format!(
                "heisenberg chain needs at least 2 qubits, got {num_qubits}"
            )));
        }
        let mut terms = Vec::with_capacity(3 * (num_qubits - 1));
        for bond in 0..num_qubits - 1 {
            for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] {
                terms.push((1.0, PauliString::pair((bond, axis), (bond + 1, axis))?));
            }
        }
        PauliSum::new(num_qubits, terms)
    }

    /// The two commuting bond layers of the open chain. The first layer
    /// holds the bonds starting on even sites `(0,1), (2,3), …` — the singlet
    /// pairs — and the second the bonds in between.
    pub fn heisenberg_layers(num_qubits: usize) -> Result<(Self, Self)> {
        let full = Self::heisenberg_chain(num_qubits)?;
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for term in &full.terms {
            let bond = term.string.factors()[0].0;
            let dst = if bond % 2 == 0 { &mut even } else { &mut odd };
            dst.push((term.coefficient, term.string.clone()));
        }
        Ok((PauliSum::new(num_qubits, even)?, PauliSum::new(num_qubits, odd)?))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.num_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Sum of absolute term coefficients (offset excluded); an easy upper
    /// bound on the offset-free spectral radius.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// Adds `c·I`, tracked symbolically. The eigenbasis cache is shared:
    /// eigenvectors do not change under affine shifts.
    pub fn shift(&self, c: f64) -> PauliSum {
        let mut shifted = self.clone();
        shifted.offset += c;
        shifted
    }

    /// Rescales every coefficient and the offset by `factor`. A cached
    /// eigendecomposition carries over for positive factors (same
    /// eigenvectors, scaled eigenvalues).
    pub fn scaled(&self, factor: f64) -> PauliSum {
        let terms = self
            .terms
            .iter()
            .map(|t| (t.coefficient * factor, t.string.clone()))
            .collect();
        let mut out = PauliSum::new(self.num_qubits, terms).expect("terms already validated");
        out.offset = self.offset * factor;
        if factor > 0.0 {
            if let Some(basis) = self.eigen_cache.get() {
                let _ = out.eigen_cache.set(Arc::new(basis.with_scaled_values(factor)));
            }
        }
        out
    }

    /// True when the matrix of the sum is real in the computational basis,
    /// i.e. every term carries an even number of Y factors.
    pub fn is_real_in_computational_basis(&self) -> bool {
        self.terms.iter().all(|t| {
            t.string
                .factors()
                .iter()
                .filter(|&&(_, axis)| axis == PauliAxis::Y)
                .count()
                % 2
                == 0
        })
    }

    fn check_state(&self, psi: &StateVector) -> Result<()> {
        if psi.num_qubits() != self.num_qubits {
            return Err(Error::IncompatibleQubitCounts {
                left: self.num_qubits,
                right: psi.num_qubits(),
            });
        }
        Ok(())
    }

    /// The offset-free action `(Σ_j c_j P_j)ψ`, one pass per term.
    pub fn apply_traceless(&self, psi: &StateVector) -> Result<StateVector> {
        self.check_state(psi)?;
        let dim = psi.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        let amps = psi.amplitudes();
        for term in &self.terms {
            let masks = term.string.masks();
            let c = term.coefficient;
            if masks.flip == 0 {
                for n in 0..dim {
                    out[n] += c * masks.coeff(n) * amps[n];
                }
            } else {
                for n in 0..dim {
                    out[n ^ masks.flip] += c * masks.coeff(n) * amps[n];
                }
            }
        }
        StateVector::from_amplitudes(out)
    }

    /// The full (generally unnormalized) action `Hψ`, offset included.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        let traceless = self.apply_traceless(psi)?;
        if self.offset == 0.0 {
            return Ok(traceless);
        }
        traceless.axpy(Complex64::new(self.offset, 0.0), psi)
    }

    /// Energy `E = ⟨ψ|H|ψ⟩` (as `Re⟨ψ, Hψ⟩`) and variance
    /// `V = ‖Hψ‖² − E²`, clamped to 0 when `|V| ≤ 1e-12`.
    ///
    /// The variance is computed from the offset-free action, so it is
    /// exactly invariant under [`PauliSum::shift`].
    pub fn energy_and_variance(&self, psi: &StateVector) -> Result<(f64, f64)> {
        let h_psi = self.apply_traceless(psi)?;
        let e0 = psi.inner_product(&h_psi)?.re;
        let mut v = h_psi.norm().powi(2) - e0 * e0;
        if v.abs() <= 1e-12 || (v < 0.0 && -v <= 1e-12 * e0.abs().max(1.0)) {
            v = 0.0;
        }
        Ok((e0 + self.offset, v))
    }

    /// Cached dense eigendecomposition of the offset-free part. Fails above
    /// the dense threshold unless already cached.
    pub fn eigenbasis(&self) -> Result<Arc<EigenBasis>> {
        if let Some(basis) = self.eigen_cache.get() {
            return Ok(basis.clone());
        }
        dense::check_dense(self.num_qubits)?;
        let dim = self.dim();
        let real = self.is_real_in_computational_basis();
        let masks: Vec<(f64, crate::state::PauliMasks)> = self
            .terms
            .iter()
            .map(|t| (t.coefficient, t.string.masks()))
            .collect();
        let basis = dense::eigenbasis_from_columns(dim, real, |col, buffer| {
            for (c, m) in &masks {
                buffer[col ^ m.flip] += c * m.coeff(col);
            }
        });
        let basis = Arc::new(basis);
        let _ = self.eigen_cache.set(basis.clone());
        Ok(self.eigen_cache.get().expect("just set").clone())
    }

    /// Dense matrix of the full Hamiltonian, offset included. Oracle-scale.
    pub fn to_matrix(&self) -> Result<crate::dense::CMatrix> {
        dense::check_dense(self.num_qubits)?;
        let dim = self.dim();
        let mut m = crate::dense::CMatrix::zeros(dim);
        for term in &self.terms {
            let masks = term.string.masks();
            for n in 0..dim {
                m[(n ^ masks.flip, n)] += term.coefficient * masks.coeff(n);
            }
        }
        for n in 0..dim {
            m[(n, n)] += Complex64::new(self.offset, 0.0);
        }
        Ok(m)
    }

    /// Extremal spectral data. `Dense` mode diagonalizes fully (threshold
    /// bound); `Iterative` mode runs a deflated Lanczos scheme.
    pub fn spectral_summary(&self, mode: SpectralMode) -> Result<SpectralSummary> {
        match mode {
            SpectralMode::Dense => {
                let basis = self.eigenbasis()?;
                let values = basis.values();
                let dim = values.len();
                let lambda0 = values[0] + self.offset;
                let lambda1 = values[1.min(dim - 1)] + self.offset;
                let lambda_max = values[dim - 1] + self.offset;
                Ok(SpectralSummary::assemble(
                    lambda0,
                    lambda1,
                    lambda_max,
                    basis.eigenstate(0),
                ))
            }
            SpectralMode::Iterative => {
                let ext = lanczos::extremal_eigenpairs(self)?;
                Ok(SpectralSummary::assemble(
                    ext.lambda0 + self.offset,
                    ext.lambda1 + self.offset,
                    ext.lambda_max + self.offset,
                    ext.ground,
                ))
            }
        }
    }

    /// `e^{itH}ψ`. Exact mode goes through the (cached) eigendecomposition;
    /// `Trotter2` applies the symmetric second-order splitting.
    ///
    /// Evolutions ignore the scalar offset (a global phase), as the affine
    /// invariance contract of [`PauliSum::shift`] requires.
    pub fn evolve(&self, psi: &StateVector, t: f64, method: EvolutionMethod) -> Result<StateVector> {
        self.check_state(psi)?;
        if t == 0.0 {
            return Ok(psi.clone());
        }
        match method {
            EvolutionMethod::Exact => {
                let basis = self.eigenbasis()?;
                let mut coeffs = basis.project(psi);
                for (c, &v) in coeffs.iter_mut().zip(basis.values()) {
                    *c *= Complex64::from_polar(1.0, t * v);
                }
                Ok(basis.reconstruct(&coeffs))
            }
            EvolutionMethod::Trotter2 { steps } => {
                if steps == 0 {
                    return Err(Error::invalid("trotter2 needs at least one step"));
                }
                self.trotter2(psi, t, steps)
            }
        }
    }

    /// Exact evolution when the dense threshold allows it, otherwise
    /// fine-stepped `Trotter2` with `steps = max(4, ⌈10·|t|·√Λ⌉)` where
    /// `Λ = Σ_j |c_j|`, keeping the per-step angles small.
    pub fn auto_evolution(&self, t: f64) -> EvolutionMethod {
        if self.num_qubits <= dense::dense_threshold() || self.eigen_cache.get().is_some() {
            EvolutionMethod::Exact
        } else {
            let steps = (10.0 * t.abs() * self.one_norm().sqrt()).ceil().max(4.0) as usize;
            EvolutionMethod::Trotter2 { steps }
        }
    }

    /// Splits the terms into layers for the symmetric product formula. A
    /// nearest-neighbour chain gets the even/odd bond coloring (terms within
    /// a layer commute); anything else falls back to one layer per term.
    fn trotter_layers(&self) -> Vec<Vec<usize>> {
        let is_chain = self.terms.iter().all(|t| {
            let f = t.string.factors();
            f.len() == 2 && f[1].0 == f[0].0 + 1
        });
        if is_chain && !self.terms.is_empty() {
            let mut even = Vec::new();
            let mut odd = Vec::new();
            for (idx, term) in self.terms.iter().enumerate() {
                if term.string.factors()[0].0 % 2 == 0 {
                    even.push(idx);
                } else {
                    odd.push(idx);
                }
            }
            let mut layers = Vec::new();
            if !even.is_empty() {
                layers.push(even);
            }
            if !odd.is_empty() {
                layers.push(odd);
            }
            layers
        } else {
            (0..self.terms.len()).map(|i| vec![i]).collect()
        }
    }

    fn apply_layer(&self, psi: StateVector, layer: &[usize], theta: f64) -> Result<StateVector> {
        let mut state = psi;
        for &idx in layer {
            let term = &self.terms[idx];
            state = state.apply_pauli_exponential(&term.string, theta * term.coefficient)?;
        }
        Ok(state)
    }

    fn trotter2(&self, psi: &StateVector, t: f64, steps: usize) -> Result<StateVector> {
        let layers = self.trotter_layers();
        let mut state = psi.clone();
        if layers.is_empty() {
            return Ok(state);
        }
        let dt = t / steps as f64;
        for _ in 0..steps {
            if layers.len() == 1 {
                state = self.apply_layer(state, &layers[0], dt)?;
                continue;
            }
            for layer in &layers[..layers.len() - 1] {
                state = self.apply_layer(state, layer, dt / 2.0)?;
            }
            state = self.apply_layer(state, &layers[layers.len() - 1], dt)?;
            for layer in layers[..layers.len() - 1].iter().rev() {
                state = self.apply_layer(state, layer, dt / 2.0)?;
            }
        }
        Ok(state)
    }
}

/// How to obtain spectral data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralMode {
    Dense,
    Iterative,
}

/// How to realize `e^{itH}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EvolutionMethod {
    Exact,
    Trotter2 { steps: usize },
}

/// Extremal spectral data consumed by schedules and theorem checkers.
#[derive(Debug, Clone)]
pub struct SpectralSummary {
    pub lambda0: f64,
    pub lambda1: f64,
    /// Largest eigenvalue (the shifted spectral radius is
    /// `lambda_max − lambda0`).
    pub lambda_max: f64,
    /// Spectral gap `λ1 − λ0`.
    pub gap: f64,
    /// Spectral radius `max(|λ0|, |λ_max|)`.
    pub spectral_norm: f64,
    pub ground_state: StateVector,
    pub degenerate_ground: bool,
}

impl SpectralSummary {
    fn assemble(lambda0: f64, lambda1: f64, lambda_max: f64, ground_state: StateVector) -> Self {
        let gap = lambda1 - lambda0;
        let spectral_norm = lambda0.abs().max(lambda_max.abs());
        let degenerate_ground = gap <= 1e-8 * spectral_norm.max(f64::MIN_POSITIVE);
        SpectralSummary {
            lambda0,
            lambda1,
            lambda_max,
            gap,
            spectral_norm,
            ground_state,
            degenerate_ground,
        }
    }

    /// Spectral radius after shifting the ground energy to zero,
    /// `λ_{d-1} − λ0`.
    pub fn shifted_norm(&self) -> f64 {
        self.lambda_max - self.lambda0
    }

    /// Ground-state fidelity `|⟨λ0|ψ⟩|²`.
    pub fn ground_fidelity(&self, psi: &StateVector) -> Result<f64> {
        self.ground_state.fidelity(psi)
    }

    pub fn require_unique_ground(&self) -> Result<()> {
        if self.degenerate_ground {
            return Err(Error::DegenerateGroundState {
                gap: self.gap,
                scale: self.spectral_norm,
            });
        }
        Ok(())
    }
}
