//! Dense complex matrices for the small-system oracles and the exact
//! eigendecomposition behind `exact` evolution and spectral analysis.
//!
//! Everything here is `O(4^L)` or worse and guarded by [`dense_threshold`].
//! The eigensolver backend runs single-threaded so that repeated runs are
//! bit-for-bit reproducible.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Default qubit cutoff for dense work; `DBQITE_DENSE_THRESHOLD` overrides it.
pub const DEFAULT_DENSE_THRESHOLD: usize = 12;

/// The active dense cutoff, read from the environment once per process.
pub fn dense_threshold() -> usize {
    static THRESHOLD: OnceLock<usize> = OnceLock::new();
    *THRESHOLD.get_or_init(|| {
        std::env::var("DBQITE_DENSE_THRESHOLD")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_DENSE_THRESHOLD)
    })
}

pub(crate) fn check_dense(num_qubits: usize) -> Result<()> {
    let threshold = dense_threshold();
    if num_qubits > threshold {
        return Err(Error::DenseThresholdExceeded { num_qubits, threshold });
    }
    Ok(())
}

fn quiet_parallelism() {
    static GUARD: OnceLock<()> = OnceLock::new();
    GUARD.get_or_init(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// Square complex matrix in column-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Rank-one projector `|ψ⟩⟨ψ|`.
    pub fn outer(psi: &StateVector) -> Self {
        let n = psi.dim();
        let a = psi.amplitudes();
        let mut m = Self::zeros(n);
        for j in 0..n {
            let cj = a[j].conj();
            for i in 0..n {
                m[(i, j)] = a[i] * cj;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for j in 0..n {
            for k in 0..n {
                let b = rhs[(k, j)];
                if b.norm_sqr() == 0.0 {
                    continue;
                }
                for i in 0..n {
                    out.data[j * n + i] += self.data[k * n + i] * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.n, v.len());
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            let c = v[j];
            for i in 0..n {
                out[i] += self.data[j * n + i] * c;
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for j in 0..n {
            for i in 0..n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        self.zip(rhs, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        CMatrix { n: self.n, data: self.data.iter().map(|a| a * c).collect() }
    }

    fn zip(&self, rhs: &CMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// `AB − BA`.
    pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a.matmul(b).sub(&b.matmul(a))
    }

    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Operator (spectral) norm, computed as `sqrt(λ_max(M†M))`.
    pub fn operator_norm(&self) -> f64 {
        let gram = self.adjoint().matmul(self);
        let eig = hermitian_eigen(&gram);
        eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    pub fn apply_to_state(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.n {
            return Err(Error::invalid("matrix and state dimensions differ"));
        }
        StateVector::from_amplitudes(self.matvec(psi.amplitudes()))
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[j * self.n + i]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[j * self.n + i]
    }
}

/// Eigendecomposition of a Hermitian matrix: `M = V diag(values) V†` with
/// eigenvalues ascending.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Full eigendecomposition of a Hermitian `CMatrix` (single-threaded faer).
pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    quiet_parallelism();
    let n = m.dim();
    let mut fm = faer::Mat::<faer::c64>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            fm[(i, j)] = m[(i, j)];
        }
    }
    let evd = fm
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("hermitian eigendecomposition failed");
    let diag = evd.S();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].re.partial_cmp(&diag[b].re).unwrap());
    let mut values = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        values.push(diag[src].re);
        for i in 0..n {
            vectors[(i, col)] = u[(i, src)];
        }
    }
    HermitianEigen { values, vectors }
}

/// `e^{c·M}` for Hermitian `M` via its eigendecomposition.
pub fn expm_hermitian(m: &CMatrix, c: Complex64) -> CMatrix {
    let eig = hermitian_eigen(m);
    let n = m.dim();
    let mut scaled = CMatrix::zeros(n);
    // scaled = V · diag(e^{c λ})
    for j in 0..n {
        let f = (c * eig.values[j]).exp();
        for i in 0..n {
            scaled[(i, j)] = eig.vectors[(i, j)] * f;
        }
    }
    scaled.matmul(&eig.vectors.adjoint())
}

/// `e^{c·M}` for anti-Hermitian `M` (so `iM` is Hermitian).
pub fn expm_anti_hermitian(m: &CMatrix, c: Complex64) -> CMatrix {
    let herm = m.scale(Complex64::new(0.0, 1.0));
    // e^{cM} = e^{(-i c)(iM)}
    expm_hermitian(&herm, c * Complex64::new(0.0, -1.0))
}

/// Eigenbasis of a Pauli sum used for exact evolution and spectral queries.
/// Eigenvalues exclude the scalar identity offset; columns of the (possibly
/// real) unitary are eigenvectors in ascending eigenvalue order.
///
/// The vector storage is shared, so affinely related Hamiltonians can reuse
/// one decomposition with remapped eigenvalues.
#[derive(Debug)]
pub struct EigenBasis {
    dim: usize,
    values: Vec<f64>,
    vectors: std::sync::Arc<EigenVectors>,
}

#[derive(Debug)]
enum EigenVectors {
    /// Real orthogonal matrix, column-major. Applies whenever every Pauli
    /// term has an even number of Y factors (e.g. the Heisenberg chain).
    Real(Vec<f64>),
    /// General unitary, column-major.
    Complex(Vec<Complex64>),
}

impl EigenBasis {
    pub(crate) fn new_real(dim: usize, values: Vec<f64>, vectors: Vec<f64>) -> Self {
        EigenBasis { dim, values, vectors: std::sync::Arc::new(EigenVectors::Real(vectors)) }
    }

    pub(crate) fn new_complex(dim: usize, values: Vec<f64>, vectors: Vec<Complex64>) -> Self {
        EigenBasis { dim, values, vectors: std::sync::Arc::new(EigenVectors::Complex(vectors)) }
    }

    /// The same eigenvectors with eigenvalues multiplied by a positive
    /// factor (the decomposition of the rescaled operator).
    pub(crate) fn with_scaled_values(&self, factor: f64) -> Self {
        assert!(factor > 0.0, "eigenvalue order must be preserved");
        EigenBasis {
            dim: self.dim,
            values: self.values.iter().map(|v| v * factor).collect(),
            vectors: self.vectors.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Offset-free eigenvalues, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Coefficients `V†ψ` of a state in the eigenbasis.
    pub fn project(&self, psi: &StateVector) -> Vec<Complex64> {
        let n = self.dim;
        let a = psi.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        match &*self.vectors {
            EigenVectors::Real(v) => {
                for (j, o) in out.iter_mut().enumerate() {
                    let col = &v[j * n..(j + 1) * n];
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..n {
                        acc += col[i] * a[i];
                    }
                    *o = acc;
                }
            }
            EigenVectors::Complex(v) => {
                for (j, o) in out.iter_mut().enumerate() {
                    let col = &v[j * n..(j + 1) * n];
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..n {
                        acc += col[i].conj() * a[i];
                    }
                    *o = acc;
                }
            }
        }
        out
    }

    /// Reassembles `V·coeffs` into a state vector (no normalization).
    pub fn reconstruct(&self, coeffs: &[Complex64]) -> StateVector {
        let n = self.dim;
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        match &*self.vectors {
            EigenVectors::Real(v) => {
                for (j, &c) in coeffs.iter().enumerate() {
                    if c.norm_sqr() == 0.0 {
                        continue;
                    }
                    let col = &v[j * n..(j + 1) * n];
                    for i in 0..n {
                        amps[i] += col[i] * c;
                    }
                }
            }
            EigenVectors::Complex(v) => {
                for (j, &c) in coeffs.iter().enumerate() {
                    if c.norm_sqr() == 0.0 {
                        continue;
                    }
                    let col = &v[j * n..(j + 1) * n];
                    for i in 0..n {
                        amps[i] += col[i] * c;
                    }
                }
            }
        }
        StateVector::from_amplitudes(amps).expect("eigenbasis dimension is a power of two")
    }

    /// The eigenvector at `index` as a unit state vector.
    pub fn eigenstate(&self, index: usize) -> StateVector {
        let n = self.dim;
        let amps = match &*self.vectors {
            EigenVectors::Real(v) => v[index * n..(index + 1) * n]
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
            EigenVectors::Complex(v) => v[index * n..(index + 1) * n].to_vec(),
        };
        StateVector::from_amplitudes(amps).expect("eigenbasis dimension is a power of two")
    }
}

/// Dense Hermitian eigendecomposition from per-column matrix assembly.
/// `fill(col, buffer)` writes column `col` of the matrix into `buffer`.
pub(crate) fn eigenbasis_from_columns(
    dim: usize,
    real: bool,
    fill: impl Fn(usize, &mut [Complex64]),
) -> EigenBasis {
    quiet_parallelism();
    let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
    if real {
        let mut fm = faer::Mat::<f64>::zeros(dim, dim);
        for j in 0..dim {
            scratch.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            fill(j, &mut scratch);
            for i in 0..dim {
                fm[(i, j)] = scratch[i].re;
            }
        }
        let evd = fm
            .self_adjoint_eigen(faer::Side::Lower)
            .expect("hermitian eigendecomposition failed");
        let diag = evd.S();
        let u = evd.U();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| diag[a].partial_cmp(&diag[b]).unwrap());
        let mut values = Vec::with_capacity(dim);
        let mut vectors = vec![0.0f64; dim * dim];
        for (col, &src) in order.iter().enumerate() {
            values.push(diag[src]);
            for i in 0..dim {
                vectors[col * dim + i] = u[(i, src)];
            }
        }
        EigenBasis::new_real(dim, values, vectors)
    } else {
        let mut fm = faer::Mat::<faer::c64>::zeros(dim, dim);
        for j in 0..dim {
            scratch.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            fill(j, &mut scratch);
            for i in 0..dim {
                fm[(i, j)] = scratch[i];
            }
        }
        let evd = fm
            .self_adjoint_eigen(faer::Side::Lower)
            .expect("hermitian eigendecomposition failed");
        let diag = evd.S();
        let u = evd.U();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| diag[a].re.partial_cmp(&diag[b].re).unwrap());
        let mut values = Vec::with_capacity(dim);
        let mut vectors = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (col, &src) in order.iter().enumerate() {
            values.push(diag[src].re);
            for i in 0..dim {
                vectors[col * dim + i] = u[(i, src)];
            }
        }
        EigenBasis::new_complex(dim, values, vectors)
    }
}
