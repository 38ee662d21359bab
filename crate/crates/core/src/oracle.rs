//! Brute-force evolution on the full truncated space.
//!
//! Nothing here touches the sector machinery: the Hamiltonian comes from
//! [`dense_hamiltonian`] (Kronecker products of the raw operators) and the
//! propagator from one eigendecomposition of the whole matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::dynamics::QuantumState;
use crate::error::{Error, Result};
use crate::hamiltonian::{dense_hamiltonian, ModelParams};
use crate::hilbert::{flat_dim, BasisState};
use crate::C64;

/// Largest edge amplitude for which a dense result is certified.
pub const EDGE_THRESHOLD: f64 = 1e-8;
const NORM_TOLERANCE: f64 = 1e-9;
const EDGE_SAMPLES: usize = 16;

/// Amplitudes over the flat `spin ⊗ isospin ⊗ Fock(0..=n_max)` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    pub vector: DVector<C64>,
    pub n_max: usize,
}

impl DenseState {
    pub fn new(vector: DVector<C64>, n_max: usize) -> Result<Self> {
        if vector.len() != flat_dim(n_max) {
            return Err(Error::DimensionMismatch(vector.len(), flat_dim(n_max)));
        }
        Ok(Self { vector, n_max })
    }

    /// Largest amplitude on Fock levels `n >= n_max - 2`.
    pub fn edge_amplitude(&self) -> f64 {
        self.vector
            .iter()
            .enumerate()
            .filter(|(i, _)| BasisState::from_flat_index(*i, self.n_max).n + 2 >= self.n_max)
            .map(|(_, a)| a.norm())
            .fold(0.0, f64::max)
    }
}

impl From<&QuantumState> for DenseState {
    fn from(s: &QuantumState) -> Self {
        Self {
            vector: s.to_dense(),
            n_max: s.n_max(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DenseEvolution {
    pub state: DenseState,
    /// Whether the edge amplitude stayed below [`EDGE_THRESHOLD`].
    pub certified: bool,
    pub max_edge_amplitude: f64,
}

/// Full-space propagator reusable across times.
#[derive(Debug, Clone)]
pub struct DensePropagator {
    n_max: usize,
    energies: DVector<f64>,
    vectors: DMatrix<C64>,
}

impl DensePropagator {
    pub fn new(p: &ModelParams, n_max: usize) -> Result<Self> {
        let eig = SymmetricEigen::new(dense_hamiltonian(p, n_max)?);
        Ok(Self {
            n_max,
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    fn apply(&self, v: &DVector<C64>, t: f64) -> DVector<C64> {
        let mut c = self.vectors.adjoint() * v;
        for (ci, &e) in c.iter_mut().zip(self.energies.iter()) {
            *ci *= C64::from_polar(1.0, -e * t);
        }
        &self.vectors * c
    }

    pub fn evolve(&self, v: &DenseState, t: f64) -> Result<DenseEvolution> {
        if v.n_max != self.n_max {
            return Err(Error::DimensionMismatch(v.n_max, self.n_max));
        }
        let norm = v.vector.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "dense oracle needs a normalized state, got norm {norm}"
            )));
        }
        let mut max_edge = v.edge_amplitude();
        for k in 1..EDGE_SAMPLES {
            let probe = DenseState {
                vector: self.apply(&v.vector, t * k as f64 / EDGE_SAMPLES as f64),
                n_max: self.n_max,
            };
            max_edge = max_edge.max(probe.edge_amplitude());
        }
        let state = DenseState {
            vector: self.apply(&v.vector, t),
            n_max: self.n_max,
        };
        max_edge = max_edge.max(state.edge_amplitude());
        Ok(DenseEvolution {
            state,
            certified: max_edge < EDGE_THRESHOLD,
            max_edge_amplitude: max_edge,
        })
    }
}

/// `exp(−iH_dense t)|v⟩` by full diagonalization.
pub fn dense_evolve(v: &DenseState, p: &ModelParams, t: f64) -> Result<DenseEvolution> {
    DensePropagator::new(p, v.n_max)?.evolve(v, t)
}

/// `max_i |a_i − e^{iφ} b_i|` with `φ` maximizing `Re⟨a|e^{iφ}b⟩`.
pub fn compare(a: &DenseState, b: &DenseState) -> Result<f64> {
    if a.vector.len() != b.vector.len() || a.n_max != b.n_max {
        return Err(Error::DimensionMismatch(a.vector.len(), b.vector.len()));
    }
    let overlap = a.vector.dotc(&b.vector);
    let phase = if overlap.norm() > 0.0 {
        overlap.conj() / overlap.norm()
    } else {
        C64::from(1.0)
    };
    Ok(a.vector
        .iter()
        .zip(b.vector.iter())
        .map(|(x, y)| (x - y * phase).norm())
        .fold(0.0, f64::max))
}
