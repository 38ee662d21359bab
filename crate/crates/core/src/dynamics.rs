//! Initial states and exact evolution by per-sector eigendecomposition.
//!
//! A [`QuantumState`] stores its amplitudes grouped by excitation sector.
//! Since the Hamiltonian never mixes sectors, `exp(−iHt)` factorizes into
//! at most 4×4 blocks, each diagonalized once and reused for every time.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{sector_hamiltonian, ModelParams, SectorHamiltonian};
use crate::hilbert::{
    coherent_amplitudes, enumerate_sector, excitation_of, flat_dim, required_n_max, BasisState,
    CoherentSpec, Level, SectorBasis,
};
use crate::{C64, TAIL_TOLERANCE};

#[derive(Debug, Clone, PartialEq)]
pub struct SectorAmplitudes {
    pub basis: SectorBasis,
    pub amplitudes: Vec<C64>,
}

impl SectorAmplitudes {
    pub fn weight(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Pure state of spin, isospin and mode, grouped by excitation sector.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_max: usize,
    time: f64,
    trace_deficit: f64,
    sectors: BTreeMap<i64, SectorAmplitudes>,
}

impl QuantumState {
    /// Collects amplitudes into sectors. States not listed have amplitude 0.
    pub fn from_amplitudes<I>(n_max: usize, amplitudes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisState, C64)>,
    {
        let mut sectors: BTreeMap<i64, SectorAmplitudes> = BTreeMap::new();
        for (state, amp) in amplitudes {
            if state.n > n_max {
                return Err(Error::InvalidParameter(format!(
                    "{state} lies above n_max = {n_max}"
                )));
            }
            let excitation = excitation_of(&state);
            let entry = match sectors.entry(excitation) {
                std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::btree_map::Entry::Vacant(e) => {
                    let basis = enumerate_sector(excitation, n_max)?;
                    let amplitudes = vec![C64::from(0.0); basis.len()];
                    e.insert(SectorAmplitudes { basis, amplitudes })
                }
            };
            let pos = entry
                .basis
                .position(&state)
                .expect("state belongs to its sector");
            entry.amplitudes[pos] += amp;
        }
        Ok(Self {
            n_max,
            time: 0.0,
            trace_deficit: 0.0,
            sectors,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Weight removed on purpose when the state was prepared (paper-faithful
    /// coherent mode); zero otherwise.
    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    pub fn sectors(&self) -> impl Iterator<Item = (i64, &SectorAmplitudes)> {
        self.sectors.iter().map(|(&i, s)| (i, s))
    }

    pub fn amplitude(&self, state: &BasisState) -> C64 {
        self.sectors
            .get(&excitation_of(state))
            .and_then(|s| s.basis.position(state).map(|p| s.amplitudes[p]))
            .unwrap_or_default()
    }

    /// All stored `(state, amplitude)` pairs, by ascending sector.
    pub fn iter(&self) -> impl Iterator<Item = (BasisState, C64)> + '_ {
        self.sectors.values().flat_map(|s| {
            s.basis
                .states
                .iter()
                .copied()
                .zip(s.amplitudes.iter().copied())
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sectors.values().map(SectorAmplitudes::weight).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Embeds the state in the flat `spin ⊗ isospin ⊗ Fock(0..=n_max)` basis.
    pub fn to_dense(&self) -> DVector<C64> {
        let mut v = DVector::zeros(flat_dim(self.n_max));
        for (s, a) in self.iter() {
            v[s.flat_index(self.n_max)] = a;
        }
        v
    }

    /// `⟨I⟩`, computed from the sector labels.
    pub fn excitation_expectation(&self) -> f64 {
        self.sectors
            .iter()
            .map(|(&i, s)| i as f64 * s.weight())
            .sum()
    }

    /// `⟨ψ|O|ψ⟩` for an operator on the flat basis.
    pub fn expectation(&self, op: &DMatrix<C64>) -> Result<C64> {
        let v = self.to_dense();
        if op.nrows() != v.len() || op.ncols() != v.len() {
            return Err(Error::DimensionMismatch(op.nrows(), v.len()));
        }
        Ok(v.dotc(&(op * &v)))
    }
}

/// Number-state preparation: `(cos θ |−+̃⟩ + sin θ |+−̃⟩)|0⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialSpecNumber {
    pub theta: f64,
}

/// Coherent-state preparation:
/// `(c₁|−−̃⟩ + c₂|+−̃⟩ + c₃|−+̃⟩ + c₄|++̃⟩)|α⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialSpecCoherent {
    pub theta: f64,
    pub phi: f64,
    pub alpha: C64,
}

impl InitialSpecCoherent {
    /// `(cosθ cosφ, sinθ sinφ, cosθ sinφ, sinθ cosφ)`
    pub fn coefficients(&self) -> [f64; 4] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [ct * cp, st * sp, ct * sp, st * cp]
    }

    /// Coefficient multiplying the spin/isospin configuration of `state`.
    fn coefficient(&self, state: &BasisState) -> f64 {
        let c = self.coefficients();
        match (state.spin, state.isospin) {
            (Level::Minus, Level::Minus) => c[0],
            (Level::Plus, Level::Minus) => c[1],
            (Level::Minus, Level::Plus) => c[2],
            (Level::Plus, Level::Plus) => c[3],
        }
    }
}

/// How the low sectors of a coherent initial state are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoherentMode {
    /// Every component is kept and evolved in its own sector.
    #[default]
    Exact,
    /// Only the four-state sectors `I >= 1` are kept; the weight in sectors
    /// −1 and 0 is dropped and reported as a trace deficit.
    Paper,
}

pub fn initial_state_number(spec: &InitialSpecNumber) -> QuantumState {
    let (s, c) = spec.theta.sin_cos();
    QuantumState::from_amplitudes(
        2,
        [
            (BasisState::new(Level::Minus, Level::Plus, 0), C64::from(c)),
            (BasisState::new(Level::Plus, Level::Minus, 0), C64::from(s)),
        ],
    )
    .expect("vacuum states fit any truncation")
}

/// Smallest truncation for which both the coherent tail and the weight in
/// the edge-truncated sectors stay below `TAIL_TOLERANCE`.
pub fn coherent_n_max(alpha: C64) -> usize {
    (required_n_max(alpha, TAIL_TOLERANCE) + 2).max(2)
}

pub fn initial_state_coherent(
    spec: &InitialSpecCoherent,
    n_max: usize,
    mode: CoherentMode,
) -> Result<QuantumState> {
    // report the n_max this constructor needs, not just the Fock tail bound
    let q = coherent_amplitudes(&CoherentSpec::new(spec.alpha, n_max)).map_err(|e| match e {
        Error::Truncation {
            weight, tolerance, ..
        } => Error::Truncation {
            n_max,
            required: coherent_n_max(spec.alpha),
            weight,
            tolerance,
        },
        other => other,
    })?;
    let mut sectors = BTreeMap::new();
    let mut dropped_edge = 0.0;
    let mut deficit = 0.0;
    for excitation in -1..=(n_max as i64 + 1) {
        let basis = enumerate_sector(excitation, n_max)?;
        let amplitudes: Vec<C64> = basis
            .states
            .iter()
            .map(|s| q[s.n] * spec.coefficient(s))
            .collect();
        let sector = SectorAmplitudes { basis, amplitudes };
        if !sector.basis.is_complete() {
            dropped_edge += sector.weight();
        } else if mode == CoherentMode::Paper && excitation <= 0 {
            deficit += sector.weight();
        } else {
            sectors.insert(excitation, sector);
        }
    }
    if dropped_edge >= TAIL_TOLERANCE {
        return Err(Error::Truncation {
            n_max,
            required: coherent_n_max(spec.alpha),
            weight: dropped_edge,
            tolerance: TAIL_TOLERANCE,
        });
    }
    Ok(QuantumState {
        n_max,
        time: 0.0,
        trace_deficit: deficit,
        sectors,
    })
}

/// Spectral decomposition of one sector Hamiltonian.
#[derive(Debug, Clone)]
struct SectorEigen {
    energies: DVector<f64>,
    vectors: DMatrix<C64>,
}

impl SectorEigen {
    fn new(h: DMatrix<C64>) -> Self {
        let eig = SymmetricEigen::new(h);
        Self {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    fn propagate(&self, amplitudes: &[C64], t: f64) -> Vec<C64> {
        let v = DVector::from_column_slice(amplitudes);
        let mut coeffs = self.vectors.adjoint() * v;
        for (c, &e) in coeffs.iter_mut().zip(self.energies.iter()) {
            *c *= C64::from_polar(1.0, -e * t);
        }
        (&self.vectors * coeffs).iter().copied().collect()
    }
}

/// Time evolution of a fixed initial state; the sector eigendecompositions
/// are computed once.
#[derive(Debug, Clone)]
pub struct Propagator {
    initial: QuantumState,
    eigen: BTreeMap<i64, SectorEigen>,
}

impl Propagator {
    pub fn new(state: &QuantumState, p: &ModelParams) -> Result<Self> {
        Self::from_builder(state, |i| sector_hamiltonian(i, p))
    }

    /// Like [`Propagator::new`] with a caller-supplied sector generator.
    /// The selftest uses it to inject faulty Hamiltonians.
    pub fn from_builder<F>(state: &QuantumState, mut builder: F) -> Result<Self>
    where
        F: FnMut(i64) -> Result<SectorHamiltonian>,
    {
        let mut eigen = BTreeMap::new();
        for (&excitation, sector) in &state.sectors {
            if !sector.basis.is_complete() {
                let weight = sector.weight();
                if weight >= TAIL_TOLERANCE {
                    return Err(Error::Truncation {
                        n_max: state.n_max,
                        required: (excitation + 1) as usize,
                        weight,
                        tolerance: TAIL_TOLERANCE,
                    });
                }
            }
            let full = builder(excitation)?;
            if full.excitation != excitation || full.basis.states.len() != full.matrix.nrows() {
                return Err(Error::DimensionMismatch(
                    full.matrix.nrows(),
                    full.basis.len(),
                ));
            }
            // edge sectors evolve under the projection onto their kept states
            let idx: Vec<usize> = sector
                .basis
                .states
                .iter()
                .map(|s| full.basis.position(s).expect("sector member"))
                .collect();
            let h = DMatrix::from_fn(idx.len(), idx.len(), |r, c| full.matrix[(idx[r], idx[c])]);
            eigen.insert(excitation, SectorEigen::new(h));
        }
        Ok(Self {
            initial: state.clone(),
            eigen,
        })
    }

    pub fn initial(&self) -> &QuantumState {
        &self.initial
    }

    /// The state after evolving the initial state for a further time `t`.
    pub fn at(&self, t: f64) -> QuantumState {
        let mut out = self.initial.clone();
        out.time += t;
        for (i, sector) in out.sectors.iter_mut() {
            sector.amplitudes = self.eigen[i].propagate(&sector.amplitudes, t);
        }
        out
    }
}

/// `exp(−iHt)|ψ⟩`, sector by sector.
pub fn evolve(state: &QuantumState, p: &ModelParams, t: f64) -> Result<QuantumState> {
    Ok(Propagator::new(state, p)?.at(t))
}

/// Analytic amplitudes `(C₁, C₂, C₃)` over `(|−−̃,1⟩, |+−̃,0⟩, |−+̃,0⟩)` for
/// the number-state preparation, valid when `η = χ` and `mc² = γ`.
///
/// The sector matrix `[[−2γ, η, η], [η, 0, 0], [η, 0, 0]]` has the null
/// vector `(0, 1, −1)/√2`; on its complement it is `−γ + M` with
/// `M² = Ω² = γ² + 2η²`, which gives the trigonometric form below.
pub fn closed_form_case1(theta: f64, p: &ModelParams, t: f64) -> Result<[C64; 3]> {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    if !close(p.eta, p.chi) || !close(p.mc2, p.gamma) {
        return Err(Error::InvalidParameter(format!(
            "closed form needs eta = chi and mc2 = gamma, got {p:?}"
        )));
    }
    let (eta, gamma) = (p.eta, p.gamma);
    let r2 = std::f64::consts::SQRT_2;
    let (s, c) = theta.sin_cos();
    let dark = (s - c) / r2;
    let bright = (s + c) / r2;
    let omega = (gamma * gamma + 2.0 * eta * eta).sqrt();
    let (sw, cw) = (omega * t).sin_cos();
    let phase = C64::from_polar(1.0, gamma * t);
    let c1 = phase * C64::new(0.0, -sw / omega * r2 * eta * bright);
    let plus = phase * C64::new(cw, -gamma * sw / omega) * bright;
    Ok([c1, (plus + dark) / r2, (plus - dark) / r2])
}
