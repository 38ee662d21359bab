//! Truncated spin ⊗ isospin ⊗ Fock basis, excitation sectors and coherent
//! state amplitudes.
//!
//! Every basis state carries the conserved excitation
//! `I = n + (s_z + s̃_z)/2`. Sector `I = -1` is the single state `|−−̃,0⟩`,
//! sector `I = 0` holds three states and every sector `I ≥ 1` holds four.
//! Sector bases are always listed in the canonical order
//! `(|−−̃,I+1⟩, |+−̃,I⟩, |−+̃,I⟩, |++̃,I−1⟩)`, dropping members whose Fock
//! index is negative or exceeds the truncation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{C64, TAIL_TOLERANCE};

/// One of the two levels of a two-level system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    Plus,
    Minus,
}

impl Level {
    /// Eigenvalue of `σ_z`.
    pub fn sign(self) -> i64 {
        match self {
            Level::Plus => 1,
            Level::Minus => -1,
        }
    }

    pub fn flipped(self) -> Level {
        match self {
            Level::Plus => Level::Minus,
            Level::Minus => Level::Plus,
        }
    }

    /// Position in the flat basis (`+` first).
    pub(crate) fn index(self) -> usize {
        match self {
            Level::Plus => 0,
            Level::Minus => 1,
        }
    }

    fn symbol(self) -> char {
        match self {
            Level::Plus => '+',
            Level::Minus => '-',
        }
    }
}

/// `|spin, isospin, n⟩`: Dirac spin level, isospin level and occupation of
/// the right-chiral mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisState {
    pub spin: Level,
    pub isospin: Level,
    pub n: usize,
}

impl BasisState {
    pub fn new(spin: Level, isospin: Level, n: usize) -> Self {
        Self { spin, isospin, n }
    }

    /// Index in the flat `spin ⊗ isospin ⊗ Fock(0..=n_max)` ordering.
    pub fn flat_index(&self, n_max: usize) -> usize {
        (self.spin.index() * 2 + self.isospin.index()) * (n_max + 1) + self.n
    }

    pub fn from_flat_index(index: usize, n_max: usize) -> Self {
        let dim = n_max + 1;
        let level = |i| if i == 0 { Level::Plus } else { Level::Minus };
        let block = index / dim;
        Self {
            spin: level(block / 2),
            isospin: level(block % 2),
            n: index % dim,
        }
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|{}{}~,{}>",
            self.spin.symbol(),
            self.isospin.symbol(),
            self.n
        )
    }
}

/// Dimension of the flat basis with Fock levels `0..=n_max`.
pub fn flat_dim(n_max: usize) -> usize {
    4 * (n_max + 1)
}

/// Conserved excitation `n + (s_z + s̃_z)/2` of a basis state.
pub fn excitation_of(state: &BasisState) -> i64 {
    state.n as i64 + (state.spin.sign() + state.isospin.sign()) / 2
}

/// Basis of one eigenspace of the constant of motion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    pub excitation: i64,
    pub states: Vec<BasisState>,
}

impl SectorBasis {
    /// Size of the sector without truncation: 1, 3 or 4.
    pub fn full_len(excitation: i64) -> usize {
        match excitation {
            -1 => 1,
            0 => 3,
            _ => 4,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `false` when the Fock truncation removed members of this sector.
    pub fn is_complete(&self) -> bool {
        self.len() == Self::full_len(self.excitation)
    }

    pub fn position(&self, state: &BasisState) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }
}

/// Lists the basis of sector `excitation` in canonical order, keeping only
/// states with `n <= n_max`.
pub fn enumerate_sector(excitation: i64, n_max: usize) -> Result<SectorBasis> {
    if excitation < -1 {
        return Err(Error::InvalidExcitation(excitation));
    }
    use Level::{Minus, Plus};
    let candidates = [
        (Minus, Minus, excitation + 1),
        (Plus, Minus, excitation),
        (Minus, Plus, excitation),
        (Plus, Plus, excitation - 1),
    ];
    let states = candidates
        .into_iter()
        .filter(|&(_, _, n)| n >= 0 && n as usize <= n_max)
        .map(|(spin, isospin, n)| BasisState::new(spin, isospin, n as usize))
        .collect();
    Ok(SectorBasis { excitation, states })
}

/// A coherent state `|α⟩` truncated at Fock level `n_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentSpec {
    pub alpha: C64,
    pub n_max: usize,
    /// Largest admissible weight beyond `n_max`.
    pub tolerance: f64,
}

impl CoherentSpec {
    pub fn new(alpha: C64, n_max: usize) -> Self {
        Self {
            alpha,
            n_max,
            tolerance: TAIL_TOLERANCE,
        }
    }

    /// `Σ_{n > n_max} |q_n|²`.
    pub fn tail(&self) -> f64 {
        tail_weight(self.alpha, self.n_max)
    }
}

/// Squared Poisson weights `|q_n|²` for `n = 0..` until the sequence is past
/// its peak and negligible.
fn poisson_weights(alpha: C64) -> Vec<f64> {
    let mean = alpha.norm_sqr();
    let mut weights = Vec::new();
    let mut w = (-mean).exp();
    let mut n = 0usize;
    loop {
        weights.push(w);
        if (n as f64) > mean && w < 1e-40 {
            break;
        }
        n += 1;
        w *= mean / n as f64;
        if mean == 0.0 {
            weights.push(0.0);
            break;
        }
    }
    weights
}

/// Probability weight of a coherent state above Fock level `n_max`.
pub fn tail_weight(alpha: C64, n_max: usize) -> f64 {
    poisson_weights(alpha).iter().skip(n_max + 1).rev().sum()
}

/// Smallest `n_max` whose coherent tail is below `tolerance`.
pub fn required_n_max(alpha: C64, tolerance: f64) -> usize {
    let weights = poisson_weights(alpha);
    let mut tail = 0.0;
    // tails[k] = Σ_{n > k} w_n, accumulated from the small end
    let mut tails = vec![0.0; weights.len()];
    for k in (0..weights.len()).rev() {
        tails[k] = tail;
        tail += weights[k];
    }
    tails
        .iter()
        .position(|&t| t < tolerance)
        .unwrap_or(weights.len())
}

/// Coherent amplitudes `q_n = exp(-|α|²/2) αⁿ/√n!` for `n = 0..=n_max`,
/// generated by the recurrence `q_{n+1} = q_n α/√(n+1)`.
pub fn coherent_amplitudes(spec: &CoherentSpec) -> Result<Vec<C64>> {
    let tail = spec.tail();
    if tail >= spec.tolerance {
        return Err(Error::Truncation {
            n_max: spec.n_max,
            required: required_n_max(spec.alpha, spec.tolerance),
            weight: tail,
            tolerance: spec.tolerance,
        });
    }
    let mut q = Vec::with_capacity(spec.n_max + 1);
    let mut current = C64::new((-spec.alpha.norm_sqr() / 2.0).exp(), 0.0);
    q.push(current);
    for n in 0..spec.n_max {
        current = current * spec.alpha / ((n + 1) as f64).sqrt();
        q.push(current);
    }
    Ok(q)
}
