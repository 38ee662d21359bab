//! Coupled Hamiltonian `H̃ = η(σ₊a + σ₋a†) + mc²σ_z + χ(σ̃₊a + σ̃₋a†) + γσ̃_z`
//! (ħ = 1), in per-sector and dense form.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{enumerate_sector, excitation_of, flat_dim, BasisState, SectorBasis};
use crate::mapping::pauli;
use crate::C64;

/// Couplings and detunings of the two-spin model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Spin-mode coupling.
    pub eta: f64,
    /// Isospin-mode coupling.
    pub chi: f64,
    /// Spin detuning (rest energy).
    pub mc2: f64,
    /// Isospin detuning.
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(eta: f64, chi: f64, mc2: f64, gamma: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eta must be positive, got {eta}"
            )));
        }
        if !(chi.is_finite() && chi >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "chi must be non-negative, got {chi}"
            )));
        }
        if !mc2.is_finite() || !gamma.is_finite() {
            return Err(Error::InvalidParameter(
                "mc2 and gamma must be finite".into(),
            ));
        }
        Ok(Self {
            eta,
            chi,
            mc2,
            gamma,
        })
    }

    /// `ζ = mc² + γ`
    pub fn zeta(&self) -> f64 {
        self.mc2 + self.gamma
    }

    /// `ξ = mc² − γ`
    pub fn xi(&self) -> f64 {
        self.mc2 - self.gamma
    }
}

/// Hamiltonian restricted to one excitation sector, over the canonical
/// sector ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorHamiltonian {
    pub excitation: i64,
    pub basis: SectorBasis,
    pub matrix: DMatrix<C64>,
}

impl SectorHamiltonian {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn symmetric(rows: &[&[f64]]) -> DMatrix<C64> {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |r, c| C64::from(rows[r][c]));
    debug_assert_eq!(m, m.transpose());
    m
}

/// Sector matrix of the coupled Hamiltonian.
///
/// With `λ₁ = η√(n+1)`, `λ₂ = η√(n+2)`, `λ₃ = χ√(n+1)`, `λ₄ = χ√(n+2)` and
/// `n = I − 1`, sector `I ≥ 1` reads
///
/// ```text
/// [ −ζ  λ₂  λ₄  0 ]
/// [ λ₂  ξ   0   λ₃]
/// [ λ₄  0   −ξ  λ₁]
/// [ 0   λ₃  λ₁  ζ ]
/// ```
///
/// Sector 0 is the upper-left 3×3 block with `n = −1`, sector −1 is `[−ζ]`.
pub fn sector_hamiltonian(excitation: i64, p: &ModelParams) -> Result<SectorHamiltonian> {
    if excitation < -1 {
        return Err(Error::InvalidExcitation(excitation));
    }
    let basis = enumerate_sector(excitation, (excitation + 1) as usize)?;
    let (zeta, xi) = (p.zeta(), p.xi());
    let matrix = match excitation {
        -1 => symmetric(&[&[-zeta]]),
        0 => symmetric(&[
            &[-zeta, p.eta, p.chi],
            &[p.eta, xi, 0.0],
            &[p.chi, 0.0, -xi],
        ]),
        _ => {
            let n = (excitation - 1) as f64;
            let (s1, s2) = ((n + 1.0).sqrt(), (n + 2.0).sqrt());
            let (l1, l2, l3, l4) = (p.eta * s1, p.eta * s2, p.chi * s1, p.chi * s2);
            symmetric(&[
                &[-zeta, l2, l4, 0.0],
                &[l2, xi, 0.0, l3],
                &[l4, 0.0, -xi, l1],
                &[0.0, l3, l1, zeta],
            ])
        }
    };
    Ok(SectorHamiltonian {
        excitation,
        basis,
        matrix,
    })
}

/// Annihilation operator on `Fock(0..=n_max)`.
fn annihilation(n_max: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n_max + 1, n_max + 1, |r, c| {
        if c == r + 1 {
            C64::from((c as f64).sqrt())
        } else {
            C64::from(0.0)
        }
    })
}

/// The coupled Hamiltonian on the flat `spin ⊗ isospin ⊗ Fock(0..=n_max)`
/// basis, assembled from Kronecker products of the raw operators.
pub fn dense_hamiltonian(p: &ModelParams, n_max: usize) -> Result<DMatrix<C64>> {
    if n_max < 2 {
        return Err(Error::InvalidParameter(format!(
            "dense Hamiltonian needs n_max >= 2, got {n_max}"
        )));
    }
    let a = annihilation(n_max);
    let a_dag = a.adjoint();
    let id2 = DMatrix::<C64>::identity(2, 2);
    let id_f = DMatrix::<C64>::identity(n_max + 1, n_max + 1);
    let kron3 = |s: &DMatrix<C64>, t: &DMatrix<C64>, f: &DMatrix<C64>| s.kronecker(t).kronecker(f);

    let spin_coupling = kron3(&pauli::raise(), &id2, &a) + kron3(&pauli::lower(), &id2, &a_dag);
    let iso_coupling = kron3(&id2, &pauli::raise(), &a) + kron3(&id2, &pauli::lower(), &a_dag);
    let h = spin_coupling * C64::from(p.eta)
        + kron3(&pauli::z(), &id2, &id_f) * C64::from(p.mc2)
        + iso_coupling * C64::from(p.chi)
        + kron3(&id2, &pauli::z(), &id_f) * C64::from(p.gamma);
    Ok(h)
}

/// Diagonal of the constant of motion `n + (s_z + s̃_z)/2` on the flat basis.
pub fn constant_of_motion_diagonal(n_max: usize) -> DVector<f64> {
    DVector::from_fn(flat_dim(n_max), |i, _| {
        excitation_of(&BasisState::from_flat_index(i, n_max)) as f64
    })
}

/// Matrix of the constant of motion on the flat basis.
pub fn constant_of_motion_matrix(n_max: usize) -> DMatrix<f64> {
    DMatrix::from_diagonal(&constant_of_motion_diagonal(n_max))
}
