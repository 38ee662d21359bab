//! Isospin reduced density matrix, von Neumann entropy and population
//! inversion.

use serde::{Deserialize, Serialize};

use crate::dynamics::QuantumState;
use crate::error::{Error, Result};
use crate::hilbert::Level;
use crate::C64;

/// Allowed excess of the Bloch vector length over 1.
pub const POSITIVITY_SLACK: f64 = 1e-9;

/// `ρ = ρ_ee|+̃⟩⟨+̃| + ρ_gg|−̃⟩⟨−̃| + ρ_eg|+̃⟩⟨−̃| + ρ_eg*|−̃⟩⟨+̃|`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedDensityMatrix {
    pub rho_ee: f64,
    pub rho_gg: f64,
    pub rho_eg: C64,
}

impl ReducedDensityMatrix {
    pub fn new(rho_ee: f64, rho_gg: f64, rho_eg: C64) -> Self {
        Self {
            rho_ee,
            rho_gg,
            rho_eg,
        }
    }

    pub fn trace(&self) -> f64 {
        self.rho_ee + self.rho_gg
    }

    /// Eigenvalues `(λ₊, λ₋)` of the 2×2 matrix via the Bloch length.
    pub fn eigenvalues(&self) -> Result<(f64, f64)> {
        let r = bloch(self).length();
        if r > 1.0 + POSITIVITY_SLACK {
            return Err(Error::Positivity(r));
        }
        let r = r.min(1.0);
        Ok((0.5 + 0.5 * r, 0.5 - 0.5 * r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl BlochVector {
    pub fn length(&self) -> f64 {
        (self.sx * self.sx + self.sy * self.sy + self.sz * self.sz).sqrt()
    }
}

/// Traces out the Dirac spin and the mode. The populations are normalized
/// by the trace, so a state prepared with a trace deficit still yields a
/// unit-trace matrix.
pub fn reduce_isospin(state: &QuantumState) -> ReducedDensityMatrix {
    let mut ee = 0.0;
    let mut gg = 0.0;
    let mut eg = C64::from(0.0);
    for (basis, amp) in state.iter() {
        match basis.isospin {
            Level::Plus => {
                ee += amp.norm_sqr();
                let mut partner = basis;
                partner.isospin = Level::Minus;
                eg += amp * state.amplitude(&partner).conj();
            }
            Level::Minus => gg += amp.norm_sqr(),
        }
    }
    let trace = ee + gg;
    if trace > 0.0 && trace != 1.0 {
        ReducedDensityMatrix::new(ee / trace, gg / trace, eg / trace)
    } else {
        ReducedDensityMatrix::new(ee, gg, eg)
    }
}

/// `(2 Re ρ_eg, 2 Im ρ_eg, ρ_ee − ρ_gg)`
pub fn bloch(rho: &ReducedDensityMatrix) -> BlochVector {
    BlochVector {
        sx: 2.0 * rho.rho_eg.re,
        sy: 2.0 * rho.rho_eg.im,
        sz: rho.rho_ee - rho.rho_gg,
    }
}

/// `S = −λ₊ ln λ₊ − λ₋ ln λ₋` with `0 ln 0 = 0`.
pub fn entropy(rho: &ReducedDensityMatrix) -> Result<f64> {
    let (lp, lm) = rho.eigenvalues()?;
    let term = |l: f64| if l > 0.0 { -l * l.ln() } else { 0.0 };
    // + 0.0 turns a negative zero into +0
    Ok((term(lp) + term(lm)).max(0.0) + 0.0)
}

/// `W = ρ_ee − ρ_gg`
pub fn inversion(rho: &ReducedDensityMatrix) -> f64 {
    rho.rho_ee - rho.rho_gg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, initial_state_number, InitialSpecNumber};
    use crate::hamiltonian::ModelParams;
    use crate::hilbert::BasisState;
    use approx::assert_relative_eq;
    use nalgebra::Matrix2;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2};

    #[test]
    fn excited_isospin_is_pure() {
        for (spin, n) in [(Level::Plus, 0), (Level::Minus, 3), (Level::Plus, 7)] {
            let s = QuantumState::from_amplitudes(
                8,
                [(BasisState::new(spin, Level::Plus, n), C64::from(1.0))],
            )
            .unwrap();
            let rho = reduce_isospin(&s);
            assert_eq!(rho, ReducedDensityMatrix::new(1.0, 0.0, C64::from(0.0)));
            assert_eq!(entropy(&rho).unwrap(), 0.0);
            assert_eq!(inversion(&rho), 1.0);
        }
    }

    #[test]
    fn entropy_examples() {
        let s = |ee: f64, gg: f64, eg: f64| entropy(&ReducedDensityMatrix::new(ee, gg, eg.into()));
        assert_eq!(s(1.0, 0.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(s(0.5, 0.5, 0.0).unwrap(), LN_2, epsilon = 1e-15);
        // -(3/4) ln(3/4) - (1/4) ln(1/4)
        let expected = -0.75 * 0.75f64.ln() - 0.25 * 0.25f64.ln();
        assert_relative_eq!(s(0.75, 0.25, 0.0).unwrap(), expected, epsilon = 1e-15);
        assert_relative_eq!(s(0.75, 0.25, 0.0).unwrap(), 0.562335, epsilon = 1e-6);
        assert_eq!(s(0.5, 0.5, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn non_positive_matrix_is_rejected() {
        let rho = ReducedDensityMatrix::new(0.5, 0.5, C64::new(0.6, 0.0));
        assert!(matches!(entropy(&rho), Err(Error::Positivity(_))));
    }

    #[test]
    fn bloch_examples() {
        let b = bloch(&ReducedDensityMatrix::new(0.5, 0.5, 0.0.into()));
        assert_eq!((b.sx, b.sy, b.sz), (0.0, 0.0, 0.0));
        let b = bloch(&ReducedDensityMatrix::new(1.0, 0.0, 0.0.into()));
        assert_eq!((b.sx, b.sy, b.sz), (0.0, 0.0, 1.0));
        let b = bloch(&ReducedDensityMatrix::new(0.5, 0.5, 0.5.into()));
        assert_eq!((b.sx, b.sy, b.sz), (1.0, 0.0, 0.0));
    }

    #[test]
    fn number_state_reductions() {
        let s = initial_state_number(&InitialSpecNumber { theta: FRAC_PI_4 });
        let rho = reduce_isospin(&s);
        assert_relative_eq!(rho.rho_ee, 0.5, epsilon = 1e-15);
        assert_relative_eq!(rho.rho_gg, 0.5, epsilon = 1e-15);
        assert_eq!(rho.rho_eg, C64::from(0.0));

        let s = initial_state_number(&InitialSpecNumber { theta: FRAC_PI_2 });
        assert_eq!(inversion(&reduce_isospin(&s)), -1.0);

        let p = ModelParams::new(1.0, 0.8, 0.5, 1.5).unwrap();
        for k in 0..100 {
            let st = evolve(&s, &p, 0.3 * k as f64).unwrap();
            assert_eq!(reduce_isospin(&st).rho_eg, C64::from(0.0));
        }
    }

    #[test]
    fn coherence_pairs_shift_fock_index() {
        // (|−−̃,n+2⟩ + |−+̃,n+2⟩)/√2 has ρ_eg = 1/2: the partner of B₃(n+1)
        // is B₁(n)
        let a = C64::from(std::f64::consts::FRAC_1_SQRT_2);
        let s = QuantumState::from_amplitudes(
            6,
            [
                (BasisState::new(Level::Minus, Level::Minus, 3), a),
                (BasisState::new(Level::Minus, Level::Plus, 3), a),
            ],
        )
        .unwrap();
        let rho = reduce_isospin(&s);
        assert_relative_eq!(rho.rho_eg.re, 0.5, epsilon = 1e-15);
        assert_eq!(entropy(&rho).unwrap(), 0.0);
    }

    fn arbitrary_rho() -> impl Strategy<Value = ReducedDensityMatrix> {
        // Hermitian positive 2x2 from a random amplitude pair per environment level
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6).prop_map(|v| {
            let z: Vec<C64> = v.iter().map(|&(a, b)| C64::new(a, b)).collect();
            let ee: f64 = z[..3].iter().map(|c| c.norm_sqr()).sum();
            let gg: f64 = z[3..].iter().map(|c| c.norm_sqr()).sum();
            let eg: C64 = z[..3].iter().zip(&z[3..]).map(|(p, m)| p * m.conj()).sum();
            let tr = ee + gg;
            ReducedDensityMatrix::new(ee / tr, gg / tr, eg / tr)
        })
    }

    proptest! {
        #[test]
        fn entropy_bounds(rho in arbitrary_rho()) {
            let s = entropy(&rho).unwrap();
            prop_assert!((0.0..=LN_2 + 1e-12).contains(&s));
        }

        #[test]
        fn eigenvalues_agree_with_direct_diagonalization(rho in arbitrary_rho()) {
            let (lp, lm) = rho.eigenvalues().unwrap();
            let m = Matrix2::new(
                C64::from(rho.rho_ee), rho.rho_eg,
                rho.rho_eg.conj(), C64::from(rho.rho_gg),
            );
            let mut direct: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
            direct.sort_by(f64::total_cmp);
            prop_assert!((lp - direct[1]).abs() < 1e-12);
            prop_assert!((lm - direct[0]).abs() < 1e-12);
            prop_assert!((lp + lm - 1.0).abs() < 1e-15);
        }

        #[test]
        fn inversion_is_bloch_z(rho in arbitrary_rho()) {
            prop_assert_eq!(inversion(&rho), bloch(&rho).sz);
        }
    }
}
