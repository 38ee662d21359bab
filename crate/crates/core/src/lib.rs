//! Dirac-Moshinsky oscillator in 2+1 dimensions coupled to an external
//! isospin field, simulated as two two-level systems sharing one bosonic
//! mode (a two-spin Jaynes-Cummings model).
//!
//! The coupled Hamiltonian conserves the total excitation
//! `I = n_r + (σ_z + σ̃_z)/2`, so every evolution is carried out exactly by
//! diagonalizing the (at most 4×4) excitation sectors. The crate is split
//! into:
//!
//! * [`hilbert`]: basis states, excitation sectors and coherent amplitudes.
//! * [`mapping`]: the position/momentum form of the oscillator and its
//!   equivalence with the Jaynes-Cummings form on a truncated 2D Fock space.
//! * [`hamiltonian`]: sector and dense forms of the coupled Hamiltonian.
//! * [`dynamics`]: initial states, sector propagation and the closed-form
//!   number-state solution.
//! * [`observables`]: isospin reduced density matrix, entropy and inversion.
//! * [`oracle`]: brute-force dense evolution used for cross-validation.
//! * [`scenario`], [`output`], [`selftest`]: figure presets, time-series
//!   files and the built-in consistency suites used by the CLI.

pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod hilbert;
pub mod mapping;
pub mod observables;
pub mod oracle;
pub mod output;
pub mod scenario;
pub mod selftest;

pub use num_complex::Complex64 as C64;

pub use dynamics::{
    closed_form_case1, evolve, initial_state_coherent, initial_state_number, CoherentMode,
    InitialSpecCoherent, InitialSpecNumber, Propagator, QuantumState,
};
pub use error::{Error, Result};
pub use hamiltonian::{
    constant_of_motion_matrix, dense_hamiltonian, sector_hamiltonian, ModelParams,
    SectorHamiltonian,
};
pub use hilbert::{
    coherent_amplitudes, enumerate_sector, excitation_of, BasisState, CoherentSpec, Level,
    SectorBasis,
};
pub use mapping::{
    build_dmo_position_form, build_jcm_form, eta_from_physical, verify_mapping, MappingReport,
    OscillatorAlgebra2D, PhysicalParams,
};
pub use observables::{
    bloch, entropy, inversion, reduce_isospin, BlochVector, ReducedDensityMatrix,
};
pub use oracle::{compare, dense_evolve, DenseEvolution, DensePropagator, DenseState};
pub use scenario::{run_scenario, Case, NMax, Scenario, TimeSeries, TimeSeriesRow};

/// Default bound on discarded probability weight (coherent tail, truncated
/// sectors).
pub const TAIL_TOLERANCE: f64 = 1e-12;
