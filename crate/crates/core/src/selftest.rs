//! Built-in consistency suites: sector evolution against the dense oracle
//! and against the closed-form number-state solution.

use std::fmt;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{
    closed_form_case1, initial_state_coherent, initial_state_number, CoherentMode,
    InitialSpecCoherent, InitialSpecNumber, Propagator, QuantumState,
};
use crate::error::Result;
use crate::hamiltonian::{sector_hamiltonian, ModelParams, SectorHamiltonian};
use crate::hilbert::{coherent_amplitudes, flat_dim, BasisState, CoherentSpec, Level};
use crate::oracle::{compare, DensePropagator, DenseState};
use crate::C64;

pub const ORACLE_TOLERANCE: f64 = 1e-8;
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-10;

/// Deliberate faults for checking that the suites can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Negates `ζ` on the diagonal of every sector Hamiltonian.
    FlipZeta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestConfig {
    pub seed: u64,
    pub oracle_draws: usize,
    pub oracle_n_max: usize,
    pub oracle_times: Vec<f64>,
    pub closed_form_draws: usize,
    pub closed_form_points: usize,
    /// Closed-form comparisons cover `ηt ∈ [0, closed_form_horizon]`.
    pub closed_form_horizon: f64,
    pub mutation: Option<Mutation>,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            oracle_draws: 10,
            oracle_n_max: 40,
            oracle_times: vec![1.0, 5.0, 20.0, 50.0],
            closed_form_draws: 5,
            closed_form_points: 100,
            closed_form_horizon: 50.0,
            mutation: None,
        }
    }
}

/// One random coherent scenario for the oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleDraw {
    pub theta: f64,
    pub phi: f64,
    pub alpha: f64,
    pub params: ModelParams,
}

impl OracleDraw {
    pub fn sample<R: Rng>(rng: &mut R) -> Self {
        let tau = std::f64::consts::TAU;
        Self {
            theta: rng.random_range(0.0..tau),
            phi: rng.random_range(0.0..tau),
            alpha: rng.random_range(0.0..=std::f64::consts::SQRT_2),
            params: ModelParams {
                eta: 1.0,
                chi: rng.random_range(0.0..2.0),
                mc2: rng.random_range(0.0..4.0),
                gamma: rng.random_range(0.0..4.0),
            },
        }
    }
}

/// Identical-particle number-state scenario (`η = χ`, `mc² = γ`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormDraw {
    pub theta: f64,
    pub eta: f64,
    pub gamma: f64,
}

impl ClosedFormDraw {
    pub fn sample<R: Rng>(rng: &mut R) -> Self {
        Self {
            theta: rng.random_range(0.0..std::f64::consts::TAU),
            eta: rng.random_range(0.5..2.0),
            gamma: rng.random_range(0.0..4.0),
        }
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            eta: self.eta,
            chi: self.eta,
            mc2: self.gamma,
            gamma: self.gamma,
        }
    }
}

fn mutated(i: i64, p: &ModelParams, mutation: Option<Mutation>) -> Result<SectorHamiltonian> {
    let mut h = sector_hamiltonian(i, p)?;
    if mutation == Some(Mutation::FlipZeta) {
        for (k, s) in h.basis.states.iter().enumerate() {
            if s.spin == s.isospin {
                h.matrix[(k, k)] = -h.matrix[(k, k)];
            }
        }
    }
    Ok(h)
}

fn propagator(state: &QuantumState, p: &ModelParams, m: Option<Mutation>) -> Result<Propagator> {
    Propagator::from_builder(state, |i| mutated(i, p, m))
}

/// Coherent initial state on the flat basis, written out term by term.
fn dense_coherent(spec: &InitialSpecCoherent, n_max: usize) -> Result<DenseState> {
    let q = coherent_amplitudes(&CoherentSpec::new(spec.alpha, n_max))?;
    let c = spec.coefficients();
    let v = DVector::from_fn(flat_dim(n_max), |i, _| {
        let b = BasisState::from_flat_index(i, n_max);
        let coeff = match (b.spin, b.isospin) {
            (Level::Minus, Level::Minus) => c[0],
            (Level::Plus, Level::Minus) => c[1],
            (Level::Minus, Level::Plus) => c[2],
            (Level::Plus, Level::Plus) => c[3],
        };
        q[b.n] * coeff
    });
    DenseState::new(v, n_max)
}

/// Largest phase-aligned amplitude difference between sector and dense
/// evolution over `times`.
pub fn oracle_deviation(
    draw: &OracleDraw,
    n_max: usize,
    times: &[f64],
    mutation: Option<Mutation>,
) -> Result<f64> {
    let spec = InitialSpecCoherent {
        theta: draw.theta,
        phi: draw.phi,
        alpha: C64::from(draw.alpha),
    };
    let sector_state = initial_state_coherent(&spec, n_max, CoherentMode::Exact)?;
    let prop = propagator(&sector_state, &draw.params, mutation)?;
    let dense = DensePropagator::new(&draw.params, n_max)?;
    let v0 = dense_coherent(&spec, n_max)?;
    let mut worst: f64 = 0.0;
    for &t in times {
        let reference = dense.evolve(&v0, t)?;
        let sector = DenseState::from(&prop.at(t));
        let mut diff = compare(&sector, &reference.state)?;
        if !reference.certified {
            diff = f64::INFINITY;
        }
        worst = worst.max(diff);
    }
    Ok(worst)
}

/// Largest difference between sector evolution and the closed form over
/// `points` equally spaced scaled times in `[0, horizon]`.
pub fn closed_form_deviation(
    draw: &ClosedFormDraw,
    points: usize,
    horizon: f64,
    mutation: Option<Mutation>,
) -> Result<f64> {
    let p = draw.params();
    let state = initial_state_number(&InitialSpecNumber { theta: draw.theta });
    let prop = propagator(&state, &p, mutation)?;
    let basis = [
        BasisState::new(Level::Minus, Level::Minus, 1),
        BasisState::new(Level::Plus, Level::Minus, 0),
        BasisState::new(Level::Minus, Level::Plus, 0),
    ];
    let mut worst: f64 = 0.0;
    for k in 0..points {
        let scaled = horizon * k as f64 / (points.max(2) - 1) as f64;
        let t = scaled / draw.eta;
        let exact = closed_form_case1(draw.theta, &p, t)?;
        let numeric = prop.at(t);
        for (b, e) in basis.iter().zip(exact) {
            worst = worst.max((numeric.amplitude(b) - e).norm());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.deviation < self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: deviation {:.3e} (tolerance {:.0e}) {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.deviation,
            self.tolerance,
            self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    /// False when any check failed or when nothing was checked.
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }
}

pub fn run_selftest(cfg: &SelftestConfig) -> Result<SelftestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();
    for k in 0..cfg.oracle_draws {
        let draw = OracleDraw::sample(&mut rng);
        let deviation = oracle_deviation(&draw, cfg.oracle_n_max, &cfg.oracle_times, cfg.mutation)?;
        checks.push(Check {
            name: format!("oracle #{k}"),
            deviation,
            tolerance: ORACLE_TOLERANCE,
            detail: format!(
                "theta={:.6} phi={:.6} alpha={:.6} chi={:.6} mc2={:.6} gamma={:.6} n_max={}",
                draw.theta,
                draw.phi,
                draw.alpha,
                draw.params.chi,
                draw.params.mc2,
                draw.params.gamma,
                cfg.oracle_n_max
            ),
        });
    }
    for k in 0..cfg.closed_form_draws {
        let draw = ClosedFormDraw::sample(&mut rng);
        let deviation = closed_form_deviation(
            &draw,
            cfg.closed_form_points,
            cfg.closed_form_horizon,
            cfg.mutation,
        )?;
        checks.push(Check {
            name: format!("closed form #{k}"),
            deviation,
            tolerance: CLOSED_FORM_TOLERANCE,
            detail: format!(
                "theta={:.6} eta=chi={:.6} mc2=gamma={:.6}",
                draw.theta, draw.eta, draw.gamma
            ),
        });
    }
    Ok(SelftestReport { checks })
}
