//! The 2+1 Dirac-Moshinsky oscillator in position/momentum form and its
//! identity with the Jaynes-Cummings form `η(σ₊a_r + σ₋a_r†) + mc²σ_z`.
//!
//! Both forms are assembled on `spin ⊗ Fock(n_x, n_y)` with the 2D Fock
//! space truncated to `n_x + n_y <= n_cut`. Ladder matrices are exact on the
//! interior of that triangle, so equality claims are restricted to states
//! with `n_x + n_y < n_cut - 1`.
//!
//! The spinor upper component is spin `+`; the Dirac matrices are
//! `α₁ = −σ_y`, `α₂ = −σ_x`, `β = σ_z`.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

/// Physical constants entering the oscillator, in any consistent units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub m: f64,
    pub omega: f64,
    pub c: f64,
    pub hbar: f64,
}

impl PhysicalParams {
    pub fn new(m: f64, omega: f64, c: f64, hbar: f64) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("m", m)?;
        positive("c", c)?;
        positive("hbar", hbar)?;
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega must be non-negative, got {omega}"
            )));
        }
        Ok(Self { m, omega, c, hbar })
    }

    pub fn unit() -> Self {
        Self {
            m: 1.0,
            omega: 1.0,
            c: 1.0,
            hbar: 1.0,
        }
    }

    pub fn rest_energy(&self) -> f64 {
        self.m * self.c * self.c
    }

    /// Frequency defining the Fock basis. The free-particle limit `ω = 0`
    /// has no natural oscillator length, so a unit frequency is used there.
    fn basis_omega(&self) -> f64 {
        if self.omega > 0.0 {
            self.omega
        } else {
            1.0
        }
    }
}

/// Jaynes-Cummings parameters obtained from the oscillator: the coupling
/// `η` plays the role of the vacuum Rabi coupling and `mc²` the detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappingParams {
    pub eta: f64,
    pub mc2: f64,
}

impl From<&PhysicalParams> for MappingParams {
    fn from(p: &PhysicalParams) -> Self {
        Self {
            eta: eta_from_physical(p),
            mc2: p.rest_energy(),
        }
    }
}

/// `η = 2√(m c² ω ħ)`.
pub fn eta_from_physical(p: &PhysicalParams) -> f64 {
    2.0 * (p.m * p.c * p.c * p.omega * p.hbar).sqrt()
}

/// Ladder operators of the 2D oscillator on the triangular basis
/// `n_x + n_y <= n_cut`.
#[derive(Debug, Clone)]
pub struct OscillatorAlgebra2D {
    pub n_cut: usize,
    /// `(n_x, n_y)` for every basis index.
    pub states: Vec<(usize, usize)>,
    pub ax: DMatrix<C64>,
    pub ay: DMatrix<C64>,
    pub ax_dag: DMatrix<C64>,
    pub ay_dag: DMatrix<C64>,
    pub ar: DMatrix<C64>,
    pub ar_dag: DMatrix<C64>,
    pub al: DMatrix<C64>,
    pub al_dag: DMatrix<C64>,
}

impl OscillatorAlgebra2D {
    pub fn new(n_cut: usize) -> Self {
        let states: Vec<(usize, usize)> = (0..=n_cut)
            .flat_map(|total| (0..=total).map(move |ny| (total - ny, ny)))
            .collect();
        let index: HashMap<(usize, usize), usize> =
            states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let dim = states.len();

        let mut ax = DMatrix::zeros(dim, dim);
        let mut ay = DMatrix::zeros(dim, dim);
        for (col, &(nx, ny)) in states.iter().enumerate() {
            if nx > 0 {
                ax[(index[&(nx - 1, ny)], col)] = C64::new((nx as f64).sqrt(), 0.0);
            }
            if ny > 0 {
                ay[(index[&(nx, ny - 1)], col)] = C64::new((ny as f64).sqrt(), 0.0);
            }
        }
        let ax_dag = ax.adjoint();
        let ay_dag = ay.adjoint();
        let i = C64::i();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ar = (&ax + &ay * i) * C64::from(s);
        let al = (&ax - &ay * i) * C64::from(s);
        let ar_dag = (&ax_dag - &ay_dag * i) * C64::from(s);
        let al_dag = (&ax_dag + &ay_dag * i) * C64::from(s);
        Self {
            n_cut,
            states,
            ax,
            ay,
            ax_dag,
            ay_dag,
            ar,
            ar_dag,
            al,
            al_dag,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Indices of basis states with `n_x + n_y < limit`.
    pub fn below(&self, limit: usize) -> Vec<usize> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, &(nx, ny))| nx + ny < limit)
            .map(|(i, _)| i)
            .collect()
    }

    /// Position operator `r_j = √(ħ/2mω)(a_j + a_j†)` for axis 0 (x) or 1 (y).
    pub fn position(&self, axis: usize, m: f64, omega: f64, hbar: f64) -> DMatrix<C64> {
        let (a, a_dag) = self.axis(axis);
        (a + a_dag) * C64::from((hbar / (2.0 * m * omega)).sqrt())
    }

    /// Momentum operator `p_j = i√(mωħ/2)(a_j† − a_j)`.
    pub fn momentum(&self, axis: usize, m: f64, omega: f64, hbar: f64) -> DMatrix<C64> {
        let (a, a_dag) = self.axis(axis);
        (a_dag - a) * C64::new(0.0, (m * omega * hbar / 2.0).sqrt())
    }

    fn axis(&self, axis: usize) -> (&DMatrix<C64>, &DMatrix<C64>) {
        match axis {
            0 => (&self.ax, &self.ax_dag),
            1 => (&self.ay, &self.ay_dag),
            _ => panic!("axis must be 0 or 1, got {axis}"),
        }
    }
}

pub(crate) mod pauli {
    use nalgebra::DMatrix;

    use crate::C64;

    fn m(entries: [[C64; 2]; 2]) -> DMatrix<C64> {
        DMatrix::from_fn(2, 2, |r, c| entries[r][c])
    }

    const O: C64 = C64::new(0.0, 0.0);
    const ONE: C64 = C64::new(1.0, 0.0);
    const I: C64 = C64::new(0.0, 1.0);

    pub fn x() -> DMatrix<C64> {
        m([[O, ONE], [ONE, O]])
    }

    pub fn y() -> DMatrix<C64> {
        m([[O, -I], [I, O]])
    }

    pub fn z() -> DMatrix<C64> {
        m([[ONE, O], [O, -ONE]])
    }

    /// `|+⟩⟨−|`
    pub fn raise() -> DMatrix<C64> {
        m([[O, ONE], [O, O]])
    }

    /// `|−⟩⟨+|`
    pub fn lower() -> DMatrix<C64> {
        m([[O, O], [ONE, O]])
    }
}

/// `Σ_j c α_j (p_j + i m ω β r_j) + mc² β` on `spin ⊗ Fock(n_x, n_y)`.
pub fn build_dmo_position_form(p: &PhysicalParams, n_cut: usize) -> DMatrix<C64> {
    let alg = OscillatorAlgebra2D::new(n_cut);
    dmo_position_form(p, &alg)
}

fn dmo_position_form(p: &PhysicalParams, alg: &OscillatorAlgebra2D) -> DMatrix<C64> {
    let wb = p.basis_omega();
    let alpha = [-pauli::y(), -pauli::x()];
    let beta = pauli::z();
    let id = DMatrix::<C64>::identity(alg.dim(), alg.dim());

    let mut h = beta.kronecker(&id) * C64::from(p.rest_energy());
    for (axis, alpha_j) in alpha.iter().enumerate() {
        let r = alg.position(axis, p.m, wb, p.hbar);
        let mom = alg.momentum(axis, p.m, wb, p.hbar);
        h += alpha_j.kronecker(&mom) * C64::from(p.c);
        let alpha_beta = alpha_j * &beta;
        h += alpha_beta.kronecker(&r) * C64::new(0.0, p.c * p.m * p.omega);
    }
    h
}

/// `η(σ₊ ⊗ a_r + σ₋ ⊗ a_r†) + mc² σ_z ⊗ 1`.
pub fn build_jcm_form(p: &PhysicalParams, n_cut: usize) -> DMatrix<C64> {
    let alg = OscillatorAlgebra2D::new(n_cut);
    jcm_form(p, &alg)
}

fn jcm_form(p: &PhysicalParams, alg: &OscillatorAlgebra2D) -> DMatrix<C64> {
    let eta = C64::from(eta_from_physical(p));
    let id = DMatrix::<C64>::identity(alg.dim(), alg.dim());
    (pauli::raise().kronecker(&alg.ar) + pauli::lower().kronecker(&alg.ar_dag)) * eta
        + pauli::z().kronecker(&id) * C64::from(p.rest_energy())
}

/// Outcome of comparing the two forms on the interior subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappingReport {
    /// Largest entrywise difference; NaN when there is no interior.
    pub max_interior_diff: f64,
    pub interior_dim: usize,
    /// Norm of the position-form block coupling `|+, 0⟩` to the spin-down,
    /// one-quantum states. Equals `η` when the mapping holds.
    pub coupling_block_norm: f64,
    pub eta: f64,
}

impl MappingReport {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn passed(&self) -> bool {
        self.interior_dim > 0 && self.max_interior_diff < Self::TOLERANCE
    }
}

/// Interior indices on `spin ⊗ Fock` for a 2D algebra.
fn interior_indices(alg: &OscillatorAlgebra2D, limit: usize) -> Vec<usize> {
    let inner = alg.below(limit);
    let dim = alg.dim();
    [0, 1]
        .iter()
        .flat_map(|spin| inner.iter().map(move |&i| spin * dim + i))
        .collect()
}

pub(crate) fn restricted_max_abs(m: &DMatrix<C64>, idx: &[usize]) -> f64 {
    idx.iter()
        .flat_map(|&r| idx.iter().map(move |&c| m[(r, c)].norm()))
        .fold(0.0, f64::max)
}

/// Builds both forms and compares them on states with `n_x + n_y < n_cut - 1`.
pub fn verify_mapping(p: &PhysicalParams, n_cut: usize) -> MappingReport {
    let eta = eta_from_physical(p);
    if n_cut < 4 {
        return MappingReport {
            max_interior_diff: f64::NAN,
            interior_dim: 0,
            coupling_block_norm: f64::NAN,
            eta,
        };
    }
    let alg = OscillatorAlgebra2D::new(n_cut);
    let dmo = dmo_position_form(p, &alg);
    let jcm = jcm_form(p, &alg);
    let interior = interior_indices(&alg, n_cut - 1);
    let max_interior_diff = restricted_max_abs(&(&dmo - &jcm), &interior);

    let dim = alg.dim();
    let vacuum = alg.states.iter().position(|&s| s == (0, 0)).unwrap();
    let coupling_block_norm = alg
        .states
        .iter()
        .enumerate()
        .filter(|(_, &(nx, ny))| nx + ny == 1)
        .map(|(i, _)| dmo[(vacuum, dim + i)].norm_sqr())
        .sum::<f64>()
        .sqrt();

    MappingReport {
        max_interior_diff,
        interior_dim: interior.len(),
        coupling_block_norm,
        eta,
    }
}

/// Effective 2×2 Hamiltonian of the position form on
/// `{|+, n_r = n⟩, |−, n_r = n+1⟩}` (left-chiral vacuum) together with the
/// norm of the part of `H` leaking out of that pair.
pub fn chiral_pair_block(p: &PhysicalParams, n_cut: usize, n: usize) -> ([[f64; 2]; 2], f64) {
    assert!(
        n + 1 < n_cut,
        "pair n = {n} reaches the truncation edge {n_cut}"
    );
    let alg = OscillatorAlgebra2D::new(n_cut);
    let h = dmo_position_form(p, &alg);
    let dim = alg.dim();

    // |n_r⟩ = (a_r†)^n / √n! |0⟩
    let mut chiral = vec![nalgebra::DVector::<C64>::zeros(dim)];
    chiral[0][alg.states.iter().position(|&s| s == (0, 0)).unwrap()] = C64::from(1.0);
    for k in 0..=n {
        let next = &alg.ar_dag * &chiral[k] / C64::from(((k + 1) as f64).sqrt());
        chiral.push(next);
    }
    let embed = |spin: usize, v: &nalgebra::DVector<C64>| {
        let mut out = nalgebra::DVector::<C64>::zeros(2 * dim);
        out.rows_mut(spin * dim, dim).copy_from(v);
        out
    };
    let u = [embed(0, &chiral[n]), embed(1, &chiral[n + 1])];
    let mut block = [[0.0; 2]; 2];
    let mut leak = 0.0;
    for b in 0..2 {
        let hv = &h * &u[b];
        let mut residual = hv.clone();
        for a in 0..2 {
            let elem = u[a].dotc(&hv);
            block[a][b] = elem.re;
            residual -= &u[a] * elem;
        }
        leak = f64::max(leak, residual.norm());
    }
    (block, leak)
}
