//! Scenarios, figure presets and the time-series pipeline.
//!
//! All scenarios use `η = 1`, so times are the scaled time `ηt` and the
//! remaining couplings and detunings are given in units of `η`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    coherent_n_max, initial_state_coherent, initial_state_number, CoherentMode,
    InitialSpecCoherent, InitialSpecNumber, Propagator, QuantumState,
};
use crate::error::{Error, Result};
use crate::hamiltonian::ModelParams;
use crate::observables::{entropy, inversion, reduce_isospin};
use crate::C64;

/// Truncation used for coherent runs unless the amplitude demands more.
pub const DEFAULT_COHERENT_N_MAX: usize = 60;
const NUMBER_N_MAX: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    /// Spin/isospin superposition with the mode in vacuum.
    Number,
    /// Four-term spin/isospin superposition times a coherent state.
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NMax {
    Auto,
    #[serde(untagged)]
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub preset: Option<String>,
    pub case: Case,
    pub theta: f64,
    /// Ignored for [`Case::Number`].
    pub phi: f64,
    /// Real coherent amplitude; ignored for [`Case::Number`].
    pub alpha: f64,
    pub gamma: f64,
    pub mc2: f64,
    pub chi: f64,
    pub t_max: f64,
    pub dt: f64,
    pub mode: CoherentMode,
    pub n_max: NMax,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            preset: None,
            case: Case::Number,
            theta: FRAC_PI_2,
            phi: FRAC_PI_2,
            alpha: SQRT_2,
            gamma: 0.0,
            mc2: 0.0,
            chi: 1.0,
            t_max: 30.0,
            dt: 0.01,
            mode: CoherentMode::Exact,
            n_max: NMax::Auto,
        }
    }
}

/// Identifiers accepted by [`Scenario::preset`].
pub const PRESET_IDS: [&str; 24] = [
    "fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig4a",
    "fig4b", "fig4c", "fig5a", "fig5b", "fig5c", "fig6a", "fig6b", "fig6c", "fig7a", "fig7b",
    "fig7c", "fig8a", "fig8b", "fig8c",
];

impl Scenario {
    /// Parameters of a published figure panel.
    ///
    /// * fig1/fig5: number state, `θ = π/2`, `χ = 1`, `mc² = γ`, with
    ///   `γ = 0, 2, 4` for panels a, b, c.
    /// * fig2/fig6: number state, `γ = mc² = 0`, `θ = 0, π/4, π/2`.
    /// * fig3/fig7: coherent state, `θ = π/4`, `φ = π/2`, `α = √2`, `χ = 1`,
    ///   `mc² = γ` with `γ = 0, 2, 4`.
    /// * fig4/fig8: as fig3 with `γ = 0` and `θ = 0, π/4, π/2`.
    ///
    /// The detuning ladder `0, 2, 4` is only stated for the coherent entropy
    /// figure; the other detuning panels reuse it. Coherent presets run in
    /// [`CoherentMode::Paper`], which keeps only the four-state sectors the
    /// published expansion is written in.
    pub fn preset(id: &str) -> Result<Self> {
        let unknown = || Error::UnknownPreset(id.to_string());
        let (fig, panel) = id
            .strip_prefix("fig")
            .and_then(|rest| {
                let mut chars = rest.chars();
                let fig = chars.next()?.to_digit(10)?;
                let panel = chars.next()?;
                chars.next().is_none().then_some((fig, panel))
            })
            .ok_or_else(unknown)?;
        let panel = match panel {
            'a' => 0,
            'b' => 1,
            'c' => 2,
            _ => return Err(unknown()),
        };
        let ladder = [0.0, 2.0, 4.0][panel];
        let angle = [0.0, FRAC_PI_4, FRAC_PI_2][panel];
        let base = Scenario {
            preset: Some(id.to_string()),
            ..Default::default()
        };
        let number = Scenario {
            case: Case::Number,
            t_max: 30.0,
            ..base.clone()
        };
        let coherent = Scenario {
            case: Case::Coherent,
            theta: FRAC_PI_4,
            phi: FRAC_PI_2,
            alpha: SQRT_2,
            t_max: 100.0,
            mode: CoherentMode::Paper,
            ..base
        };
        let s = match fig {
            1 | 5 => Scenario {
                gamma: ladder,
                mc2: ladder,
                ..number
            },
            2 | 6 => Scenario {
                theta: angle,
                ..number
            },
            3 | 7 => Scenario {
                gamma: ladder,
                mc2: ladder,
                ..coherent
            },
            4 | 8 => Scenario {
                theta: angle,
                ..coherent
            },
            _ => return Err(unknown()),
        };
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return bad(format!("t_max must be positive, got {}", self.t_max));
        }
        for (name, v) in [
            ("theta", self.theta),
            ("phi", self.phi),
            ("alpha", self.alpha),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        self.params().map(|_| ())
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(1.0, self.chi, self.mc2, self.gamma)
    }

    pub fn resolved_n_max(&self) -> usize {
        match (self.case, self.n_max) {
            (_, NMax::Fixed(n)) => n,
            (Case::Number, NMax::Auto) => NUMBER_N_MAX,
            (Case::Coherent, NMax::Auto) => {
                coherent_n_max(C64::from(self.alpha)).max(DEFAULT_COHERENT_N_MAX)
            }
        }
    }

    pub fn initial_state(&self) -> Result<QuantumState> {
        match self.case {
            Case::Number => {
                let n_max = self.resolved_n_max();
                let s = initial_state_number(&InitialSpecNumber { theta: self.theta });
                if n_max == s.n_max() {
                    Ok(s)
                } else {
                    if n_max < 1 {
                        return Err(Error::Truncation {
                            n_max,
                            required: 1,
                            weight: 1.0,
                            tolerance: crate::TAIL_TOLERANCE,
                        });
                    }
                    QuantumState::from_amplitudes(n_max, s.iter().collect::<Vec<_>>())
                }
            }
            Case::Coherent => {
                let spec = InitialSpecCoherent {
                    theta: self.theta,
                    phi: self.phi,
                    alpha: C64::from(self.alpha),
                };
                initial_state_coherent(&spec, self.resolved_n_max(), self.mode)
            }
        }
    }

    /// Sample times `0, dt, 2dt, …` up to `t_max`.
    pub fn times(&self) -> Vec<f64> {
        let steps = (self.t_max / self.dt + 1e-9).floor() as usize;
        (0..=steps).map(|k| k as f64 * self.dt).collect()
    }
}

/// One sample of the isospin observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRow {
    pub t: f64,
    #[serde(rename = "S")]
    pub entropy: f64,
    #[serde(rename = "W")]
    pub inversion: f64,
    pub rho_ee: f64,
    pub rho_gg: f64,
    pub re_rho_eg: f64,
    pub im_rho_eg: f64,
    pub norm: f64,
    pub trace_deficit: f64,
}

impl TimeSeriesRow {
    pub const COLUMNS: [&'static str; 9] = [
        "t",
        "S",
        "W",
        "rho_ee",
        "rho_gg",
        "re_rho_eg",
        "im_rho_eg",
        "norm",
        "trace_deficit",
    ];

    pub fn values(&self) -> [f64; 9] {
        [
            self.t,
            self.entropy,
            self.inversion,
            self.rho_ee,
            self.rho_gg,
            self.re_rho_eg,
            self.im_rho_eg,
            self.norm,
            self.trace_deficit,
        ]
    }

    pub fn from_values(v: [f64; 9]) -> Self {
        Self {
            t: v[0],
            entropy: v[1],
            inversion: v[2],
            rho_ee: v[3],
            rho_gg: v[4],
            re_rho_eg: v[5],
            im_rho_eg: v[6],
            norm: v[7],
            trace_deficit: v[8],
        }
    }

    pub fn from_state(state: &QuantumState) -> Result<Self> {
        let rho = reduce_isospin(state);
        Ok(Self {
            t: state.time(),
            entropy: entropy(&rho)?,
            inversion: inversion(&rho),
            rho_ee: rho.rho_ee,
            rho_gg: rho.rho_gg,
            re_rho_eg: rho.rho_eg.re,
            im_rho_eg: rho.rho_eg.im,
            norm: state.norm(),
            trace_deficit: state.trace_deficit(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub scenario: Scenario,
    pub n_max: usize,
    pub trace_deficit: f64,
    pub rows: Vec<TimeSeriesRow>,
}

impl TimeSeries {
    pub fn column(&self, f: impl Fn(&TimeSeriesRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }
}

/// Evolves the scenario's initial state over its time grid.
pub fn run_scenario(s: &Scenario) -> Result<TimeSeries> {
    s.validate()?;
    let initial = s.initial_state()?;
    let propagator = Propagator::new(&initial, &s.params()?)?;
    let rows = s
        .times()
        .into_iter()
        .map(|t| TimeSeriesRow::from_state(&propagator.at(t)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeSeries {
        scenario: s.clone(),
        n_max: initial.n_max(),
        trace_deficit: initial.trace_deficit(),
        rows,
    })
}
