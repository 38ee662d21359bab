//! Acceptance suite. Runs without the libtest harness so that every check
//! prints exactly one `PASS`/`FAIL` line, then exits non-zero if any failed.

use std::f64::consts::{LN_2, PI, SQRT_2, TAU};
use std::time::{Duration, Instant};

use dmojc::output::write_csv;
use dmojc::scenario::PRESET_IDS;
use dmojc::selftest::{oracle_deviation, ClosedFormDraw, OracleDraw};
use dmojc::{
    closed_form_case1, constant_of_motion_matrix, dense_hamiltonian, reduce_isospin, run_scenario,
    verify_mapping, BasisState, Level, ModelParams, PhysicalParams, Propagator, QuantumState,
    Scenario, TimeSeries, TimeSeriesRow, C64,
};
use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Suite {
    failed: usize,
}

impl Suite {
    fn run(&mut self, label: &str, check: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {label}: {detail} [{elapsed:.2}s]"),
            Err(detail) => {
                self.failed += 1;
                println!("FAIL  {label}: {detail} [{elapsed:.2}s]");
            }
        }
    }
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn preset(id: &str) -> Scenario {
    Scenario::preset(id).expect("known preset")
}

fn series(s: &Scenario) -> TimeSeries {
    run_scenario(s).expect("scenario runs")
}

/// `exp(A)` by scaling and squaring a truncated Taylor series.
fn expm3(a: Matrix3<C64>) -> Matrix3<C64> {
    let norm: f64 = a.iter().map(|z| z.norm()).sum();
    let squarings = norm.log2().ceil().max(0.0) as u32 + 1;
    let scaled = a / C64::from(2f64.powi(squarings as i32));
    let mut term = Matrix3::<C64>::identity();
    let mut sum = term;
    for k in 1..30 {
        term = term * scaled / C64::from(k as f64);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Three-state block over `(|−−̃,1⟩, |+−̃,0⟩, |−+̃,0⟩)`, written from the
/// Hamiltonian directly.
fn three_state_block(p: &ModelParams) -> Matrix3<C64> {
    let zeta = p.mc2 + p.gamma;
    let xi = p.mc2 - p.gamma;
    Matrix3::new(-zeta, p.eta, p.chi, p.eta, xi, 0.0, p.chi, 0.0, -xi).map(C64::from)
}

fn number_block(state: &QuantumState) -> Vector3<C64> {
    Vector3::new(
        state.amplitude(&BasisState::new(Level::Minus, Level::Minus, 1)),
        state.amplitude(&BasisState::new(Level::Plus, Level::Minus, 0)),
        state.amplitude(&BasisState::new(Level::Minus, Level::Plus, 0)),
    )
}

/// Interior local maxima `(index, prominence)` of a sampled curve.
fn peaks(y: &[f64]) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            continue;
        }
        let base = |range: &mut dyn Iterator<Item = usize>| {
            let mut lowest = y[i];
            for j in range {
                if y[j] > y[i] {
                    break;
                }
                lowest = lowest.min(y[j]);
            }
            lowest
        };
        let left = base(&mut (0..i).rev());
        let right = base(&mut (i + 1..y.len()));
        out.push((i, y[i] - left.max(right)));
    }
    out
}

/// Vertex of the parabola through three samples around `i`.
fn refine(t: &[f64], y: &[f64], i: usize) -> f64 {
    let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
    let denom = a - 2.0 * b + c;
    let shift = if denom.abs() > 0.0 {
        0.5 * (a - c) / denom
    } else {
        0.0
    };
    t[i] + shift * (t[i + 1] - t[i])
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn mapping_equality() -> Outcome {
    let (r, elapsed) = timed(|| verify_mapping(&PhysicalParams::unit(), 12));
    ensure(
        r.max_interior_diff < 1e-12 && r.interior_dim > 0 && elapsed.as_secs_f64() < 1.0,
        format!(
            "max interior diff {:.2e} on {} states, eta {}, {:.3}s",
            r.max_interior_diff,
            r.interior_dim,
            r.eta,
            elapsed.as_secs_f64()
        ),
    )
}

fn closed_form_regression() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (worst, elapsed) = timed(|| {
        let mut worst: (f64, f64) = (0.0, 0.0);
        for _ in 0..5 {
            let draw = ClosedFormDraw::sample(&mut rng);
            let p = draw.params();
            let initial =
                dmojc::initial_state_number(&dmojc::InitialSpecNumber { theta: draw.theta });
            let prop = Propagator::new(&initial, &p).unwrap();
            let h = three_state_block(&p);
            let v0 = number_block(&initial);
            for k in 0..100 {
                let t = 50.0 * k as f64 / 99.0 / draw.eta;
                let numeric = number_block(&prop.at(t));
                let analytic = Vector3::from(closed_form_case1(draw.theta, &p, t).unwrap());
                let reference = expm3(h * C64::new(0.0, -t)) * v0;
                worst.0 = worst.0.max((numeric - analytic).amax_norm());
                worst.1 = worst.1.max((numeric - reference).amax_norm());
            }
        }
        worst
    });
    ensure(
        worst.0 < 1e-10 && worst.1 < 1e-9 && elapsed.as_secs_f64() < 1.0,
        format!(
            "5 draws x 100 times: closed form {:.2e}, Taylor propagator {:.2e}, {:.3}s",
            worst.0,
            worst.1,
            elapsed.as_secs_f64()
        ),
    )
}

trait AmaxNorm {
    fn amax_norm(&self) -> f64;
}

impl AmaxNorm for Vector3<C64> {
    fn amax_norm(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let times = [0.5, 1.0, 5.0, 12.5, 20.0, 33.0, 50.0];
    let (worst, elapsed) = timed(|| {
        (0..10)
            .map(|_| oracle_deviation(&OracleDraw::sample(&mut rng), 40, &times, None).unwrap())
            .fold(0.0, f64::max)
    });
    ensure(
        worst < 1e-8 && elapsed.as_secs_f64() < 30.0,
        format!(
            "10 scenarios at n_max 40, t <= 50: max deviation {worst:.2e}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn conservation() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for id in ["fig1a", "fig3a"] {
        let s = preset(id);
        let initial = s.initial_state().unwrap();
        let n_max = initial.n_max();
        let p = s.params().unwrap();
        let h = dense_hamiltonian(&p, n_max).unwrap();
        let i_op = constant_of_motion_matrix(n_max).map(C64::from);
        let prop = Propagator::new(&initial, &p).unwrap();
        let measure = |st: &QuantumState| {
            [
                st.norm(),
                st.expectation(&h).unwrap().re,
                st.expectation(&i_op).unwrap().re,
            ]
        };
        let start = measure(&initial);
        let mut drift = [0.0f64; 3];
        for k in 0..=1000 {
            let now = measure(&prop.at(0.1 * k as f64));
            for j in 0..3 {
                drift[j] = drift[j].max((now[j] - start[j]).abs());
            }
        }
        ok &= drift.iter().all(|&d| d < 1e-9);
        details.push(format!(
            "{id}: norm {:.1e}, <H> {:.1e}, <I> {:.1e}",
            drift[0], drift[1], drift[2]
        ));
    }
    ensure(ok, details.join("; "))
}

fn regular_maxima() -> Outcome {
    let ts = series(&preset("fig1a"));
    let t = ts.column(|r| r.t);
    let s = ts.column(|r| r.entropy);
    let max = s.iter().copied().fold(f64::MIN, f64::max);
    let times: Vec<f64> = peaks(&s)
        .into_iter()
        .filter(|&(_, prom)| prom > 0.1 * LN_2)
        .map(|(i, _)| refine(&t, &s, i))
        .collect();
    let gaps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    // the three-level solution repeats with period 2π/Ω, Ω = √(γ² + 2η²)
    let period = TAU / SQRT_2;
    let period_errors: Vec<f64> = times
        .windows(3)
        .map(|w| ((w[2] - w[0]) - period).abs() / period)
        .collect();
    let worst = period_errors.iter().copied().fold(0.0, f64::max);
    let gap_list: Vec<String> = gaps.iter().map(|g| format!("{g:.3}")).collect();
    ensure(
        s[0] == 0.0 && (max - LN_2).abs() < 1e-3 && times.len() >= 4 && worst < 0.01,
        format!(
            "S(0) = {}, max S = {max:.6}, {} maxima, gaps [{}], every second maximum \
             repeats with period {period:.4} to {:.2e}",
            s[0],
            times.len(),
            gap_list.join(", "),
            worst
        ),
    )
}

fn start_values() -> Outcome {
    let s0 = |id: &str| {
        let st = preset(id).initial_state().unwrap();
        TimeSeriesRow::from_state(&st).unwrap().entropy
    };
    let (a, b, c) = (s0("fig2a"), s0("fig2b"), s0("fig2c"));
    ensure(
        a == 0.0 && c == 0.0 && (b - LN_2).abs() <= 1e-9,
        format!("S(0) = {a} (theta 0), {b:.12} (theta pi/4), {c} (theta pi/2)"),
    )
}

fn detuning_trend() -> Outcome {
    let threshold = 0.1 * LN_2;
    let mut raw = Vec::new();
    let mut prominent = Vec::new();
    let mut amplitude = Vec::new();
    for id in ["fig1a", "fig1b", "fig1c"] {
        let ts = series(&preset(id));
        let s = ts.column(|r| r.entropy);
        let p = peaks(&s);
        raw.push(p.len());
        prominent.push(p.iter().filter(|&&(_, prom)| prom >= threshold).count());
        let lo = s.iter().copied().fold(f64::MAX, f64::min);
        let hi = s.iter().copied().fold(f64::MIN, f64::max);
        amplitude.push(hi - lo);
    }
    ensure(
        prominent.windows(2).all(|w| w[1] < w[0]),
        format!(
            "gamma 0/2/4: fluctuations (prominence >= {threshold:.3}) {prominent:?}, \
             all local maxima {raw:?}, peak-to-peak {:.3}/{:.3}/{:.3}",
            amplitude[0], amplitude[1], amplitude[2]
        ),
    )
}

fn coherence_vanishes() -> Outcome {
    let mut worst: f64 = 0.0;
    for id in ["fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c"] {
        let s = preset(id);
        let prop = Propagator::new(&s.initial_state().unwrap(), &s.params().unwrap()).unwrap();
        for k in 0..1000 {
            let t = s.t_max * k as f64 / 999.0;
            worst = worst.max(reduce_isospin(&prop.at(t)).rho_eg.norm());
        }
    }
    ensure(
        worst < 1e-12,
        format!("max |rho_eg| over 6 presets x 1000 times: {worst:.2e}"),
    )
}

fn inversion_endpoints() -> Outcome {
    let w = |id: &str| series(&preset(id)).column(|r| r.inversion);
    let (a, b, c) = (w("fig6a"), w("fig6b"), w("fig6c"));
    let b_max = b.iter().copied().fold(f64::MIN, f64::max);
    ensure(
        a[0] == 1.0 && c[0] == -1.0 && b_max <= 1e-9,
        format!(
            "W(0) = {} (theta 0), {} (theta pi/2); max W at theta pi/4 = {b_max:.3e} \
             over {} samples",
            a[0],
            c[0],
            b.len()
        ),
    )
}

fn coherent_inversion_mean() -> Outcome {
    let s = preset("fig7a");
    let (ts, elapsed) = timed(|| series(&s));
    let w = ts.column(|r| r.inversion);
    let m = mean(&w);
    ensure(
        (-0.11..=-0.01).contains(&m) && elapsed.as_secs_f64() < 5.0,
        format!(
            "mean W over [0, {}] = {m:.4} ({} samples, {:?} mode, n_max {}, \
             dropped weight {:.3e}), {:.3}s",
            s.t_max,
            w.len(),
            s.mode,
            ts.n_max,
            ts.trace_deficit,
            elapsed.as_secs_f64()
        ),
    )
}

fn coherent_mixedness() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for id in ["fig3b", "fig3c"] {
        let ts = series(&preset(id));
        let min = ts
            .rows
            .iter()
            .filter(|r| r.t >= 2.0)
            .map(|r| r.entropy)
            .fold(f64::MAX, f64::min);
        ok &= min > 0.1;
        details.push(format!("{id} min S on [2, 100] = {min:.4}"));
    }
    for id in ["fig4a", "fig4c"] {
        let ts = series(&preset(id));
        let late: Vec<f64> = ts
            .rows
            .iter()
            .filter(|r| r.t >= 10.0)
            .map(|r| r.entropy)
            .collect();
        let m = mean(&late);
        let s0 = ts.rows[0].entropy;
        ok &= s0 == 0.0 && (m - LN_2).abs() < 0.15;
        details.push(format!("{id} S(0) = {s0}, mean S on [10, 100] = {m:.4}"));
    }
    ensure(ok, details.join("; "))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut bytes = 0;
    for id in PRESET_IDS {
        let mut files = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("{id}-{run}.csv"));
            let file = std::fs::File::create(&path).map_err(|e| e.to_string())?;
            write_csv(&series(&preset(id)), std::io::BufWriter::new(file))
                .map_err(|e| e.to_string())?;
            files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        if files[0] != files[1] {
            return Err(format!("{id}: runs differ"));
        }
        bytes += files[0].len();
    }
    Ok(format!(
        "{} presets written twice, byte-identical ({bytes} bytes per pass)",
        PRESET_IDS.len()
    ))
}

fn main() {
    // sanity of the local helpers before they are trusted below
    let rot = expm3(Matrix3::new(0.0, -PI, 0.0, PI, 0.0, 0.0, 0.0, 0.0, 0.0).map(C64::from));
    assert!((rot[(0, 0)] + 1.0).norm() < 1e-12);
    assert_eq!(peaks(&[0.0, 2.0, 1.0, 1.5, 0.0]), vec![(1, 2.0), (3, 0.5)]);

    let mut suite = Suite { failed: 0 };
    suite.run("01 mapping equality", mapping_equality);
    suite.run("02 closed-form regression", closed_form_regression);
    suite.run("03 dense oracle equivalence", oracle_equivalence);
    suite.run("04 conservation", conservation);
    suite.run("05 fig1a regular maxima", regular_maxima);
    suite.run("06 fig2 start values", start_values);
    suite.run("07 detuning trend", detuning_trend);
    suite.run("08 coherence vanishing", coherence_vanishes);
    suite.run("09 fig6 inversion endpoints", inversion_endpoints);
    suite.run("10 fig7a inversion mean", coherent_inversion_mean);
    suite.run("11 fig3/fig4 mixedness", coherent_mixedness);
    suite.run("12 determinism", determinism);
    println!("acceptance: {} of 12 passed", 12 - suite.failed);
    if suite.failed > 0 {
        std::process::exit(1);
    }
}
