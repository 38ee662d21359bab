//! `dmojc`: figure presets, free-form runs, mapping verification and
//! self-tests for the isospin-coupled Dirac-Moshinsky oscillator.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dmojc::output::{validate_file, write_csv, write_json};
use dmojc::scenario::PRESET_IDS;
use dmojc::selftest::{run_selftest, Mutation, SelftestConfig};
use dmojc::{
    run_scenario, verify_mapping, Case, CoherentMode, Error, NMax, PhysicalParams, Scenario,
};

#[derive(Parser)]
#[command(
    name = "dmojc",
    version,
    about = "Dirac-Moshinsky oscillator coupled to an isospin field"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a scenario given on the command line and write its time series.
    Run(RunArgs),
    /// Evolve one of the built-in figure presets (fig1a ... fig8c).
    Figure {
        id: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check the oscillator/Jaynes-Cummings equivalence on a truncated basis.
    Verify(VerifyArgs),
    /// Compare sector evolution with the dense oracle and the closed form.
    Selftest(SelftestArgs),
    /// Re-check the invariants of every row of a written time series.
    Validate { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Number,
    Coherent,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Paper,
}

#[derive(Clone, Copy, Debug)]
struct NMaxArg(NMax);

impl FromStr for NMaxArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self(NMax::Auto));
        }
        s.parse()
            .map(|n| Self(NMax::Fixed(n)))
            .map_err(|_| format!("expected a non-negative integer or `auto`, got `{s}`"))
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one JSON object instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "number")]
    case: CaseArg,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
    theta: f64,
    /// Ignored for the number case.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
    phi: f64,
    /// Real coherent amplitude; ignored for the number case.
    #[arg(long, default_value_t = std::f64::consts::SQRT_2, allow_negative_numbers = true)]
    alpha: f64,
    /// Isospin field strength, in units of the coupling.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    gamma: f64,
    /// Rest energy, in units of the coupling.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mc2: f64,
    /// Isospin coupling, in units of the Dirac coupling.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    chi: f64,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    tmax: f64,
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    dt: f64,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    /// Fock cutoff, or `auto`.
    #[arg(long, default_value = "auto")]
    nmax: NMaxArg,
    #[command(flatten)]
    out: OutputArgs,
}

impl RunArgs {
    fn scenario(&self) -> Scenario {
        Scenario {
            preset: None,
            case: match self.case {
                CaseArg::Number => Case::Number,
                CaseArg::Coherent => Case::Coherent,
            },
            theta: self.theta,
            phi: self.phi,
            alpha: self.alpha,
            gamma: self.gamma,
            mc2: self.mc2,
            chi: self.chi,
            t_max: self.tmax,
            dt: self.dt,
            mode: match self.mode {
                ModeArg::Exact => CoherentMode::Exact,
                ModeArg::Paper => CoherentMode::Paper,
            },
            n_max: self.nmax.0,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Highest total quantum number `n_x + n_y` of the 2D basis.
    #[arg(long, default_value_t = 12)]
    ncut: usize,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 20_240_601)]
    seed: u64,
    /// Random coherent scenarios compared with the dense oracle.
    #[arg(long, default_value_t = 10)]
    oracle_draws: usize,
    #[arg(long, default_value_t = 40)]
    oracle_nmax: usize,
    /// Number-state scenarios compared with the closed form.
    #[arg(long, default_value_t = 5)]
    closed_form_draws: usize,
    #[arg(long, default_value_t = 100)]
    closed_form_points: usize,
    #[arg(long, hide = true)]
    inject_zeta_flip: bool,
}

/// Outcome of a subcommand that ran to completion.
enum Status {
    Ok,
    Failed,
}

fn emit(ts: &dmojc::TimeSeries, out: &OutputArgs) -> dmojc::Result<()> {
    let sink: Box<dyn Write> = match &out.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    if out.json {
        let mut sink = sink;
        write_json(ts, &mut sink)?;
        writeln!(sink)?;
        sink.flush()?;
        Ok(())
    } else {
        write_csv(ts, sink)
    }
}

fn run(s: &Scenario, out: &OutputArgs) -> dmojc::Result<Status> {
    let ts = run_scenario(s)?;
    emit(&ts, out)?;
    if let Some(path) = &out.out {
        eprintln!(
            "wrote {} rows (n_max {}, trace deficit {:.3e}) to {}",
            ts.rows.len(),
            ts.n_max,
            ts.trace_deficit,
            path.display()
        );
    }
    Ok(Status::Ok)
}

fn figure(id: &str, out: &OutputArgs) -> dmojc::Result<Status> {
    let s = Scenario::preset(id)
        .inspect_err(|_| eprintln!("known presets: {}", PRESET_IDS.join(", ")))?;
    run(&s, out)
}

fn verify(a: &VerifyArgs) -> dmojc::Result<Status> {
    let p = PhysicalParams::new(a.m, a.omega, a.c, a.hbar)?;
    if a.ncut < 4 {
        println!("n_cut = {}: interior too small (need n_cut >= 4)", a.ncut);
        return Ok(Status::Failed);
    }
    let r = verify_mapping(&p, a.ncut);
    println!(
        "m = {}, omega = {}, c = {}, hbar = {}, n_cut = {}",
        a.m, a.omega, a.c, a.hbar, a.ncut
    );
    println!("eta = {}", r.eta);
    println!("interior states: {}", r.interior_dim);
    println!("max interior difference: {:.3e}", r.max_interior_diff);
    println!("vacuum coupling norm: {:.15}", r.coupling_block_norm);
    let ok = r.passed();
    println!(
        "{} (tolerance {:.0e})",
        if ok { "PASS" } else { "FAIL" },
        dmojc::MappingReport::TOLERANCE
    );
    Ok(if ok { Status::Ok } else { Status::Failed })
}

fn selftest(a: &SelftestArgs) -> dmojc::Result<Status> {
    let cfg = SelftestConfig {
        seed: a.seed,
        oracle_draws: a.oracle_draws,
        oracle_n_max: a.oracle_nmax,
        closed_form_draws: a.closed_form_draws,
        closed_form_points: a.closed_form_points,
        mutation: a.inject_zeta_flip.then_some(Mutation::FlipZeta),
        ..Default::default()
    };
    let report = run_selftest(&cfg)?;
    if report.checks.is_empty() {
        println!("no checks executed");
        return Ok(Status::Failed);
    }
    for check in &report.checks {
        println!("{check}");
    }
    let failed = report.checks.iter().filter(|c| !c.passed()).count();
    println!("{} checks, {failed} failed", report.checks.len());
    Ok(if report.passed() {
        Status::Ok
    } else {
        Status::Failed
    })
}

fn validate(path: &Path) -> dmojc::Result<Status> {
    let report = validate_file(path)?;
    for v in &report.violations {
        println!("{v}");
    }
    println!(
        "{}: {} rows, {} violations",
        path.display(),
        report.rows,
        report.violations.len()
    );
    Ok(if report.is_valid() {
        Status::Ok
    } else {
        Status::Failed
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => run(&a.scenario(), &a.out),
        Command::Figure { id, out } => figure(id, out),
        Command::Verify(a) => verify(a),
        Command::Selftest(a) => selftest(a),
        Command::Validate { file } => validate(file),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParameter(_) | Error::UnknownPreset(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
