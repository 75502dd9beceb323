use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use trapbose::error::{Error, Result};
use trapbose::exact::LSumControl;
use trapbose::observables::{peak_report, profile};
use trapbose::semiclassical::high_n_asymptotics;
use trapbose::sweep::{self, figure, figure_config, profile_table, RunConfig, SweepTable, TempRange};
use trapbose::thermo::{solve_fugacity_with, threshold_state_with, transition_temperature_with, ModelKind, Tau, TrapSpec};

/// Ideal Bose gas in a harmonic trap. Temperatures in ħω/k_B, lengths in the
/// ground-state size σ, densities in σ⁻³.
#[derive(Parser)]
#[command(name = "trapbose", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transition temperature T* of one model.
    Transition(TransitionArgs),
    /// Fugacity and ground-state population at (N, T).
    Fugacity(StateArgs),
    /// Decomposed density profile as CSV.
    Profile(ProfileArgs),
    /// Condensate and peak-density fractions over a temperature range.
    Sweep(SweepArgs),
    /// CSV data of one figure (1 to 7).
    Figure(FigureArgs),
    /// Peak phase-space density at threshold and its large-N limit.
    Degeneracy(TransitionArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "ex")]
    model: ModelKind,
    #[arg(long)]
    atoms: f64,
    /// Trap frequencies wx,wy,wz (semi-classical models only).
    #[arg(long, value_delimiter = ',')]
    aniso: Option<Vec<f64>>,
    /// Relative truncation tolerance of the exact l-sums.
    #[arg(long)]
    tol: Option<f64>,
}

impl Common {
    fn trap(&self) -> Result<TrapSpec> {
        trap(self.aniso.as_deref())
    }
}

fn trap(aniso: Option<&[f64]>) -> Result<TrapSpec> {
    match aniso {
        Some(&[wx, wy, wz]) => TrapSpec::anisotropic([wx, wy, wz]),
        Some(w) => Err(Error::Domain(format!("--aniso takes three frequencies, got {}", w.len()))),
        None => Ok(TrapSpec::isotropic()),
    }
}

fn control(tol: Option<f64>) -> Result<LSumControl> {
    match tol {
        Some(t) => LSumControl::new(t, LSumControl::default().max_terms),
        None => Ok(LSumControl::default()),
    }
}

#[derive(Args)]
struct TransitionArgs {
    #[command(flatten)]
    common: Common,
    /// Also write the result as a one-row CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    temp: f64,
}

#[derive(Args)]
struct ProfileArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    temp: f64,
    #[arg(long, default_value_t = 30.0)]
    rmax: f64,
    #[arg(long, default_value_t = 301)]
    points: usize,
    /// Number of integrated axes.
    #[arg(long, default_value_t = 0)]
    dims: u8,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated models; all four when absent.
    #[arg(long, value_delimiter = ',')]
    model: Vec<ModelKind>,
    #[arg(long)]
    atoms: f64,
    #[arg(long, value_delimiter = ',')]
    aniso: Option<Vec<f64>>,
    #[arg(long)]
    tmin: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long, default_value_t = sweep::DEFAULT_TEMP_STEPS)]
    steps: usize,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FigureArgs {
    /// Figure number.
    id: Option<u8>,
    #[arg(long = "figure")]
    figure: Option<u8>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the figure's atom number (figures 1, 4, 5, 6).
    #[arg(long)]
    atoms: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

fn significant(v: f64, digits: i32) -> String {
    if v == 0.0 || !v.is_finite() {
        return v.to_string();
    }
    let decimals = (digits - 1 - v.abs().log10().floor() as i32).max(0) as usize;
    format!("{v:.decimals$}")
}

fn emit(table: &SweepTable, out: Option<&Path>) -> Result<()> {
    for w in table.warnings() {
        eprintln!("warning: {w}");
    }
    match out {
        Some(path) => table.write_files(path),
        None => table.write_csv(io::stdout().lock()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Transition(a) => {
            let ctl = control(a.common.tol)?;
            let tau = transition_temperature_with(a.common.model, a.common.atoms, &a.common.trap()?, &ctl)?;
            println!("T*={}", significant(tau.temperature(), 6));
            if let Some(path) = a.out {
                let mut t = SweepTable::new(&["N", "T_star", "tau_star"])?;
                t.push_row(vec![Some(a.common.atoms), Some(tau.temperature()), Some(tau.value())])?;
                t.set_meta("model", serde_json::json!(a.common.model.label()));
                t.write_files(&path)?;
            }
        }
        Command::Fugacity(a) => {
            let ctl = control(a.common.tol)?;
            let tau = Tau::from_temperature(a.temp)?;
            let s = solve_fugacity_with(a.common.model, a.common.atoms, tau, &a.common.trap()?, &ctl)?;
            println!("z={:.12e}", s.z());
            println!("x={:.12e}", s.fugacity.x());
            println!("N0={:.9e}", s.ground);
            println!("N0/N={:.9e}", s.condensate_fraction());
            println!("condensed={}", s.condensed);
        }
        Command::Profile(a) => {
            let ctl = control(a.common.tol)?;
            let tau = Tau::from_temperature(a.temp)?;
            let cfg = RunConfig { rmax: a.rmax, points: a.points, dims: a.dims, ..RunConfig::default() };
            cfg.validate()?;
            let s = solve_fugacity_with(a.common.model, a.common.atoms, tau, &a.common.trap()?, &ctl)?;
            let p = profile(&s, &cfg.grid(), a.dims)?;
            emit(&profile_table(&p)?, a.out.as_deref())?;
        }
        Command::Sweep(a) => {
            let temperatures = match (a.tmin, a.tmax) {
                (Some(lo), Some(hi)) => Some(TempRange::new(lo, hi, a.steps)?),
                (None, None) => None,
                _ => return Err(Error::Domain("give both --tmin and --tmax, or neither".into())),
            };
            let trap = trap(a.aniso.as_deref())?;
            let cfg = RunConfig {
                models: if a.model.is_empty() { ModelKind::ALL.to_vec() } else { a.model },
                atoms: a.atoms,
                temperatures,
                steps: a.steps,
                trap,
                control: control(a.tol)?,
                out: a.out,
                ..RunConfig::default()
            };
            let table = sweep::temperature_sweep(&cfg)?;
            emit(&table, cfg.out.as_deref())?;
        }
        Command::Figure(a) => {
            let id = match (a.id, a.figure) {
                (Some(i), None) | (None, Some(i)) => i,
                (Some(i), Some(j)) if i == j => i,
                _ => return Err(Error::Domain("give the figure number once".into())),
            };
            let mut cfg = figure_config(id)?;
            if let Some(n) = a.atoms {
                cfg.atoms = n;
            }
            if let Some(s) = a.steps {
                cfg.steps = s;
            }
            if let Some(r) = a.rmax {
                cfg.rmax = r;
            }
            if let Some(p) = a.points {
                cfg.points = p;
            }
            cfg.control = control(a.tol)?;
            cfg.validate()?;
            let table = figure(id, &cfg)?;
            std::fs::create_dir_all(&a.out)?;
            let path = a.out.join(format!("fig{id}.csv"));
            emit(&table, Some(&path))?;
            println!("{}", path.display());
        }
        Command::Degeneracy(a) => {
            let ctl = control(a.common.tol)?;
            let s = threshold_state_with(a.common.model, a.common.atoms, &a.common.trap()?, &ctl)?;
            let report = peak_report(&s)?;
            println!("T*={}", significant(s.temperature(), 6));
            println!("rho0_lambda3={}", significant(report.degeneracy_parameter, 6));
            println!("ground_peak_share={}", significant(report.peak_fraction, 6));
            if a.common.atoms >= 10.0 {
                let limit = high_n_asymptotics(a.common.atoms)?;
                println!("large_N_limit={}", significant(limit.degeneracy_limit, 6));
            }
            if let Some(path) = a.out {
                let mut t = SweepTable::new(&["N", "T_star", "deg_param", "peak_frac"])?;
                t.push_row(vec![
                    Some(s.atoms),
                    Some(s.temperature()),
                    Some(report.degeneracy_parameter),
                    Some(report.peak_fraction),
                ])?;
                t.set_meta("model", serde_json::json!(s.model.label()));
                t.write_files(&path)?;
            }
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) => 2,
        Error::Convergence(_) | Error::Truncation { .. } | Error::Quadrature(_) => 3,
        Error::Io(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
