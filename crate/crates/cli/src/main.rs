mod io;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sirf_core::report::{analyze, AnalysisReport, AnalysisSettings, ModelSpecFile, ResolvedSpec};
use sirf_core::simulate::{basin_map, integrate_2d, integrate_3d, IntegrateOptions, Method};
use sirf_core::{Error, State2, State3};

/// Exit codes: 0 ok, 2 invalid input, 3 numeric failure.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidParameter { .. } | Error::Precondition(_) => {
                CliError::Invalid(e.to_string())
            }
            Error::Eval(_)
            | Error::Pole { .. }
            | Error::Construction(_)
            | Error::StepUnderflow { .. }
            | Error::LeftDomain { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "sirf",
    version,
    about = "Equilibria, stability and trajectories of SIR models with a recovery-dependent infection rate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Locate and classify equilibria and write the JSON report.
    Analyze(AnalyzeArgs),
    /// Integrate one trajectory and write it as CSV.
    Simulate(SimulateArgs),
    /// Map the limit of trajectories started on a lattice over the triangle I + R <= 1.
    Basin(BasinArgs),
    /// Render a report, basin map or trajectories as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    model: PathBuf,
    /// Grid intervals for the root scan.
    #[arg(long, default_value_t = sirf_core::equilibria::DEFAULT_GRID_INTERVALS)]
    grid: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Rk4,
    Rkf45,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    /// Initial state, "I,R" or "S,I,R".
    #[arg(long, allow_hyphen_values = true)]
    init: String,
    #[arg(long)]
    t_end: f64,
    /// RK4 step, or initial step for RKF45.
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Rk4)]
    method: MethodArg,
    /// Absolute and relative tolerance for RKF45.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Write every n-th step.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BasinArgs {
    #[arg(long)]
    model: PathBuf,
    /// Lattice nodes per side.
    #[arg(long, default_value_t = 50)]
    grid: usize,
    #[arg(long, default_value_t = 300.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct PlotSource {
    /// Analysis report: f and g with the endemic equilibria marked.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Basin CSV from `basin`.
    #[arg(long)]
    basin: Option<PathBuf>,
    /// Trajectory CSV from `simulate`; repeat for several.
    #[arg(long)]
    traj: Vec<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    source: PlotSource,
    #[arg(long)]
    out: PathBuf,
}

fn load_spec(path: &Path) -> CliResult<ResolvedSpec> {
    let text = io::read_text(path)?;
    Ok(ModelSpecFile::from_json(&text)?.resolve()?)
}

fn run_analyze(a: AnalyzeArgs) -> CliResult<()> {
    let spec = load_spec(&a.model)?;
    let settings = AnalysisSettings {
        grid_intervals: a.grid,
        ..AnalysisSettings::default()
    };
    let (_, report) = analyze(&spec, &settings)?;
    io::write_text(a.out.as_deref(), &(report.to_json() + "\n"))
}

fn parse_init(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Invalid(format!("--init: `{p}` is not a number")))
        })
        .collect()
}

fn run_simulate(a: SimulateArgs) -> CliResult<()> {
    let spec = load_spec(&a.model)?;
    let m = spec.build::<f64>()?;
    let mut opts = IntegrateOptions::rk4(a.step).with_stride(a.stride);
    if let MethodArg::Rkf45 = a.method {
        opts.method = Method::Rkf45;
        opts.abs_tol = a.tol;
        opts.rel_tol = a.tol;
    }
    let values = parse_init(&a.init)?;
    match values[..] {
        [i, r] => {
            let s = State2::new(i, r);
            if !s.in_region(0.0) {
                return Err(CliError::Invalid(format!(
                    "--init ({i}, {r}) is outside I, R >= 0, I + R <= 1"
                )));
            }
            let tr = integrate_2d(&m, s, a.t_end, &opts)?;
            io::write_trajectory(a.out.as_deref(), &["tau", "I", "R"], &tr.times, &tr.states)
        }
        [s, i, r] => {
            let st = State3::new(s, i, r);
            if !st.in_region(1e-12) {
                return Err(CliError::Invalid(format!(
                    "--init ({s}, {i}, {r}) must be non-negative and sum to 1"
                )));
            }
            let tr = integrate_3d(&m, st, a.t_end, &opts)?;
            io::write_trajectory(a.out.as_deref(), &["tau", "S", "I", "R"], &tr.times, &tr.states)
        }
        _ => Err(CliError::Invalid("--init takes \"I,R\" or \"S,I,R\"".into())),
    }
}

fn run_basin(a: BasinArgs) -> CliResult<()> {
    let spec = load_spec(&a.model)?;
    let (m, report) = analyze(&spec, &AnalysisSettings::default())?;
    let map = basin_map(
        &m,
        &report.equilibria(),
        a.grid,
        a.t_end,
        &IntegrateOptions::rk4(a.step),
    )?;
    io::write_basin(a.out.as_deref(), &map)
}

fn run_plot(a: PlotArgs) -> CliResult<()> {
    let doc = if let Some(path) = &a.source.report {
        let report = AnalysisReport::from_json(&io::read_text(path)?)?;
        let spec = report.model.spec.resolve()?;
        let m = spec.build::<f64>()?;
        svg::rate_overlay(&m, &report)?
    } else if let Some(path) = &a.source.basin {
        svg::basin(&io::read_basin(path)?)
    } else {
        let mut runs = Vec::new();
        for path in &a.source.traj {
            runs.push(io::read_trajectory(path)?);
        }
        svg::phase_plane(&runs)
    };
    io::write_text(Some(&a.out), &doc)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Analyze(a) => run_analyze(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Basin(a) => run_basin(a),
        Command::Plot(a) => run_plot(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
