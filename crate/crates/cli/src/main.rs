use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use qmeas::experiment::{self, write_sweep_csv, ExperimentConfig, SweepTimes};
use qmeas::opmeasure::io::{read_measure, write_realization};
use qmeas::{Error, Grid, GridState, TcsParams};

#[derive(Parser)]
#[command(name = "qmeas", version, about = "Repeated position measurements and operation measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Moments or free-evolution variance curve of a twisted coherent state, as CSV.
    Tcs(TcsArgs),
    /// Run a repeated-measurement experiment from a config file.
    Repeat(RepeatArgs),
    /// SQL ratio of the contractive model over a grid of xi and waiting times, as CSV.
    Sweep(SweepArgs),
    /// Dilate a Kraus measure file into a probe, a unitary and probe projectors.
    DilateDemo(DilateArgs),
}

#[derive(Args)]
struct TcsArgs {
    /// Twist parameter; selects mu = sqrt(1 + s^2), nu = i s instead of explicit mu, nu.
    #[arg(long, conflicts_with_all = ["mu_re", "mu_im", "nu_re", "nu_im"])]
    xi: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    mu_re: f64,
    #[arg(long, default_value_t = 0.0)]
    mu_im: f64,
    #[arg(long, default_value_t = 0.0)]
    nu_re: f64,
    #[arg(long, default_value_t = 0.0)]
    nu_im: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    #[arg(long, default_value_t = 0.0)]
    p0: f64,
    /// Print `t,position_variance,grid_position_variance` up to this time instead of the moments.
    #[arg(long)]
    curve: Option<f64>,
    /// Number of times on the curve.
    #[arg(long, default_value_t = 21)]
    points: usize,
    /// Also write the discretized wavefunction as `x,re,im` CSV.
    #[arg(long)]
    state: Option<PathBuf>,
}

#[derive(Args)]
struct RepeatArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override the number of Monte Carlo trials (0 for analytic only).
    #[arg(long)]
    trials: Option<u64>,
    /// Override the seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the per-trial CSV log here.
    #[arg(long)]
    trial_log: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated xi values.
    #[arg(long, value_delimiter = ',', required = true)]
    xi: Vec<f64>,
    /// Comma-separated waiting times.
    #[arg(long, value_delimiter = ',', required_unless_present = "at_contraction_time", conflicts_with = "at_contraction_time")]
    tau: Vec<f64>,
    /// Evaluate each xi at its own contraction time.
    #[arg(long)]
    at_contraction_time: bool,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DilateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Write the realization here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn tcs(args: &TcsArgs) -> qmeas::Result<()> {
    let params = match args.xi {
        Some(xi) => TcsParams::from_xi(xi, args.omega, args.mass, args.hbar)?,
        None => TcsParams::new(
            Complex64::new(args.mu_re, args.mu_im),
            Complex64::new(args.nu_re, args.nu_im),
            0.0,
            0.0,
            args.omega,
            args.mass,
            args.hbar,
        )?,
    }
    .with_center(args.x0, args.p0);
    let t_max = args.curve.unwrap_or(0.0);
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::Domain(format!("curve end time must be non-negative, got {t_max}")));
    }
    let grid = Grid::auto_for(&params, t_max);
    let psi = GridState::discretize(&params, grid)?;
    if let Some(path) = &args.state {
        psi.write_csv(BufWriter::new(File::create(path)?))?;
    }
    let mut out = sink(None)?;
    match args.curve {
        Some(t_max) => {
            if args.points < 2 {
                return Err(Error::Domain("a curve needs at least 2 points".into()));
            }
            writeln!(out, "t,position_variance,grid_position_variance")?;
            for i in 0..args.points {
                let t = t_max * i as f64 / (args.points - 1) as f64;
                let grid_var = psi.free_evolve(t)?.position_stats().1;
                writeln!(out, "{t:.11e},{:.11e},{grid_var:.11e}", params.position_variance_at(t))?;
            }
        }
        None => {
            let m = params.moments();
            writeln!(out, "quantity,value")?;
            let mut row = |k: &str, v: f64| writeln!(out, "{k},{v:.11e}");
            row("xi", params.xi())?;
            row("mean_x", m.mean_x)?;
            row("mean_p", m.mean_p)?;
            row("var_x", m.var_x)?;
            row("var_p", m.var_p)?;
            row("correlation", m.correlation)?;
            row("mean_energy", m.mean_energy)?;
            row("uncertainty_slack", m.uncertainty_slack(args.hbar))?;
            if params.is_contractive() {
                row("contraction_time", params.contraction_time()?)?;
                row("min_position_uncertainty", params.min_position_uncertainty()?)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn repeat(args: &RepeatArgs) -> qmeas::Result<()> {
    let mut config = ExperimentConfig::from_file(&args.config)?;
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    // re-validate the overrides through the parser
    let config = ExperimentConfig::parse(&config.to_text(), None)?;
    let report = experiment::run(&config)?;
    let mut out = sink(args.report.as_deref())?;
    out.write_all(report.to_text().as_bytes())?;
    out.flush()?;
    if let Some(path) = &args.trial_log {
        let mut log = BufWriter::new(File::create(path)?);
        report.write_trial_log(&mut log)?;
        log.flush()?;
    }
    Ok(())
}

fn sweep(args: &SweepArgs) -> qmeas::Result<()> {
    let times = if args.at_contraction_time { SweepTimes::ContractionTime } else { SweepTimes::Fixed(args.tau.clone()) };
    let rows = experiment::sweep(&args.xi, &times, args.omega, args.mass, args.hbar)?;
    let mut out = sink(args.output.as_deref())?;
    write_sweep_csv(&mut out, &rows)?;
    out.flush()?;
    Ok(())
}

fn dilate_demo(args: &DilateArgs) -> qmeas::Result<()> {
    let om = read_measure(&fs::read_to_string(&args.input)?)?;
    let realization = om.dilate()?;
    let mut out = sink(args.output.as_deref())?;
    write_realization(&mut out, &realization)?;
    writeln!(out, "unitarity_defect {:.11e}", realization.unitarity_defect())?;
    writeln!(out, "round_trip_residual {:.11e}", realization.round_trip_residual(&om)?)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Tcs(a) => tcs(a),
        Command::Repeat(a) => repeat(a),
        Command::Sweep(a) => sweep(a),
        Command::DilateDemo(a) => dilate_demo(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
