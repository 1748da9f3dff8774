use std::path::PathBuf;
use std::process::ExitCode;

use apollonius::TangentVariant;
use apollonius_cli::{
    canonical_json, cmd_compare, cmd_construct, cmd_render, cmd_solve, emit, parse_layers, CliError, Job, Options,
};
use clap::{Args, Parser, Subcommand};

/// Circles tangent to three given circles, by inversion and by algebra.
#[derive(Parser)]
#[command(name = "apollonius", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List every tangent circle found by the algebraic solver.
    Solve(Common),
    /// Run the inversion construction.
    Construct(Common),
    /// Run the construction with both tangent variants and compare against the solver.
    Compare(Common),
    /// Draw the scene and its construction as SVG.
    Render(Common),
}

#[derive(Args)]
struct Common {
    /// Scene file (JSON).
    scene: PathBuf,
    /// Requested ratio m² in (0, 1).
    #[arg(long = "m2")]
    m2: Option<f64>,
    /// Power of the first inversion; defaults to the scene's largest squared center distance.
    #[arg(long = "k2")]
    k2: Option<f64>,
    /// Which circle tangent to the equal circles to construct.
    #[arg(long)]
    variant: Option<TangentVariant>,
    /// Use the requested m² as is instead of scanning for a feasible one.
    #[arg(long)]
    no_scan: bool,
    /// Relative tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Also write an SVG drawing here.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Comma-separated layers to draw: scene, equal_circles, loci, inverted, candidate, oracle, labels.
    #[arg(long)]
    layers: Option<String>,
    /// Output path for `render`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn options(&self) -> Options {
        Options {
            m_squared: self.m2,
            k_squared: self.k2,
            variant: self.variant,
            no_scan: self.no_scan,
            eps_rel: self.tol,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(c) => {
            let job = Job::load(&c.scene, &c.options())?;
            emit(c.json.as_deref(), &canonical_json(&cmd_solve(&job)))
        }
        Command::Construct(c) => {
            let job = Job::load(&c.scene, &c.options())?;
            let (report, result) = match cmd_construct(&job) {
                Ok(ok) => ok,
                Err(CliError::Infeasible { message, report: Some(report) }) => {
                    emit(c.json.as_deref(), &canonical_json(&report))?;
                    return Err(CliError::Infeasible { message, report: None });
                }
                Err(e) => return Err(e),
            };
            if let Some(svg) = &c.svg {
                let layers = parse_layers(c.layers.as_deref())?;
                emit(Some(svg), &cmd_render(&job, layers, Some(&result))?)?;
            }
            emit(c.json.as_deref(), &canonical_json(&report))
        }
        Command::Compare(c) => {
            let job = Job::load(&c.scene, &c.options())?;
            emit(c.json.as_deref(), &canonical_json(&cmd_compare(&job)?))
        }
        Command::Render(c) => {
            let job = Job::load(&c.scene, &c.options())?;
            let layers = parse_layers(c.layers.as_deref())?;
            emit(c.out.as_deref(), &cmd_render(&job, layers, None)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("apollonius: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
