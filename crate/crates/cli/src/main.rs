//! `busemann`: evaluate intersection functionals, check the inequalities
//! and run the experiments from the command line.
//!
//! Exit codes: 0 all checks pass, 1 an inequality is violated, 2 usage
//! error, 3 numerical failure.

mod commands;
mod output;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// Argument and applicability errors are usage errors; solver and
    /// quadrature failures are numerical.
    pub fn from_core(context: &str, e: busemann::Error) -> Self {
        use busemann::Error as E;
        let msg = format!("{context}: {e}");
        match e {
            E::Convergence { .. } | E::Solver(_) | E::Resource(_) | E::NonInjective(_) => CliError::Numeric(msg),
            _ => CliError::Usage(msg),
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "busemann",
    version,
    about = "Intersection functionals of star bodies in constant curvature"
)]
struct Cli {
    /// Worker threads (default: logical cores).
    #[arg(long, global = true, env = "BUSEMANN_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Volume, sections and the intersection functional of one body.
    Functional(FunctionalArgs),
    /// Check an inequality on a suite of bodies.
    Verify(VerifyArgs),
    /// Perturbation, sharpness and search experiments.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Args, Debug, Clone)]
pub struct QuadArgs {
    /// Exactness degree of the rule on S^{n-1}.
    #[arg(long)]
    pub outer_degree: Option<usize>,
    /// Exactness degree of the rule on S^{n-2}.
    #[arg(long)]
    pub inner_degree: Option<usize>,
    /// Relative tolerance of adaptive 1-d integrals.
    #[arg(long, default_value_t = 1e-12)]
    pub radial_tol: f64,
}

#[derive(Args, Debug)]
pub struct FunctionalArgs {
    /// Space, e.g. `s+:2`, `e:3`, `h:3`.
    #[arg(long)]
    pub space: Option<String>,
    /// Body spec `kind:key=val,...` or a JSON file.
    #[arg(long)]
    pub body: String,
    #[arg(long, value_enum, default_value_t = MeasureArg::Uniform)]
    pub measure: MeasureArg,
    /// Exponent of the section measure (default: the dimension).
    #[arg(long)]
    pub exponent: Option<f64>,
    /// Number of directions in the section table.
    #[arg(long, default_value_t = 0)]
    pub sections: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the body itself as JSON.
    #[arg(long)]
    pub save_body: Option<PathBuf>,
    #[command(flatten)]
    pub quad: QuadArgs,
    /// Output file, `.json` or `.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureArg {
    Uniform,
    Gaussian,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// min2d, cone-max, lune-max, hyperbolic, min-nd, gaussian, prop4.1,
    /// prop4.2 or busemann-euclidean.
    #[arg(long)]
    pub theorem: String,
    /// Space; defaults to the theorem's space in dimension `--dim`.
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Bodies to check (repeatable).
    #[arg(long)]
    pub body: Vec<String>,
    /// Number of seeded random bodies.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Lune half-widths (lune-max).
    #[arg(long, value_delimiter = ',')]
    pub w: Vec<f64>,
    /// Ball radii.
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<f64>,
    /// Relative slack on top of ten times the quadrature error.
    #[arg(long, default_value_t = 1e-9)]
    pub rel_tol: f64,
    /// Use vol/|S^{n-1}| instead of vol/(2^n |S^{n-1}|) in prop4.1.
    #[arg(long)]
    pub unscaled: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Experiment {
    /// Perturbed balls `r + α + βH_k` against the ball in S^n_+.
    Perturbation(PerturbationArgs),
    /// Striped cones approaching the spherical minimum constant.
    Sharpness(SharpnessArgs),
    /// Random local search for extremizers on planar grid profiles.
    Search(SearchArgs),
}

#[derive(Args, Debug)]
pub struct PerturbationArgs {
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Ball radii.
    #[arg(long, value_delimiter = ',', default_value = "0.7853981633974483")]
    pub r: Vec<f64>,
    /// Harmonic degrees.
    #[arg(long, value_delimiter = ',', default_value = "2,4")]
    pub k: Vec<usize>,
    /// Perturbation amplitudes (default 0.04,0.02,0.01,0.005).
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<f64>,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SharpnessArgs {
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Volume as a fraction of the hemisphere.
    #[arg(long, default_value_t = 0.5)]
    pub t: f64,
    /// Cap parameters α (default schedule if empty).
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// Section excess targets ε, one per α.
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long, default_value = "s+:2")]
    pub space: String,
    /// star, sym-star, convex or sym-convex.
    #[arg(long, default_value = "star")]
    pub class: String,
    #[arg(long, value_enum, default_value_t = SenseArg::Max)]
    pub sense: SenseArg,
    #[arg(long, default_value_t = 1.0)]
    pub volume: f64,
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid nodes on the circle.
    #[arg(long, default_value_t = 64)]
    pub nodes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SenseArg {
    Max,
    Min,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::usage(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Functional(a) => commands::functional(a),
        Command::Verify(a) => commands::verify(a),
        Command::Experiment(Experiment::Perturbation(a)) => commands::perturbation(a),
        Command::Experiment(Experiment::Sharpness(a)) => commands::sharpness(a),
        Command::Experiment(Experiment::Search(a)) => commands::search(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Numeric(m) => eprintln!("numerical failure: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}
