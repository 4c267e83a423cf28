//! `flz`: spectra, Yukawa comparisons, scaling checks, hierarchy dumps and
//! oracle solves from the command line.

mod commands;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flz_core::hierarchy::HierarchyConfig;
use flz_core::oracle::SolverConfig;
use serde::{Deserialize, Serialize};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "flz", version, about = "Strong-coupling expansion bound states and a numerical oracle")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Args, Serialize)]
struct GlobalArgs {
    /// Output format [default: csv].
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// JSON configuration file (flags take precedence over it).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    show_config: bool,

    /// Write `<command>.<ext>` plus a run manifest into this directory
    /// instead of printing to stdout.
    #[arg(long, global = true, env = "FLZ_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,

    /// Coupling g.
    #[arg(long, global = true)]
    g: Option<f64>,

    /// Mass m.
    #[arg(long, global = true)]
    m: Option<f64>,

    /// Oracle grid points (minimum).
    #[arg(long, global = true)]
    n_points: Option<usize>,

    /// Oracle eigenvalue tolerance.
    #[arg(long, global = true)]
    eig_tol: Option<f64>,

    /// Oracle outer boundary; automatic when omitted.
    #[arg(long, global = true)]
    rho_max: Option<f64>,
}

#[derive(Debug, Subcommand, Serialize)]
enum Command {
    /// Energy levels of a potential family.
    Spectrum(commands::SpectrumArgs),
    /// Yukawa series vs. oracle vs. Coulomb.
    Compare(commands::CompareArgs),
    /// Yukawa-specific commands.
    Yukawa {
        #[command(subcommand)]
        command: YukawaCommand,
    },
    /// Coupling factorization, virial and radius-mapping checks.
    ScalingCheck(commands::ScalingArgs),
    /// Order-by-order expansion for harmonic-like potentials.
    Hierarchy(commands::HierarchyArgs),
    /// Direct use of the numerical eigen-solver.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Analytic radial functions on a grid.
    Wavefunction(commands::WavefunctionArgs),
    /// Exact Coulomb states with their polynomial coefficients.
    Coulomb(commands::CoulombArgs),
}

#[derive(Debug, Subcommand, Serialize)]
enum YukawaCommand {
    /// Same as the top-level `compare`.
    Compare(commands::CompareArgs),
}

#[derive(Debug, Subcommand, Serialize)]
enum OracleCommand {
    /// Solves one bound state.
    Solve(commands::OracleArgs),
}

/// Settings that can come from a config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub g: f64,
    pub m: f64,
    pub format: Format,
    pub output_dir: Option<PathBuf>,
    pub solver: SolverConfig,
    pub hierarchy: HierarchyConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            g: 1.0,
            m: 1.0,
            format: Format::Csv,
            output_dir: None,
            solver: SolverConfig::default(),
            hierarchy: HierarchyConfig::default(),
        }
    }
}

impl Config {
    /// defaults < config file < flags
    fn resolve(global: &GlobalArgs) -> Result<Self, CliError> {
        let mut cfg = match &global.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?
            }
            None => Config::default(),
        };
        if let Some(f) = global.format {
            cfg.format = f;
        }
        if let Some(d) = &global.output_dir {
            cfg.output_dir = Some(d.clone());
        }
        if let Some(g) = global.g {
            cfg.g = g;
        }
        if let Some(m) = global.m {
            cfg.m = m;
        }
        if let Some(n) = global.n_points {
            cfg.solver.n_points = n;
        }
        if let Some(t) = global.eig_tol {
            cfg.solver.eig_tol = t;
        }
        if let Some(r) = global.rho_max {
            cfg.solver.rho_max = Some(r);
        }
        if !(cfg.g > 0.0 && cfg.g.is_finite()) || !(cfg.m > 0.0 && cfg.m.is_finite()) {
            return Err(CliError::Usage("g and m must be positive and finite".into()));
        }
        cfg.solver.validate().map_err(CliError::from_core)?;
        cfg.hierarchy.validate().map_err(CliError::from_core)?;
        Ok(cfg)
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Exit 64.
    Usage(String),
    /// Exit 2.
    Numerical(String),
}

impl CliError {
    pub fn from_core(e: flz_core::Error) -> Self {
        use flz_core::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::InvalidQuantumNumbers { .. }
            | E::NoCoulombState { .. }
            | E::ScaleTransformationUndefined
            | E::SeriesOrder { .. }
            | E::ExcitedSeriesL(_)
            | E::UseCoulomb
            | E::NotNormalizable { .. }
            | E::NegativePotential { .. }
            | E::NonzeroMinimum(_)
            | E::SingularObservable => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::Numerical(s) => write!(f, "numerical failure: {s}"),
        }
    }
}

/// What a command produced: a table and whether all checked properties held.
pub struct Outcome {
    pub name: &'static str,
    pub table: output::Table,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    Coulomb,
    Yukawa,
    Harmonic,
    Linear,
    Powerlaw,
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = Config::resolve(&cli.global)?;
    if cli.global.show_config {
        let mut text = serde_json::to_string_pretty(&cfg).expect("config serializes");
        text.push('\n');
        emit(&text)?;
        return Ok(0);
    }
    let Some(command) = &cli.command else {
        return Err(CliError::Usage("no subcommand given (try --help)".into()));
    };
    let outcome = match command {
        Command::Spectrum(a) => commands::spectrum(a, &cfg)?,
        Command::Compare(a) | Command::Yukawa { command: YukawaCommand::Compare(a) } => {
            commands::compare(a, &cfg)?
        }
        Command::ScalingCheck(a) => commands::scaling_check(a, &cfg)?,
        Command::Hierarchy(a) => commands::hierarchy(a, &cfg)?,
        Command::Oracle { command: OracleCommand::Solve(a) } => commands::oracle_solve(a, &cfg)?,
        Command::Wavefunction(a) => commands::wavefunction(a, &cfg)?,
        Command::Coulomb(a) => commands::coulomb(a, &cfg)?,
    };
    let body = outcome.table.render(cfg.format);
    match &cfg.output_dir {
        Some(dir) => {
            let params = serde_json::json!({ "args": command, "config": cfg });
            let manifest = output::RunManifest::new(outcome.name, params, cfg.format);
            let path = output::write_artifact(dir, outcome.name, &body, &manifest)
                .map_err(|e| CliError::Usage(format!("cannot write to {}: {e}", dir.display())))?;
            eprintln!("wrote {}", path.display());
        }
        None => emit(&body)?,
    }
    Ok(if outcome.passed { 0 } else { 1 })
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(CliError::Usage(format!("cannot write to stdout: {e}")))
        }
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("flz: {e}");
            ExitCode::from(e.code())
        }
    }
}
