//! Command-line front end: growth rates, free energies and exact counts for
//! polygons in lattice tubes.
//!
//! Exit codes: 0 success, 1 verification failure or other error, 2 invalid
//! flags, 3 resource cap, 4 structural violation.

pub mod cache;
pub mod commands;
pub mod record;

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use tubepoly::geometry::parse_tube;
use tubepoly::{Error, StateSpace, TubeSpec};

use commands::{Class, Context, Output, Suite, VerifyLimits};

#[derive(Parser)]
#[command(name = "tubepoly", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Tube size as LxM; swapped to L >= M when needed.
    #[arg(long, value_parser = parse_tube_flag)]
    tube: (u32, u32),
    /// Pattern-system cache directory (default: $TUBEPOLY_CACHE_DIR, else none).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Write the JSON result record to this file.
    #[arg(long)]
    record: Option<PathBuf>,
    /// Include the wall-clock time in the result record.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Hamiltonian growth rate and the rates of all other cyclic components.
    Growth {
        #[command(flatten)]
        common: Common,
        /// Relative width of the final eigenvalue bracket.
        #[arg(long, default_value_t = 1e-12, value_parser = positive)]
        tolerance: f64,
        #[arg(long, value_enum, default_value_t = SpaceFlag::Realizable)]
        state_space: SpaceFlag,
    },
    /// Free energy and its linear bounds on a force grid, as CSV.
    FreeEnergy {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        f_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        f_max: f64,
        #[arg(long, value_parser = positive)]
        step: f64,
        /// Relative width of the final bisection bracket.
        #[arg(long, default_value_t = 1e-13, value_parser = positive)]
        tolerance: f64,
    },
    /// Exact count tables.
    Enumerate {
        #[command(flatten)]
        common: Common,
        /// Largest polygon length (class `all`).
        #[arg(long, conflicts_with = "smax")]
        nmax: Option<usize>,
        /// Largest span (class `hamiltonian`) or block count (class `full-blocks`).
        #[arg(long)]
        smax: Option<usize>,
        #[arg(long, value_enum, default_value_t = ClassFlag::All)]
        class: ClassFlag,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Checks bounds, asymptotes, the dominant component and the oracle.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = SuiteFlag::All)]
        suite: SuiteFlag,
        /// Largest polygon length for oracle enumeration.
        #[arg(long, default_value_t = 12)]
        nmax: usize,
        /// Largest span for the Hamiltonian census.
        #[arg(long, default_value_t = 4)]
        smax: usize,
        /// Largest block count for the full-block sandwich.
        #[arg(long, default_value_t = 3)]
        rmax: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceFlag {
    Realizable,
    AllMatchings,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassFlag {
    All,
    Hamiltonian,
    FullBlocks,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteFlag {
    Bounds,
    Asymptotes,
    Conjecture,
    OracleXcheck,
    All,
}

fn parse_tube_flag(s: &str) -> Result<(u32, u32), String> {
    parse_tube(s).map_err(|e| e.to_string())
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

/// Error carrying a specific exit code.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidTube(_)) => 2,
        Some(Error::StateExplosion { .. } | Error::ResourceCap { .. }) => 3,
        Some(Error::ConjectureStructureViolation { .. }) => 4,
        _ => 1,
    }
}

fn tube(common: &Common, stderr: &mut String) -> Result<TubeSpec> {
    let (l, m) = common.tube;
    let (spec, swapped) = TubeSpec::normalized(l, m)?;
    if swapped {
        stderr.push_str(&format!("warning: tube {l}x{m} normalized to {spec}\n"));
    }
    Ok(spec)
}

fn unix_time() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

fn emit(common: &Common, output: Output, stdout: &mut String) -> Result<()> {
    if let Some(path) = &common.record {
        output.record.write(path)?;
    }
    stdout.push_str(&output.stdout);
    Ok(())
}

fn run(cli: Cli, stdout: &mut String, stderr: &mut String) -> Result<bool> {
    let common = match &cli.command {
        Command::Growth { common, .. }
        | Command::FreeEnergy { common, .. }
        | Command::Enumerate { common, .. }
        | Command::Verify { common, .. } => common,
    };
    let spec = tube(common, stderr)?;
    let cache_dir = cache::resolve_dir(common.cache_dir.as_deref());
    let ctx = Context {
        spec,
        cache_dir: cache_dir.as_deref(),
        timestamp: common.timestamp.then(unix_time),
    };
    match cli.command {
        Command::Growth {
            tolerance,
            state_space,
            ..
        } => {
            let space = match state_space {
                SpaceFlag::Realizable => StateSpace::Realizable,
                SpaceFlag::AllMatchings => StateSpace::AllMatchings,
            };
            emit(common, commands::growth(&ctx, space, tolerance)?, stdout)?;
        }
        Command::FreeEnergy {
            f_min,
            f_max,
            step,
            tolerance,
            ..
        } => {
            if !(f_min < f_max) {
                return Err(Usage(format!("--f-min {f_min} must be below --f-max {f_max}")).into());
            }
            let grid = commands::force_grid(f_min, f_max, step);
            emit(common, commands::free_energy(&ctx, &grid, tolerance)?, stdout)?;
        }
        Command::Enumerate {
            nmax,
            smax,
            class,
            format,
            ..
        } => {
            let class = match class {
                ClassFlag::All => Class::All,
                ClassFlag::Hamiltonian => Class::Hamiltonian,
                ClassFlag::FullBlocks => Class::FullBlocks,
            };
            let limit = match (class, nmax, smax) {
                (Class::All, Some(n), None) => n,
                (Class::Hamiltonian | Class::FullBlocks, None, Some(s)) => s,
                (Class::All, ..) => return Err(Usage("class all needs --nmax".into()).into()),
                _ => return Err(Usage(format!("class {} needs --smax", class.name())).into()),
            };
            if class == Class::FullBlocks && limit == 0 {
                return Err(Usage("class full-blocks needs --smax >= 1".into()).into());
            }
            let json = matches!(format, Format::Json);
            emit(common, commands::enumerate(&ctx, class, limit, json)?, stdout)?;
        }
        Command::Verify {
            suite,
            nmax,
            smax,
            rmax,
            ..
        } => {
            let suite = match suite {
                SuiteFlag::Bounds => Suite::Bounds,
                SuiteFlag::Asymptotes => Suite::Asymptotes,
                SuiteFlag::Conjecture => Suite::Conjecture,
                SuiteFlag::OracleXcheck => Suite::OracleXcheck,
                SuiteFlag::All => Suite::All,
            };
            if rmax == 0 {
                return Err(Usage("--rmax must be at least 1".into()).into());
            }
            let limits = VerifyLimits {
                n_max: nmax,
                s_max: smax,
                r_max: rmax,
            };
            let (output, passed) = commands::verify(&ctx, suite, &limits)?;
            emit(common, output, stdout)?;
            return Ok(passed);
        }
    }
    Ok(true)
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `args` (program name first) in-process.
pub fn execute<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (mut stdout, mut stderr) = (String::new(), String::new());
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() {
                stderr = text;
                2
            } else {
                stdout = text;
                0
            };
            return Execution { code, stdout, stderr };
        }
    };
    let code = match run(cli, &mut stdout, &mut stderr) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            stderr.push_str(&format!("error: {e:#}\n"));
            exit_code(&e)
        }
    };
    Execution { code, stdout, stderr }
}
