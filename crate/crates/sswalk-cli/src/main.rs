//! Command-line front end for the sswalk library: verification of the
//! walk decomposition identities, dispersion and phase-diagram scans, and
//! real-space simulations of bulk walks, boundary-bound modes, and 2D
//! edge transport.
//!
//! Resolution order for every parameter: command-line flag, then config
//! file, then built-in default. Results go to stdout or, with --out, are
//! written atomically to a file. The one-line run summary goes to stderr
//! so piped output stays parseable. Exit codes: 0 success, 1 usage or
//! configuration error, 2 verification residual above tolerance.

mod commands;
mod config;
mod output;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use config::{parse_angle, ConfigFile, ExperimentConfig, OutputFormat};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "sswalk",
    version,
    about = "Split-step quantum walk toolkit: identity checks, band structure, \
             and topological bound-state simulations"
)]
struct Cli {
    /// JSON config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output file (written atomically); stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output encoding. Default: ndjson for verify, csv otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Worker thread count; SSWALK_THREADS is the fallback.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Recorded in output metadata. Every pipeline is deterministic, so
    /// this tags runs without changing them.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Option<Command>,
}

/// Numeric parameters shared by the subcommands. Each maps to the
/// config-file key of the same name; unset values fall back per command.
#[derive(Args, Debug, Default, Clone)]
struct NumArgs {
    /// First (shared) coin angle, radians or a pi fraction like "pi/4".
    #[arg(long)]
    theta1: Option<String>,

    /// Second coin angle; selects the split-step walk where optional.
    #[arg(long)]
    theta2: Option<String>,

    /// Second-zone value of theta2 for two-zone profiles.
    #[arg(long)]
    theta2b: Option<String>,

    /// Lattice sites (axis 1 for 2D commands).
    #[arg(long)]
    n: Option<usize>,

    /// Axis-2 lattice sites for 2D commands.
    #[arg(long)]
    n2: Option<usize>,

    /// Evolution steps.
    #[arg(long)]
    steps: Option<usize>,

    /// Momentum-grid resolution.
    #[arg(long)]
    kgrid: Option<usize>,

    /// Angle-grid points per axis for phase diagrams.
    #[arg(long)]
    tgrid: Option<usize>,

    /// Residual tolerance for verify.
    #[arg(long)]
    tolerance: Option<f64>,

    /// Boundary-window half width in sites.
    #[arg(long)]
    window: Option<usize>,

    /// Boundary (zone split) position.
    #[arg(long)]
    boundary: Option<usize>,

    /// Smoothing ramp half-width for two-zone profiles; 0 is sharp.
    #[arg(long)]
    smoothing: Option<usize>,

    /// Sample the 2D walk dispersion (spectrum only).
    #[arg(long)]
    twod: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check an operator identity and report the matched form and residual.
    Verify {
        /// One of: cyclic-property, 1d-decomposition, 2d-decomposition,
        /// qplate-identity, single-qplate-scheme.
        #[arg(long)]
        claim: Option<String>,
        #[command(flatten)]
        nums: NumArgs,
    },
    /// Sample a quasienergy dispersion curve over the momentum grid.
    Spectrum {
        #[command(flatten)]
        nums: NumArgs,
    },
    /// Evolve a walker on a ring and record the position distribution.
    Walk {
        #[command(flatten)]
        nums: NumArgs,
    },
    /// Diagonalize a two-zone walk and flag boundary-bound modes.
    Boundary {
        #[command(flatten)]
        nums: NumArgs,
    },
    /// Build an edge wavepacket on a 2D two-zone lattice and follow it.
    Edge2d {
        #[command(flatten)]
        nums: NumArgs,
    },
    /// Map gaps and winding numbers over the coin-angle plane.
    Phasediagram {
        #[command(flatten)]
        nums: NumArgs,
    },
}

impl Command {
    fn parts(&self) -> (&'static str, Option<&str>, &NumArgs) {
        match self {
            Command::Verify { claim, nums } => ("verify", claim.as_deref(), nums),
            Command::Spectrum { nums } => ("spectrum", None, nums),
            Command::Walk { nums } => ("walk", None, nums),
            Command::Boundary { nums } => ("boundary", None, nums),
            Command::Edge2d { nums } => ("edge2d", None, nums),
            Command::Phasediagram { nums } => ("phasediagram", None, nums),
        }
    }
}

fn default_format(command: &str) -> OutputFormat {
    match command {
        "verify" => OutputFormat::Ndjson,
        _ => OutputFormat::Csv,
    }
}

/// Merges flags over the config file into the resolved run record.
fn resolve(cli: &Cli) -> Result<ExperimentConfig> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let empty = NumArgs::default();
    let (flag_command, flag_claim, nums) = match &cli.command {
        Some(c) => {
            let (name, claim, nums) = c.parts();
            (Some(name), claim, nums)
        }
        None => (None, None, &empty),
    };
    let command = flag_command
        .map(str::to_string)
        .or_else(|| file.command.clone())
        .ok_or_else(|| anyhow!("no command given (pass a subcommand or set it in the config)"))?;

    let flag_angle = |s: &Option<String>| -> Result<Option<f64>> {
        s.as_deref().map(parse_angle).transpose()
    };
    let theta1 = flag_angle(&nums.theta1)?.or(file.theta1()?);
    let theta2 = flag_angle(&nums.theta2)?.or(file.theta2()?);
    let theta2b = flag_angle(&nums.theta2b)?.or(file.theta2b()?);

    let format = cli
        .format
        .or(file.format)
        .unwrap_or_else(|| default_format(&command));
    let out = cli
        .out
        .as_ref()
        .map(|p| p.to_string_lossy().into_owned())
        .or_else(|| file.out.clone());

    let mut resolved = ExperimentConfig {
        claim: flag_claim.map(str::to_string).or_else(|| file.claim.clone()),
        command,
        theta1,
        theta2,
        theta2b,
        n: nums.n.or(file.n),
        n2: nums.n2.or(file.n2),
        steps: nums.steps.or(file.steps),
        kgrid: nums.kgrid.or(file.kgrid),
        tgrid: nums.tgrid.or(file.tgrid),
        tolerance: nums.tolerance.or(file.tolerance),
        window: nums.window.or(file.window),
        boundary: nums.boundary.or(file.boundary),
        smoothing: nums.smoothing.or(file.smoothing),
        twod: if nums.twod { Some(true) } else { file.twod },
        format,
        out,
        seed: cli.seed.or(file.seed),
        threads: cli.threads.or(file.threads),
    };
    resolved.validate()?;
    Ok(resolved)
}

/// Builds the global rayon pool: --threads, then SSWALK_THREADS, then the
/// library default. A failure here means the pool was already built, which
/// only happens in tests.
fn configure_threads(threads: Option<usize>) -> Result<()> {
    let count = match threads {
        Some(t) => Some(t),
        None => match std::env::var("SSWALK_THREADS") {
            Ok(raw) => Some(
                raw.parse::<usize>()
                    .map_err(|_| anyhow!("SSWALK_THREADS must be an integer, got '{raw}'"))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(t) = count {
        if t == 0 {
            return Err(anyhow!("thread count must be positive"));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    Ok(())
}

fn try_main(cli: &Cli) -> Result<(String, u8)> {
    let config = resolve(cli)?;
    configure_threads(config.threads)?;
    commands::run(&config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match try_main(&cli) {
        Ok((summary, code)) => {
            eprintln!("{summary}");
            ExitCode::from(code)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
