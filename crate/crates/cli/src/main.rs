//! `pairbound`: spectral certificates for a pair of interacting particles
//! on the half-line, from the command line.

mod config;
mod pipelines;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use pairbound::grid::Symmetry;
use pipelines::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "pairbound",
    version,
    about = "Certify the spectral picture of a two-particle system on the half-line: essential-spectrum threshold, bound states below it, and their finiteness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Truncation override for the 2D grid.
    #[arg(long = "X")]
    x_extent: Option<f64>,
    /// Spacing override for the 2D grid.
    #[arg(long)]
    h: Option<f64>,
    /// Parity sector override.
    #[arg(long, value_parser = parse_symmetry)]
    symmetry: Option<Symmetry>,
}

fn parse_symmetry(s: &str) -> Result<Symmetry, String> {
    match s {
        "plus" => Ok(Symmetry::Plus),
        "minus" => Ok(Symmetry::Minus),
        other => Err(format!("symmetry must be plus or minus, got {other}")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the standing assumptions on the potential.
    CheckPotential {
        #[command(flatten)]
        common: Common,
    },
    /// Ground pair, gap, decay rate and identity audits of the one-particle
    /// operator.
    Spectrum1d {
        #[command(flatten)]
        common: Common,
    },
    /// Run the variational existence certificate.
    Certify {
        #[command(flatten)]
        common: Common,
        /// Exponent override for the trial profile.
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Eigenvalues of the two-particle sector operator below the threshold.
    Spectrum2d {
        #[command(flatten)]
        common: Common,
        /// Also dump the assembled operator as `row col value` triplets.
        #[arg(long)]
        export_operator: bool,
    },
    /// Residuals of the essential-spectrum test family.
    Weyl {
        #[command(flatten)]
        common: Common,
    },
    /// Localization/Bargmann finiteness chain.
    CountBound {
        #[command(flatten)]
        common: Common,
        /// Localization scales override (comma-separated).
        #[arg(long = "R", value_delimiter = ',')]
        r_values: Option<Vec<f64>>,
    },
    /// Certificates for several trial exponents in one run.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated list of exponents.
        #[arg(long, value_delimiter = ',', required = true)]
        rho: Vec<f64>,
    },
    /// Compare folded sector spectra against the original-coordinates
    /// square operator.
    Crosscheck {
        #[command(flatten)]
        common: Common,
        /// Number of eigenpairs to classify.
        #[arg(long, default_value_t = 6)]
        k: usize,
    },
}

fn load_config(common: &Common) -> CliResult<RunConfig> {
    let text = fs::read_to_string(&common.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", common.config.display())))?;
    let mut cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid config {}: {e}", common.config.display())))?;
    if let Some(out) = &common.out {
        cfg.outputs = out.display().to_string();
    }
    if let Some(x) = common.x_extent {
        cfg.grid2d.x_extent = x;
    }
    if let Some(h) = common.h {
        cfg.grid2d.h = h;
    }
    if let Some(s) = common.symmetry {
        cfg.grid2d.symmetry = s;
    }
    cfg.validate().map_err(CliError::Config)?;
    Ok(cfg)
}

fn dispatch(cli: Cli) -> CliResult<Vec<PathBuf>> {
    match cli.command {
        Command::CheckPotential { common } => {
            let cfg = load_config(&common)?;
            pipelines::run_check_potential(&cfg)
        }
        Command::Spectrum1d { common } => {
            let cfg = load_config(&common)?;
            pipelines::run_spectrum1d(&cfg)
        }
        Command::Certify { common, rho } => {
            let mut cfg = load_config(&common)?;
            if let Some(r) = rho {
                cfg.certificate.rho = r;
                cfg.validate().map_err(CliError::Config)?;
            }
            pipelines::run_certify(&cfg)
        }
        Command::Spectrum2d { common, export_operator } => {
            let cfg = load_config(&common)?;
            pipelines::run_spectrum2d(&cfg, export_operator)
        }
        Command::Weyl { common } => {
            let cfg = load_config(&common)?;
            pipelines::run_weyl(&cfg)
        }
        Command::CountBound { common, r_values } => {
            let mut cfg = load_config(&common)?;
            if let Some(rs) = r_values {
                cfg.counting.r_values = rs;
                cfg.validate().map_err(CliError::Config)?;
            }
            pipelines::run_count_bound(&cfg)
        }
        Command::Sweep { common, rho } => {
            let cfg = load_config(&common)?;
            pipelines::run_sweep(&cfg, &rho)
        }
        Command::Crosscheck { common, k } => {
            let cfg = load_config(&common)?;
            pipelines::run_crosscheck(&cfg, k)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            match e {
                CliError::Compute(_) => ExitCode::from(1),
                CliError::Config(_) => ExitCode::from(2),
            }
        }
    }
}
