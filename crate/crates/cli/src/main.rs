use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cubicrx::Bit;
use cubicrx_cli::commands::{self, Common, FitInput};
use cubicrx_cli::{exit, CliError};

#[derive(Parser, Debug)]
#[command(name = "cubicrx", version, about = "BER analysis of power-cubic optical receivers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Configuration file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed of the Monte-Carlo streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte-Carlo trials.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Skip Monte-Carlo variants.
    #[arg(long, global = true)]
    analytic_only: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Error probability over a power, ASE or PRD sweep.
    BerSweep {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fit an LP3 law to three raw moments or to a sample file.
    Fit {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, num_args = 3, value_names = ["MU1", "MU2", "MU3"], conflicts_with = "samples", required_unless_present = "samples")]
        moments: Option<Vec<f64>>,
        /// CSV with a `value` column, as written by `mc-validate`.
        #[arg(long)]
        samples: Option<PathBuf>,
        /// Keep only samples of this bit.
        #[arg(long)]
        bit: Option<u8>,
    },
    /// Goodness-of-fit ranking of candidate laws.
    Gof {
        #[command(flatten)]
        common: CommonArgs,
        /// Rank these samples instead of simulating.
        #[arg(long)]
        samples: Option<PathBuf>,
        #[arg(long)]
        bit: Option<u8>,
    },
    /// Compare Monte-Carlo moments and fits with the closed forms.
    McValidate {
        #[command(flatten)]
        common: CommonArgs,
    },
}

impl From<CommonArgs> for Common {
    fn from(a: CommonArgs) -> Self {
        Common {
            config: a.config,
            out: a.out,
            seed: a.seed,
            trials: a.trials,
            analytic_only: a.analytic_only,
        }
    }
}

fn bit(b: Option<u8>) -> Result<Option<Bit>, CliError> {
    b.map(|v| Bit::try_from(v).map_err(|e| CliError::Config(e.to_string())))
        .transpose()
}

fn print(text: Option<String>) {
    if let Some(t) = text {
        print!("{t}");
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::BerSweep { common } => print(commands::ber_sweep(&common.into())?),
        Command::Fit { common, moments, samples, bit: b } => {
            let input = match (moments, samples) {
                (Some(m), _) => FitInput::Moments([m[0], m[1], m[2]]),
                (None, Some(path)) => FitInput::Samples { path, bit: bit(b)? },
                (None, None) => unreachable!("clap requires one input"),
            };
            print!("{}", commands::fit(&common.into(), &input)?);
        }
        Command::Gof { common, samples, bit: b } => {
            let b = bit(b)?;
            print(commands::gof(&common.into(), samples.as_deref().map(|p| (p, b)))?);
        }
        Command::McValidate { common } => {
            let v = commands::mc_validate(&common.into())?;
            print(v.report);
            if !v.pass {
                return Err(CliError::Tolerance("moments outside tolerance".into()));
            }
        }
    }
    Ok(exit::OK)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("cubicrx: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
