mod commands;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Parallel transport and nearest-neighbour correlation in rebit and qubit rings.
#[derive(Parser, Debug)]
#[command(name = "rebit-ring", version)]
struct Cli {
    /// Overrides the tolerance of every check
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Writes the output to FILE instead of standard output
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulates K_max(θ) for an n-site ring
    Kmax {
        #[arg(long)]
        n: usize,
        /// Number of θ points spanning [0, 2π]
        #[arg(long, default_value_t = 33)]
        theta_grid: usize,
        /// Fills the large-n expansion column
        #[arg(long)]
        asymptotic: bool,
    },
    /// Lists the extreme Γ eigenvalues G_r
    Polygon {
        #[arg(long)]
        n: usize,
    },
    /// Transporter and correlation of one link of a stored state
    Transport {
        #[arg(long, value_name = "FILE")]
        state: PathBuf,
        /// Link as "j,k"
        #[arg(long)]
        link: String,
    },
    /// Spectrum, polygon and K_max checks up to n_max sites
    RingVerify {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Observables of the translation-invariant six-rebit state
    SixRebit {
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
    },
    /// K_q, link phase and holonomy of the six-qubit ring against ξ
    QubitRing {
        #[arg(long, default_value_t = 21)]
        xi_grid: usize,
        /// The grid spans [−xi_max, xi_max]
        #[arg(long, default_value_t = 0.2)]
        xi_max: f64,
    },
    /// Fully entangled fraction of a stored two-qubit state
    Fef {
        #[arg(long, value_name = "FILE")]
        state: PathBuf,
    },
    /// Link phase configurations on a torus
    Lattice2d {
        #[command(subcommand)]
        command: LatticeCommand,
    },
    /// Runs every acceptance check
    VerifyAll {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct TorusArgs {
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
}

#[derive(Subcommand, Debug)]
enum LatticeCommand {
    /// Twists one link of the XY ground state
    Twist {
        #[command(flatten)]
        torus: TorusArgs,
        /// Link as "j,k"
        #[arg(long)]
        link: String,
        /// Twist angle
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "phi",
            required_unless_present = "phi"
        )]
        xi: Option<f64>,
        /// Target phase of the link; the twist angle is solved for
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<f64>,
    },
    /// Row/column mixture realizing a phase configuration
    Mixture {
        #[command(flatten)]
        torus: TorusArgs,
        /// JSON map "j,k" → phase
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => {
            if let Err(e) = commands::emit(cli.out.as_deref(), &outcome.output) {
                eprintln!("error: {e}");
                return ExitCode::from(commands::EXIT_FAILED);
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(commands::EXIT_FAILED)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
