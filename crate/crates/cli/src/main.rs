use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use polydisk_cli::commands::{parse_grid, parse_point, CERTIFICATE_NAMES, EXAMPLES};
use polydisk_cli::{
    cmd_analyze, cmd_certify, cmd_example, cmd_solve, cmd_verify_lemmas, CertifyOptions, Flags, Format, LemmaOptions,
};

/// Polyharmonic Dirichlet problems on the unit disk: solve, analyze the
/// distortion of the solution, and certify bi-Lipschitz bounds.
#[derive(Parser)]
#[command(name = "polydisk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Grid as RADIALxANGULAR, e.g. 64x256.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for random sample pairs.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl Common {
    fn flags(&self) -> Flags {
        Flags { grid: self.grid, tol: self.tol, seed: self.seed, out: self.out.clone(), format: self.format }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and check the residuals.
    Solve {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Solve, then estimate distortion, defect and bi-Lipschitz extremes.
    Analyze {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the bound coefficients and certificates.
    Certify {
        /// Problem file or run report; optional when --k and --norms are given.
        input: Option<PathBuf>,
        /// Distortion K (defaults to the estimate).
        #[arg(long)]
        k: Option<f64>,
        /// Additive defect K'.
        #[arg(long)]
        kprime: Option<f64>,
        /// |P0| for the (K,K') estimates.
        #[arg(long, default_value_t = 0.0)]
        p0: f64,
        /// Comma-separated sup norms of phi_1..phi_n.
        #[arg(long, value_delimiter = ',')]
        norms: Option<Vec<f64>>,
        /// Certificate deciding the exit status.
        #[arg(long, default_value = "tue-2", value_parser = CERTIFICATE_NAMES)]
        certificate: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run the closed-form versus quadrature identity suite.
    VerifyLemmas {
        /// Evaluation point "re,im" (repeatable).
        #[arg(long = "z", value_parser = parse_point, allow_hyphen_values = true)]
        points: Vec<Complex64>,
        /// Identity label: 2.1, 2.2, 2.3, A, chordal, hilbert (repeatable).
        #[arg(long = "lemma")]
        lemmas: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Replay a named fixture.
    Example {
        #[arg(value_parser = EXAMPLES)]
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("POLYDISK_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("warning: cannot size the thread pool: {e}");
                }
            }
            _ => eprintln!("warning: ignoring POLYDISK_THREADS={v:?}; expected a positive integer"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let code = match cli.command {
        Command::Solve { spec, common } => cmd_solve(&spec, &common.flags()),
        Command::Analyze { spec, common } => cmd_analyze(&spec, &common.flags()),
        Command::Certify { input, k, kprime, p0, norms, certificate, common } => {
            let opts = CertifyOptions { k, kprime, p0, norms, certificate };
            cmd_certify(input.as_deref(), &opts, &common.flags())
        }
        Command::VerifyLemmas { points, lemmas, common } => {
            cmd_verify_lemmas(&LemmaOptions { points, lemmas }, &common.flags())
        }
        Command::Example { name, common } => cmd_example(&name, &common.flags()),
    };
    ExitCode::from(code as u8)
}
