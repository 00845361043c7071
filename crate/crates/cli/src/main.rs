mod commands;
mod documents;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use documents::ErrorDocument;

/// Spectral data of Hankel operators: forward and inverse maps, kernel
/// generators and generating-function checks.
///
/// Exit status is 0 on success, 1 when the input is rejected and 2 when a
/// numerical tolerance is not met. Errors are written to standard error as
/// a JSON document with `code`, `message` and `context`.
#[derive(Debug, Parser)]
#[command(name = "hankel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Io {
    /// Input JSON document.
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Output JSON file [default: standard output].
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also write the command's CSV series to this file.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Symbol coefficients to spectral data. CSV: j, rho, phi, sigma, theta.
    Forward {
        #[command(flatten)]
        io: Io,
        /// Relative change of every entry accepted as a converged truncation.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Largest truncation size tried.
        #[arg(long, default_value_t = 4096)]
        size: usize,
    },
    /// Spectral data to symbol coefficients. CSV: n, re, im, abs.
    Inverse {
        #[command(flatten)]
        io: Io,
        /// Highest coefficient index.
        #[arg(long, default_value_t = 128)]
        nmax: usize,
        /// Keep all coefficients instead of stopping once |c_n| < 1e-14·ρ₁ for 8 consecutive n.
        #[arg(long)]
        full: bool,
    },
    /// Inverse then forward map (spectral input) or forward then inverse (symbol input).
    Roundtrip {
        #[command(flatten)]
        io: Io,
        /// Largest accepted relative error.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Number of coefficients compared for symbol input.
        #[arg(long, default_value_t = 128)]
        nmax: usize,
        /// Largest truncation size of the forward map.
        #[arg(long, default_value_t = 4096)]
        size: usize,
    },
    /// Kernel classification and inner generator. CSV: t, modulus.
    Kernel {
        #[command(flatten)]
        io: Io,
        /// Highest generator coefficient index.
        #[arg(long, default_value_t = 128)]
        nmax: usize,
        /// Number of circle samples for the modulus check.
        #[arg(long, default_value_t = 512)]
        samples: usize,
        /// Hankel truncation size of the annihilation check.
        #[arg(long, default_value_t = 64)]
        size: usize,
        /// Largest accepted tail estimate of the generator series.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Residuals of the weight identities.
    Identities {
        #[command(flatten)]
        io: Io,
        /// Largest accepted residual.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Generating function on a grid. CSV: x, J_product, J_resolvent, residual.
    Genfun {
        #[command(flatten)]
        io: Io,
        /// Symbol document used for the resolvent when --in holds spectral data.
        #[arg(long, value_name = "FILE")]
        symbol: Option<PathBuf>,
        #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
        xmin: f64,
        #[arg(long, default_value_t = -0.01, allow_hyphen_values = true)]
        xmax: f64,
        #[arg(long, default_value_t = 32)]
        points: usize,
        /// Resolvent truncation size [default: doubled until stable].
        #[arg(long)]
        size: Option<usize>,
        /// Largest accepted relative disagreement between the forms of J.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Kronecker ranks of a symbol or rational document.
    Rank {
        #[command(flatten)]
        io: Io,
        /// Relative threshold on singular values.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Largest truncation size.
        #[arg(long, default_value_t = 1024)]
        size: usize,
        /// Number of series coefficients expanded from a rational document.
        #[arg(long, default_value_t = 4096)]
        nmax: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (io, result) = match &cli.command {
        Command::Forward { io, tol, size } => (io, commands::forward(io, *tol, *size)),
        Command::Inverse { io, nmax, full } => (io, commands::inverse(io, *nmax, *full)),
        Command::Roundtrip { io, tol, nmax, size } => (io, commands::roundtrip(io, *tol, *nmax, *size)),
        Command::Kernel {
            io,
            nmax,
            samples,
            size,
            tol,
        } => (io, commands::kernel(io, *nmax, *samples, *size, *tol)),
        Command::Identities { io, tol } => (io, commands::identities(io, *tol)),
        Command::Genfun {
            io,
            symbol,
            xmin,
            xmax,
            points,
            size,
            tol,
        } => (
            io,
            commands::genfun(io, symbol.as_deref(), (*xmin, *xmax, *points), *size, *tol),
        ),
        Command::Rank { io, tol, size, nmax } => (io, commands::rank(io, *tol, *size, *nmax)),
    };
    let failure = match result.and_then(|outcome| outcome.write(io)) {
        Ok(None) => return ExitCode::SUCCESS,
        Ok(Some(err)) | Err(err) => err,
    };
    let doc = ErrorDocument::new(&failure);
    eprintln!("{}", serde_json::to_string(&doc).expect("error document serializes"));
    if failure.is_tolerance_failure() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}
