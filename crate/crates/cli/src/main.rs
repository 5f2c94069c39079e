//! `hamclass`: classify interaction sets, compile instances through gadget
//! encodings, verify the compiled result, and query spectra and reference models.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hamclass_core::Mode;

use commands::{CliError, OracleName, Target};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "hamclass", version, about = "Complexity classes and gadget checks for 2-local qubit Hamiltonians")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Print only the headline value(s).
    #[arg(long, global = true)]
    quiet: bool,
    /// Seed for randomized starting vectors.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the interaction set in a JSON file.
    Classify {
        set_file: PathBuf,
        #[arg(long, default_value = "bare", value_parser = parse_mode)]
        mode: Mode,
    },
    /// Rewrite a logical instance into a physical one plus a plan sidecar.
    Compile {
        instance_file: PathBuf,
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long, default_value_t = 16.0)]
        delta: f64,
        /// Qubit pinned by the `pin` target (default: the last one).
        #[arg(long)]
        qubit: Option<usize>,
        /// Physical instance output path.
        #[arg(long, short)]
        out: PathBuf,
        /// Plan sidecar path (default: `<out>.plan.json`).
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Measure the effective-Hamiltonian distance of a compiled pair.
    VerifyGadget {
        instance_file: PathBuf,
        plan_file: PathBuf,
        /// Comma-separated δ values to recompile and measure.
        #[arg(long, value_delimiter = ',')]
        delta_sweep: Vec<f64>,
    },
    /// Lowest eigenvalues of an instance.
    Spectrum {
        instance_file: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Closed-form reference values.
    Oracle {
        #[arg(value_enum)]
        name: OracleName,
        params: Vec<usize>,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn configure_threads() {
    if let Some(t) = std::env::var("HAMCLASS_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|t| *t > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

fn run(cli: Cli) -> Result<(report::Report, i32), CliError> {
    let ok = |r| Ok((r, commands::EXIT_OK));
    match cli.command {
        Command::Classify { set_file, mode } => ok(commands::classify_cmd(&set_file, mode)?),
        Command::Compile { instance_file, target, delta, qubit, out, plan } => {
            ok(commands::compile_cmd(&instance_file, target, delta, qubit, &out, plan.as_deref())?)
        }
        Command::VerifyGadget { instance_file, plan_file, delta_sweep } => commands::verify_cmd(&instance_file, &plan_file, &delta_sweep),
        Command::Spectrum { instance_file, k } => ok(commands::spectrum_cmd(&instance_file, k, cli.seed)?),
        Command::Oracle { name, params } => ok(commands::oracle_cmd(name, &params)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let Format::Json = cli.format;
    let quiet = cli.quiet;
    match run(cli) {
        Ok((report, code)) => {
            let mut out = std::io::stdout().lock();
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(out, "{}", report.render(quiet));
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
