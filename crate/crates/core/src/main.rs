use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pdlmi::cli::{emit_problem, parse_problem, run, ProblemFile, RunOptions, Target, EXIT_INPUT};

#[derive(Parser)]
#[command(name = "pdlmi", version, about = "Certificates for parameter-dependent LMIs over polynomial domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower bound of a polynomial over its domain.
    Polymin(RunArgs),
    /// Positivity certificate for a polynomial over its domain.
    Certify(RunArgs),
    /// Parameter-dependent Lyapunov function for an uncertain system.
    Lyap(RunArgs),
    /// KYP LMI feasibility cross-checked by a frequency sweep.
    KypCheck(RunArgs),
    /// Prints the canonical form of a problem file.
    Fmt {
        file: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Args)]
struct RunArgs {
    /// Problem file.
    file: PathBuf,
    /// Largest multiplier degree for the schedule sweep.
    #[arg(long)]
    schedule_cap: Option<u32>,
    /// Strictness margin for `> 0`.
    #[arg(long)]
    margin_eps: Option<f64>,
    /// Grid points per axis for the oracle.
    #[arg(long)]
    grid: Option<usize>,
    /// Seed for constraint sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the final solver problem in SDPA sparse format to this path.
    #[arg(long)]
    dump_sdp: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Include wall time in the report.
    #[arg(long)]
    timing: bool,
}

fn load(path: &Path) -> Result<ProblemFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_problem(&text).map_err(|e| format!("{}:{}:{}: {}", path.display(), e.line, e.col, e.kind))
}

fn execute(target: Target, args: RunArgs) -> ExitCode {
    let problem = match load(&args.file) {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let opts = RunOptions {
        schedule_cap: args.schedule_cap,
        eps: args.margin_eps,
        grid: args.grid,
        seed: args.seed,
        dump_sdp: args.dump_sdp.is_some(),
        timing: args.timing,
    };
    let out = run(&problem, target, &opts);
    match args.format {
        Format::Human => print!("{}", out.report.emit_human()),
        Format::Machine => print!("{}", out.report.emit_machine()),
    }
    if let (Some(path), Some(text)) = (&args.dump_sdp, &out.sdp_dump) {
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    ExitCode::from(out.exit_code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Polymin(a) => execute(Target::Polymin, a),
        Command::Certify(a) => execute(Target::Certify, a),
        Command::Lyap(a) => execute(Target::Lyap, a),
        Command::KypCheck(a) => execute(Target::KypCheck, a),
        Command::Fmt { file } => match load(&file) {
            Ok(p) => {
                print!("{}", emit_problem(&p));
                ExitCode::SUCCESS
            }
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(EXIT_INPUT as u8)
            }
        },
    }
}
