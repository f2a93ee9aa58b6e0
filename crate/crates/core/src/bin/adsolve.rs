use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use adsolve::cli::{execute, parse_config, CliError, Subcommand};
use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, ValueEnum)]
enum Command {
    Roots,
    Solve,
    Resonance,
    Psi,
    General,
    Verify,
    OrbitCsv,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::Roots => Subcommand::Roots,
            Command::Solve => Subcommand::Solve,
            Command::Resonance => Subcommand::Resonance,
            Command::Psi => Subcommand::Psi,
            Command::General => Subcommand::General,
            Command::Verify => Subcommand::Verify,
            Command::OrbitCsv => Subcommand::OrbitCsv,
        }
    }
}

/// Analytic series solutions of second-order difference equations.
#[derive(Parser)]
#[command(name = "adsolve", version)]
struct Args {
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the series order `N`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let env = env_logger::Env::new().filter_or(
        "TOOL_LOG_LEVEL",
        std::env::var("ADSOLVE_LOG_LEVEL").unwrap_or_else(|_| "warn".into()),
    );
    env_logger::Builder::from_env(env).init();
    let args = Args::parse();
    let code = match run(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn run(args: &Args) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(n) = args.n {
        if n == 0 {
            return Err(CliError::Validation(adsolve::Error::InvalidArgument(
                "--n must be at least 1".into(),
            )));
        }
        cfg.order = n;
    }
    let (outcome, written) = execute(&cfg, args.command.into(), args.out.as_deref())?;
    if written.is_none() && !args.quiet {
        let _ = std::io::stdout().write_all(outcome.text.as_bytes());
    }
    if !outcome.passed {
        eprintln!("error: verification did not pass");
    }
    Ok(outcome.exit_code())
}
