use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use splitkit::session::{parse_session, run, CommandArgs, RunInputs};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    Realize,
    Split,
    Verify,
    CwRealize,
    CwSplit,
    Plus,
    Refine,
    ExportDot,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Realize => "realize",
            Command::Split => "split",
            Command::Verify => "verify",
            Command::CwRealize => "cw-realize",
            Command::CwSplit => "cw-split",
            Command::Plus => "plus",
            Command::Refine => "refine",
            Command::ExportDot => "export-dot",
        }
    }
}

/// Splittings of chain complexes and cell complexes over amalgams and HNN extensions.
#[derive(Parser, Debug)]
#[command(name = "splitkit", version)]
struct Cli {
    command: Command,
    /// Session document (JSON).
    #[arg(long)]
    session: PathBuf,
    /// Complex, cw complex or voltage complex to work on.
    #[arg(long)]
    complex: Option<String>,
    /// Seed subtree, e.g. "G1·e, H·e" or "G1:e, G2:x".
    #[arg(long)]
    seed: Option<String>,
    /// Window radius for acyclicity certificates.
    #[arg(long)]
    window: Option<usize>,
    /// Degree of the subtree to export.
    #[arg(long)]
    degree: Option<usize>,
    /// Kernel word for `plus`; repeatable.
    #[arg(long = "word")]
    words: Vec<String>,
    /// Kernel words of Y, X1, X2 for `refine`; repeatable.
    #[arg(long)]
    kernel_y: Vec<String>,
    #[arg(long)]
    kernel_x1: Vec<String>,
    #[arg(long)]
    kernel_x2: Vec<String>,
    /// Report of an earlier `split`, for `verify`.
    #[arg(long)]
    splitting: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn usage(message: String) -> ExitCode {
    eprintln!("splitkit: {message}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.session) {
        Ok(t) => t,
        Err(e) => return usage(format!("{}: {e}", cli.session.display())),
    };
    let session = match parse_session(&text) {
        Ok(s) => s,
        Err(e) => return usage(format!("{}: {e}", cli.session.display())),
    };
    let splitting = match &cli.splitting {
        None => None,
        Some(path) => match std::fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|t| serde_json::from_str(&t).map_err(|e| e.to_string())) {
            Ok(v) => Some(v),
            Err(e) => return usage(format!("{}: {e}", path.display())),
        },
    };
    let args = CommandArgs {
        complex: cli.complex,
        seed: cli.seed,
        window: cli.window,
        degree: cli.degree,
        words: cli.words,
        kernel_y: cli.kernel_y,
        kernel_x1: cli.kernel_x1,
        kernel_x2: cli.kernel_x2,
    };
    let outcome = run(&session, cli.command.name(), &RunInputs { args, splitting });
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.body) {
                return usage(format!("{}: {e}", path.display()));
            }
        }
        None => print!("{}", outcome.body),
    }
    ExitCode::from(outcome.code as u8)
}
