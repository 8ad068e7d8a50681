use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use equifact::{parse_scenario, run, CliError};

#[derive(Debug, Parser)]
#[command(name = "equifact", version)]
#[command(about = "check whether torus-equivariant spectral triples factorise over the orbit space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the checks described by a scenario file
    Check {
        scenario: PathBuf,

        /// Output directory (overrides `output` in the scenario)
        #[arg(long)]
        out: Option<PathBuf>,

        /// Grid refinements beyond the base model
        #[arg(long)]
        refinements: Option<usize>,

        /// Truncation window K
        #[arg(long)]
        window: Option<i64>,
    },
}

fn check(path: PathBuf, out: Option<PathBuf>, refinements: Option<usize>, window: Option<i64>) -> Result<u8, CliError> {
    let text = fs::read_to_string(&path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let mut scenario = parse_scenario(&text).map_err(|e| match e {
        CliError::Config { line, message } => CliError::Usage(format!("{}:{line}: {message}", path.display())),
        other => other,
    })?;
    if let Some(k) = window {
        scenario.set_window(k)?;
    }
    if let Some(r) = refinements {
        scenario.set_refinements(r)?;
    }
    // a relative `output` is resolved against the scenario file
    let out_dir = out.unwrap_or_else(|| match &scenario.output {
        Some(p) if p.is_relative() => path.parent().unwrap_or(&PathBuf::from(".")).join(p),
        Some(p) => p.clone(),
        None => PathBuf::from("equifact-out"),
    });
    let outcome = run(&scenario, &path, &out_dir)?;
    print!("{}", outcome.text);
    println!("wrote {}", outcome.out_dir.join("report.json").display());
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check {
            scenario,
            out,
            refinements,
            window,
        } => check(scenario, out, refinements, window),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
