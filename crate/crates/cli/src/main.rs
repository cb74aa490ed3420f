use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lambshift_cli::columns::describe;
use lambshift_cli::{output, run, validate, CliError, SweepConfig};
use lambshift_core::model::HamiltonianVariant;

#[derive(Parser)]
#[command(
    name = "lambshift",
    version,
    about = "Drive-tuned Lamb shift sweeps of a transmon-resonator device"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a TOML config.
    Run {
        config: PathBuf,
        /// Worker threads; 1 runs single-threaded.
        #[arg(long, env = "LAMBSHIFT_WORKERS")]
        workers: Option<usize>,
        /// Output directory, overriding the config.
        #[arg(long, env = "LAMBSHIFT_OUT_DIR")]
        out_dir: Option<PathBuf>,
        /// Check the config and exit.
        #[arg(long)]
        check: bool,
    },
    /// Run the oracle suite and print the report table.
    Validate {
        /// Also write the rows as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Debug: replace the main propagator by a coarse one. The
        /// cross-method rows should fail.
        #[arg(long, hide = true)]
        loosen: bool,
    },
    /// List the Hamiltonian variants.
    Variants,
    /// Print the output schema.
    Schema,
}

fn run_config(
    config: PathBuf,
    workers: Option<usize>,
    out_dir: Option<PathBuf>,
    check: bool,
) -> Result<(), CliError> {
    let plan = SweepConfig::load(&config)?.plan()?;
    if workers == Some(0) {
        return Err(CliError::config("LAMBSHIFT_WORKERS must be at least 1"));
    }
    if check {
        eprintln!(
            "{}: {} frequencies x {} amplitudes x {} variants{}",
            plan.name,
            plan.frequencies.len(),
            plan.amplitudes.len(),
            plan.variants.len(),
            if plan.eta.is_some() { ", with η" } else { "" }
        );
        return Ok(());
    }
    let result = run(&plan, workers)?;
    let dir = out_dir.unwrap_or_else(|| plan.output.dir.clone());
    for path in output::write_all(&plan, &result, &dir)? {
        eprintln!("wrote {}", path.display());
    }
    match result.failures() {
        0 => Ok(()),
        n => Err(CliError::Solver(n)),
    }
}

fn run_validate(json: Option<PathBuf>, loosen: bool) -> Result<(), CliError> {
    let rows = validate::suite(loosen)?;
    print!("{}", validate::table(&rows));
    if let Some(path) = json {
        let text =
            serde_json::to_string_pretty(&rows).map_err(|e| CliError::Output(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    }
    match rows.iter().filter(|r| !r.pass).count() {
        0 => Ok(()),
        n => Err(CliError::Validation(n)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            config,
            workers,
            out_dir,
            check,
        } => run_config(config, workers, out_dir, check),
        Command::Validate { json, loosen } => run_validate(json, loosen),
        Command::Variants => {
            for v in HamiltonianVariant::ALL {
                println!("{:<22} {}", v.name(), v.description());
            }
            Ok(())
        }
        Command::Schema => {
            print!("{}", describe());
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lambshift: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
