use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use resonance_cli::scenario::Format;
use resonance_cli::{catalog, load_config, run_config, CliError, RunOptions};

#[derive(Parser)]
#[command(name = "resonance", version, about = "Run resonance-decay scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON file or `builtin:<name>`.
    Run {
        config: String,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        seed: Option<u64>,
        /// Replace the pass/fail tolerance of the scenario's check.
        #[arg(long)]
        tol_override: Option<f64>,
        /// Compare outputs against golden files in this directory.
        #[arg(long)]
        golden_dir: Option<PathBuf>,
        /// Rewrite the golden files instead of comparing.
        #[arg(long, requires = "golden_dir")]
        bless: bool,
    },
    /// List built-in scenarios.
    List {
        #[arg(long)]
        json: bool,
    },
}

fn report(err: &CliError) {
    let body = serde_json::json!({
        "status": "error",
        "category": err.category(),
        "message": err.to_string(),
    });
    eprintln!("{body}");
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List { json } => {
            if json {
                print!("{}", catalog::render_json());
            } else {
                print!("{}", catalog::render_text());
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            out_dir,
            format,
            seed,
            tol_override,
            golden_dir,
            bless,
        } => {
            let options = RunOptions {
                out_dir,
                format,
                seed,
                tolerance: tol_override,
                golden_dir,
                bless,
            };
            match load_config(&config).and_then(|text| run_config(&text, &options)) {
                Ok(manifest) => {
                    println!(
                        "{}: {} = {:e} (tolerance {:e}) -> {}",
                        manifest.name,
                        manifest.check.quantity,
                        manifest.check.value,
                        manifest.check.tolerance,
                        options.out_dir.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(err) => {
                    report(&err);
                    ExitCode::from(err.exit_code() as u8)
                }
            }
        }
    }
}
