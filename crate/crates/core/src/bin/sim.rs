use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use pairblock::cli::{execute, parse_config, CliError, RunOptions, Scenario, EXIT_CONFIG};

/// Photon-pair blockade simulator.
#[derive(Parser, Debug)]
#[command(name = "sim", version)]
struct Args {
    /// rabi, correlations, emission-sweep, validate or design
    scenario: String,
    /// Configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `[output] dir`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run the rabi scenario even when off resonance
    #[arg(long)]
    allow_detuned: bool,
    /// Worker threads for independent simulations
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match run(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("sim: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn run(args: &Args) -> Result<i32, CliError> {
    let scenario = Scenario::from_name(&args.scenario).ok_or_else(|| {
        CliError::Config(pairblock::cli::ConfigError {
            line: None,
            key: "scenario".into(),
            message: format!("unknown scenario `{}`", args.scenario),
        })
    })?;
    let cfg = parse_config(&args.config)?;
    let opts = RunOptions {
        scenario: Some(scenario),
        out_dir: args.out.clone(),
        allow_detuned: args.allow_detuned,
        workers: args.workers,
    };
    let manifest = execute(&cfg, &opts)?;
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    for f in &manifest.failures {
        eprintln!("failed: {f}");
    }
    println!("{}", serde_json::to_string_pretty(&manifest.summary).unwrap_or_default());
    println!(
        "wrote {} file(s) and {} to {}",
        manifest.files.len(),
        pairblock::cli::MANIFEST_NAME,
        manifest.output_dir.display()
    );
    debug_assert!(manifest.exit_code != EXIT_CONFIG);
    Ok(manifest.exit_code)
}
