//! Scenario runner behind the `sim` binary.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 validation failure.

pub mod config;
pub mod output;
pub mod scenarios;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;
use thiserror::Error;

pub use config::{parse_config, parse_config_str, ConfigError, RunConfig, Scenario};
pub use output::{CsvFile, FileRecord, RunManifest, MANIFEST_NAME};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("validation failure: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

/// Command-line overrides applied on top of the configuration file.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub scenario: Option<Scenario>,
    pub out_dir: Option<PathBuf>,
    pub allow_detuned: bool,
    /// Worker threads for independent simulations; `None` uses every core.
    pub workers: Option<usize>,
}

/// Resolves the scenario named on the command line against the file's.
pub fn resolve_scenario(cfg: &RunConfig, requested: Option<Scenario>) -> Result<Scenario, ConfigError> {
    match (requested, cfg.scenario) {
        (Some(a), Some(b)) if a != b => Err(ConfigError {
            line: None,
            key: "scenario".into(),
            message: format!("command line asks for `{}` but the file sets `{}`", a.name(), b.name()),
        }),
        (Some(a), _) | (None, Some(a)) => Ok(a),
        (None, None) => Err(ConfigError { line: None, key: "scenario".into(), message: "no scenario given".into() }),
    }
}

pub fn default_out_dir(s: Scenario) -> PathBuf {
    PathBuf::from("results").join(s.name())
}

/// Runs one scenario, writes its CSVs and manifest, and returns the manifest.
/// Failures that still produce output (failed checks, failed sweep points)
/// are reported through `manifest.exit_code`.
pub fn execute(cfg: &RunConfig, opts: &RunOptions) -> Result<RunManifest, CliError> {
    let scenario = resolve_scenario(cfg, opts.scenario)?;
    let dir = opts.out_dir.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| default_out_dir(scenario));
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.workers {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;

    let start = Instant::now();
    let result = pool.install(|| match scenario {
        Scenario::Rabi => scenarios::run_rabi(cfg, opts.allow_detuned),
        Scenario::Correlations => scenarios::run_correlations(cfg),
        Scenario::EmissionSweep => scenarios::run_emission_sweep(cfg),
        Scenario::Validate => scenarios::run_validate(cfg),
        Scenario::Design => scenarios::run_design(cfg),
    })?;
    let total = start.elapsed().as_secs_f64();
    write_outputs(cfg, scenario, &dir, result, total)
}

fn write_outputs(
    cfg: &RunConfig,
    scenario: Scenario,
    dir: &Path,
    result: scenarios::ScenarioResult,
    total_seconds: f64,
) -> Result<RunManifest, CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.display()));
    let mut files = Vec::new();
    for f in &result.files {
        files.push(output::write_file(dir, &f.name, &f.render()).map_err(io)?);
    }
    let params = scenarios::resolve_params(cfg)?;
    let exit_code = if result.failures.is_empty() { EXIT_OK } else { result.failure_code };
    let mut timings = result.timings;
    timings.push(output::Timing { stage: "total".into(), seconds: total_seconds });
    let manifest = RunManifest {
        tool: "sim".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        scenario: scenario.name().into(),
        status: if exit_code == EXIT_OK { "ok".into() } else { "failed".into() },
        exit_code,
        config: serde_json::to_value(cfg).unwrap_or_default(),
        params_user: serde_json::to_value(params.to_user()).unwrap_or_default(),
        params_internal: json!({ "units": "rad/ns", "values": params }),
        checks: result.checks,
        summary: result.summary,
        warnings: result.warnings,
        failures: result.failures,
        files,
        timings,
        output_dir: dir.to_path_buf(),
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join(MANIFEST_NAME), text + "\n").map_err(io)?;
    Ok(manifest)
}
