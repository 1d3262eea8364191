//! Run configuration.
//!
//! Line-oriented `key = value [unit]` pairs grouped under `[section]`
//! headers. `#` starts a comment. The only top-level key is `scenario`.
//!
//! ```text
//! scenario = correlations
//!
//! [model]
//! omega_1 = 9 GHz          # GHz or MHz, default unit GHz
//! omega_2 = 7 GHz
//! delta = 5 GHz
//! e_j = 0.5 GHz
//! lambda_1 = 0.2           # dimensionless
//! lambda_2 = 0.2
//! omega_j = 21 GHz         # omit to tune onto resonance
//! kappa = 0.1 GHz
//! gamma = 0.01 GHz
//! cutoff = 5               # largest Fock index per cavity
//!
//! [circuit]                # replaces omega_*, delta, e_j, lambda_*, omega_j
//! inductance_1 = 5 nH      # nH or pH
//! inductance_2 = 5 nH
//! capacitance_1 = 62.5 fF  # fF or pF
//! capacitance_2 = 80 fF
//! junction_energy = 0.5 GHz
//! flux_ratio = 0           # optional, default 0
//! charging_energy = 20 GHz
//! qubit_josephson = 5 GHz
//! bias_voltage = 43.4 uV   # optional; uV, µV or mV
//!
//! [rabi]
//! t_end = 60 ns            # optional, default two Rabi periods; ns or us
//! points = 801
//!
//! [correlations]
//! gamma_over_kappa = 0.05, 0.1, 0.2
//! kappa_tau_max = 10
//! points = 400
//! convergence_check = true
//!
//! [sweep]
//! parameter = gamma_over_kappa
//! start = 0.02
//! stop = 0.5
//! count = 25
//! spacing = linear         # or log
//!
//! [tolerances]             # see `Tolerances`
//! convergence = 1e-6
//!
//! [output]
//! dir = results
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::model::{CircuitParams, UserModelParams, DEFAULT_RWA_THRESHOLD, DEFAULT_TWO_LEVEL_THRESHOLD};
use crate::units::angular_to_ghz;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{}{key}: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(line: Option<usize>, key: impl Into<String>, message: impl Into<String>) -> Self {
        Self { line, key: key.into(), message: message.into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scenario {
    Rabi,
    Correlations,
    EmissionSweep,
    Validate,
    Design,
}

impl Scenario {
    pub const ALL: [Scenario; 5] =
        [Scenario::Rabi, Scenario::Correlations, Scenario::EmissionSweep, Scenario::Validate, Scenario::Design];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Rabi => "rabi",
            Scenario::Correlations => "correlations",
            Scenario::EmissionSweep => "emission-sweep",
            Scenario::Validate => "validate",
            Scenario::Design => "design",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RabiSpec {
    /// `None` covers two Rabi periods of the effective model.
    pub t_end_ns: Option<f64>,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationSpec {
    pub gamma_over_kappa: Vec<f64>,
    pub kappa_tau_max: f64,
    pub points: usize,
    pub convergence_check: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    /// Only `gamma_over_kappa` is supported: κ stays fixed.
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                let f = k as f64 / n;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * f,
                    Spacing::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * f).exp(),
                }
            })
            .collect()
    }
}

/// Pass thresholds for the numerical checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Relative change allowed when each cutoff is raised by 2.
    pub convergence: f64,
    /// GHz
    pub resonance: f64,
    pub rwa: f64,
    pub two_level: f64,
    pub rabi_deviation: f64,
    pub expm: f64,
    pub frank_condon: f64,
    pub laguerre: f64,
    pub regression: f64,
    pub trace: f64,
    pub hermiticity: f64,
    pub positivity: f64,
    pub steady_residual: f64,
    pub long_time: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            convergence: 1e-6,
            resonance: angular_to_ghz(crate::model::DEFAULT_RESONANCE_TOLERANCE),
            rwa: DEFAULT_RWA_THRESHOLD,
            two_level: DEFAULT_TWO_LEVEL_THRESHOLD,
            rabi_deviation: 0.05,
            expm: 1e-8,
            frank_condon: 1e-12,
            laguerre: 1e-10,
            regression: 1e-8,
            trace: 1e-8,
            hermiticity: 1e-8,
            positivity: 1e-6,
            steady_residual: 1e-10,
            long_time: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: Option<Scenario>,
    pub model: UserModelParams,
    pub circuit: Option<CircuitParams>,
    pub rabi: RabiSpec,
    pub correlations: CorrelationSpec,
    pub sweep: SweepSpec,
    pub tolerances: Tolerances,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            model: UserModelParams::default(),
            circuit: None,
            rabi: RabiSpec { t_end_ns: None, points: 801 },
            correlations: CorrelationSpec {
                gamma_over_kappa: vec![0.1],
                kappa_tau_max: 10.0,
                points: 400,
                convergence_check: true,
            },
            sweep: SweepSpec {
                parameter: "gamma_over_kappa".into(),
                start: 0.02,
                stop: 0.5,
                count: 25,
                spacing: Spacing::Linear,
            },
            tolerances: Tolerances::default(),
            output_dir: None,
        }
    }
}

#[derive(Clone, Copy)]
enum Unit {
    None,
    Frequency,
    Time,
    Inductance,
    Capacitance,
    Voltage,
}

impl Unit {
    /// `(suffix, factor to the default unit)`; the first entry is the default.
    fn table(self) -> &'static [(&'static str, f64)] {
        match self {
            Unit::None => &[],
            Unit::Frequency => &[("GHz", 1.0), ("MHz", 1e-3)],
            Unit::Time => &[("ns", 1.0), ("us", 1e3), ("µs", 1e3)],
            Unit::Inductance => &[("nH", 1.0), ("pH", 1e-3)],
            Unit::Capacitance => &[("fF", 1.0), ("pF", 1e3)],
            Unit::Voltage => &[("uV", 1.0), ("µV", 1.0), ("mV", 1e3)],
        }
    }
}

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

impl Entry<'_> {
    fn err(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::new(Some(self.line), self.key, message)
    }

    fn number(&self, unit: Unit) -> Result<f64, ConfigError> {
        let mut parts = self.value.split_whitespace();
        let num = parts.next().ok_or_else(|| self.err("missing value"))?;
        let x: f64 = num.parse().map_err(|_| self.err(format!("expected a number, got `{num}`")))?;
        let suffix = parts.next();
        if let Some(extra) = parts.next() {
            return Err(self.err(format!("unexpected trailing `{extra}`")));
        }
        let factor = match (suffix, unit.table()) {
            (None, _) => 1.0,
            (Some(s), []) => return Err(self.err(format!("unit mismatch: value is dimensionless, got `{s}`"))),
            (Some(s), table) => match table.iter().find(|(u, _)| *u == s) {
                Some((_, f)) => *f,
                None => {
                    let allowed: Vec<&str> = table.iter().map(|(u, _)| *u).collect();
                    return Err(self.err(format!("unit mismatch: expected one of {}, got `{s}`", allowed.join(", "))));
                }
            },
        };
        if !x.is_finite() {
            return Err(self.err("value must be finite"));
        }
        // divide for down-conversions so that e.g. 9000 MHz is exactly 9 GHz
        Ok(if factor < 1.0 { x / factor.recip() } else { x * factor })
    }

    fn integer(&self) -> Result<usize, ConfigError> {
        self.value.parse().map_err(|_| self.err(format!("expected a non-negative integer, got `{}`", self.value)))
    }

    fn boolean(&self) -> Result<bool, ConfigError> {
        match self.value {
            "true" => Ok(true),
            "false" => Ok(false),
            v => Err(self.err(format!("expected true or false, got `{v}`"))),
        }
    }

    fn list(&self) -> Result<Vec<f64>, ConfigError> {
        self.value
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| self.err(format!("expected a comma-separated list of numbers, got `{s}`")))
            })
            .collect()
    }
}

#[derive(Default)]
struct CircuitDraft {
    inductance: [Option<f64>; 2],
    capacitance: [Option<f64>; 2],
    junction_energy: Option<f64>,
    flux_ratio: Option<f64>,
    charging_energy: Option<f64>,
    qubit_josephson: Option<f64>,
    bias_voltage: Option<f64>,
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new(None, "config", format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut circuit: Option<(usize, CircuitDraft)> = None;
    let mut section = String::new();
    let mut seen: HashMap<String, usize> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::new(Some(line), content, "malformed section header"))?
                .trim();
            if !["model", "circuit", "rabi", "correlations", "sweep", "tolerances", "output"].contains(&name) {
                return Err(ConfigError::new(Some(line), name, "unknown section"));
            }
            if name == "circuit" && circuit.is_none() {
                circuit = Some((line, CircuitDraft::default()));
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| ConfigError::new(Some(line), content, "expected `key = value`"))?;
        let e = Entry { line, key, value };
        let qualified = format!("{section}.{key}");
        if let Some(first) = seen.insert(qualified, line) {
            return Err(e.err(format!("duplicate key (first set on line {first})")));
        }

        let m = &mut cfg.model;
        let t = &mut cfg.tolerances;
        match (section.as_str(), key) {
            ("", "scenario") => {
                cfg.scenario = Some(Scenario::from_name(value).ok_or_else(|| {
                    let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
                    e.err(format!("unknown scenario `{value}`, expected one of {}", names.join(", ")))
                })?)
            }
            ("model", "omega_1") => m.omega_1_ghz = e.number(Unit::Frequency)?,
            ("model", "omega_2") => m.omega_2_ghz = e.number(Unit::Frequency)?,
            ("model", "delta") => m.delta_ghz = e.number(Unit::Frequency)?,
            ("model", "e_j") => m.e_j_ghz = e.number(Unit::Frequency)?,
            ("model", "lambda_1") => m.lambda_1 = e.number(Unit::None)?,
            ("model", "lambda_2") => m.lambda_2 = e.number(Unit::None)?,
            ("model", "omega_j") => m.omega_j_ghz = Some(e.number(Unit::Frequency)?),
            ("model", "kappa") => m.kappa_ghz = e.number(Unit::Frequency)?,
            ("model", "gamma") => m.gamma_ghz = e.number(Unit::Frequency)?,
            ("model", "cutoff") => m.cutoff = e.integer()?,
            ("circuit", k) => {
                let c = &mut circuit.as_mut().expect("opened by header").1;
                match k {
                    "inductance_1" => c.inductance[0] = Some(e.number(Unit::Inductance)?),
                    "inductance_2" => c.inductance[1] = Some(e.number(Unit::Inductance)?),
                    "capacitance_1" => c.capacitance[0] = Some(e.number(Unit::Capacitance)?),
                    "capacitance_2" => c.capacitance[1] = Some(e.number(Unit::Capacitance)?),
                    "junction_energy" => c.junction_energy = Some(e.number(Unit::Frequency)?),
                    "flux_ratio" => c.flux_ratio = Some(e.number(Unit::None)?),
                    "charging_energy" => c.charging_energy = Some(e.number(Unit::Frequency)?),
                    "qubit_josephson" => c.qubit_josephson = Some(e.number(Unit::Frequency)?),
                    "bias_voltage" => c.bias_voltage = Some(e.number(Unit::Voltage)?),
                    _ => return Err(e.err("unknown key in [circuit]")),
                }
            }
            ("rabi", "t_end") => cfg.rabi.t_end_ns = Some(e.number(Unit::Time)?),
            ("rabi", "points") => cfg.rabi.points = e.integer()?,
            ("correlations", "gamma_over_kappa") => cfg.correlations.gamma_over_kappa = e.list()?,
            ("correlations", "kappa_tau_max") => cfg.correlations.kappa_tau_max = e.number(Unit::None)?,
            ("correlations", "points") => cfg.correlations.points = e.integer()?,
            ("correlations", "convergence_check") => cfg.correlations.convergence_check = e.boolean()?,
            ("sweep", "parameter") => {
                if value != "gamma_over_kappa" {
                    return Err(e.err(format!("only gamma_over_kappa can be swept, got `{value}`")));
                }
                cfg.sweep.parameter = value.to_string();
            }
            ("sweep", "start") => cfg.sweep.start = e.number(Unit::None)?,
            ("sweep", "stop") => cfg.sweep.stop = e.number(Unit::None)?,
            ("sweep", "count") => cfg.sweep.count = e.integer()?,
            ("sweep", "spacing") => {
                cfg.sweep.spacing = match value {
                    "linear" => Spacing::Linear,
                    "log" => Spacing::Log,
                    v => return Err(e.err(format!("expected linear or log, got `{v}`"))),
                }
            }
            ("tolerances", k) => {
                let slot = match k {
                    "rtol" => &mut t.rtol,
                    "atol" => &mut t.atol,
                    "convergence" => &mut t.convergence,
                    "rwa" => &mut t.rwa,
                    "two_level" => &mut t.two_level,
                    "rabi_deviation" => &mut t.rabi_deviation,
                    "expm" => &mut t.expm,
                    "frank_condon" => &mut t.frank_condon,
                    "laguerre" => &mut t.laguerre,
                    "regression" => &mut t.regression,
                    "trace" => &mut t.trace,
                    "hermiticity" => &mut t.hermiticity,
                    "positivity" => &mut t.positivity,
                    "steady_residual" => &mut t.steady_residual,
                    "long_time" => &mut t.long_time,
                    "resonance" => {
                        t.resonance = e.number(Unit::Frequency)?;
                        continue;
                    }
                    _ => return Err(e.err("unknown key in [tolerances]")),
                };
                *slot = e.number(Unit::None)?;
            }
            ("output", "dir") => cfg.output_dir = Some(PathBuf::from(value)),
            ("", _) => return Err(e.err("unknown top-level key (only `scenario` is allowed outside a section)")),
            (s, _) => return Err(e.err(format!("unknown key in [{s}]"))),
        }
    }

    if let Some((header, c)) = circuit {
        let need = |v: Option<f64>, key: &str| {
            let line = seen.get(&format!("circuit.{key}")).copied().unwrap_or(header);
            v.ok_or_else(|| ConfigError::new(Some(line), format!("circuit.{key}"), "required in [circuit]"))
        };
        cfg.circuit = Some(CircuitParams {
            inductance_nh: [need(c.inductance[0], "inductance_1")?, need(c.inductance[1], "inductance_2")?],
            capacitance_ff: [need(c.capacitance[0], "capacitance_1")?, need(c.capacitance[1], "capacitance_2")?],
            junction_energy_ghz: need(c.junction_energy, "junction_energy")?,
            flux_ratio: c.flux_ratio.unwrap_or(0.0),
            charging_energy_ghz: need(c.charging_energy, "charging_energy")?,
            qubit_josephson_ghz: need(c.qubit_josephson, "qubit_josephson")?,
            bias_voltage_uv: c.bias_voltage,
        });
    }

    cfg.validate_with(&|key: &str| seen.get(key).copied())?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.validate_with(&|_| None)
    }

    fn validate_with(&self, line_of: &dyn Fn(&str) -> Option<usize>) -> Result<(), ConfigError> {
        let fail = |key: &str, message: String| Err(ConfigError::new(line_of(key), key, message));

        if let Err(crate::error::ModelError::InvalidParameter { name, reason }) = self.model.to_internal().validate() {
            let key = match name {
                "omega_j" => "model.omega_j".to_string(),
                n => format!("model.{n}"),
            };
            return fail(&key, reason);
        }
        if let Some(c) = &self.circuit {
            if let Err(err) = c.validate() {
                let key = match &err {
                    crate::error::ModelError::InvalidParameter { name, .. } => format!("circuit.{name}"),
                    _ => "circuit".to_string(),
                };
                return fail(&key, err.to_string());
            }
        }
        if self.rabi.points < 2 {
            return fail("rabi.points", format!("need at least 2 grid points, got {}", self.rabi.points));
        }
        if let Some(t) = self.rabi.t_end_ns {
            if !(t > 0.0) {
                return fail("rabi.t_end", format!("must be > 0, got {t}"));
            }
        }
        let c = &self.correlations;
        if c.points < 2 {
            return fail("correlations.points", format!("need at least 2 grid points, got {}", c.points));
        }
        if !(c.kappa_tau_max > 0.0) {
            return fail("correlations.kappa_tau_max", format!("must be > 0, got {}", c.kappa_tau_max));
        }
        if c.gamma_over_kappa.is_empty() || c.gamma_over_kappa.iter().any(|g| !(*g >= 0.0)) {
            return fail("correlations.gamma_over_kappa", "need one or more values >= 0".into());
        }
        let s = &self.sweep;
        if s.count < 1 {
            return fail("sweep.count", "must be >= 1".into());
        }
        if !(s.start >= 0.0) {
            return fail("sweep.start", format!("must be >= 0, got {}", s.start));
        }
        if s.count > 1 && !(s.start < s.stop) {
            return fail("sweep.stop", format!("sweep bounds must be ordered, got start {} stop {}", s.start, s.stop));
        }
        if s.spacing == Spacing::Log && !(s.start > 0.0) {
            return fail("sweep.start", "log spacing needs start > 0".into());
        }
        let t = &self.tolerances;
        for (k, v) in [
            ("rtol", t.rtol),
            ("atol", t.atol),
            ("convergence", t.convergence),
            ("resonance", t.resonance),
            ("rwa", t.rwa),
            ("two_level", t.two_level),
            ("rabi_deviation", t.rabi_deviation),
            ("expm", t.expm),
            ("frank_condon", t.frank_condon),
            ("laguerre", t.laguerre),
            ("regression", t.regression),
            ("trace", t.trace),
            ("hermiticity", t.hermiticity),
            ("positivity", t.positivity),
            ("steady_residual", t.steady_residual),
            ("long_time", t.long_time),
        ] {
            if !(v >= 0.0) {
                return fail(&format!("tolerances.{k}"), format!("must be >= 0, got {v}"));
            }
        }
        if !(t.rtol > 0.0 || t.atol > 0.0) {
            return fail("tolerances.rtol", "rtol and atol cannot both be zero".into());
        }
        Ok(())
    }

    /// Canonical text form; [`parse_config_str`] reads it back to an equal value.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        if let Some(sc) = self.scenario {
            let _ = writeln!(s, "scenario = {}\n", sc.name());
        }
        let m = &self.model;
        let _ = writeln!(s, "[model]");
        let _ = writeln!(s, "omega_1 = {:?} GHz", m.omega_1_ghz);
        let _ = writeln!(s, "omega_2 = {:?} GHz", m.omega_2_ghz);
        let _ = writeln!(s, "delta = {:?} GHz", m.delta_ghz);
        let _ = writeln!(s, "e_j = {:?} GHz", m.e_j_ghz);
        let _ = writeln!(s, "lambda_1 = {:?}", m.lambda_1);
        let _ = writeln!(s, "lambda_2 = {:?}", m.lambda_2);
        if let Some(w) = m.omega_j_ghz {
            let _ = writeln!(s, "omega_j = {w:?} GHz");
        }
        let _ = writeln!(s, "kappa = {:?} GHz", m.kappa_ghz);
        let _ = writeln!(s, "gamma = {:?} GHz", m.gamma_ghz);
        let _ = writeln!(s, "cutoff = {}", m.cutoff);
        if let Some(c) = &self.circuit {
            let _ = writeln!(s, "\n[circuit]");
            let _ = writeln!(s, "inductance_1 = {:?} nH", c.inductance_nh[0]);
            let _ = writeln!(s, "inductance_2 = {:?} nH", c.inductance_nh[1]);
            let _ = writeln!(s, "capacitance_1 = {:?} fF", c.capacitance_ff[0]);
            let _ = writeln!(s, "capacitance_2 = {:?} fF", c.capacitance_ff[1]);
            let _ = writeln!(s, "junction_energy = {:?} GHz", c.junction_energy_ghz);
            let _ = writeln!(s, "flux_ratio = {:?}", c.flux_ratio);
            let _ = writeln!(s, "charging_energy = {:?} GHz", c.charging_energy_ghz);
            let _ = writeln!(s, "qubit_josephson = {:?} GHz", c.qubit_josephson_ghz);
            if let Some(v) = c.bias_voltage_uv {
                let _ = writeln!(s, "bias_voltage = {v:?} uV");
            }
        }
        let _ = writeln!(s, "\n[rabi]");
        if let Some(t) = self.rabi.t_end_ns {
            let _ = writeln!(s, "t_end = {t:?} ns");
        }
        let _ = writeln!(s, "points = {}", self.rabi.points);
        let c = &self.correlations;
        let list: Vec<String> = c.gamma_over_kappa.iter().map(|g| format!("{g:?}")).collect();
        let _ = writeln!(s, "\n[correlations]");
        let _ = writeln!(s, "gamma_over_kappa = {}", list.join(", "));
        let _ = writeln!(s, "kappa_tau_max = {:?}", c.kappa_tau_max);
        let _ = writeln!(s, "points = {}", c.points);
        let _ = writeln!(s, "convergence_check = {}", c.convergence_check);
        let w = &self.sweep;
        let _ = writeln!(s, "\n[sweep]");
        let _ = writeln!(s, "parameter = {}", w.parameter);
        let _ = writeln!(s, "start = {:?}", w.start);
        let _ = writeln!(s, "stop = {:?}", w.stop);
        let _ = writeln!(s, "count = {}", w.count);
        let _ = writeln!(s, "spacing = {}", if w.spacing == Spacing::Linear { "linear" } else { "log" });
        let t = &self.tolerances;
        let _ = writeln!(s, "\n[tolerances]");
        for (k, v) in [
            ("rtol", t.rtol),
            ("atol", t.atol),
            ("convergence", t.convergence),
            ("rwa", t.rwa),
            ("two_level", t.two_level),
            ("rabi_deviation", t.rabi_deviation),
            ("expm", t.expm),
            ("frank_condon", t.frank_condon),
            ("laguerre", t.laguerre),
            ("regression", t.regression),
            ("trace", t.trace),
            ("hermiticity", t.hermiticity),
            ("positivity", t.positivity),
            ("steady_residual", t.steady_residual),
            ("long_time", t.long_time),
        ] {
            let _ = writeln!(s, "{k} = {v:?}");
        }
        let _ = writeln!(s, "resonance = {:?} GHz", t.resonance);
        if let Some(d) = &self.output_dir {
            let _ = writeln!(s, "\n[output]\ndir = {}", d.display());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse_config_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.model, UserModelParams::default());
    }

    #[test]
    fn units_and_comments() {
        let cfg = parse_config_str(
            "scenario = rabi # first\n[model]\nomega_1 = 9000 MHz\nkappa = 100 MHz\n[rabi]\nt_end = 0.05 us\n",
        )
        .unwrap();
        assert_eq!(cfg.scenario, Some(Scenario::Rabi));
        assert_eq!(cfg.model.omega_1_ghz, 9.0);
        assert!((cfg.model.kappa_ghz - 0.1).abs() < 1e-15);
        assert_eq!(cfg.rabi.t_end_ns, Some(50.0));
    }

    #[test]
    fn errors_name_line_and_key() {
        let e = parse_config_str("[model]\n\nlambda_1 = -0.1\n").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (Some(3), "model.lambda_1"));
        let e = parse_config_str("[model]\nomega_1 = 9 nH\n").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (Some(2), "omega_1"));
        assert!(e.message.contains("unit mismatch"));
        let e = parse_config_str("[model]\nlambda_1 = 0.2 GHz\n").unwrap_err();
        assert!(e.message.contains("unit mismatch"));
        let e = parse_config_str("[rabi]\nfoo = 1\n").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (Some(2), "foo"));
        let e = parse_config_str("scenario = dance\n").unwrap_err();
        assert_eq!(e.key, "scenario");
        let e = parse_config_str("[sweep]\nstart = 0.5\nstop = 0.1\n").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (Some(3), "sweep.stop"));
        let e = parse_config_str("[circuit]\ninductance_1 = 5 nH\n").unwrap_err();
        assert_eq!(e.line, Some(1));
        let e = parse_config_str("[model]\ncutoff = 3\ncutoff = 4\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.to_string().starts_with("line 3: cutoff"));
    }

    #[test]
    fn round_trip_with_every_section() {
        let text = "scenario = design\n[model]\nomega_j = 21.5 GHz\ngamma = 3.3 MHz\n[circuit]\ninductance_1 = 5 nH\n\
                    inductance_2 = 6 nH\ncapacitance_1 = 0.0625 pF\ncapacitance_2 = 80 fF\njunction_energy = 0.5 GHz\n\
                    charging_energy = 20 GHz\nqubit_josephson = 5 GHz\nbias_voltage = 0.0434 mV\n[rabi]\nt_end = 30 ns\n\
                    [correlations]\ngamma_over_kappa = 0.05, 0.1, 0.2\n[sweep]\nspacing = log\ncount = 7\n\
                    [tolerances]\nconvergence = 0\nresonance = 1 MHz\n[output]\ndir = out/x\n";
        let cfg = parse_config_str(text).unwrap();
        let again = parse_config_str(&cfg.to_config_string()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn sweep_values() {
        let s = RunConfig::default().sweep;
        let v = s.values();
        assert_eq!(v.len(), 25);
        assert_eq!(v[0], 0.02);
        assert!((v[24] - 0.5).abs() < 1e-15);
        let log = SweepSpec { spacing: Spacing::Log, count: 3, start: 0.01, stop: 1.0, ..s };
        let v = log.values();
        assert!((v[1] - 0.1).abs() < 1e-15);
    }
}
