//! Command-line front end: JSON configuration in SI units, CSV tables and a
//! JSON run manifest out.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 unparsable configuration,
//! 3 invalid configuration, 4 numerical gate failure.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::clock::{
    prepare_twin, sweep, ClockError, InitialState, ScenarioConfig, ScenarioResult, SweepVariable,
    DEFAULT_RESIDUAL_GATE,
};
use crate::gauss::{extract_params, INTERIOR_MARGIN};
use crate::metrology::{phase_qfi, qfi_change_pct};
use crate::modes::{
    junction_map, write_dump, BogoliubovMap, MapOptions, MapVariant, ModeError, TrajectoryMapper,
};
use crate::quadrature::QuadratureOptions;
use crate::units::{acceleration_to_si, natural_to_seconds};

/// Column order of `twin_results.csv` and `sweep_results.csv`.
pub const CSV_COLUMNS: [&str; 18] = [
    "h",
    "L_m",
    "a_mps2",
    "t_a_s",
    "t_i_s",
    "reps",
    "tau_alice_s",
    "tau_rob_point_s",
    "tau_rob_classical_s",
    "theta_full_rad",
    "theta_mm_rad",
    "phase_diff_rad",
    "pc_fraction_pct",
    "qfi_before",
    "qfi_after",
    "qfi_after_mm",
    "qfi_change_pct",
    "config_digest",
];

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
    #[error("cannot parse configuration: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("numerical gate failed: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    fn io(context: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

impl From<ClockError> for CliError {
    fn from(e: ClockError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<ModeError> for CliError {
    fn from(e: ModeError) -> Self {
        ClockError::from(e).into()
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "relclock",
    version,
    about = "Accelerated cavity clock simulator"
)]
pub struct Cli {
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Reserved; every computation is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct IoArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output.dir` of the configuration.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Coherent,
    SqueezedVacuum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DumpTarget {
    /// Minkowski to Rindler change of basis for the scenario's `h`.
    Junction,
    /// One repetition of the trajectory.
    Block,
    /// The whole trajectory.
    Trajectory,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scenario once; writes twin_results.csv and manifest.json.
    Twin(IoArgs),
    /// Run the scenario over the configured grid; writes sweep_results.csv.
    Sweep(IoArgs),
    /// Print the phase QFI of a single-mode state.
    Qfi {
        #[arg(long, value_enum)]
        state: StateKind,
        #[arg(long)]
        mean_n: f64,
        #[arg(long, default_value_t = 0.0)]
        phase: f64,
    },
    /// Write a Bogoliubov map as text; writes bogoliubov_map.txt.
    Bogo {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum, default_value_t = DumpTarget::Junction)]
        map: DumpTarget,
    },
    /// Run invariant self-checks and print their residuals.
    Check {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub schema: u64,
    pub units: String,
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    /// Seconds.
    pub t_a: f64,
    /// Seconds.
    #[serde(default)]
    pub t_i: f64,
    /// Meters.
    #[serde(rename = "L")]
    pub length: f64,
    /// m/s².
    pub a: f64,
    pub repetitions: usize,
    #[serde(default = "default_clock_mode")]
    pub clock_mode: usize,
    pub initial_state: StateSection,
}

fn default_clock_mode() -> usize {
    1
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSection {
    Coherent {
        amplitude: f64,
        #[serde(default)]
        phase: f64,
    },
    SqueezedVacuum {
        mean_n: f64,
        #[serde(default)]
        phase: f64,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_gate")]
    pub residual_gate: f64,
    #[serde(default = "default_enforce")]
    pub enforce_gate: bool,
}

fn default_n_max() -> usize {
    20
}

fn default_gate() -> f64 {
    DEFAULT_RESIDUAL_GATE
}

fn default_enforce() -> bool {
    true
}

impl Default for NumericsSection {
    fn default() -> Self {
        Self {
            n_max: default_n_max(),
            residual_gate: default_gate(),
            enforce_gate: default_enforce(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
pub enum SweepVary {
    #[serde(rename = "L")]
    Length,
    #[serde(rename = "h")]
    H,
    #[serde(rename = "mean_n")]
    MeanN,
    #[serde(rename = "theta0")]
    Theta0,
}

impl From<SweepVary> for SweepVariable {
    fn from(v: SweepVary) -> Self {
        match v {
            SweepVary::Length => SweepVariable::Length,
            SweepVary::H => SweepVariable::H,
            SweepVary::MeanN => SweepVariable::MeanN,
            SweepVary::Theta0 => SweepVariable::Theta0,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub vary: SweepVary,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

/// A parsed configuration and the digest of its canonical form.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub document: ConfigDocument,
    pub digest: String,
}

/// SHA-256 of the document with object keys sorted, so reordering keys
/// does not change it.
pub fn config_digest(value: &serde_json::Value) -> String {
    // serde_json's map is ordered by key, so serialization is canonical.
    let canonical = serde_json::to_string(value).expect("JSON values always serialize");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn parse_config(text: &str) -> Result<LoadedConfig, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let digest = config_digest(&value);
    let document: ConfigDocument =
        serde_json::from_value(value).map_err(|e| CliError::Parse(e.to_string()))?;
    if document.schema != SCHEMA_VERSION {
        return Err(CliError::Validation(format!(
            "unsupported schema {}; expected {SCHEMA_VERSION}",
            document.schema
        )));
    }
    if document.units != "SI" {
        return Err(CliError::Validation(format!(
            "units must be \"SI\", got {:?}",
            document.units
        )));
    }
    Ok(LoadedConfig { document, digest })
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, CliError> {
    let text =
        fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))?;
    parse_config(&text)
}

impl ConfigDocument {
    /// Scenario in natural units. Values are not yet validated.
    pub fn scenario_config(&self) -> ScenarioConfig {
        let s = &self.scenario;
        let initial_state = match s.initial_state {
            StateSection::Coherent { amplitude, phase } => {
                InitialState::Coherent { amplitude, phase }
            }
            StateSection::SqueezedVacuum { mean_n, phase } => {
                InitialState::SqueezedVacuum { mean_n, phase }
            }
        };
        let mut config = ScenarioConfig::from_si(
            s.t_a,
            s.t_i,
            s.length,
            s.a,
            s.repetitions,
            s.clock_mode,
            self.numerics.n_max,
            initial_state,
        );
        config.residual_gate = self.numerics.residual_gate;
        config.enforce_gate = self.numerics.enforce_gate;
        config
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointError {
    pub index: usize,
    pub value: f64,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config_digest: String,
    pub tool_version: String,
    pub timestamp: u64,
    pub command: String,
    pub n_max: usize,
    /// Junction residuals `[ε₁, ε₂]` per evaluated point.
    pub symplectic_residuals: Vec<[f64; 2]>,
    pub warnings: Vec<String>,
    pub point_errors: Vec<PointError>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    fn new(command: &str, loaded: &LoadedConfig) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            config_digest: loaded.digest.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
            command: command.to_string(),
            n_max: loaded.document.numerics.n_max,
            symplectic_residuals: Vec::new(),
            warnings: Vec::new(),
            point_errors: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn record(&mut self, label: &str, config: &ScenarioConfig, result: &ScenarioResult) {
        let (e1, e2) = result.junction_residual;
        self.symplectic_residuals.push([e1, e2]);
        if result.artanh_clipped {
            self.warnings.push(format!(
                "{label}: squeezing extraction clipped near artanh(1)"
            ));
        }
        let worst = e1.max(e2);
        if worst > config.residual_gate {
            self.warnings.push(format!(
                "{label}: junction residual {worst:e} exceeds gate {:e}",
                config.residual_gate
            ));
        }
    }
}

/// One CSV row in [`CSV_COLUMNS`] order.
pub fn csv_row(config: &ScenarioConfig, result: &ScenarioResult, digest: &str) -> Vec<String> {
    let qfi_change = qfi_change_pct(result.qfi_before, result.qfi_after)
        .map(|v| v.to_string())
        .unwrap_or_else(|_| "NaN".to_string());
    let f = |v: f64| v.to_string();
    vec![
        f(result.h),
        f(config.length),
        f(acceleration_to_si(config.acceleration)),
        f(natural_to_seconds(config.t_a)),
        f(natural_to_seconds(config.t_i)),
        config.repetitions.to_string(),
        f(natural_to_seconds(result.tau_alice)),
        f(natural_to_seconds(result.tau_rob_pointlike)),
        f(natural_to_seconds(result.tau_rob_classical_extended)),
        f(result.theta_full),
        f(result.theta_mm_only),
        f(result.phase_difference_vs_alice),
        f(result.pc_fraction),
        f(result.qfi_before),
        f(result.qfi_after),
        f(result.qfi_after_mm_only),
        qfi_change,
        digest.to_string(),
    ]
}

fn write_csv(path: &Path, rows: &[Vec<String>]) -> Result<(), CliError> {
    let context = format!("writing {}", path.display());
    let mut writer = csv::Writer::from_path(path).map_err(|e| CliError::Io {
        context: context.clone(),
        source: e.into(),
    })?;
    let mut write = |record: &[&str]| {
        writer.write_record(record).map_err(|e| CliError::Io {
            context: context.clone(),
            source: e.into(),
        })
    };
    write(&CSV_COLUMNS)?;
    for row in rows {
        let fields: Vec<&str> = row.iter().map(String::as_str).collect();
        write(&fields)?;
    }
    writer.flush().map_err(CliError::io(context))
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(manifest).expect("manifest always serializes");
    fs::write(&path, text + "\n").map_err(CliError::io(format!("writing {}", path.display())))
}

fn output_dir(args: &IoArgs, loaded: &LoadedConfig) -> Result<PathBuf, CliError> {
    let dir = args
        .out
        .clone()
        .or_else(|| loaded.document.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
    Ok(dir)
}

fn run_twin_command(args: &IoArgs) -> Result<(), CliError> {
    let loaded = load_config(&args.config)?;
    let config = loaded.document.scenario_config();
    let prepared = prepare_twin(&config)?;
    let result = prepared.evaluate(&config.initial_state)?;
    let dir = output_dir(args, &loaded)?;

    let mut manifest = RunManifest::new("twin", &loaded);
    manifest.record("twin", &config, &result);
    write_csv(
        &dir.join("twin_results.csv"),
        &[csv_row(&config, &result, &loaded.digest)],
    )?;
    manifest.outputs.push("twin_results.csv".into());
    write_manifest(&dir, &manifest)?;
    println!(
        "tau_alice_s={} tau_rob_point_s={} tau_rob_classical_s={} phase_diff_rad={}",
        natural_to_seconds(result.tau_alice),
        natural_to_seconds(result.tau_rob_pointlike),
        natural_to_seconds(result.tau_rob_classical_extended),
        result.phase_difference_vs_alice
    );
    Ok(())
}

fn run_sweep_command(args: &IoArgs) -> Result<(), CliError> {
    let loaded = load_config(&args.config)?;
    let section = loaded
        .document
        .sweep
        .clone()
        .ok_or_else(|| CliError::Validation("configuration has no `sweep` section".into()))?;
    let template = loaded.document.scenario_config();
    let vary = SweepVariable::from(section.vary);
    let results = sweep(&template, vary, &section.grid)?;
    let dir = output_dir(args, &loaded)?;

    let mut manifest = RunManifest::new("sweep", &loaded);
    let mut rows = Vec::new();
    let mut first_error = None;
    for (index, (value, outcome)) in section.grid.iter().zip(results).enumerate() {
        let config = vary.apply(&template, *value);
        match outcome {
            Ok(result) => {
                manifest.record(&format!("point {index}"), &config, &result);
                rows.push(csv_row(&config, &result, &loaded.digest));
            }
            Err(e) => {
                log::warn!("sweep point {index} ({value}) failed: {e}");
                manifest.point_errors.push(PointError {
                    index,
                    value: *value,
                    error: e.to_string(),
                });
                first_error.get_or_insert(e);
            }
        }
    }
    write_csv(&dir.join("sweep_results.csv"), &rows)?;
    manifest.outputs.push("sweep_results.csv".into());
    write_manifest(&dir, &manifest)?;
    println!("{} of {} points written", rows.len(), section.grid.len());
    match first_error {
        Some(e) if rows.is_empty() => Err(e.into()),
        _ => Ok(()),
    }
}

fn run_qfi_command(state: StateKind, mean_n: f64, phase: f64) -> Result<(), CliError> {
    let initial = match state {
        StateKind::Coherent => InitialState::Coherent {
            amplitude: mean_n.max(0.0).sqrt(),
            phase,
        },
        StateKind::SqueezedVacuum => InitialState::SqueezedVacuum { mean_n, phase },
    };
    if !(mean_n >= 0.0) || !mean_n.is_finite() {
        return Err(CliError::Validation(format!(
            "mean_n {mean_n} must be non-negative"
        )));
    }
    let gaussian = initial
        .state()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let params = extract_params(&gaussian).map_err(|e| CliError::Validation(e.to_string()))?;
    println!("{}", phase_qfi(&params));
    Ok(())
}

fn run_bogo_command(io: &IoArgs, target: DumpTarget) -> Result<(), CliError> {
    let loaded = load_config(&io.config)?;
    let config = loaded.document.scenario_config();
    config.validate()?;
    let options = MapOptions {
        quadrature: QuadratureOptions::default(),
        variant: MapVariant::Full,
    };
    let map = match target {
        DumpTarget::Junction => junction_map(config.h(), config.n_max, &options.quadrature)?,
        DumpTarget::Block | DumpTarget::Trajectory => {
            let prepared = prepare_twin(&config)?;
            if target == DumpTarget::Block {
                prepared.block_map(MapVariant::Full).clone()
            } else {
                prepared.map_full().clone()
            }
        }
    };
    let dir = output_dir(io, &loaded)?;
    let path = dir.join("bogoliubov_map.txt");
    let context = format!("writing {}", path.display());
    let file = fs::File::create(&path).map_err(CliError::io(context.clone()))?;
    let mut out = BufWriter::new(file);
    write_dump(&map, config.h(), &mut out).map_err(CliError::io(context.clone()))?;
    out.flush().map_err(CliError::io(context))?;

    let mut manifest = RunManifest::new("bogo", &loaded);
    let (e1, e2) = map.symplectic_residual(config.clock_mode + INTERIOR_MARGIN);
    manifest.symplectic_residuals.push([e1, e2]);
    manifest.outputs.push("bogoliubov_map.txt".into());
    write_manifest(&dir, &manifest)
}

/// Invariant self-checks: `(name, residual, tolerance)`.
pub fn self_checks(config: Option<&ScenarioConfig>) -> Result<Vec<(String, f64, f64)>, CliError> {
    let mut checks = Vec::new();
    let n = config.map(|c| c.n_max).unwrap_or(10);
    let interior = config.map(|c| c.clock_mode + INTERIOR_MARGIN).unwrap_or(5);
    let identity = BogoliubovMap::identity(n);
    let (e1, e2) = identity.symplectic_residual(interior);
    checks.push(("identity_eps1".to_string(), e1, 0.0));
    checks.push(("identity_eps2".to_string(), e2, 0.0));

    let h = config.map(|c| c.h()).filter(|&h| h > 0.0).unwrap_or(0.01);
    let junction = junction_map(h, n, &QuadratureOptions::default())?;
    let (e1, e2) = junction.symplectic_residual(interior);
    let gate = config
        .map(|c| c.residual_gate)
        .unwrap_or(DEFAULT_RESIDUAL_GATE);
    checks.push((format!("junction_eps1(h={h})"), e1, gate));
    checks.push((format!("junction_eps2(h={h})"), e2, gate));

    let length = config.map(|c| c.length).unwrap_or(1.0);
    let a = h / length;
    let mut mapper = TrajectoryMapper::new(length, n, MapOptions::default())?;
    let forward = mapper.junction(a)?;
    let back = mapper.junction(-a)?.mirrored();
    checks.push((
        "mirror_involution".to_string(),
        back.max_abs_diff(&forward),
        0.0,
    ));
    let round_trip = junction.inverse().after(&junction)?;
    let interior_diff = (0..interior)
        .flat_map(|i| (0..interior).map(move |j| (i, j)))
        .map(|(i, j)| {
            let expected = if i == j { 1.0 } else { 0.0 };
            (round_trip.alpha()[(i, j)].re - expected)
                .abs()
                .max(round_trip.alpha()[(i, j)].im.abs())
                .max(round_trip.beta()[(i, j)].norm())
        })
        .fold(0.0, f64::max);
    checks.push((
        "junction_inverse_roundtrip".to_string(),
        interior_diff,
        gate,
    ));
    Ok(checks)
}

fn run_check_command(config: Option<&Path>) -> Result<(), CliError> {
    let scenario = match config {
        Some(path) => {
            let c = load_config(path)?.document.scenario_config();
            c.validate()?;
            Some(c)
        }
        None => None,
    };
    let mut failed = Vec::new();
    for (name, residual, tolerance) in self_checks(scenario.as_ref())? {
        let ok = residual <= tolerance;
        println!("{name} {residual:e} {}", if ok { "ok" } else { "FAIL" });
        if !ok {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "checks failed: {}",
            failed.join(", ")
        )))
    }
}

fn dispatch(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Twin(args) => run_twin_command(args),
        Command::Sweep(args) => run_sweep_command(args),
        Command::Qfi {
            state,
            mean_n,
            phase,
        } => run_qfi_command(*state, *mean_n, *phase),
        Command::Bogo { io, map } => run_bogo_command(io, *map),
        Command::Check { config } => run_check_command(config.as_deref()),
    }
}

/// Run a parsed command line on a pool of `cli.threads` workers.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.seed.is_some() {
        log::info!("--seed is ignored: the pipeline is deterministic");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(&cli.command))
}
