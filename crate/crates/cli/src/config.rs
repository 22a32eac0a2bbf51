//! Experiment config files.
//!
//! TOML with fixed sections; unknown keys are rejected so typos surface as
//! errors naming the key. Example:
//!
//! ```toml
//! name = "memoryless2"
//! algorithms = ["lms", "tflaf", "single_phi_tflaf", "hbo_tflaf", "hsaf"]
//!
//! [experiment]
//! n_iterations = 40000
//! n_runs = 500
//! smoothing_taps = 20
//! base_seed = 2024
//!
//! [input]
//! variance = 0.25
//!
//! [system]
//! kind = "hammerstein"          # or "memory"
//! nonlinearity = "soft_clip"    # identity | soft_clip | loudspeaker_standin | table
//! zeta = 0.35
//! noise_variance = 0.01
//!
//! [system.fir]
//! kind = "seeded_decay"         # or "explicit" with `taps = [..]` or `file = "h.csv"`
//! length = 512
//! t60_ms = 60.0
//! sample_rate_hz = 8000.0
//! seed = 1
//!
//! [filters]
//! m_taps = 512
//! mu_lms = 0.004
//! mu_tflaf = 0.0004
//! mu_w_hbo_tflaf = 0.0006
//! mu_a_hbo_tflaf = 0.0011
//! q_t = 9
//! mu_w_hsaf = 0.0018
//! mu_q_hsaf = 0.0075
//! dx_hsaf = 0.21
//! ```

use std::path::Path;

use flaf_core::{Algorithm, ExperimentConfig, FilterParams, FirSpec, Nonlinearity, PlantSpec, SystemSpec};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    name: String,
    algorithms: Vec<String>,
    experiment: ExperimentSection,
    #[serde(default)]
    input: InputSection,
    system: SystemSection,
    filters: FiltersSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentSection {
    n_iterations: usize,
    n_runs: usize,
    #[serde(default = "default_smoothing")]
    smoothing_taps: usize,
    base_seed: u64,
    steady_state_window: Option<usize>,
}

fn default_smoothing() -> usize {
    20
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputSection {
    variance: f64,
}

impl Default for InputSection {
    fn default() -> Self {
        InputSection { variance: 0.25 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemSection {
    kind: String,
    nonlinearity: Option<String>,
    zeta: Option<f64>,
    table: Option<Vec<[f64; 2]>>,
    noise_variance: f64,
    fir: Option<FirSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FirSection {
    kind: String,
    length: Option<usize>,
    t60_ms: Option<f64>,
    sample_rate_hz: Option<f64>,
    seed: Option<u64>,
    taps: Option<Vec<f64>>,
    file: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FiltersSection {
    m_taps: usize,
    mu_lms: f64,
    mu_tflaf: f64,
    mu_w_hbo_tflaf: f64,
    mu_a_hbo_tflaf: f64,
    q_t: usize,
    mu_w_hsaf: f64,
    mu_q_hsaf: f64,
    dx_hsaf: f64,
}

fn required<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| CliError::Config(format!("missing key `{key}`")))
}

/// Parses config text. Relative FIR file paths resolve against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<ExperimentConfig> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;

    let algorithms = file
        .algorithms
        .iter()
        .map(|name| {
            name.parse::<Algorithm>()
                .map_err(|_| CliError::Config(format!("key `algorithms`: unknown algorithm `{name}`")))
        })
        .collect::<Result<Vec<_>>>()?;

    let plant = match file.system.kind.as_str() {
        "memory" => PlantSpec::Memory,
        "hammerstein" => {
            let nonlinearity = match required(file.system.nonlinearity.as_deref(), "system.nonlinearity")? {
                "identity" => Nonlinearity::Identity,
                "soft_clip" => Nonlinearity::SoftClip {
                    zeta: required(file.system.zeta, "system.zeta")?,
                },
                "loudspeaker_standin" => Nonlinearity::LoudspeakerStandin,
                "table" => Nonlinearity::Table {
                    points: required(file.system.table.clone(), "system.table")?
                        .into_iter()
                        .map(|[x, y]| (x, y))
                        .collect(),
                },
                other => {
                    return Err(CliError::Config(format!(
                        "key `system.nonlinearity`: unknown nonlinearity `{other}`"
                    )))
                }
            };
            let fir = parse_fir(required(file.system.fir, "system.fir")?, base_dir)?;
            PlantSpec::Hammerstein { nonlinearity, fir }
        }
        other => {
            return Err(CliError::Config(format!(
                "key `system.kind`: unknown system kind `{other}`"
            )))
        }
    };

    let f = file.filters;
    let cfg = ExperimentConfig {
        name: file.name,
        system: SystemSpec {
            plant,
            noise_variance: file.system.noise_variance,
        },
        input_variance: file.input.variance,
        params: FilterParams {
            m_taps: f.m_taps,
            mu_lms: f.mu_lms,
            mu_tflaf: f.mu_tflaf,
            mu_w_hbo: f.mu_w_hbo_tflaf,
            mu_a_hbo: f.mu_a_hbo_tflaf,
            q_t: f.q_t,
            mu_w_hsaf: f.mu_w_hsaf,
            mu_q_hsaf: f.mu_q_hsaf,
            dx_hsaf: f.dx_hsaf,
        },
        algorithms,
        n_iterations: file.experiment.n_iterations,
        n_runs: file.experiment.n_runs,
        smoothing_taps: file.experiment.smoothing_taps,
        base_seed: file.experiment.base_seed,
        steady_state_window: file.experiment.steady_state_window,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn parse_fir(section: FirSection, base_dir: &Path) -> Result<FirSpec> {
    match section.kind.as_str() {
        "seeded_decay" => Ok(FirSpec::SeededDecay {
            taps: required(section.length, "system.fir.length")?,
            t60_s: required(section.t60_ms, "system.fir.t60_ms")? / 1000.0,
            sample_rate_hz: required(section.sample_rate_hz, "system.fir.sample_rate_hz")?,
            seed: required(section.seed, "system.fir.seed")?,
        }),
        "explicit" => match (section.taps, section.file) {
            (Some(taps), None) => Ok(FirSpec::Explicit(taps)),
            (None, Some(file)) => Ok(FirSpec::Explicit(read_fir_csv(&base_dir.join(file))?)),
            _ => Err(CliError::Config(
                "key `system.fir`: explicit FIR needs exactly one of `taps` or `file`".into(),
            )),
        },
        other => Err(CliError::Config(format!(
            "key `system.fir.kind`: unknown FIR kind `{other}`"
        ))),
    }
}

/// Single-column CSV of FIR taps; a non-numeric first row is a header.
pub fn read_fir_csv(path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| CliError::Config(format!("FIR file {}: {e}", path.display())))?;
    let mut taps = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Config(format!("FIR file {}: {e}", path.display())))?;
        let field = record.get(0).unwrap_or("").trim();
        match field.parse::<f64>() {
            Ok(v) => taps.push(v),
            Err(_) if row == 0 => continue,
            Err(_) => {
                return Err(CliError::Config(format!(
                    "FIR file {} line {}: `{field}` is not a number",
                    path.display(),
                    row + 1
                )))
            }
        }
    }
    Ok(taps)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
