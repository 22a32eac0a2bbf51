use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flaf_core::{
    cost_of, documented_offset, filter_factory, measured_cost, run_experiment, Algorithm, CostModel, CostParams,
    ExperimentConfig, ExperimentResult, FilterParams,
};

use crate::bundled::Figure;
use crate::config::{load_config, parse_config};
use crate::error::{CliError, Result};
use crate::output::{write_run, write_summary, RunArtifacts};

pub const OUT_DIR_ENV: &str = "FLAF_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "flaf",
    version,
    about = "Nonlinear adaptive filter experiments and cost tables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a config file.
    Run(RunArgs),
    /// Print closed-form per-iteration costs, optionally checked against
    /// instrumented counts.
    Cost(CostArgs),
    /// Run one of the bundled learning-curve experiments and summarize it.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct ExecArgs {
    /// Output directory [default: $FLAF_OUT_DIR, else ./flaf-out]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replace the config's base seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shrink taps, iterations and runs by this factor; step sizes are
    /// rescaled to keep the same total adaptation rate.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Override the number of runs after scaling.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Override the number of iterations after scaling.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Also write the final weights of run 0.
    #[arg(long)]
    pub weights: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    /// Algorithm name, or `all`.
    #[arg(long, default_value = "all")]
    pub algorithm: String,
    /// Filter lengths, comma separated.
    #[arg(long = "m", value_delimiter = ',', default_value = "1024")]
    pub m: Vec<u64>,
    /// Trigonometric expansion length Q_t = 2P_t + 1.
    #[arg(long, default_value_t = 7)]
    pub qt: u64,
    /// Spline basis length Q_h = P_h + 1.
    #[arg(long, default_value_t = 4)]
    pub qh: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Count the arithmetic of the real filters and report the deltas.
    #[arg(long)]
    pub validate: bool,
}

pub fn execute(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Run(args) => {
            let cfg = load_config(&args.config)?;
            let (cfg, out) = prepare(cfg, &args.exec, Path::new("flaf-out"))?;
            let (result, artifacts) = run_and_write(&cfg, &out, args.exec.weights)?;
            Ok(run_report(&result, &artifacts))
        }
        Command::Reproduce(args) => {
            let cfg = parse_config(args.figure.config_text(), Path::new("."))?;
            let default_out = Path::new("flaf-out").join(args.figure.id());
            let (cfg, out) = prepare(cfg, &args.exec, &default_out)?;
            let (result, artifacts) = run_and_write(&cfg, &out, args.exec.weights)?;
            let summary = write_summary(&out, &result)?;
            let mut text = run_report(&result, &artifacts);
            let _ = writeln!(text, "wrote {}", summary.display());
            text.push('\n');
            text.push_str(&crate::output::render_summary(&result));
            Ok(text)
        }
        Command::Cost(args) => cost_table(&args),
    }
}

fn prepare(cfg: ExperimentConfig, exec: &ExecArgs, default_out: &Path) -> Result<(ExperimentConfig, PathBuf)> {
    let mut cfg = cfg.scaled(exec.scale)?;
    if let Some(seed) = exec.seed {
        cfg.base_seed = seed;
    }
    if let Some(runs) = exec.runs {
        cfg.n_runs = runs;
    }
    if let Some(iterations) = exec.iterations {
        cfg.n_iterations = iterations;
    }
    cfg.validate()?;
    let out = exec
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| default_out.to_path_buf());
    Ok((cfg, out))
}

fn run_and_write(cfg: &ExperimentConfig, out: &Path, weights: bool) -> Result<(ExperimentResult, RunArtifacts)> {
    let start = Instant::now();
    let result = run_experiment(cfg)?;
    let artifacts = write_run(out, cfg, &result, weights, start.elapsed())?;
    Ok((result, artifacts))
}

fn run_report(result: &ExperimentResult, artifacts: &RunArtifacts) -> String {
    let mut text = String::new();
    for path in artifacts
        .curve_files
        .iter()
        .chain([&artifacts.chart])
        .chain(artifacts.weights.iter())
        .chain([&artifacts.manifest])
    {
        let _ = writeln!(text, "wrote {}", path.display());
    }
    for curve in &result.curves {
        if let Some(s) = result.steady_state(curve.algorithm) {
            let _ = writeln!(text, "{:<18} steady state {:>9.3} dB", curve.algorithm.name(), s.mse_db);
        }
    }
    text
}

fn cost_algorithms(name: &str) -> Result<Vec<Algorithm>> {
    if name == "all" {
        return Ok(Algorithm::ALL.to_vec());
    }
    name.parse::<Algorithm>()
        .map(|a| vec![a])
        .map_err(|_| CliError::Config(format!("unknown algorithm `{name}`")))
}

struct CostRow {
    algorithm: Algorithm,
    m: u64,
    model: CostModel,
    measured: Option<CostModel>,
}

fn cost_table(args: &CostArgs) -> Result<String> {
    let algorithms = cost_algorithms(&args.algorithm)?;
    if args.m.is_empty() || args.m.contains(&0) {
        return Err(CliError::Config("--m needs lengths of at least 1".into()));
    }
    if args.validate && args.qh != 4 {
        return Err(CliError::Config(format!(
            "--validate needs --qh 4 (cubic spline), got {}",
            args.qh
        )));
    }
    let mut rows = Vec::new();
    for &m in &args.m {
        let params = CostParams::new(m).with_q_t(args.qt).with_q_h(args.qh);
        for &algorithm in &algorithms {
            let model = cost_of(algorithm, &params)?;
            let measured = if args.validate {
                Some(measure(algorithm, m, args.qt)?)
            } else {
                None
            };
            rows.push(CostRow {
                algorithm,
                m,
                model,
                measured,
            });
        }
    }
    Ok(match args.format {
        Format::Csv => cost_csv(&rows, args),
        Format::Text => cost_text(&rows, args),
    })
}

fn measure(algorithm: Algorithm, m: u64, q_t: u64) -> Result<CostModel> {
    let params = FilterParams {
        m_taps: m as usize,
        q_t: q_t as usize,
        ..FilterParams::memoryless_2()
    };
    let spec = filter_factory(&params, algorithm)?;
    let cost = measured_cost(&spec, 32)?;
    cost.exact().ok_or_else(|| {
        CliError::Run(flaf_core::Error::Config(format!(
            "{algorithm}: per-iteration cost varies between iterations"
        )))
    })
}

fn delta(measured: u64, model: u64) -> i64 {
    measured as i64 - model as i64
}

fn cost_csv(rows: &[CostRow], args: &CostArgs) -> String {
    let mut text = String::from("algorithm,m,q_t,q_h,multipliers,adders,trig_evals");
    if args.validate {
        text.push_str(",measured_multipliers,measured_adders,measured_trig_evals,delta_multipliers,delta_adders,delta_trig_evals,documented");
    }
    text.push('\n');
    for row in rows {
        let _ = write!(
            text,
            "{},{},{},{},{},{},{}",
            row.algorithm.name(),
            row.m,
            args.qt,
            args.qh,
            row.model.multipliers,
            row.model.adders,
            row.model.trig_evals
        );
        if let Some(meas) = row.measured {
            let offset = documented_offset(row.algorithm, row.m);
            let d = (
                delta(meas.multipliers, row.model.multipliers),
                delta(meas.adders, row.model.adders),
                delta(meas.trig_evals, row.model.trig_evals),
            );
            let ok = d == (offset.multipliers, offset.adders, offset.trig_evals);
            let _ = write!(
                text,
                ",{},{},{},{},{},{},{}",
                meas.multipliers, meas.adders, meas.trig_evals, d.0, d.1, d.2, ok
            );
        }
        text.push('\n');
    }
    text
}

fn cost_text(rows: &[CostRow], args: &CostArgs) -> String {
    let mut text = format!("per-iteration cost, Q_t = {}, Q_h = {}\n\n", args.qt, args.qh);
    let _ = write!(
        text,
        "{:<18} {:>8} {:>12} {:>12} {:>10}",
        "algorithm", "M", "multipliers", "adders", "trig"
    );
    if args.validate {
        let _ = write!(text, "   {:>10} {:>10} {:>8}  documented", "d_mult", "d_add", "d_trig");
    }
    text.push('\n');
    for row in rows {
        let _ = write!(
            text,
            "{:<18} {:>8} {:>12} {:>12} {:>10}",
            row.algorithm.name(),
            row.m,
            row.model.multipliers,
            row.model.adders,
            row.model.trig_evals
        );
        if let Some(meas) = row.measured {
            let offset = documented_offset(row.algorithm, row.m);
            let d = (
                delta(meas.multipliers, row.model.multipliers),
                delta(meas.adders, row.model.adders),
                delta(meas.trig_evals, row.model.trig_evals),
            );
            let ok = d == (offset.multipliers, offset.adders, offset.trig_evals);
            let _ = write!(
                text,
                "   {:>+10} {:>+10} {:>+8}  {}",
                d.0,
                d.1,
                d.2,
                if ok { "yes" } else { "NO" }
            );
        }
        text.push('\n');
    }
    if args.validate {
        text.push_str("\nd_* = measured - closed form; see `documented_offset` for the expected gaps.\n");
    }
    text
}
