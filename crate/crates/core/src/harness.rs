//! Monte-Carlo system-identification experiments.
//!
//! Each run draws one input/desired pair from its own seeded sub-streams and
//! streams it through a freshly initialized copy of every configured filter,
//! so all algorithms see identical data within a run. Squared errors are
//! summed across runs, the ensemble mean is converted to dB
//! (`10·log₁₀ E[e²]`) and a trailing moving average smooths the curve.
//!
//! Runs execute in parallel in fixed-size chunks; chunk sums are merged in
//! chunk order, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::feb::ExpansionOrder;
use crate::filters::{
    AdaptiveFilter, Algorithm, FilterSpec, HboTflafParams, HsafGradient, HsafParams, LmsParams, NamedWeights,
    TflafMode, TflafParams,
};
use crate::systems::{generate_pair, FirSpec, InputSource, PlantSpec, SystemSpec, UnknownSystem};

const RUNS_PER_CHUNK: usize = 8;

/// One column of filter hyperparameters shared by all algorithms of an
/// experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterParams {
    pub m_taps: usize,
    pub mu_lms: f64,
    pub mu_tflaf: f64,
    pub mu_w_hbo: f64,
    pub mu_a_hbo: f64,
    /// Functional links `Q_t` of the trigonometric filters.
    pub q_t: usize,
    pub mu_w_hsaf: f64,
    pub mu_q_hsaf: f64,
    pub dx_hsaf: f64,
}

impl FilterParams {
    /// Asymmetric memoryless distortion followed by a room response.
    pub fn memoryless_1() -> Self {
        FilterParams {
            m_taps: 512,
            mu_lms: 0.002,
            mu_tflaf: 0.0005,
            mu_w_hbo: 0.0006,
            mu_a_hbo: 0.0006,
            q_t: 9,
            mu_w_hsaf: 0.0015,
            mu_q_hsaf: 0.0015,
            dx_hsaf: 0.25,
        }
    }

    /// Soft clipping followed by the same room response.
    pub fn memoryless_2() -> Self {
        FilterParams {
            m_taps: 512,
            mu_lms: 0.004,
            mu_tflaf: 0.0004,
            mu_w_hbo: 0.0006,
            mu_a_hbo: 0.0011,
            q_t: 9,
            mu_w_hsaf: 0.0018,
            mu_q_hsaf: 0.0075,
            dx_hsaf: 0.21,
        }
    }

    /// Nonlinear system with per-lag memory.
    pub fn with_memory() -> Self {
        FilterParams {
            m_taps: 8,
            mu_lms: 0.003,
            mu_tflaf: 0.0002,
            mu_w_hbo: 0.0004,
            mu_a_hbo: 0.0005,
            q_t: 7,
            mu_w_hsaf: 0.002,
            mu_q_hsaf: 0.005,
            dx_hsaf: 0.25,
        }
    }

    fn step_sizes_mut(&mut self) -> [&mut f64; 6] {
        [
            &mut self.mu_lms,
            &mut self.mu_tflaf,
            &mut self.mu_w_hbo,
            &mut self.mu_a_hbo,
            &mut self.mu_w_hsaf,
            &mut self.mu_q_hsaf,
        ]
    }
}

/// Builds the filter for `algorithm` from an experiment's parameter column
/// with the standard initialization: zero linear weights, `a = δ` for
/// HBO-TFLAF and identity-line control points for HSAF. TFLAF and
/// HBO-TFLAF carry a bias weight; LMS and HSAF do not.
pub fn filter_factory(params: &FilterParams, algorithm: Algorithm) -> Result<FilterSpec> {
    let positive = |name: &str, v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::config(format!("{name} must be positive, got {v}")))
        }
    };
    if params.m_taps == 0 {
        return Err(Error::config("m_taps must be at least 1"));
    }
    let m_taps = params.m_taps;
    let trig_order = || ExpansionOrder::from_links(params.q_t);
    Ok(match algorithm {
        Algorithm::Lms => FilterSpec::Lms(LmsParams {
            m_taps,
            mu: positive("mu_lms", params.mu_lms)?,
            bias: false,
        }),
        Algorithm::Tflaf | Algorithm::SinglePhiTflaf => FilterSpec::Tflaf(TflafParams {
            m_taps,
            mu: positive("mu_tflaf", params.mu_tflaf)?,
            order: trig_order()?,
            mode: if algorithm == Algorithm::Tflaf {
                TflafMode::Original
            } else {
                TflafMode::SinglePhi
            },
        }),
        Algorithm::HboTflaf => FilterSpec::HboTflaf(HboTflafParams {
            m_taps,
            mu_w: positive("mu_w_hbo", params.mu_w_hbo)?,
            mu_a: positive("mu_a_hbo", params.mu_a_hbo)?,
            order: trig_order()?,
        }),
        Algorithm::Hsaf => FilterSpec::Hsaf(HsafParams {
            m_taps,
            mu_w: positive("mu_w_hsaf", params.mu_w_hsaf)?,
            mu_q: positive("mu_q_hsaf", params.mu_q_hsaf)?,
            dx: positive("dx_hsaf", params.dx_hsaf)?,
            gradient: HsafGradient::SharedSpan,
        }),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub system: SystemSpec,
    pub input_variance: f64,
    pub params: FilterParams,
    pub algorithms: Vec<Algorithm>,
    pub n_iterations: usize,
    pub n_runs: usize,
    pub smoothing_taps: usize,
    pub base_seed: u64,
    /// Trailing window for steady-state summaries; `None` means the final
    /// 10% of iterations.
    pub steady_state_window: Option<usize>,
}

impl ExperimentConfig {
    fn with_defaults(name: &str, system: SystemSpec, params: FilterParams, n_iterations: usize) -> Self {
        ExperimentConfig {
            name: name.to_string(),
            system,
            input_variance: 0.25,
            params,
            algorithms: Algorithm::ALL.to_vec(),
            n_iterations,
            n_runs: 500,
            smoothing_taps: 20,
            base_seed: 2024,
            steady_state_window: None,
        }
    }

    /// Asymmetric loudspeaker stand-in into a 512-tap room response.
    pub fn memoryless_1() -> Self {
        let system = SystemSpec {
            plant: PlantSpec::Hammerstein {
                nonlinearity: crate::systems::Nonlinearity::LoudspeakerStandin,
                fir: FirSpec::room(512, 1),
            },
            noise_variance: 0.01,
        };
        Self::with_defaults("memoryless1", system, FilterParams::memoryless_1(), 40_000)
    }

    /// Soft clipper (ζ = 0.35) into the same room response.
    pub fn memoryless_2() -> Self {
        let system = SystemSpec {
            plant: PlantSpec::Hammerstein {
                nonlinearity: crate::systems::Nonlinearity::SoftClip { zeta: 0.35 },
                fir: FirSpec::room(512, 1),
            },
            noise_variance: 0.01,
        };
        Self::with_defaults("memoryless2", system, FilterParams::memoryless_2(), 40_000)
    }

    pub fn with_memory() -> Self {
        let system = SystemSpec {
            plant: PlantSpec::Memory,
            noise_variance: 0.01,
        };
        Self::with_defaults("memory", system, FilterParams::with_memory(), 100_000)
    }

    pub fn steady_state_len(&self) -> usize {
        self.steady_state_window
            .unwrap_or_else(|| (self.n_iterations / 10).max(1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 {
            return Err(Error::config("n_runs must be at least 1"));
        }
        if self.n_iterations == 0 {
            return Err(Error::config("n_iterations must be at least 1"));
        }
        if self.smoothing_taps == 0 {
            return Err(Error::config("smoothing_taps must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::config("no algorithms configured"));
        }
        let window = self.steady_state_len();
        if window == 0 || window > self.n_iterations {
            return Err(Error::config(format!(
                "steady_state_window {window} must lie in 1..={}",
                self.n_iterations
            )));
        }
        if !(self.input_variance.is_finite() && self.input_variance >= 0.0) {
            return Err(Error::config("input_variance must be non-negative"));
        }
        for &alg in &self.algorithms {
            filter_factory(&self.params, alg)?;
        }
        Ok(())
    }

    /// Shrinks (or grows) the experiment by `scale`: filter length, room
    /// response length, iteration count, run count and steady-state window
    /// are multiplied by `scale`. Step sizes are multiplied by the inverse
    /// of the realized length ratio so that `μ·M` and with it the
    /// misadjustment stays put, and convergence happens in proportionally
    /// fewer iterations.
    pub fn scaled(&self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::config(format!("scale must be positive, got {scale}")));
        }
        let resize = |n: usize| ((n as f64 * scale).round() as usize).max(1);
        let mut out = self.clone();
        if scale == 1.0 {
            return Ok(out);
        }
        out.params.m_taps = resize(self.params.m_taps);
        let ratio = self.params.m_taps as f64 / out.params.m_taps as f64;
        for mu in out.params.step_sizes_mut() {
            *mu *= ratio;
        }
        if let PlantSpec::Hammerstein {
            fir: FirSpec::SeededDecay { taps, .. },
            ..
        } = &mut out.system.plant
        {
            *taps = resize(*taps);
        }
        out.n_iterations = resize(self.n_iterations);
        out.n_runs = resize(self.n_runs);
        out.steady_state_window = self.steady_state_window.map(resize);
        Ok(out)
    }
}

/// Ensemble learning curve of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct MseCurve {
    pub algorithm: Algorithm,
    /// `10·log₁₀` of the ensemble-mean squared error, per iteration.
    pub raw_db: Vec<f64>,
    /// `raw_db` after the trailing moving average.
    pub smoothed_db: Vec<f64>,
    /// Mean squared error of each run over the steady-state window.
    pub run_steady_state: Vec<f64>,
    /// Weights at the end of run 0.
    pub final_weights: Vec<NamedWeights>,
}

/// Steady-state level with its Monte-Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub mse_db: f64,
    pub std_error_db: f64,
}

impl MseCurve {
    pub fn len(&self) -> usize {
        self.raw_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw_db.is_empty()
    }

    /// Steady-state level from the smoothed curve, and the standard error
    /// of the per-run steady-state means mapped to dB.
    pub fn steady_state(&self, window: usize) -> Result<SteadyState> {
        let mse_db = steady_state_mse(self, window)?;
        let runs = self.run_steady_state.len() as f64;
        let mean = self.run_steady_state.iter().sum::<f64>() / runs;
        let std_error_db = if runs > 1.0 {
            let var = self.run_steady_state.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (runs - 1.0);
            10.0 / std::f64::consts::LN_10 * (var / runs).sqrt() / mean
        } else {
            f64::NAN
        };
        Ok(SteadyState { mse_db, std_error_db })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub name: String,
    pub n_runs: usize,
    pub steady_state_window: usize,
    pub curves: Vec<MseCurve>,
}

impl ExperimentResult {
    pub fn curve(&self, algorithm: Algorithm) -> Option<&MseCurve> {
        self.curves.iter().find(|c| c.algorithm == algorithm)
    }

    pub fn steady_state(&self, algorithm: Algorithm) -> Option<SteadyState> {
        self.curve(algorithm)
            .and_then(|c| c.steady_state(self.steady_state_window).ok())
    }
}

/// Trailing moving average; the first `taps − 1` outputs average over the
/// samples available so far.
pub fn moving_average(raw: &[f64], taps: usize) -> Vec<f64> {
    let taps = taps.max(1);
    (0..raw.len())
        .map(|k| {
            let window = &raw[(k + 1).saturating_sub(taps)..=k];
            window.iter().sum::<f64>() / window.len() as f64
        })
        .collect()
}

/// Mean of the last `window` smoothed values, in dB.
pub fn steady_state_mse(curve: &MseCurve, window: usize) -> Result<f64> {
    if window == 0 || window > curve.smoothed_db.len() {
        return Err(Error::config(format!(
            "steady-state window {window} must lie in 1..={}",
            curve.smoothed_db.len()
        )));
    }
    let tail = &curve.smoothed_db[curve.smoothed_db.len() - window..];
    Ok(tail.iter().sum::<f64>() / window as f64)
}

struct Accumulator {
    sq_err: Vec<Vec<f64>>,
    steady: Vec<Vec<f64>>,
    first_run_weights: Option<Vec<Vec<NamedWeights>>>,
}

impl Accumulator {
    fn new(n_alg: usize, n_iter: usize) -> Self {
        Accumulator {
            sq_err: vec![vec![0.0; n_iter]; n_alg],
            steady: vec![Vec::new(); n_alg],
            first_run_weights: None,
        }
    }

    fn merge(&mut self, other: Accumulator) {
        for (dst, src) in self.sq_err.iter_mut().zip(other.sq_err) {
            dst.iter_mut().zip(src).for_each(|(d, s)| *d += s);
        }
        for (dst, src) in self.steady.iter_mut().zip(other.steady) {
            dst.extend(src);
        }
        if self.first_run_weights.is_none() {
            self.first_run_weights = other.first_run_weights;
        }
    }
}

fn run_one(
    run: usize,
    cfg: &ExperimentConfig,
    system: &UnknownSystem,
    specs: &[FilterSpec],
    acc: &mut Accumulator,
) -> Result<()> {
    let source = InputSource::new(cfg.input_variance, cfg.base_seed).with_stream(run as u64);
    let pair = generate_pair(system, &source, cfg.n_iterations)?;
    let window_start = cfg.n_iterations - cfg.steady_state_len();
    for (idx, spec) in specs.iter().enumerate() {
        let mut filter: Box<dyn AdaptiveFilter> = spec.build()?;
        let sums = &mut acc.sq_err[idx];
        let mut steady = 0.0;
        for (n, (&x, &d)) in pair.x.iter().zip(&pair.d).enumerate() {
            let out = filter.step(x, d).map_err(|err| match err {
                Error::Divergence {
                    algorithm, iteration, ..
                } => Error::Divergence {
                    algorithm,
                    run: Some(run as u64),
                    iteration,
                },
                other => other,
            })?;
            let e2 = out.e * out.e;
            sums[n] += e2;
            if n >= window_start {
                steady += e2;
            }
        }
        acc.steady[idx].push(steady / cfg.steady_state_len() as f64);
        if run == 0 {
            acc.first_run_weights
                .get_or_insert_with(Vec::new)
                .push(filter.weight_snapshot());
        }
    }
    Ok(())
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let system = cfg.system.build()?;
    let specs: Vec<FilterSpec> = cfg
        .algorithms
        .iter()
        .map(|&alg| filter_factory(&cfg.params, alg))
        .collect::<Result<_>>()?;

    let n_chunks = cfg.n_runs.div_ceil(RUNS_PER_CHUNK);
    let partials: Vec<Accumulator> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = Accumulator::new(specs.len(), cfg.n_iterations);
            let first = chunk * RUNS_PER_CHUNK;
            let last = (first + RUNS_PER_CHUNK).min(cfg.n_runs);
            for run in first..last {
                run_one(run, cfg, &system, &specs, &mut acc)?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;

    let mut total = Accumulator::new(specs.len(), cfg.n_iterations);
    for part in partials {
        total.merge(part);
    }

    let runs = cfg.n_runs as f64;
    let weights = total.first_run_weights.unwrap_or_default();
    let curves = cfg
        .algorithms
        .iter()
        .zip(total.sq_err)
        .zip(total.steady)
        .zip(weights)
        .map(|(((&algorithm, sums), run_steady_state), final_weights)| {
            let raw_db: Vec<f64> = sums.iter().map(|s| 10.0 * (s / runs).log10()).collect();
            let smoothed_db = moving_average(&raw_db, cfg.smoothing_taps);
            MseCurve {
                algorithm,
                raw_db,
                smoothed_db,
                run_steady_state,
                final_weights,
            }
        })
        .collect();

    Ok(ExperimentResult {
        name: cfg.name.clone(),
        n_runs: cfg.n_runs,
        steady_state_window: cfg.steady_state_len(),
        curves,
    })
}
