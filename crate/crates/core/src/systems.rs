//! Reference plants that produce the desired signal for identification.
//!
//! Two plant shapes are provided: a Hammerstein cascade (pointwise
//! nonlinearity, then FIR) and a fixed nonlinear system with per-lag memory
//!
//! ```text
//! d(n) = 0.6 sin³(πx(n)) + 0.2 cos²(2πx(n−2)) − 0.1 cos(4πx(n−4)) + 1.125
//! ```
//!
//! Both add white Gaussian observation noise.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, StreamPurpose};

/// Soft clipper with threshold `ζ`:
///
/// ```text
/// |x| ≤ ζ        →  2x / 3ζ
/// ζ < |x| ≤ 2ζ   →  sign(x) · (3 − (2 − |x|/ζ)²) / 3
/// |x| > 2ζ       →  sign(x)
/// ```
///
/// Continuous with continuous slope, odd, and saturating at ±1.
pub fn soft_clip(x: f64, zeta: f64) -> f64 {
    let ax = x.abs();
    if ax <= zeta {
        2.0 * x / (3.0 * zeta)
    } else if ax <= 2.0 * zeta {
        let r = 2.0 - ax / zeta;
        x.signum() * (3.0 - r * r) / 3.0
    } else {
        x.signum()
    }
}

/// Asymmetric loudspeaker-style distortion used in place of a measured
/// loudspeaker model: `b = 1.5x − 0.3x²`, `y = 2/(1 + e^{−ρb}) − 1` with
/// `ρ = 4` for `b > 0` and `ρ = 0.5` otherwise.
///
/// Not canonical; it only reproduces the qualitative character (memoryless,
/// asymmetric, saturating).
pub fn loudspeaker_standin(x: f64) -> f64 {
    let b = 1.5 * x - 0.3 * x * x;
    let rho = if b > 0.0 { 4.0 } else { 0.5 };
    2.0 / (1.0 + (-rho * b).exp()) - 1.0
}

/// Pointwise memoryless nonlinearity.
#[derive(Debug, Clone, PartialEq)]
pub enum Nonlinearity {
    Identity,
    SoftClip {
        zeta: f64,
    },
    LoudspeakerStandin,
    /// Piecewise-linear table through `(x, y)` points sorted by `x`, held
    /// constant outside its range.
    Table {
        points: Vec<(f64, f64)>,
    },
}

impl Nonlinearity {
    pub fn validate(&self) -> Result<()> {
        match self {
            Nonlinearity::SoftClip { zeta } if !(zeta.is_finite() && *zeta > 0.0) => Err(Error::config(format!(
                "soft clip threshold must be positive, got {zeta}"
            ))),
            Nonlinearity::Table { points } => {
                if points.is_empty() {
                    return Err(Error::config("nonlinearity table is empty"));
                }
                if points.windows(2).any(|p| p[1].0 <= p[0].0) {
                    return Err(Error::config("nonlinearity table abscissae must increase"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Nonlinearity::Identity => x,
            Nonlinearity::SoftClip { zeta } => soft_clip(x, *zeta),
            Nonlinearity::LoudspeakerStandin => loudspeaker_standin(x),
            Nonlinearity::Table { points } => {
                let idx = points.partition_point(|p| p.0 <= x);
                if idx == 0 {
                    points[0].1
                } else if idx == points.len() {
                    points[points.len() - 1].1
                } else {
                    let (x0, y0) = points[idx - 1];
                    let (x1, y1) = points[idx];
                    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                }
            }
        }
    }
}

/// How to obtain the FIR stage of a Hammerstein plant.
#[derive(Debug, Clone, PartialEq)]
pub enum FirSpec {
    Explicit(Vec<f64>),
    /// Gaussian taps under an exponential envelope that falls 60 dB in
    /// `t60_s` seconds at `sample_rate_hz`, normalized to unit energy.
    SeededDecay {
        taps: usize,
        t60_s: f64,
        sample_rate_hz: f64,
        seed: u64,
    },
}

impl FirSpec {
    /// Room-like response: T60 = 60 ms at 8 kHz.
    pub fn room(taps: usize, seed: u64) -> Self {
        FirSpec::SeededDecay {
            taps,
            t60_s: 0.060,
            sample_rate_hz: 8000.0,
            seed,
        }
    }
}

pub fn make_fir(spec: &FirSpec) -> Result<Vec<f64>> {
    match spec {
        FirSpec::Explicit(taps) => {
            if taps.is_empty() {
                return Err(Error::config("FIR needs at least one tap"));
            }
            if taps.iter().any(|t| !t.is_finite()) {
                return Err(Error::config("FIR taps must be finite"));
            }
            Ok(taps.clone())
        }
        &FirSpec::SeededDecay {
            taps,
            t60_s,
            sample_rate_hz,
            seed,
        } => {
            if taps == 0 {
                return Err(Error::config("FIR needs at least one tap"));
            }
            if !(t60_s > 0.0 && sample_rate_hz > 0.0) {
                return Err(Error::config("decay time and sample rate must be positive"));
            }
            let mut rng = stream_rng(seed, u64::MAX / 2, StreamPurpose::Input);
            // amplitude falls by 10^(-3) over t60
            let per_sample = -3.0 * std::f64::consts::LN_10 / (t60_s * sample_rate_hz);
            let mut h: Vec<f64> = (0..taps)
                .map(|k| {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    g * (per_sample * k as f64).exp()
                })
                .collect();
            let norm = h.iter().map(|v| v * v).sum::<f64>().sqrt();
            h.iter_mut().for_each(|v| *v /= norm);
            Ok(h)
        }
    }
}

/// The memory plant evaluated on a newest-first history. Missing lags read
/// as zero.
pub fn eval_memory_system(history: &[f64]) -> f64 {
    let lag = |k: usize| history.get(k).copied().unwrap_or(0.0);
    let current = (PI * lag(0)).sin();
    let second = (2.0 * PI * lag(2)).cos();
    0.6 * current * current * current + 0.2 * second * second - 0.1 * (4.0 * PI * lag(4)).cos() + 1.125
}

#[derive(Debug, Clone, PartialEq)]
pub enum Plant {
    Hammerstein { nonlinearity: Nonlinearity, fir: Vec<f64> },
    Memory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnknownSystem {
    pub plant: Plant,
    pub noise_variance: f64,
}

impl UnknownSystem {
    pub fn hammerstein(nonlinearity: Nonlinearity, fir: Vec<f64>, noise_variance: f64) -> Self {
        UnknownSystem {
            plant: Plant::Hammerstein { nonlinearity, fir },
            noise_variance,
        }
    }

    pub fn memory(noise_variance: f64) -> Self {
        UnknownSystem {
            plant: Plant::Memory,
            noise_variance,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_variance.is_finite() && self.noise_variance >= 0.0) {
            return Err(Error::config(format!(
                "noise variance must be non-negative, got {}",
                self.noise_variance
            )));
        }
        if let Plant::Hammerstein { nonlinearity, fir } = &self.plant {
            nonlinearity.validate()?;
            if fir.is_empty() {
                return Err(Error::config("FIR needs at least one tap"));
            }
        }
        Ok(())
    }

    /// Noise-free plant output for the whole input sequence.
    pub fn respond(&self, x: &[f64]) -> Vec<f64> {
        match &self.plant {
            Plant::Hammerstein { nonlinearity, fir } => {
                let f: Vec<f64> = x.iter().map(|&v| nonlinearity.apply(v)).collect();
                (0..f.len())
                    .map(|n| fir.iter().zip(f[..=n].iter().rev()).map(|(h, v)| h * v).sum())
                    .collect()
            }
            Plant::Memory => {
                let mut hist = [0.0; 5];
                x.iter()
                    .map(|&v| {
                        hist.rotate_right(1);
                        hist[0] = v;
                        eval_memory_system(&hist)
                    })
                    .collect()
            }
        }
    }
}

/// Plant description before the FIR is materialized.
#[derive(Debug, Clone, PartialEq)]
pub enum PlantSpec {
    Hammerstein { nonlinearity: Nonlinearity, fir: FirSpec },
    Memory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub plant: PlantSpec,
    pub noise_variance: f64,
}

impl SystemSpec {
    pub fn build(&self) -> Result<UnknownSystem> {
        let plant = match &self.plant {
            PlantSpec::Hammerstein { nonlinearity, fir } => Plant::Hammerstein {
                nonlinearity: nonlinearity.clone(),
                fir: make_fir(fir)?,
            },
            PlantSpec::Memory => Plant::Memory,
        };
        let system = UnknownSystem {
            plant,
            noise_variance: self.noise_variance,
        };
        system.validate()?;
        Ok(system)
    }
}

/// White Gaussian input of the given variance, drawn from sub-stream
/// `stream` of `seed`. The observation noise uses the paired noise stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputSource {
    pub variance: f64,
    pub seed: u64,
    pub stream: u64,
}

impl InputSource {
    pub fn new(variance: f64, seed: u64) -> Self {
        InputSource {
            variance,
            seed,
            stream: 0,
        }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        InputSource { stream, ..self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalPair {
    pub x: Vec<f64>,
    pub d: Vec<f64>,
}

fn gaussian(rng: &mut impl Rng, n: usize, std_dev: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            std_dev * z
        })
        .collect()
}

pub fn generate_pair(system: &UnknownSystem, source: &InputSource, n_samples: usize) -> Result<SignalPair> {
    if n_samples == 0 {
        return Err(Error::config("need at least one sample"));
    }
    if !(source.variance.is_finite() && source.variance >= 0.0) {
        return Err(Error::config(format!(
            "input variance must be non-negative, got {}",
            source.variance
        )));
    }
    system.validate()?;

    let mut input_rng = stream_rng(source.seed, source.stream, StreamPurpose::Input);
    let x = gaussian(&mut input_rng, n_samples, source.variance.sqrt());
    let mut d = system.respond(&x);
    if system.noise_variance > 0.0 {
        let mut noise_rng = stream_rng(source.seed, source.stream, StreamPurpose::Noise);
        let noise = gaussian(&mut noise_rng, n_samples, system.noise_variance.sqrt());
        d.iter_mut().zip(noise).for_each(|(d, v)| *d += v);
    }
    Ok(SignalPair { x, d })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_plant_passes_input() {
        let sys = UnknownSystem::hammerstein(Nonlinearity::Identity, vec![1.0], 0.0);
        let pair = generate_pair(&sys, &InputSource::new(0.25, 3), 256).unwrap();
        assert_eq!(pair.x, pair.d);
    }

    #[test]
    fn memory_plant_zero_input() {
        let sys = UnknownSystem::memory(0.0);
        let d = sys.respond(&[0.0; 10]);
        assert!(d.iter().all(|&v| (v - 1.225).abs() < 1e-15));
        assert!((eval_memory_system(&[0.0; 5]) - 1.225).abs() < 1e-15);
    }

    #[test]
    fn memory_plant_hand_values() {
        assert!((eval_memory_system(&[0.5, 0.0, 0.0, 0.0, 0.0]) - 1.825).abs() < 1e-14);
        assert!((eval_memory_system(&[0.0, 0.0, 0.0, 0.0, 0.25]) - 1.425).abs() < 1e-14);
        // zero padding for missing lags
        assert!((eval_memory_system(&[0.5]) - 1.825).abs() < 1e-14);
    }

    #[test]
    fn memory_plant_ignores_odd_lags() {
        let base = [0.3, 0.0, -0.2, 0.0, 0.7];
        let mut poked = base;
        poked[1] = 0.9;
        poked[3] = -0.4;
        assert_eq!(eval_memory_system(&base), eval_memory_system(&poked));
    }

    #[test]
    fn soft_clip_shape() {
        let z = 0.35;
        assert_eq!(soft_clip(0.0, z), 0.0);
        assert_eq!(soft_clip(5.0, z), 1.0);
        let mut prev = soft_clip(-2.0, z);
        for k in 1..=4000 {
            let x = -2.0 + 4.0 * k as f64 / 4000.0;
            let v = soft_clip(x, z);
            assert!(v >= prev, "not monotone at {x}");
            assert_eq!(soft_clip(-x, z), -v);
            prev = v;
        }
        // continuous at both knees
        for knee in [z, 2.0 * z] {
            assert!((soft_clip(knee - 1e-12, z) - soft_clip(knee + 1e-12, z)).abs() < 1e-10);
        }
    }

    #[test]
    fn loudspeaker_is_asymmetric_and_bounded() {
        assert_eq!(loudspeaker_standin(0.0), 0.0);
        assert!(loudspeaker_standin(0.5) > -loudspeaker_standin(-0.5));
        for k in -100..=100 {
            let v = loudspeaker_standin(k as f64 / 20.0);
            assert!((-1.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn table_interpolates_and_holds() {
        let nl = Nonlinearity::Table {
            points: vec![(-1.0, -2.0), (0.0, 0.0), (1.0, 1.0)],
        };
        nl.validate().unwrap();
        assert_eq!(nl.apply(-0.5), -1.0);
        assert_eq!(nl.apply(0.5), 0.5);
        assert_eq!(nl.apply(3.0), 1.0);
        assert_eq!(nl.apply(-3.0), -2.0);
        assert!(Nonlinearity::Table {
            points: vec![(1.0, 0.0), (0.0, 0.0)]
        }
        .validate()
        .is_err());
    }

    #[test]
    fn fir_contracts() {
        assert_eq!(make_fir(&FirSpec::Explicit(vec![1.0])).unwrap(), vec![1.0]);
        let h = make_fir(&FirSpec::room(512, 9)).unwrap();
        assert_eq!(h.len(), 512);
        let energy: f64 = h.iter().map(|v| v * v).sum();
        assert!((energy - 1.0).abs() < 1e-12);
        assert_eq!(h, make_fir(&FirSpec::room(512, 9)).unwrap());
        assert_ne!(h, make_fir(&FirSpec::room(512, 10)).unwrap());
        // the envelope decays: late taps carry far less energy than early ones
        let early: f64 = h[..64].iter().map(|v| v * v).sum();
        let late: f64 = h[448..].iter().map(|v| v * v).sum();
        assert!(late < early / 100.0);
    }

    #[test]
    fn hammerstein_applies_nonlinearity_before_fir() {
        let sys = UnknownSystem::hammerstein(Nonlinearity::SoftClip { zeta: 0.35 }, vec![0.5, 0.25], 0.0);
        let x = [1.0, -0.1];
        let d = sys.respond(&x);
        assert_eq!(d[0], 0.5 * soft_clip(1.0, 0.35));
        assert_eq!(d[1], 0.5 * soft_clip(-0.1, 0.35) + 0.25 * soft_clip(1.0, 0.35));
    }

    #[test]
    fn generation_is_deterministic() {
        let sys = UnknownSystem::memory(0.01);
        let src = InputSource::new(0.25, 42).with_stream(7);
        let a = generate_pair(&sys, &src, 500).unwrap();
        let b = generate_pair(&sys, &src, 500).unwrap();
        assert_eq!(a, b);
        let c = generate_pair(&sys, &src.with_stream(8), 500).unwrap();
        assert_ne!(a.x, c.x);
    }

    #[test]
    fn input_statistics() {
        let sys = UnknownSystem::hammerstein(Nonlinearity::Identity, vec![1.0], 0.0);
        let pair = generate_pair(&sys, &InputSource::new(0.25, 1), 200_000).unwrap();
        let n = pair.x.len() as f64;
        let mean = pair.x.iter().sum::<f64>() / n;
        let var = pair.x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 5e-3);
        assert!((var - 0.25).abs() < 5e-3);
    }
}
