//! The adaptive filter family behind one per-sample contract.
//!
//! Every filter consumes `(x(n), d(n))`, produces `y(n)` and `e(n) = d(n) − y(n)`,
//! and adapts its weights by stochastic gradient descent on `e(n)²`.

mod hbo;
mod hsaf;
mod lms;
mod tflaf;

use std::fmt;
use std::str::FromStr;

pub use hbo::{HboTflaf, HboTflafParams};
pub use hsaf::{Hsaf, HsafGradient, HsafParams};
pub use lms::{Lms, LmsParams};
pub use tflaf::{Tflaf, TflafMode, TflafParams};

use crate::error::{Error, Result};
use crate::sample::{Counted, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Lms,
    Tflaf,
    SinglePhiTflaf,
    HboTflaf,
    Hsaf,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Lms,
        Algorithm::Tflaf,
        Algorithm::SinglePhiTflaf,
        Algorithm::HboTflaf,
        Algorithm::Hsaf,
    ];

    /// Identifier used in config files, file names and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Lms => "lms",
            Algorithm::Tflaf => "tflaf",
            Algorithm::SinglePhiTflaf => "single_phi_tflaf",
            Algorithm::HboTflaf => "hbo_tflaf",
            Algorithm::Hsaf => "hsaf",
        }
    }

    /// Human-readable label for tables and chart legends.
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Lms => "LMS",
            Algorithm::Tflaf => "TFLAF",
            Algorithm::SinglePhiTflaf => "Single-Φ TFLAF",
            Algorithm::HboTflaf => "HBO-TFLAF",
            Algorithm::Hsaf => "HSAF",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::config(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutput {
    pub y: f64,
    pub e: f64,
}

/// One named weight vector of a filter, e.g. `w`, `a` or `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedWeights {
    pub name: &'static str,
    pub values: Vec<f64>,
}

pub trait AdaptiveFilter: Send {
    fn algorithm(&self) -> Algorithm;

    /// Filters `x`, compares against `d` and adapts.
    fn step(&mut self, x: f64, d: f64) -> Result<StepOutput>;

    /// Restores the initial weights and empties every delay line.
    fn reset(&mut self);

    fn weight_snapshot(&self) -> Vec<NamedWeights>;

    /// Number of weights the filter adapts.
    fn adaptive_weight_count(&self) -> usize {
        self.weight_snapshot().iter().map(|w| w.values.len()).sum()
    }
}

/// Construction parameters for any member of the family.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterSpec {
    Lms(LmsParams),
    Tflaf(TflafParams),
    HboTflaf(HboTflafParams),
    Hsaf(HsafParams),
}

impl FilterSpec {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            FilterSpec::Lms(_) => Algorithm::Lms,
            FilterSpec::Tflaf(p) => match p.mode {
                TflafMode::Original => Algorithm::Tflaf,
                TflafMode::SinglePhi => Algorithm::SinglePhiTflaf,
            },
            FilterSpec::HboTflaf(_) => Algorithm::HboTflaf,
            FilterSpec::Hsaf(_) => Algorithm::Hsaf,
        }
    }

    pub fn m_taps(&self) -> usize {
        match self {
            FilterSpec::Lms(p) => p.m_taps,
            FilterSpec::Tflaf(p) => p.m_taps,
            FilterSpec::HboTflaf(p) => p.m_taps,
            FilterSpec::Hsaf(p) => p.m_taps,
        }
    }

    pub fn build(&self) -> Result<Box<dyn AdaptiveFilter>> {
        self.build_with::<f64>()
    }

    /// Same filter on the operation-counting scalar.
    pub fn build_counted(&self) -> Result<Box<dyn AdaptiveFilter>> {
        self.build_with::<Counted>()
    }

    fn build_with<T: Sample>(&self) -> Result<Box<dyn AdaptiveFilter>> {
        Ok(match self {
            FilterSpec::Lms(p) => Box::new(Lms::<T>::new(p.clone())?),
            FilterSpec::Tflaf(p) => Box::new(Tflaf::<T>::new(p.clone())?),
            FilterSpec::HboTflaf(p) => Box::new(HboTflaf::<T>::new(p.clone())?),
            FilterSpec::Hsaf(p) => Box::new(Hsaf::<T>::new(p.clone())?),
        })
    }
}

pub(crate) fn check_taps(m_taps: usize) -> Result<()> {
    if m_taps == 0 {
        return Err(Error::config("filter length M must be at least 1"));
    }
    Ok(())
}

/// Step sizes must be finite and positive, or zero where `allow_zero`
/// (a frozen stage).
pub(crate) fn check_step(name: &str, mu: f64, allow_zero: bool) -> Result<()> {
    let ok = mu.is_finite() && (mu > 0.0 || (allow_zero && mu == 0.0));
    if !ok {
        return Err(Error::config(format!("step size {name} must be positive, got {mu}")));
    }
    Ok(())
}

pub(crate) fn all_finite<T: Sample>(w: &[T]) -> bool {
    w.iter().all(|v| v.to_f64().is_finite())
}

pub(crate) fn to_f64_vec<T: Sample>(w: &[T]) -> Vec<f64> {
    w.iter().map(|v| v.to_f64()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("rff_klms".parse::<Algorithm>().is_err());
    }

    #[test]
    fn step_validation() {
        assert!(check_step("mu", 0.0, false).is_err());
        assert!(check_step("mu", -1e-3, false).is_err());
        assert!(check_step("mu", f64::NAN, true).is_err());
        assert!(check_step("mu_a", 0.0, true).is_ok());
        assert!(check_taps(0).is_err());
    }
}
