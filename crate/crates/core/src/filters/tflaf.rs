use super::{all_finite, check_step, check_taps, to_f64_vec, AdaptiveFilter, Algorithm, NamedWeights, StepOutput};
use crate::delay::TapRing;
use crate::error::{Error, Result};
use crate::feb::{expand_into, ExpansionBuffer, ExpansionOrder};
use crate::sample::{axpy, dot, Sample};

/// Where the functional expansion sits relative to the delay line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TflafMode {
    /// Delay raw samples and expand every tap, `M` expansions per sample.
    Original,
    /// Expand once and delay the expansion vectors.
    SinglePhi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TflafParams {
    pub m_taps: usize,
    pub mu: f64,
    pub order: ExpansionOrder,
    pub mode: TflafMode,
}

#[derive(Debug, Clone)]
enum Regressor<T> {
    Original { history: TapRing<T>, g: Vec<T> },
    SinglePhi { buffer: ExpansionBuffer<T> },
}

/// Trigonometric functional link adaptive filter with bias: `MQ + 1` weights
/// over the stacked expansion `[ḡ(n); …; ḡ(n−M+1)]` plus a constant one.
///
/// Both [`TflafMode`]s build the same regressor bit for bit; taps that have
/// not received a sample yet contribute a zero vector in either mode.
#[derive(Debug, Clone)]
pub struct Tflaf<T = f64> {
    params: TflafParams,
    mu: T,
    w: Vec<T>,
    w_bias: T,
    regressor: Regressor<T>,
    iteration: u64,
}

impl<T: Sample> Tflaf<T> {
    pub fn new(params: TflafParams) -> Result<Self> {
        check_taps(params.m_taps)?;
        check_step("mu", params.mu, false)?;
        let m = params.m_taps;
        let q = params.order.q_links();
        let regressor = match params.mode {
            TflafMode::Original => Regressor::Original {
                history: TapRing::new(m, 1),
                g: vec![T::default(); m * q],
            },
            TflafMode::SinglePhi => Regressor::SinglePhi {
                buffer: ExpansionBuffer::new(m, params.order)?,
            },
        };
        Ok(Tflaf {
            mu: T::from_f64(params.mu),
            w: vec![T::default(); m * q],
            w_bias: T::default(),
            regressor,
            iteration: 0,
            params,
        })
    }

    pub fn params(&self) -> &TflafParams {
        &self.params
    }

    fn expansion(&self) -> &[T] {
        match &self.regressor {
            Regressor::Original { g, .. } => g,
            Regressor::SinglePhi { buffer } => buffer.flat(),
        }
    }

    fn load(&mut self, x: T) {
        let order = self.params.order;
        match &mut self.regressor {
            Regressor::Original { history, g } => {
                history.push_scalar(x);
                let q = order.q_links();
                for (k, &xk) in history.flat()[..history.filled()].iter().enumerate() {
                    expand_into(xk, order, &mut g[k * q..(k + 1) * q]);
                }
            }
            Regressor::SinglePhi { buffer } => buffer.push_expanded(x),
        }
    }

    /// Tap weights followed by the bias weight.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = to_f64_vec(&self.w);
        w.push(self.w_bias.to_f64());
        w
    }

    /// `∂y/∂w` at the current state: the regressor `[g(n); 1]`.
    pub fn output_gradient(&self) -> Vec<f64> {
        let mut g = to_f64_vec(self.expansion());
        g.push(1.0);
        g
    }

    /// Output the filter would produce from its current regressor with
    /// weights `w` (taps then bias), evaluated in the same order as `step`.
    pub fn output_with(&self, w: &[f64]) -> f64 {
        let (taps, bias) = w.split_at(w.len() - 1);
        let g = to_f64_vec(self.expansion());
        dot(taps, &g) + bias[0]
    }
}

impl<T: Sample> AdaptiveFilter for Tflaf<T> {
    fn algorithm(&self) -> Algorithm {
        match self.params.mode {
            TflafMode::Original => Algorithm::Tflaf,
            TflafMode::SinglePhi => Algorithm::SinglePhiTflaf,
        }
    }

    fn step(&mut self, x: f64, d: f64) -> Result<StepOutput> {
        self.iteration += 1;
        self.load(T::from_f64(x));
        let g = match &self.regressor {
            Regressor::Original { g, .. } => g.as_slice(),
            Regressor::SinglePhi { buffer } => buffer.flat(),
        };

        let y = dot(&self.w, g) + self.w_bias;
        let e = T::from_f64(d) - y;

        let mu_e = self.mu * e;
        axpy(&mut self.w, mu_e, g);
        self.w_bias += mu_e;

        if !all_finite(&self.w) || !self.w_bias.to_f64().is_finite() {
            return Err(Error::Divergence {
                algorithm: self.algorithm(),
                run: None,
                iteration: self.iteration,
            });
        }
        Ok(StepOutput {
            y: y.to_f64(),
            e: e.to_f64(),
        })
    }

    fn reset(&mut self) {
        self.w.fill(T::default());
        self.w_bias = T::default();
        match &mut self.regressor {
            Regressor::Original { history, g } => {
                history.clear();
                g.fill(T::default());
            }
            Regressor::SinglePhi { buffer } => buffer.clear(),
        }
        self.iteration = 0;
    }

    fn weight_snapshot(&self) -> Vec<NamedWeights> {
        vec![NamedWeights {
            name: "w",
            values: self.weights(),
        }]
    }
}
