use super::{all_finite, check_step, check_taps, to_f64_vec, AdaptiveFilter, Algorithm, NamedWeights, StepOutput};
use crate::delay::TapRing;
use crate::error::{Error, Result};
use crate::sample::{axpy, dot, Sample};

#[derive(Debug, Clone, PartialEq)]
pub struct LmsParams {
    pub m_taps: usize,
    pub mu: f64,
    /// Adds an adaptive offset driven by a constant-one regressor.
    pub bias: bool,
}

/// Linear LMS on the raw input delay line.
#[derive(Debug, Clone)]
pub struct Lms<T = f64> {
    params: LmsParams,
    mu: T,
    w: Vec<T>,
    w_bias: T,
    x_buf: TapRing<T>,
    iteration: u64,
}

impl<T: Sample> Lms<T> {
    pub fn new(params: LmsParams) -> Result<Self> {
        check_taps(params.m_taps)?;
        check_step("mu", params.mu, false)?;
        Ok(Lms {
            mu: T::from_f64(params.mu),
            w: vec![T::default(); params.m_taps],
            w_bias: T::default(),
            x_buf: TapRing::new(params.m_taps, 1),
            iteration: 0,
            params,
        })
    }

    pub fn weights(&self) -> Vec<f64> {
        to_f64_vec(&self.w)
    }

    pub fn bias(&self) -> Option<f64> {
        self.params.bias.then(|| self.w_bias.to_f64())
    }
}

impl<T: Sample> AdaptiveFilter for Lms<T> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Lms
    }

    fn step(&mut self, x: f64, d: f64) -> Result<StepOutput> {
        self.iteration += 1;
        self.x_buf.push_scalar(T::from_f64(x));
        let regressor = self.x_buf.flat();

        let mut y = dot(&self.w, regressor);
        if self.params.bias {
            y += self.w_bias;
        }
        let e = T::from_f64(d) - y;

        let mu_e = self.mu * e;
        axpy(&mut self.w, mu_e, regressor);
        if self.params.bias {
            self.w_bias += mu_e;
        }

        if !all_finite(&self.w) || !self.w_bias.to_f64().is_finite() {
            return Err(Error::Divergence {
                algorithm: Algorithm::Lms,
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
        self.x_buf.clear();
        self.iteration = 0;
    }

    fn weight_snapshot(&self) -> Vec<NamedWeights> {
        let mut w = self.weights();
        if let Some(b) = self.bias() {
            w.insert(0, b);
        }
        vec![NamedWeights { name: "w", values: w }]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, StreamPurpose};
    use rand_distr::{Distribution, StandardNormal};

    fn lms(m: usize, mu: f64) -> Lms {
        Lms::new(LmsParams {
            m_taps: m,
            mu,
            bias: false,
        })
        .unwrap()
    }

    #[test]
    fn first_step_from_zero() {
        let mut f = lms(3, 0.05);
        let out = f.step(1.0, 1.0).unwrap();
        assert_eq!((out.y, out.e), (0.0, 1.0));
        assert_eq!(f.weights(), vec![0.05, 0.0, 0.0]);
    }

    #[test]
    fn zero_input_leaves_weights() {
        let mut f = lms(4, 0.1);
        for d in [0.3, -1.0, 2.0] {
            let out = f.step(0.0, d).unwrap();
            assert_eq!((out.y, out.e), (0.0, d));
        }
        assert_eq!(f.weights(), vec![0.0; 4]);
    }

    #[test]
    fn identifies_four_tap_fir() {
        let h = [0.8, -0.4, 0.2, 0.1];
        let mut rng = stream_rng(11, 0, StreamPurpose::Input);
        let mut f = lms(4, 0.01);
        let mut hist = [0.0f64; 4];
        for _ in 0..5000 {
            let x: f64 = StandardNormal.sample(&mut rng);
            hist.rotate_right(1);
            hist[0] = x;
            let d: f64 = h.iter().zip(&hist).map(|(a, b)| a * b).sum();
            f.step(x, d).unwrap();
        }
        let err: f64 = f
            .weights()
            .iter()
            .zip(h)
            .map(|(w, h)| (w - h).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-2, "weight error {err}");
    }

    #[test]
    fn diverges_loudly() {
        let mut f = lms(2, 1e300);
        let mut failed = None;
        for n in 0..50 {
            if let Err(e) = f.step(1e10, -1e10) {
                failed = Some((n, e));
                break;
            }
        }
        let (_, e) = failed.expect("expected divergence");
        assert!(matches!(
            e,
            Error::Divergence {
                algorithm: Algorithm::Lms,
                ..
            }
        ));
    }

    #[test]
    fn reset_restores_init() {
        let mut f = Lms::<f64>::new(LmsParams {
            m_taps: 2,
            mu: 0.1,
            bias: true,
        })
        .unwrap();
        f.step(1.0, 2.0).unwrap();
        f.reset();
        assert_eq!(f.weight_snapshot()[0].values, vec![0.0; 3]);
        let out = f.step(1.0, 2.0).unwrap();
        assert_eq!(out.y, 0.0);
    }
}
