use super::{all_finite, check_step, check_taps, to_f64_vec, AdaptiveFilter, Algorithm, NamedWeights, StepOutput};
use crate::delay::TapRing;
use crate::error::{Error, Result};
use crate::feb::{ExpansionBuffer, ExpansionOrder};
use crate::sample::{axpy, dot, Sample};

#[derive(Debug, Clone, PartialEq)]
pub struct HboTflafParams {
    pub m_taps: usize,
    /// Step size of the linear stage.
    pub mu_w: f64,
    /// Step size of the nonlinear stage; zero freezes it.
    pub mu_a: f64,
    pub order: ExpansionOrder,
}

/// Hammerstein block-oriented trigonometric FLAF.
///
/// A `Q`-weight nonlinear stage `s(n) = aᵀḡ(n)` feeds an `M`-tap linear stage
/// with bias, `y(n) = w_bias + Σₖ wₖ s(n−k)`. Weights adapt as
///
/// ```text
/// w ← w + μ_w e(n) [1; s(n); …; s(n−M+1)]
/// a ← a + μ_a e(n) (w_tapsᵀ G)
/// ```
///
/// where row `k` of `G` is `ḡ(n−k)`. Both updates use the same `e(n)`, and the
/// `a` gradient is formed with `w` before its update. The bias has no path
/// through `a`, so it is left out of the `G` product.
///
/// `a` starts at `[1, 0, …, 0]`, so the filter begins as a linear LMS filter.
#[derive(Debug, Clone)]
pub struct HboTflaf<T = f64> {
    params: HboTflafParams,
    mu_w: T,
    mu_a: T,
    a: Vec<T>,
    w: Vec<T>,
    w_bias: T,
    g_buf: ExpansionBuffer<T>,
    s_buf: TapRing<T>,
    grad_a: Vec<T>,
    iteration: u64,
}

impl<T: Sample> HboTflaf<T> {
    pub fn new(params: HboTflafParams) -> Result<Self> {
        check_taps(params.m_taps)?;
        check_step("mu_w", params.mu_w, false)?;
        check_step("mu_a", params.mu_a, true)?;
        let m = params.m_taps;
        let q = params.order.q_links();
        let mut f = HboTflaf {
            mu_w: T::from_f64(params.mu_w),
            mu_a: T::from_f64(params.mu_a),
            a: vec![T::default(); q],
            w: vec![T::default(); m],
            w_bias: T::default(),
            g_buf: ExpansionBuffer::new(m, params.order)?,
            s_buf: TapRing::new(m, 1),
            grad_a: vec![T::default(); q],
            iteration: 0,
            params,
        };
        f.reset();
        Ok(f)
    }

    pub fn params(&self) -> &HboTflafParams {
        &self.params
    }

    pub fn nonlinear_weights(&self) -> Vec<f64> {
        to_f64_vec(&self.a)
    }

    /// `[w_bias, w₀, …, w_{M−1}]`.
    pub fn linear_weights(&self) -> Vec<f64> {
        let mut w = vec![self.w_bias.to_f64()];
        w.extend(self.w.iter().map(|v| v.to_f64()));
        w
    }

    /// Overwrites the nonlinear weights, e.g. to probe a state.
    pub fn set_nonlinear_weights(&mut self, a: &[f64]) -> Result<()> {
        if a.len() != self.a.len() {
            return Err(Error::config(format!(
                "expected {} nonlinear weights, got {}",
                self.a.len(),
                a.len()
            )));
        }
        for (dst, &src) in self.a.iter_mut().zip(a) {
            *dst = T::from_f64(src);
        }
        Ok(())
    }

    /// `w_tapsᵀ G`: `MQ` multiplies, `(M−1)Q` adds.
    fn nonlinear_gradient(w: &[T], g_buf: &ExpansionBuffer<T>, out: &mut [T]) {
        let q = out.len();
        let mut rows = w.iter().zip(g_buf.flat().chunks_exact(q));
        if let Some((&w0, g0)) = rows.next() {
            for (o, &g) in out.iter_mut().zip(g0) {
                *o = w0 * g;
            }
        }
        for (&wk, gk) in rows {
            axpy(out, wk, gk);
        }
    }

    /// `∂y/∂a = w_tapsᵀ G` at the current state, as used by the update.
    pub fn output_gradient_a(&self) -> Vec<f64> {
        let mut out = vec![T::default(); self.a.len()];
        Self::nonlinear_gradient(&self.w, &self.g_buf, &mut out);
        to_f64_vec(&out)
    }

    /// Output rebuilt from the stored expansions with nonlinear weights `a`
    /// applied to every delayed row (the slow-adaptation model of `s`).
    pub fn output_with_nonlinear(&self, a: &[f64]) -> f64 {
        let q = self.a.len();
        let s: Vec<f64> = self
            .g_buf
            .flat()
            .chunks_exact(q)
            .map(|row| dot(a, &to_f64_vec(row)))
            .collect();
        dot(&to_f64_vec(&self.w), &s) + self.w_bias.to_f64()
    }

    /// `∂y/∂[w_bias; w] = [1; s(n); …; s(n−M+1)]`.
    pub fn output_gradient_w(&self) -> Vec<f64> {
        let mut g = vec![1.0];
        g.extend(self.s_buf.flat().iter().map(|v| v.to_f64()));
        g
    }

    /// Output from the stored `s` history with linear weights
    /// `[w_bias, w₀, …]`.
    pub fn output_with_linear(&self, w: &[f64]) -> f64 {
        let s = to_f64_vec(self.s_buf.flat());
        dot(&w[1..], &s) + w[0]
    }
}

impl<T: Sample> AdaptiveFilter for HboTflaf<T> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::HboTflaf
    }

    fn step(&mut self, x: f64, d: f64) -> Result<StepOutput> {
        self.iteration += 1;
        self.g_buf.push_expanded(T::from_f64(x));
        let s = dot(&self.a, self.g_buf.newest());
        self.s_buf.push_scalar(s);

        let s_hist = self.s_buf.flat();
        let y = dot(&self.w, s_hist) + self.w_bias;
        let e = T::from_f64(d) - y;

        Self::nonlinear_gradient(&self.w, &self.g_buf, &mut self.grad_a);

        let mu_e = self.mu_w * e;
        axpy(&mut self.w, mu_e, s_hist);
        self.w_bias += mu_e;

        let mu_a_e = self.mu_a * e;
        axpy(&mut self.a, mu_a_e, &self.grad_a);

        if !all_finite(&self.w) || !all_finite(&self.a) || !self.w_bias.to_f64().is_finite() {
            return Err(Error::Divergence {
                algorithm: Algorithm::HboTflaf,
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
        self.a.fill(T::default());
        self.a[0] = T::from_f64(1.0);
        self.w.fill(T::default());
        self.w_bias = T::default();
        self.g_buf.clear();
        self.s_buf.clear();
        self.grad_a.fill(T::default());
        self.iteration = 0;
    }

    fn weight_snapshot(&self) -> Vec<NamedWeights> {
        vec![
            NamedWeights {
                name: "w",
                values: self.linear_weights(),
            },
            NamedWeights {
                name: "a",
                values: self.nonlinear_weights(),
            },
        ]
    }
}
