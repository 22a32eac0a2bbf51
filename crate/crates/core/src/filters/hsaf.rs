use super::{all_finite, check_step, check_taps, to_f64_vec, AdaptiveFilter, Algorithm, NamedWeights, StepOutput};
use crate::delay::TapRing;
use crate::error::{Error, Result};
use crate::sample::{axpy, dot, Sample};
use crate::spline::{basis_transpose_apply, power_vector, SplineGrid};

/// How the control-point gradient is distributed over the spline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HsafGradient {
    /// `q_i ← q_i + μ_q e(n) Cᵀ U_i w`: the whole gradient lands on the
    /// current four-point window, `U_i` stacking the last `M` power vectors.
    #[default]
    SharedSpan,
    /// Each tap's contribution `μ_q e(n) wₖ Cᵀu(n−k)` is scattered onto the
    /// window that produced `s(n−k)`.
    PerTapSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HsafParams {
    pub m_taps: usize,
    pub mu_w: f64,
    /// Step size of the control points; zero freezes the spline.
    pub mu_q: f64,
    /// Knot spacing Δx.
    pub dx: f64,
    pub gradient: HsafGradient,
}

/// Hammerstein spline adaptive filter: a Catmull-Rom spline nonlinearity
/// followed by an `M`-tap linear stage (no bias).
///
/// Control points start on the identity line, linear weights at zero.
#[derive(Debug, Clone)]
pub struct Hsaf<T = f64> {
    params: HsafParams,
    grid: SplineGrid,
    mu_w: T,
    mu_q: T,
    q: Vec<T>,
    w: Vec<T>,
    s_buf: TapRing<T>,
    /// Power vectors `[u³, u², u, 1]` (shared span) or basis vectors
    /// `Cᵀu` (per-tap span), newest first.
    u_buf: TapRing<T>,
    span_buf: TapRing<usize>,
    iteration: u64,
}

impl<T: Sample> Hsaf<T> {
    pub fn new(params: HsafParams) -> Result<Self> {
        check_taps(params.m_taps)?;
        check_step("mu_w", params.mu_w, false)?;
        check_step("mu_q", params.mu_q, true)?;
        let grid = SplineGrid::new(params.dx)?;
        let m = params.m_taps;
        let mut f = Hsaf {
            grid,
            mu_w: T::from_f64(params.mu_w),
            mu_q: T::from_f64(params.mu_q),
            q: vec![T::default(); grid.n_points()],
            w: vec![T::default(); m],
            s_buf: TapRing::new(m, 1),
            u_buf: TapRing::new(m, 4),
            span_buf: TapRing::new(m, 1),
            iteration: 0,
            params,
        };
        f.reset();
        Ok(f)
    }

    pub fn grid(&self) -> &SplineGrid {
        &self.grid
    }

    pub fn control_points(&self) -> Vec<f64> {
        to_f64_vec(&self.q)
    }

    pub fn linear_weights(&self) -> Vec<f64> {
        to_f64_vec(&self.w)
    }

    /// Spline output for `x` with the current control points; no adaptation.
    pub fn nonlinearity(&self, x: f64) -> f64 {
        crate::spline::evaluate(&self.grid, &self.control_points(), x)
    }

    fn update_control_points(&mut self, mu_q_e: T, span: usize) {
        match self.params.gradient {
            HsafGradient::SharedSpan => {
                // z = U w: 4M multiplies, 4(M−1) adds
                let mut z = [T::default(); 4];
                let mut taps = self.w.iter().zip(self.u_buf.flat().chunks_exact(4));
                if let Some((&w0, u0)) = taps.next() {
                    for (zj, &uj) in z.iter_mut().zip(u0) {
                        *zj = w0 * uj;
                    }
                }
                for (&wk, uk) in taps {
                    axpy(&mut z, wk, uk);
                }
                let grad = basis_transpose_apply(&z);
                axpy(&mut self.q[span - 1..span + 3], mu_q_e, &grad);
            }
            HsafGradient::PerTapSpan => {
                let filled = self.span_buf.filled();
                let spans = self.span_buf.flat();
                let bases = self.u_buf.flat().chunks_exact(4);
                for ((&wk, &sk), bk) in self.w.iter().zip(spans).zip(bases).take(filled) {
                    let scale = mu_q_e * wk;
                    axpy(&mut self.q[sk - 1..sk + 3], scale, bk);
                }
            }
        }
    }
}

impl<T: Sample> AdaptiveFilter for Hsaf<T> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Hsaf
    }

    fn step(&mut self, x: f64, d: f64) -> Result<StepOutput> {
        self.iteration += 1;
        let (span, u) = self.grid.locate(T::from_f64(x));
        let uv = power_vector(u);
        let basis = basis_transpose_apply(&uv);
        let s = dot(&basis, &self.q[span - 1..span + 3]);

        self.s_buf.push_scalar(s);
        match self.params.gradient {
            HsafGradient::SharedSpan => self.u_buf.push(&uv),
            HsafGradient::PerTapSpan => {
                self.u_buf.push(&basis);
                self.span_buf.push_scalar(span);
            }
        }

        let y = dot(&self.w, self.s_buf.flat());
        let e = T::from_f64(d) - y;

        // control points first: their gradient uses the pre-update taps
        let mu_q_e = self.mu_q * e;
        self.update_control_points(mu_q_e, span);

        let mu_e = self.mu_w * e;
        axpy(&mut self.w, mu_e, self.s_buf.flat());

        if !all_finite(&self.w) || !all_finite(&self.q) {
            return Err(Error::Divergence {
                algorithm: Algorithm::Hsaf,
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
        for (dst, v) in self.q.iter_mut().zip(self.grid.linear_control_points()) {
            *dst = T::from_f64(v);
        }
        self.w.fill(T::default());
        self.s_buf.clear();
        self.u_buf.clear();
        self.span_buf.clear();
        self.iteration = 0;
    }

    fn weight_snapshot(&self) -> Vec<NamedWeights> {
        vec![
            NamedWeights {
                name: "w",
                values: self.linear_weights(),
            },
            NamedWeights {
                name: "q",
                values: self.control_points(),
            },
        ]
    }
}
