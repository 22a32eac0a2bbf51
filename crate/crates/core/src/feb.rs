//! Trigonometric functional expansion block.
//!
//! One input sample `x` expands to `Q = 2P + 1` functional links
//!
//! ```text
//! [x, sin(πx), cos(πx), sin(2πx), cos(2πx), …, sin(Pπx), cos(Pπx)]
//! ```
//!
//! The harmonic arguments are formed as `πx` once and then `p · (πx)`, so an
//! expansion costs `P` multiplies and `2P` trigonometric evaluations.

use std::f64::consts::PI;

use crate::delay::TapRing;
use crate::error::{Error, Result};
use crate::sample::Sample;

/// Expansion order `P` and the derived number of links `Q = 2P + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExpansionOrder {
    p_order: usize,
}

impl ExpansionOrder {
    pub fn new(p_order: usize) -> Result<Self> {
        if p_order == 0 {
            return Err(Error::config("expansion order P must be at least 1"));
        }
        Ok(ExpansionOrder { p_order })
    }

    /// Builds the order from a link count, which must be odd and at least 3.
    pub fn from_links(q_links: usize) -> Result<Self> {
        if q_links < 3 || q_links.is_multiple_of(2) {
            return Err(Error::config(format!(
                "number of functional links Q must be odd and >= 3, got {q_links}"
            )));
        }
        Self::new((q_links - 1) / 2)
    }

    pub fn p_order(self) -> usize {
        self.p_order
    }

    pub fn q_links(self) -> usize {
        2 * self.p_order + 1
    }
}

/// The `Q` functional links of one sample, ordered `[φ₀, φ₁, …, φ_{Q−1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionVector(Vec<f64>);

impl ExpansionVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for ExpansionVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Expands one sample. Rejects NaN and infinities.
pub fn expand(x: f64, order: ExpansionOrder) -> Result<ExpansionVector> {
    if !x.is_finite() {
        return Err(Error::Domain { value: x });
    }
    let mut out = vec![0.0; order.q_links()];
    expand_into(x, order, &mut out);
    Ok(ExpansionVector(out))
}

/// Unchecked expansion into `out[..Q]`; the filters' hot path.
#[inline]
pub fn expand_into<T: Sample>(x: T, order: ExpansionOrder, out: &mut [T]) {
    debug_assert!(out.len() >= order.q_links());
    out[0] = x;
    let base = T::from_f64(PI) * x;
    for p in 1..=order.p_order {
        let arg = if p == 1 { base } else { T::from_f64(p as f64) * base };
        out[2 * p - 1] = arg.sin();
        out[2 * p] = arg.cos();
    }
}

/// Expands every sample of a newest-first history independently and
/// concatenates the results (the per-tap expansion of the original FLAF).
pub fn expand_tapped_delay(x_history: &[f64], order: ExpansionOrder) -> Result<Vec<f64>> {
    let q = order.q_links();
    let mut out = vec![0.0; x_history.len() * q];
    for (&x, slot) in x_history.iter().zip(out.chunks_exact_mut(q)) {
        if !x.is_finite() {
            return Err(Error::Domain { value: x });
        }
        expand_into(x, order, slot);
    }
    Ok(out)
}

/// Delay line of expansion vectors: `M` rows of `Q` links, newest first.
///
/// The flat view is the stacked regressor `[ḡ(n); ḡ(n−1); …; ḡ(n−M+1)]`
/// and, read row by row, the `M × Q` matrix `G` used by the block-oriented
/// nonlinear-weight update. Rows not yet written read as zero.
#[derive(Debug, Clone)]
pub struct ExpansionBuffer<T = f64> {
    order: ExpansionOrder,
    ring: TapRing<T>,
}

impl<T: Sample> ExpansionBuffer<T> {
    pub fn new(m_taps: usize, order: ExpansionOrder) -> Result<Self> {
        if m_taps == 0 {
            return Err(Error::config("expansion buffer needs M >= 1"));
        }
        Ok(ExpansionBuffer {
            order,
            ring: TapRing::new(m_taps, order.q_links()),
        })
    }

    pub fn order(&self) -> ExpansionOrder {
        self.order
    }

    pub fn m_taps(&self) -> usize {
        self.ring.taps()
    }

    pub fn filled(&self) -> usize {
        self.ring.filled()
    }

    /// Pushes an already expanded vector.
    pub fn push(&mut self, g: &[T]) -> Result<()> {
        if g.len() != self.order.q_links() {
            return Err(Error::config(format!(
                "expansion vector has {} links, buffer expects {}",
                g.len(),
                self.order.q_links()
            )));
        }
        self.ring.push(g);
        Ok(())
    }

    /// Expands `x` directly into the newest row.
    #[inline]
    pub fn push_expanded(&mut self, x: T) {
        let order = self.order;
        expand_into(x, order, self.ring.advance());
        self.ring.commit();
    }

    #[inline]
    pub fn newest(&self) -> &[T] {
        self.ring.frame(0)
    }

    /// Row `k`, i.e. `ḡ(n − k)`.
    #[inline]
    pub fn row(&self, k: usize) -> &[T] {
        self.ring.frame(k)
    }

    /// Zero-padded `M·Q` view, newest row first.
    #[inline]
    pub fn flat(&self) -> &[T] {
        self.ring.flat()
    }

    /// Rows actually pushed so far, newest first.
    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.ring.frames()
    }

    pub fn clear(&mut self) {
        self.ring.clear();
    }
}
