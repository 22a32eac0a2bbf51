//! Uniform cubic Catmull-Rom spline used as the adaptive nonlinearity of the
//! Hammerstein spline filter.
//!
//! For an input `x` the normalized abscissa is `x/Δx + (N−1)/2`. Its integer
//! part selects the span `i` and the fractional part `u` the position inside
//! it; the output is `[u³ u² u 1] · C · q[i−1 ..= i+2]`.

use crate::error::{Error, Result};
use crate::sample::Sample;

/// Catmull-Rom basis matrix (the usual integer matrix scaled by 1/2).
pub const CATMULL_ROM: [[f64; 4]; 4] = [
    [-0.5, 1.5, -1.5, 0.5],
    [1.0, -2.5, 2.0, -0.5],
    [-0.5, 0.0, 0.5, 0.0],
    [0.0, 1.0, 0.0, 0.0],
];

/// Half-width of the default control-point grid.
pub const DEFAULT_HALF_RANGE: f64 = 3.0;

/// Knot spacing and number of control points of a symmetric spline grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplineGrid {
    dx: f64,
    n_points: usize,
    inv_dx: f64,
    center: f64,
}

impl SplineGrid {
    /// Grid covering `[-3, 3]`: `2·⌊3/Δx⌋ + 1` points centred on zero.
    pub fn new(dx: f64) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::config(format!("knot spacing must be positive, got {dx}")));
        }
        let half = (DEFAULT_HALF_RANGE / dx + 1e-9).floor() as usize;
        Self::with_points(dx, 2 * half + 1)
    }

    pub fn with_points(dx: f64, n_points: usize) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::config(format!("knot spacing must be positive, got {dx}")));
        }
        if n_points < 4 {
            return Err(Error::config(format!(
                "spline needs at least 4 control points, got {n_points}"
            )));
        }
        Ok(SplineGrid {
            dx,
            n_points,
            inv_dx: 1.0 / dx,
            center: (n_points - 1) as f64 / 2.0,
        })
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Control points lying on the identity line, `q[k] = (k − (N−1)/2)·Δx`.
    pub fn linear_control_points(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| (k as f64 - self.center) * self.dx).collect()
    }

    /// Span index and local abscissa for `x`.
    ///
    /// The span is clamped to `[1, N−3]` so the four-point window stays in
    /// range; outside the support `u` saturates to `[0, 1]`, which holds the
    /// output at the end control points instead of extrapolating.
    #[inline]
    pub fn locate<T: Sample>(&self, x: T) -> (usize, T) {
        let u_norm = x * T::from_f64(self.inv_dx) + T::from_f64(self.center);
        let floor = u_norm.to_f64().floor();
        let max_span = (self.n_points - 3) as f64;
        let span = floor.clamp(1.0, max_span);
        let mut u = u_norm - T::from_f64(span);
        if floor != span {
            u = if floor < span { T::default() } else { T::from_f64(1.0) };
        }
        (span as usize, u)
    }
}

/// `[u³, u², u, 1]`: two multiplies.
#[inline]
pub fn power_vector<T: Sample>(u: T) -> [T; 4] {
    let u2 = u * u;
    let u3 = u2 * u;
    [u3, u2, u, T::from_f64(1.0)]
}

/// `Cᵀ v` as a dense 4×4 product: 16 multiplies, 12 adds.
#[inline]
pub fn basis_transpose_apply<T: Sample>(v: &[T; 4]) -> [T; 4] {
    let mut out = [T::default(); 4];
    for (col, o) in out.iter_mut().enumerate() {
        let mut acc = T::from_f64(CATMULL_ROM[0][col]) * v[0];
        for (row, &vr) in v.iter().enumerate().skip(1) {
            acc += T::from_f64(CATMULL_ROM[row][col]) * vr;
        }
        *o = acc;
    }
    out
}

/// Evaluates the spline with control points `q` at `x`.
pub fn evaluate(grid: &SplineGrid, q: &[f64], x: f64) -> f64 {
    let (span, u) = grid.locate(x);
    let b = basis_transpose_apply(&power_vector(u));
    b.iter().zip(&q[span - 1..span + 3]).map(|(b, q)| b * q).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_matches_linear_init() {
        let grid = SplineGrid::new(0.25).unwrap();
        assert_eq!(grid.n_points(), 25);
        let q = grid.linear_control_points();
        assert_eq!(q[0], -3.0);
        assert_eq!(q[1], -2.75);
        assert_eq!(q[12], 0.0);
        assert_eq!(q[24], 3.0);
    }

    #[test]
    fn span_bookkeeping_at_zero() {
        let grid = SplineGrid::new(0.25).unwrap();
        let (span, u) = grid.locate(0.0);
        assert_eq!((span, u), (12, 0.0));
    }

    #[test]
    fn identity_on_linear_control_points() {
        let grid = SplineGrid::new(0.25).unwrap();
        let q = grid.linear_control_points();
        assert_eq!(evaluate(&grid, &q, 0.5), 0.5);
        assert_eq!(evaluate(&grid, &q, -1.0), -1.0);
        for k in 0..=500 {
            let x = -2.7 + 5.4 * k as f64 / 500.0;
            assert!((evaluate(&grid, &q, x) - x).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn clamps_outside_support() {
        let grid = SplineGrid::new(0.25).unwrap();
        let q = grid.linear_control_points();
        assert_eq!(grid.locate(10.0), (22, 1.0));
        assert_eq!(grid.locate(-10.0), (1, 0.0));
        assert_eq!(evaluate(&grid, &q, 10.0), 2.75);
        assert_eq!(evaluate(&grid, &q, -10.0), -2.75);
    }

    #[test]
    fn basis_rows_sum_to_partition_of_unity() {
        for k in 0..=10 {
            let u = k as f64 / 10.0;
            let b = basis_transpose_apply(&power_vector(u));
            assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn non_integral_spacing() {
        let grid = SplineGrid::new(0.21).unwrap();
        assert_eq!(grid.n_points(), 29);
        let q = grid.linear_control_points();
        assert!((evaluate(&grid, &q, 0.37) - 0.37).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_spacing() {
        assert!(SplineGrid::new(0.0).is_err());
        assert!(SplineGrid::new(f64::NAN).is_err());
        assert!(SplineGrid::with_points(0.25, 3).is_err());
    }
}
