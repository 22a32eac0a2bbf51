//! Scalar type of the signal path.
//!
//! Every filter is generic over [`Sample`]. With `f64` it is the production
//! path; with [`Counted`] each multiply, add/subtract and sine/cosine call is
//! tallied into a thread-local [`OpCounts`], which is how measured costs are
//! obtained without a second hand-maintained copy of the arithmetic.

use std::cell::Cell;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Sub};

pub trait Sample:
    Copy
    + Default
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + Send
    + Sync
    + 'static
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
}

impl Sample for f64 {
    #[inline(always)]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline(always)]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline(always)]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline(always)]
    fn cos(self) -> Self {
        f64::cos(self)
    }
}

/// Arithmetic operation tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub mults: u64,
    pub adds: u64,
    pub trig: u64,
}

impl Sub for OpCounts {
    type Output = OpCounts;
    fn sub(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            mults: self.mults - rhs.mults,
            adds: self.adds - rhs.adds,
            trig: self.trig - rhs.trig,
        }
    }
}

thread_local! {
    static COUNTS: Cell<OpCounts> = const { Cell::new(OpCounts { mults: 0, adds: 0, trig: 0 }) };
}

/// Snapshot of this thread's running tallies. Take two and subtract.
pub fn op_counts() -> OpCounts {
    COUNTS.with(Cell::get)
}

#[inline]
fn tally(f: impl FnOnce(&mut OpCounts)) {
    COUNTS.with(|c| {
        let mut v = c.get();
        f(&mut v);
        c.set(v);
    });
}

/// `f64` that counts the arithmetic performed on it.
///
/// Subtraction is tallied as an addition. Comparisons, `floor` and
/// conversions are free, matching what the cost tables count.
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct Counted(pub f64);

impl Add for Counted {
    type Output = Counted;
    #[inline]
    fn add(self, rhs: Counted) -> Counted {
        tally(|c| c.adds += 1);
        Counted(self.0 + rhs.0)
    }
}

impl Sub for Counted {
    type Output = Counted;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)] // the tally is a counter
    fn sub(self, rhs: Counted) -> Counted {
        tally(|c| c.adds += 1);
        Counted(self.0 - rhs.0)
    }
}

impl Mul for Counted {
    type Output = Counted;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)] // the tally is a counter
    fn mul(self, rhs: Counted) -> Counted {
        tally(|c| c.mults += 1);
        Counted(self.0 * rhs.0)
    }
}

impl AddAssign for Counted {
    #[inline]
    fn add_assign(&mut self, rhs: Counted) {
        tally(|c| c.adds += 1);
        self.0 += rhs.0;
    }
}

impl Sample for Counted {
    fn from_f64(v: f64) -> Self {
        Counted(v)
    }
    fn to_f64(self) -> f64 {
        self.0
    }
    fn sin(self) -> Self {
        tally(|c| c.trig += 1);
        Counted(self.0.sin())
    }
    fn cos(self) -> Self {
        tally(|c| c.trig += 1);
        Counted(self.0.cos())
    }
}

/// Inner product accumulated left to right: `n` multiplies, `n - 1` adds.
#[inline]
pub(crate) fn dot<T: Sample>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut pairs = a.iter().zip(b);
    let Some((&a0, &b0)) = pairs.next() else {
        return T::default();
    };
    let mut acc = a0 * b0;
    for (&ai, &bi) in pairs {
        acc += ai * bi;
    }
    acc
}

/// `w += scale * v`, elementwise.
#[inline]
pub(crate) fn axpy<T: Sample>(w: &mut [T], scale: T, v: &[T]) {
    debug_assert_eq!(w.len(), v.len());
    for (wi, &vi) in w.iter_mut().zip(v) {
        *wi += scale * vi;
    }
}
