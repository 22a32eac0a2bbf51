//! Shared fixtures for the benchmarks.

use flaf_core::{generate_pair, FilterParams, InputSource, Nonlinearity, SignalPair, UnknownSystem};

/// Soft-clip plant identified by every benchmark, `n` samples long.
pub fn soft_clip_stream(n: usize) -> SignalPair {
    let system = UnknownSystem::hammerstein(Nonlinearity::SoftClip { zeta: 0.35 }, vec![0.7, -0.3, 0.2, 0.1], 0.01);
    generate_pair(&system, &InputSource::new(0.25, 99), n).expect("valid fixture")
}

/// Parameter column used by the benchmarks at filter length `m`.
pub fn params(m_taps: usize) -> FilterParams {
    FilterParams {
        m_taps,
        ..FilterParams::memoryless_2()
    }
}
