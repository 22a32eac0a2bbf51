//! Configs shipped with the tool, one per learning-curve experiment.

pub const MEMORYLESS_1: &str = include_str!("../configs/memoryless1.cfg");
pub const MEMORYLESS_2: &str = include_str!("../configs/memoryless2.cfg");
pub const MEMORY: &str = include_str!("../configs/memory.cfg");

/// Learning-curve figure reproduced by `flaf reproduce`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    /// Asymmetric loudspeaker stand-in into a room response.
    #[value(name = "3a")]
    LoudspeakerRoom,
    /// Soft clipping into a room response.
    #[value(name = "3b")]
    SoftClipRoom,
    /// Nonlinear system with per-lag memory.
    #[value(name = "3c")]
    Memory,
}

impl Figure {
    pub fn config_text(self) -> &'static str {
        match self {
            Figure::LoudspeakerRoom => MEMORYLESS_1,
            Figure::SoftClipRoom => MEMORYLESS_2,
            Figure::Memory => MEMORY,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Figure::LoudspeakerRoom => "3a",
            Figure::SoftClipRoom => "3b",
            Figure::Memory => "3c",
        }
    }
}
