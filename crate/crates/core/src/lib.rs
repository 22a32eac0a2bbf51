//! Nonlinear adaptive filters built on trigonometric functional links, with
//! the tools to identify unknown systems with them and to account for their
//! arithmetic cost.
//!
//! The family:
//!
//! * [`Lms`]: linear baseline.
//! * [`Tflaf`]: trigonometric functional link adaptive filter, in the
//!   per-tap expansion layout or the single-expansion layout that delays
//!   expanded vectors instead of raw samples.
//! * [`HboTflaf`]: Hammerstein block-oriented variant, a `Q`-weight
//!   nonlinear stage feeding an `M`-tap linear stage.
//! * [`Hsaf`]: Hammerstein spline adaptive filter.
//!
//! All of them implement [`AdaptiveFilter`] and are generic over the
//! [`Sample`] scalar, which is how [`complexity::measured_cost`] counts the
//! arithmetic of the real code.

pub mod complexity;
pub mod delay;
pub mod error;
pub mod feb;
pub mod filters;
pub mod harness;
pub mod rng;
pub mod sample;
pub mod spline;
pub mod systems;

pub use complexity::{cost_of, documented_offset, measured_cost, CostModel, CostOffset, CostParams, MeasuredCost};
pub use error::{Error, Result};
pub use feb::{expand, expand_tapped_delay, ExpansionBuffer, ExpansionOrder, ExpansionVector};
pub use filters::{
    AdaptiveFilter, Algorithm, FilterSpec, HboTflaf, HboTflafParams, Hsaf, HsafGradient, HsafParams, Lms, LmsParams,
    NamedWeights, StepOutput, Tflaf, TflafMode, TflafParams,
};
pub use harness::{
    filter_factory, moving_average, run_experiment, steady_state_mse, ExperimentConfig, ExperimentResult, FilterParams,
    MseCurve, SteadyState,
};
pub use sample::{Counted, OpCounts, Sample};
pub use systems::{
    eval_memory_system, generate_pair, make_fir, soft_clip, FirSpec, InputSource, Nonlinearity, PlantSpec, SignalPair,
    SystemSpec, UnknownSystem,
};
