//! Birth-death processes with asymptotically power-law rates.
//!
//! The crate simulates the chain `ξ` and the reference walk `ζ`, evaluates the
//! exact path density of `ξ` with respect to `ζ`, estimates probabilities of
//! sup-norm tubes around scaled target paths, and computes the rate
//! functional `I(f) = ∫₀¹ f^{l∨m}` together with the normalizers and
//! diagnostics used to compare it against simulation.

pub mod estimate;
pub mod ldp;
pub mod model;
pub mod pathspace;
pub mod sim;

pub use estimate::{EstimateRecord, ExperimentPoint, Method, McOptions, GuideOptions, TubeProblem};
pub use model::{RateModel, ScalingScheme, SlowlyVarying, TargetFunction};
pub use pathspace::{JumpPath, ScaledPathView, Tube};
pub use sim::{RngStream, SampleOutcome, SampleStatus};
