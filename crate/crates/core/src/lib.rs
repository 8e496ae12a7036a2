//! Learning-based access probability design for a cognitive small base
//! station sharing spectrum with a macro cell under an interference
//! probability constraint.
//!
//! Pipeline: [`channel`] generates the SNR samples a small cell observes,
//! [`learner`] turns them into distance thresholds with binomial confidence
//! bounds, [`geometry`] supplies the areas, and [`design`] picks the access
//! probability. [`sim`] runs Monte Carlo sweeps over that pipeline and
//! [`io`] handles configs, CSV tables and plot scripts.

// Range checks are negated comparisons so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod config;
pub mod design;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod io;
pub mod learner;
pub mod sim;

pub use config::{MeasurementMode, SystemConfig};
pub use design::{design_ap, ApDecision, CaseTag, ScenarioCase};
pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::{classify_scenario, RegionAreas, Scenario};
pub use learner::{BoundaryIndex, ProbBounds, SnrSampleSet};
pub use sim::{run_sweep, AccessPolicy, SimOptions, SimReport, Sweep, SweepValue};
