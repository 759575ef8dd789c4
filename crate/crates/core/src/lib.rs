//! Monte Carlo evaluation of medical-response mission policies.
//!
//! Three policies fly the same stochastic patient fields under GNSS and
//! link degradation:
//!
//! * `pi1_teleop`: a teleoperator on GNSS, ordering by discretion;
//! * `pi2_auto`: onboard autonomy with a self-contained estimator and a
//!   nearest-neighbor visit order;
//! * `pi3_geodt`: twin-fused localization and a triage-score visit order.
//!
//! Missions are reduced to intervention delays, windowed service rate,
//! abort rate and an operator workload proxy, then aggregated into per-cell
//! metric vectors, confidence intervals, delay quantiles and Pareto fronts.
//!
//! ```no_run
//! use medsim_core::{run_sweep, SweepConfig};
//!
//! let result = run_sweep(&SweepConfig::default(), None).unwrap();
//! for row in &result.rollup {
//!     println!("{} {:?} {}", row.policy, row.t_int_mean, row.r_fail);
//! }
//! ```

// validators write `!(x > 0.0)` on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod geom;
pub mod localization;
pub mod metrics;
pub mod pareto;
pub mod policy;
pub mod report;
pub mod scenario;
pub mod stats;
pub mod stream;

pub use config::{parse_config, ConfigOverrides, SweepConfig};
pub use engine::{run_mission, MissionSetup, MissionStreams, MissionTrace, PlatformParams};
pub use error::{Error, Result};
pub use experiment::{analyze, run_sweep, SweepResult, TrialRecord};
pub use geom::Point;
pub use localization::{DegradationProfile, LocalizationParams, PoseEstimate};
pub use metrics::{dominates, MetricParams, MetricVector, TrialMetrics};
pub use pareto::{pareto_front, ParetoPoint};
pub use policy::{PolicyId, TriageWeights, VisitPlan};
pub use scenario::{Condition, Patient, Scenario, ScenarioParams};
pub use stream::{derive_stream, Purpose, SeedSpec, Stream};
