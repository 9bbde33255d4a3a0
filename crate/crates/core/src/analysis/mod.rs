//! Behavior instrumentation and post-hoc analysis of evolved controllers.

mod activity;
mod detectors;
mod histogram;
mod sweep;

pub use activity::ActivityLog;
pub use detectors::{detect, Detector, DetectorCounts, DetectorFlags, DETECTOR_COUNT};
pub use histogram::{robot_count_histogram, RobotCountHistogram};
pub use sweep::{mean_std, scalability_sweep, SweepCell, SweepGrid, SweepResult};
