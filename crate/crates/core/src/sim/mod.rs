//! Grid-world excavation simulator.

mod blueprint;
mod execute;
mod scenario;
mod worksite;

pub use blueprint::{format_snapshot, parse_snapshot, Blueprint, CellSpec, BORDER, DUMP_RING};
pub use execute::{Execution, NoObserver, StepObserver, StepTrace, Turn};
pub use scenario::{
    evaluate, evaluate_observed, evaluate_with_snapshots, ScenarioConfig, DEFAULT_TIMESTEPS,
};
pub use worksite::{
    footprint_distance, BlockReason, Heading, MoveOutcome, RobotState, Worksite,
    BASE_PUSH_CAPACITY, MAX_PUSH_CAPACITY,
};
