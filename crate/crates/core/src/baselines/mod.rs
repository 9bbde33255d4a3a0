//! Reference controllers.

mod fixed;
mod handcoded;

pub use fixed::{fixed_net_infer, FixedTopologyController};
pub use handcoded::{hand_coded_decide, HandCodedController};
