//! Artificial neural tissue controllers evolved for grid-world multirobot
//! excavation.

pub mod analysis;
pub mod baselines;
pub mod behavior;
pub mod controller;
pub mod error;
pub mod evolution;
pub mod parallel;
pub mod sensors;
pub mod sim;
pub mod tissue;

pub use error::{Error, Result};
