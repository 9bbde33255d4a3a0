//! Robot controllers.

use crate::behavior::BehaviorVector;
use crate::error::Result;
use crate::sensors::SensorFrame;
use crate::tissue::{Genome, Tissue};
use std::collections::HashMap;

/// Maps a sensor frame to the behaviors executed this timestep.
///
/// One instance drives every robot of a worksite.
pub trait Controller {
    fn decide(&mut self, frame: &SensorFrame) -> BehaviorVector;

    /// Called before each evaluation episode.
    fn reset(&mut self) {}
}

/// Never selects anything.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullController;

impl Controller for NullController {
    fn decide(&mut self, _: &SensorFrame) -> BehaviorVector {
        BehaviorVector::EMPTY
    }
}

/// Developed tissue with a memo of already-seen sensor frames.
#[derive(Clone, Debug)]
pub struct TissueController {
    tissue: Tissue,
    cache: HashMap<u32, BehaviorVector>,
}

impl TissueController {
    pub fn new(tissue: Tissue) -> Self {
        TissueController { tissue, cache: HashMap::new() }
    }

    pub fn from_genome(genome: &Genome) -> Result<Self> {
        Ok(Self::new(Tissue::develop(genome)?))
    }

    pub fn tissue(&self) -> &Tissue {
        &self.tissue
    }
}

impl Controller for TissueController {
    fn decide(&mut self, frame: &SensorFrame) -> BehaviorVector {
        let tissue = &self.tissue;
        *self.cache.entry(frame.code()).or_insert_with(|| tissue.infer(frame))
    }
}

impl<C: Controller + ?Sized> Controller for &mut C {
    fn decide(&mut self, frame: &SensorFrame) -> BehaviorVector {
        (**self).decide(frame)
    }

    fn reset(&mut self) {
        (**self).reset()
    }
}
