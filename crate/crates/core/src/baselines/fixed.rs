//! Fixed-topology feedforward baseline.
//!
//! The network is an ungated tissue: every live motor neuron takes part in
//! every step. It shares the genome format, development and evolutionary loop
//! with the gated controller; only decision neurons and cell-level flags are
//! absent.

use crate::behavior::BehaviorVector;
use crate::controller::{Controller, TissueController};
use crate::error::{Error, Result};
use crate::sensors::SensorFrame;
use crate::tissue::{Architecture, Genome, GenomeSpec, Tissue};
use rand::Rng;

#[derive(Clone, Debug)]
pub struct FixedTopologyController {
    inner: TissueController,
}

impl FixedTopologyController {
    pub fn from_genome(genome: &Genome) -> Result<Self> {
        if genome.architecture != Architecture::Fixed {
            return Err(Error::Development("genome is not a fixed-topology network".into()));
        }
        Ok(FixedTopologyController { inner: TissueController::from_genome(genome)? })
    }

    /// Random network of `neurons` motor neurons spread over the four layers.
    pub fn random_genome<R: Rng + ?Sized>(neurons: usize, rng: &mut R) -> Genome {
        let spec = GenomeSpec {
            architecture: Architecture::Fixed,
            neurons,
            evolvable_robot_count: false,
        };
        Genome::random(&spec, rng)
    }

    pub fn tissue(&self) -> &Tissue {
        self.inner.tissue()
    }
}

/// Full forward pass of a fixed network.
pub fn fixed_net_infer(controller: &FixedTopologyController, frame: &SensorFrame) -> BehaviorVector {
    controller.tissue().infer(frame)
}

impl Controller for FixedTopologyController {
    fn decide(&mut self, frame: &SensorFrame) -> BehaviorVector {
        self.inner.decide(frame)
    }
}
