//! Artificial neural tissue: genome encoding, development and inference.

mod activation;
mod develop;
mod genome;

pub use activation::{modular_activation, weighted_input, ActivationKind, ActivationParams};
pub use develop::{DecisionNeuron, DiffusionField, Inference, MotorNeuron, Occupant, Tissue};
pub use genome::{
    nominal_slot, random_output, Architecture, CellGene, CellKind, DecisionParams, Genome,
    GenomeSpec, LatticePosition, MotorParams, TissueGene, LAYER_COUNT, MAX_EXTENT,
    MAX_REPLICATION_PROBABILITY, NOMINAL_INPUTS, REPLICATION_RATIO_RANGE, ROBOT_COUNT_RANGE,
    TOP_LAYER,
};
