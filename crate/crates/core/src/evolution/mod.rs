//! Genetic algorithm over tissue genomes.

mod fitness;
mod operators;
mod run;

pub use fitness::{derive_seed, Evaluation, ExcavationFitness, FitnessFn, ThresholdFitness};
pub use operators::{crossover, exchange_across, mutate, replicate_cell, tournament_select, CrossoverPlane};
pub use run::{
    best_index, breed, evaluate_population, init_population, run_generation, EvaluatedGenome,
    Evolution, EvolutionConfig, GenerationMetrics, RunResult,
};
