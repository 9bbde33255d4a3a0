//! Fitness evaluation of genomes.

use crate::analysis::DetectorCounts;
use crate::controller::TissueController;
use crate::error::Result;
use crate::sim::{evaluate_observed, ScenarioConfig};
use crate::tissue::{CellKind, Genome};

/// Mixes `parts` into `base` with splitmix64 steps; used to give every
/// (run, generation, scenario) triple its own independent seed.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    parts.iter().fold(splitmix(base), |acc, &p| splitmix(acc ^ splitmix(p)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    /// Mean of `scenario_fitness`.
    pub fitness: f64,
    pub scenario_fitness: Vec<f64>,
    pub detectors: DetectorCounts,
}

impl Evaluation {
    pub fn from_scenarios(scenario_fitness: Vec<f64>, detectors: DetectorCounts) -> Self {
        let fitness = if scenario_fitness.is_empty() {
            0.0
        } else {
            scenario_fitness.iter().sum::<f64>() / scenario_fitness.len() as f64
        };
        Evaluation { fitness, scenario_fitness, detectors }
    }
}

/// Scores a genome over a set of seeded scenarios.
pub trait FitnessFn: Sync {
    fn evaluate(&self, genome: &Genome, seeds: &[u64]) -> Result<Evaluation>;
}

/// Mean blueprint agreement of a team driven by the genome's controller.
#[derive(Clone, Debug)]
pub struct ExcavationFitness {
    pub scenario: ScenarioConfig,
}

impl ExcavationFitness {
    pub fn new(scenario: ScenarioConfig) -> Self {
        ExcavationFitness { scenario }
    }

    /// Team size for `genome`: its own robot count when it carries one.
    pub fn robots_for(&self, genome: &Genome) -> usize {
        genome.tissue.robot_count.map_or(self.scenario.robots, |n| n as usize)
    }
}

impl FitnessFn for ExcavationFitness {
    fn evaluate(&self, genome: &Genome, seeds: &[u64]) -> Result<Evaluation> {
        let mut controller = TissueController::from_genome(genome)?;
        let scenario = self.scenario.with_robots(self.robots_for(genome));
        let mut detectors = DetectorCounts::default();
        let scores = seeds
            .iter()
            .map(|&seed| evaluate_observed(&mut controller, &scenario, seed, &mut detectors))
            .collect::<Result<Vec<_>>>()?;
        Ok(Evaluation::from_scenarios(scores, detectors))
    }
}

/// Null model that ignores the robot count: the mean normalized first
/// threshold over all cell genes.
#[derive(Clone, Copy, Debug, Default)]
pub struct ThresholdFitness;

impl FitnessFn for ThresholdFitness {
    fn evaluate(&self, genome: &Genome, seeds: &[u64]) -> Result<Evaluation> {
        let total: f64 = genome
            .genes
            .iter()
            .map(|g| {
                let a = match &g.kind {
                    CellKind::Motor(p) => p.activation,
                    CellKind::Decision(p) => p.activation,
                };
                (a.theta1 + 1.0) / 2.0
            })
            .sum();
        let f = total / genome.genes.len().max(1) as f64;
        Ok(Evaluation::from_scenarios(vec![f; seeds.len().max(1)], DetectorCounts::default()))
    }
}
