//! Generational loop: evaluation, elitism and breeding.

use super::fitness::{derive_seed, Evaluation, FitnessFn};
use super::operators::{crossover, mutate, replicate_cell, tournament_select};
use crate::analysis::{Detector, DetectorCounts};
use crate::error::{Error, Result};
use crate::parallel::map_items;
use crate::tissue::{Architecture, Genome, GenomeSpec, Tissue};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Stream tags mixed into the run seed.
const BREEDING_STREAM: u64 = 0x62_7265_6564;
const SCENARIO_STREAM: u64 = 0x7363_656e;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub crossover_probability: f64,
    pub mutation_probability: f64,
    /// Tournament size as a fraction of the population.
    pub tournament_fraction: f64,
    pub generations: usize,
    pub scenarios_per_eval: usize,
    /// Inclusive range of initial cell-gene counts.
    pub initial_neuron_range: (usize, usize),
    pub evolvable_robot_count: bool,
    #[serde(default)]
    pub architecture: Architecture,
    pub rng_seed: u64,
    /// Reuse generation 0's scenario seeds in every generation.
    #[serde(default)]
    pub freeze_scenarios: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            population_size: 100,
            crossover_probability: 0.7,
            mutation_probability: 0.025,
            tournament_fraction: 0.06,
            generations: 5000,
            scenarios_per_eval: 100,
            initial_neuron_range: (40, 120),
            evolvable_robot_count: false,
            architecture: Architecture::Ant,
            rng_seed: 0,
            freeze_scenarios: false,
        }
    }
}

impl EvolutionConfig {
    pub fn tournament_size(&self) -> usize {
        ((self.tournament_fraction * self.population_size as f64).round() as usize).max(2)
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")))
            }
        };
        if self.population_size == 0 {
            return Err(Error::Config("population size must be at least 1".into()));
        }
        if self.scenarios_per_eval == 0 {
            return Err(Error::Config("at least one scenario per evaluation is required".into()));
        }
        let (lo, hi) = self.initial_neuron_range;
        if lo == 0 || lo > hi {
            return Err(Error::Config(format!("invalid initial neuron range {lo}..={hi}")));
        }
        prob("crossover probability", self.crossover_probability)?;
        prob("mutation probability", self.mutation_probability)?;
        prob("tournament fraction", self.tournament_fraction)
    }

    /// Scenario seeds shared by every member of `generation`.
    pub fn scenario_seeds(&self, generation: usize) -> Vec<u64> {
        let g = if self.freeze_scenarios { 0 } else { generation as u64 };
        (0..self.scenarios_per_eval as u64)
            .map(|s| derive_seed(self.rng_seed, &[SCENARIO_STREAM, g, s]))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluatedGenome {
    pub genome: Genome,
    pub evaluation: Evaluation,
}

impl EvaluatedGenome {
    pub fn fitness(&self) -> f64 {
        self.evaluation.fitness
    }
}

/// One metrics row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationMetrics {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub neuron_count_best: usize,
    pub robots_best: Option<u32>,
    pub detectors: DetectorCounts,
}

impl GenerationMetrics {
    pub fn csv_header() -> String {
        let mut h = String::from("generation,best_fitness,mean_fitness,neuron_count_best,robots_best");
        for d in Detector::ALL {
            h.push(',');
            h.push_str(d.name());
        }
        h
    }

    pub fn csv_row(&self) -> String {
        let mut row = format!(
            "{},{},{},{},{}",
            self.generation,
            self.best_fitness,
            self.mean_fitness,
            self.neuron_count_best,
            self.robots_best.map(|n| n.to_string()).unwrap_or_default()
        );
        for d in Detector::ALL {
            let _ = write!(row, ",{}", self.detectors.get(d));
        }
        row
    }
}

/// Random initial population; each member's size is uniform in the configured range.
pub fn init_population<R: Rng + ?Sized>(config: &EvolutionConfig, rng: &mut R) -> Vec<Genome> {
    let (lo, hi) = config.initial_neuron_range;
    (0..config.population_size)
        .map(|_| {
            let spec = GenomeSpec {
                architecture: config.architecture,
                neurons: rng.gen_range(lo..=hi),
                evolvable_robot_count: config.evolvable_robot_count,
            };
            Genome::random(&spec, rng)
        })
        .collect()
}

/// Evaluates every member on the same scenario seeds.
pub fn evaluate_population<F: FitnessFn + ?Sized>(
    population: &[Genome],
    fitness: &F,
    seeds: &[u64],
    parallel: bool,
) -> Result<Vec<Evaluation>> {
    map_items(population, parallel, |g| fitness.evaluate(g, seeds)).into_iter().collect()
}

/// Index of the fittest member; ties go to the lowest index.
pub fn best_index(evaluations: &[Evaluation]) -> usize {
    evaluations
        .iter()
        .enumerate()
        .fold(0, |best, (i, e)| if e.fitness > evaluations[best].fitness { i } else { best })
}

/// Next generation: the best member survives unchanged; the rest are bred by
/// tournament selection, crossover, mutation and cell replication.
pub fn breed<R: Rng + ?Sized>(
    config: &EvolutionConfig,
    population: &[Genome],
    fitness: &[f64],
    rng: &mut R,
) -> Vec<Genome> {
    let best = fitness
        .iter()
        .enumerate()
        .fold(0, |b, (i, &f)| if f > fitness[b] { i } else { b });
    let size = config.tournament_size();
    let mut next = Vec::with_capacity(population.len());
    next.push(population[best].clone());
    while next.len() < population.len() {
        let a = &population[tournament_select(fitness, size, rng)];
        let b = &population[tournament_select(fitness, size, rng)];
        let (c1, c2) = if rng.gen_bool(config.crossover_probability) {
            crossover(a, b, rng)
        } else {
            (a.clone(), b.clone())
        };
        for mut child in [c1, c2] {
            if next.len() == population.len() {
                break;
            }
            mutate(&mut child, config.mutation_probability, rng);
            replicate_cell(&mut child, rng);
            next.push(child);
        }
    }
    next
}

/// Evaluates `population` for `generation` and breeds its successor.
pub fn run_generation<F: FitnessFn + ?Sized, R: Rng + ?Sized>(
    population: &[Genome],
    fitness: &F,
    config: &EvolutionConfig,
    generation: usize,
    rng: &mut R,
    parallel: bool,
) -> Result<(Vec<Genome>, GenerationMetrics, EvaluatedGenome)> {
    let seeds = config.scenario_seeds(generation);
    let evaluations = evaluate_population(population, fitness, &seeds, parallel)?;
    let (metrics, best) = summarize(population, evaluations.clone(), generation)?;
    let scores: Vec<f64> = evaluations.iter().map(|e| e.fitness).collect();
    Ok((breed(config, population, &scores, rng), metrics, best))
}

fn summarize(
    population: &[Genome],
    evaluations: Vec<Evaluation>,
    generation: usize,
) -> Result<(GenerationMetrics, EvaluatedGenome)> {
    let b = best_index(&evaluations);
    let mean = evaluations.iter().map(|e| e.fitness).sum::<f64>() / evaluations.len() as f64;
    let genome = population[b].clone();
    let evaluation = evaluations.into_iter().nth(b).expect("best index in range");
    let metrics = GenerationMetrics {
        generation,
        best_fitness: evaluation.fitness,
        mean_fitness: mean,
        neuron_count_best: Tissue::develop(&genome)?.neuron_count(),
        robots_best: genome.tissue.robot_count,
        detectors: evaluation.detectors,
    };
    Ok((metrics, EvaluatedGenome { genome, evaluation }))
}

/// A training run in progress.
pub struct Evolution<'f, F: FitnessFn + ?Sized> {
    config: EvolutionConfig,
    fitness: &'f F,
    population: Vec<Genome>,
    rng: ChaCha8Rng,
    generation: usize,
    parallel: bool,
    best: Option<EvaluatedGenome>,
}

/// Outcome of a completed run.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub metrics: Vec<GenerationMetrics>,
    /// Fittest member of the final generation.
    pub best: EvaluatedGenome,
}

impl<'f, F: FitnessFn + ?Sized> Evolution<'f, F> {
    pub fn new(config: EvolutionConfig, fitness: &'f F) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.rng_seed, &[BREEDING_STREAM]));
        let population = init_population(&config, &mut rng);
        Ok(Evolution {
            config,
            fitness,
            population,
            rng,
            generation: 0,
            parallel: crate::parallel::AVAILABLE,
            best: None,
        })
    }

    /// Evaluate members one at a time on the calling thread.
    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn config(&self) -> &EvolutionConfig {
        &self.config
    }

    pub fn population(&self) -> &[Genome] {
        &self.population
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Evaluates the current generation; breeds the next one unless this was
    /// the last generation.
    pub fn step(&mut self) -> Result<(GenerationMetrics, &EvaluatedGenome)> {
        let seeds = self.config.scenario_seeds(self.generation);
        let evaluations = evaluate_population(&self.population, self.fitness, &seeds, self.parallel)?;
        let scores: Vec<f64> = evaluations.iter().map(|e| e.fitness).collect();
        let (metrics, best) = summarize(&self.population, evaluations, self.generation)?;
        if self.generation < self.config.generations {
            self.population = breed(&self.config, &self.population, &scores, &mut self.rng);
        }
        self.generation += 1;
        self.best = Some(best);
        Ok((metrics, self.best.as_ref().expect("just set")))
    }

    /// Runs generations `0..=generations`, calling `on_generation` after each.
    pub fn run<C>(mut self, mut on_generation: C) -> Result<RunResult>
    where
        C: FnMut(&GenerationMetrics, &EvaluatedGenome) -> Result<()>,
    {
        let mut metrics = Vec::with_capacity(self.config.generations + 1);
        while self.generation <= self.config.generations {
            let (m, best) = self.step()?;
            on_generation(&m, best)?;
            metrics.push(m);
        }
        Ok(RunResult { metrics, best: self.best.expect("at least one generation") })
    }
}
