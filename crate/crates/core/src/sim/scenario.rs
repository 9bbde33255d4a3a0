//! Scenario setup and controller evaluation.

use super::blueprint::{format_snapshot, Blueprint};
use super::execute::{NoObserver, StepObserver};
use super::worksite::Worksite;
use crate::controller::Controller;
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Horizon of one training evaluation.
pub const DEFAULT_TIMESTEPS: u64 = 250;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub area_w: usize,
    pub area_h: usize,
    pub depth: u8,
    pub robots: usize,
    pub timesteps: u64,
    /// Replaces the generated excavation layout when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blueprint: Option<Blueprint>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            area_w: 8,
            area_h: 8,
            depth: 1,
            robots: 4,
            timesteps: DEFAULT_TIMESTEPS,
            blueprint: None,
        }
    }
}

impl ScenarioConfig {
    pub fn with_robots(&self, robots: usize) -> ScenarioConfig {
        ScenarioConfig { robots, ..self.clone() }
    }

    pub fn blueprint(&self) -> Result<Blueprint> {
        match &self.blueprint {
            Some(bp) => Ok(bp.clone()),
            None => Blueprint::excavation(self.area_w, self.area_h, self.depth),
        }
    }

    /// Builds the initial worksite; robot poses are drawn from `rng`.
    pub fn generate(&self, rng: &mut ChaCha8Rng) -> Result<Worksite> {
        Worksite::with_random_robots(self.blueprint()?, self.robots, rng)
    }
}

/// Runs one seeded scenario and returns the final fitness.
pub fn evaluate<C: Controller + ?Sized>(
    controller: &mut C,
    config: &ScenarioConfig,
    seed: u64,
) -> Result<f64> {
    evaluate_observed(controller, config, seed, &mut NoObserver)
}

pub fn evaluate_observed<C, O>(
    controller: &mut C,
    config: &ScenarioConfig,
    seed: u64,
    observer: &mut O,
) -> Result<f64>
where
    C: Controller + ?Sized,
    O: StepObserver + ?Sized,
{
    if config.timesteps == 0 {
        return Err(Error::Config("timesteps must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut site = config.generate(&mut rng)?;
    controller.reset();
    for _ in 0..config.timesteps {
        site.step(controller, &mut rng, observer);
    }
    Ok(site.fitness())
}

/// Like [`evaluate`], also returning heightfield snapshots every `interval`
/// steps (including the initial and final states).
pub fn evaluate_with_snapshots<C: Controller + ?Sized>(
    controller: &mut C,
    config: &ScenarioConfig,
    seed: u64,
    interval: u64,
) -> Result<(f64, String)> {
    if config.timesteps == 0 {
        return Err(Error::Config("timesteps must be at least 1".into()));
    }
    let interval = interval.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut site = config.generate(&mut rng)?;
    controller.reset();
    let mut out = format_snapshot(site.width(), site.heights(), 0);
    for _ in 0..config.timesteps {
        site.step(controller, &mut rng, &mut NoObserver);
        if site.timestep() % interval == 0 || site.timestep() == config.timesteps {
            out.push('\n');
            out.push_str(&format_snapshot(site.width(), site.heights(), site.timestep()));
        }
    }
    Ok((site.fitness(), out))
}
