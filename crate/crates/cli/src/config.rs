//! Resolved run configuration.

use anyhow::{bail, Context, Result};
use antx_core::evolution::EvolutionConfig;
use antx_core::sim::{Blueprint, ScenarioConfig};
use antx_core::tissue::Architecture;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// P=40, 800 generations, 10 scenarios, T=250.
    Desk,
    /// P=100, 5000 generations, 100 scenarios, T=250.
    Paper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    Ant,
    Fixed,
    Handcoded,
}

/// Worksite parameters as given on the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub area_w: usize,
    pub area_h: usize,
    pub depth: u8,
    pub robots: usize,
    pub timesteps: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blueprint: Option<PathBuf>,
}

impl ScenarioSpec {
    /// Loads the blueprint file, if any, and builds the simulator config.
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let blueprint = match &self.blueprint {
            Some(path) => Some(load_blueprint(path)?),
            None => None,
        };
        let cfg = ScenarioConfig {
            area_w: self.area_w,
            area_h: self.area_h,
            depth: self.depth,
            robots: self.robots,
            timesteps: self.timesteps,
            blueprint,
        };
        cfg.blueprint().context("invalid worksite")?;
        if cfg.timesteps == 0 {
            bail!("--timesteps must be at least 1");
        }
        Ok(cfg)
    }
}

pub fn load_blueprint(path: &Path) -> Result<Blueprint> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading blueprint {}", path.display()))?;
    Blueprint::parse(&text).with_context(|| format!("parsing blueprint {}", path.display()))
}

/// Everything needed to reproduce a training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub profile: Profile,
    pub controller: ControllerKind,
    pub evolution: EvolutionConfig,
    pub scenario: ScenarioSpec,
    pub out: PathBuf,
    /// Steps between heightfield snapshots of the final best controller.
    #[serde(default)]
    pub snapshot_interval: Option<u64>,
    /// Generations between best-genome checkpoints.
    #[serde(default)]
    pub checkpoint_interval: Option<usize>,
}

impl RunConfig {
    pub fn for_profile(profile: Profile) -> RunConfig {
        let (population_size, generations, scenarios_per_eval) = match profile {
            Profile::Desk => (40, 800, 10),
            Profile::Paper => (100, 5000, 100),
        };
        RunConfig {
            profile,
            controller: ControllerKind::Ant,
            evolution: EvolutionConfig {
                population_size,
                generations,
                scenarios_per_eval,
                ..EvolutionConfig::default()
            },
            scenario: ScenarioSpec {
                area_w: 8,
                area_h: 8,
                depth: 1,
                robots: 4,
                timesteps: 250,
                blueprint: None,
            },
            out: PathBuf::from("runs/latest"),
            snapshot_interval: None,
            checkpoint_interval: None,
        }
    }

    pub fn architecture(&self) -> Result<Architecture> {
        match self.controller {
            ControllerKind::Ant => Ok(Architecture::Ant),
            ControllerKind::Fixed => Ok(Architecture::Fixed),
            ControllerKind::Handcoded => bail!("the hand-coded controller cannot be trained"),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Parses `WxH`, e.g. `8x8`.
pub fn parse_area(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
    if w == 0 || h == 0 {
        return Err(format!("area must be non-empty, got {s:?}"));
    }
    Ok((w, h))
}

/// Parses `1..10` (inclusive) or a comma-separated list such as `1,2,4`.
pub fn parse_count_list(s: &str) -> Result<Vec<usize>, String> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
        let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|_| format!("bad range end in {s:?}"))?;
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse().map_err(|_| format!("bad number {p:?} in {s:?}")))
        .collect()
}
