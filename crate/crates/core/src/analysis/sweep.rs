//! Scalability sweeps: one controller evaluated across team sizes, areas,
//! depths and horizons.

use crate::controller::Controller;
use crate::error::Result;
use crate::evolution::derive_seed;
use crate::parallel::map_items;
use crate::sim::{evaluate, ScenarioConfig};
use serde::{Deserialize, Serialize};

/// Axes of a sweep grid. Every combination becomes one cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub robots: Vec<usize>,
    /// (width, height) pairs.
    pub areas: Vec<(usize, usize)>,
    pub depths: Vec<u8>,
    pub timesteps: Vec<u64>,
    pub reps: usize,
    pub seed_base: u64,
}

impl SweepGrid {
    fn cells(&self) -> Vec<ScenarioConfig> {
        let mut out = Vec::new();
        for &(area_w, area_h) in &self.areas {
            for &depth in &self.depths {
                for &timesteps in &self.timesteps {
                    for &robots in &self.robots {
                        out.push(ScenarioConfig { area_w, area_h, depth, robots, timesteps, blueprint: None });
                    }
                }
            }
        }
        out
    }

    /// Seed of repetition `rep`; shared by every cell.
    pub fn rep_seed(&self, rep: usize) -> u64 {
        derive_seed(self.seed_base, &[rep as u64])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub robots: usize,
    pub area_w: usize,
    pub area_h: usize,
    pub depth: u8,
    pub timesteps: u64,
    pub mean: f64,
    /// Sample standard deviation; zero with fewer than two repetitions.
    pub std: f64,
    pub reps: usize,
    pub seed_base: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// First cell matching the given coordinates.
    pub fn cell(&self, robots: usize, area: (usize, usize), depth: u8, timesteps: u64) -> Option<&SweepCell> {
        self.cells.iter().find(|c| {
            c.robots == robots && (c.area_w, c.area_h) == area && c.depth == depth && c.timesteps == timesteps
        })
    }

    pub const CSV_HEADER: &'static str = "robots,area_w,area_h,depth,timesteps,mean,std,reps,seed_base";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for c in &self.cells {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                c.robots, c.area_w, c.area_h, c.depth, c.timesteps, c.mean, c.std, c.reps, c.seed_base
            ));
        }
        s
    }
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Evaluates a fresh controller from `make` on every cell of `grid`. Cells are
/// evaluated in parallel when `parallel` is set; results are in grid order
/// (area, depth, horizon, then team size). `reps == 0` yields an empty result.
pub fn scalability_sweep<C, F>(make: F, grid: &SweepGrid, parallel: bool) -> Result<SweepResult>
where
    C: Controller,
    F: Fn() -> Result<C> + Sync + Send,
{
    if grid.reps == 0 {
        return Ok(SweepResult::default());
    }
    let seeds: Vec<u64> = (0..grid.reps).map(|r| grid.rep_seed(r)).collect();
    let cells = map_items(&grid.cells(), parallel, |cfg| -> Result<SweepCell> {
        let mut controller = make()?;
        let scores = seeds.iter().map(|&s| evaluate(&mut controller, cfg, s)).collect::<Result<Vec<_>>>()?;
        let (mean, std) = mean_std(&scores);
        Ok(SweepCell {
            robots: cfg.robots,
            area_w: cfg.area_w,
            area_h: cfg.area_h,
            depth: cfg.depth,
            timesteps: cfg.timesteps,
            mean,
            std,
            reps: grid.reps,
            seed_base: grid.seed_base,
        })
    });
    Ok(SweepResult { cells: cells.into_iter().collect::<Result<_>>()? })
}
