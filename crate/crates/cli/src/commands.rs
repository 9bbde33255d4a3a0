//! Subcommand implementations.

use crate::config::{ControllerKind, RunConfig, ScenarioSpec};
use anyhow::{bail, Context, Result};
use antx_core::analysis::{
    robot_count_histogram, scalability_sweep, ActivityLog, Detector, DetectorCounts, RobotCountHistogram,
    SweepGrid, SweepResult,
};
use antx_core::baselines::HandCodedController;
use antx_core::controller::{Controller, TissueController};
use antx_core::evolution::{derive_seed, Evolution, ExcavationFitness, GenerationMetrics, RunResult};
use antx_core::sim::{evaluate_observed, evaluate_with_snapshots, ScenarioConfig};
use antx_core::tissue::{Genome, Tissue};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Stream tag for evaluation scenario seeds.
const EVAL_STREAM: u64 = 0x6576_616c;

/// Seed of evaluation scenario `index` under base seed `seed`.
pub fn eval_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, &[EVAL_STREAM, index as u64])
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

pub fn load_genome(path: &Path) -> Result<Genome> {
    let text = fs::read_to_string(path).with_context(|| format!("reading genome {}", path.display()))?;
    let genome = Genome::from_json(&text).with_context(|| format!("loading genome {}", path.display()))?;
    Tissue::develop(&genome).with_context(|| format!("developing genome {}", path.display()))?;
    Ok(genome)
}

/// Trains a controller and writes its artifacts under `config.out`:
/// `config.json`, `metrics.csv`, `best_genome.json`, optional
/// `checkpoints/gen_NNNNN.json` and `snapshots.txt`.
pub fn cmd_train(config: &RunConfig, parallel: bool) -> Result<RunResult> {
    let architecture = config.architecture()?;
    let scenario = config.scenario.resolve()?;
    let mut evo_cfg = config.evolution.clone();
    evo_cfg.architecture = architecture;
    let out = &config.out;
    create_dir(out)?;
    write_file(&out.join("config.json"), &config.to_json())?;
    if config.checkpoint_interval.is_some() {
        create_dir(&out.join("checkpoints"))?;
    }

    let fitness = ExcavationFitness::new(scenario.clone());
    let mut evolution = Evolution::new(evo_cfg, &fitness)?;
    if !parallel {
        evolution = evolution.sequential();
    }
    let metrics_path = out.join("metrics.csv");
    let mut metrics = BufWriter::new(
        File::create(&metrics_path).with_context(|| format!("cannot write {}", metrics_path.display()))?,
    );
    writeln!(metrics, "{}", GenerationMetrics::csv_header())?;
    let checkpoint = config.checkpoint_interval.filter(|&k| k > 0);
    let result = evolution.run(|m, best| {
        writeln!(metrics, "{}", m.csv_row())?;
        metrics.flush()?;
        if let Some(k) = checkpoint {
            if m.generation % k == 0 {
                let path = out.join("checkpoints").join(format!("gen_{:05}.json", m.generation));
                fs::write(&path, best.genome.to_json())?;
            }
        }
        Ok(())
    })?;
    drop(metrics);
    write_file(&out.join("best_genome.json"), &result.best.genome.to_json())?;

    if let Some(interval) = config.snapshot_interval {
        let robots = fitness.robots_for(&result.best.genome);
        let mut ctl = TissueController::from_genome(&result.best.genome)?;
        let (_, text) =
            evaluate_with_snapshots(&mut ctl, &scenario.with_robots(robots), eval_seed(config.evolution.rng_seed, 0), interval)?;
        write_file(&out.join("snapshots.txt"), &text)?;
    }
    Ok(result)
}

/// A controller built from either a genome file or a built-in baseline.
pub enum ControllerSource {
    Genome(Genome),
    Handcoded,
}

impl ControllerSource {
    pub fn from_args(genome: Option<&Path>, controller: Option<ControllerKind>) -> Result<ControllerSource> {
        match (genome, controller) {
            (Some(path), None | Some(ControllerKind::Ant) | Some(ControllerKind::Fixed)) => {
                Ok(ControllerSource::Genome(load_genome(path)?))
            }
            (None, Some(ControllerKind::Handcoded)) => Ok(ControllerSource::Handcoded),
            (Some(_), Some(ControllerKind::Handcoded)) => bail!("--genome cannot be combined with --controller handcoded"),
            (None, _) => bail!("either --genome PATH or --controller handcoded is required"),
        }
    }

    pub fn controller(&self) -> Result<Box<dyn Controller>> {
        Ok(match self {
            ControllerSource::Genome(g) => Box::new(TissueController::from_genome(g)?),
            ControllerSource::Handcoded => Box::new(HandCodedController::default()),
        })
    }

    /// The genome's own team size, if it evolved one.
    pub fn robot_count(&self) -> Option<usize> {
        match self {
            ControllerSource::Genome(g) => g.tissue.robot_count.map(|n| n as usize),
            ControllerSource::Handcoded => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub seeds: Vec<u64>,
    pub fitness: Vec<f64>,
    pub mean: f64,
    pub detectors: DetectorCounts,
}

impl EvalReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("scenario,seed,fitness\n");
        for (i, (seed, f)) in self.seeds.iter().zip(&self.fitness).enumerate() {
            s.push_str(&format!("{i},{seed},{f}\n"));
        }
        s
    }
}

/// Evaluates a controller over `scenarios` seeded scenarios. With `out`, writes
/// `eval.csv` and, when `snapshot_interval` is set, `snapshots.txt` for the
/// first scenario.
pub fn cmd_eval(
    source: &ControllerSource,
    scenario: &ScenarioConfig,
    scenarios: usize,
    seed: u64,
    out: Option<&Path>,
    snapshot_interval: Option<u64>,
) -> Result<EvalReport> {
    if scenarios == 0 {
        bail!("--scenarios must be at least 1");
    }
    let mut ctl = source.controller()?;
    let mut detectors = DetectorCounts::default();
    let seeds: Vec<u64> = (0..scenarios).map(|i| eval_seed(seed, i)).collect();
    let fitness = seeds
        .iter()
        .map(|&s| evaluate_observed(&mut *ctl, scenario, s, &mut detectors))
        .collect::<antx_core::Result<Vec<f64>>>()?;
    let mean = fitness.iter().sum::<f64>() / fitness.len() as f64;
    let report = EvalReport { seeds, fitness, mean, detectors };
    if let Some(dir) = out {
        create_dir(dir)?;
        write_file(&dir.join("eval.csv"), &report.to_csv())?;
        if let Some(interval) = snapshot_interval {
            let (_, text) = evaluate_with_snapshots(&mut *ctl, scenario, report.seeds[0], interval)?;
            write_file(&dir.join("snapshots.txt"), &text)?;
        }
    }
    Ok(report)
}

/// Runs a scalability sweep and writes `sweep.csv` under `out` when given.
pub fn cmd_sweep(source: &ControllerSource, grid: &SweepGrid, out: Option<&Path>, parallel: bool) -> Result<SweepResult> {
    if grid.robots.is_empty() || grid.areas.is_empty() || grid.depths.is_empty() || grid.timesteps.is_empty() {
        bail!("sweep ranges must be non-empty");
    }
    if grid.robots.contains(&0) {
        bail!("robot counts must be at least 1");
    }
    let result = match source {
        ControllerSource::Genome(g) => scalability_sweep(|| TissueController::from_genome(g), grid, parallel)?,
        ControllerSource::Handcoded => scalability_sweep(|| Ok(HandCodedController::default()), grid, parallel)?,
    };
    if let Some(dir) = out {
        create_dir(dir)?;
        write_file(&dir.join("sweep.csv"), &result.to_csv())?;
    }
    Ok(result)
}

/// Team size evolved by each run's best genome, read from `best_genome.json`
/// in every run directory.
pub fn cmd_histogram(runs: &[PathBuf], out: Option<&Path>) -> Result<RobotCountHistogram> {
    let mut counts = Vec::with_capacity(runs.len());
    for dir in runs {
        let genome = load_genome(&dir.join("best_genome.json"))?;
        let n = genome
            .tissue
            .robot_count
            .with_context(|| format!("{} was not trained with an evolvable robot count", dir.display()))?;
        counts.push(n);
    }
    let hist = robot_count_histogram(&counts)?;
    if let Some(dir) = out {
        create_dir(dir)?;
        let mut s = String::from("robots,runs\n");
        for n in RobotCountHistogram::bins() {
            s.push_str(&format!("{n},{}\n", hist.count(n)));
        }
        write_file(&dir.join("histogram.csv"), &s)?;
    }
    Ok(hist)
}

/// Logs decision-neuron activity of `robot` over one scenario; writes
/// `activity.txt` and `duty_cycle.csv` under `out` when given.
pub fn cmd_activity(
    genome: &Genome,
    scenario: &ScenarioConfig,
    seed: u64,
    robot: usize,
    out: Option<&Path>,
) -> Result<(String, Vec<f64>)> {
    if robot >= scenario.robots {
        bail!("robot index {robot} out of range for {} robots", scenario.robots);
    }
    let tissue = Tissue::develop(genome)?;
    let mut ctl = TissueController::from_genome(genome)?;
    let mut log = ActivityLog::new(&tissue, robot);
    evaluate_observed(&mut ctl, scenario, eval_seed(seed, 0), &mut log)?;
    let text = log.to_ascii();
    let duty = log.duty_cycle();
    if let Some(dir) = out {
        create_dir(dir)?;
        write_file(&dir.join("activity.txt"), &text)?;
        let mut s = String::from("decision_neuron,duty_cycle\n");
        for (i, d) in duty.iter().enumerate() {
            s.push_str(&format!("{i},{d}\n"));
        }
        write_file(&dir.join("duty_cycle.csv"), &s)?;
    }
    Ok((text, duty))
}

/// Detector totals as `name=count` pairs.
pub fn format_detectors(d: &DetectorCounts) -> String {
    Detector::ALL.iter().map(|&k| format!("{}={}", k.name(), d.get(k))).collect::<Vec<_>>().join(" ")
}

/// Worksite config for evaluating `source`: an explicit `--robots` wins,
/// then the genome's evolved team size, then the configured default.
pub fn scenario_for(spec: &ScenarioSpec, robots_flag: Option<usize>, source: &ControllerSource) -> Result<ScenarioConfig> {
    let mut spec = spec.clone();
    if let Some(n) = robots_flag.or_else(|| source.robot_count()) {
        spec.robots = n;
    }
    spec.resolve()
}
