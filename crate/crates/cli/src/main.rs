use anyhow::{bail, Result};
use antx::commands::{
    cmd_activity, cmd_eval, cmd_histogram, cmd_sweep, cmd_train, format_detectors, load_genome, scenario_for,
    ControllerSource,
};
use antx::config::{parse_area, parse_count_list, ControllerKind, Profile, RunConfig, ScenarioSpec};
use antx_core::analysis::SweepGrid;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "antx", version, about = "Evolve and analyse neural-tissue excavation controllers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// Base seed; every random draw of the run derives from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Robots per scenario.
    #[arg(long)]
    robots: Option<usize>,
    /// Excavation area, e.g. 8x8.
    #[arg(long, value_parser = parse_area)]
    area: Option<(usize, usize)>,
    /// Goal depth below ground.
    #[arg(long)]
    depth: Option<u8>,
    /// Timesteps per scenario.
    #[arg(long)]
    timesteps: Option<u64>,
    /// Scenarios per evaluation.
    #[arg(long)]
    scenarios: Option<usize>,
    /// Blueprint file replacing the generated layout.
    #[arg(long, value_name = "PATH")]
    blueprint: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads; 1 runs everything on the calling thread.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum)]
    profile: Option<Profile>,
}

impl Common {
    fn base(&self) -> RunConfig {
        RunConfig::for_profile(self.profile.unwrap_or(Profile::Desk))
    }

    /// Applies explicit worksite flags on top of `spec`.
    fn scenario(&self, mut spec: ScenarioSpec) -> ScenarioSpec {
        if let Some((w, h)) = self.area {
            spec.area_w = w;
            spec.area_h = h;
        }
        if let Some(d) = self.depth {
            spec.depth = d;
        }
        if let Some(t) = self.timesteps {
            spec.timesteps = t;
        }
        if let Some(n) = self.robots {
            spec.robots = n;
        }
        if self.blueprint.is_some() {
            spec.blueprint = self.blueprint.clone();
        }
        spec
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn workers(&self) -> Result<usize> {
        match self.workers {
            Some(0) => bail!("--workers must be at least 1"),
            Some(n) => Ok(n),
            None => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a controller.
    Train(TrainArgs),
    /// Evaluate a genome or the hand-coded controller.
    Eval(EvalArgs),
    /// Evaluate a controller over a grid of team sizes and worksites.
    Sweep(SweepArgs),
    /// Post-hoc analyses of trained controllers.
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCommand,
    },
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    /// Re-run an archived config.json; other flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    controller: Option<ControllerKind>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    /// Let evolution choose the team size (1..=10).
    #[arg(long)]
    evolve_robots: bool,
    /// Evaluate every generation on the first generation's scenarios.
    #[arg(long)]
    freeze_scenarios: bool,
    /// Write the best genome every K generations.
    #[arg(long, value_name = "K")]
    checkpoint_every: Option<usize>,
    /// Write heightfield snapshots of the final best controller every S steps.
    #[arg(long, value_name = "S")]
    snapshot_every: Option<u64>,
}

#[derive(Args)]
struct SourceArgs {
    #[arg(long)]
    genome: Option<PathBuf>,
    #[arg(long, value_enum)]
    controller: Option<ControllerKind>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_name = "S")]
    snapshot_every: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    source: SourceArgs,
    /// Team sizes, e.g. `1..10` or `1,2,4`.
    #[arg(long, value_parser = parse_count_list, default_value = "1..10")]
    robot_counts: Vec<usize>,
    /// Areas, comma separated, e.g. `6x6,8x8`; defaults to --area.
    #[arg(long, value_delimiter = ',', value_parser = parse_area)]
    areas: Vec<(usize, usize)>,
    /// Goal depths, comma separated; defaults to --depth.
    #[arg(long, value_delimiter = ',')]
    depths: Vec<u8>,
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Histogram of evolved team sizes over run directories.
    Histogram {
        #[command(flatten)]
        common: Common,
        /// Run directories containing best_genome.json.
        #[arg(required = true)]
        runs: Vec<PathBuf>,
    },
    /// Detector counts of a controller over seeded scenarios.
    Detectors {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Decision-neuron activity of one robot over one scenario.
    Activity {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        genome: PathBuf,
        #[arg(long, default_value_t = 0)]
        robot: usize,
    },
}

/// Runs `f` on a pool of `workers` threads; `f` receives whether to parallelize.
#[cfg(feature = "parallel")]
fn with_workers<T: Send>(workers: usize, f: impl FnOnce(bool) -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| anyhow::anyhow!("building worker pool: {e}"))?;
    pool.install(|| f(workers > 1))
}

#[cfg(not(feature = "parallel"))]
fn with_workers<T: Send>(_workers: usize, f: impl FnOnce(bool) -> Result<T> + Send) -> Result<T> {
    f(false)
}

fn train(args: TrainArgs) -> Result<()> {
    let c = &args.common;
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => c.base(),
    };
    if args.config.is_some() {
        if let Some(p) = c.profile {
            cfg.profile = p;
        }
    }
    cfg.scenario = c.scenario(cfg.scenario);
    if let Some(s) = c.seed {
        cfg.evolution.rng_seed = s;
    }
    if let Some(n) = c.scenarios {
        cfg.evolution.scenarios_per_eval = n;
    }
    if let Some(out) = &c.out {
        cfg.out = out.clone();
    }
    if let Some(k) = args.controller {
        cfg.controller = k;
    }
    if let Some(g) = args.generations {
        cfg.evolution.generations = g;
    }
    if let Some(p) = args.population {
        cfg.evolution.population_size = p;
    }
    cfg.evolution.evolvable_robot_count |= args.evolve_robots;
    cfg.evolution.freeze_scenarios |= args.freeze_scenarios;
    if args.checkpoint_every.is_some() {
        cfg.checkpoint_interval = args.checkpoint_every;
    }
    if args.snapshot_every.is_some() {
        cfg.snapshot_interval = args.snapshot_every;
    }
    let workers = c.workers()?;
    let result = with_workers(workers, |par| cmd_train(&cfg, par))?;
    let last = result.metrics.last().expect("at least one generation");
    println!(
        "generations={} best_fitness={} neurons={} robots={}",
        last.generation,
        last.best_fitness,
        last.neuron_count_best,
        last.robots_best.map_or("-".to_string(), |n| n.to_string())
    );
    println!("artifacts in {}", cfg.out.display());
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let c = &args.common;
    let base = c.base();
    let source = ControllerSource::from_args(args.source.genome.as_deref(), args.source.controller)?;
    let scenario = scenario_for(&c.scenario(base.scenario.clone()), c.robots, &source)?;
    let scenarios = c.scenarios.unwrap_or(base.evolution.scenarios_per_eval);
    let report = cmd_eval(&source, &scenario, scenarios, c.seed(), c.out.as_deref(), args.snapshot_every)?;
    for (i, (seed, f)) in report.seeds.iter().zip(&report.fitness).enumerate() {
        println!("scenario {i} seed {seed} fitness {f}");
    }
    println!("robots {} mean fitness {}", scenario.robots, report.mean);
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let c = &args.common;
    let base = c.base();
    let source = ControllerSource::from_args(args.source.genome.as_deref(), args.source.controller)?;
    let spec = c.scenario(base.scenario.clone());
    if spec.blueprint.is_some() {
        bail!("sweeps generate their own layouts; --blueprint is not supported");
    }
    let grid = SweepGrid {
        robots: args.robot_counts,
        areas: if args.areas.is_empty() { vec![(spec.area_w, spec.area_h)] } else { args.areas },
        depths: if args.depths.is_empty() { vec![spec.depth] } else { args.depths },
        timesteps: vec![spec.timesteps],
        reps: c.scenarios.unwrap_or(base.evolution.scenarios_per_eval),
        seed_base: c.seed(),
    };
    let workers = c.workers()?;
    let result = with_workers(workers, |par| cmd_sweep(&source, &grid, c.out.as_deref(), par))?;
    print!("{}", result.to_csv());
    Ok(())
}

fn analyze(what: AnalyzeCommand) -> Result<()> {
    match what {
        AnalyzeCommand::Histogram { common, runs } => {
            let h = cmd_histogram(&runs, common.out.as_deref())?;
            for n in antx_core::analysis::RobotCountHistogram::bins() {
                println!("robots {n:>2} runs {}", h.count(n));
            }
            println!(
                "chi_square {} df {} p_value {} mode {}",
                h.chi_square, h.degrees_of_freedom, h.p_value, h.mode()
            );
        }
        AnalyzeCommand::Detectors { common, source } => {
            let base = common.base();
            let source = ControllerSource::from_args(source.genome.as_deref(), source.controller)?;
            let scenario = scenario_for(&common.scenario(base.scenario.clone()), common.robots, &source)?;
            let scenarios = common.scenarios.unwrap_or(base.evolution.scenarios_per_eval);
            let report = cmd_eval(&source, &scenario, scenarios, common.seed(), None, None)?;
            println!("mean fitness {} {}", report.mean, format_detectors(&report.detectors));
        }
        AnalyzeCommand::Activity { common, genome, robot } => {
            let base = common.base();
            let genome = load_genome(&genome)?;
            let source = ControllerSource::Genome(genome);
            let scenario = scenario_for(&common.scenario(base.scenario.clone()), common.robots, &source)?;
            let ControllerSource::Genome(genome) = source else { unreachable!() };
            let (text, duty) = cmd_activity(&genome, &scenario, common.seed(), robot, common.out.as_deref())?;
            if common.out.is_none() {
                print!("{text}");
            }
            let duty: Vec<String> = duty.iter().map(|d| format!("{d:.3}")).collect();
            println!("duty_cycle {}", duty.join(" "));
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
        Command::Analyze { what } => analyze(what),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
