use antx_core::analysis::{detect, DetectorCounts};
use antx_core::behavior::{Behavior, BehaviorVector};
use antx_core::controller::{Controller, NullController, TissueController};
use antx_core::evolution::{
    crossover, mutate, replicate_cell, Evolution, EvolutionConfig, ExcavationFitness,
};
use antx_core::sensors::{SensorFrame, STATE_SPACE};
use antx_core::sim::{
    evaluate, evaluate_observed, Blueprint, Heading, RobotState, ScenarioConfig, Worksite,
};
use antx_core::tissue::{Architecture, Genome, GenomeSpec, Tissue};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

fn genome(seed: u64, neurons: usize) -> Genome {
    let spec = GenomeSpec { architecture: Architecture::Ant, neurons, evolvable_robot_count: false };
    Genome::random(&spec, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn random_site(seed: u64, robots: usize) -> (Worksite, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let site = ScenarioConfig { robots, ..Default::default() }.generate(&mut rng).unwrap();
    (site, rng)
}

fn footprints_disjoint(site: &Worksite) -> bool {
    let rs = site.robots();
    for (i, a) in rs.iter().enumerate() {
        for b in &rs[i + 1..] {
            if a.footprint().iter().any(|&c| b.covers(c)) {
                return false;
            }
        }
    }
    true
}

fn position_multiset(g: &Genome) -> HashMap<Option<antx_core::tissue::LatticePosition>, usize> {
    let mut m = HashMap::new();
    for p in g.resolve_positions() {
        *m.entry(p).or_insert(0) += 1;
    }
    m
}

fn merge(mut a: HashMap<Option<antx_core::tissue::LatticePosition>, usize>, b: HashMap<Option<antx_core::tissue::LatticePosition>, usize>) -> HashMap<Option<antx_core::tissue::LatticePosition>, usize> {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inference_is_pure(seed in any::<u64>(), code in 0..STATE_SPACE) {
        let tissue = Tissue::develop(&genome(seed, 60)).unwrap();
        let frame = SensorFrame::from_code(code).unwrap();
        prop_assert_eq!(tissue.infer_detailed(&frame), tissue.infer_detailed(&frame));
    }

    #[test]
    fn development_is_idempotent(seed in any::<u64>(), n in 1usize..150) {
        let g = genome(seed, n);
        prop_assert_eq!(Tissue::develop(&g).unwrap(), Tissue::develop(&g).unwrap());
    }

    #[test]
    fn motors_outside_active_fields_never_vote(seed in any::<u64>(), code in 0..STATE_SPACE) {
        let tissue = Tissue::develop(&genome(seed, 80)).unwrap();
        let frame = SensorFrame::from_code(code).unwrap();
        let fields = tissue.active_fields(&frame);
        let inf = tissue.infer_detailed(&frame);
        for (k, m) in tissue.motors().iter().enumerate() {
            if !fields.iter().any(|f| f.contains(m.position)) {
                prop_assert!(!inf.active_motors[k]);
            }
        }
        let bound: u32 = inf.tally.bound.iter().sum();
        let voters = tissue
            .motors()
            .iter()
            .enumerate()
            .filter(|(k, m)| inf.active_motors[*k] && m.position.n == antx_core::tissue::TOP_LAYER && m.output.is_some())
            .count();
        prop_assert_eq!(bound as usize, voters);
    }

    #[test]
    fn reviving_a_dead_cell_adds_exactly_one_neuron(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let mut g = genome(seed, 50);
        let i = pick.index(g.genes.len() - 1) + 1;
        g.genes[i].cell_death = true;
        let dead = Tissue::develop(&g).unwrap();
        g.genes[i].cell_death = false;
        let alive = Tissue::develop(&g).unwrap();
        prop_assert_eq!(alive.live_neuron_count(), dead.live_neuron_count() + 1);
        prop_assert_eq!(alive.slots(), dead.slots());
    }

    #[test]
    fn crossover_conserves_positions_and_develops(a in any::<u64>(), b in any::<u64>(), s in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let pa = genome(a, rng.gen_range(40..=120));
        let pb = genome(b, rng.gen_range(40..=120));
        let (c1, c2) = crossover(&pa, &pb, &mut rng);
        prop_assert_eq!(
            merge(position_multiset(&c1), position_multiset(&c2)),
            merge(position_multiset(&pa), position_multiset(&pb))
        );
        prop_assert!(Tissue::develop(&c1).is_ok());
        prop_assert!(Tissue::develop(&c2).is_ok());
    }

    #[test]
    fn variation_operators_are_closed(seed in any::<u64>(), pm in 0.0f64..=1.0, rounds in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = genome(seed, 40);
        for _ in 0..rounds {
            let len = g.genes.len();
            mutate(&mut g, pm, &mut rng);
            replicate_cell(&mut g, &mut rng);
            prop_assert!(g.genes.len() == len || g.genes.len() == len + 1);
            let tissue = Tissue::develop(&g);
            prop_assert!(tissue.is_ok());
            prop_assert!(tissue.unwrap().slots().keys().all(|p| p.in_layer_range()));
        }
    }

    #[test]
    fn random_steps_conserve_soil_and_respect_geometry(seed in any::<u64>(), robots in 1usize..=5) {
        let (mut site, mut rng) = random_site(seed, robots);
        let volume = site.soil_volume();
        for _ in 0..200 {
            for r in 0..site.robots().len() {
                let before = site.robots()[r];
                let bv = BehaviorVector::from_bits(rng.gen_range(0..1u16 << 12));
                let exec = site.execute_behaviors(r, bv, &mut rng);
                let after = site.robots()[r];
                let moves = u32::from(exec.forward.is_some()) + u32::from(exec.backward.is_some());
                let dist = (after.x - before.x).unsigned_abs() + (after.y - before.y).unsigned_abs();
                prop_assert!(dist <= moves);
                prop_assert_eq!(site.soil_volume(), volume);
                prop_assert!(footprints_disjoint(&site));
                let f = site.fitness();
                prop_assert!(f > 0.0 && f <= 1.0);
                let frame = site.sense(r);
                prop_assert_eq!(SensorFrame::from_code(frame.code()), Some(frame));
            }
        }
    }

    #[test]
    fn a_robot_with_retracted_blade_never_moves_soil(seed in any::<u64>()) {
        let (mut site, mut rng) = random_site(seed, 1);
        let heights = site.heights().to_vec();
        let allowed: Vec<Behavior> = [1, 2, 3, 4, 5, 6, 10, 11, 12]
            .iter()
            .map(|&n| Behavior::from_number(n).unwrap())
            .collect();
        for _ in 0..300 {
            let mut bv = BehaviorVector::EMPTY;
            for &b in &allowed {
                bv.set(b, rng.gen_bool(0.3));
            }
            site.execute_behaviors(0, bv, &mut rng);
        }
        prop_assert_eq!(site.heights(), &heights[..]);
    }

    #[test]
    fn detectors_do_not_change_outcomes(seed in any::<u64>(), sc in any::<u64>()) {
        let g = genome(seed, 60);
        let cfg = ScenarioConfig { timesteps: 60, ..Default::default() };
        let plain = evaluate(&mut TissueController::from_genome(&g).unwrap(), &cfg, sc).unwrap();
        let mut counts = DetectorCounts::default();
        let observed = evaluate_observed(&mut TissueController::from_genome(&g).unwrap(), &cfg, sc, &mut counts).unwrap();
        prop_assert_eq!(plain, observed);
        let cap = (cfg.robots as u64) * cfg.timesteps;
        prop_assert!(counts.0.iter().all(|&c| c <= cap));
    }

    #[test]
    fn detector_flags_are_a_function_of_inputs(code in 0..STATE_SPACE, bits in 0u16..4096) {
        let frame = SensorFrame::from_code(code).unwrap();
        let bv = BehaviorVector::from_bits(bits);
        prop_assert_eq!(detect(&frame, bv, None), detect(&frame, bv, None));
    }
}

#[test]
fn fitness_is_one_only_on_the_blueprint() {
    let bp = Blueprint::excavation(4, 4, 2).unwrap();
    let mut site = Worksite::new(bp.clone(), vec![]).unwrap();
    assert!(site.fitness() < 1.0);
    for y in 0..bp.height() {
        for x in 0..bp.width() {
            if let antx_core::sim::CellSpec::Target(g) = bp.get(x, y) {
                site.set_height((x as i32, y as i32), -i64::from(g));
            }
        }
    }
    assert_eq!(site.fitness(), 1.0);
    let x = (0..bp.width()).find(|&x| bp.get(x, bp.height() / 2).is_target()).unwrap();
    site.set_height((x as i32, (bp.height() / 2) as i32), -3);
    assert!(site.fitness() < 1.0);
}

#[test]
fn null_controller_leaves_site_untouched() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut site = ScenarioConfig::default().generate(&mut rng).unwrap();
    let before = site.heights().to_vec();
    for _ in 0..50 {
        site.step(&mut NullController, &mut rng, &mut antx_core::sim::NoObserver);
    }
    assert_eq!(site.heights(), &before[..]);
}

#[test]
fn elite_fitness_never_drops_with_frozen_scenarios() {
    let cfg = EvolutionConfig {
        population_size: 12,
        generations: 50,
        scenarios_per_eval: 2,
        initial_neuron_range: (40, 60),
        rng_seed: 17,
        freeze_scenarios: true,
        ..Default::default()
    };
    let fit = ExcavationFitness::new(ScenarioConfig { timesteps: 40, ..Default::default() });
    let run = Evolution::new(cfg.clone(), &fit).unwrap().run(|_, _| Ok(())).unwrap();
    assert_eq!(run.metrics.len(), 51);
    for w in run.metrics.windows(2) {
        assert!(w[1].best_fitness >= w[0].best_fitness, "{} -> {}", w[0].best_fitness, w[1].best_fitness);
    }
    let again = Evolution::new(cfg, &fit).unwrap().sequential().run(|_, _| Ok(())).unwrap();
    assert_eq!(run.metrics, again.metrics);
}

#[test]
fn robots_never_share_cells_under_tissue_control() {
    for seed in 0..5 {
        let g = genome(seed, 90);
        let mut ctl = TissueController::from_genome(&g).unwrap();
        let (mut site, mut rng) = random_site(seed, 6);
        for _ in 0..100 {
            site.step(&mut ctl, &mut rng, &mut antx_core::sim::NoObserver);
            assert!(footprints_disjoint(&site));
        }
        ctl.reset();
    }
}

#[test]
fn manual_robots_respect_headings() {
    let bp = Blueprint::excavation(8, 8, 1).unwrap();
    let mut site = Worksite::new(bp, vec![RobotState::new(5, 5, Heading::East)]).unwrap();
    assert_eq!(site.move_forward(0), antx_core::sim::MoveOutcome::Moved);
    assert_eq!((site.robots()[0].x, site.robots()[0].y), (6, 5));
}
