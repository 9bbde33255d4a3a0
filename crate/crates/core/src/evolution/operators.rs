//! Genetic operators: tournament selection, crossover, mutation and cell
//! replication.

use crate::sensors::INPUT_COUNT;
use crate::tissue::{
    random_output, ActivationParams, Architecture, CellGene, CellKind, DecisionParams, Genome,
    LatticePosition, MotorParams, MAX_EXTENT, MAX_REPLICATION_PROBABILITY, REPLICATION_RATIO_RANGE,
    ROBOT_COUNT_RANGE,
};
use rand::seq::index::sample;
use rand::Rng;
use std::collections::{HashMap, HashSet};

/// Index of the fittest of `size` members drawn without replacement; ties go
/// to the lowest index. `size` is clamped to `1..=fitness.len()`.
pub fn tournament_select<R: Rng + ?Sized>(fitness: &[f64], size: usize, rng: &mut R) -> usize {
    assert!(!fitness.is_empty(), "tournament over an empty population");
    let size = size.clamp(1, fitness.len());
    sample(rng, fitness.len(), size)
        .into_iter()
        .fold(None, |best: Option<usize>, i| match best {
            Some(b) if fitness[b] > fitness[i] || (fitness[b] == fitness[i] && b < i) => Some(b),
            _ => Some(i),
        })
        .expect("non-empty tournament")
}

/// Axis-aligned plane splitting the lattice for crossover.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossoverPlane {
    /// `false`: normal along `l`; `true`: normal along `m`.
    pub along_m: bool,
    /// The plane lies at `cut + 0.5`.
    pub cut: i32,
}

impl CrossoverPlane {
    /// Whether `p` lies on the side of the plane away from the origin.
    pub fn far_side(&self, p: LatticePosition) -> bool {
        let c = if self.along_m { p.m } else { p.l };
        if self.cut >= 0 {
            c > self.cut
        } else {
            c <= self.cut
        }
    }
}

/// Crossover with the compatibility criterion.
///
/// Child 1 takes parent A or B by a fair affinity draw and child 2 takes the
/// other, so between them the children hold exactly the parents' genes. Across
/// a random plane, a gene whose position is also held by the other parent with
/// the same expression status trades its contents (kind, parameters, flags)
/// with that gene. Gene ids and addresses stay in place, so every position
/// keeps its occupant count.
pub fn crossover<R: Rng + ?Sized>(a: &Genome, b: &Genome, rng: &mut R) -> (Genome, Genome) {
    let (first, second) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
    let pos_first = first.resolve_positions();
    let pos_second = second.resolve_positions();
    let coords = pos_first.iter().chain(&pos_second).flatten();
    let along_m = rng.gen_bool(0.5);
    let (lo, hi) = coords.fold((i32::MAX, i32::MIN), |(lo, hi), p| {
        let c = if along_m { p.m } else { p.l };
        (lo.min(c), hi.max(c))
    });
    let mut c1 = first.clone();
    let mut c2 = second.clone();
    if lo > hi {
        return (c1, c2);
    }
    let plane = CrossoverPlane { along_m, cut: rng.gen_range(lo..=hi) };
    exchange_across(&mut c1, &pos_first, &mut c2, &pos_second, plane);
    (c1, c2)
}

/// Swaps compatible gene contents between `c1` and `c2` on the far side of `plane`.
pub fn exchange_across(
    c1: &mut Genome,
    pos1: &[Option<LatticePosition>],
    c2: &mut Genome,
    pos2: &[Option<LatticePosition>],
    plane: CrossoverPlane,
) {
    let mut at2: HashMap<LatticePosition, usize> = HashMap::new();
    for (j, p) in pos2.iter().enumerate() {
        if let Some(p) = p {
            at2.entry(*p).or_insert(j);
        }
    }
    let mut used = HashSet::new();
    for (i, p) in pos1.iter().enumerate() {
        let Some(p) = p else { continue };
        if !plane.far_side(*p) {
            continue;
        }
        let Some(&j) = at2.get(p) else { continue };
        if c1.genes[i].expressed != c2.genes[j].expressed || !used.insert(j) {
            continue;
        }
        swap_contents(&mut c1.genes[i], &mut c2.genes[j]);
    }
}

fn swap_contents(x: &mut CellGene, y: &mut CellGene) {
    std::mem::swap(&mut x.kind, &mut y.kind);
    std::mem::swap(&mut x.cell_death, &mut y.cell_death);
    std::mem::swap(&mut x.replication_weight, &mut y.replication_weight);
}

fn redraw_f64<R: Rng + ?Sized>(v: &mut f64, pm: f64, lo: f64, hi: f64, rng: &mut R) {
    if rng.gen_bool(pm) {
        *v = rng.gen_range(lo..=hi);
    }
}

fn mutate_activation<R: Rng + ?Sized>(a: &mut ActivationParams, pm: f64, rng: &mut R) {
    if rng.gen_bool(pm) {
        a.k1 = rng.gen();
    }
    if rng.gen_bool(pm) {
        a.k2 = rng.gen();
    }
    redraw_f64(&mut a.theta1, pm, -1.0, 1.0, rng);
    redraw_f64(&mut a.theta2, pm, -1.0, 1.0, rng);
}

/// Redraws each parameter from its initial distribution with probability
/// `pm`, and toggles expression and cell-death flags with probability `pm`.
///
/// The seed gene is never repressed. Fixed-topology genomes have no flags to
/// toggle.
pub fn mutate<R: Rng + ?Sized>(genome: &mut Genome, pm: f64, rng: &mut R) {
    let pm = pm.clamp(0.0, 1.0);
    let gated = genome.architecture == Architecture::Ant;
    let seed = genome.tissue.seed;
    for gene in &mut genome.genes {
        if gated {
            if gene.id != seed && rng.gen_bool(pm) {
                gene.expressed = !gene.expressed;
            }
            if rng.gen_bool(pm) {
                gene.cell_death = !gene.cell_death;
            }
        }
        if let Some(w) = &mut gene.replication_weight {
            redraw_f64(w, pm, 0.0, 1.0, rng);
        }
        match &mut gene.kind {
            CellKind::Motor(p) => {
                mutate_activation(&mut p.activation, pm, rng);
                for w in p.sensor_weights.iter_mut().chain(p.weights.iter_mut()) {
                    redraw_f64(w, pm, -1.0, 1.0, rng);
                }
                if rng.gen_bool(pm) {
                    p.output = random_output(rng);
                }
            }
            CellKind::Decision(p) => {
                mutate_activation(&mut p.activation, pm, rng);
                for w in &mut p.weights {
                    redraw_f64(w, pm, -1.0, 1.0, rng);
                }
                redraw_f64(&mut p.concentration, pm, 0.0, 1.0, rng);
                for e in &mut p.extent {
                    if rng.gen_bool(pm) {
                        *e = rng.gen_range(0..=MAX_EXTENT);
                    }
                }
            }
        }
    }
    let t = &mut genome.tissue;
    if gated {
        redraw_f64(&mut t.replication_probability, pm, 0.0, MAX_REPLICATION_PROBABILITY, rng);
        redraw_f64(&mut t.replication_ratio, pm, REPLICATION_RATIO_RANGE.0, REPLICATION_RATIO_RANGE.1, rng);
    }
    if let Some(n) = &mut t.robot_count {
        if rng.gen_bool(pm) {
            *n = rng.gen_range(ROBOT_COUNT_RANGE.0..=ROBOT_COUNT_RANGE.1);
        }
    }
}

/// Number of scalar parameters in the flattened layout used for replication.
fn param_len(kind: &CellKind) -> usize {
    match kind {
        CellKind::Motor(_) => 4 + INPUT_COUNT + 9 + 1,
        CellKind::Decision(_) => 4 + INPUT_COUNT + 1 + 3,
    }
}

/// Copies the first `count` flattened parameters of `src` into `dst`.
///
/// The layout is activation (k1, k2, theta1, theta2), then the 51 sensor
/// weights, then kind-specific fields. Only the shared prefix is copied across
/// kinds.
fn copy_prefix(dst: &mut CellKind, src: &CellKind, count: usize) {
    let shared = if dst.is_motor() == src.is_motor() { param_len(src) } else { 4 + INPUT_COUNT };
    let count = count.min(shared);
    let (da, dw) = activation_and_weights(dst);
    let (sa, sw) = match src {
        CellKind::Motor(p) => (p.activation, &p.sensor_weights),
        CellKind::Decision(p) => (p.activation, &p.weights),
    };
    if count > 0 {
        da.k1 = sa.k1;
    }
    if count > 1 {
        da.k2 = sa.k2;
    }
    if count > 2 {
        da.theta1 = sa.theta1;
    }
    if count > 3 {
        da.theta2 = sa.theta2;
    }
    let nw = count.saturating_sub(4).min(INPUT_COUNT);
    dw[..nw].copy_from_slice(&sw[..nw]);
    let rest = count.saturating_sub(4 + INPUT_COUNT);
    match (dst, src) {
        (CellKind::Motor(d), CellKind::Motor(s)) => {
            let nn = rest.min(9);
            d.weights[..nn].copy_from_slice(&s.weights[..nn]);
            if rest > 9 {
                d.output = s.output;
            }
        }
        (CellKind::Decision(d), CellKind::Decision(s)) => {
            if rest > 0 {
                d.concentration = s.concentration;
            }
            let ne = rest.saturating_sub(1).min(3);
            d.extent[..ne].copy_from_slice(&s.extent[..ne]);
        }
        _ => {}
    }
}

fn activation_and_weights(kind: &mut CellKind) -> (&mut ActivationParams, &mut Vec<f64>) {
    match kind {
        CellKind::Motor(p) => (&mut p.activation, &mut p.sensor_weights),
        CellKind::Decision(p) => (&mut p.activation, &mut p.weights),
    }
}

/// Builds a daughter cell from `parent`: the first `share` fraction of the
/// flattened parameters is copied, the rest is random.
pub fn daughter_kind<R: Rng + ?Sized>(parent: &CellKind, decision: bool, share: f64, rng: &mut R) -> CellKind {
    let mut kind = if decision {
        CellKind::Decision(DecisionParams::random(rng))
    } else {
        CellKind::Motor(MotorParams::random(rng))
    };
    let count = (share.clamp(0.0, 1.0) * param_len(parent) as f64).round() as usize;
    copy_prefix(&mut kind, parent, count);
    kind
}

/// Duplicates a cell with probability equal to the tissue's replication
/// probability. Returns the id of the new gene.
///
/// The parent is the expressed gene with the highest replication weight. The
/// daughter goes to a uniformly chosen free face-neighbour slot inside the
/// layer range; with no free slot nothing is inserted. Its type is a decision
/// neuron with the tissue's replication ratio, and 50-100% of the parent's
/// parameters carry over.
pub fn replicate_cell<R: Rng + ?Sized>(genome: &mut Genome, rng: &mut R) -> Option<u32> {
    if genome.architecture != Architecture::Ant {
        return None;
    }
    let tr = genome.tissue.replication_probability.clamp(0.0, 1.0);
    if !rng.gen_bool(tr) {
        return None;
    }
    let positions = genome.resolve_positions();
    let candidates: Vec<usize> = (0..genome.genes.len())
        .filter(|&i| genome.genes[i].expressed && positions[i].is_some())
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let weighted: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&i| genome.genes[i].replication_weight.is_some())
        .collect();
    let parent = if weighted.is_empty() {
        candidates[rng.gen_range(0..candidates.len())]
    } else {
        weighted
            .iter()
            .copied()
            .fold(None, |best: Option<usize>, i| match best {
                Some(b)
                    if genome.genes[b].replication_weight >= genome.genes[i].replication_weight =>
                {
                    Some(b)
                }
                _ => Some(i),
            })
            .expect("non-empty")
    };
    let parent_pos = positions[parent].expect("filtered");
    let taken: HashSet<LatticePosition> = positions.iter().flatten().copied().collect();
    let free: Vec<LatticePosition> = parent_pos
        .neighbours()
        .into_iter()
        .filter(|p| p.in_layer_range() && !taken.contains(p))
        .collect();
    if free.is_empty() {
        return None;
    }
    let slot = free[rng.gen_range(0..free.len())];
    let decision = rng.gen_bool(genome.tissue.replication_ratio.clamp(0.0, 1.0));
    let share = rng.gen_range(0.5..=1.0);
    let kind = daughter_kind(&genome.genes[parent].kind, decision, share, rng);
    let id = genome.next_id();
    genome.genes.push(CellGene {
        id,
        parent: Some(genome.genes[parent].id),
        offset: slot.delta_from(parent_pos),
        expressed: true,
        cell_death: false,
        replication_weight: Some(rng.gen_range(0.0..=1.0)),
        kind,
    });
    Some(id)
}
