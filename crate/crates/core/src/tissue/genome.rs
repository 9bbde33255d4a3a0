//! Genome encoding: one tissue gene plus an ordered list of cell genes.
//!
//! Cell positions are not stored directly. Each gene carries an offset
//! relative to its parent gene (or to the lattice origin when it has no
//! parent), and the developed position is obtained by walking that address
//! chain.

use super::activation::ActivationParams;
use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::sensors::INPUT_COUNT;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Number of motor layers (`n` in `0..LAYER_COUNT`).
pub const LAYER_COUNT: i32 = 4;
/// Layer whose bound motor neurons vote on behaviors.
pub const TOP_LAYER: i32 = LAYER_COUNT - 1;
/// Size of the 3x3 nominal input block one layer below a motor neuron.
pub const NOMINAL_INPUTS: usize = 9;

pub const MAX_EXTENT: u32 = 3;
pub const MAX_REPLICATION_PROBABILITY: f64 = 0.1;
pub const REPLICATION_RATIO_RANGE: (f64, f64) = (0.2, 0.5);
pub const ROBOT_COUNT_RANGE: (u32, u32) = (1, 10);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePosition {
    pub l: i32,
    pub m: i32,
    pub n: i32,
}

impl LatticePosition {
    pub const ORIGIN: LatticePosition = LatticePosition { l: 0, m: 0, n: 0 };

    pub fn new(l: i32, m: i32, n: i32) -> Self {
        LatticePosition { l, m, n }
    }

    pub fn offset(self, d: [i32; 3]) -> Self {
        LatticePosition {
            l: self.l + d[0],
            m: self.m + d[1],
            n: self.n + d[2],
        }
    }

    pub fn delta_from(self, other: LatticePosition) -> [i32; 3] {
        [self.l - other.l, self.m - other.m, self.n - other.n]
    }

    pub fn in_layer_range(self) -> bool {
        (0..LAYER_COUNT).contains(&self.n)
    }

    /// Six face-sharing neighbours: top, bottom, north, south, east, west.
    pub fn neighbours(self) -> [LatticePosition; 6] {
        [
            self.offset([0, 0, 1]),
            self.offset([0, 0, -1]),
            self.offset([0, 1, 0]),
            self.offset([0, -1, 0]),
            self.offset([1, 0, 0]),
            self.offset([-1, 0, 0]),
        ]
    }
}

/// Nominal-input slot of the neuron at `(dl, dm)` relative to the receiver.
pub fn nominal_slot(dl: i32, dm: i32) -> usize {
    ((dl + 1) * 3 + (dm + 1)) as usize
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotorParams {
    pub activation: ActivationParams,
    /// Weights from the sensor layer, used when the neuron sits in layer 0.
    pub sensor_weights: Vec<f64>,
    /// Weights over the 3x3 block one layer below, indexed by [`nominal_slot`].
    pub weights: [f64; NOMINAL_INPUTS],
    /// Behavior this neuron votes on when it sits in the top layer.
    pub output: Option<Behavior>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionParams {
    pub activation: ActivationParams,
    pub weights: Vec<f64>,
    pub concentration: f64,
    /// Half-extents of the field of influence along l, m, n.
    pub extent: [u32; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CellKind {
    Motor(MotorParams),
    Decision(DecisionParams),
}

impl CellKind {
    pub fn is_motor(&self) -> bool {
        matches!(self, CellKind::Motor(_))
    }

    pub fn activation(&self) -> &ActivationParams {
        match self {
            CellKind::Motor(p) => &p.activation,
            CellKind::Decision(p) => &p.activation,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellGene {
    pub id: u32,
    /// Seed-parent address; `None` addresses the lattice origin.
    pub parent: Option<u32>,
    pub offset: [i32; 3],
    pub expressed: bool,
    pub cell_death: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replication_weight: Option<f64>,
    #[serde(flatten)]
    pub kind: CellKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TissueGene {
    pub replication_probability: f64,
    /// Probability that a newly created cell is a decision neuron.
    pub replication_ratio: f64,
    /// Id of the gene that grows the first cell.
    pub seed: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robot_count: Option<u32>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    /// Decision neurons gate motor neurons through coarse-coded fields.
    #[default]
    Ant,
    /// Plain feed-forward network; every motor neuron is always active.
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    #[serde(default)]
    pub architecture: Architecture,
    pub tissue: TissueGene,
    pub genes: Vec<CellGene>,
}

/// Knobs for random genome construction.
#[derive(Clone, Debug)]
pub struct GenomeSpec {
    pub architecture: Architecture,
    pub neurons: usize,
    pub evolvable_robot_count: bool,
}

fn random_weights<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

pub fn random_output<R: Rng + ?Sized>(rng: &mut R) -> Option<Behavior> {
    // Twelve behaviors plus "unbound", equally likely.
    Behavior::from_number(rng.gen_range(0..=12u8))
}

impl MotorParams {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        MotorParams {
            activation: ActivationParams::random(rng),
            sensor_weights: random_weights(rng, INPUT_COUNT),
            weights: std::array::from_fn(|_| rng.gen_range(-1.0..=1.0)),
            output: Behavior::from_number(rng.gen_range(1..=12u8)),
        }
    }
}

impl DecisionParams {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        DecisionParams {
            activation: ActivationParams::random(rng),
            weights: random_weights(rng, INPUT_COUNT),
            concentration: rng.gen_range(0.0..=1.0),
            extent: std::array::from_fn(|_| rng.gen_range(0..=MAX_EXTENT)),
        }
    }
}

impl CellKind {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, decision_probability: f64) -> Self {
        if rng.gen_bool(decision_probability.clamp(0.0, 1.0)) {
            CellKind::Decision(DecisionParams::random(rng))
        } else {
            CellKind::Motor(MotorParams::random(rng))
        }
    }
}

impl TissueGene {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, seed: u32, evolvable_robot_count: bool) -> Self {
        TissueGene {
            replication_probability: rng.gen_range(0.0..=MAX_REPLICATION_PROBABILITY),
            replication_ratio: rng.gen_range(REPLICATION_RATIO_RANGE.0..=REPLICATION_RATIO_RANGE.1),
            seed,
            robot_count: evolvable_robot_count
                .then(|| rng.gen_range(ROBOT_COUNT_RANGE.0..=ROBOT_COUNT_RANGE.1)),
        }
    }
}

impl Genome {
    /// Random genome with `spec.neurons` expressed cells in a compact block.
    ///
    /// The first gene is the seed; every other gene is addressed relative to it.
    pub fn random<R: Rng + ?Sized>(spec: &GenomeSpec, rng: &mut R) -> Genome {
        let count = spec.neurons.max(1);
        let tissue = TissueGene::random(rng, 0, spec.evolvable_robot_count);
        let positions = match spec.architecture {
            Architecture::Ant => sparse_block(count, rng),
            Architecture::Fixed => dense_columns(count),
        };
        let seed_pos = positions[0];
        let genes = positions
            .iter()
            .enumerate()
            .map(|(i, &pos)| {
                let kind = match spec.architecture {
                    Architecture::Ant => CellKind::random(rng, tissue.replication_ratio),
                    Architecture::Fixed => CellKind::Motor(MotorParams::random(rng)),
                };
                let (parent, offset) = if i == 0 {
                    (None, pos.delta_from(LatticePosition::ORIGIN))
                } else {
                    (Some(0), pos.delta_from(seed_pos))
                };
                CellGene {
                    id: i as u32,
                    parent,
                    offset,
                    expressed: true,
                    cell_death: false,
                    replication_weight: Some(rng.gen_range(0.0..=1.0)),
                    kind,
                }
            })
            .collect();
        Genome {
            architecture: spec.architecture,
            tissue,
            genes,
        }
    }

    pub fn gene_index(&self, id: u32) -> Option<usize> {
        self.genes.iter().position(|g| g.id == id)
    }

    pub fn next_id(&self) -> u32 {
        self.genes.iter().map(|g| g.id + 1).max().unwrap_or(0)
    }

    /// Developed position of every gene, in genome order.
    ///
    /// `None` marks genes whose address chain is broken (missing parent or a cycle).
    pub fn resolve_positions(&self) -> Vec<Option<LatticePosition>> {
        let index: HashMap<u32, usize> = self
            .genes
            .iter()
            .enumerate()
            .rev()
            .map(|(i, g)| (g.id, i))
            .collect();
        let mut memo: Vec<Option<Option<LatticePosition>>> = vec![None; self.genes.len()];
        let mut chain = Vec::new();
        for start in 0..self.genes.len() {
            if memo[start].is_some() {
                continue;
            }
            chain.clear();
            let mut cursor = Some(start);
            let mut base: Option<LatticePosition> = None;
            // Walk up until a resolved ancestor, the origin, or a dead end.
            loop {
                let Some(i) = cursor else {
                    base = Some(LatticePosition::ORIGIN);
                    break;
                };
                if let Some(known) = memo[i] {
                    base = known;
                    break;
                }
                if chain.contains(&i) {
                    break;
                }
                chain.push(i);
                cursor = match self.genes[i].parent {
                    None => None,
                    Some(pid) => match index.get(&pid) {
                        Some(&j) => Some(j),
                        None => {
                            base = None;
                            break;
                        }
                    },
                };
            }
            // `base` is the position of the first node above the chain.
            let mut pos = base;
            for &i in chain.iter().rev() {
                pos = pos.map(|p| p.offset(self.genes[i].offset));
                memo[i] = Some(pos);
            }
        }
        memo.into_iter().map(|m| m.flatten()).collect()
    }

    pub fn motor_gene_count(&self) -> usize {
        self.genes.iter().filter(|g| g.kind.is_motor()).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("genome serializes")
    }

    /// Parses a genome document, naming the first malformed gene record.
    pub fn from_json(text: &str) -> Result<Genome> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(default)]
            architecture: Architecture,
            tissue: TissueGene,
            genes: Vec<serde_json::Value>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::GenomeParse(e.to_string()))?;
        let mut genes = Vec::with_capacity(raw.genes.len());
        for (index, value) in raw.genes.into_iter().enumerate() {
            let id = value
                .get("id")
                .map(|v| v.to_string())
                .unwrap_or_else(|| "?".to_string());
            let gene: CellGene = serde_json::from_value(value).map_err(|e| Error::GeneRecord {
                index,
                id: id.clone(),
                message: e.to_string(),
            })?;
            let arity_ok = match &gene.kind {
                CellKind::Motor(p) => p.sensor_weights.len() == INPUT_COUNT,
                CellKind::Decision(p) => p.weights.len() == INPUT_COUNT,
            };
            if !arity_ok {
                return Err(Error::GeneRecord {
                    index,
                    id,
                    message: format!("sensor weight vector must have {INPUT_COUNT} entries"),
                });
            }
            genes.push(gene);
        }
        Ok(Genome {
            architecture: raw.architecture,
            tissue: raw.tissue,
            genes,
        })
    }
}

fn block_side(count: usize, density: f64) -> i32 {
    let per_layer = count as f64 / LAYER_COUNT as f64;
    (per_layer / density).sqrt().ceil().max(1.0) as i32
}

/// Distinct random positions in a square block spanning all layers, about half full.
fn sparse_block<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<LatticePosition> {
    let side = block_side(count, 0.5);
    let slots = (side * side * LAYER_COUNT) as usize;
    sample(rng, slots, count.min(slots))
        .into_iter()
        .map(|s| {
            let s = s as i32;
            LatticePosition::new(s % side, (s / side) % side, s / (side * side))
        })
        .collect()
}

/// Fills each layer of a square block in row-major order.
fn dense_columns(count: usize) -> Vec<LatticePosition> {
    let side = block_side(count, 1.0);
    let mut out = Vec::with_capacity(count);
    let per_layer = count / LAYER_COUNT as usize;
    let remainder = count % LAYER_COUNT as usize;
    for n in 0..LAYER_COUNT {
        let in_layer = per_layer + usize::from((n as usize) < remainder);
        for k in 0..in_layer as i32 {
            out.push(LatticePosition::new(k % side, k / side, n));
        }
    }
    out
}
