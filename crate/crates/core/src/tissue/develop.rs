//! Development of a genome into an executable tissue, and tissue inference.

use super::activation::{modular_activation, ActivationParams};
use super::genome::{
    nominal_slot, Architecture, CellKind, Genome, LatticePosition, LAYER_COUNT, TOP_LAYER,
};
use crate::behavior::{Behavior, BehaviorVector, VoteTally};
use crate::error::{Error, Result};
use crate::sensors::{SensorFrame, SENSOR_VARIABLES};
use std::collections::{BTreeMap, HashMap};

#[derive(Clone, Debug, PartialEq)]
pub struct MotorNeuron {
    pub gene_id: u32,
    pub position: LatticePosition,
    pub activation: ActivationParams,
    pub output: Option<Behavior>,
    pub dormant: bool,
    /// Sensor-layer weights; empty above layer 0.
    pub sensor_weights: Vec<f64>,
    /// Live motor neurons in the nominal input block: (motor index, weight).
    pub inputs: Vec<(u32, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecisionNeuron {
    pub gene_id: u32,
    pub position: LatticePosition,
    pub activation: ActivationParams,
    pub weights: Vec<f64>,
    pub concentration: f64,
    pub extent: [u32; 3],
    pub dormant: bool,
    /// Live motor neurons inside the field of influence.
    pub covers: Vec<u32>,
}

/// Chemical field released by an active decision neuron.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffusionField {
    pub center: LatticePosition,
    pub concentration: f64,
    pub extent: [u32; 3],
}

impl DiffusionField {
    pub fn contains(&self, p: LatticePosition) -> bool {
        (p.l - self.center.l).unsigned_abs() <= self.extent[0]
            && (p.m - self.center.m).unsigned_abs() <= self.extent[1]
            && (p.n - self.center.n).unsigned_abs() <= self.extent[2]
    }
}

/// Which kind of cell occupies a lattice slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Occupant {
    Motor(usize),
    Decision(usize),
}

/// A developed controller.
#[derive(Clone, Debug, PartialEq)]
pub struct Tissue {
    /// Ordered by layer, then genome order.
    motors: Vec<MotorNeuron>,
    decisions: Vec<DecisionNeuron>,
    slots: BTreeMap<LatticePosition, Occupant>,
    gated: bool,
}

/// Full record of one inference pass.
#[derive(Clone, Debug, PartialEq)]
pub struct Inference {
    pub decision_states: Vec<bool>,
    pub active_motors: Vec<bool>,
    pub motor_states: Vec<bool>,
    pub tally: VoteTally,
    pub behaviors: BehaviorVector,
}

impl Tissue {
    /// Grows a tissue from `genome`.
    ///
    /// The seed gene is placed first. Remaining expressed genes follow in
    /// genome order; a gene whose resolved position is already taken, outside
    /// the layer range, or unresolvable is skipped. Genes flagged for cell death
    /// keep their slot but stay dormant.
    pub fn develop(genome: &Genome) -> Result<Tissue> {
        let seed_index = genome.gene_index(genome.tissue.seed).ok_or_else(|| {
            Error::Development(format!("seed gene {} not present", genome.tissue.seed))
        })?;
        if !genome.genes[seed_index].expressed {
            return Err(Error::Development(format!(
                "seed gene {} is repressed",
                genome.tissue.seed
            )));
        }
        let positions = genome.resolve_positions();
        let Some(seed_pos) = positions[seed_index] else {
            return Err(Error::Development("seed gene address does not resolve".into()));
        };
        if !seed_pos.in_layer_range() {
            return Err(Error::Development(format!(
                "seed gene position {seed_pos:?} outside layers 0..{LAYER_COUNT}"
            )));
        }

        let mut placed: BTreeMap<LatticePosition, usize> = BTreeMap::new();
        let mut order = Vec::with_capacity(genome.genes.len());
        let candidates = std::iter::once(seed_index)
            .chain((0..genome.genes.len()).filter(|&i| i != seed_index));
        for i in candidates {
            let gene = &genome.genes[i];
            if !gene.expressed {
                continue;
            }
            let Some(pos) = positions[i] else { continue };
            if !pos.in_layer_range() || placed.contains_key(&pos) {
                continue;
            }
            placed.insert(pos, i);
            order.push((i, pos));
        }
        // Seed goes first for collision purposes only; neurons keep genome order.
        order.sort_by_key(|&(i, _)| i);

        let gated = genome.architecture == Architecture::Ant;
        let mut motors = Vec::new();
        let mut decisions = Vec::new();
        for &(i, pos) in &order {
            let gene = &genome.genes[i];
            match &gene.kind {
                CellKind::Motor(p) => motors.push(MotorNeuron {
                    gene_id: gene.id,
                    position: pos,
                    activation: p.activation,
                    output: p.output,
                    dormant: gene.cell_death,
                    sensor_weights: if pos.n == 0 { p.sensor_weights.clone() } else { Vec::new() },
                    inputs: Vec::new(),
                }),
                CellKind::Decision(p) => {
                    // Fixed networks ignore gating genes entirely.
                    decisions.push(DecisionNeuron {
                        gene_id: gene.id,
                        position: pos,
                        activation: p.activation,
                        weights: p.weights.clone(),
                        concentration: p.concentration,
                        extent: p.extent,
                        dormant: gene.cell_death || !gated,
                        covers: Vec::new(),
                    })
                }
            }
        }
        motors.sort_by_key(|m| m.position.n);

        let mut slots = BTreeMap::new();
        for (k, m) in motors.iter().enumerate() {
            slots.insert(m.position, Occupant::Motor(k));
        }
        for (k, d) in decisions.iter().enumerate() {
            slots.insert(d.position, Occupant::Decision(k));
        }

        let live_motor: HashMap<LatticePosition, usize> = motors
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.dormant)
            .map(|(k, m)| (m.position, k))
            .collect();

        // Nominal inputs: live motor neurons in the 3x3 block one layer down.
        for motor in motors.iter_mut() {
            let pos = motor.position;
            if pos.n == 0 {
                continue;
            }
            let gene = &genome.genes[genome.gene_index(motor.gene_id).expect("gene exists")];
            let CellKind::Motor(p) = &gene.kind else { unreachable!() };
            let mut inputs = Vec::new();
            for dl in -1..=1 {
                for dm in -1..=1 {
                    let below = LatticePosition::new(pos.l + dl, pos.m + dm, pos.n - 1);
                    if let Some(&j) = live_motor.get(&below) {
                        inputs.push((j as u32, p.weights[nominal_slot(dl, dm)]));
                    }
                }
            }
            motor.inputs = inputs;
        }

        for d in decisions.iter_mut() {
            let field = DiffusionField {
                center: d.position,
                concentration: d.concentration,
                extent: d.extent,
            };
            d.covers = motors
                .iter()
                .enumerate()
                .filter(|(_, m)| !m.dormant && field.contains(m.position))
                .map(|(k, _)| k as u32)
                .collect();
        }

        Ok(Tissue {
            motors,
            decisions,
            slots,
            gated,
        })
    }

    pub fn motors(&self) -> &[MotorNeuron] {
        &self.motors
    }

    pub fn decisions(&self) -> &[DecisionNeuron] {
        &self.decisions
    }

    pub fn is_gated(&self) -> bool {
        self.gated
    }

    /// Occupied lattice slots, including dormant cells.
    pub fn slots(&self) -> &BTreeMap<LatticePosition, Occupant> {
        &self.slots
    }

    pub fn neuron_count(&self) -> usize {
        self.slots.len()
    }

    pub fn live_neuron_count(&self) -> usize {
        self.motors.iter().filter(|m| !m.dormant).count()
            + self.decisions.iter().filter(|d| !d.dormant).count()
    }

    pub fn occupant(&self, pos: LatticePosition) -> Option<Occupant> {
        self.slots.get(&pos).copied()
    }

    fn sensor_sigma(weights: &[f64], active: &[usize; SENSOR_VARIABLES]) -> f64 {
        // One-hot inputs: exactly one active neuron per sensor variable.
        let num: f64 = active.iter().map(|&i| weights[i]).sum();
        num / SENSOR_VARIABLES as f64
    }

    /// Firing state of every decision neuron.
    pub fn decision_states(&self, frame: &SensorFrame) -> Vec<bool> {
        let active = frame.active_inputs();
        self.decisions
            .iter()
            .map(|d| !d.dormant && modular_activation(Self::sensor_sigma(&d.weights, &active), &d.activation))
            .collect()
    }

    /// Fields released by the decision neurons that fire on `frame`.
    pub fn active_fields(&self, frame: &SensorFrame) -> Vec<DiffusionField> {
        self.decision_states(frame)
            .into_iter()
            .zip(&self.decisions)
            .filter(|(on, _)| *on)
            .map(|(_, d)| DiffusionField {
                center: d.position,
                concentration: d.concentration,
                extent: d.extent,
            })
            .collect()
    }

    /// Motor neurons excited by `fields`.
    ///
    /// Concentrations add where fields overlap. The excited set is every live
    /// motor neuron whose summed concentration is positive and equal to the
    /// largest value found at any live motor neuron.
    pub fn coarse_code(&self, fields: &[DiffusionField]) -> Vec<bool> {
        let conc: Vec<f64> = self
            .motors
            .iter()
            .map(|m| {
                if m.dormant {
                    return 0.0;
                }
                fields
                    .iter()
                    .filter(|f| f.contains(m.position))
                    .map(|f| f.concentration)
                    .sum()
            })
            .collect();
        select_peak(&conc)
    }

    fn gate(&self, decision_states: &[bool]) -> Vec<bool> {
        if !self.gated {
            return self.motors.iter().map(|m| !m.dormant).collect();
        }
        let mut conc = vec![0.0; self.motors.len()];
        for (d, _) in self.decisions.iter().zip(decision_states).filter(|(_, on)| **on) {
            for &k in &d.covers {
                conc[k as usize] += d.concentration;
            }
        }
        select_peak(&conc)
    }

    /// One controller step with every intermediate quantity exposed.
    pub fn infer_detailed(&self, frame: &SensorFrame) -> Inference {
        let active_inputs = frame.active_inputs();
        let decision_states = if self.gated {
            self.decision_states(frame)
        } else {
            vec![false; self.decisions.len()]
        };
        let active = self.gate(&decision_states);
        let mut states = vec![false; self.motors.len()];
        for (k, m) in self.motors.iter().enumerate() {
            if !active[k] {
                continue;
            }
            let sigma = if m.position.n == 0 {
                Self::sensor_sigma(&m.sensor_weights, &active_inputs)
            } else {
                // Inactive inputs are outside the summation set.
                let (num, den) = m
                    .inputs
                    .iter()
                    .filter(|(j, _)| active[*j as usize] && states[*j as usize])
                    .fold((0.0, 0.0), |(n, d), (_, w)| (n + w, d + 1.0));
                if den == 0.0 {
                    0.0
                } else {
                    num / den
                }
            };
            states[k] = modular_activation(sigma, &m.activation);
        }
        let mut tally = VoteTally::default();
        for (k, m) in self.motors.iter().enumerate() {
            if active[k] && m.position.n == TOP_LAYER {
                if let Some(b) = m.output {
                    tally.record(b, states[k]);
                }
            }
        }
        Inference {
            decision_states,
            active_motors: active,
            motor_states: states,
            behaviors: tally.decide(),
            tally,
        }
    }

    pub fn infer(&self, frame: &SensorFrame) -> BehaviorVector {
        self.infer_detailed(frame).behaviors
    }
}

fn select_peak(conc: &[f64]) -> Vec<bool> {
    let peak = conc.iter().copied().fold(0.0_f64, f64::max);
    if peak <= 0.0 {
        return vec![false; conc.len()];
    }
    conc.iter().map(|&c| c == peak).collect()
}
