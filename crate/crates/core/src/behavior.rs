//! Basis behaviors and output arbitration.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Number of basis behaviors available to a robot.
pub const BEHAVIOR_COUNT: usize = 12;

/// The excavation basis behaviors, listed in execution order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behavior {
    ThrottleUp,
    MoveForward,
    MoveBackward,
    RandomTurn,
    TurnRight,
    TurnLeft,
    BladeAbove,
    BladeBelow,
    BladeLevel,
    BladeHome,
    BitSet,
    BitClear,
}

impl Behavior {
    pub const ALL: [Behavior; BEHAVIOR_COUNT] = [
        Behavior::ThrottleUp,
        Behavior::MoveForward,
        Behavior::MoveBackward,
        Behavior::RandomTurn,
        Behavior::TurnRight,
        Behavior::TurnLeft,
        Behavior::BladeAbove,
        Behavior::BladeBelow,
        Behavior::BladeLevel,
        Behavior::BladeHome,
        Behavior::BitSet,
        Behavior::BitClear,
    ];

    /// Zero-based position in the execution order.
    pub fn index(self) -> usize {
        self as usize
    }

    /// One-based behavior number as used in rule tables (1..=12).
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(number: u8) -> Option<Behavior> {
        match number {
            1..=12 => Some(Self::ALL[number as usize - 1]),
            _ => None,
        }
    }
}

impl fmt::Display for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Set of behaviors selected for one timestep, stored as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BehaviorVector(u16);

impl BehaviorVector {
    pub const EMPTY: BehaviorVector = BehaviorVector(0);

    pub fn from_bits(bits: u16) -> Self {
        BehaviorVector(bits & 0x0fff)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    /// Builds a vector from one-based behavior numbers; numbers outside 1..=12 are ignored.
    pub fn from_numbers(numbers: &[u8]) -> Self {
        numbers
            .iter()
            .filter_map(|&n| Behavior::from_number(n))
            .fold(Self::EMPTY, |v, b| v.with(b))
    }

    pub fn with(mut self, behavior: Behavior) -> Self {
        self.set(behavior, true);
        self
    }

    pub fn set(&mut self, behavior: Behavior, on: bool) {
        let mask = 1u16 << behavior.index();
        if on {
            self.0 |= mask;
        } else {
            self.0 &= !mask;
        }
    }

    pub fn union(self, other: BehaviorVector) -> Self {
        BehaviorVector(self.0 | other.0)
    }

    pub fn contains(self, behavior: Behavior) -> bool {
        self.0 & (1 << behavior.index()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Active behaviors in execution order.
    pub fn iter(self) -> impl Iterator<Item = Behavior> {
        Behavior::ALL.into_iter().filter(move |b| self.contains(*b))
    }

    pub fn numbers(self) -> Vec<u8> {
        self.iter().map(Behavior::number).collect()
    }

    pub fn as_bools(self) -> [bool; BEHAVIOR_COUNT] {
        std::array::from_fn(|i| self.0 & (1 << i) != 0)
    }
}

/// Per-behavior vote counts gathered from output neurons.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VoteTally {
    /// Output neurons bound to each behavior (n_q).
    pub bound: [u32; BEHAVIOR_COUNT],
    /// Bound output neurons currently in state 1.
    pub on: [u32; BEHAVIOR_COUNT],
}

impl VoteTally {
    pub fn record(&mut self, behavior: Behavior, state: bool) {
        let i = behavior.index();
        self.bound[i] += 1;
        self.on[i] += u32::from(state);
    }

    /// Vote fraction p(q); `None` when no neuron is bound to the behavior.
    pub fn fraction(&self, behavior: Behavior) -> Option<f64> {
        let i = behavior.index();
        (self.bound[i] > 0).then(|| f64::from(self.on[i]) / f64::from(self.bound[i]))
    }

    /// A behavior fires when at least half of its bound neurons vote for it.
    pub fn decide(&self) -> BehaviorVector {
        let mut out = BehaviorVector::EMPTY;
        for b in Behavior::ALL {
            let i = b.index();
            // p(q) >= 0.5 evaluated exactly in integers.
            if self.bound[i] > 0 && 2 * self.on[i] >= self.bound[i] {
                out.set(b, true);
            }
        }
        out
    }
}

/// Aggregates `(behavior, state)` votes into a behavior vector.
pub fn arbitrate<I>(votes: I) -> BehaviorVector
where
    I: IntoIterator<Item = (Behavior, bool)>,
{
    let mut tally = VoteTally::default();
    for (b, s) in votes {
        tally.record(b, s);
    }
    tally.decide()
}
