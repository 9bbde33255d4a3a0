//! Sensor-behavior detectors: predicates over one robot-timestep that flag
//! recognisable excavation skills.

use crate::behavior::{Behavior, BehaviorVector};
use crate::sensors::{BladeState, SensorFrame, ZoneReading};
use crate::sim::{StepObserver, StepTrace, Turn};
use serde::{Deserialize, Serialize};
use std::ops::AddAssign;

pub const DETECTOR_COUNT: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Detector {
    Level,
    CollisionAvoidance,
    StuckAvoidance,
    CutDig,
    CorrectDump,
}

impl Detector {
    pub const ALL: [Detector; DETECTOR_COUNT] = [
        Detector::Level,
        Detector::CollisionAvoidance,
        Detector::StuckAvoidance,
        Detector::CutDig,
        Detector::CorrectDump,
    ];

    /// Column name used in metrics files.
    pub fn name(self) -> &'static str {
        match self {
            Detector::Level => "level",
            Detector::CollisionAvoidance => "collision_avoidance",
            Detector::StuckAvoidance => "stuck_avoidance",
            Detector::CutDig => "cut_dig",
            Detector::CorrectDump => "correct_dump",
        }
    }
}

/// Which detectors fired, indexed like [`Detector::ALL`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DetectorFlags(pub [bool; DETECTOR_COUNT]);

impl DetectorFlags {
    pub fn fired(&self, d: Detector) -> bool {
        self.0[d as usize]
    }

    pub fn any(&self) -> bool {
        self.0.iter().any(|&f| f)
    }
}

/// Evaluates every detector on one robot-timestep. `random_turn` is the
/// direction Random Turn resolved to, if it fired.
pub fn detect(frame: &SensorFrame, behaviors: BehaviorVector, random_turn: Option<Turn>) -> DetectorFlags {
    let mf = behaviors.contains(Behavior::MoveForward);
    let mb = behaviors.contains(Behavior::MoveBackward);
    let rt = behaviors.contains(Behavior::RandomTurn);
    let tr = behaviors.contains(Behavior::TurnRight);
    let tl = behaviors.contains(Behavior::TurnLeft);
    let loaded = frame.load > 0;

    let level = frame.blade == BladeState::Level && loaded && mf;
    let collision = frame.obstacle && !mf && !rt && (tr != tl || mb);
    let stuck = frame.stuck && !mf && (mb || rt || tl != tr);
    let cut_dig = frame.blade == BladeState::Below && mf;
    let at_dump = frame.z2() == ZoneReading::Dump && frame.z3() == ZoneReading::Dump && loaded && mf;
    let straight = !rt && tl == tr;
    let undone_left = rt && random_turn == Some(Turn::Left) && tr && !tl;
    let undone_right = rt && random_turn == Some(Turn::Right) && !tr && tl;
    let dump = at_dump && (straight || undone_left || undone_right);

    DetectorFlags([level, collision, stuck, cut_dig, dump])
}

/// Per-detector firing counts over one or more evaluations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorCounts(pub [u64; DETECTOR_COUNT]);

impl DetectorCounts {
    pub fn get(&self, d: Detector) -> u64 {
        self.0[d as usize]
    }

    pub fn record(&mut self, flags: DetectorFlags) {
        for (count, fired) in self.0.iter_mut().zip(flags.0) {
            *count += u64::from(fired);
        }
    }
}

impl AddAssign for DetectorCounts {
    fn add_assign(&mut self, other: DetectorCounts) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
    }
}

impl StepObserver for DetectorCounts {
    fn observe(&mut self, trace: &StepTrace) {
        self.record(detect(&trace.frame, trace.behaviors, trace.execution.random_turn));
    }
}
