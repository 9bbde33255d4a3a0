//! Behavior execution and the per-timestep update loop.

use super::worksite::{MoveOutcome, Worksite};
use crate::behavior::{Behavior, BehaviorVector};
use crate::controller::Controller;
use crate::sensors::{BladeState, SensorFrame};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Turn {
    Left,
    Right,
}

/// What happened when one robot executed its behaviors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Execution {
    pub random_turn: Option<Turn>,
    pub forward: Option<MoveOutcome>,
    pub backward: Option<MoveOutcome>,
}

/// One robot's timestep as seen by observers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepTrace {
    pub timestep: u64,
    pub robot: usize,
    pub frame: SensorFrame,
    pub behaviors: BehaviorVector,
    pub execution: Execution,
}

/// Receives execution traces; must not influence the simulation.
pub trait StepObserver {
    fn observe(&mut self, trace: &StepTrace);
}

/// Observer that discards everything.
pub struct NoObserver;

impl StepObserver for NoObserver {
    fn observe(&mut self, _: &StepTrace) {}
}

impl<F: FnMut(&StepTrace)> StepObserver for F {
    fn observe(&mut self, trace: &StepTrace) {
        self(trace)
    }
}

impl Worksite {
    /// Applies the selected behaviors of one robot in their fixed order.
    pub fn execute_behaviors<R: Rng + ?Sized>(
        &mut self,
        robot: usize,
        behaviors: BehaviorVector,
        rng: &mut R,
    ) -> Execution {
        let mut exec = Execution::default();
        {
            let r = &mut self.robots_mut()[robot];
            r.stuck = false;
            r.throttle = false;
        }
        for b in behaviors.iter() {
            match b {
                Behavior::ThrottleUp => self.robots_mut()[robot].throttle = true,
                Behavior::MoveForward => {
                    let outcome = self.move_forward(robot);
                    if outcome != MoveOutcome::Moved {
                        self.robots_mut()[robot].stuck = true;
                    }
                    exec.forward = Some(outcome);
                }
                Behavior::MoveBackward => {
                    let outcome = self.move_backward(robot);
                    if outcome != MoveOutcome::Moved {
                        self.robots_mut()[robot].stuck = true;
                    }
                    exec.backward = Some(outcome);
                }
                Behavior::RandomTurn => {
                    let turn = if rng.gen::<bool>() { Turn::Left } else { Turn::Right };
                    self.turn(robot, turn);
                    exec.random_turn = Some(turn);
                }
                Behavior::TurnRight => self.turn(robot, Turn::Right),
                Behavior::TurnLeft => self.turn(robot, Turn::Left),
                Behavior::BladeAbove => self.robots_mut()[robot].blade = BladeState::Above,
                Behavior::BladeBelow => self.robots_mut()[robot].blade = BladeState::Below,
                Behavior::BladeLevel => self.robots_mut()[robot].blade = BladeState::Level,
                Behavior::BladeHome => self.robots_mut()[robot].blade = BladeState::Home,
                Behavior::BitSet => self.robots_mut()[robot].memory = true,
                Behavior::BitClear => self.robots_mut()[robot].memory = false,
            }
        }
        let load = self.blade_volume(robot);
        self.robots_mut()[robot].load = load;
        exec
    }

    fn turn(&mut self, robot: usize, turn: Turn) {
        let r = &mut self.robots_mut()[robot];
        r.heading = match turn {
            Turn::Left => r.heading.turned_left(),
            Turn::Right => r.heading.turned_right(),
        };
    }

    /// Advances the worksite one timestep: each robot in index order senses,
    /// decides and acts.
    pub fn step<C, R, O>(&mut self, controller: &mut C, rng: &mut R, observer: &mut O)
    where
        C: Controller + ?Sized,
        R: Rng + ?Sized,
        O: StepObserver + ?Sized,
    {
        for robot in 0..self.robots().len() {
            let frame = self.sense(robot);
            let behaviors = controller.decide(&frame);
            let execution = self.execute_behaviors(robot, behaviors, rng);
            observer.observe(&StepTrace {
                timestep: self.timestep(),
                robot,
                frame,
                behaviors,
                execution,
            });
        }
        self.advance_clock();
    }
}
