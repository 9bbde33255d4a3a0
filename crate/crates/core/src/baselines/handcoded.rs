//! Rule-based reference controller.
//!
//! | rule | condition (`Z` means `Z2` or `Z3`)    | behaviors   |
//! |------|---------------------------------------|-------------|
//! | 1    | stuck                                 | 1 4 7 10 12 |
//! | 2    | else obstacle ahead                   | 4           |
//! | 3    | else `Z` dump and `L1 > 0`            | 2 3 4       |
//! | 4    | `Z` don't care and `L1 > 0`           | 3 4 12      |
//! | 5    | else `Z` don't care                   | 2 4         |
//! | 6    | else `Z` don't care and `L1 = 0`      | 3           |
//! | 7    | `Z` at goal depth                     | 2 4         |
//! | 8    | `Z` below goal depth                  | 2 7 11      |
//! | 9    | `Z` above goal depth                  | 2           |
//! | 10   | `Z` above goal depth, memory clear    | 8 11        |
//! | 11   | `Z` above goal depth, memory set      | 2 9         |
//!
//! Rules 3 to 11 are evaluated together and their selections merged, except
//! that rules 4 to 6 form one first-match group. Rule 5 already covers every
//! frame rule 6 could match, so rule 6 never fires.
//!
//! No rule covers an unloaded robot facing the dump. Its sensors cannot change
//! while it idles, so [`HandCodedController`] turns at random in that case
//! unless built with [`HandCodedController::literal`].

use crate::behavior::{Behavior, BehaviorVector};
use crate::controller::Controller;
use crate::sensors::{SensorFrame, ZoneReading};

#[derive(Clone, Copy, Debug)]
pub struct HandCodedController {
    idle_turn: bool,
}

impl Default for HandCodedController {
    fn default() -> Self {
        HandCodedController { idle_turn: true }
    }
}

impl HandCodedController {
    /// Rule table only: frames matched by no rule select nothing.
    pub fn literal() -> Self {
        HandCodedController { idle_turn: false }
    }
}

fn either(frame: &SensorFrame, reading: ZoneReading) -> bool {
    frame.z2() == reading || frame.z3() == reading
}

/// Behaviors selected by the rule table for `frame`.
pub fn hand_coded_decide(frame: &SensorFrame) -> BehaviorVector {
    if frame.stuck {
        return BehaviorVector::from_numbers(&[1, 4, 7, 10, 12]);
    }
    if frame.obstacle {
        return BehaviorVector::from_numbers(&[4]);
    }
    let mut out = BehaviorVector::EMPTY;
    let mut add = |numbers: &[u8]| out = out.union(BehaviorVector::from_numbers(numbers));
    let loaded = frame.load > 0;
    if either(frame, ZoneReading::Dump) && loaded {
        add(&[2, 3, 4]);
    }
    if either(frame, ZoneReading::DontCare) {
        if loaded {
            add(&[3, 4, 12]);
        } else {
            add(&[2, 4]);
        }
    }
    if either(frame, ZoneReading::Level) {
        add(&[2, 4]);
    }
    if either(frame, ZoneReading::Below) {
        add(&[2, 7, 11]);
    }
    if either(frame, ZoneReading::Above) {
        add(&[2]);
        if frame.memory {
            add(&[2, 9]);
        } else {
            add(&[8, 11]);
        }
    }
    out
}

impl Controller for HandCodedController {
    fn decide(&mut self, frame: &SensorFrame) -> BehaviorVector {
        let selected = hand_coded_decide(frame);
        if selected.is_empty() && self.idle_turn {
            BehaviorVector::EMPTY.with(Behavior::RandomTurn)
        } else {
            selected
        }
    }
}
