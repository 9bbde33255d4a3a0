//! Discretized sensor readings of one robot and their one-hot encoding.
//!
//! Every variable is presented to a controller as a group of one-hot input
//! neurons, so a frame always activates exactly [`SENSOR_VARIABLES`] of the
//! [`INPUT_COUNT`] sensor inputs.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Depth of a blueprint cell relative to its goal, or the cell's role.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ZoneReading {
    Level,
    Above,
    Below,
    DontCare,
    Dump,
}

/// Soil height of a cell relative to the front wheel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relief {
    Above,
    Below,
    Level,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BladeState {
    Below,
    Level,
    Above,
    Home,
}

impl BladeState {
    /// Blade offset relative to wheel depth; `None` when retracted.
    pub fn offset(self) -> Option<i64> {
        match self {
            BladeState::Below => Some(-1),
            BladeState::Level => Some(0),
            BladeState::Above => Some(1),
            BladeState::Home => None,
        }
    }
}

/// Compass direction, in the order used for sensor encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Compass {
    North,
    East,
    West,
    South,
}

pub const ZONE_STATES: [ZoneReading; 5] = [
    ZoneReading::Level,
    ZoneReading::Above,
    ZoneReading::Below,
    ZoneReading::DontCare,
    ZoneReading::Dump,
];
pub const RELIEF_STATES: [Relief; 3] = [Relief::Above, Relief::Below, Relief::Level];
pub const BLADE_STATES: [BladeState; 4] = [
    BladeState::Below,
    BladeState::Level,
    BladeState::Above,
    BladeState::Home,
];
pub const COMPASS_STATES: [Compass; 4] = [Compass::North, Compass::East, Compass::West, Compass::South];

/// Sizes of each variable's state set, in encoding order:
/// Z1..Z4, E1, E2, B1, L1, S1, D1, H1, R1, U1, M1.
pub const VARIABLE_ARITIES: [usize; SENSOR_VARIABLES] = [5, 5, 5, 5, 3, 3, 4, 5, 2, 4, 4, 2, 2, 2];

/// Number of discrete sensor variables in a frame.
pub const SENSOR_VARIABLES: usize = 14;

/// Number of one-hot sensor input neurons.
pub const INPUT_COUNT: usize = 51;

/// Size of the factored sensor state space (product of the arities).
pub const STATE_SPACE: u32 = 28_800_000;

/// One robot's sensor readings for one timestep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SensorFrame {
    /// Z1..Z4: the 2x2 block ahead (far-left, near-left, near-right, far-right).
    pub zones: [ZoneReading; 4],
    /// E1, E2: cells beyond each blade cell compared with front-wheel depth.
    pub relief: [Relief; 2],
    /// B1.
    pub blade: BladeState,
    /// L1, 0..=4.
    pub load: u8,
    /// S1.
    pub obstacle: bool,
    /// D1, 0..=3.
    pub distance: u8,
    /// H1.
    pub nearest: Compass,
    /// R1.
    pub tilted: bool,
    /// U1.
    pub stuck: bool,
    /// M1.
    pub memory: bool,
}

impl Default for SensorFrame {
    fn default() -> Self {
        SensorFrame {
            zones: [ZoneReading::Level; 4],
            relief: [Relief::Level; 2],
            blade: BladeState::Home,
            load: 0,
            obstacle: false,
            distance: 3,
            nearest: Compass::North,
            tilted: false,
            stuck: false,
            memory: false,
        }
    }
}

fn zone_index(z: ZoneReading) -> usize {
    z as usize
}

impl SensorFrame {
    /// State index of every variable, in encoding order.
    pub fn digits(&self) -> [usize; SENSOR_VARIABLES] {
        [
            zone_index(self.zones[0]),
            zone_index(self.zones[1]),
            zone_index(self.zones[2]),
            zone_index(self.zones[3]),
            self.relief[0] as usize,
            self.relief[1] as usize,
            self.blade as usize,
            self.load.min(4) as usize,
            usize::from(self.obstacle),
            self.distance.min(3) as usize,
            self.nearest as usize,
            usize::from(self.tilted),
            usize::from(self.stuck),
            usize::from(self.memory),
        ]
    }

    /// Indices of the active one-hot input neurons, one per variable.
    pub fn active_inputs(&self) -> [usize; SENSOR_VARIABLES] {
        let digits = self.digits();
        let mut out = [0; SENSOR_VARIABLES];
        let mut base = 0;
        for (i, (&d, &arity)) in digits.iter().zip(VARIABLE_ARITIES.iter()).enumerate() {
            out[i] = base + d;
            base += arity;
        }
        out
    }

    /// Dense 0/1 state vector over all sensor input neurons.
    pub fn input_states(&self) -> [f64; INPUT_COUNT] {
        let mut s = [0.0; INPUT_COUNT];
        for i in self.active_inputs() {
            s[i] = 1.0;
        }
        s
    }

    /// Mixed-radix code in `0..STATE_SPACE`, unique per frame.
    pub fn code(&self) -> u32 {
        let digits = self.digits();
        let mut code = 0u32;
        for (&d, &arity) in digits.iter().zip(VARIABLE_ARITIES.iter()) {
            code = code * arity as u32 + d as u32;
        }
        code
    }

    /// Inverse of [`SensorFrame::code`]; `None` when out of range.
    pub fn from_code(mut code: u32) -> Option<SensorFrame> {
        if code >= STATE_SPACE {
            return None;
        }
        let mut digits = [0usize; SENSOR_VARIABLES];
        for i in (0..SENSOR_VARIABLES).rev() {
            let arity = VARIABLE_ARITIES[i] as u32;
            digits[i] = (code % arity) as usize;
            code /= arity;
        }
        Some(SensorFrame {
            zones: [
                ZONE_STATES[digits[0]],
                ZONE_STATES[digits[1]],
                ZONE_STATES[digits[2]],
                ZONE_STATES[digits[3]],
            ],
            relief: [RELIEF_STATES[digits[4]], RELIEF_STATES[digits[5]]],
            blade: BLADE_STATES[digits[6]],
            load: digits[7] as u8,
            obstacle: digits[8] == 1,
            distance: digits[9] as u8,
            nearest: COMPASS_STATES[digits[10]],
            tilted: digits[11] == 1,
            stuck: digits[12] == 1,
            memory: digits[13] == 1,
        })
    }

    /// Uniform sample from the factored sensor space.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> SensorFrame {
        Self::from_code(rng.gen_range(0..STATE_SPACE)).expect("code in range")
    }

    /// Z2: near-left cell ahead.
    pub fn z2(&self) -> ZoneReading {
        self.zones[1]
    }

    /// Z3: near-right cell ahead.
    pub fn z3(&self) -> ZoneReading {
        self.zones[2]
    }
}
