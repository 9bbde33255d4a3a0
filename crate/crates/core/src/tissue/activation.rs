use rand::Rng;
use serde::{Deserialize, Serialize};

/// Selector bits and thresholds of the modular activation function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivationParams {
    pub k1: bool,
    pub k2: bool,
    pub theta1: f64,
    pub theta2: f64,
}

/// The four threshold shapes addressed by `(k1, k2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActivationKind {
    /// `(0, 0)`: on below `theta1`.
    Down,
    /// `(0, 1)`: on above `theta2`.
    Up,
    /// `(1, 0)`: off inside `[min, max)`.
    Ditch,
    /// `(1, 1)`: on inside `(min, max]`.
    Mound,
}

impl ActivationParams {
    pub fn new(kind: ActivationKind, theta1: f64, theta2: f64) -> Self {
        let (k1, k2) = match kind {
            ActivationKind::Down => (false, false),
            ActivationKind::Up => (false, true),
            ActivationKind::Ditch => (true, false),
            ActivationKind::Mound => (true, true),
        };
        ActivationParams { k1, k2, theta1, theta2 }
    }

    pub fn kind(&self) -> ActivationKind {
        match (self.k1, self.k2) {
            (false, false) => ActivationKind::Down,
            (false, true) => ActivationKind::Up,
            (true, false) => ActivationKind::Ditch,
            (true, true) => ActivationKind::Mound,
        }
    }

    /// Selector bits uniform, thresholds uniform in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        ActivationParams {
            k1: rng.gen(),
            k2: rng.gen(),
            theta1: rng.gen_range(-1.0..=1.0),
            theta2: rng.gen_range(-1.0..=1.0),
        }
    }

    pub fn apply(&self, sigma: f64) -> bool {
        modular_activation(sigma, self)
    }
}

/// Binary neuron output for weighted input `sigma`.
pub fn modular_activation(sigma: f64, params: &ActivationParams) -> bool {
    let (lo, hi) = if params.theta1 <= params.theta2 {
        (params.theta1, params.theta2)
    } else {
        (params.theta2, params.theta1)
    };
    match params.kind() {
        ActivationKind::Down => sigma < params.theta1,
        ActivationKind::Up => sigma > params.theta2,
        ActivationKind::Ditch => !(lo <= sigma && sigma < hi),
        ActivationKind::Mound => lo < sigma && sigma <= hi,
    }
}

/// Normalized weighted input `sum(w*s) / sum(s)`, zero when both sums vanish.
///
/// Only the overlapping prefix is used if the slices differ in length.
pub fn weighted_input(weights: &[f64], states: &[f64]) -> f64 {
    let (num, den) = weights
        .iter()
        .zip(states)
        .fold((0.0, 0.0), |(n, d), (w, s)| (n + w * s, d + s));
    if num == 0.0 && den == 0.0 {
        0.0
    } else {
        num / den
    }
}
