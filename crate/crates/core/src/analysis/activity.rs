//! Decision-neuron activity logging.

use crate::sim::{StepObserver, StepTrace};
use crate::tissue::Tissue;
use std::fmt::Write as _;

/// Per-step decision-neuron states for one robot, one row per timestep.
#[derive(Clone, Debug)]
pub struct ActivityLog<'t> {
    tissue: &'t Tissue,
    robot: usize,
    rows: Vec<(u64, Vec<bool>)>,
}

impl<'t> ActivityLog<'t> {
    pub fn new(tissue: &'t Tissue, robot: usize) -> Self {
        ActivityLog { tissue, robot, rows: Vec::new() }
    }

    pub fn rows(&self) -> impl Iterator<Item = (u64, &[bool])> {
        self.rows.iter().map(|(t, r)| (*t, r.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Fraction of logged timesteps each decision neuron was on.
    pub fn duty_cycle(&self) -> Vec<f64> {
        let n = self.tissue.decisions().len();
        if self.rows.is_empty() {
            return vec![0.0; n];
        }
        let mut on = vec![0u64; n];
        for (_, row) in &self.rows {
            for (c, &s) in on.iter_mut().zip(row) {
                *c += u64::from(s);
            }
        }
        on.into_iter().map(|c| c as f64 / self.rows.len() as f64).collect()
    }

    /// One line per timestep: the timestep, a space, then one `0`/`1` per
    /// decision neuron in tissue order.
    pub fn to_ascii(&self) -> String {
        let mut s = String::new();
        for (t, row) in &self.rows {
            let _ = write!(s, "{t} ");
            s.extend(row.iter().map(|&b| if b { '1' } else { '0' }));
            s.push('\n');
        }
        s
    }
}

impl StepObserver for ActivityLog<'_> {
    fn observe(&mut self, trace: &StepTrace) {
        if trace.robot == self.robot {
            self.rows.push((trace.timestep, self.tissue.decision_states(&trace.frame)));
        }
    }
}
