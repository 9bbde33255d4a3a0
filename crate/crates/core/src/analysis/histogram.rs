//! Distribution of evolved team sizes across independent runs.

use crate::error::{Error, Result};
use crate::tissue::ROBOT_COUNT_RANGE;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const ROBOT_COUNT_MIN: u32 = ROBOT_COUNT_RANGE.0;
const ROBOT_COUNT_MAX: u32 = ROBOT_COUNT_RANGE.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotCountHistogram {
    /// `counts[i]` is the number of runs whose best genome used `ROBOT_COUNT_RANGE.0 + i` robots.
    pub counts: Vec<u64>,
    pub runs: u64,
    /// Pearson statistic against a uniform distribution over all bins.
    pub chi_square: f64,
    pub degrees_of_freedom: u64,
    pub p_value: f64,
}

impl RobotCountHistogram {
    pub fn bins() -> std::ops::RangeInclusive<u32> {
        ROBOT_COUNT_MIN..=ROBOT_COUNT_MAX
    }

    pub fn count(&self, n: u32) -> u64 {
        n.checked_sub(ROBOT_COUNT_MIN).and_then(|i| self.counts.get(i as usize)).copied().unwrap_or(0)
    }

    /// Whether uniformity survives a test at significance `alpha`.
    pub fn is_uniform_at(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }

    /// Most frequent team size; the smallest wins ties.
    pub fn mode(&self) -> u32 {
        let i = self.counts.iter().enumerate().fold(0, |b, (i, &c)| if c > self.counts[b] { i } else { b });
        ROBOT_COUNT_MIN + i as u32
    }
}

/// Builds the histogram from each run's best team size.
pub fn robot_count_histogram(best_counts: &[u32]) -> Result<RobotCountHistogram> {
    if best_counts.is_empty() {
        return Err(Error::Analysis("no runs to histogram".into()));
    }
    let bins = (ROBOT_COUNT_MAX - ROBOT_COUNT_MIN + 1) as usize;
    let mut counts = vec![0u64; bins];
    for &n in best_counts {
        if !RobotCountHistogram::bins().contains(&n) {
            return Err(Error::Analysis(format!("robot count {n} outside {ROBOT_COUNT_MIN}..={ROBOT_COUNT_MAX}")));
        }
        counts[(n - ROBOT_COUNT_MIN) as usize] += 1;
    }
    let runs = best_counts.len() as u64;
    let expected = runs as f64 / bins as f64;
    let chi_square = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum::<f64>();
    let df = bins as u64 - 1;
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::Analysis(e.to_string()))?;
    let p_value = dist.sf(chi_square);
    Ok(RobotCountHistogram { counts, runs, chi_square, degrees_of_freedom: df, p_value })
}
