//! Box-plot summaries, the Wilcoxon rank-sum test, and the repeated-run
//! comparison between GSGP and standard GP.

mod compare;
mod wilcoxon;

pub use compare::{run_comparison, AlgorithmRuns, ComparisonConfig, ComparisonStats};
pub use wilcoxon::{wilcoxon_rank_sum, wilcoxon_rank_sum_exact, wilcoxon_rank_sum_normal};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("summary of an empty sample")]
    Empty,
}

/// Quantile of an ascending slice by linear interpolation between order
/// statistics at zero-based position `p * (n - 1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        return sorted[lo];
    }
    let frac = pos - lo as f64;
    (sorted[lo] + (sorted[hi] - sorted[lo]) * frac).clamp(sorted[lo], sorted[hi])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumberSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl FiveNumberSummary {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

pub fn five_number_summary(xs: &[f64]) -> Result<FiveNumberSummary, StatsError> {
    if xs.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(FiveNumberSummary {
        min: s[0],
        q1: quantile_sorted(&s, 0.25),
        median: quantile_sorted(&s, 0.5),
        q3: quantile_sorted(&s, 0.75),
        max: s[s.len() - 1],
    })
}
