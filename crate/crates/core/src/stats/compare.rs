use std::fmt::Write as _;

use rayon::prelude::*;

use super::{five_number_summary, wilcoxon_rank_sum, FiveNumberSummary};
use crate::engine::{run_gsgp, run_stgp, EngineError, GsgpConfig, StgpConfig, TaskData};
use crate::metrics::rmse;

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonConfig {
    pub runs: usize,
    pub base_seed: u64,
    /// The seed fields of both configs are overwritten per run.
    pub gsgp: GsgpConfig,
    pub stgp: StgpConfig,
}

impl ComparisonConfig {
    pub fn seed_for(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }
}

/// Per-run test RMSE of one algorithm and its box-plot summary.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRuns {
    pub name: &'static str,
    pub seeds: Vec<u64>,
    pub test_rmse: Vec<f64>,
    pub summary: FiveNumberSummary,
}

impl AlgorithmRuns {
    fn new(name: &'static str, seeds: Vec<u64>, test_rmse: Vec<f64>) -> Self {
        let summary = five_number_summary(&test_rmse).expect("at least two runs");
        AlgorithmRuns {
            name,
            seeds,
            test_rmse,
            summary,
        }
    }

    pub fn iqr(&self) -> f64 {
        self.summary.iqr()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonStats {
    pub gsgp: AlgorithmRuns,
    pub stgp: AlgorithmRuns,
    /// Two-sided rank-sum p-value of GSGP vs STGP test RMSE.
    pub wilcoxon_p: f64,
}

impl ComparisonStats {
    pub fn algorithms(&self) -> [&AlgorithmRuns; 2] {
        [&self.gsgp, &self.stgp]
    }

    /// `comparison_runs.csv`: algorithm,run_index,seed,test_rmse
    pub fn runs_csv(&self) -> String {
        let mut out = String::from("algorithm,run_index,seed,test_rmse\n");
        for alg in self.algorithms() {
            for (i, (seed, e)) in alg.seeds.iter().zip(&alg.test_rmse).enumerate() {
                let _ = writeln!(out, "{},{i},{seed},{e}", alg.name);
            }
        }
        out
    }

    /// `comparison_summary.csv`: algorithm,min,q1,median,q3,max,iqr
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("algorithm,min,q1,median,q3,max,iqr\n");
        for alg in self.algorithms() {
            let s = &alg.summary;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                alg.name,
                s.min,
                s.q1,
                s.median,
                s.q3,
                s.max,
                s.iqr()
            );
        }
        out
    }

    pub fn wilcoxon_record(&self) -> String {
        format!("wilcoxon_p={}\n", self.wilcoxon_p)
    }
}

/// Run both algorithms `runs` times with seeds `base_seed + r` and compare the
/// test RMSE of each run's best individual. Runs execute concurrently; output
/// order follows the run index.
pub fn run_comparison(
    cfg: &ComparisonConfig,
    train: &TaskData,
    test: &TaskData,
) -> Result<ComparisonStats, EngineError> {
    if cfg.runs < 2 {
        return Err(EngineError::Config(format!(
            "comparison needs at least 2 runs, got {}",
            cfg.runs
        )));
    }
    if test.is_empty() {
        return Err(EngineError::Config("comparison needs a non-empty test set".into()));
    }
    cfg.gsgp.validate()?;
    cfg.stgp.validate()?;

    let results: Vec<(u64, f64, f64)> = (0..cfg.runs)
        .into_par_iter()
        .map(|r| {
            let seed = cfg.seed_for(r);
            let gsgp = GsgpConfig {
                seed,
                ..cfg.gsgp.clone()
            };
            let stgp = StgpConfig {
                seed,
                ..cfg.stgp.clone()
            };
            let g = run_gsgp(&gsgp, train, test)?;
            let g_rmse = rmse(&g.test_outputs, &test.targets)?;
            drop(g);
            let s = run_stgp(&stgp, train, test)?;
            let s_rmse = rmse(&s.test_outputs, &test.targets)?;
            Ok((seed, g_rmse, s_rmse))
        })
        .collect::<Result<_, EngineError>>()?;

    let seeds: Vec<u64> = results.iter().map(|r| r.0).collect();
    let g: Vec<f64> = results.iter().map(|r| r.1).collect();
    let s: Vec<f64> = results.iter().map(|r| r.2).collect();
    let wilcoxon_p = wilcoxon_rank_sum(&g, &s);
    Ok(ComparisonStats {
        gsgp: AlgorithmRuns::new("gsgp", seeds.clone(), g),
        stgp: AlgorithmRuns::new("stgp", seeds, s),
        wilcoxon_p,
    })
}
