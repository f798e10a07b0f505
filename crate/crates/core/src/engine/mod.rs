//! Generational evolution for GSGP and the standard tree-GP baseline.
//!
//! Both engines own a single ChaCha8 generator seeded from the config. Per
//! offspring the draws happen in a fixed order: operator choice, parent
//! tournaments, then operator randomness. All randomness for a generation is
//! drawn before any parallel evaluation, so results do not depend on the
//! number of worker threads.

mod gsgp;
mod stgp;

pub use gsgp::{initialize, run_gsgp, step_generation};
pub use stgp::{run_stgp, StgpConfig};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{DataError, DataSplit, Features, SlopeDataset};
use crate::gsgp::{GsgpError, IndividualId, LineageStore};
use crate::metrics::{MetricError, MetricsReport, Task};
use crate::tree::{ExpressionTree, GenMethod, TreeGenConfig};

/// Environment variable capping worker threads; 0 or unset means automatic.
pub const THREADS_ENV: &str = "GSGP_THREADS";

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Gsgp(#[from] GsgpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationMode {
    /// Shift by `m_s * (r1 - r2)` with two uniform random numbers.
    Scalar,
    /// Shift by `m_s * (sig(T1) - sig(T2))` with two random trees.
    Tree,
}

impl MutationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MutationMode::Scalar => "scalar",
            MutationMode::Tree => "tree",
        }
    }
}

impl std::fmt::Display for MutationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MutationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "scalar" => Ok(MutationMode::Scalar),
            "tree" => Ok(MutationMode::Tree),
            other => Err(format!("unknown mutation mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GsgpConfig {
    pub population_size: usize,
    pub generations: usize,
    pub mutation_step: f64,
    pub crossover_probability: f64,
    pub mutation_probability: f64,
    pub tournament_size: usize,
    pub elitism_count: usize,
    pub mutation_mode: MutationMode,
    pub tree_gen: TreeGenConfig,
    /// Shape of the random trees used by tree-mode mutation.
    pub mutation_tree_gen: TreeGenConfig,
    pub seed: u64,
    pub task: Task,
}

impl GsgpConfig {
    pub fn new(task: Task, seed: u64) -> Self {
        GsgpConfig {
            population_size: 500,
            generations: 50,
            mutation_step: 0.1,
            crossover_probability: 0.7,
            mutation_probability: 0.3,
            tournament_size: 4,
            elitism_count: 1,
            mutation_mode: MutationMode::Tree,
            tree_gen: TreeGenConfig::default(),
            mutation_tree_gen: TreeGenConfig {
                min_depth: 1,
                max_depth: 4,
                method: GenMethod::Grow,
                constants: None,
            },
            seed,
            task,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let err = |m: String| Err(EngineError::Config(m));
        let p = (self.crossover_probability, self.mutation_probability);
        if !(0.0..=1.0).contains(&p.0) || !(0.0..=1.0).contains(&p.1) {
            return err(format!("probabilities {p:?} must lie in [0, 1]"));
        }
        if (p.0 + p.1 - 1.0).abs() > 1e-9 {
            return err(format!(
                "crossover ({}) and mutation ({}) probabilities must sum to 1",
                p.0, p.1
            ));
        }
        if !(self.mutation_step > 0.0 && self.mutation_step.is_finite()) {
            return err(format!("mutation step {} must be positive", self.mutation_step));
        }
        check_selection(self.population_size, self.tournament_size, self.elitism_count)?;
        self.tree_gen.validate().map_err(EngineError::Config)?;
        self.mutation_tree_gen.validate().map_err(EngineError::Config)?;
        Ok(())
    }
}

fn check_selection(pop: usize, tournament: usize, elitism: usize) -> Result<(), EngineError> {
    if tournament < 1 || pop < tournament {
        return Err(EngineError::Config(format!(
            "need population_size ({pop}) >= tournament_size ({tournament}) >= 1"
        )));
    }
    if elitism >= pop {
        return Err(EngineError::Config(format!(
            "elitism_count ({elitism}) must be below population_size ({pop})"
        )));
    }
    Ok(())
}

/// Input rows and task targets for one side of a split.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskData {
    pub rows: Vec<Features>,
    pub targets: Vec<f64>,
}

impl TaskData {
    pub fn from_dataset(
        ds: &SlopeDataset,
        indices: &[usize],
        task: Task,
    ) -> Result<TaskData, DataError> {
        Ok(TaskData {
            rows: ds.features_at(indices)?,
            targets: ds.targets(task, indices)?,
        })
    }

    /// Train and test views of `ds` under `split`.
    pub fn split(
        ds: &SlopeDataset,
        split: &DataSplit,
        task: Task,
    ) -> Result<(TaskData, TaskData), DataError> {
        Ok((
            Self::from_dataset(ds, &split.train, task)?,
            Self::from_dataset(ds, &split.test, task)?,
        ))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub median_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Gsgp {
        store: LineageStore,
        best: IndividualId,
    },
    Stgp {
        tree: ExpressionTree,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub task: Task,
    pub model: TrainedModel,
    pub best_fitness: f64,
    pub per_generation: Vec<GenerationStats>,
    pub train_outputs: Vec<f64>,
    pub test_outputs: Vec<f64>,
    pub train_metrics: MetricsReport,
    pub test_metrics: MetricsReport,
}

impl RunResult {
    /// Best individual id for GSGP runs.
    pub fn best_id(&self) -> Option<IndividualId> {
        match &self.model {
            TrainedModel::Gsgp { best, .. } => Some(*best),
            TrainedModel::Stgp { .. } => None,
        }
    }

    pub fn store(&self) -> Option<&LineageStore> {
        match &self.model {
            TrainedModel::Gsgp { store, .. } => Some(store),
            TrainedModel::Stgp { .. } => None,
        }
    }

    /// Run log CSV: `generation,best_fitness,median_fitness`.
    pub fn log_csv(&self) -> String {
        let mut out = String::from("generation,best_fitness,median_fitness\n");
        for g in &self.per_generation {
            out.push_str(&format!(
                "{},{},{}\n",
                g.generation, g.best_fitness, g.median_fitness
            ));
        }
        out
    }
}

/// One entrant in a tournament.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub id: usize,
    pub fitness: f64,
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    match a.fitness.total_cmp(&b.fitness) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => a.id < b.id,
    }
}

/// `k` uniform draws with replacement; lowest fitness wins, ties go to the
/// lower id. Returns the winner's position in `population`.
pub fn tournament_select<R: Rng + ?Sized>(population: &[Candidate], k: usize, rng: &mut R) -> usize {
    assert!(!population.is_empty() && k >= 1);
    let mut best = rng.gen_range(0..population.len());
    for _ in 1..k {
        let i = rng.gen_range(0..population.len());
        if better(&population[i], &population[best]) {
            best = i;
        }
    }
    best
}

/// Positions of `population` ordered best first.
fn ranking(population: &[Candidate]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| {
        population[a]
            .fitness
            .total_cmp(&population[b].fitness)
            .then(population[a].id.cmp(&population[b].id))
    });
    order
}

fn generation_stats(generation: usize, population: &[Candidate]) -> GenerationStats {
    let mut f: Vec<f64> = population.iter().map(|c| c.fitness).collect();
    f.sort_by(f64::total_cmp);
    GenerationStats {
        generation,
        best_fitness: f[0],
        median_fitness: crate::stats::quantile_sorted(&f, 0.5),
    }
}

fn check_data(task: Task, train: &TaskData, test: &TaskData) -> Result<(), EngineError> {
    if train.is_empty() {
        return Err(EngineError::Config("training set is empty".into()));
    }
    for d in [train, test] {
        if d.rows.len() != d.targets.len() {
            return Err(MetricError::LengthMismatch {
                left: d.rows.len(),
                right: d.targets.len(),
            }
            .into());
        }
        if d.targets.iter().any(|t| !t.is_finite()) {
            return Err(DataError::MissingLabels(task.label_column()).into());
        }
    }
    Ok(())
}

/// Worker thread cap from `GSGP_THREADS`; 0 means automatic.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

/// Run `f` on a dedicated pool of `threads` workers (0 = one per core).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Convenience wrapper: split `ds`, then run GSGP.
pub fn run_gsgp_on(
    cfg: &GsgpConfig,
    ds: &SlopeDataset,
    split: &DataSplit,
) -> Result<RunResult, EngineError> {
    if !ds.has_labels_for(cfg.task) {
        return Err(DataError::MissingLabels(cfg.task.label_column()).into());
    }
    let (train, test) = TaskData::split(ds, split, cfg.task)?;
    run_gsgp(cfg, &train, &test)
}
