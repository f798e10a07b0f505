use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    check_data, check_selection, generation_stats, ranking, tournament_select, Candidate,
    EngineError, GsgpConfig, RunResult, TaskData, TrainedModel,
};
use crate::metrics::{fitness, MetricsReport, Task};
use crate::tree::{random_tree, ExpressionTree, GenMethod, TreeGenConfig};

/// Standard tree GP with subtree crossover and subtree mutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StgpConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_probability: f64,
    pub mutation_probability: f64,
    pub tournament_size: usize,
    pub elitism_count: usize,
    pub tree_gen: TreeGenConfig,
    /// Shape of replacement subtrees in subtree mutation.
    pub mutation_tree_gen: TreeGenConfig,
    /// Offspring deeper than this are replaced by a copy of their parent.
    pub max_depth: usize,
    pub seed: u64,
    pub task: Task,
}

impl StgpConfig {
    /// Same population, selection, initialization and seed as a GSGP config,
    /// with depth cap 17.
    pub fn matching(cfg: &GsgpConfig) -> Self {
        StgpConfig {
            population_size: cfg.population_size,
            generations: cfg.generations,
            crossover_probability: cfg.crossover_probability,
            mutation_probability: cfg.mutation_probability,
            tournament_size: cfg.tournament_size,
            elitism_count: cfg.elitism_count,
            tree_gen: cfg.tree_gen,
            mutation_tree_gen: TreeGenConfig {
                min_depth: 1,
                max_depth: 4,
                method: GenMethod::Grow,
                constants: cfg.tree_gen.constants,
            },
            max_depth: 17,
            seed: cfg.seed,
            task: cfg.task,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let (pc, pm) = (self.crossover_probability, self.mutation_probability);
        if !(0.0..=1.0).contains(&pc) || !(0.0..=1.0).contains(&pm) || (pc + pm - 1.0).abs() > 1e-9 {
            return Err(EngineError::Config(format!(
                "crossover ({pc}) and mutation ({pm}) probabilities must lie in [0, 1] and sum to 1"
            )));
        }
        check_selection(self.population_size, self.tournament_size, self.elitism_count)?;
        self.tree_gen.validate().map_err(EngineError::Config)?;
        self.mutation_tree_gen.validate().map_err(EngineError::Config)?;
        if self.max_depth < self.tree_gen.max_depth {
            return Err(EngineError::Config(format!(
                "depth cap {} is below the initial max depth {}",
                self.max_depth, self.tree_gen.max_depth
            )));
        }
        Ok(())
    }
}

struct Member {
    tree: ExpressionTree,
    fitness: f64,
}

fn evaluate(trees: Vec<ExpressionTree>, cfg: &StgpConfig, train: &TaskData) -> Result<Vec<Member>, EngineError> {
    trees
        .into_par_iter()
        .map(|tree| {
            let f = fitness(cfg.task, &tree.semantics(&train.rows), &train.targets)?;
            Ok(Member { tree, fitness: f })
        })
        .collect()
}

fn candidates(population: &[Member]) -> Vec<Candidate> {
    population
        .iter()
        .enumerate()
        .map(|(id, m)| Candidate {
            id,
            fitness: m.fitness,
        })
        .collect()
}

fn offspring<R: Rng + ?Sized>(
    population: &[Member],
    pool: &[Candidate],
    cfg: &StgpConfig,
    rng: &mut R,
) -> ExpressionTree {
    let crossover = rng.gen::<f64>() < cfg.crossover_probability;
    let parent = &population[tournament_select(pool, cfg.tournament_size, rng)].tree;
    let child = if crossover {
        let donor = &population[tournament_select(pool, cfg.tournament_size, rng)].tree;
        let at = rng.gen_range(0..parent.size());
        let from = rng.gen_range(0..donor.size());
        let piece = donor.subtree(from).expect("index below size").clone();
        parent.replace_subtree(at, piece)
    } else {
        let at = rng.gen_range(0..parent.size());
        let fresh = random_tree(&cfg.mutation_tree_gen, rng).into_root();
        parent.replace_subtree(at, fresh)
    }
    .expect("index below size");
    if child.depth() > cfg.max_depth {
        parent.clone()
    } else {
        child
    }
}

/// Conventional tree GP. Shares initialization, selection and elitism with
/// [`super::run_gsgp`]; with equal seeds both start from identical
/// populations.
pub fn run_stgp(cfg: &StgpConfig, train: &TaskData, test: &TaskData) -> Result<RunResult, EngineError> {
    cfg.validate()?;
    check_data(cfg.task, train, test)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let trees: Vec<ExpressionTree> = (0..cfg.population_size)
        .map(|_| random_tree(&cfg.tree_gen, &mut rng))
        .collect();
    let mut population = evaluate(trees, cfg, train)?;

    let mut per_generation = Vec::with_capacity(cfg.generations + 1);
    let mut best: Option<(f64, ExpressionTree)> = None;
    for generation in 0..=cfg.generations {
        let pool = candidates(&population);
        let order = ranking(&pool);
        if generation > 0 {
            let mut next: Vec<Member> = order[..cfg.elitism_count]
                .iter()
                .map(|&i| Member {
                    tree: population[i].tree.clone(),
                    fitness: population[i].fitness,
                })
                .collect();
            let children: Vec<ExpressionTree> = (next.len()..cfg.population_size)
                .map(|_| offspring(&population, &pool, cfg, &mut rng))
                .collect();
            next.extend(evaluate(children, cfg, train)?);
            population = next;
        }
        let pool = candidates(&population);
        let leader = &population[ranking(&pool)[0]];
        if best.as_ref().map_or(true, |(f, _)| leader.fitness < *f) {
            best = Some((leader.fitness, leader.tree.clone()));
        }
        per_generation.push(generation_stats(generation, &pool));
    }

    let (best_fitness, tree) = best.expect("at least one generation");
    let train_outputs = tree.semantics(&train.rows);
    let test_outputs = tree.semantics(&test.rows);
    let train_metrics = MetricsReport::compute(cfg.task, &train_outputs, &train.targets)?;
    let test_metrics = if test.is_empty() {
        MetricsReport {
            task: cfg.task,
            accuracy_percent: None,
            pearson_r: None,
            rmse: None,
            raw_fitness: 0.0,
            n: 0,
        }
    } else {
        MetricsReport::compute(cfg.task, &test_outputs, &test.targets)?
    };
    Ok(RunResult {
        task: cfg.task,
        model: TrainedModel::Stgp { tree },
        best_fitness,
        per_generation,
        train_outputs,
        test_outputs,
        train_metrics,
        test_metrics,
    })
}
