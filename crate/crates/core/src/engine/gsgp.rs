use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    check_data, generation_stats, ranking, tournament_select, Candidate, EngineError,
    GsgpConfig, MutationMode, RunResult, TaskData, TrainedModel,
};
use crate::gsgp::{IndividualId, Lineage, LineageStore, Semantics};
use crate::metrics::{fitness, MetricsReport};
use crate::tree::random_tree;

struct Evaluated {
    lineage: Lineage,
    train: Semantics,
    test: Semantics,
    fitness: f64,
}

fn evaluate_all(
    plans: Vec<Lineage>,
    store: &LineageStore,
    cfg: &GsgpConfig,
    train: &TaskData,
    test: &TaskData,
) -> Result<Vec<Evaluated>, EngineError> {
    plans
        .into_par_iter()
        .with_min_len(16)
        .map(|lineage| {
            let parents: Vec<_> = lineage
                .parents()
                .into_iter()
                .map(|p| store.get(p).expect("parent selected from population"))
                .collect();
            let train_parents: Vec<&[f64]> =
                parents.iter().map(|p| &p.train_semantics[..]).collect();
            let test_parents: Vec<&[f64]> = parents.iter().map(|p| &p.test_semantics[..]).collect();
            let train_sem = lineage.semantics(&train.rows, &train_parents);
            let test_sem = lineage.semantics(&test.rows, &test_parents);
            let f = fitness(cfg.task, &train_sem, &train.targets)?;
            Ok(Evaluated {
                lineage,
                train: train_sem,
                test: test_sem,
                fitness: f,
            })
        })
        .collect()
}

fn append(store: &mut LineageStore, done: Vec<Evaluated>) -> Result<Vec<IndividualId>, EngineError> {
    done.into_iter()
        .map(|e| Ok(store.push(e.lineage, e.train, e.test, e.fitness)?))
        .collect()
}

/// Create `population_size` random-tree individuals with cached semantics.
pub fn initialize<R: Rng + ?Sized>(
    cfg: &GsgpConfig,
    train: &TaskData,
    test: &TaskData,
    rng: &mut R,
    store: &mut LineageStore,
) -> Result<Vec<IndividualId>, EngineError> {
    let plans: Vec<Lineage> = (0..cfg.population_size)
        .map(|_| Lineage::Init {
            tree: random_tree(&cfg.tree_gen, rng),
        })
        .collect();
    let done = evaluate_all(plans, store, cfg, train, test)?;
    append(store, done)
}

fn candidates(store: &LineageStore, population: &[IndividualId]) -> Vec<Candidate> {
    population
        .iter()
        .map(|&id| Candidate {
            id: id.0,
            fitness: store.get(id).expect("population member").train_fitness,
        })
        .collect()
}

/// Produce the next generation: elites are carried over by id, the rest are
/// new crossover or mutation offspring appended to `store`.
pub fn step_generation<R: Rng + ?Sized>(
    population: &[IndividualId],
    cfg: &GsgpConfig,
    rng: &mut R,
    store: &mut LineageStore,
    train: &TaskData,
    test: &TaskData,
) -> Result<Vec<IndividualId>, EngineError> {
    let pool = candidates(store, population);
    let order = ranking(&pool);
    let mut next: Vec<IndividualId> = order[..cfg.elitism_count]
        .iter()
        .map(|&i| population[i])
        .collect();

    let pick = |rng: &mut R| population[tournament_select(&pool, cfg.tournament_size, rng)];
    let plans: Vec<Lineage> = (next.len()..population.len())
        .map(|_| {
            if rng.gen::<f64>() < cfg.crossover_probability {
                let parent1 = pick(rng);
                let parent2 = pick(rng);
                Lineage::Crossover {
                    parent1,
                    parent2,
                    t_r: rng.gen(),
                }
            } else {
                let parent = pick(rng);
                match cfg.mutation_mode {
                    MutationMode::Scalar => Lineage::MutationScalar {
                        parent,
                        m_s: cfg.mutation_step,
                        r1: rng.gen(),
                        r2: rng.gen(),
                    },
                    MutationMode::Tree => Lineage::MutationTree {
                        parent,
                        m_s: cfg.mutation_step,
                        tree1: random_tree(&cfg.mutation_tree_gen, rng),
                        tree2: random_tree(&cfg.mutation_tree_gen, rng),
                    },
                }
            }
        })
        .collect();

    let done = evaluate_all(plans, store, cfg, train, test)?;
    next.extend(append(store, done)?);
    Ok(next)
}

/// Evolve for `cfg.generations` generations and report the best individual
/// ever seen (by training fitness).
pub fn run_gsgp(cfg: &GsgpConfig, train: &TaskData, test: &TaskData) -> Result<RunResult, EngineError> {
    cfg.validate()?;
    check_data(cfg.task, train, test)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut store = LineageStore::new();
    let mut population = initialize(cfg, train, test, &mut rng, &mut store)?;

    let mut per_generation = Vec::with_capacity(cfg.generations + 1);
    let mut best: Option<Candidate> = None;
    for generation in 0..=cfg.generations {
        if generation > 0 {
            population = step_generation(&population, cfg, &mut rng, &mut store, train, test)?;
        }
        let pool = candidates(&store, &population);
        let leader = pool[ranking(&pool)[0]];
        if best.map_or(true, |b| leader.fitness < b.fitness) {
            best = Some(leader);
        }
        per_generation.push(generation_stats(generation, &pool));
    }

    let best = best.expect("at least one generation");
    let ind = store.get(IndividualId(best.id)).expect("best is stored");
    let train_outputs = ind.train_semantics.to_vec();
    let test_outputs = ind.test_semantics.to_vec();
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
        best_fitness: best.fitness,
        model: TrainedModel::Gsgp {
            store,
            best: IndividualId(best.id),
        },
        per_generation,
        train_outputs,
        test_outputs,
        train_metrics,
        test_metrics,
    })
}
