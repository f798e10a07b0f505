//! Geometric semantic operators and the lineage store.
//!
//! Offspring are never built as trees during evolution. Each individual keeps
//! a [`Lineage`] record (how it was made, including the random elements used)
//! plus cached output vectors on the training and test rows. Predictions on
//! new inputs replay the lineage; [`materialize`] expands it into one tree
//! when that tree is small enough.
//!
//! All arithmetic goes through [`tree::apply`] and [`tree::logistic`], so a
//! materialized tree evaluates to exactly the same bits as [`predict`].

use std::collections::BTreeMap;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Features;
use crate::tree::{self, apply, logistic, ExpressionTree, Node, Op};

/// Default node budget for [`materialize`].
pub const DEFAULT_NODE_BUDGET: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GsgpError {
    #[error("semantics length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("unknown individual {0}")]
    UnknownId(IndividualId),
    #[error("individual {child} references parent {parent} which is not an earlier individual")]
    InvalidParent {
        child: IndividualId,
        parent: IndividualId,
    },
    #[error("materialized tree would have {nodes} nodes, above the budget of {budget}")]
    SizeExceeded { nodes: u64, budget: u64 },
    #[error("invalid operator parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndividualId(pub usize);

impl std::fmt::Display for IndividualId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Output vector of one program over a fixed, ordered set of instances.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Semantics(Vec<f64>);

impl Semantics {
    pub fn new(values: Vec<f64>) -> Self {
        Semantics(values)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Semantics {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Semantics {
    fn from(v: Vec<f64>) -> Self {
        Semantics(v)
    }
}

fn same_len(a: &[f64], b: &[f64]) -> Result<(), GsgpError> {
    if a.len() == b.len() {
        Ok(())
    } else {
        Err(GsgpError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        })
    }
}

#[inline]
fn crossover_value(a: f64, b: f64, t_r: f64) -> f64 {
    apply(Op::Add, apply(Op::Mul, t_r, a), apply(Op::Mul, 1.0 - t_r, b))
}

/// The constant shift applied by a scalar mutation.
#[inline]
pub fn scalar_offset(m_s: f64, r1: f64, r2: f64) -> f64 {
    m_s * (r1 - r2)
}

#[inline]
fn tree_mutation_value(parent: f64, m_s: f64, raw1: f64, raw2: f64) -> f64 {
    apply(
        Op::Add,
        parent,
        apply(Op::Mul, m_s, apply(Op::Sub, logistic(raw1), logistic(raw2))),
    )
}

/// `t_r * s1 + (1 - t_r) * s2`, element-wise.
pub fn crossover_semantics(s1: &[f64], s2: &[f64], t_r: f64) -> Result<Semantics, GsgpError> {
    same_len(s1, s2)?;
    if !(0.0..=1.0).contains(&t_r) {
        return Err(GsgpError::InvalidParameter(format!("t_r {t_r} outside [0, 1]")));
    }
    Ok(s1
        .iter()
        .zip(s2)
        .map(|(a, b)| crossover_value(*a, *b, t_r))
        .collect::<Vec<_>>()
        .into())
}

/// `s + m_s * (r1 - r2)`, element-wise.
pub fn mutation_semantics_scalar(s: &[f64], m_s: f64, r1: f64, r2: f64) -> Semantics {
    let off = scalar_offset(m_s, r1, r2);
    s.iter()
        .map(|v| apply(Op::Add, *v, off))
        .collect::<Vec<_>>()
        .into()
}

/// `s + m_s * (sem1 - sem2)` where `sem1`, `sem2` are already squashed into
/// `[0, 1]`.
pub fn mutation_semantics_tree(
    s: &[f64],
    m_s: f64,
    sem1: &[f64],
    sem2: &[f64],
) -> Result<Semantics, GsgpError> {
    same_len(s, sem1)?;
    same_len(s, sem2)?;
    Ok(s.iter()
        .zip(sem1.iter().zip(sem2))
        .map(|(v, (a, b))| apply(Op::Add, *v, apply(Op::Mul, m_s, apply(Op::Sub, *a, *b))))
        .collect::<Vec<_>>()
        .into())
}

/// How an individual was created. Random elements are stored so the
/// individual can be replayed on unseen inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum Lineage {
    Init {
        tree: ExpressionTree,
    },
    Crossover {
        parent1: IndividualId,
        parent2: IndividualId,
        t_r: f64,
    },
    MutationScalar {
        parent: IndividualId,
        m_s: f64,
        r1: f64,
        r2: f64,
    },
    MutationTree {
        parent: IndividualId,
        m_s: f64,
        tree1: ExpressionTree,
        tree2: ExpressionTree,
    },
}

impl Lineage {
    pub fn parents(&self) -> Vec<IndividualId> {
        match self {
            Lineage::Init { .. } => vec![],
            Lineage::Crossover {
                parent1, parent2, ..
            } => vec![*parent1, *parent2],
            Lineage::MutationScalar { parent, .. } | Lineage::MutationTree { parent, .. } => {
                vec![*parent]
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Lineage::Init { .. } => "init",
            Lineage::Crossover { .. } => "crossover",
            Lineage::MutationScalar { .. } => "mutation_scalar",
            Lineage::MutationTree { .. } => "mutation_tree",
        }
    }

    fn check_params(&self) -> Result<(), GsgpError> {
        let bad = |m: String| Err(GsgpError::InvalidParameter(m));
        match self {
            Lineage::Crossover { t_r, .. } if !(0.0..=1.0).contains(t_r) => {
                bad(format!("t_r {t_r} outside [0, 1]"))
            }
            Lineage::MutationScalar { m_s, r1, r2, .. } => {
                if !(*m_s > 0.0 && m_s.is_finite()) {
                    bad(format!("mutation step {m_s} must be positive"))
                } else if !(0.0..=1.0).contains(r1) || !(0.0..=1.0).contains(r2) {
                    bad(format!("r1 {r1} / r2 {r2} outside [0, 1]"))
                } else {
                    Ok(())
                }
            }
            Lineage::MutationTree { m_s, .. } if !(*m_s > 0.0 && m_s.is_finite()) => {
                bad(format!("mutation step {m_s} must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Output of this record on one row, given the parents' outputs in
    /// [`Lineage::parents`] order.
    fn eval_row(&self, row: &Features, parents: &[f64]) -> f64 {
        match self {
            Lineage::Init { tree } => tree.evaluate(row),
            Lineage::Crossover { t_r, .. } => crossover_value(parents[0], parents[1], *t_r),
            Lineage::MutationScalar { m_s, r1, r2, .. } => {
                apply(Op::Add, parents[0], scalar_offset(*m_s, *r1, *r2))
            }
            Lineage::MutationTree {
                m_s, tree1, tree2, ..
            } => tree_mutation_value(parents[0], *m_s, tree1.evaluate(row), tree2.evaluate(row)),
        }
    }

    /// Output vector on `rows`, given the parents' output vectors.
    pub fn semantics(&self, rows: &[Features], parents: &[&[f64]]) -> Semantics {
        match self {
            Lineage::Init { tree } => tree.semantics(rows).into(),
            Lineage::Crossover { t_r, .. } => parents[0]
                .iter()
                .zip(parents[1])
                .map(|(a, b)| crossover_value(*a, *b, *t_r))
                .collect::<Vec<_>>()
                .into(),
            Lineage::MutationScalar { m_s, r1, r2, .. } => {
                mutation_semantics_scalar(parents[0], *m_s, *r1, *r2)
            }
            Lineage::MutationTree {
                m_s, tree1, tree2, ..
            } => rows
                .iter()
                .zip(parents[0])
                .map(|(row, p)| tree_mutation_value(*p, *m_s, tree1.evaluate(row), tree2.evaluate(row)))
                .collect::<Vec<_>>()
                .into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub id: IndividualId,
    pub lineage: Lineage,
    pub train_semantics: Semantics,
    pub test_semantics: Semantics,
    pub train_fitness: f64,
}

/// Read access to lineage records by id.
pub trait LineageSource {
    fn lineage(&self, id: IndividualId) -> Option<&Lineage>;
}

/// Append-only record of every individual created in a run. Ids are dense
/// and equal to insertion order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineageStore {
    individuals: Vec<Individual>,
}

impl LineageStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn next_id(&self) -> IndividualId {
        IndividualId(self.individuals.len())
    }

    pub fn get(&self, id: IndividualId) -> Option<&Individual> {
        self.individuals.get(id.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Individual> {
        self.individuals.iter()
    }

    /// Append a new individual; parents must already be stored.
    pub fn push(
        &mut self,
        lineage: Lineage,
        train_semantics: Semantics,
        test_semantics: Semantics,
        train_fitness: f64,
    ) -> Result<IndividualId, GsgpError> {
        let id = self.next_id();
        lineage.check_params()?;
        if let Some(&parent) = lineage.parents().iter().find(|p| p.0 >= id.0) {
            return Err(GsgpError::InvalidParent { child: id, parent });
        }
        self.individuals.push(Individual {
            id,
            lineage,
            train_semantics,
            test_semantics,
            train_fitness,
        });
        Ok(id)
    }

    /// The reachable lineage subgraph of `id`, suitable for export.
    pub fn ancestry(&self, id: IndividualId) -> Result<LineageGraph, GsgpError> {
        let ids = reachable(self, id)?;
        Ok(LineageGraph {
            records: ids
                .into_iter()
                .map(|i| (i, self.individuals[i.0].lineage.clone()))
                .collect(),
        })
    }
}

impl LineageSource for LineageStore {
    fn lineage(&self, id: IndividualId) -> Option<&Lineage> {
        self.individuals.get(id.0).map(|i| &i.lineage)
    }
}

/// Sparse lineage records keyed by id, as loaded from a model file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineageGraph {
    pub records: BTreeMap<IndividualId, Lineage>,
}

impl LineageGraph {
    /// Check parameter ranges and that every parent is present with a lower id.
    pub fn validate(&self) -> Result<(), GsgpError> {
        for (id, lin) in &self.records {
            lin.check_params()?;
            for p in lin.parents() {
                if p >= *id || !self.records.contains_key(&p) {
                    return Err(GsgpError::InvalidParent {
                        child: *id,
                        parent: p,
                    });
                }
            }
        }
        Ok(())
    }
}

impl LineageSource for LineageGraph {
    fn lineage(&self, id: IndividualId) -> Option<&Lineage> {
        self.records.get(&id)
    }
}

/// Ids reachable from `id`, ascending. Parents always precede children.
fn reachable<S: LineageSource + ?Sized>(
    src: &S,
    id: IndividualId,
) -> Result<Vec<IndividualId>, GsgpError> {
    let mut seen = std::collections::BTreeSet::new();
    let mut stack = vec![id];
    while let Some(cur) = stack.pop() {
        if !seen.insert(cur) {
            continue;
        }
        let lin = src.lineage(cur).ok_or(GsgpError::UnknownId(cur))?;
        for p in lin.parents() {
            if p >= cur {
                return Err(GsgpError::InvalidParent {
                    child: cur,
                    parent: p,
                });
            }
            stack.push(p);
        }
    }
    Ok(seen.into_iter().collect())
}

/// Replay the lineage of `id` on each row. Every ancestor is evaluated once.
pub fn predict_batch<S: LineageSource + ?Sized>(
    src: &S,
    id: IndividualId,
    rows: &[Features],
) -> Result<Vec<f64>, GsgpError> {
    let order = reachable(src, id)?;
    let mut memo: BTreeMap<IndividualId, Vec<f64>> = BTreeMap::new();
    for cur in order {
        let lin = src.lineage(cur).ok_or(GsgpError::UnknownId(cur))?;
        let parents = lin.parents();
        let parent_vals: Vec<&[f64]> = parents.iter().map(|p| memo[p].as_slice()).collect();
        let out = lin.semantics(rows, &parent_vals).into_inner();
        memo.insert(cur, out);
    }
    Ok(memo.remove(&id).unwrap_or_default())
}

/// Replay the lineage of `id` on a single input.
pub fn predict<S: LineageSource + ?Sized>(
    src: &S,
    id: IndividualId,
    features: &Features,
) -> Result<f64, GsgpError> {
    let order = reachable(src, id)?;
    let mut memo: BTreeMap<IndividualId, f64> = BTreeMap::new();
    for cur in order {
        let lin = src.lineage(cur).ok_or(GsgpError::UnknownId(cur))?;
        let parents: Vec<f64> = lin.parents().iter().map(|p| memo[p]).collect();
        memo.insert(cur, lin.eval_row(features, &parents));
    }
    Ok(memo[&id])
}

/// Node count of the materialized tree for `id`, saturating at `u64::MAX`.
pub fn materialized_size<S: LineageSource + ?Sized>(
    src: &S,
    id: IndividualId,
) -> Result<u64, GsgpError> {
    let mut sizes: BTreeMap<IndividualId, u64> = BTreeMap::new();
    for cur in reachable(src, id)? {
        let size = match src.lineage(cur).ok_or(GsgpError::UnknownId(cur))? {
            Lineage::Init { tree } => tree.size() as u64,
            // Add, two Mul, two Const
            Lineage::Crossover {
                parent1, parent2, ..
            } => sizes[parent1].saturating_add(sizes[parent2]).saturating_add(5),
            // Add, Const
            Lineage::MutationScalar { parent, .. } => sizes[parent].saturating_add(2),
            // Add, Mul, Const, Sub, two Logistic
            Lineage::MutationTree {
                parent,
                tree1,
                tree2,
                ..
            } => sizes[parent]
                .saturating_add(6)
                .saturating_add((tree1.size() + tree2.size()) as u64),
        };
        sizes.insert(cur, size);
    }
    Ok(sizes[&id])
}

/// Expand the lineage of `id` into a single expression tree, refusing when
/// it would exceed `budget` nodes.
pub fn materialize<S: LineageSource + ?Sized>(
    src: &S,
    id: IndividualId,
    budget: u64,
) -> Result<ExpressionTree, GsgpError> {
    let nodes = materialized_size(src, id)?;
    if nodes > budget {
        return Err(GsgpError::SizeExceeded { nodes, budget });
    }
    Ok(ExpressionTree::new(build(src, id)))
}

fn build<S: LineageSource + ?Sized>(src: &S, id: IndividualId) -> Node {
    // reachable() has already validated every id on this path
    match src.lineage(id).expect("validated lineage") {
        Lineage::Init { tree } => tree.root().clone(),
        Lineage::Crossover {
            parent1,
            parent2,
            t_r,
        } => Node::binary(
            Op::Add,
            Node::binary(Op::Mul, Node::Const(*t_r), build(src, *parent1)),
            Node::binary(Op::Mul, Node::Const(1.0 - t_r), build(src, *parent2)),
        ),
        Lineage::MutationScalar { parent, m_s, r1, r2 } => Node::binary(
            Op::Add,
            build(src, *parent),
            Node::Const(scalar_offset(*m_s, *r1, *r2)),
        ),
        Lineage::MutationTree {
            parent,
            m_s,
            tree1,
            tree2,
        } => Node::binary(
            Op::Add,
            build(src, *parent),
            Node::binary(
                Op::Mul,
                Node::Const(*m_s),
                Node::binary(
                    Op::Sub,
                    Node::Logistic(Box::new(tree1.root().clone())),
                    Node::Logistic(Box::new(tree2.root().clone())),
                ),
            ),
        ),
    }
}

/// Squash raw random-tree outputs for tree-mode mutation.
pub fn squash(raw: &[f64]) -> Vec<f64> {
    raw.iter().map(|v| tree::logistic(*v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::embedded_dataset;
    use crate::metrics::regression_fitness;
    use crate::tree::{random_tree, GenMethod, TreeGenConfig};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    /// Slack for one rounding step at magnitude `m`.
    fn ulps(m: f64) -> f64 {
        4.0 * f64::EPSILON * m.abs().max(1.0)
    }

    fn tree(s: &str) -> ExpressionTree {
        ExpressionTree::parse_text(s).unwrap()
    }

    #[test]
    fn crossover_examples() {
        assert_eq!(*crossover_semantics(&[1.0, 2.0], &[3.0, 4.0], 0.5).unwrap(), [2.0, 3.0]);
        assert_eq!(*crossover_semantics(&[1.5, -2.0], &[3.0, 4.0], 1.0).unwrap(), [1.5, -2.0]);
        assert_eq!(*crossover_semantics(&[1.5, -2.0], &[3.0, 4.0], 0.0).unwrap(), [3.0, 4.0]);
        assert_eq!(*crossover_semantics(&[0.0], &[4.0], 0.25).unwrap(), [3.0]);
        assert!(matches!(
            crossover_semantics(&[1.0], &[1.0, 2.0], 0.5),
            Err(GsgpError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn scalar_mutation_examples() {
        let out = mutation_semantics_scalar(&[1.0, 1.0], 0.1, 0.6, 0.1);
        assert!(out.iter().all(|v| close(*v, 1.05)));
        assert_eq!(*mutation_semantics_scalar(&[3.0, -2.0], 0.1, 0.4, 0.4), [3.0, -2.0]);
        assert!(close(mutation_semantics_scalar(&[2.0], 0.1, 0.0, 1.0)[0], 1.9));
    }

    #[test]
    fn tree_mutation_examples() {
        let s = [0.5, -3.0];
        assert_eq!(*mutation_semantics_tree(&s, 0.1, &[0.3, 0.9], &[0.3, 0.9]).unwrap(), s);
        assert_eq!(
            *mutation_semantics_tree(&[0.0, 0.0], 1.0, &[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            [1.0, -1.0]
        );
        assert!(mutation_semantics_tree(&s, 0.1, &[0.3], &[0.3, 0.9]).is_err());
    }

    fn rows() -> Vec<Features> {
        let ds = embedded_dataset();
        ds.samples().iter().map(|s| s.features()).collect()
    }

    fn sample_store() -> (LineageStore, [IndividualId; 6]) {
        let rows = rows();
        let mut store = LineageStore::new();
        let add = |store: &mut LineageStore, lin: Lineage| {
            let parents: Vec<Vec<f64>> = lin
                .parents()
                .iter()
                .map(|p| store.get(*p).unwrap().train_semantics.to_vec())
                .collect();
            let refs: Vec<&[f64]> = parents.iter().map(|v| v.as_slice()).collect();
            let sem = lin.semantics(&rows, &refs);
            store.push(lin, sem, Semantics::default(), 0.0).unwrap()
        };
        let a = add(&mut store, Lineage::Init { tree: tree("(x1 + x2)") });
        let b = add(&mut store, Lineage::Init { tree: tree("(x6 / x3)") });
        let c = add(
            &mut store,
            Lineage::Crossover {
                parent1: a,
                parent2: b,
                t_r: 0.3,
            },
        );
        let d = add(
            &mut store,
            Lineage::MutationScalar {
                parent: c,
                m_s: 0.1,
                r1: 0.9,
                r2: 0.2,
            },
        );
        let e = add(
            &mut store,
            Lineage::MutationTree {
                parent: d,
                m_s: 0.1,
                tree1: tree("(x4 - x5)"),
                tree2: tree("x2"),
            },
        );
        let f = add(
            &mut store,
            Lineage::Crossover {
                parent1: e,
                parent2: c,
                t_r: 0.75,
            },
        );
        (store, [a, b, c, d, e, f])
    }

    #[test]
    fn predict_degenerate_and_crossover() {
        let (store, [a, ..]) = sample_store();
        assert_eq!(predict(&store, a, &[2.0, 3.0, 0.0, 0.0, 0.0, 0.0]).unwrap(), 5.0);

        let mut s = LineageStore::new();
        let p = s.push(Lineage::Init { tree: tree("1.0") }, Semantics::default(), Semantics::default(), 0.0).unwrap();
        let q = s.push(Lineage::Init { tree: tree("3.0") }, Semantics::default(), Semantics::default(), 0.0).unwrap();
        let c = s
            .push(
                Lineage::Crossover { parent1: p, parent2: q, t_r: 0.5 },
                Semantics::default(),
                Semantics::default(),
                0.0,
            )
            .unwrap();
        assert_eq!(predict(&s, c, &[0.0; 6]).unwrap(), 2.0);
        assert_eq!(predict(&s, IndividualId(9), &[0.0; 6]), Err(GsgpError::UnknownId(IndividualId(9))));
    }

    #[test]
    fn replay_matches_cached_semantics() {
        let (store, ids) = sample_store();
        let rows = rows();
        for id in ids {
            let cached = &store.get(id).unwrap().train_semantics;
            let batch = predict_batch(&store, id, &rows).unwrap();
            assert_eq!(&batch, &cached.to_vec());
            for (row, v) in rows.iter().zip(cached.iter()) {
                assert_eq!(predict(&store, id, row).unwrap(), *v);
            }
        }
    }

    #[test]
    fn materialize_agrees_with_predict() {
        let (store, [a, b, c, _, _, f]) = sample_store();
        assert_eq!(materialize(&store, a, DEFAULT_NODE_BUDGET).unwrap(), tree("(x1 + x2)"));
        let tc = materialize(&store, c, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(tc.size(), 3 + 3 + 5);
        assert_eq!(tc.size() as u64, materialized_size(&store, c).unwrap());
        let _ = b;
        let tf = materialize(&store, f, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(tf.size() as u64, materialized_size(&store, f).unwrap());
        for row in rows() {
            assert_eq!(tf.evaluate(&row), predict(&store, f, &row).unwrap());
        }
        // the text form survives a round trip through the parser
        assert_eq!(ExpressionTree::parse_text(&tf.to_text()).unwrap(), tf);
    }

    #[test]
    fn materialize_refuses_over_budget() {
        let (store, [.., f]) = sample_store();
        let size = materialized_size(&store, f).unwrap();
        assert_eq!(
            materialize(&store, f, size - 1),
            Err(GsgpError::SizeExceeded { nodes: size, budget: size - 1 })
        );
    }

    #[test]
    fn store_rejects_forward_parents_and_bad_params() {
        let mut s = LineageStore::new();
        let err = s
            .push(
                Lineage::MutationScalar { parent: IndividualId(0), m_s: 0.1, r1: 0.2, r2: 0.3 },
                Semantics::default(),
                Semantics::default(),
                0.0,
            )
            .unwrap_err();
        assert!(matches!(err, GsgpError::InvalidParent { .. }));
        s.push(Lineage::Init { tree: tree("x1") }, Semantics::default(), Semantics::default(), 0.0)
            .unwrap();
        assert!(s
            .push(
                Lineage::Crossover { parent1: IndividualId(0), parent2: IndividualId(0), t_r: 1.5 },
                Semantics::default(),
                Semantics::default(),
                0.0,
            )
            .is_err());
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn ancestry_is_closed_under_parents() {
        let (store, [.., e, _]) = sample_store();
        let g = store.ancestry(e).unwrap();
        g.validate().unwrap();
        assert_eq!(g.records.len(), 5);
        let rows = rows();
        assert_eq!(predict_batch(&g, e, &rows).unwrap(), predict_batch(&store, e, &rows).unwrap());
    }

    #[test]
    fn random_lineages_materialize_exactly() {
        let rows = rows();
        let cfg = TreeGenConfig { min_depth: 1, max_depth: 4, method: GenMethod::Grow, constants: None };
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut store = LineageStore::new();
        for _ in 0..10 {
            let t = random_tree(&cfg, &mut rng);
            let sem = t.semantics(&rows);
            store.push(Lineage::Init { tree: t }, sem.into(), Semantics::default(), 0.0).unwrap();
        }
        for _ in 0..40 {
            let n = store.len();
            let lin = match rng.gen_range(0..3) {
                0 => Lineage::Crossover {
                    parent1: IndividualId(rng.gen_range(0..n)),
                    parent2: IndividualId(rng.gen_range(0..n)),
                    t_r: rng.gen(),
                },
                1 => Lineage::MutationScalar { parent: IndividualId(rng.gen_range(0..n)), m_s: 0.1, r1: rng.gen(), r2: rng.gen() },
                _ => Lineage::MutationTree {
                    parent: IndividualId(rng.gen_range(0..n)),
                    m_s: 0.1,
                    tree1: random_tree(&cfg, &mut rng),
                    tree2: random_tree(&cfg, &mut rng),
                },
            };
            let parents: Vec<Vec<f64>> = lin.parents().iter().map(|p| store.get(*p).unwrap().train_semantics.to_vec()).collect();
            let refs: Vec<&[f64]> = parents.iter().map(|v| v.as_slice()).collect();
            let sem = lin.semantics(&rows, &refs);
            store.push(lin, sem, Semantics::default(), 0.0).unwrap();
        }
        for ind in store.iter() {
            match materialize(&store, ind.id, DEFAULT_NODE_BUDGET) {
                Ok(t) => {
                    for (row, v) in rows.iter().zip(ind.train_semantics.iter()) {
                        assert_eq!(t.evaluate(row), *v);
                    }
                }
                Err(GsgpError::SizeExceeded { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]

        #[test]
        fn crossover_stays_between_parents(
            pairs in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..20),
            t_r in 0.0f64..=1.0,
        ) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let c = crossover_semantics(&a, &b, t_r).unwrap();
            for ((x, y), z) in a.iter().zip(&b).zip(c.iter()) {
                let (lo, hi) = (x.min(*y), x.max(*y));
                prop_assert!(*z >= lo - ulps(lo) && *z <= hi + ulps(hi));
            }
        }

        #[test]
        fn crossover_never_worse_than_worse_parent(
            triples in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0, -50.0f64..50.0), 1..20),
            t_r in 0.0f64..=1.0,
        ) {
            let a: Vec<f64> = triples.iter().map(|t| t.0).collect();
            let b: Vec<f64> = triples.iter().map(|t| t.1).collect();
            let target: Vec<f64> = triples.iter().map(|t| t.2).collect();
            let c = crossover_semantics(&a, &b, t_r).unwrap();
            let ea = regression_fitness(&a, &target).unwrap();
            let eb = regression_fitness(&b, &target).unwrap();
            let ec = regression_fitness(&c, &target).unwrap();
            prop_assert!(ec <= ea.max(eb) + 1e-9);
        }

        #[test]
        fn mutation_is_bounded(
            s in prop::collection::vec(-1e3f64..1e3, 1..20),
            m_s in 0.001f64..2.0,
            r1 in 0.0f64..=1.0,
            r2 in 0.0f64..=1.0,
            raw in prop::collection::vec((-1e4f64..1e4, -1e4f64..1e4), 20),
        ) {
            let out = mutation_semantics_scalar(&s, m_s, r1, r2);
            for (o, p) in out.iter().zip(&s) {
                prop_assert!((o - p).abs() <= m_s + ulps(*p));
            }
            let raw = &raw[..s.len()];
            let sem1 = squash(&raw.iter().map(|r| r.0).collect::<Vec<_>>());
            let sem2 = squash(&raw.iter().map(|r| r.1).collect::<Vec<_>>());
            let out = mutation_semantics_tree(&s, m_s, &sem1, &sem2).unwrap();
            for (o, p) in out.iter().zip(&s) {
                prop_assert!((o - p).abs() <= m_s + ulps(*p));
            }
        }
    }
}
