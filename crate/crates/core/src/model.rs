//! JSON model file holding the winning individual's reachable lineage.
//!
//! Trees are stored in the canonical infix text form; all reals round-trip
//! bit-exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Features, MinMax};
use crate::engine::{GsgpConfig, RunResult, TrainedModel};
use crate::gsgp::{self, GsgpError, IndividualId, Lineage, LineageGraph};
use crate::metrics::Task;
use crate::tree::{ExpressionTree, ParseError};

pub const MODEL_FORMAT: &str = "slope-gsgp-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed model: {0}")]
    Format(String),
    #[error("malformed tree in record {id}: {source}")]
    Tree { id: usize, source: ParseError },
    #[error(transparent)]
    Gsgp(#[from] GsgpError),
}

/// How the training rows were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitInfo {
    pub train_n: usize,
    pub shuffle_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GsgpModel {
    pub task: Task,
    pub seed: u64,
    pub config: GsgpConfig,
    pub split: SplitInfo,
    /// Feature scaling applied before evaluation, if training used it.
    pub normalization: Option<MinMax>,
    pub best: IndividualId,
    pub train_fitness: f64,
    pub lineage: LineageGraph,
}

#[derive(Serialize, Deserialize)]
struct Record {
    id: IndividualId,
    kind: String,
    parents: Vec<IndividualId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tree: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tree1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tree2: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    task: Task,
    seed: u64,
    config: GsgpConfig,
    split: SplitInfo,
    normalization: Option<MinMax>,
    best: IndividualId,
    train_fitness: f64,
    individuals: Vec<Record>,
}

impl Record {
    fn from_lineage(id: IndividualId, lin: &Lineage) -> Record {
        let mut r = Record {
            id,
            kind: lin.kind().to_string(),
            parents: lin.parents(),
            t_r: None,
            m_s: None,
            r1: None,
            r2: None,
            tree: None,
            tree1: None,
            tree2: None,
        };
        match lin {
            Lineage::Init { tree } => r.tree = Some(tree.to_text()),
            Lineage::Crossover { t_r, .. } => r.t_r = Some(*t_r),
            Lineage::MutationScalar { m_s, r1, r2, .. } => {
                r.m_s = Some(*m_s);
                r.r1 = Some(*r1);
                r.r2 = Some(*r2);
            }
            Lineage::MutationTree {
                m_s, tree1, tree2, ..
            } => {
                r.m_s = Some(*m_s);
                r.tree1 = Some(tree1.to_text());
                r.tree2 = Some(tree2.to_text());
            }
        }
        r
    }

    fn into_lineage(self) -> Result<(IndividualId, Lineage), ModelError> {
        let id = self.id;
        let missing = |field: &str| ModelError::Format(format!("record {} ({}) lacks {field}", id.0, self.kind));
        let tree = |text: &Option<String>, field: &str| -> Result<ExpressionTree, ModelError> {
            let text = text.as_ref().ok_or_else(|| missing(field))?;
            ExpressionTree::parse_text(text).map_err(|source| ModelError::Tree { id: id.0, source })
        };
        let arity = |n: usize| -> Result<(), ModelError> {
            if self.parents.len() == n {
                Ok(())
            } else {
                Err(ModelError::Format(format!(
                    "record {} ({}) needs {n} parents, has {}",
                    id.0,
                    self.kind,
                    self.parents.len()
                )))
            }
        };
        let lineage = match self.kind.as_str() {
            "init" => {
                arity(0)?;
                Lineage::Init {
                    tree: tree(&self.tree, "tree")?,
                }
            }
            "crossover" => {
                arity(2)?;
                Lineage::Crossover {
                    parent1: self.parents[0],
                    parent2: self.parents[1],
                    t_r: self.t_r.ok_or_else(|| missing("t_r"))?,
                }
            }
            "mutation_scalar" => {
                arity(1)?;
                Lineage::MutationScalar {
                    parent: self.parents[0],
                    m_s: self.m_s.ok_or_else(|| missing("m_s"))?,
                    r1: self.r1.ok_or_else(|| missing("r1"))?,
                    r2: self.r2.ok_or_else(|| missing("r2"))?,
                }
            }
            "mutation_tree" => {
                arity(1)?;
                Lineage::MutationTree {
                    parent: self.parents[0],
                    m_s: self.m_s.ok_or_else(|| missing("m_s"))?,
                    tree1: tree(&self.tree1, "tree1")?,
                    tree2: tree(&self.tree2, "tree2")?,
                }
            }
            other => return Err(ModelError::Format(format!("unknown record kind {other:?}"))),
        };
        Ok((id, lineage))
    }
}

impl GsgpModel {
    /// Package the best individual of a GSGP run.
    pub fn from_run(
        run: &RunResult,
        config: &GsgpConfig,
        split: SplitInfo,
        normalization: Option<MinMax>,
    ) -> Result<GsgpModel, ModelError> {
        let TrainedModel::Gsgp { store, best } = &run.model else {
            return Err(ModelError::Format("only GSGP runs can be exported".into()));
        };
        Ok(GsgpModel {
            task: config.task,
            seed: config.seed,
            config: config.clone(),
            split,
            normalization,
            best: *best,
            train_fitness: run.best_fitness,
            lineage: store.ancestry(*best)?,
        })
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            task: self.task,
            seed: self.seed,
            config: self.config.clone(),
            split: self.split,
            normalization: self.normalization,
            best: self.best,
            train_fitness: self.train_fitness,
            individuals: self
                .lineage
                .records
                .iter()
                .map(|(id, lin)| Record::from_lineage(*id, lin))
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("model is serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<GsgpModel, ModelError> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format != MODEL_FORMAT {
            return Err(ModelError::Format(format!("unexpected format {:?}", file.format)));
        }
        if file.version != MODEL_VERSION {
            return Err(ModelError::Format(format!("unsupported version {}", file.version)));
        }
        if file.task != file.config.task {
            return Err(ModelError::Format("task does not match config".into()));
        }
        let mut lineage = LineageGraph::default();
        for rec in file.individuals {
            let (id, lin) = rec.into_lineage()?;
            if lineage.records.insert(id, lin).is_some() {
                return Err(ModelError::Format(format!("duplicate record {}", id.0)));
            }
        }
        lineage.validate()?;
        if !lineage.records.contains_key(&file.best) {
            return Err(GsgpError::UnknownId(file.best).into());
        }
        Ok(GsgpModel {
            task: file.task,
            seed: file.seed,
            config: file.config,
            split: file.split,
            normalization: file.normalization,
            best: file.best,
            train_fitness: file.train_fitness,
            lineage,
        })
    }

    fn prepare(&self, f: &Features) -> Features {
        match &self.normalization {
            Some(mm) => mm.apply(*f),
            None => *f,
        }
    }

    /// Raw model output for one input (before any classification cut-off).
    pub fn predict(&self, features: &Features) -> Result<f64, GsgpError> {
        gsgp::predict(&self.lineage, self.best, &self.prepare(features))
    }

    pub fn predict_batch(&self, rows: &[Features]) -> Result<Vec<f64>, GsgpError> {
        let rows: Vec<Features> = rows.iter().map(|r| self.prepare(r)).collect();
        gsgp::predict_batch(&self.lineage, self.best, &rows)
    }
}
