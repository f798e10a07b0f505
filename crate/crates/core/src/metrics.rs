//! Objectives and evaluation metrics.
//!
//! Selection minimizes either the summed absolute error (regression) or the
//! misclassification rate after thresholding at a cut-off (classification).
//! Accuracy, Pearson correlation and RMSE are reporting-only.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::SlopeStatus;

/// Raw outputs at or above this value classify as stable.
pub const DEFAULT_CUTOFF: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classification,
    Regression,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Classification => "classification",
            Task::Regression => "regression",
        }
    }

    /// CSV column holding the target for this task.
    pub fn label_column(self) -> &'static str {
        match self {
            Task::Classification => "S",
            Task::Regression => "FS",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "classification" => Ok(Task::Classification),
            "regression" => Ok(Task::Regression),
            other => Err(format!("unknown task {other:?}")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("metric needs at least {min} values, got {got}")]
    TooShort { min: usize, got: usize },
    #[error("correlation undefined: {0} vector is constant")]
    ConstantVector(&'static str),
}

fn check(a: &[f64], b: &[f64], min: usize) -> Result<(), MetricError> {
    if a.len() != b.len() {
        return Err(MetricError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < min {
        return Err(MetricError::TooShort {
            min,
            got: a.len(),
        });
    }
    Ok(())
}

/// Sum of absolute errors.
pub fn regression_fitness(semantics: &[f64], targets: &[f64]) -> Result<f64, MetricError> {
    check(semantics, targets, 1)?;
    Ok(semantics
        .iter()
        .zip(targets)
        .map(|(s, c)| (s - c).abs())
        .sum())
}

/// Threshold a raw output; ties go to stable.
pub fn classify(value: f64, cutoff: f64) -> SlopeStatus {
    if value >= cutoff {
        SlopeStatus::Stable
    } else {
        SlopeStatus::Unstable
    }
}

/// One minus the fraction of correctly classified instances. `labels` holds ±1.
pub fn classification_fitness(
    semantics: &[f64],
    labels: &[f64],
    cutoff: f64,
) -> Result<f64, MetricError> {
    check(semantics, labels, 1)?;
    let correct = semantics
        .iter()
        .zip(labels)
        .filter(|(s, l)| classify(**s, cutoff).value() == **l)
        .count();
    Ok(1.0 - correct as f64 / semantics.len() as f64)
}

/// Fitness to minimize for `task`.
pub fn fitness(task: Task, semantics: &[f64], targets: &[f64]) -> Result<f64, MetricError> {
    match task {
        Task::Classification => classification_fitness(semantics, targets, DEFAULT_CUTOFF),
        Task::Regression => regression_fitness(semantics, targets),
    }
}

pub fn accuracy_percent(pred: &[SlopeStatus], actual: &[SlopeStatus]) -> Result<f64, MetricError> {
    if pred.len() != actual.len() {
        return Err(MetricError::LengthMismatch {
            left: pred.len(),
            right: actual.len(),
        });
    }
    if pred.is_empty() {
        return Err(MetricError::TooShort { min: 1, got: 0 });
    }
    let hits = pred.iter().zip(actual).filter(|(p, a)| p == a).count();
    Ok(100.0 * hits as f64 / pred.len() as f64)
}

/// Pearson product-moment correlation, computed on centered sums.
pub fn pearson_r(y: &[f64], y_hat: &[f64]) -> Result<f64, MetricError> {
    check(y, y_hat, 2)?;
    if y.iter().all(|v| *v == y[0]) {
        return Err(MetricError::ConstantVector("true"));
    }
    if y_hat.iter().all(|v| *v == y_hat[0]) {
        return Err(MetricError::ConstantVector("predicted"));
    }
    let n = y.len() as f64;
    let my = y.iter().sum::<f64>() / n;
    let mp = y_hat.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in y.iter().zip(y_hat) {
        let (da, db) = (a - my, b - mp);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    let denom = (sxx * syy).sqrt();
    if denom == 0.0 || !denom.is_finite() {
        return Err(MetricError::ConstantVector("predicted"));
    }
    Ok((sxy / denom).clamp(-1.0, 1.0))
}

pub fn rmse(pred: &[f64], actual: &[f64]) -> Result<f64, MetricError> {
    check(pred, actual, 1)?;
    let mse = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum::<f64>()
        / pred.len() as f64;
    Ok(mse.sqrt())
}

/// Metrics of one model on one set of instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub task: Task,
    pub accuracy_percent: Option<f64>,
    /// `None` when the correlation is undefined (constant predictions).
    pub pearson_r: Option<f64>,
    pub rmse: Option<f64>,
    pub raw_fitness: f64,
    pub n: usize,
}

impl MetricsReport {
    /// Compute the task's report from raw model outputs.
    pub fn compute(task: Task, outputs: &[f64], targets: &[f64]) -> Result<Self, MetricError> {
        let raw_fitness = fitness(task, outputs, targets)?;
        let mut report = MetricsReport {
            task,
            accuracy_percent: None,
            pearson_r: None,
            rmse: None,
            raw_fitness,
            n: outputs.len(),
        };
        match task {
            Task::Classification => {
                let pred: Vec<SlopeStatus> = outputs
                    .iter()
                    .map(|v| classify(*v, DEFAULT_CUTOFF))
                    .collect();
                let actual: Vec<SlopeStatus> = targets
                    .iter()
                    .map(|v| classify(*v, DEFAULT_CUTOFF))
                    .collect();
                report.accuracy_percent = Some(accuracy_percent(&pred, &actual)?);
            }
            Task::Regression => {
                report.pearson_r = match pearson_r(targets, outputs) {
                    Ok(r) => Some(r),
                    Err(MetricError::ConstantVector(_)) | Err(MetricError::TooShort { .. }) => None,
                    Err(e) => return Err(e),
                };
                report.rmse = Some(rmse(outputs, targets)?);
            }
        }
        Ok(report)
    }

    /// `key=value` lines; absent metrics are omitted.
    pub fn to_kv_block(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "task={}", self.task);
        let _ = writeln!(out, "n={}", self.n);
        let _ = writeln!(out, "raw_fitness={}", self.raw_fitness);
        if let Some(a) = self.accuracy_percent {
            let _ = writeln!(out, "accuracy_percent={a}");
        }
        if let Some(r) = self.pearson_r {
            let _ = writeln!(out, "pearson_r={r}");
        }
        if let Some(r) = self.rmse {
            let _ = writeln!(out, "rmse={r}");
        }
        out
    }

    pub const CSV_HEADER: &'static str = "split,task,n,raw_fitness,accuracy_percent,pearson_r,rmse";

    /// One CSV row matching [`Self::CSV_HEADER`]; absent metrics are empty fields.
    pub fn to_csv_row(&self, split: &str) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{split},{},{},{},{},{},{}",
            self.task,
            self.n,
            self.raw_fitness,
            opt(self.accuracy_percent),
            opt(self.pearson_r),
            opt(self.rmse)
        )
    }
}
