//! Slope samples, the embedded 52-row reference corpus, CSV ingestion and
//! train/test splitting.
//!
//! Units follow the published table: unit weight in kN/m³ (printed as kN/m
//! in the source table header), cohesion in kPa, angles in degrees, height in
//! metres, and a dimensionless pore pressure ratio.

mod table;

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::Task;

/// Number of input variables per sample.
pub const FEATURE_COUNT: usize = 6;

/// Column names of the input variables, in feature order.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = ["gamma", "c", "phi", "beta", "H", "ru"];

/// One input row: gamma, c, phi, beta, H, ru.
pub type Features = [f64; FEATURE_COUNT];

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("missing required column {0:?}")]
    MissingColumn(&'static str),
    #[error("column {0:?} appears more than once")]
    DuplicateColumn(String),
    #[error("row {row}: expected {expected} fields, found {found}")]
    FieldCount {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: slope status must be 1 or -1, got {value}")]
    InvalidStatus { row: usize, value: String },
    #[error("row {row}: {reason}")]
    Invalid { row: usize, reason: String },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("training size {n_train} out of range for {len} samples (need 0 < n < {len})")]
    SplitOutOfRange { n_train: usize, len: usize },
    #[error("index {index} out of range for {len} samples")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dataset has no {0} labels")]
    MissingLabels(&'static str),
    #[error("samples disagree on which label columns are present")]
    InconsistentLabels,
}

/// Binary slope status: stable (+1) or unstable (-1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlopeStatus {
    Stable,
    Unstable,
}

impl SlopeStatus {
    pub fn from_value(value: f64) -> Option<Self> {
        if value == 1.0 {
            Some(SlopeStatus::Stable)
        } else if value == -1.0 {
            Some(SlopeStatus::Unstable)
        } else {
            None
        }
    }

    pub fn value(self) -> f64 {
        match self {
            SlopeStatus::Stable => 1.0,
            SlopeStatus::Unstable => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            SlopeStatus::Stable => 1,
            SlopeStatus::Unstable => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeSample {
    /// Unit weight, kN/m³.
    pub gamma: f64,
    /// Cohesion, kPa.
    pub cohesion: f64,
    /// Internal friction angle, degrees.
    pub phi: f64,
    /// Slope angle, degrees.
    pub beta: f64,
    /// Slope height, m.
    pub height: f64,
    /// Pore water pressure coefficient.
    pub ru: f64,
    pub status: Option<SlopeStatus>,
    /// Factor of safety.
    pub fs: Option<f64>,
}

impl SlopeSample {
    pub fn from_features(f: Features, status: Option<SlopeStatus>, fs: Option<f64>) -> Self {
        SlopeSample {
            gamma: f[0],
            cohesion: f[1],
            phi: f[2],
            beta: f[3],
            height: f[4],
            ru: f[5],
            status,
            fs,
        }
    }

    pub fn features(&self) -> Features {
        [
            self.gamma,
            self.cohesion,
            self.phi,
            self.beta,
            self.height,
            self.ru,
        ]
    }

    fn check(&self) -> Result<(), String> {
        if let Some((name, v)) = FEATURE_NAMES
            .iter()
            .zip(self.features())
            .find(|(_, v)| !v.is_finite())
        {
            return Err(format!("{name} is not finite ({v})"));
        }
        if self.gamma <= 0.0 {
            return Err(format!("gamma must be positive, got {}", self.gamma));
        }
        if self.height <= 0.0 {
            return Err(format!("H must be positive, got {}", self.height));
        }
        if self.ru < 0.0 {
            return Err(format!("ru must be non-negative, got {}", self.ru));
        }
        if self.cohesion < 0.0 {
            return Err(format!("c must be non-negative, got {}", self.cohesion));
        }
        if let Some(fs) = self.fs {
            if !(fs.is_finite() && fs > 0.0) {
                return Err(format!("FS must be positive, got {fs}"));
            }
        }
        Ok(())
    }
}

/// Model outputs printed alongside the published corpus. Kept apart from the
/// samples so they can never be mistaken for ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceColumns {
    pub status: Vec<SlopeStatus>,
    pub fs: Vec<f64>,
}

struct TableRow {
    features: Features,
    status: i8,
    fs: f64,
    computed_status: i8,
    computed_fs: f64,
}

fn status_from_i8(v: i8) -> SlopeStatus {
    if v > 0 {
        SlopeStatus::Stable
    } else {
        SlopeStatus::Unstable
    }
}

/// Ordered collection of slope samples. Row order is significant because the
/// default split is positional.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeDataset {
    samples: Vec<SlopeSample>,
    reference: Option<ReferenceColumns>,
}

impl SlopeDataset {
    pub fn new(samples: Vec<SlopeSample>) -> Result<Self, DataError> {
        for (i, s) in samples.iter().enumerate() {
            s.check()
                .map_err(|reason| DataError::Invalid { row: i + 1, reason })?;
        }
        if let Some(first) = samples.first() {
            let shape = (first.status.is_some(), first.fs.is_some());
            if samples
                .iter()
                .any(|s| (s.status.is_some(), s.fs.is_some()) != shape)
            {
                return Err(DataError::InconsistentLabels);
            }
        }
        Ok(SlopeDataset {
            samples,
            reference: None,
        })
    }

    pub fn samples(&self) -> &[SlopeSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn feature_names(&self) -> &'static [&'static str; FEATURE_COUNT] {
        &FEATURE_NAMES
    }

    pub fn has_status(&self) -> bool {
        self.samples.first().is_some_and(|s| s.status.is_some())
    }

    pub fn has_fs(&self) -> bool {
        self.samples.first().is_some_and(|s| s.fs.is_some())
    }

    pub fn has_labels_for(&self, task: Task) -> bool {
        match task {
            Task::Classification => self.has_status(),
            Task::Regression => self.has_fs(),
        }
    }

    /// The published computational columns, present only on the embedded corpus.
    pub fn reference(&self) -> Option<&ReferenceColumns> {
        self.reference.as_ref()
    }

    fn check_indices(&self, indices: &[usize]) -> Result<(), DataError> {
        match indices.iter().find(|&&i| i >= self.len()) {
            Some(&index) => Err(DataError::IndexOutOfRange {
                index,
                len: self.len(),
            }),
            None => Ok(()),
        }
    }

    pub fn features_at(&self, indices: &[usize]) -> Result<Vec<Features>, DataError> {
        self.check_indices(indices)?;
        Ok(indices.iter().map(|&i| self.samples[i].features()).collect())
    }

    /// Target values for `task` at `indices`: ±1 for classification, FS for
    /// regression.
    pub fn targets(&self, task: Task, indices: &[usize]) -> Result<Vec<f64>, DataError> {
        self.check_indices(indices)?;
        if !self.has_labels_for(task) && !indices.is_empty() {
            return Err(DataError::MissingLabels(task.label_column()));
        }
        Ok(indices
            .iter()
            .map(|&i| {
                let s = &self.samples[i];
                match task {
                    Task::Classification => s.status.map_or(f64::NAN, SlopeStatus::value),
                    Task::Regression => s.fs.unwrap_or(f64::NAN),
                }
            })
            .collect())
    }

    /// Apply a feature transform to every sample, keeping labels and reference columns.
    pub fn map_features(&self, f: impl Fn(Features) -> Features) -> SlopeDataset {
        SlopeDataset {
            samples: self
                .samples
                .iter()
                .map(|s| SlopeSample::from_features(f(s.features()), s.status, s.fs))
                .collect(),
            reference: self.reference.clone(),
        }
    }

    /// Serialize to the ingestion CSV format. Label columns are written only
    /// when present.
    pub fn to_csv(&self) -> String {
        let mut out = FEATURE_NAMES.join(",");
        let (has_s, has_fs) = (self.has_status(), self.has_fs());
        if has_s {
            out.push_str(",S");
        }
        if has_fs {
            out.push_str(",FS");
        }
        out.push('\n');
        for s in &self.samples {
            let fields: Vec<String> = s.features().iter().map(|v| v.to_string()).collect();
            out.push_str(&fields.join(","));
            if let Some(st) = s.status.filter(|_| has_s) {
                let _ = write!(out, ",{}", st.as_i8());
            }
            if let Some(fs) = s.fs.filter(|_| has_fs) {
                let _ = write!(out, ",{fs}");
            }
            out.push('\n');
        }
        out
    }

    /// CSV of the reference columns (`no,S_computed,FS_computed`), if any.
    pub fn reference_to_csv(&self) -> Option<String> {
        let r = self.reference.as_ref()?;
        let mut out = String::from("no,S_computed,FS_computed\n");
        for (i, (s, fs)) in r.status.iter().zip(&r.fs).enumerate() {
            let _ = writeln!(out, "{},{},{}", i + 1, s.as_i8(), fs);
        }
        Some(out)
    }
}

/// The 52-sample corpus with actual S/FS labels and the published
/// computational S/FS columns as reference vectors.
pub fn embedded_dataset() -> SlopeDataset {
    let samples = table::TABLE
        .iter()
        .map(|r| {
            SlopeSample::from_features(r.features, Some(status_from_i8(r.status)), Some(r.fs))
        })
        .collect();
    let reference = ReferenceColumns {
        status: table::TABLE
            .iter()
            .map(|r| status_from_i8(r.computed_status))
            .collect(),
        fs: table::TABLE.iter().map(|r| r.computed_fs).collect(),
    };
    SlopeDataset {
        samples,
        reference: Some(reference),
    }
}

#[derive(Clone, Copy)]
enum Column {
    Feature(usize),
    Status,
    Fs,
}

/// Parse a dataset from CSV with header `gamma,c,phi,beta,H,ru[,S][,FS]`.
/// Columns may appear in any order; the six feature columns are required.
pub fn parse_csv(text: &str) -> Result<SlopeDataset, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| DataError::Csv(e.to_string()))?
        .clone();
    let mut columns = Vec::with_capacity(headers.len());
    let mut seen: Vec<&str> = Vec::new();
    for name in headers.iter() {
        let col = match name {
            "S" => Column::Status,
            "FS" => Column::Fs,
            other => match FEATURE_NAMES.iter().position(|&f| f == other) {
                Some(i) => Column::Feature(i),
                None => return Err(DataError::UnknownColumn(other.to_string())),
            },
        };
        if seen.contains(&name) {
            return Err(DataError::DuplicateColumn(name.to_string()));
        }
        seen.push(name);
        columns.push(col);
    }
    if let Some(missing) = FEATURE_NAMES.iter().find(|f| !seen.contains(f)) {
        return Err(DataError::MissingColumn(missing));
    }

    let mut samples = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths {
                expected_len, len, ..
            } => DataError::FieldCount {
                row,
                expected: *expected_len as usize,
                found: *len as usize,
            },
            _ => DataError::Csv(e.to_string()),
        })?;
        let mut features = [0.0; FEATURE_COUNT];
        let mut status = None;
        let mut fs = None;
        for ((field, col), name) in record.iter().zip(&columns).zip(headers.iter()) {
            let value: f64 = field.parse().map_err(|_| DataError::Parse {
                row,
                column: name.to_string(),
                value: field.to_string(),
            })?;
            match *col {
                Column::Feature(k) => features[k] = value,
                Column::Status => {
                    status = Some(SlopeStatus::from_value(value).ok_or_else(|| {
                        DataError::InvalidStatus {
                            row,
                            value: field.to_string(),
                        }
                    })?)
                }
                Column::Fs => fs = Some(value),
            }
        }
        samples.push(SlopeSample::from_features(features, status, fs));
    }
    SlopeDataset::new(samples)
}

/// Disjoint train/test index lists over one dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataSplit {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// First `n_train` rows train, the rest test.
pub fn head_split(ds: &SlopeDataset, n_train: usize) -> Result<DataSplit, DataError> {
    let len = ds.len();
    if n_train == 0 || n_train >= len {
        return Err(DataError::SplitOutOfRange { n_train, len });
    }
    Ok(DataSplit {
        train: (0..n_train).collect(),
        test: (n_train..len).collect(),
    })
}

/// Random split for robustness experiments; both index lists are sorted.
pub fn shuffled_split(
    ds: &SlopeDataset,
    n_train: usize,
    seed: u64,
) -> Result<DataSplit, DataError> {
    let len = ds.len();
    if n_train == 0 || n_train >= len {
        return Err(DataError::SplitOutOfRange { n_train, len });
    }
    let mut idx: Vec<usize> = (0..len).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut train = idx[..n_train].to_vec();
    let mut test = idx[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(DataSplit { train, test })
}

/// Per-feature min-max scaling to [0, 1]. Constant features map to 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinMax {
    pub min: Features,
    pub max: Features,
}

impl MinMax {
    /// Fit bounds on the rows at `indices` (normally the training rows).
    pub fn fit(ds: &SlopeDataset, indices: &[usize]) -> Result<MinMax, DataError> {
        let rows = ds.features_at(indices)?;
        let mut min = [f64::INFINITY; FEATURE_COUNT];
        let mut max = [f64::NEG_INFINITY; FEATURE_COUNT];
        for r in &rows {
            for k in 0..FEATURE_COUNT {
                min[k] = min[k].min(r[k]);
                max[k] = max[k].max(r[k]);
            }
        }
        if rows.is_empty() {
            min = [0.0; FEATURE_COUNT];
            max = [1.0; FEATURE_COUNT];
        }
        Ok(MinMax { min, max })
    }

    pub fn apply(&self, f: Features) -> Features {
        let mut out = [0.0; FEATURE_COUNT];
        for k in 0..FEATURE_COUNT {
            let range = self.max[k] - self.min[k];
            out[k] = if range > 0.0 {
                (f[k] - self.min[k]) / range
            } else {
                0.0
            };
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "gamma,c,phi,beta,H,ru,S,FS\n";

    #[test]
    fn embedded_rows_match_table() {
        let ds = embedded_dataset();
        assert_eq!(ds.len(), 52);
        let r1 = &ds.samples()[0];
        assert_eq!(r1.features(), [18.80, 14.40, 25.02, 19.98, 30.6, 0.0]);
        assert_eq!(r1.status, Some(SlopeStatus::Stable));
        assert_eq!(r1.fs, Some(1.876));
        let reference = ds.reference().unwrap();
        assert_eq!(reference.status[0], SlopeStatus::Unstable);
        assert_eq!(reference.fs[0], 1.473);

        let r3 = &ds.samples()[2];
        assert_eq!(r3.features(), [19.97, 19.96, 36.0, 45.0, 50.0, 0.5]);
        assert_eq!(r3.status, Some(SlopeStatus::Unstable));
        assert_eq!(r3.fs, Some(0.829));

        // row 32 repeats row 1's computed FS as printed
        assert_eq!(reference.fs[31], 1.473);
    }

    #[test]
    fn parse_single_row() {
        let ds = parse_csv(&format!("{HEADER}18.80,14.40,25.02,19.98,30.6,0,1,1.876\n")).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.samples()[0], embedded_dataset().samples()[0]);
    }

    #[test]
    fn header_only_is_empty() {
        let ds = parse_csv(HEADER).unwrap();
        assert!(ds.is_empty());
    }

    #[test]
    fn bad_number_names_row_and_column() {
        let err = parse_csv(&format!("{HEADER}abc,14.40,25.02,19.98,30.6,0,1,1.876\n")).unwrap_err();
        assert_eq!(
            err,
            DataError::Parse {
                row: 1,
                column: "gamma".into(),
                value: "abc".into()
            }
        );
    }

    #[test]
    fn unknown_and_missing_columns() {
        assert_eq!(
            parse_csv("gamma,c,phi,beta,H,ru,Z\n").unwrap_err(),
            DataError::UnknownColumn("Z".into())
        );
        assert_eq!(
            parse_csv("gamma,c,phi,beta,H\n").unwrap_err(),
            DataError::MissingColumn("ru")
        );
        assert!(matches!(
            parse_csv("gamma,c,phi,beta,H,ru,ru\n").unwrap_err(),
            DataError::DuplicateColumn(_)
        ));
    }

    #[test]
    fn status_must_be_plus_minus_one() {
        let err = parse_csv(&format!("{HEADER}18.8,14.4,25,20,30,0,0,1.8\n")).unwrap_err();
        assert!(matches!(err, DataError::InvalidStatus { row: 1, .. }));
    }

    #[test]
    fn crlf_and_optional_labels() {
        let ds = parse_csv("gamma,c,phi,beta,H,ru,FS\r\n18.8,14.4,25,20,30,0,1.8\r\n").unwrap();
        assert!(!ds.has_status());
        assert!(ds.has_fs());
        assert_eq!(
            ds.targets(Task::Classification, &[0]).unwrap_err(),
            DataError::MissingLabels("S")
        );
    }

    #[test]
    fn invariants_rejected() {
        let err = parse_csv("gamma,c,phi,beta,H,ru\n-1,14.4,25,20,30,0\n").unwrap_err();
        assert!(matches!(err, DataError::Invalid { row: 1, .. }));
        let err = parse_csv("gamma,c,phi,beta,H,ru\n18,14.4,25,20,30,-0.1\n").unwrap_err();
        assert!(matches!(err, DataError::Invalid { row: 1, .. }));
    }

    #[test]
    fn field_count_error() {
        let err = parse_csv("gamma,c,phi,beta,H,ru\n18,14.4,25\n").unwrap_err();
        assert!(matches!(err, DataError::FieldCount { row: 1, .. }));
    }

    #[test]
    fn head_split_default_and_bounds() {
        let ds = embedded_dataset();
        let split = head_split(&ds, 40).unwrap();
        assert_eq!(split.train, (0..40).collect::<Vec<_>>());
        assert_eq!(split.test, (40..52).collect::<Vec<_>>());
        assert!(head_split(&ds, 52).is_err());
        assert!(head_split(&ds, 0).is_err());

        let two = parse_csv("gamma,c,phi,beta,H,ru\n18,1,2,3,4,0\n19,1,2,3,4,0\n").unwrap();
        let s = head_split(&two, 1).unwrap();
        assert_eq!((s.train, s.test), (vec![0], vec![1]));
    }

    #[test]
    fn shuffled_split_is_a_partition() {
        let ds = embedded_dataset();
        let s = shuffled_split(&ds, 40, 3).unwrap();
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..52).collect::<Vec<_>>());
        assert_ne!(s.train, (0..40).collect::<Vec<_>>());
        assert_eq!(s, shuffled_split(&ds, 40, 3).unwrap());
    }

    #[test]
    fn min_max_scales_training_rows_into_unit_box() {
        let ds = embedded_dataset();
        let mm = MinMax::fit(&ds, &(0..40).collect::<Vec<_>>()).unwrap();
        for s in &ds.samples()[..40] {
            assert!(mm.apply(s.features()).iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn reference_csv_has_all_rows() {
        let text = embedded_dataset().reference_to_csv().unwrap();
        assert_eq!(text.lines().count(), 53);
        assert_eq!(text.lines().nth(1), Some("1,-1,1.473"));
    }
}
