//! Geometric semantic genetic programming for slope stability analysis.
//!
//! The library classifies slope status (stable / unstable) and regresses the
//! factor of safety from six geotechnical inputs: unit weight, cohesion,
//! internal friction angle, slope angle, slope height and pore pressure ratio.
//!
//! * [`data`]: slope samples, the embedded 52-row corpus, CSV and splits
//! * [`tree`]: expression trees, random generation, infix text
//! * [`gsgp`]: semantic crossover and mutation, lineage store, replay
//! * [`metrics`]: fitness functions, accuracy, Pearson R, RMSE
//! * [`engine`]: GSGP and standard tree-GP evolution loops
//! * [`stats`]: box-plot summaries, Wilcoxon rank-sum, run comparison
//! * [`model`]: JSON model files

pub mod data;
pub mod engine;
pub mod gsgp;
pub mod metrics;
pub mod model;
pub mod stats;
pub mod tree;

pub use data::{embedded_dataset, head_split, parse_csv, DataSplit, SlopeDataset, SlopeSample, SlopeStatus};
pub use engine::{run_gsgp, run_stgp, GsgpConfig, MutationMode, RunResult, StgpConfig, TaskData};
pub use metrics::{MetricsReport, Task};
pub use model::GsgpModel;
