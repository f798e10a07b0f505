use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use slope_gsgp::data::{
    embedded_dataset, head_split, parse_csv, shuffled_split, DataSplit, Features, MinMax, SlopeDataset, SlopeStatus,
    FEATURE_COUNT, FEATURE_NAMES,
};
use slope_gsgp::engine::{run_gsgp_on, threads_from_env, with_threads, EngineError, GsgpConfig, MutationMode, StgpConfig, TaskData};
use slope_gsgp::metrics::{classify, MetricsReport, Task, DEFAULT_CUTOFF};
use slope_gsgp::model::{GsgpModel, SplitInfo};
use slope_gsgp::stats::{run_comparison, ComparisonConfig};
use slope_gsgp::tree::ConstantRange;

const USAGE: u8 = 1;
const DATA: u8 = 2;
const RUNTIME: u8 = 3;

#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: USAGE, error: e.into() }
}

fn data(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: DATA, error: e.into() }
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: RUNTIME, error: e.into() }
}

fn engine(e: EngineError) -> Failure {
    match e {
        EngineError::Config(_) => usage(e),
        EngineError::Data(_) | EngineError::Metric(_) => data(e),
        EngineError::Gsgp(_) => runtime(e),
    }
}

type CmdResult = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "slope-gsgp", version, about = "Slope stability modelling with geometric semantic GP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export or print the embedded 52-sample corpus
    Dataset {
        #[command(subcommand)]
        action: DatasetAction,
    },
    /// Train a GSGP model
    Train(TrainArgs),
    /// Predict with a saved model
    Predict(PredictArgs),
    /// Report metrics of a saved model or of the published reference columns
    Evaluate(EvaluateArgs),
    /// Repeated-run test RMSE comparison of GSGP and standard GP
    Compare(CompareArgs),
}

#[derive(Subcommand)]
enum DatasetAction {
    /// Write the corpus as CSV, plus the reference columns in a second file
    Export {
        #[arg(long)]
        out: PathBuf,
        /// Defaults to `<out stem>.reference.csv`
        #[arg(long)]
        reference_out: Option<PathBuf>,
    },
    /// Pretty-print the corpus
    Show,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    task: Task,
    /// CSV path or `builtin`
    #[arg(long, default_value = "builtin")]
    data: String,
    #[arg(long, default_value_t = 40)]
    train_n: usize,
    /// Shuffle rows before splitting instead of taking the first `train-n`
    #[arg(long)]
    shuffle_seed: Option<u64>,
    #[arg(long, default_value_t = 500)]
    pop: usize,
    #[arg(long, default_value_t = 50)]
    gens: usize,
    #[arg(long, default_value_t = 0.1)]
    ms: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "tree")]
    mutation_mode: MutationMode,
    /// Defaults to 4, capped at the population size
    #[arg(long)]
    tournament_size: Option<usize>,
    /// Defaults to 1, capped below the population size
    #[arg(long)]
    elitism: Option<usize>,
    /// Min-max scale features using the training rows
    #[arg(long)]
    normalize: bool,
    /// Enable constant leaves drawn from `low,high`
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    erc: Option<ConstantRange>,
    #[arg(long, default_value = "model.json")]
    out: PathBuf,
    /// Per-generation best/median fitness CSV
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// CSV with the six feature columns
    #[arg(long, conflicts_with = "features", required_unless_present = "features")]
    input: Option<PathBuf>,
    /// Six comma-separated values: gamma,c,phi,beta,H,ru
    #[arg(long, allow_hyphen_values = true)]
    features: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SplitChoice {
    Train,
    Test,
    All,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long, required_unless_present = "reference_columns")]
    model: Option<PathBuf>,
    /// Score the published computational S/FS columns of the embedded corpus
    #[arg(long, conflicts_with = "model")]
    reference_columns: bool,
    /// Task for `--reference-columns`; both when omitted
    #[arg(long, requires = "reference_columns")]
    task: Option<Task>,
    #[arg(long, default_value = "builtin")]
    data: String,
    #[arg(long, value_enum, default_value = "test")]
    split: SplitChoice,
    /// Training rows for `--reference-columns`
    #[arg(long, default_value_t = 40)]
    train_n: usize,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, default_value_t = 50)]
    runs: usize,
    /// Run r uses seed `seed + r`
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "gsgp,stgp")]
    algorithms: Vec<String>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, default_value = "builtin")]
    data: String,
    #[arg(long, default_value_t = 40)]
    train_n: usize,
    #[arg(long, default_value_t = 500)]
    pop: usize,
    #[arg(long, default_value_t = 50)]
    gens: usize,
    #[arg(long, default_value_t = 0.1)]
    ms: f64,
    #[arg(long, default_value = "tree")]
    mutation_mode: MutationMode,
}

fn parse_range(s: &str) -> Result<ConstantRange, String> {
    let (lo, hi) = s.split_once(',').ok_or("expected low,high")?;
    let low: f64 = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
    let high: f64 = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
    if !(low.is_finite() && high.is_finite() && low < high) {
        return Err(format!("need finite low < high, got {low},{high}"));
    }
    Ok(ConstantRange { low, high })
}

fn parse_features(s: &str) -> Result<Features, Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != FEATURE_COUNT {
        return Err(usage(anyhow!("expected {FEATURE_COUNT} comma-separated features, got {}", parts.len())));
    }
    let mut f = [0.0; FEATURE_COUNT];
    for (k, p) in parts.iter().enumerate() {
        f[k] = p
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| usage(anyhow!("feature {} is not a finite number: {p:?}", FEATURE_NAMES[k])))?;
    }
    Ok(f)
}

fn load_dataset(source: &str) -> Result<SlopeDataset, Failure> {
    if source == "builtin" {
        return Ok(embedded_dataset());
    }
    let text = fs::read_to_string(source).with_context(|| format!("reading {source}")).map_err(data)?;
    parse_csv(&text).with_context(|| format!("parsing {source}")).map_err(data)
}

fn write_file(path: &Path, contents: &str) -> CmdResult {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(data)
}

fn make_split(ds: &SlopeDataset, train_n: usize, shuffle_seed: Option<u64>) -> Result<DataSplit, Failure> {
    match shuffle_seed {
        Some(seed) => shuffled_split(ds, train_n, seed),
        None => head_split(ds, train_n),
    }
    .map_err(data)
}

/// `<dir>/<stem><suffix>` next to `path`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn scatter_csv(actual: &[f64], predicted: &[f64]) -> String {
    let mut out = String::from("actual,predicted\n");
    for (a, p) in actual.iter().zip(predicted) {
        let _ = writeln!(out, "{a},{p}");
    }
    out
}

fn print_block(title: &str, body: &str) {
    println!("[{title}]");
    print!("{body}");
}

fn cmd_dataset(action: DatasetAction) -> CmdResult {
    let ds = embedded_dataset();
    match action {
        DatasetAction::Export { out, reference_out } => {
            let reference_out = reference_out.unwrap_or_else(|| sibling(&out, ".reference.csv"));
            write_file(&out, &ds.to_csv())?;
            if let Some(reference) = ds.reference_to_csv() {
                write_file(&reference_out, &reference)?;
            }
            println!("wrote {} rows to {}", ds.len(), out.display());
            println!("wrote reference columns to {}", reference_out.display());
        }
        DatasetAction::Show => {
            let reference = ds.reference();
            println!(
                "{:>3} {:>6} {:>7} {:>6} {:>6} {:>7} {:>5} {:>3} {:>6} {:>6} {:>6}",
                "no", "gamma", "c", "phi", "beta", "H", "ru", "S", "FS", "S_comp", "FS_comp"
            );
            for (i, s) in ds.samples().iter().enumerate() {
                let (rs, rf) = reference
                    .map(|r| (r.status[i].as_i8().to_string(), r.fs[i].to_string()))
                    .unwrap_or_default();
                println!(
                    "{:>3} {:>6} {:>7} {:>6} {:>6} {:>7} {:>5} {:>3} {:>6} {:>6} {:>6}",
                    i + 1,
                    s.gamma,
                    s.cohesion,
                    s.phi,
                    s.beta,
                    s.height,
                    s.ru,
                    s.status.map(|v| v.as_i8().to_string()).unwrap_or_default(),
                    s.fs.map(|v| v.to_string()).unwrap_or_default(),
                    rs,
                    rf
                );
            }
        }
    }
    Ok(())
}

fn config_block(cfg: &GsgpConfig) -> String {
    let mut out = String::new();
    let erc = cfg
        .tree_gen
        .constants
        .map(|r| format!("{},{}", r.low, r.high))
        .unwrap_or_else(|| "off".into());
    let _ = writeln!(out, "task={}", cfg.task);
    let _ = writeln!(out, "seed={}", cfg.seed);
    let _ = writeln!(out, "population_size={}", cfg.population_size);
    let _ = writeln!(out, "generations={}", cfg.generations);
    let _ = writeln!(out, "mutation_step={}", cfg.mutation_step);
    let _ = writeln!(out, "mutation_mode={}", cfg.mutation_mode);
    let _ = writeln!(out, "crossover_probability={}", cfg.crossover_probability);
    let _ = writeln!(out, "mutation_probability={}", cfg.mutation_probability);
    let _ = writeln!(out, "tournament_size={}", cfg.tournament_size);
    let _ = writeln!(out, "elitism_count={}", cfg.elitism_count);
    let _ = writeln!(
        out,
        "init={:?} depth {}..={}",
        cfg.tree_gen.method, cfg.tree_gen.min_depth, cfg.tree_gen.max_depth
    );
    let _ = writeln!(
        out,
        "mutation_trees={:?} depth {}..={}",
        cfg.mutation_tree_gen.method, cfg.mutation_tree_gen.min_depth, cfg.mutation_tree_gen.max_depth
    );
    let _ = writeln!(out, "erc={erc}");
    out
}

fn cmd_train(args: TrainArgs) -> CmdResult {
    let ds = load_dataset(&args.data)?;
    if !ds.has_labels_for(args.task) {
        return Err(data(anyhow!(
            "dataset {} has no {} column required for {}",
            args.data,
            args.task.label_column(),
            args.task
        )));
    }
    let split = make_split(&ds, args.train_n, args.shuffle_seed)?;
    let normalization = if args.normalize {
        Some(MinMax::fit(&ds, &split.train).map_err(data)?)
    } else {
        None
    };
    let scaled = match &normalization {
        Some(mm) => ds.map_features(|f| mm.apply(f)),
        None => ds.clone(),
    };

    let mut cfg = GsgpConfig::new(args.task, args.seed);
    cfg.population_size = args.pop;
    cfg.generations = args.gens;
    cfg.mutation_step = args.ms;
    cfg.mutation_mode = args.mutation_mode;
    cfg.tournament_size = args.tournament_size.unwrap_or(cfg.tournament_size.min(args.pop.max(1)));
    cfg.elitism_count = args.elitism.unwrap_or(cfg.elitism_count.min(args.pop.saturating_sub(1)));
    cfg.tree_gen.constants = args.erc;
    cfg.mutation_tree_gen.constants = args.erc;
    let threads = threads_from_env();

    let mut header = config_block(&cfg);
    let _ = writeln!(header, "data={}", args.data);
    let _ = writeln!(header, "train_n={}", split.train.len());
    let _ = writeln!(header, "test_n={}", split.test.len());
    let _ = writeln!(
        header,
        "shuffle_seed={}",
        args.shuffle_seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into())
    );
    let _ = writeln!(header, "normalize={}", args.normalize);
    let _ = writeln!(header, "threads={}", if threads == 0 { "auto".to_string() } else { threads.to_string() });
    print_block("config", &header);

    let run = with_threads(threads, || run_gsgp_on(&cfg, &scaled, &split)).map_err(engine)?;
    let info = SplitInfo {
        train_n: args.train_n,
        shuffle_seed: args.shuffle_seed,
    };
    let model = GsgpModel::from_run(&run, &cfg, info, normalization).map_err(runtime)?;
    write_file(&args.out, &model.to_json())?;

    let train_actual = ds.targets(args.task, &split.train).map_err(data)?;
    let test_actual = ds.targets(args.task, &split.test).map_err(data)?;
    let train_scatter = sibling(&args.out, ".train.csv");
    let test_scatter = sibling(&args.out, ".test.csv");
    write_file(&train_scatter, &scatter_csv(&train_actual, &run.train_outputs))?;
    write_file(&test_scatter, &scatter_csv(&test_actual, &run.test_outputs))?;
    if let Some(log) = &args.log {
        write_file(log, &run.log_csv())?;
    }

    let mut summary = String::new();
    let _ = writeln!(summary, "best_id={}", model.best.0);
    let _ = writeln!(summary, "best_train_fitness={}", run.best_fitness);
    let _ = writeln!(summary, "lineage_records={}", model.lineage.records.len());
    print_block("result", &summary);
    print_block("train", &run.train_metrics.to_kv_block());
    print_block("test", &run.test_metrics.to_kv_block());
    println!("model={}", args.out.display());
    println!("scatter={},{}", train_scatter.display(), test_scatter.display());
    Ok(())
}

fn load_model(path: &Path) -> Result<GsgpModel, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(data)?;
    GsgpModel::from_json(&text)
        .with_context(|| format!("loading model {}", path.display()))
        .map_err(data)
}

fn cmd_predict(args: PredictArgs) -> CmdResult {
    let model = load_model(&args.model)?;
    let rows: Vec<Features> = match (&args.features, &args.input) {
        (Some(f), _) => vec![parse_features(f)?],
        (None, Some(path)) => {
            let ds = load_dataset(&path.to_string_lossy())?;
            ds.samples().iter().map(|s| s.features()).collect()
        }
        (None, None) => return Err(usage(anyhow!("one of --features or --input is required"))),
    };
    let outputs = model.predict_batch(&rows).map_err(runtime)?;
    match model.task {
        Task::Regression => {
            println!("row,fs");
            for (i, v) in outputs.iter().enumerate() {
                println!("{},{v}", i + 1);
            }
        }
        Task::Classification => {
            println!("row,raw,status");
            for (i, v) in outputs.iter().enumerate() {
                println!("{},{v},{}", i + 1, status_text(classify(*v, DEFAULT_CUTOFF)));
            }
        }
    }
    Ok(())
}

fn status_text(s: SlopeStatus) -> &'static str {
    match s {
        SlopeStatus::Stable => "+1",
        SlopeStatus::Unstable => "-1",
    }
}

fn split_indices(split: &DataSplit, choice: SplitChoice, len: usize) -> Vec<usize> {
    match choice {
        SplitChoice::Train => split.train.clone(),
        SplitChoice::Test => split.test.clone(),
        SplitChoice::All => (0..len).collect(),
    }
}

fn split_name(choice: SplitChoice) -> &'static str {
    match choice {
        SplitChoice::Train => "train",
        SplitChoice::Test => "test",
        SplitChoice::All => "all",
    }
}

fn checked_report(task: Task, outputs: &[f64], targets: &[f64]) -> Result<MetricsReport, Failure> {
    let report = MetricsReport::compute(task, outputs, targets).map_err(data)?;
    if task == Task::Regression && report.pearson_r.is_none() {
        return Err(data(anyhow!(
            "Pearson correlation is undefined: predictions or targets are constant"
        )));
    }
    Ok(report)
}

fn cmd_evaluate(args: EvaluateArgs) -> CmdResult {
    let name = split_name(args.split);
    if args.reference_columns {
        let ds = embedded_dataset();
        let reference = ds.reference().ok_or_else(|| data(anyhow!("no reference columns")))?;
        let split = make_split(&ds, args.train_n, None)?;
        let idx = split_indices(&split, args.split, ds.len());
        let tasks = match args.task {
            Some(t) => vec![t],
            None => vec![Task::Classification, Task::Regression],
        };
        let mut header = String::new();
        let _ = writeln!(header, "source=reference-columns");
        let _ = writeln!(header, "train_n={}", args.train_n);
        let _ = writeln!(header, "split={name}");
        print_block("config", &header);
        for task in tasks {
            let outputs: Vec<f64> = match task {
                Task::Classification => idx.iter().map(|&i| reference.status[i].value()).collect(),
                Task::Regression => idx.iter().map(|&i| reference.fs[i]).collect(),
            };
            let targets = ds.targets(task, &idx).map_err(data)?;
            let report = checked_report(task, &outputs, &targets)?;
            print_block(&format!("{name} {task}"), &report.to_kv_block());
        }
        return Ok(());
    }

    let path = args.model.as_ref().expect("clap requires --model");
    let model = load_model(path)?;
    let ds = load_dataset(&args.data)?;
    let split = make_split(&ds, model.split.train_n, model.split.shuffle_seed)?;
    let idx = split_indices(&split, args.split, ds.len());
    let rows = ds.features_at(&idx).map_err(data)?;
    let targets = ds.targets(model.task, &idx).map_err(data)?;
    let outputs = model.predict_batch(&rows).map_err(runtime)?;

    let mut header = String::new();
    let _ = writeln!(header, "model={}", path.display());
    let _ = writeln!(header, "task={}", model.task);
    let _ = writeln!(header, "seed={}", model.seed);
    let _ = writeln!(header, "data={}", args.data);
    let _ = writeln!(header, "train_n={}", model.split.train_n);
    let _ = writeln!(
        header,
        "shuffle_seed={}",
        model.split.shuffle_seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into())
    );
    let _ = writeln!(header, "normalize={}", model.normalization.is_some());
    let _ = writeln!(header, "split={name}");
    let _ = writeln!(header, "recorded_train_fitness={}", model.train_fitness);
    print_block("config", &header);
    let report = checked_report(model.task, &outputs, &targets)?;
    print_block(name, &report.to_kv_block());
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> CmdResult {
    let mut algorithms = args.algorithms.iter().map(|a| a.trim().to_ascii_lowercase()).collect::<Vec<_>>();
    algorithms.sort();
    algorithms.dedup();
    if algorithms != ["gsgp", "stgp"] {
        return Err(usage(anyhow!(
            "comparison needs both algorithms gsgp,stgp; got {:?}",
            args.algorithms
        )));
    }
    if args.runs < 2 {
        return Err(usage(anyhow!("comparison needs at least 2 runs, got {}", args.runs)));
    }
    let ds = load_dataset(&args.data)?;
    let split = make_split(&ds, args.train_n, None)?;
    let (train, test) = TaskData::split(&ds, &split, Task::Regression).map_err(data)?;

    let mut gsgp = GsgpConfig::new(Task::Regression, args.seed);
    gsgp.population_size = args.pop;
    gsgp.generations = args.gens;
    gsgp.mutation_step = args.ms;
    gsgp.mutation_mode = args.mutation_mode;
    gsgp.tournament_size = gsgp.tournament_size.min(args.pop.max(1));
    gsgp.elitism_count = gsgp.elitism_count.min(args.pop.saturating_sub(1));
    let stgp = StgpConfig::matching(&gsgp);
    let cfg = ComparisonConfig {
        runs: args.runs,
        base_seed: args.seed,
        gsgp,
        stgp,
    };
    let threads = threads_from_env();

    let mut header = config_block(&cfg.gsgp);
    let _ = writeln!(header, "runs={}", cfg.runs);
    let _ = writeln!(header, "seeds={}..={}", cfg.seed_for(0), cfg.seed_for(cfg.runs - 1));
    let _ = writeln!(header, "stgp_max_depth={}", cfg.stgp.max_depth);
    let _ = writeln!(header, "data={}", args.data);
    let _ = writeln!(header, "train_n={}", args.train_n);
    let _ = writeln!(header, "threads={}", if threads == 0 { "auto".to_string() } else { threads.to_string() });
    let _ = writeln!(header, "out_dir={}", args.out_dir.display());
    print_block("config", &header);

    let stats = with_threads(threads, || run_comparison(&cfg, &train, &test)).map_err(|e| match e {
        EngineError::Config(_) => usage(e),
        other => runtime(other),
    })?;

    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))
        .map_err(data)?;
    write_file(&args.out_dir.join("comparison_runs.csv"), &stats.runs_csv())?;
    write_file(&args.out_dir.join("comparison_summary.csv"), &stats.summary_csv())?;
    write_file(&args.out_dir.join("wilcoxon_p.txt"), &stats.wilcoxon_record())?;

    println!("[summary]");
    println!(
        "{:<10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "algorithm", "min", "q1", "median", "q3", "max", "iqr"
    );
    for alg in stats.algorithms() {
        let s = &alg.summary;
        println!(
            "{:<10} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            alg.name,
            s.min,
            s.q1,
            s.median,
            s.q3,
            s.max,
            s.iqr()
        );
    }
    print!("{}", stats.wilcoxon_record());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(USAGE),
            };
        }
    };
    let result = match cli.command {
        Command::Dataset { action } => cmd_dataset(action),
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
