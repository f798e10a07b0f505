use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use slope_gsgp::data::{embedded_dataset, parse_csv};
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_slope-gsgp"));
    cmd.env_remove("GSGP_THREADS");
    cmd
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("spawn slope-gsgp")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn kv(text: &str, block: &str, key: &str) -> f64 {
    let mut inside = false;
    for line in text.lines() {
        if line.starts_with('[') {
            inside = line == format!("[{block}]");
            continue;
        }
        if inside {
            if let Some(v) = line.strip_prefix(&format!("{key}=")) {
                return v.parse().unwrap();
            }
        }
    }
    panic!("no {key} in [{block}]:\n{text}");
}

fn train_small(dir: &Path, task: &str, model: &str, extra: &[&str]) -> Output {
    let mut args = vec!["train", "--task", task, "--pop", "40", "--gens", "5", "--seed", "3", "--out", model];
    args.extend_from_slice(extra);
    let out = run(&args, dir);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    out
}

#[test]
fn dataset_export_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = run(&["dataset", "export", "--out", "slope.csv"], dir.path());
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("slope.csv")).unwrap();
    assert_eq!(text.lines().count(), 53);
    let back = parse_csv(&text).unwrap();
    assert_eq!(back.samples(), embedded_dataset().samples());
    let reference = fs::read_to_string(dir.path().join("slope.reference.csv")).unwrap();
    assert!(reference.starts_with("no,S_computed,FS_computed\n"));
    assert_eq!(reference.lines().count(), 53);

    let show = run(&["dataset", "show"], dir.path());
    assert_eq!(code(&show), 0);
    assert_eq!(stdout(&show).lines().count(), 53);
}

#[test]
fn export_to_missing_directory_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let out = run(&["dataset", "export", "--out", "no/such/dir/slope.csv"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn degenerate_training_still_writes_a_model() {
    let dir = TempDir::new().unwrap();
    let out = run(
        &["train", "--task", "classification", "--gens", "0", "--pop", "1", "--seed", "1", "--out", "m.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("population_size=1") && text.contains("seed=1"));
    let model = fs::read_to_string(dir.path().join("m.json")).unwrap();
    slope_gsgp::model::GsgpModel::from_json(&model).unwrap();
    assert!(dir.path().join("m.train.csv").exists());
    assert!(dir.path().join("m.test.csv").exists());
}

#[test]
fn training_prints_defaults() {
    let dir = TempDir::new().unwrap();
    let out = train_small(dir.path(), "regression", "m.json", &["--log", "log.csv"]);
    let text = stdout(&out);
    for key in ["mutation_step=0.1", "mutation_mode=tree", "tournament_size=4", "elitism_count=1", "train_n=40", "test_n=12"] {
        assert!(text.contains(key), "missing {key}");
    }
    let log = fs::read_to_string(dir.path().join("log.csv")).unwrap();
    assert_eq!(log.lines().count(), 1 + 6);
}

#[test]
fn regression_without_fs_column_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let csv = "gamma,c,phi,beta,H,ru,S\n18.8,14.4,25.02,19.98,30.6,0,1\n20,10,30,25,40,0.2,-1\n";
    fs::write(dir.path().join("s.csv"), csv).unwrap();
    let out = run(&["train", "--task", "regression", "--data", "s.csv", "--train-n", "1"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn predict_matches_stored_training_semantics() {
    let dir = TempDir::new().unwrap();
    train_small(dir.path(), "regression", "m.json", &[]);
    let scatter = fs::read_to_string(dir.path().join("m.train.csv")).unwrap();
    let stored: f64 = scatter.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();

    let out = run(&["predict", "--model", "m.json", "--features", "18.80,14.40,25.02,19.98,30.6,0"], dir.path());
    assert_eq!(code(&out), 0);
    let got: f64 = stdout(&out).lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((got - stored).abs() <= 1e-9, "{got} vs {stored}");

    run(&["dataset", "export", "--out", "slope.csv"], dir.path());
    let out = run(&["predict", "--model", "m.json", "--input", "slope.csv"], dir.path());
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 53);
    for (p, s) in text.lines().skip(1).zip(scatter.lines().skip(1)) {
        let p: f64 = p.split(',').nth(1).unwrap().parse().unwrap();
        let s: f64 = s.split(',').nth(1).unwrap().parse().unwrap();
        assert!((p - s).abs() <= 1e-9);
    }
}

#[test]
fn classification_predict_prints_raw_and_label() {
    let dir = TempDir::new().unwrap();
    train_small(dir.path(), "classification", "c.json", &[]);
    let out = run(&["predict", "--model", "c.json", "--features", "18.80,14.40,25.02,19.98,30.6,0"], dir.path());
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let line = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = line.split(',').collect();
    let raw: f64 = fields[1].parse().unwrap();
    assert_eq!(fields[2], if raw >= 0.0 { "+1" } else { "-1" });
}

#[test]
fn predict_errors() {
    let dir = TempDir::new().unwrap();
    train_small(dir.path(), "regression", "m.json", &[]);
    let out = run(&["predict", "--model", "m.json", "--features", "1,2,3"], dir.path());
    assert_eq!(code(&out), 1);
    fs::write(dir.path().join("bad.json"), "{\"format\": 1}").unwrap();
    let out = run(&["predict", "--model", "bad.json", "--features", "1,2,3,4,5,6"], dir.path());
    assert_eq!(code(&out), 2);
    let out = run(&["predict", "--model", "missing.json", "--features", "1,2,3,4,5,6"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn negative_feature_values_are_accepted() {
    let dir = TempDir::new().unwrap();
    train_small(dir.path(), "regression", "m.json", &["--erc", "-1,1"]);
    let out = run(&["predict", "--model", "m.json", "--features", "-1,2,-3,4,5,-0.5"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn evaluate_reference_columns() {
    let dir = TempDir::new().unwrap();
    let train = stdout(&run(&["evaluate", "--reference-columns", "--split", "train"], dir.path()));
    assert_eq!(kv(&train, "train classification", "accuracy_percent"), 97.5);
    assert!((kv(&train, "train regression", "pearson_r") - 0.958).abs() <= 0.01);
    let test = stdout(&run(&["evaluate", "--reference-columns", "--split", "test"], dir.path()));
    assert!((kv(&test, "test classification", "accuracy_percent") - 91.7).abs() < 0.05);
    assert!((kv(&test, "test regression", "pearson_r") - 0.934).abs() <= 0.01);
}

#[test]
fn evaluate_model_reports_recorded_train_fitness() {
    let dir = TempDir::new().unwrap();
    train_small(dir.path(), "regression", "m.json", &["--normalize", "--shuffle-seed", "9"]);
    let out = run(&["evaluate", "--model", "m.json", "--split", "train"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(kv(&text, "train", "raw_fitness"), kv(&text, "config", "recorded_train_fitness"));
    let all = run(&["evaluate", "--model", "m.json", "--split", "all"], dir.path());
    assert_eq!(kv(&stdout(&all), "all", "n"), 52.0);
}

#[test]
fn constant_predictions_have_no_correlation() {
    let dir = TempDir::new().unwrap();
    let out = run(&["train", "--task", "regression", "--pop", "4", "--gens", "0", "--out", "m.json"], dir.path());
    assert_eq!(code(&out), 0);
    let path = dir.path().join("m.json");
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let best = v["best"].clone();
    let recs = v["individuals"].as_array_mut().unwrap();
    let rec = recs.iter_mut().find(|r| r["id"] == best).unwrap();
    rec["tree"] = serde_json::json!("(x1 - x1)");
    fs::write(&path, v.to_string()).unwrap();
    let out = run(&["evaluate", "--model", "m.json"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn thread_count_does_not_change_the_model() {
    let dir = TempDir::new().unwrap();
    let mut models = Vec::new();
    for threads in ["1", "3"] {
        let out = bin()
            .args(["train", "--task", "regression", "--pop", "60", "--gens", "6", "--seed", "11", "--out", "m.json"])
            .env("GSGP_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        assert!(stdout(&out).contains(&format!("threads={threads}")));
        models.push(fs::read(dir.path().join("m.json")).unwrap());
    }
    assert_eq!(models[0], models[1]);
}

#[test]
fn compare_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let mut files = Vec::new();
    for out_dir in ["a", "b"] {
        let out = run(
            &["compare", "--runs", "2", "--seed", "7", "--pop", "20", "--gens", "3", "--out-dir", out_dir],
            dir.path(),
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let read = |f: &str| fs::read(dir.path().join(out_dir).join(f)).unwrap();
        files.push((read("comparison_runs.csv"), read("comparison_summary.csv"), read("wilcoxon_p.txt")));
    }
    assert_eq!(files[0], files[1]);
    let runs = String::from_utf8(files[0].0.clone()).unwrap();
    assert!(runs.starts_with("algorithm,run_index,seed,test_rmse\n"));
    assert_eq!(runs.lines().count(), 1 + 4);
    let summary = String::from_utf8(files[0].1.clone()).unwrap();
    assert!(summary.starts_with("algorithm,min,q1,median,q3,max,iqr\n"));
    assert!(String::from_utf8(files[0].2.clone()).unwrap().starts_with("wilcoxon_p="));
}

#[test]
fn usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(&["compare", "--algorithms", "gsgp"], dir.path())), 1);
    assert_eq!(code(&run(&["compare", "--runs", "1"], dir.path())), 1);
    assert_eq!(code(&run(&["train", "--task", "regression", "--bogus"], dir.path())), 1);
    assert_eq!(code(&run(&["train", "--task", "sideways"], dir.path())), 1);
    assert_eq!(code(&run(&["nothing"], dir.path())), 1);
    assert_eq!(code(&run(&["--help"], dir.path())), 0);
    assert_eq!(code(&run(&["--version"], dir.path())), 0);
}
