use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use harsanyi::config::RunConfig;
use harsanyi::pipeline::{analyze_models, load_dataset, noise_study};
use harsanyi::mlp::train_mlp;

const BIN: &str = env!("CARGO_BIN_EXE_harsanyi");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("HARSANYI_OUTPUT_ROOT")
        .output()
        .expect("binary runs")
}

fn quick_config(dir: &Path) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(
        &path,
        "[dataset]\npath = \"builtin:tictactoe\"\nschema = \"tictactoe\"\n\
         [training]\nepochs = 4\n\
         [analysis]\ncategory = \"row2\"\nrandom_trials = 200\n\
         [noise]\nlabel_ratios = [0.0, 0.3]\ninput_strengths = [0.5]\n\
         [synth]\nmax_n = 6\ngames_per_size = 2\n",
    )
    .unwrap();
    path
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn full_run(work: &Path, out: &str) {
    let cfg = quick_config(work);
    let cfg = cfg.to_str().unwrap();
    let ok = |args: &[&str]| {
        let o = run(work, args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    };
    ok(&["train", "-c", cfg, "--output-dir", out]);
    ok(&["train", "-c", cfg, "--output-dir", out, "--seed", "2"]);
    let m1 = format!("{out}/mlp5-s1.mlpw");
    let m2 = format!("{out}/mlp5-s2.mlpw");
    ok(&["extract", "-c", cfg, "--output-dir", out, "--model", &m1]);
    ok(&["extract", "-c", cfg, "--output-dir", out, "--model", &m2]);
    let t1 = format!("{out}/tables-mlp5-s1");
    let t2 = format!("{out}/tables-mlp5-s2");
    ok(&["metrics", "-c", cfg, "--output-dir", out, "--tables", &t1, "--second", &t2]);
    ok(&["noise-study", "-c", cfg, "--output-dir", out]);
    ok(&["synth-check", "-c", cfg, "--output-dir", out]);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (first, second) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    full_run(first.path(), "out");
    full_run(second.path(), "out");
    let a = read_tree(&first.path().join("out"));
    let b = read_tree(&second.path().join("out"));
    assert!(a.iter().any(|(n, _)| n == "metrics.json"));
    assert!(a.iter().any(|(n, _)| n == "noise-study.json"));
    assert!(a.iter().any(|(n, _)| n.ends_with(".hars")));
    let names = |t: &[(String, Vec<u8>)]| t.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>();
    assert_eq!(names(&a), names(&b));
    let differing: Vec<&String> = a.iter().zip(&b).filter(|(x, y)| x.1 != y.1).map(|(x, _)| &x.0).collect();
    assert!(differing.is_empty(), "files differ: {differing:?}");

    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(first.path().join("out/metrics.json")).unwrap()).unwrap();
    for block in ["sparsity_curve", "rho_curve", "gamma_curve", "discrimination", "kappa"] {
        assert!(report["blocks"].get(block).is_some(), "{block}");
    }
    assert_eq!(report["metadata"]["config"]["model"]["seed"], 1);
}

#[test]
fn missing_dataset_exits_2_without_artifacts() {
    let work = tempfile::tempdir().unwrap();
    let o = run(work.path(), &["train", "--dataset", "missing.data", "--output-dir", "out"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!work.path().join("out").exists());
    let o = run(work.path(), &["train", "--config", "nope.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_selection_exits_3() {
    let work = tempfile::tempdir().unwrap();
    // Positive boards won through the first column only, never the first row.
    let rows = [
        "x,o,o,x,b,b,x,b,b,positive",
        "x,o,b,x,o,b,x,b,b,positive",
        "x,b,o,x,o,b,x,b,b,positive",
        "o,x,x,o,x,b,o,b,b,negative",
        "o,x,b,o,x,b,o,b,x,negative",
    ];
    std::fs::write(work.path().join("t.data"), rows.join("\n") + "\n").unwrap();
    let common = ["--dataset", "t.data", "--schema", "tictactoe", "--output-dir", "out", "--epochs", "2"];
    let o = run(work.path(), &[&["train"][..], &common].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let args = [&["extract"][..], &common, &["--model", "out/mlp5-s1.mlpw", "--category", "row1"]].concat();
    let o = run(work.path(), &args);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let args = [&["extract"][..], &common, &["--model", "out/mlp5-s1.mlpw", "--category", "col1"]].concat();
    assert!(run(work.path(), &args).status.success());
}

#[test]
fn output_root_variable_prefixes_relative_dirs() {
    let work = tempfile::tempdir().unwrap();
    let o = Command::new(BIN)
        .args(["synth-check", "--output-dir", "synth"])
        .current_dir(work.path())
        .env("HARSANYI_OUTPUT_ROOT", work.path().join("root"))
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(work.path().join("root/synth/synth-check.json").exists());
}

#[test]
fn clean_noise_point_matches_the_metrics_run() {
    let mut config = RunConfig::from_toml(&std::fs::read_to_string(quick_config(tempfile::tempdir().unwrap().path())).unwrap()).unwrap();
    config.noise.label_ratios = vec![0.0];
    config.noise.input_strengths = vec![];
    let study = noise_study(&config).unwrap().blocks.noise_study.unwrap();
    let point = &study.label_noise[0];

    let ds = load_dataset(&config).unwrap();
    let (model, _) = train_mlp(&ds, config.model.architecture, &config.training, config.model.seed).unwrap();
    let report = analyze_models(&config, &ds, &model, None).unwrap();
    assert_eq!(point.rho, report.blocks.rho_curve.unwrap().rho);
    assert_eq!(point.beta_bar, Some(report.blocks.discrimination.unwrap().beta_bar));
    assert_eq!(point.kappa, Some(report.blocks.kappa.unwrap().kappa.mean));
}
