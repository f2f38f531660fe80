use std::path::Path;
use std::process::{Command, Output};

use daernn::io::{read_observations, read_predictions};

fn daernn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_daernn"))
        .args(args)
        .env_remove("DAERNN_SEED")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = daernn(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

const SMALL: [&str; 12] = [
    "--layers", "1", "--nodes", "8", "--epochs", "5", "--batch-size", "32", "--grid-size", "9", "--iterations", "2",
];

#[test]
fn simulate_writes_the_documented_format() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (p(dir.path(), "a.csv"), p(dir.path(), "b.csv"));
    let stdout = ok(&["simulate", "--model", "model1", "-n", "100", "--seed", "3", "--out", &a]);
    ok(&["simulate", "--model", "model1", "-n", "100", "--seed", "3", "--out", &b]);
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x1,x2,t,delta,L,R,y_true");
    assert_eq!(text.lines().count(), 101);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let data = read_observations(text.as_bytes()).unwrap();
    let rate = data.observations.iter().filter(|o| o.is_censored()).count() as f64 / 100.0;
    let printed: f64 = stdout.trim().rsplit(' ').next().unwrap().parse().unwrap();
    assert_eq!(printed, rate);
    let meta = std::fs::read_to_string(format!("{a}.meta.json")).unwrap();
    assert!(meta.contains("\"exponential_parameterization\": \"mean\""));
}

#[test]
fn fit_and_predict_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = (p(dir.path(), "train.csv"), p(dir.path(), "test.csv"));
    ok(&["simulate", "-n", "120", "--seed", "1", "--out", &train]);
    ok(&["simulate", "-n", "30", "--seed", "2", "--out", &test]);
    for method in ["daernn", "full", "oracle", "dalinear"] {
        let (pred, model, again, detail) = (
            p(dir.path(), &format!("{method}.csv")),
            p(dir.path(), &format!("{method}.json")),
            p(dir.path(), &format!("{method}-again.csv")),
            p(dir.path(), &format!("{method}-detail.csv")),
        );
        let mut args = vec!["fit", "--train", &train, "--test", &test, "--method", method, "--seed", "5"];
        args.extend(SMALL);
        args.extend(["--out", &pred, "--save-model", &model, "--detail", &detail]);
        ok(&args);
        let table = read_predictions(std::fs::File::open(&pred).unwrap()).unwrap();
        assert_eq!(table.rows.len(), 30);
        assert_eq!(table.levels, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]);
        ok(&["predict", "--model", &model, "--input", &test, "--out", &again]);
        assert_eq!(std::fs::read(&pred).unwrap(), std::fs::read(&again).unwrap(), "{method}");
        assert!(std::fs::metadata(format!("{pred}.meta.json")).is_ok());
        let detail_rows = std::fs::read_to_string(&detail).unwrap().lines().count() - 1;
        let banks = if method == "daernn" || method == "dalinear" { 2 } else { 1 };
        assert_eq!(detail_rows, 30 * banks);
    }
}

#[test]
fn single_iteration_matches_its_detail() {
    let dir = tempfile::tempdir().unwrap();
    let (train, pred, detail) = (p(dir.path(), "train.csv"), p(dir.path(), "pred.csv"), p(dir.path(), "detail.csv"));
    ok(&["simulate", "-n", "80", "--seed", "4", "--out", &train]);
    let mut args = vec!["fit", "--train", &train, "--test", &train, "--out", &pred, "--detail", &detail];
    args.extend(&SMALL[..SMALL.len() - 2]);
    args.extend(["--iterations", "1"]);
    ok(&args);
    let preds = std::fs::read_to_string(&pred).unwrap();
    let rows: Vec<String> = std::fs::read_to_string(&detail)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.splitn(3, ',').nth(2).unwrap().to_owned())
        .collect();
    assert_eq!(preds.lines().skip(1).collect::<Vec<_>>(), rows);
}

#[test]
fn oracle_without_latent_response_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let (raw, train, pred) = (p(dir.path(), "raw.csv"), p(dir.path(), "train.csv"), p(dir.path(), "pred.csv"));
    let body: String = (0..40).map(|i| format!("{},{}\n", i as f64 / 10.0, (i % 7) as f64)).collect();
    std::fs::write(&raw, format!("x,t,delta,L,R\n{}", body.lines().map(|l| format!("{l},0,,\n")).collect::<String>()))
        .unwrap();
    std::fs::copy(&raw, &train).unwrap();
    let mut args = vec!["fit", "--train", &train, "--test", &train, "--method", "oracle", "--out", &pred];
    args.extend(SMALL);
    let out = daernn(&args);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("y_true"));
}

#[test]
fn inject_preserves_rows_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (raw, a, b, none) = (p(dir.path(), "raw.csv"), p(dir.path(), "a.csv"), p(dir.path(), "b.csv"), p(dir.path(), "none.csv"));
    let body: String = (0..50).map(|i| format!("{},{}\n", i, (i * 13 % 17) as f64 / 4.0)).collect();
    std::fs::write(&raw, format!("x,y\n{body}")).unwrap();
    let run = |out: &str, upper: &str| ok(&["inject", "-i", &raw, "--kind", "right", "--upper", upper, "--seed", "8", "-o", out]);
    run(&a, "normal:3:1");
    run(&b, "normal:3:1");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let data = read_observations(std::fs::File::open(&a).unwrap()).unwrap();
    assert_eq!(data.observations.len(), 50);
    assert_eq!(data.covariates, vec!["x"]);
    let stdout = run(&none, "const:1000");
    assert!(stdout.contains("censoring rate: 0"));
    let out = daernn(&["inject", "-i", &raw, "--response", "z", "--kind", "right", "--upper", "const:1", "-o", &none]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn benchmark_outputs_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "bench");
    let mut args = vec!["benchmark", "-n", "100", "-r", "2", "--methods", "daernn,full", "--seed", "9", "--out-dir", &out];
    args.extend(SMALL);
    ok(&args);
    let summary = std::fs::read_to_string(format!("{out}/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2 * 9);
    let mut detail = csv::Reader::from_path(format!("{out}/detail.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = detail.records().map(Result::unwrap).collect();
    let mut sum = csv::Reader::from_reader(summary.as_bytes());
    for rec in sum.records().map(Result::unwrap) {
        let els: Vec<f64> = rows
            .iter()
            .filter(|r| r[3] == rec[1] && r[4] == rec[2])
            .map(|r| r[5].parse::<f64>().unwrap())
            .collect();
        let mean = els.iter().sum::<f64>() / els.len() as f64;
        assert!((mean - rec[3].parse::<f64>().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn config_file_is_validated_and_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, bad, data) = (p(dir.path(), "cfg.toml"), p(dir.path(), "bad.toml"), p(dir.path(), "d.csv"));
    std::fs::write(&cfg, "seed = 11\n[scenario]\nmodel = \"model2\"\nn = 40\n").unwrap();
    std::fs::write(&bad, "[scenario]\nsize = 3\n").unwrap();
    let out = daernn(&["--config", &bad, "simulate", "--out", &data]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("size"));
    ok(&["--config", &cfg, "simulate", "-n", "25", "--out", &data]);
    let text = std::fs::read_to_string(&data).unwrap();
    assert_eq!(text.lines().count(), 26);
    let meta = std::fs::read_to_string(format!("{data}.meta.json")).unwrap();
    assert!(meta.contains("\"seed\": 11") && meta.contains("Model2"), "{meta}");
}

#[test]
fn invalid_settings_exit_with_config_status() {
    let dir = tempfile::tempdir().unwrap();
    let data = p(dir.path(), "d.csv");
    assert_eq!(daernn(&["simulate", "--model", "model3", "--out", &data]).status.code(), Some(2));
    ok(&["simulate", "-n", "30", "--out", &data]);
    let pred = p(dir.path(), "p.csv");
    let out = daernn(&["fit", "--train", &data, "--test", &data, "--levels", "0.5,1.5", "--out", &pred]);
    assert_eq!(out.status.code(), Some(2));
    let out = daernn(&["fit", "--train", &data, "--test", &data, "--method", "wernn", "--out", &pred]);
    assert_eq!(out.status.code(), Some(2));
    let missing = p(dir.path(), "missing.csv");
    let out = daernn(&["fit", "--train", &missing, "--test", &data, "--out", &pred]);
    assert_eq!(out.status.code(), Some(5));
}
