use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cloud-diam")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is strict JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn diameter_of_two_points() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("two.csv");
    std::fs::write(&f, "x,y\n0,0\n3,4\n").unwrap();
    for algo in ["naive", "fast"] {
        let v = json(&run(&["diameter", "--in", path(&f), "--q", "2", "--algo", algo]));
        assert_eq!(v["value"], 5.0);
        assert_eq!((v["i"].as_u64(), v["j"].as_u64()), (Some(0), Some(1)));
        assert_eq!(v["algo"], algo);
        assert!(v["elapsed_ms"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["norming", "--model", "sphericalq:d=2,q=2,radial=weibull:2", "--n", "1000"],
        vec!["norming", "--model", "elliptical:d=3", "--n", "1000"],
        vec!["sample", "--model", "elliptical:d=2,radial=exponential:1", "--n", "10", "--out", "x.csv"],
        vec!["limit-sim", "--law", "diam-k9", "--draws", "10", "--seed", "1", "--out", "x.csv"],
        vec!["diameter", "--in", "x.csv", "--q", "0.5"],
        vec!["diameter", "--in", "x.csv", "--algo", "quick"],
        vec!["frobnicate"],
        vec![],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let q2 = run(&["norming", "--model", "sphericalq:d=2,q=2,radial=weibull:2", "--n", "1000"]);
    assert!(String::from_utf8_lossy(&q2.stderr).contains("elliptical"));
}

#[test]
fn runtime_errors_exit_with_one() {
    let out = run(&["diameter", "--in", "/nonexistent/cloud.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["norming", "--model", "elliptical:d=2,radial=exponential:1", "--n", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("threshold"));
    let out = run(&["localize", "--model", "aniso:a=2,q=0.75,radial=exponential:1", "--x", "50", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sampled_clouds_give_the_same_diameter_with_both_algorithms() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("elliptical:d=3,eigs=4;1;0.5,radial=exponential:1", "2"),
        ("elliptical:rho=0.2,radial=chi:2", "2"),
        ("sphericalq:d=2,q=3,radial=weibull:2", "3"),
        ("sphericalq:d=3,q=1,radial=exponential:1", "1"),
        ("cone:theta0=pi,density=polyquad,radial=exponential:1", "2"),
        ("curve:preset=ellipse,rho=0.2,radial=chi:2", "inf"),
        ("aniso:a=2,q=0.75,radial=exponential:1", "2.5"),
    ];
    for (k, (model, q)) in cases.iter().enumerate() {
        let f = dir.path().join(format!("c{k}.csv"));
        json(&run(&["sample", "--model", model, "--n", "3000", "--seed", "7", "--out", path(&f)]));
        let naive = json(&run(&["diameter", "--in", path(&f), "--q", q, "--algo", "naive"]));
        let fast = json(&run(&["diameter", "--in", path(&f), "--q", q, "--algo", "fast"]));
        for key in ["value", "i", "j"] {
            assert_eq!(naive[key], fast[key], "{model} {key}");
        }
    }
}

#[test]
fn norming_json_has_stable_names() {
    let v = json(&run(&["norming", "--model", "elliptical:d=3,eigs=4;4;0.5,radial=exponential:1", "--n", "100000"]));
    for key in ["a_n", "b_n", "c_n", "d_n", "a_nT", "b_nT", "C_k", "Cprime_k", "D_k", "diameter", "max_norm"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["family"], "elliptical-kge2");
    assert!(v["d_n"].as_f64().is_some());
}

#[test]
fn experiment_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let reports: Vec<Value> = ["a.json", "b.json"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let args = [
                "experiment",
                "--model",
                "elliptical:rho=0.2,radial=chi:2",
                "--n",
                "2000",
                "--reps",
                "20",
                "--seed",
                "9",
                "--reference-draws",
                "5000",
                "--out",
                path(&out),
            ];
            json(&run(&args));
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap()
        })
        .collect();
    assert_eq!(reports[0]["values"], reports[1]["values"]);
    assert_eq!(reports[0]["ks"], reports[1]["ks"]);
    assert_eq!(reports[0]["R"], 20);
    assert_eq!(reports[0]["values"].as_array().unwrap().len(), 20);
    assert_eq!(reports[0]["ecdf"]["x"].as_array().unwrap().len(), 512);
    assert_eq!(reports[0]["reference"]["kind"], "sample");
    assert_eq!(reports[0]["reference"]["sample_size"], 5000);
    let (a, b) = (
        std::fs::read_to_string(dir.path().join("a.csv")).unwrap(),
        std::fs::read_to_string(dir.path().join("b.csv")).unwrap(),
    );
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 21);
}

#[test]
fn maxnorm_experiment_uses_the_gumbel_cdf() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let args = [
        "experiment",
        "--model",
        "elliptical:d=2,radial=exponential:1",
        "--n",
        "1000",
        "--reps",
        "50",
        "--seed",
        "1",
        "--statistic",
        "max-norm",
        "--out",
        path(&out),
    ];
    let v = json(&run(&args));
    assert_eq!(v["reference"]["kind"], "cdf");
    assert_eq!(v["reference"]["law"], "gumbel");
}

#[test]
fn limit_draws_are_written_as_csv() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("l.csv");
    let v = json(&run(&[
        "limit-sim", "--law", "gumbel-sum", "--draws", "500", "--seed", "2", "--out", path(&f), "--cdf-at", "-1,0.5",
    ]));
    assert_eq!(v["draws"], 500);
    assert!(v["cdf"][0]["cdf"]["draws"].is_null());
    let text = std::fs::read_to_string(&f).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("value"));
    let values: Vec<f64> = lines.map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 500);
    let again = dir.path().join("l2.csv");
    json(&run(&["limit-sim", "--law", "gumbel-sum", "--draws", "500", "--seed", "2", "--out", path(&again)]));
    assert_eq!(std::fs::read_to_string(&again).unwrap(), text);
}

#[test]
fn localization_report() {
    let v = json(&run(&[
        "localize",
        "--model",
        "elliptical:d=3,eigs=4;1;0.5,radial=exponential:1",
        "--tail",
        "1e-20",
        "--accepted",
        "500",
        "--seed",
        "3",
    ]));
    assert_eq!(v["accepted"], 500);
    assert_eq!(v["target_variances"].as_array().unwrap().len(), 2);
    let v = json(&run(&[
        "localize",
        "--model",
        "elliptical:d=3,eigs=4;4;0.5,radial=exponential:1",
        "--pairs",
        "--n",
        "1000",
        "--reps",
        "20",
        "--seed",
        "3",
    ]));
    assert_eq!(v["cosine_target"], 1.0);
}
