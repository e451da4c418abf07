use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn bergman(args: &[&str]) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_bergman")).args(args).output().expect("binary runs");
    out.status.code().expect("exit code")
}

struct Run {
    dir: tempfile::TempDir,
}

impl Run {
    fn new() -> Self {
        Run { dir: tempfile::tempdir().unwrap() }
    }

    fn config(&self, name: &str, json: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, json).unwrap();
        path
    }

    fn exec(&self, cmd: &str, config: &Path, out: &str, extra: &[&str]) -> i32 {
        let out = self.dir.path().join(out);
        let mut args = vec![cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        bergman(&args)
    }

    fn read(&self, path: &str) -> String {
        std::fs::read_to_string(self.dir.path().join(path)).unwrap()
    }

    fn json(&self, path: &str) -> Value {
        serde_json::from_str(&self.read(path)).unwrap()
    }
}

fn entry(v: &Value, k: usize) -> &str {
    v["coeffs"][k][0][0]["re"].as_str().unwrap()
}

#[test]
fn expand_fock_is_trivial() {
    let run = Run::new();
    let cfg = run.config("c.json", r#"{"model": {"name": "fock"}, "s": 3, "m_list": [1]}"#);
    assert_eq!(run.exec("expand", &cfg, "o", &[]), 0);
    let rows = run.json("o/expand.json");
    assert_eq!(entry(&rows[0], 0), "1/1");
    for k in 1..=3 {
        assert_eq!(entry(&rows[0], k), "0/1");
    }
    assert_eq!(run.json("o/manifest.json")["status"], "ok");
}

#[test]
fn expand_cp1_first_coefficient() {
    let run = Run::new();
    let cfg = run.config("c.json", r#"{"model": {"name": "fubini_study"}, "s": 1, "m_list": [1]}"#);
    assert_eq!(run.exec("expand", &cfg, "o", &[]), 0);
    let rows = run.json("o/expand.json");
    assert_eq!(entry(&rows[0], 1), "1/1");
    assert_eq!(rows[0]["coeffs"][1][0][0]["re_decimal"], "1.0000000000000000e0");
}

#[test]
fn expand_json_schema() {
    let run = Run::new();
    let cfg = run.config("c.json", r#"{"model": {"name": "fock", "n": 2, "r": 2}, "s": 1, "m_list": [1]}"#);
    assert_eq!(run.exec("expand", &cfg, "o", &[]), 0);
    let text = run.read("o/expand.json");
    let keys: Vec<&str> = ["\"model\"", "\"n\"", "\"r\"", "\"s\"", "\"point\"", "\"coeffs\""].to_vec();
    let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "key order {positions:?}");
    let row = &serde_json::from_str::<Value>(&text).unwrap()[0];
    assert_eq!(row.as_object().unwrap().len(), 6);
    assert_eq!(row["coeffs"].as_array().unwrap().len(), 2);
    assert_eq!(row["coeffs"][0].as_array().unwrap().len(), 2);
    assert_eq!(row["point"].as_array().unwrap().len(), 2);
}

#[test]
fn normalize_reports_k_normal_charts() {
    let run = Run::new();
    let cfg = run.config(
        "c.json",
        r#"{"model": {"name": "random", "n": 2, "r": 2, "seed": 4, "order": 12}, "s": 1, "m_list": [1], "p": 6}"#,
    );
    assert_eq!(run.exec("normalize", &cfg, "o", &["--seed", "5"]), 0);
    let rows = run.json("o/normalize.json");
    assert_eq!(rows[0]["k_normal"], true);
    assert_eq!(rows[0]["violations"].as_array().unwrap().len(), 0);
    assert_eq!(run.json("o/manifest.json")["seed"], 5);
}

#[test]
fn compare_with_zero_tolerance_fails() {
    let run = Run::new();
    let cfg = run.config(
        "c.json",
        r#"{"model": {"name": "perturbed_fock", "eps": "1/10"}, "s": 1, "m_list": [50, 100], "tolerance": 0}"#,
    );
    assert_eq!(run.exec("compare", &cfg, "o", &[]), 4);
    let csv = run.read("o/compare.csv");
    assert!(csv.starts_with("model,n,r,s,m,quantity,pipeline_value,oracle_value,abs_residual,fitted_exponent\n"));
    assert_eq!(csv.lines().count(), 3);
    let manifest = run.json("o/manifest.json");
    assert_eq!(manifest["status"], "failed");
    assert_eq!(manifest["exit_code"], 4);
}

#[test]
fn compare_passes_on_perturbed_fock() {
    let run = Run::new();
    let cfg = run.config("c.json", r#"{"model": {"name": "perturbed_fock", "eps": "1/10"}, "s": 1, "m_list": [50, 100, 200]}"#);
    assert_eq!(run.exec("compare", &cfg, "o", &[]), 0);
    let fitted: f64 = run.json("o/manifest.json")["compare"]["fitted_exponent"].as_str().unwrap().parse().unwrap();
    assert!(fitted > 0.75, "{fitted}");
}

#[test]
fn oracle_tolerance_failure() {
    let run = Run::new();
    let cfg = run.config(
        "c.json",
        r#"{"model": {"name": "perturbed_fock", "eps": "1/10"}, "s": 1, "m_list": [10], "tolerance": 1e-40}"#,
    );
    assert_eq!(run.exec("oracle", &cfg, "o", &[]), 4);
    let cfg = run.config("d.json", r#"{"model": {"name": "perturbed_fock", "eps": "1/10"}, "s": 1, "m_list": [10], "tolerance": 1e-20}"#);
    assert_eq!(run.exec("oracle", &cfg, "p", &[]), 0);
    assert!(run.read("p/oracle.csv").starts_with("model,n,r,m,quantity,value_re,value_im,error\n"));
}

#[test]
fn config_errors_exit_2() {
    let run = Run::new();
    let missing = run.dir.path().join("missing.json");
    assert_eq!(run.exec("expand", &missing, "o", &[]), 2);
    let cases = [
        "not json",
        r#"{"model": {"name": "fock"}, "s": 1, "m_list": []}"#,
        r#"{"model": {"name": "fock", "order": 5}, "s": 1, "m_list": [1]}"#,
        r#"{"model": {"name": "sphere"}, "s": 1, "m_list": [1]}"#,
        r#"{"model": {"name": "perturbed_fock", "n": 1, "eps": "1/10"}, "s": 1, "m_list": [1], "base_points": [["1/2"]]}"#,
        r#"{"model": {"name": "random", "n": 1}, "s": 1, "m_list": [1], "oracle": false}"#,
    ];
    for (i, json) in cases.iter().enumerate() {
        let cfg = run.config(&format!("c{i}.json"), json);
        assert_eq!(run.exec("compare", &cfg, &format!("o{i}"), &[]), 2, "{json}");
    }
    assert_eq!(bergman(&["explode", "--config", "x"]), 2);
}

#[test]
fn outputs_are_byte_identical() {
    let run = Run::new();
    let cfg = run.config(
        "c.json",
        r#"{"model": {"name": "user", "order": 12, "terms": [
              {"p": [1], "q": [1], "re": 1},
              {"p": [3], "q": [1], "re": "1/8"}, {"p": [1], "q": [3], "re": "1/8"},
              {"p": [2], "q": [0], "re": "1/5", "im": "1/7"}, {"p": [0], "q": [2], "re": "1/5", "im": "-1/7"}]},
            "s": 1, "m_list": [100, 200], "radius": 0.2}"#,
    );
    for cmd in ["normalize", "expand", "oracle", "compare"] {
        assert_eq!(run.exec(cmd, &cfg, &format!("{cmd}_a"), &[]), 0, "{cmd}");
        assert_eq!(run.exec(cmd, &cfg, &format!("{cmd}_b"), &["--jobs", "1"]), 0, "{cmd}");
        let files: Vec<String> = std::fs::read_dir(run.dir.path().join(format!("{cmd}_a")))
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        assert_eq!(files.len(), 2);
        for f in files {
            assert_eq!(run.read(&format!("{cmd}_a/{f}")), run.read(&format!("{cmd}_b/{f}")), "{cmd}/{f}");
        }
    }
}
