use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lie_expand(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lie-expand"));
    cmd.args(args);
    match threads {
        Some(n) => cmd.env("LIE_EXPAND_THREADS", n),
        None => cmd.env_remove("LIE_EXPAND_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn scenario_runs_write_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ap");
    let o = lie_expand(&["nongrowth-ap", "--kappa", "1/2", "--delta", "2^-10", "--out", path(&out)], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["report.json", "metrics.csv", "quotient_profiles.csv", "quotient_profiles.svg", "ratio.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["scenario"], "nongrowth-ap");
    assert_eq!(report["complete"], true);
    assert_eq!(report["config"]["kappa"], 0.5);
    let ratio = report["metrics"].as_array().unwrap().iter().find(|m| m["name"] == "ratio").unwrap()["value"].as_f64().unwrap();
    assert!(ratio <= 10.0);

    let only_csv = dir.path().join("csv");
    let o = lie_expand(&["synth-word", "--ell", "3", "--out", path(&only_csv), "--emit", "csv"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(only_csv.join("metrics.csv").exists());
    assert!(!only_csv.join("report.json").exists());
}

#[test]
fn metric_tables_do_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut tables = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(threads);
        let o = lie_expand(&["growth-su2", "--points", "60", "--seed", "5", "--out", path(&out)], Some(threads));
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        tables.push((fs::read(out.join("metrics.csv")).unwrap(), fs::read(out.join("power_growth.csv")).unwrap()));
    }
    assert_eq!(tables[0], tables[1]);
    let o = lie_expand(&["growth-su2", "--out", path(dir.path())], Some("zero"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    // Parameter outside the scenario schema.
    assert_eq!(lie_expand(&["synth-word", "--kappa", "0.5", "--out", out], None).status.code(), Some(2));
    // Invalid value.
    assert_eq!(lie_expand(&["nongrowth-ap", "--kappa", "2", "--out", out], None).status.code(), Some(2));
    // Missing output directory.
    assert_eq!(lie_expand(&["synth-word"], None).status.code(), Some(2));
    // Budget exhaustion still writes the partial report.
    let capped = dir.path().join("capped");
    let o = lie_expand(&["growth-su2", "--points", "30", "--max-points", "100", "--out", path(&capped)], None);
    assert_eq!(o.status.code(), Some(3));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(capped.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["complete"], false);
    assert!(report["truncated"].as_array().unwrap().iter().any(|t| t == "A^3"));
}

#[test]
fn config_files_and_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for kappa in ["0.25", "0.75"] {
        let cfg = dir.path().join(format!("{kappa}.json"));
        let out = dir.path().join(format!("run{kappa}"));
        fs::write(&cfg, format!(r#"{{"scenario": "nongrowth-ap", "params": {{"kappa": {kappa}, "delta": 0.0009765625}}}}"#)).unwrap();
        let o = lie_expand(&["run", "--config", path(&cfg), "--out", path(&out)], None);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        reports.push(out.join("report.json"));
    }
    let table = dir.path().join("cmp.csv");
    let mut args = vec!["compare", "--out", path(&table)];
    args.extend(reports.iter().map(|p| path(p)));
    assert_eq!(lie_expand(&args, None).status.code(), Some(0));
    let text = fs::read_to_string(&table).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().next().unwrap().contains("ratio"));

    // A config naming another scenario is rejected.
    let cfg = dir.path().join("0.25.json");
    assert_eq!(lie_expand(&["synth-word", "--config", path(&cfg), "--out", path(dir.path())], None).status.code(), Some(2));
    assert_ne!(lie_expand(&["compare"], None).status.code(), Some(0));
}

#[test]
fn construct_ap_writes_the_set_and_its_hypotheses() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("heis");
    let args = ["construct-ap", "--d", "2", "--backend", "heis3", "--delta", "2^-4", "--r", "0.5", "--out", path(&out)];
    let o = lie_expand(&args, None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let set = lie_expand::delta_sets::DeltaSet::read_from(std::io::BufReader::new(fs::File::open(out.join("set.txt")).unwrap())).unwrap();
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("hypotheses.json")).unwrap()).unwrap();
    assert_eq!(report["backend"], "heis3");
    assert_eq!(report["report"]["points"].as_u64(), Some(set.len()));
    let quotients: Vec<&str> =
        report["report"]["quotients"].as_array().unwrap().iter().map(|q| q["subgroup"].as_str().unwrap()).collect();
    assert!(quotients.contains(&"center"));

    let o = lie_expand(&["construct-ap", "--d", "2", "--backend", "su2", "--out", path(&out)], None);
    assert_eq!(o.status.code(), Some(2));
    let o = lie_expand(&["nongrowth", "--out", path(&dir.path().join("alias"))], None);
    assert_eq!(o.status.code(), Some(0));
}
