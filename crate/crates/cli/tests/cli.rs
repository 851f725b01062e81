use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ncfa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncfa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth(dir: &Path, n: &str, density: &str) {
    let out = ncfa(&["synth", "--n", n, "--density", density, "--samples", "600", "--seed", "4", "--out", p(dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn synth_then_fit_then_metrics() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().join("s");
    let f = tmp.path().join("f");
    synth(&s, "6", "0.4");
    for name in ["truth.json", "udg.json", "mcm.json", "data.csv"] {
        assert!(s.join(name).exists(), "{name}");
    }
    let data = s.join("data.csv");
    let truth = s.join("truth.json");
    let out = ncfa(&["fit", "--data", p(&data), "--truth", p(&truth), "--epochs", "3", "--seed", "2", "--out", p(&f)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["udg.json", "mcm.json", "ncfa.json", "model.json", "trace.csv", "report.json"] {
        assert!(f.join(name).exists(), "{name}");
    }
    let trace = fs::read_to_string(f.join("trace.csv")).unwrap();
    assert!(trace.starts_with("epoch,train_loss,val_loss\n"));
    assert_eq!(trace.lines().count(), 4);

    let out = ncfa(&["metrics", p(&truth), p(&f.join("mcm.json"))]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["sfd"].is_u64() && v["shd"].is_u64());

    let out = ncfa(&["metrics", p(&s.join("udg.json")), p(&s.join("udg.json"))]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["shd"], 0);
    assert!(v["sfd"].is_null());
}

#[test]
fn fit_is_byte_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().join("s");
    synth(&s, "5", "0.5");
    let data = s.join("data.csv");
    let runs: Vec<_> = (0..2).map(|i| tmp.path().join(format!("run{i}"))).collect();
    for r in &runs {
        let out = ncfa(&["fit", "--data", p(&data), "--epochs", "4", "--seed", "9", "--out", p(r)]);
        assert!(out.status.success());
    }
    for name in ["report.json", "model.json", "trace.csv"] {
        assert_eq!(fs::read(runs[0].join(name)).unwrap(), fs::read(runs[1].join(name)).unwrap(), "{name}");
    }
}

#[test]
fn discover_and_ecc() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().join("s");
    synth(&s, "6", "0.3");
    let d = tmp.path().join("d");
    let out = ncfa(&["discover", "--data", p(&s.join("data.csv")), "--test", "xi", "--out", p(&d)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(d.join("udg.json").exists() && d.join("tests.json").exists());

    let udg = tmp.path().join("oct.json");
    fs::write(
        &udg,
        r#"{"n":6,"edges":[[0,1],[0,2],[0,4],[0,5],[1,2],[1,3],[1,5],[2,3],[2,4],[3,4],[3,5],[4,5]]}"#,
    )
    .unwrap();
    let out = ncfa(&["ecc", p(&udg), "--solver", "exact", "--enumerate"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["minimum_covers_found"], 2);
    assert_eq!(v["cover"]["cliques"].as_array().map(Vec::len), Some(4));
}

#[test]
fn baseline_writes_model_and_trace() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().join("s");
    synth(&s, "4", "0.5");
    let b = tmp.path().join("b");
    let out = ncfa(&["baseline", "--data", p(&s.join("data.csv")), "--lambda", "3", "--epochs", "2", "--out", p(&b)]);
    assert!(out.status.success());
    let model: serde_json::Value = serde_json::from_str(&fs::read_to_string(b.join("model.json")).unwrap()).unwrap();
    assert_eq!(model["mask"], serde_json::json!([[1, 1, 1], [1, 1, 1], [1, 1, 1], [1, 1, 1]]));
}

#[test]
fn sweep_writes_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("sw");
    let out = ncfa(&[
        "sweep", "--n", "5", "--densities", "0.2,0.6", "--graphs", "1", "--datasets", "2",
        "--samples", "200", "--epochs", "1", "--out", p(&out_dir),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(out_dir.join("runs.csv")).unwrap().lines().count(), 5);
    assert_eq!(fs::read_to_string(out_dir.join("summary.csv")).unwrap().lines().count(), 3);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ncfa(&["fit", "--data", p(&tmp.path().join("missing.csv")), "--out", p(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));

    let out = ncfa(&["fit", "--data", "x.csv", "--test", "pearson", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2));

    let s = tmp.path().join("s");
    synth(&s, "6", "0.5");
    let out = ncfa(&["ecc", p(&s.join("udg.json")), "--solver", "exact", "--exact-cap", "4"]);
    assert_eq!(out.status.code(), Some(3));

    let out = ncfa(&["fit", "--data", p(&s.join("data.csv")), "--lr", "1e300", "--epochs", "2", "--out", p(&tmp.path().join("f"))]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));

    let out = ncfa(&["fit", "--data", p(&s.join("data.csv")), "--split", "1.5", "--out", p(&tmp.path().join("g"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn headerless_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("d.csv");
    let rows: String = (0..40).map(|i| format!("{},{},{}\n", i, (i * 7) % 13, (i * i) % 17)).collect();
    fs::write(&csv, rows).unwrap();
    let out = ncfa(&["discover", "--data", p(&csv), "--no-header"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n"], 3);
}
