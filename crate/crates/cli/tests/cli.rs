use std::path::Path;
use std::process::Command;

fn rankcap() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rankcap"))
}

const ESTIMATE: &str = r#"{
    "network": {"dims": [4, 3], "rank_caps": [2], "spectral_caps": [1.0], "activation": {"kind": "identity"}},
    "data": {"m": 12, "d": 4, "R": 1.0, "seed": 3},
    "optimizer": {"step_size": 1.0, "iterations": 10, "restarts": 2},
    "n_draws": 5
}"#;

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn estimate_twice_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", ESTIMATE);
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "8"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}.csv"));
        let status = rankcap()
            .args(["estimate", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .args(["--draws", "7", "--seed", "7", "--quiet"])
            .env("RANKCAP_THREADS", threads)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        assert!(status.stdout.is_empty());
        outputs.push(std::fs::read_to_string(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0].lines().count(), 1 + 7);
    assert!(outputs[0].starts_with("draw,value,"));
}

#[test]
fn missing_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = rankcap()
        .args(["estimate", "--config"])
        .arg(dir.path().join("nope.json"))
        .arg("--out")
        .arg(dir.path().join("o.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn malformed_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &ESTIMATE.replace("\"seed\": 3", "\"seed\": 3, \"colour\": 1"));
    let out = rankcap()
        .args(["estimate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("o.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("data.colour"));
}

#[test]
fn bounds_on_serialized_weights() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{
        "network": {"dims": [2, 2, 1], "rank_caps": [2, 1], "spectral_caps": [3.0, 2.0],
                    "activation": {"kind": "relu"},
                    "weights": [[2.0, 0.0, 0.0, 1.0], [1.0, 1.0]]},
        "data": {"m": 10, "d": 2, "R": 1.0, "seed": 0},
        "optimizer": {"step_size": 0.5, "iterations": 5, "restarts": 1},
        "n_draws": 3
    }"#;
    let cfg = write(dir.path(), "c.json", cfg);
    let csv = dir.path().join("b.csv");
    let out = rankcap().args(["bounds", "--config"]).arg(&cfg).arg("--out").arg(&csv).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 1);
    assert!(stdout.contains("mode=\"measured\""));
    let text = std::fs::read_to_string(&csv).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "bound,value,C1,C2,c,delta,lipschitz,L,m,r_max,h_max,prod_B,R,normalized,digest,config_digest"
    );
    assert!(text.lines().any(|l| l.starts_with("collapse,")));
    assert!(Path::new(&format!("{}.json", csv.display())).exists());
    let golowich = text.lines().find(|l| l.starts_with("golowich,")).unwrap();
    let value: f64 = golowich.split(',').nth(1).unwrap().parse().unwrap();
    let r: f64 = golowich.split(',').nth(12).unwrap().parse().unwrap();
    // R √2 ‖W₁‖_F ‖W₂‖_F / √m with ‖W₁‖_F = √5, ‖W₂‖_F = √2
    assert!((value - r * 2f64.sqrt() * 5f64.sqrt() * 2f64.sqrt() / 10f64.sqrt()).abs() < 1e-12);
}

#[test]
fn kind_mismatch_and_missing_output_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &ESTIMATE.replacen('{', "{\"kind\": \"gap\",", 1));
    let out = rankcap().args(["estimate", "--config"]).arg(&cfg).arg("--out").arg(dir.path().join("o.csv")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let cfg = write(dir.path(), "d.json", ESTIMATE);
    let out = rankcap().args(["estimate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
