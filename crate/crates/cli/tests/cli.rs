use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn symquot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symquot"))
        .args(args)
        .env_remove("SYMQUOT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data/lj_fixture.xyz")
        .to_string_lossy()
        .into_owned()
}

#[test]
fn rarity_values() {
    let o = symquot(&["rarity", "capacity", "--n", "4", "--k", "2", "--d", "14"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("capacity,4,14,2,,6,13,"));
    let o = symquot(&["rarity", "shape", "--n", "3", "--d", "3"]);
    assert!(stdout(&o).contains(",1,32,0.03125,"));
    let o = symquot(&["rarity", "involutions", "--n", "4"]);
    assert!(stdout(&o).contains("involutions,4,,,,10,1,"));
    let o = symquot(&["rarity", "stratum", "--partition", "2,1,1"]);
    assert!(stdout(&o).contains("\"2,1,1\",1,2,0.5,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.xyz");
    std::fs::write(&empty, "\n").unwrap();
    let o = symquot(&["lj", "analyze", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no configuration blocks"));

    let bad = dir.path().join("bad.xyz");
    std::fs::write(&bad, "2\nc\n0 0 0\n1 x 0\n").unwrap();
    let o = symquot(&["lj", "analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));

    assert_eq!(symquot(&["profile", "--bogus"]).status.code(), Some(1));
    assert_eq!(symquot(&["realroots", "--trials", "10"]).status.code(), Some(1));

    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"schema_version": 1, "unknown_key": 3}"#).unwrap();
    let o = symquot(&["profile", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::write(&cfg, r#"{"schema_version": 9}"#).unwrap();
    let o = symquot(&["profile", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    // two particles on top of each other
    let clash = dir.path().join("clash.xyz");
    std::fs::write(&clash, "2\nc\n0 0 0\n0 0 0\n").unwrap();
    let o = symquot(&["lj", "analyze", clash.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    assert_eq!(symquot(&["--help"]).status.code(), Some(0));
}

fn manifest_checks(dir: &Path) -> serde_json::Value {
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["schema_version"], 1);
    for a in m["artifacts"].as_array().unwrap() {
        let bytes = std::fs::read(dir.join(a["file"].as_str().unwrap())).unwrap();
        assert_eq!(a["bytes"].as_u64().unwrap() as usize, bytes.len());
        assert_eq!(a["sha256"].as_str().unwrap(), format!("{:x}", Sha256::digest(&bytes)));
    }
    m
}

#[test]
fn profile_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let base = ["profile", "--n", "3", "--degree", "3", "--coercive", "auto", "--count", "12", "--starts", "60", "--seed", "5"];
    let mut args_a = base.to_vec();
    args_a.extend(["--jobs", "1", "--out", a.to_str().unwrap()]);
    let mut args_b = base.to_vec();
    args_b.extend(["--jobs", "3", "--out", b.to_str().unwrap()]);
    let (oa, ob) = (symquot(&args_a), symquot(&args_b));
    assert!(oa.status.success(), "{}", String::from_utf8_lossy(&oa.stderr));
    assert_eq!(oa.stdout, ob.stdout);
    let (ma, mb) = (manifest_checks(&a), manifest_checks(&b));
    assert_eq!(ma, mb);
    assert_eq!(ma["config"]["seed"], 5);
    assert_eq!(ma["config"]["count"], 12);
    for f in ["summary.json", "profile.csv", "points.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"schema_version": 1, "degrees": [2, 3], "ensembles": ["kac"], "trials": 1000, "seed": 9}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = symquot(&["realroots", "--config", cfg.to_str().unwrap(), "--seed", "4", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let m = manifest_checks(&out);
    assert_eq!(m["config"]["seed"], 4);
    assert_eq!(m["config"]["degrees"], serde_json::json!([2, 3]));
    assert_eq!(stdout(&o).lines().count(), 3);

    let env = Command::new(env!("CARGO_BIN_EXE_symquot"))
        .args(["realroots", "--degrees", "2", "--ensemble", "kac", "--trials", "1000"])
        .env("SYMQUOT_SEED", "4")
        .output()
        .unwrap();
    let flag = symquot(&["realroots", "--degrees", "2", "--ensemble", "kac", "--trials", "1000", "--seed", "4"]);
    assert_eq!(env.stdout, flag.stdout);
}

#[test]
fn lj_analyze_fixture() {
    let o = symquot(&["lj", "analyze", &fixture(), "--window", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let first = text.lines().nth(1).unwrap();
    assert!(first.starts_with("0,-11.0817"), "{first}");
    assert!(first.contains(",120,true,"));
}

#[test]
fn dive_energies_follow_the_leading_term() {
    let o = symquot(&["lj", "dive", "--rho", "0.1,0.05"]);
    assert!(o.status.success());
    for line in stdout(&o).lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        assert!((f[1] / f[3] - 1.0).abs() < 1e-4, "{line}");
        assert_eq!(f[2], 0.0);
    }
}
