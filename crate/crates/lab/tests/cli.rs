use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_calderon-lab"))
        .args(args)
        .env_remove("RAYON_NUM_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn sweep_reruns_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "s.toml", "kind = \"sweep-1d\"\nq = [[1.0, 0.0]]\nb0 = 0.0\npoints_per_side = 4\n");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let o = lab(&["sweep-1d", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "7"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let first = fs::read(a.join("sweep_1d.csv")).unwrap();
    assert_eq!(first, fs::read(b.join("sweep_1d.csv")).unwrap());
    let text = String::from_utf8(first).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# kind = sweep-1d, seed = 7"));
    assert_eq!(lines.next(), Some("step,b,distance,coefficient_distance,gap,projector_distance,estimate"));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 7);
    assert_eq!(summary["pass"], true);
    for a in summary["assertions"].as_array().unwrap() {
        assert!(a.get("lhs").is_some() && a.get("rhs").is_some() && a.get("slack").is_some());
    }
    let svg = fs::read_to_string(a.join("sweep_1d_projector_distance.svg")).unwrap();
    assert!(svg.contains("seed = 7"));
}

#[test]
fn disk_crossing_columns_and_pass() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "d.toml", "K = 6\ngrid = [-0.01, -1e-4, 0.0, 1e-4, 0.01]\n");
    let out = tmp.path().join("out");
    let o = lab(&["disk-crossing", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "3", "--log-y"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("disk_crossing.csv")).unwrap();
    assert_eq!(text.lines().nth(1), Some("b,s,norm_distance,gap,pole_mode_flag"));
    assert_eq!(text.lines().count(), 2 + 5 * 3);
    assert!(out.join("disk_crossing_norm.svg").exists());
}

#[test]
fn malformed_config_reports_line_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.toml", "K = 4\ns_list = [0.0,\n");
    let out = tmp.path().join("out");
    let o = lab(&["disk-crossing", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line"), "{err}");
    assert!(!out.exists());

    let cfg = write(tmp.path(), "typo.toml", "K = 4\nradius = 0.1\n");
    let o = lab(&["disk-crossing", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("radius") && err.contains("line 2"), "{err}");
    assert!(!out.exists());
}

#[test]
fn failed_assertion_gives_nonzero_exit_with_outputs() {
    // one halving cannot shrink the distance by the required factor
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "s.toml", "steps = [0.1, 0.05]\npoints_per_side = 2\n");
    let out = tmp.path().join("out");
    let o = lab(&["sweep-1d", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("refinement_factor"));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], false);
    assert_eq!(summary["seed"], 1);
}

#[test]
fn precondition_failure_is_reported_verbatim() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "d.toml", "mode = 0\nbracket = [1.0, 2.0]\nK = 2\n");
    let out = tmp.path().join("out");
    let o = lab(&["disk-crossing", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
    assert!(!out.exists());
}

#[test]
fn small_labs_run() {
    let tmp = tempfile::tempdir().unwrap();
    let sub = write(tmp.path(), "sub.toml", "idempotents = 30\nprojector_pairs = 30\n");
    let sc = write(tmp.path(), "sc.toml", "operators = 20\nk_max = 6\n");
    for (verb, cfg, table) in [("subspace-lab", &sub, "ort_identities.csv"), ("scale-lab", &sc, "scale_duality.csv")] {
        let out = tmp.path().join(verb);
        let o = lab(&[verb, "--config", cfg, "--out", out.to_str().unwrap(), "--seed", "11"]);
        assert!(o.status.success(), "{verb}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(fs::read_to_string(out.join(table)).unwrap().starts_with("# kind = "));
    }
}

#[test]
fn seed_changes_random_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "sc.toml", "operators = 5\nk_max = 3\n");
    let mut tables = Vec::new();
    for seed in ["1", "2"] {
        let out = tmp.path().join(seed);
        assert!(lab(&["scale-lab", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", seed]).status.success());
        let text = fs::read_to_string(out.join("scale_duality.csv")).unwrap();
        tables.push(text.lines().skip(1).collect::<Vec<_>>().join("\n"));
    }
    assert_ne!(tables[0], tables[1]);
}
