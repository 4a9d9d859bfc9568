use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_recoherence"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn last_comment_value(csv: &str, key: &str) -> f64 {
    csv.lines()
        .filter_map(|l| l.strip_prefix(&format!("# {key}=")))
        .next_back()
        .unwrap_or_else(|| panic!("no {key} in output"))
        .parse()
        .unwrap()
}

#[test]
fn defaults_run_without_config() {
    let o = run(&["sieve"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# config_sha256="));
    assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 6);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "[model]\nn = 0\n");
    assert_eq!(run(&["sieve", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    let typo = write(dir.path(), "typo.toml", "[model]\nnn = 3\n");
    assert_eq!(run(&["sieve", "--config", typo.to_str().unwrap()]).status.code(), Some(2));
    let kind = write(dir.path(), "kind.toml", "[experiment]\nkind = \"lgi\"\n");
    assert_eq!(run(&["sieve", "--config", kind.to_str().unwrap()]).status.code(), Some(2));
    let off_grid = write(dir.path(), "off.toml", "[experiment]\ngamma_t_star = 2.01\n");
    let o = run(&["recohere", "--config", off_grid.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not on the time grid"));
    let missing = dir.path().join("missing.toml");
    assert_eq!(run(&["sieve", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn unknown_operator_lists_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "q.toml", "[experiment]\noperators = [\"sx\", \"hadamard\"]\n");
    let o = run(&["qrt", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for name in ["I", "sx", "sy", "sz", "flip", "phase", "kraus:PATH"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn io_errors_exit_1() {
    let o = run(&["lgi", "--out", "/nonexistent-dir/out.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent-dir/out.csv"));
}

#[test]
fn certifier_exit_codes() {
    assert_eq!(run(&["certify"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[certify]\ncontrols = [\"identity\"]\nepsilon = 0.5\n");
    let o = run(&["certify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["witness"].is_null());
    let always = write(dir.path(), "e.toml", "[certify]\nepsilon = 1.0\n");
    assert_eq!(run(&["certify", "--config", always.to_str().unwrap()]).status.code(), Some(0));
    let bad = write(dir.path(), "p.toml", "[certify]\nprojectors = \"w\"\n");
    assert_eq!(run(&["certify", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn kraus_file_channels() {
    let dir = tempfile::tempdir().unwrap();
    // amplitude damping with p = 0.5
    let h = 0.5f64.sqrt();
    let kraus = format!("[[[[1,0],[0,0]],[[0,0],[{h},0]]], [[[0,0],[{h},0]],[[0,0],[0,0]]]]");
    write(dir.path(), "damp.json", &kraus);
    let cfg = write(dir.path(), "k.toml", "[experiment]\nchannels = [\"kraus:damp.json\"]\n");
    let o = run(&["qrt", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["interventions"][0]["channel"], "kraus:damp.json");
    // not completely positive trace-nonincreasing
    write(dir.path(), "big.json", "[[[[2,0],[0,0]],[[0,0],[2,0]]]]");
    let bad = write(dir.path(), "b.toml", "[experiment]\nchannels = [\"kraus:big.json\"]\n");
    assert_eq!(run(&["qrt", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn out_file_and_config_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lgi.csv");
    let o = run(&["lgi", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().contains("k3"));
    let cfg = write(dir.path(), "o.toml", "[output]\npath = \"from_config.csv\"\n");
    assert_eq!(run(&["lgi", "--config", cfg.to_str().unwrap()]).status.code(), Some(0));
    assert!(dir.path().join("from_config.csv").exists());
}

#[test]
fn bits_are_nats_over_ln2() {
    let parse = |text: &str| -> Vec<f64> {
        text.lines().filter(|l| !l.starts_with('#')).nth(20).unwrap().split(',').map(|c| c.parse().unwrap()).collect()
    };
    let nats = parse(&stdout(&run(&["sieve"])));
    let bits = parse(&stdout(&run(&["sieve", "--units", "bits"])));
    assert!((bits[5] - nats[5] / std::f64::consts::LN_2).abs() < 1e-15);
}

#[test]
fn dichotomic_oracle_columns_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "d.toml",
        "[model]\nkind = \"dichotomic\"\nn = 4\ng = [0.5, 1.0, 1.5, 0.7]\np_plus = 0.3\n\n\
         [experiment]\ntimes = { start = 0.0, stop = 3.0, count = 13 }\nt_star = 1.0\n",
    );
    let c = cfg.to_str().unwrap();
    for exp in ["sieve", "recohere", "darwinism", "lgi"] {
        let o = run(&[exp, "--config", c, "--oracle", "dichotomic"]);
        assert_eq!(o.status.code(), Some(0), "{exp}: {}", String::from_utf8_lossy(&o.stderr));
        let dev = last_comment_value(&stdout(&o), "max_oracle_deviation");
        assert!(dev < 1e-12, "{exp}: {dev}");
    }
    let o = run(&["histories", "--config", c, "--oracle", "dichotomic"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["max_oracle_deviation"].as_f64().unwrap() < 1e-12);
    let o = run(&["certify", "--config", c, "--oracle", "dichotomic"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let w = &v["witness"];
    assert!((w["distance"].as_f64().unwrap() - w["oracle_distance"].as_f64().unwrap()).abs() < 1e-10);
    // qrt needs a rate, which dichotomic models lack
    assert_eq!(run(&["qrt", "--config", c]).status.code(), Some(2));
}

#[test]
fn oracle_mode_mismatch_is_a_config_error() {
    assert_eq!(run(&["sieve", "--oracle", "dichotomic"]).status.code(), Some(2));
    assert_eq!(run(&["sieve", "--oracle", "grid"]).status.code(), Some(2));
}

#[test]
fn grid_oracle_for_a_single_lorentzian() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "g.toml",
        "[model]\nn = 1\n\n[experiment]\ntimes = { start = 0.0, stop = 3.0, count = 7 }\ngamma_t_star = 1.0\n",
    );
    let o = run(&["recohere", "--config", cfg.to_str().unwrap(), "--oracle", "grid"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(last_comment_value(&stdout(&o), "max_oracle_deviation") < 1e-3);
}

#[test]
fn recohere_per_n_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "n.toml", "[experiment]\nn_values = [1, 10]\n");
    let text = stdout(&run(&["recohere", "--config", cfg.to_str().unwrap()]));
    let header = text.lines().nth(1).unwrap();
    assert!(header.ends_with("sx_with_control_n1,sx_without_control_n1,sx_with_control_n10,sx_without_control_n10"));
    // raw-t curves: N = 10 at t equals N = 5 at 2t (column order in header)
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    let (t5, t10) = (&rows[20], &rows[10]);
    assert!((t5[3] - t10[7]).abs() < 1e-12);
}

#[test]
fn shipped_configs_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let stem = path.file_stem().unwrap().to_str().unwrap().to_string();
        let exp = stem.split('_').next().unwrap();
        let mut args = vec![exp, "--config", path.to_str().unwrap()];
        if stem.ends_with("dichotomic") {
            args.extend(["--oracle", "dichotomic"]);
        }
        let o = run(&args);
        assert!(matches!(o.status.code(), Some(0 | 3)), "{stem}: {}", String::from_utf8_lossy(&o.stderr));
        seen += 1;
    }
    assert!(seen >= 4);
}
