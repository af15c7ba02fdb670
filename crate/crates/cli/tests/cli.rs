use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sbd_core::eig::dense_spectrum;
use sbd_core::hammat::{read_mtx, realize, QubitHamiltonian};
use sbd_core::linalg::diag;

fn sbd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbd"))
        .args(args)
        .env("RUST_LOG", "warn")
        .env_remove("SBD_SEED")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = sbd(args);
    assert!(
        out.status.success(),
        "sbd {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in {line:?}"))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_diag_mtx(path: &Path, values: &[f64]) {
    let mut text = format!("%%MatrixMarket matrix coordinate real symmetric\n{0} {0} {0}\n", values.len());
    for (i, v) in values.iter().enumerate() {
        text.push_str(&format!("{} {} {v}\n", i + 1, i + 1));
    }
    fs::write(path, text).unwrap();
}

#[test]
fn depth_one_halves_a_sixteen_dim_input() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("t4.json");
    let art = dir.path().join("a.json");
    ok(&["gen", "--model", "tfim", "--qubits", "4", "--out", p(&h)]);
    let line = ok(&["compress", p(&h), "--depth", "1", "--out", p(&art)]);
    assert_eq!(field(&line, "original_dim"), "16");
    assert_eq!(field(&line, "block_dim"), "8");
    let artifact: serde_json::Value = serde_json::from_str(&fs::read_to_string(&art).unwrap()).unwrap();
    assert_eq!(artifact["format"], "sbd-v1");
    assert_eq!(artifact["block"]["rows"], 8);
}

#[test]
fn target_percent_ninety_needs_four_applications() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("t5.json");
    let art = dir.path().join("a.json");
    ok(&["gen", "--model", "tfim", "--qubits", "5", "--out", p(&h)]);
    let line = ok(&["compress", p(&h), "--target-percent", "90", "--out", p(&art)]);
    assert_eq!(field(&line, "depth"), "4");
    assert_eq!(field(&line, "compression_percent"), "93.75");
    assert_eq!(field(&line, "block_dim"), "2");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("c.mtx");
    ok(&["gen", "--model", "commuting", "--dim", "32", "--seed", "4", "--out", p(&h)]);
    let mut artifacts = Vec::new();
    let mut lines = Vec::new();
    for i in 0..2 {
        let art = dir.path().join(format!("a{i}.json"));
        ok(&["compress", p(&h), "--depth", "2", "--out", p(&art)]);
        artifacts.push(fs::read(&art).unwrap());
        lines.push(ok(&["eig", p(&art), "--method", "vqe", "--seed", "11"]));
    }
    assert_eq!(artifacts[0], artifacts[1]);
    assert_eq!(lines[0], lines[1]);
}

#[test]
fn eig_on_depth_one_artifacts_recovers_the_ground_state() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.mtx");
    write_diag_mtx(&d, &[0.5, -3.25, 2.0, 1.0, -0.75, 4.0, 0.0, -1.5]);
    let c = dir.path().join("c.mtx");
    ok(&["gen", "--model", "commuting", "--dim", "16", "--seed", "2", "--out", p(&c)]);
    let commuting_ground = dense_spectrum(&read_mtx(&c).unwrap().to_dense()).unwrap()[0];

    for (input, ground) in [(&d, -3.25), (&c, commuting_ground)] {
        let art = dir.path().join("art.json");
        ok(&["compress", p(input), "--depth", "1", "--out", p(&art)]);
        for method in ["dense", "krylov"] {
            let line = ok(&["eig", p(&art), "--method", method]);
            let e: f64 = field(&line, "energy").parse().unwrap();
            assert!((e - ground).abs() < 1e-5, "{method}: {e} vs {ground}");
        }
        let raw = ok(&["eig", p(input), "--method", "dense"]);
        let e: f64 = field(&raw, "energy").parse().unwrap();
        assert!((e - ground).abs() < 1e-10);
    }
}

#[test]
fn generated_two_site_ising_is_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("t2.json");
    let line = ok(&["gen", "--model", "tfim", "--qubits", "2", "--coupling", "1", "--field", "0", "--out", p(&h)]);
    assert_eq!(field(&line, "seed"), "0");
    let ham = QubitHamiltonian::load(&h).unwrap();
    assert_eq!(ham.provenance.as_ref().unwrap()["seed"], 0);
    assert_eq!(realize(&ham).unwrap().to_dense(), diag(&[-1.0, 1.0, 1.0, -1.0]));
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("r.mtx");
    let out = Command::new(env!("CARGO_BIN_EXE_sbd"))
        .args(["gen", "--model", "randherm", "--dim", "4", "--out", p(&h)])
        .env("SBD_SEED", "17")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(field(&String::from_utf8(out.stdout).unwrap(), "seed"), "17");
    assert!(fs::read_to_string(&h).unwrap().contains("seed=17"));
}

#[test]
fn sqrt_check_reports_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.mtx");
    write_diag_mtx(&d, &[1.0, 2.0, 3.0, 4.0]);
    let line = ok(&["sqrt-check", p(&d)]);
    assert_eq!(field(&line, "dim"), "2");
    assert_eq!(field(&line, "fallback"), "false");
    let r: f64 = field(&line, "residual").parse().unwrap();
    assert!(r < 1e-6);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sbd(&["eig", "x.json", "--no-such-flag"]).status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    assert_eq!(sbd(&["eig", p(&bad)]).status.code(), Some(2));
    let out = dir.path().join("o.json");
    assert_eq!(
        sbd(&["gen", "--model", "commuting", "--dim", "6", "--out", p(&out)]).status.code(),
        Some(2)
    );

    let h = dir.path().join("t2.json");
    ok(&["gen", "--model", "tfim", "--qubits", "2", "--out", p(&h)]);
    assert_eq!(sbd(&["compress", p(&h), "--depth", "3", "--out", p(&out)]).status.code(), Some(3));

    let manifest = dir.path().join("m.json");
    fs::write(
        &manifest,
        r#"[{"hamiltonian_label":"a","source":"t2.json","eigensolver":"krylov","depth":1},
           {"hamiltonian_label":"b","source":"missing.json","eigensolver":"krylov","depth":1}]"#,
    )
    .unwrap();
    let rank = sbd(&["rank", p(&manifest), "--out", p(&dir.path().join("r"))]);
    assert_eq!(rank.status.code(), Some(4));
}

#[test]
fn rank_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    for (name, field_strength) in [("weak", "0.5"), ("strong", "1.5")] {
        let h = dir.path().join(format!("{name}.json"));
        ok(&["gen", "--model", "tfim", "--qubits", "4", "--field", field_strength, "--out", p(&h)]);
    }
    let mut specs = Vec::new();
    for solver in ["dense", "krylov"] {
        for depth in [0, 1] {
            for name in ["weak", "strong"] {
                specs.push(format!(
                    r#"{{"hamiltonian_label":"{name}","source":"{name}.json","eigensolver":"{solver}","depth":{depth}}}"#
                ));
            }
        }
    }
    let manifest = dir.path().join("m.json");
    fs::write(&manifest, format!("[{}]", specs.join(","))).unwrap();
    let out_dir = dir.path().join("out");
    let line = ok(&["rank", p(&manifest), "--out", p(&out_dir)]);
    assert_eq!(field(&line, "models"), "4");
    assert_eq!(field(&line, "reference"), "dense-d0");
    assert_eq!(field(&line, "match_rate"), "1");
    let ranking = fs::read_to_string(out_dir.join("ranking.csv")).unwrap();
    assert_eq!(ranking.lines().next(), Some("model,rank_1,rank_2"));
    assert!(ranking.contains("dense-d0,strong,weak"));
    for f in ["results.csv", "ground_states.dat", "errors.dat", "ranking.dat"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
}

#[test]
fn bench_writes_speed_tables() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("t4.json");
    ok(&["gen", "--model", "tfim", "--qubits", "4", "--out", p(&h)]);
    let specs: Vec<String> = (0..3)
        .map(|d| {
            format!(
                r#"{{"hamiltonian_label":"t4","source":"t4.json","eigensolver":"vqe","depth":{d},"overrides":{{"vqe_max_iters":20,"vqe_restarts":1}}}}"#
            )
        })
        .collect();
    let manifest = dir.path().join("m.json");
    fs::write(&manifest, format!("[{}]", specs.join(","))).unwrap();
    let out_dir = dir.path().join("speed");
    let line = ok(&["bench", p(&manifest), "--out", p(&out_dir)]);
    assert_eq!(field(&line, "models"), "3");
    assert_eq!(field(&line, "failed"), "0");
    assert!(field(&line, "fit_b").parse::<f64>().is_ok());
    let csv = fs::read_to_string(out_dir.join("speed.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().nth(1).unwrap().starts_with("vqe-d0,t4,vqe,0,"));
    assert!(fs::read_to_string(out_dir.join("speed.dat")).unwrap().contains("# fit speed = a*exp(b*depth)"));

    let missing_ref = sbd(&["bench", p(&manifest), "--out", p(&out_dir), "--reference", "dense-d0"]);
    assert_eq!(missing_ref.status.code(), Some(4));
}
