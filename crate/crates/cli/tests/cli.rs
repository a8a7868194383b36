use std::path::{Path, PathBuf};
use std::process::Command;

use fraisse_cli::{embed_into_chain, run_with_config, seed_collapses, Config, CONFIG_ENV};
use fraisse_core::builder::{check_u2_u3, run_builder, run_with, BuildConfig, TaskOrder};
use fraisse_core::funayama::fep_complete;
use fraisse_core::io::{export_hasse, serialize_chain, LatticeFile, PartialLatticeFile};
use fraisse_core::lab::find_n5_m3;
use fraisse_core::variety::VarietyTag;
use fraisse_core::FinLattice;
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.out).unwrap_or_else(|e| panic!("{e}: {}", self.out))
    }
}

fn fraisse_with(cfg: &Config, args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with_config(
        std::iter::once("fraisse").chain(args.iter().copied()),
        cfg,
        &mut out,
        &mut err,
    );
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn fraisse(args: &[&str]) -> Run {
    fraisse_with(&Config::default(), args)
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn lattice_file(dir: &TempDir, name: &str, l: &FinLattice) -> PathBuf {
    write(
        dir,
        name,
        &serde_json::to_string(&LatticeFile::of(l)).unwrap(),
    )
}

#[test]
fn build_writes_the_archive() {
    let r = fraisse(&["build", "--k", "3", "--budget", "10"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(
        r.out,
        serialize_chain(&run_builder(VarietyTag::Plain, 3, 10).unwrap().chain)
    );

    let dir = TempDir::new().unwrap();
    let path = dir.path().join("chain.json");
    let r = fraisse(&[
        "build",
        "--variety",
        "zero_one",
        "--k",
        "4",
        "--budget",
        "8",
        "--reverse",
        "--out",
        s(&path),
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    let mut cfg = BuildConfig::new(VarietyTag::ZeroOne, 4, 8);
    cfg.order = TaskOrder::Reverse;
    let direct = run_with(&cfg).unwrap().chain;
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        serialize_chain(&direct)
    );
    assert_eq!(r.json()["stages"], direct.len());
}

#[test]
fn builds_are_byte_identical() {
    let a = fraisse(&["build", "--k", "4", "--budget", "15"]);
    let b = fraisse(&["build", "--k", "4", "--budget", "15"]);
    assert_eq!(a.out, b.out);
}

#[test]
fn config_supplies_defaults_and_flags_win() {
    let cfg = Config {
        k: Some(3),
        budget: Some(5),
        ..Config::default()
    };
    let r = fraisse_with(&cfg, &["build"]);
    assert_eq!(
        r.out,
        serialize_chain(&run_builder(VarietyTag::Plain, 3, 5).unwrap().chain)
    );
    let r = fraisse_with(&cfg, &["build", "--budget", "7"]);
    assert_eq!(
        r.out,
        serialize_chain(&run_builder(VarietyTag::Plain, 3, 7).unwrap().chain)
    );
}

fn chain_file(dir: &TempDir, k: usize, budget: usize) -> PathBuf {
    write(
        dir,
        "chain.json",
        &serialize_chain(&run_builder(VarietyTag::Plain, k, budget).unwrap().chain),
    )
}

#[test]
fn check_reports_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let path = chain_file(&dir, 4, 30);
    let r = fraisse(&["check", "--chain", s(&path), "--u2u3"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let direct = check_u2_u3(&run_builder(VarietyTag::Plain, 4, 30).unwrap().chain, 4).unwrap();
    assert_eq!(r.json()["u2u3"], serde_json::to_value(&direct).unwrap());

    let r = fraisse(&["check", "--chain", s(&path)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.json()["unrealized"], 0);

    // a three-stage build cannot hold every lattice of size 4
    let short = write(
        &dir,
        "short.json",
        &serialize_chain(&run_builder(VarietyTag::Plain, 4, 3).unwrap().chain),
    );
    let r = fraisse(&["check", "--chain", s(&short), "--u2u3"]);
    assert_eq!(r.code, 2);
    let r = fraisse(&["check", "--chain", s(&path), "--u1", "--horizon", "1"]);
    assert_eq!(r.code, 2);
}

#[test]
fn embed_matches_the_library() {
    let dir = TempDir::new().unwrap();
    let path = chain_file(&dir, 5, 30);
    let chain = run_builder(VarietyTag::Plain, 5, 30).unwrap().chain;
    let src = lattice_file(&dir, "n5.json", &FinLattice::n5());
    let r = fraisse(&["embed", "--target", s(&path), "--source", s(&src)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let (e, stage) = embed_into_chain(&chain, FinLattice::n5()).unwrap().unwrap();
    assert_eq!(r.json()["map"], serde_json::to_value(&e.map).unwrap());
    assert_eq!(r.json()["stage"], stage);

    let big = lattice_file(&dir, "b3.json", &FinLattice::boolean(3));
    let r = fraisse(&["embed", "--target", s(&path), "--source", s(&big)]);
    let expected = if embed_into_chain(&chain, FinLattice::boolean(3))
        .unwrap()
        .is_some()
    {
        0
    } else {
        2
    };
    assert_eq!(r.code, expected);
}

#[test]
fn amalgamate_over_a_shared_chain() {
    let dir = TempDir::new().unwrap();
    let a = lattice_file(&dir, "a.json", &FinLattice::chain(2));
    let b1 = lattice_file(&dir, "b1.json", &FinLattice::n5());
    let b2 = lattice_file(&dir, "b2.json", &FinLattice::m3());
    for extra in [&[][..], &["--ideal"][..]] {
        let mut args = vec!["amalgamate", "--a", s(&a), "--b1", s(&b1), "--b2", s(&b2)];
        args.extend_from_slice(extra);
        let r = fraisse(&args);
        assert_eq!(r.code, 0, "{}", r.err);
        let v = r.json();
        assert_eq!(v["square_ok"], true);
        let d: LatticeFile = serde_json::from_value(v["d"].clone()).unwrap();
        let d = d.to_lattice().unwrap();
        assert!(find_n5_m3(&d).n5.is_some() && find_n5_m3(&d).m3.is_some());
    }
    // a leg that is not an embedding
    let r = fraisse(&[
        "amalgamate",
        "--a",
        s(&a),
        "--b1",
        s(&b1),
        "--b2",
        s(&b2),
        "--f1",
        "0,0",
    ]);
    assert_eq!(r.code, 1);
    assert!(r.err.starts_with("error:"));
}

#[test]
fn complete_matches_the_library() {
    let dir = TempDir::new().unwrap();
    let text = r#"{"n": 3, "order": [], "join": [[0, 1, 2]], "meet": []}"#;
    let path = write(&dir, "p.json", text);
    let r = fraisse(&["complete", "--partial-lattice-file", s(&path)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let direct = fep_complete(
        &PartialLatticeFile::parse(text)
            .unwrap()
            .to_partial()
            .unwrap(),
    )
    .unwrap();
    assert_eq!(
        r.json()["embed"],
        serde_json::to_value(&direct.embed).unwrap()
    );
    assert_eq!(r.json()["lattice"]["n"], direct.lattice.len());
}

#[test]
fn probes() {
    let dir = TempDir::new().unwrap();
    let path = chain_file(&dir, 5, 40);
    let r = fraisse(&["probe", "--n5m3", "--chain", s(&path)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.json()["n5"].is_object());
    let c3 = lattice_file(&dir, "c3.json", &FinLattice::chain(3));
    assert_eq!(fraisse(&["probe", "--n5m3", "--lattice", s(&c3)]).code, 2);

    let r = fraisse(&[
        "probe",
        "--interpolate",
        "--chain",
        s(&path),
        "--domain",
        "0,1",
        "--values",
        "0,1",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);

    let chain = run_builder(VarietyTag::Plain, 5, 40).unwrap().chain;
    let r = fraisse(&[
        "probe",
        "--simplicity",
        "--chain",
        s(&path),
        "--seed",
        "0,1",
        "--horizon",
        "40",
    ]);
    let direct = seed_collapses(&chain, &[0, 1], 40).unwrap();
    assert_eq!(r.json(), serde_json::to_value(&direct).unwrap());

    let r = fraisse(&["probe", "--join-reducible", "--chain", s(&path)]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("zero_one"), "{}", r.err);
    let z = write(
        &dir,
        "z.json",
        &serialize_chain(&run_builder(VarietyTag::ZeroOne, 4, 30).unwrap().chain),
    );
    let r = fraisse(&["probe", "--join-reducible", "--chain", s(&z)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.json()["outcome"], "found");

    let r = fraisse(&[
        "probe",
        "--intervals",
        "--chain",
        s(&path),
        "--left",
        "0,1",
        "--right",
        "0,2",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    let direct = fraisse_core::lab::interval_back_and_forth(&chain, (0, 1), (0, 2), 4).unwrap();
    assert_eq!(r.json(), serde_json::to_value(&direct).unwrap());
    assert_eq!(
        fraisse(&[
            "probe",
            "--intervals",
            "--chain",
            s(&path),
            "--left",
            "0",
            "--right",
            "0,2"
        ])
        .code,
        1
    );

    // one of the probe flags is required
    assert_eq!(fraisse(&["probe", "--chain", s(&path)]).code, 1);
}

#[test]
fn export_dot() {
    let dir = TempDir::new().unwrap();
    let path = chain_file(&dir, 3, 6);
    let chain = run_builder(VarietyTag::Plain, 3, 6).unwrap().chain;
    let r = fraisse(&["export", "--dot", "--chain", s(&path), "--stage", "2"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.out, export_hasse(chain.stage(2)));
    let out = dir.path().join("l.dot");
    let n5 = lattice_file(&dir, "n5.json", &FinLattice::n5());
    assert_eq!(
        fraisse(&["export", "--dot", "--lattice", s(&n5), "--out", s(&out)]).code,
        0
    );
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        export_hasse(&FinLattice::n5())
    );
    assert_eq!(
        fraisse(&["export", "--dot", "--chain", s(&path), "--stage", "99"]).code,
        1
    );
}

#[test]
fn metric_of_two_prefixes() {
    let dir = TempDir::new().unwrap();
    let p = r#"{"bound": 0, "join": [0], "meet": [0]}"#;
    let q = r#"{"bound": 0, "join": [1], "meet": [0]}"#;
    let (pp, qp) = (write(&dir, "p.json", p), write(&dir, "q.json", q));
    let r = fraisse(&["metric", "--p", s(&pp), "--q", s(&qp)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.json()["exp"], 0);
    let bad = write(
        &dir,
        "bad.json",
        r#"{"bound": 1, "join": [0], "meet": [0]}"#,
    );
    let r = fraisse(&["metric", "--p", s(&bad), "--q", s(&qp)]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("bad.json"), "{}", r.err);
}

#[test]
fn malformed_inputs_name_the_file() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        r#"{"n": 2, "join": [[0, null], [1, 1]], "meet": [[0, 0], [0, 1]]}"#,
    );
    let r = fraisse(&["export", "--dot", "--lattice", s(&bad)]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("bad.json"), "{}", r.err);
    let missing = dir.path().join("missing.json");
    let r = fraisse(&["check", "--chain", s(&missing)]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("missing.json"));
    let garbled = write(&dir, "chain.json", "{\"format\": 1");
    assert_eq!(fraisse(&["check", "--chain", s(&garbled)]).code, 1);
    assert_eq!(fraisse(&["build", "--variety", "boolean"]).code, 1);
    assert_eq!(fraisse(&["--help"]).code, 0);
}

#[test]
fn binary_reads_the_config_variable() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "fraisse.toml", "k = 3\nbudget = 4\n");
    let out = Command::new(env!("CARGO_BIN_EXE_fraisse"))
        .arg("build")
        .env(CONFIG_ENV, &cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let expected = serialize_chain(&run_builder(VarietyTag::Plain, 3, 4).unwrap().chain);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);

    let broken = write(&dir, "broken.toml", "colour = 3\n");
    let out = Command::new(env!("CARGO_BIN_EXE_fraisse"))
        .arg("build")
        .env(CONFIG_ENV, &broken)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("config"));
}
