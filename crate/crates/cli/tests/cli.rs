use std::process::{Command, Output};

use nsppt_sdp::sdpa;

fn nsppt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsppt")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn perfect_two_use_code() {
    let out = nsppt(&["fidelity", "--d", "3", "--alpha", "1", "--uses", "2", "--size", "2", "--class", "both"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["fidelity_exact"], "1/1");
    assert_eq!(v["method"], "exact");
    assert_eq!(v["class"], "both");
}

#[test]
fn lp_and_sdp_agree() {
    let out = nsppt(&["fidelity", "--d", "3", "--uses", "1", "--class", "ppt", "--method", "both"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["fidelity_exact"], "5/6");
    assert!((v["fidelity_float"].as_f64().unwrap() - 5.0 / 6.0).abs() <= 1e-6);
    assert!(v["solver_gap"].as_f64().unwrap().abs() <= 1e-6);
}

#[test]
fn depolarizing_by_sdp() {
    let spec = r#"{"kind":"depolarizing","d":2,"f":1}"#;
    let out = nsppt(&["fidelity", "--channel", spec, "--class", "ns", "--method", "sdp"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["fidelity_exact"].is_null());
    assert!((v["fidelity_float"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(nsppt(&["fidelity", "--channel", r#"{"kind":"teleporter"}"#]).status.code(), Some(2));
    assert_eq!(nsppt(&["fidelity", "--d", "3", "--alpha", "3/2"]).status.code(), Some(2));
    let dep = r#"{"kind":"dephasing","d":3}"#;
    assert_eq!(nsppt(&["fidelity", "--channel", dep, "--method", "exact"]).status.code(), Some(2));
    assert_eq!(nsppt(&["sweep", "--channel", dep]).status.code(), Some(2));
    assert_eq!(nsppt(&["sweep", "--d", "3", "--rate", "0.5"]).status.code(), Some(2));
}

#[test]
fn channel_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wh.json");
    std::fs::write(&path, r#"{"kind":"werner_holevo","d":3,"alpha":"1","uses":1}"#).unwrap();
    let out = nsppt(&["fidelity", "--channel-file", path.to_str().unwrap(), "--class", "ns"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["fidelity_exact"], "3/4");
}

#[test]
fn size_sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig5.csv");
    let out = nsppt(&["sweep", "--d", "3", "--uses", "2", "--class", "ns,ppt,both", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["n", "K", "class", "fid_num", "fid_den", "fid_float", "log2_fid"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 30);
    let ns3 = rows.iter().find(|r| &r[1] == "3" && &r[2] == "ns").unwrap();
    assert_eq!((&ns3[3], &ns3[4]), ("1", "1"));
}

#[test]
fn rate_sweep_is_deterministic() {
    let args = ["sweep", "--d", "3", "--rate", "99/40", "--n-from", "10", "--n-to", "40", "--step", "10"];
    let serial = nsppt(&args);
    let mut parallel_args = args.to_vec();
    parallel_args.extend(["--jobs", "4"]);
    let parallel = nsppt(&parallel_args);
    assert!(serial.status.success());
    assert_eq!(serial.stdout, parallel.stdout);
    let text = String::from_utf8(serial.stdout).unwrap();
    let ks: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(ks.len(), 4);
    assert_eq!(ks[0], "8624");
}

#[test]
fn verify_targets_pass() {
    for target in ["example1", "superactivation", "supermaps"] {
        let out = nsppt(&["verify", target]);
        assert!(out.status.success(), "{target}");
        let v = json(&out);
        assert_eq!(v["passed"], true);
        assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    }
}

#[test]
fn verify_failure_exits_1() {
    // A tolerance no solver can meet fails the numeric Horodecki check.
    let out = nsppt(&["verify", "horodecki", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn export_dimensions_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wh.dat-s");
    let out = nsppt(&["export", "--d", "3", "--class", "ppt", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["blocks"][0]["size"], 18);

    let path = dir.path().join("id.dat-s");
    let spec = r#"{"kind":"identity","d":2}"#;
    let out = nsppt(&["export", "--channel", spec, "--class", "ns", "--form", "restrict", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed = sdpa::parse(&text).unwrap();
    assert_eq!(sdpa::export(&parsed).unwrap(), text);
}
