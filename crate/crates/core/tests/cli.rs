use std::path::Path;
use std::process::Command;

use mbqc_fidelity::cli::execute;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_mbqc-fidelity");

fn run(args: &[&str]) -> Value {
    let mut full = vec!["mbqc-fidelity"];
    full.extend_from_slice(args);
    let text = execute(full).unwrap_or_else(|e| panic!("{args:?}: {e:?}"));
    serde_json::from_str(&text).unwrap()
}

fn build(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut full = vec!["build"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path]);
    execute(std::iter::once("mbqc-fidelity").chain(full)).unwrap();
    path
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn build_writes_cluster_states() {
    let v = run(&["build", "--type", "cluster1d", "--n", "3"]);
    assert_eq!(v["generators"], serde_json::json!(["+XZI", "+ZXZ", "+IZX"]));
    assert_eq!(v["provenance"]["seed"], 20_240_601);
    let v = run(&["build", "--type", "cluster2d", "--rows", "2", "--cols", "2"]);
    assert_eq!(v["n"], 4);
}

#[test]
fn broken_custom_flow_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"n":3,"generators":["+XZI","+ZXZ","+IZX"],"outputs":[2],"order":[0,1],
            "r_ops":{"0":"+IXI","1":"+IIX"}}"#,
    )
    .unwrap();
    let out = Command::new(BIN)
        .args(["build", "--type", "custom", "--in"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("condition 1"), "{err}");

    let good = dir.path().join("good.json");
    std::fs::write(
        &good,
        r#"{"n":3,"generators":["+XZI","+ZXZ","+IZX"],"outputs":[2],"order":[0,1],
            "r_ops":{"0":"+IXZ","1":"+IIX"}}"#,
    )
    .unwrap();
    let v = run(&["build", "--type", "custom", "--in", good.to_str().unwrap()]);
    assert_eq!(v["n"], 3);
}

#[test]
fn spectrum_examples() {
    let dir = tempfile::tempdir().unwrap();
    let c8 = build(dir.path(), "c8.json", &["--type", "cluster1d", "--n", "8"]);
    assert_eq!(f(&run(&["spectrum", "--in", &c8])["nu"]), 0.25);
    let g = build(dir.path(), "g.json", &["--type", "cluster2d", "--rows", "3", "--cols", "4"]);
    let nu = f(&run(&["spectrum", "--in", &g])["nu"]);
    assert!((0.25..=0.5).contains(&nu));
    let c2 = build(dir.path(), "c2.json", &["--type", "cluster1d", "--n", "2"]);
    let v = run(&["spectrum", "--in", &c2]);
    assert_eq!(f(&v["nu"]), 0.5);
    assert_eq!(f(&v["max"]), 1.0);
    for key in ["beta", "tau"] {
        assert!(v[key].is_number());
    }

    let csv = execute(["mbqc-fidelity", "spectrum", "--csv", "--in", &c2]).unwrap();
    assert_eq!(csv, "eigenvalue,multiplicity\n1,1\n0.5,2\n0,1\n");
}

#[test]
fn omega_output_and_fixed_basis() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = build(dir.path(), "c3.json", &["--type", "cluster1d", "--n", "3"]);
    let csv = execute(["mbqc-fidelity", "omega", "--csv", "--in", &c3]).unwrap();
    assert!(csv.contains("YXY,-0.125,-1,3"), "{csv}");
    let v = run(&["omega", "--in", &c3, "--method", "recursive"]);
    assert_eq!(v["terms"].as_array().unwrap().len(), 4);
    let v = run(&["omega", "--in", &c3, "--tilde"]);
    assert_eq!(v["terms"].as_array().unwrap().len(), 3);
    let c9 = build(dir.path(), "c9.json", &["--type", "cluster1d", "--n", "9"]);
    let v = run(&["omega", "--in", &c9, "--basis", "X,X,X,X,XY,X,X,X"]);
    assert_eq!(v["terms"].as_array().unwrap().len(), 3);
}

#[test]
fn report_examples() {
    let dir = tempfile::tempdir().unwrap();
    let c6 = build(dir.path(), "c6.json", &["--type", "cluster1d", "--n", "6"]);
    let common = ["--eps", "0.1", "--delta", "0.1", "--angles", "clifford_mc:8"];

    let mut args = vec!["report", "--in", &c6];
    args.extend_from_slice(&common);
    let v = run(&args);
    for path in [
        &v["state_fidelity"]["exact"],
        &v["state_fidelity"]["estimated"]["estimate"],
        &v["mbqc_fidelity"]["exact"],
        &v["mbqc_fidelity"]["estimated"]["estimate"],
        &v["mbqc_fidelity"]["simulated"]["mean"],
    ] {
        assert!((f(path) - 1.0).abs() < 1e-12);
    }
    assert!(f(&v["bounds_exact"]["upper_slack"]).abs() < 1e-12);
    assert_eq!(v["bounds_exact"]["upper_holds"], true);
    assert!(v["timings_ms"]["spectrum"].is_number());

    let mut args = vec!["report", "--in", &c6, "--noise", "global_mix:0.2"];
    args.extend_from_slice(&common);
    let v = run(&args);
    assert!((f(&v["state_fidelity"]["exact"]) - (0.8 + 0.2 / 64.0)).abs() < 1e-12);
    assert_eq!(v["bounds_exact"]["lower_holds"], true);
    assert_eq!(v["bounds_exact"]["upper_holds"], true);

    let mut args = vec!["report", "--in", &c6, "--noise", "excited_mix:5=1"];
    args.extend_from_slice(&common);
    let v = run(&args);
    assert!(f(&v["state_fidelity"]["exact"]).abs() < 1e-10);
    assert!(f(&v["mbqc_fidelity"]["exact"]).abs() < 1e-10);
}

#[test]
fn bounds_from_values() {
    let v = run(&["bounds", "--f-state", "0.9", "--f-mbqc", "0.95", "--nu", "0.25"]);
    assert_eq!(v["lower_holds"], true);
    assert_eq!(v["upper_holds"], true);
    let v = run(&["bounds", "--f-state", "0.9", "--f-mbqc", "0.8", "--nu", "0.25"]);
    assert_eq!(v["upper_holds"], false);
}

fn bin(args: &[&str], env_seed: Option<&str>) -> (Option<i32>, String) {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    match env_seed {
        Some(s) => cmd.env("MBQC_FIDELITY_SEED", s),
        None => cmd.env_remove("MBQC_FIDELITY_SEED"),
    };
    let out = cmd.output().unwrap();
    (out.status.code(), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn strip_provenance(text: &str) -> Value {
    let mut v: Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("provenance");
    v
}

#[test]
fn runs_are_reproducible_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let c4 = build(dir.path(), "c4.json", &["--type", "cluster1d", "--n", "4"]);
    let args = ["estimate", "--in", &c4, "--noise", "depolarizing:0.05", "--eps", "0.1"];
    let (code, a) = bin(&args, None);
    assert_eq!(code, Some(0));
    let (_, b) = bin(&args, None);
    assert_eq!(a, b);
    let mut threaded = args.to_vec();
    threaded.extend_from_slice(&["--threads", "3"]);
    let (_, c) = bin(&threaded, None);
    assert_eq!(strip_provenance(&a), strip_provenance(&c));

    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["seed"], 20_240_601);
    let (_, d) = bin(&args, Some("7"));
    let w: Value = serde_json::from_str(&d).unwrap();
    assert_eq!(w["seed"], 7);
    assert_eq!(w["provenance"]["seed"], 7);
    let mut explicit = args.to_vec();
    explicit.extend_from_slice(&["--seed", "7"]);
    let (_, e) = bin(&explicit, None);
    assert_eq!(strip_provenance(&d), strip_provenance(&e));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let g = build(dir.path(), "g.json", &["--type", "cluster2d", "--rows", "3", "--cols", "3"]);
    assert_eq!(bin(&["spectrum", "--in", &g, "--spectral-cap", "4"], None).0, Some(3));
    assert_eq!(bin(&["simulate", "--in", &g, "--dense-cap", "4"], None).0, Some(3));
    assert_eq!(bin(&["spectrum", "--in", "/nonexistent/state.json"], None).0, Some(4));
    assert_eq!(bin(&["build", "--type", "cluster1d", "--n", "1"], None).0, Some(2));
    assert_eq!(bin(&["estimate", "--in", &g, "--eps", "0"], None).0, Some(2));
    assert_eq!(bin(&["nonsense"], None).0, Some(2));
    assert_eq!(bin(&["spectrum", "--in", &g], Some("abc")).0, Some(2));
    let (code, out) = bin(&["--version"], None);
    assert_eq!(code, Some(0));
    assert!(out.contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn sample_and_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = build(dir.path(), "c3.json", &["--type", "cluster1d", "--n", "3"]);
    let v = run(&["sample", "--in", &c3, "--count", "2000", "--check"]);
    assert_eq!(v["samples"].as_array().unwrap().len(), 2000);
    assert!(f(&v["max_deviation"]) < 0.05);
    let v = run(&["simulate", "--in", &c3, "--noise", "dephasing:0.1"]);
    assert!((f(&v["simulated"]["mean"]) - f(&v["exact_average"])).abs() < 1e-10);
}
