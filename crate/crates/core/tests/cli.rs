use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn qlocal(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qlocal")).current_dir(dir).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn row_major_pairing(l: u32) -> String {
    let pts: Vec<[u32; 3]> = (0..l * l).map(|i| [i / l, i % l, 0]).collect();
    let pairs: Vec<[[u32; 3]; 2]> = pts.chunks(2).map(|c| [c[0], c[1]]).collect();
    serde_json::to_string(&pairs).unwrap()
}

const GHZ_MEASURED: &str = r#"{"version":1,"n":4,"layers":[
 {"ops":[{"kind":"clifford1","targets":[0],"params":["H"]}]},
 {"ops":[{"kind":"clifford2","targets":[0,3],"params":["CNOT"]}]},
 {"ops":[{"kind":"clifford2","targets":[3,1],"params":["CNOT"]},{"kind":"clifford1","targets":[2],"params":["H"]}]},
 {"ops":[{"kind":"measure_z","targets":[0],"outcome_id":0},{"kind":"measure_z","targets":[1],"outcome_id":1},
         {"kind":"measure_z","targets":[2],"outcome_id":2},{"kind":"measure_z","targets":[3],"outcome_id":3}]}]}"#;

#[test]
fn route_3d_writes_paths_stats_and_manifest() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "pairs.json", &row_major_pairing(4));
    let (code, stdout, _) = qlocal(
        d.path(),
        &["route", "--in", "pairs.json", "--mode", "3d", "--l", "4", "--out", "paths.json", "--stats"],
    );
    assert_eq!(code, 0);
    let stats: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert!(stats["max_len"].as_u64().unwrap() <= 40);
    assert_eq!(stats["edge_disjoint"], true);
    let doc = json(d.path().join("paths.json"));
    assert_eq!(doc["paths"].as_array().unwrap().len(), 8);
    let m = json(d.path().join("paths.json.manifest.json"));
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["config"]["command"], "route");
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["outputs"][0]["path"], "paths.json");
}

#[test]
fn route_2d_paths_start_at_the_first_endpoint() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "pairs.json", "[[[3,3],[0,0]],[[1,1],[2,2]]]");
    let (code, ..) =
        qlocal(d.path(), &["route", "--in", "pairs.json", "--mode", "2d", "--l", "4", "--out", "paths.json"]);
    assert_eq!(code, 0);
    let doc = json(d.path().join("paths.json"));
    let p0 = &doc["paths"][0];
    assert_eq!(p0["vertices"][0], serde_json::json!([3, 3, 0]));
    assert_eq!(p0["length"], 6);
    assert_eq!(doc["stats"]["manhattan"], true);
}

#[test]
fn route_failures_have_distinct_codes() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "bad.json", "[[[0,0],");
    let (code, _, err) =
        qlocal(d.path(), &["route", "--in", "bad.json", "--mode", "3d", "--l", "4", "--out", "o.json"]);
    assert_eq!(code, 2);
    let diag: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(diag["error"]["status"], "parse");

    write(d.path(), "pairs.json", "[[[0,0,0],[1,0,0]]]");
    let (code, _, err) =
        qlocal(d.path(), &["route", "--in", "pairs.json", "--mode", "3d", "--l", "3", "--out", "o.json"]);
    assert_eq!(code, 3);
    assert!(err.contains("even side length"));
    assert_eq!(json(d.path().join("o.json.manifest.json"))["status"], "precondition");

    // 2D pairs sharing a row
    write(d.path(), "row.json", "[[[0,0],[0,2]],[[1,1],[2,2]]]");
    let (code, ..) = qlocal(d.path(), &["route", "--in", "row.json", "--mode", "2d", "--l", "4", "--out", "o.json"]);
    assert_eq!(code, 3);

    let (code, ..) =
        qlocal(d.path(), &["route", "--in", "missing.json", "--mode", "2d", "--l", "4", "--out", "o.json"]);
    assert_eq!(code, 3);
    let (code, ..) = qlocal(d.path(), &["route", "--mode", "2d"]);
    assert_eq!(code, 2);
}

#[test]
fn localize_then_verify_passes() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.json", GHZ_MEASURED);
    for mode in ["2d", "3d"] {
        let (code, stdout, _) =
            qlocal(d.path(), &["localize", "--in", "c.json", "--mode", mode, "--out", "lc.json", "--stats"]);
        assert_eq!(code, 0);
        let stats: Value = serde_json::from_str(stdout.trim()).unwrap();
        assert_eq!(stats["n_logical"], 4);
        let (code, ..) = qlocal(d.path(), &["verify", "--in", "c.json", "--in", "lc.json", "--out", "v.json"]);
        assert_eq!(code, 0);
        let v = json(d.path().join("v.json"));
        assert_eq!(v["verdict"], "PASS");
        assert_eq!(v["checks"][0]["name"], "locality");
    }
}

#[test]
fn verify_reports_the_outcome_broken_by_a_dropped_correction() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.json", GHZ_MEASURED);
    assert_eq!(qlocal(d.path(), &["localize", "--in", "c.json", "--mode", "2d", "--out", "lc.json"]).0, 0);
    let mut doc = json(d.path().join("lc.json"));
    let layers = doc["circuit"]["layers"].as_array_mut().unwrap();
    let mut dropped = false;
    'outer: for l in layers.iter_mut() {
        let ops = l["ops"].as_array_mut().unwrap();
        if let Some(i) = ops.iter().position(|o| o["kind"] == "ctrl_pauli") {
            ops.remove(i);
            dropped = true;
            break 'outer;
        }
    }
    assert!(dropped);
    write(d.path(), "bad.json", &doc.to_string());
    let (code, ..) = qlocal(d.path(), &["verify", "--in", "c.json", "--in", "bad.json", "--out", "v.json"]);
    assert_eq!(code, 1);
    let v = json(d.path().join("v.json"));
    assert_eq!(v["verdict"], "FAIL");
    let id = v["checks"][1]["failing_outcome_id"].as_u64().expect("failing outcome id");
    assert!(id <= 3);
}

#[test]
fn verify_empty_pair_passes() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "e.json", r#"{"version":1,"n":0,"layers":[]}"#);
    let (code, ..) = qlocal(d.path(), &["verify", "--in", "e.json", "--in", "e.json", "--out", "v.json"]);
    assert_eq!(code, 0);
    assert_eq!(json(d.path().join("v.json"))["pass"], true);
}

#[test]
fn montecarlo_verdicts_and_determinism() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "swap.json", r#"{"gadget":"swap_chain","k":4,"copies":1}"#);
    let base = ["montecarlo", "--in", "swap.json", "--seed", "11", "--trials", "30000", "--subsets", "30"];

    let run = |extra: &[&str], out: &str| {
        let mut a: Vec<&str> = base.to_vec();
        a.extend_from_slice(extra);
        a.extend_from_slice(&["--out", out]);
        qlocal(d.path(), &a).0
    };
    assert_eq!(run(&["--p", "0"], "zero.csv"), 0);
    let zero = fs::read_to_string(d.path().join("zero.csv")).unwrap();
    let mut rows = csv::Reader::from_reader(zero.as_bytes());
    assert_eq!(
        rows.headers().unwrap().iter().collect::<Vec<_>>(),
        ["trial_block", "subset_size", "subset", "empirical_prob", "bound", "pass"]
    );
    for r in rows.records() {
        assert_eq!(r.unwrap()[3].parse::<f64>().unwrap(), 0.0);
    }

    assert_eq!(run(&["--p", "1e-3"], "a.csv"), 0);
    assert_eq!(run(&["--p", "1e-3"], "b.csv"), 0);
    let a = fs::read(d.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(d.path().join("b.csv")).unwrap());
    assert_eq!(run(&["--p", "1e-3", "--claimed-bound", "0"], "neg.csv"), 1);
    assert_eq!(run(&["--p", "1.5"], "bad.csv"), 3);
    let ma = json(d.path().join("a.csv.manifest.json"));
    let mb = json(d.path().join("b.csv.manifest.json"));
    assert_eq!(ma["outputs"][0]["sha256"], mb["outputs"][0]["sha256"]);
    assert_eq!(ma["config"]["seed"], 11);
}

#[test]
fn ft_plan_feeds_montecarlo() {
    let d = tempfile::tempdir().unwrap();
    let (code, ..) = qlocal(d.path(), &["ft-plan", "--mode", "3d", "--n", "4", "--out", "plan.json"]);
    assert_eq!(code, 0);
    let doc = json(d.path().join("plan.json"));
    assert_eq!(doc["summary"]["total_qubits"], 2 * 4 + 12 * 164u64.pow(3));
    assert_eq!(doc["summary"]["width_check"]["holds_natural"], true);
    let args = [
        "montecarlo",
        "--in",
        "plan.json",
        "--p",
        "1e-5",
        "--seed",
        "3",
        "--trials",
        "4000",
        "--subsets",
        "10",
        "--out",
        "s.csv",
    ];
    assert_eq!(qlocal(d.path(), &args).0, 0);
    let first = fs::read(d.path().join("s.csv")).unwrap();
    assert_eq!(qlocal(d.path(), &args).0, 0);
    assert_eq!(first, fs::read(d.path().join("s.csv")).unwrap());
    // above the bus threshold
    let mut hot = args.to_vec();
    hot[4] = "0.01";
    assert_eq!(qlocal(d.path(), &hot).0, 3);

    let (code, ..) = qlocal(d.path(), &["ft-plan", "--mode", "quasi2d", "--n", "4", "--p", "1e-9", "--out", "q.json"]);
    assert_eq!(code, 0);
    let q = json(d.path().join("q.json"));
    assert_eq!(q["summary"]["total_qubits"], 2 * 4 + 2 * 16 * 164u64.pow(3));
}
