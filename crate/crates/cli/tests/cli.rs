use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn hypgrpd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypgrpd")).args(args).env_remove("HYPGRPD_THREADS").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(args: &[&str]) -> (i32, Value) {
    let o = hypgrpd(args);
    let v = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}; stderr {}", String::from_utf8_lossy(&o.stderr)));
    (code(&o), v)
}

fn tmp(name: &str, v: &Value) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, serde_json::to_vec(v).unwrap()).unwrap();
    p
}

fn assert_envelope(v: &Value, cmd: &str) {
    assert_eq!(v["schema"], "hypgrpd/1");
    assert_eq!(v["command"], cmd);
    assert!(v["seed"].is_u64());
    assert!(v["truncated"].is_boolean());
    assert!(v["budgets"].is_object());
    for i in v["inputs"].as_array().unwrap() {
        let h = i["sha256"].as_str().unwrap();
        assert_eq!(h.len(), 64);
        assert!(h.bytes().all(|b| b.is_ascii_hexdigit()));
    }
}

#[test]
fn doubling_ball_is_a_tree() {
    let (c, v) = report(&["delta", "--preset", "doubling", "--radius", "6"]);
    assert_eq!(c, 0);
    assert_envelope(&v, "delta");
    assert_eq!(v["result"]["four_point_delta"], "0");
}

#[test]
fn dual_of_single_prohibited_word() {
    let o = hypgrpd(&["dual-sft", "--prohibited", "12"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_envelope(&v, "dual-sft");
    assert_eq!(v["result"]["prohibited"], json!(["21"]));
    assert!(text.replace([' ', '\n'], "").contains(r#""prohibited":["21"]"#));
    assert_eq!(v["result"]["involution"], true);
}

#[test]
fn adding_machine_nucleus() {
    let (c, v) = report(&["nucleus", "--preset", "adding-machine"]);
    assert_eq!(c, 0);
    assert_envelope(&v, "nucleus");
    assert_eq!(v["result"]["elements"].as_array().unwrap().len(), 3);
}

#[test]
fn basilica_nucleus_and_budget_exit() {
    let (c, v) = report(&["nucleus", "--preset", "basilica"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["size"], 7);
    let (c, v) = report(&["nucleus", "--preset", "basilica", "--budget", "2"]);
    assert_eq!(c, 3);
    assert_eq!(v["status"], "budget-exhausted");
    assert_eq!(v["truncated"], true);
}

/// Two directed paths that merge and split again.
fn split_graph() -> Value {
    let n = 10;
    let mut names = vec!["a".to_string(), "b".into(), "c".into()];
    names.extend((0..n).map(|i| format!("d{i}")));
    names.extend((0..n).map(|i| format!("e{i}")));
    let ix = |s: &str| names.iter().position(|x| x == s).unwrap();
    let mut edges = vec![(ix("a"), ix("c")), (ix("b"), ix("c")), (ix("c"), ix("d0")), (ix("c"), ix("e0"))];
    for i in 0..n - 1 {
        edges.push((ix(&format!("d{i}")), ix(&format!("d{}", i + 1))));
        edges.push((ix(&format!("e{i}")), ix(&format!("e{}", i + 1))));
    }
    let mut lambda = serde_json::Map::new();
    for (k, name) in names.iter().enumerate() {
        let l = match k {
            0 | 1 => 0,
            2 => -1,
            _ => -2 - ((k - 3) % n) as i64,
        };
        lambda.insert(name.clone(), json!(l));
    }
    json!({"vertices": names, "edges": edges, "links": [[0, 1]], "lambda": lambda, "delta": "1", "eta": "1/3"})
}

#[test]
fn criterion_violation_exits_one() {
    let p = tmp("split.json", &split_graph());
    let (c, v) = report(&["criterion", "--input", p.to_str().unwrap(), "--horizon", "6"]);
    assert_eq!(c, 1);
    assert_eq!(v["status"], "violation");
    assert!(!v["result"]["criterion"]["violations"].as_array().unwrap().is_empty());
    assert_eq!(v["inputs"][0]["role"], "graph");
}

#[test]
fn input_errors_exit_two() {
    let o = hypgrpd(&["nucleus", "--preset", "no-such-preset"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    assert!(o.stdout.is_empty());

    let bad = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&hypgrpd(&["logscale-delta", "--input", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&hypgrpd(&["logscale-delta", "--input", "/nonexistent/x.json"])), 2);
    assert_eq!(code(&hypgrpd(&["no-such-command"])), 2);
    assert_eq!(code(&hypgrpd(&["act", "--preset", "basilica", "--element", "z", "--word", "0"])), 2);
    assert_eq!(code(&hypgrpd(&["vershik", "--path", "00"])), 2);
}

#[test]
fn dot_only_for_graphs() {
    let o = hypgrpd(&["tile-lengths", "--format", "dot"]);
    assert_eq!(code(&o), 2);
    let o = hypgrpd(&["schreier", "--preset", "adding-machine", "--level", "2", "--format", "dot"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("digraph") || text.starts_with("graph"), "{text}");
    assert!(text.contains("->") || text.contains("--"));
}

#[test]
fn table_format() {
    let o = hypgrpd(&["tile-lengths", "--format", "table"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("schema") && l.ends_with("hypgrpd/1")));
    assert!(text.lines().any(|l| l.starts_with("status") && l.ends_with("ok")));
}

#[test]
fn reports_are_byte_deterministic() {
    for args in [
        &["thin-delta", "--preset", "dyadic-affine", "--radius", "3", "--samples", "200", "--seed", "9"][..],
        &["cayley", "--preset", "golden-rotation", "--radius", "2"],
        &["limit-space", "--preset", "basilica", "--level", "3"],
        &["duality-witness", "--preset", "golden-mean", "--horizon", "8"],
    ] {
        let a = hypgrpd(args);
        let b = hypgrpd(args);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["cayley", "--preset", "dyadic-affine", "--radius", "3"];
    let one = Command::new(env!("CARGO_BIN_EXE_hypgrpd")).args(args).env("HYPGRPD_THREADS", "1").output().unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_hypgrpd")).args(args).env("HYPGRPD_THREADS", "4").output().unwrap();
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_hypgrpd")).args(args).env("HYPGRPD_THREADS", "zero").output().unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn out_writes_the_report() {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("tiles.json");
    let _ = std::fs::remove_file(&p);
    let o = hypgrpd(&["tile-lengths", "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&p).unwrap()).unwrap();
    assert_eq!(v["result"]["lengths"]["kind"], "exact");
    assert_eq!(v["result"]["lengths"]["eigenvalue"], "(3+sqrt(5))/2");
}

#[test]
fn input_hash_is_of_the_file_bytes() {
    use sha2::{Digest, Sha256};
    let ls = json!({"points": ["x", "y", "z"], "values": [[0, 1, 3], [0, 2, 1], [1, 2, 1]]});
    let p = tmp("ls.json", &ls);
    let (c, v) = report(&["logscale-delta", "--input", p.to_str().unwrap()]);
    assert_eq!(c, 0);
    let want = hex::encode(Sha256::digest(std::fs::read(&p).unwrap()));
    assert_eq!(v["inputs"][0]["sha256"], want);
    assert_eq!(v["result"]["delta"], 0);
}

#[test]
fn logscale_metric_roundtrip() {
    let ls = json!({"points": ["x", "y", "z", "w"], "values": [[0, 1, 3], [0, 2, 1], [0, 3, 1], [1, 2, 1], [1, 3, 1], [2, 3, 2]]});
    let p = tmp("ls4.json", &ls);
    let (c, v) = report(&["logscale-metric", "--input", p.to_str().unwrap()]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["triangle_violation"], Value::Null);
    assert_eq!(v["result"]["bounds_hold"], true);
    let m = tmp("m4.json", &v["result"]["metric"]);
    let (c, v) = report(&["logscale-metric", "--from-metric", "--input", m.to_str().unwrap()]);
    assert_eq!(c, 0);
    assert_eq!(v["inputs"][0]["role"], "metric");
}

#[test]
fn paste_two_charts() {
    let charts = json!({
        "points": ["x", "y", "z"],
        "overlap_bound": 1,
        "charts": [
            {"points": ["x", "y"], "values": [[0, 1, 2]]},
            {"points": ["y", "z"], "values": [[0, 1, 3]]},
        ],
    });
    let p = tmp("charts.json", &charts);
    let (c, v) = report(&["paste", "--input", p.to_str().unwrap()]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["clamp_level"], 3);
    assert_eq!(v["result"]["overlap_delta"], 0);
}

#[test]
fn selfsim_commands() {
    let (c, v) = report(&["act", "--preset", "adding-machine", "--element", "t", "--word", "111"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["image"], "000");
    let (c, v) = report(&["act", "--preset", "basilica", "--element", "a*b", "--word", "01(10)"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["image"], "11(10)");
    let (c, v) = report(&["section", "--preset", "basilica", "--element", "a", "--word", "01"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["section_trivial"], "yes");
    let (c, v) = report(&["schreier", "--preset", "adding-machine", "--level", "3"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["vertices"].as_array().unwrap().len(), 8);
    assert_eq!(v["result"]["connected"], true);
}

#[test]
fn germ_commands() {
    let (c, v) = report(&["cayley", "--preset", "doubling", "--radius", "2"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["size"], 10);
    let (c, v) = report(&["preimage-tree", "--depth", "3"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["level_sizes"], json!([1, 2, 4, 8]));
    let (c, v) = report(&["boundary-scale", "--preset", "doubling", "--ray1", "pre_0,pre_1,pre_0", "--ray2", "pre_0,pre_0"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["scale"], 1);
    let (c, _) = report(&["rotation-graph", "--word-bound", "3"]);
    assert_eq!(c, 0);
}

#[test]
fn smale_commands() {
    let (c, v) = report(&["splice-check", "--preset", "full-2", "--x", "(0).0(1)", "--y", "(10)1.(0)"]);
    assert_eq!(c, 0);
    // (10)1.0(1) in reduced form
    assert_eq!(v["result"]["splice"], "(01).0(1)");
    assert_eq!(v["result"]["failures"], json!([]));
    let (c, v) = report(&["duality-witness", "--preset", "golden-mean"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["passed"], true);
    let (c, v) = report(&["limit-space", "--preset", "adding-machine", "--level", "4"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["cycle_length"], 16);
    let (c, v) = report(&["gamma-graph", "--preset", "adding-machine", "--max-len", "3"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["vertices"], 15);
    let (c, v) = report(&["vershik", "--path", "31", "--steps", "2"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["successors"].as_array().unwrap().len(), 2);
    let (c, v) = report(&["vershik", "--path", "53", "--steps", "1"]);
    assert_eq!(c, 3);
    assert_eq!(v["result"]["maximal_reached"], true);
    let (c, v) = report(&["substitution", "--iterations", "2"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["word"], "AABAABAB");
    let (c, v) = report(&["itinerary", "--steps", "40"]);
    assert_eq!(c, 0);
    assert!(v["result"]["factor_of_iterate"].is_u64());
}
