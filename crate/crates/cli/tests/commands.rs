use latfree_cli::run_cli;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value) {
    let out = run_cli(std::iter::once("latfree").chain(args.iter().copied()));
    let value = if out.stdout.is_empty() { Value::Null } else { serde_json::from_str(&out.stdout).expect("json output") };
    (out.code, value)
}

fn code(args: &[&str]) -> i32 {
    run_cli(std::iter::once("latfree").chain(args.iter().copied())).code
}

#[test]
fn norm_of_a_join() {
    let (code, v) = run(&["norm", "--space", "fvl:2", "--expr", "t1 \\/ t2"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "norm");
    assert_eq!(v["space"], "fvl:2");
    let c = &v["certificate"];
    assert_eq!(c["lower"], "2");
    assert_eq!(c["upper"], "2");
    assert_eq!(c["exact"], true);
    assert_eq!(c["witness"], serde_json::json!([["1", "0"], ["0", "1"]]));
    assert_eq!(c["lambda"], "1");
}

#[test]
fn distributivity_is_recognized() {
    let (code, v) = run(&["equiv", "--space", "fvl:3", "--expr", "t1 + (t2 \\/ t3)", "--expr", "(t1 + t2) \\/ (t1 + t3)"]);
    assert_eq!(code, 0);
    assert_eq!(v["equal"], true);
}

#[test]
fn inequivalence_comes_with_a_point() {
    let (code, v) = run(&["equiv", "--space", "fvl:2", "--expr", "t1 \\/ t2", "--expr", "t1 + t2"]);
    assert_eq!(code, 0);
    assert_eq!(v["equal"], false);
    assert_ne!(v["left"], v["right"]);
    assert_eq!(v["witness"].as_array().map(Vec::len), Some(2));
}

#[test]
fn evaluation_respects_precedence() {
    let (code, v) = run(&["eval", "--arity", "3", "--expr", "t1 /\\ t2 + t1 \\/ (2*t3)", "--at", "1,2,3"]);
    assert_eq!(code, 0);
    assert_eq!(v["value"], "7");
}

#[test]
fn extension_of_a_coordinate_map() {
    let (code, v) = run(&["extend", "--space", "fvl:2", "--expr", "t1 \\/ t2", "--map", "1,0;0,1", "--target", "inf"]);
    assert_eq!(code, 0);
    assert_eq!(v["image"], serde_json::json!(["1", "1"]));
    assert_eq!(v["image_norm"], "1");
}

#[test]
fn dependent_vectors_collapse() {
    let (code, v) = run(&["norm", "--space", "seq:1:2", "--vectors", "1,0;1,0", "--expr", "t1 - t2"]);
    assert_eq!(code, 0);
    assert_eq!(v["certificate"]["upper"], "0");
    let (_, v) = run(&["norm", "--space", "seq:1:2", "--vectors", "1,0;0,1;1,1", "--expr", "t3 - t1 - t2"]);
    assert_eq!(v["certificate"]["upper"], "0");
}

#[test]
fn euclidean_norm_is_bracketed() {
    let (code, v) = run(&["norm", "--space", "seq:2:2", "--vectors", "3,4", "--expr", "t1"]);
    assert_eq!(code, 0);
    assert_eq!(v["certificate"]["lower"], "5");
    assert_eq!(v["certificate"]["upper"], "5");
    assert_eq!(v["certificate"]["method"], "sandwich");
}

#[test]
fn audit_passes_on_an_exact_certificate() {
    let (code, v) = run(&["audit", "--space", "fvl:2", "--expr", "|t1| + |t2|", "--map", "1,-1;1,1", "--target", "1", "--family", "20"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
    assert_eq!(v["maximality"]["violations"], serde_json::json!([]));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["norm", "--space", "fvl:2", "--expr", "t1 \\/"]), 1);
    assert_eq!(code(&["norm", "--space", "fvl:2", "--expr", "t3"]), 1);
    assert_eq!(code(&["norm", "--space", "banach", "--expr", "t1"]), 1);
    assert_eq!(code(&["norm", "--expr", "t1"]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["norm", "--space", "seq:2:2", "--expr", "t1", "--method", "exact"]), 1);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn table_output() {
    let out = run_cli(["latfree", "eval", "--expr", "t1 \\/ -t1", "--at", "-3/2", "--format", "table"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("value         3/2"), "{}", out.stdout);
}

#[test]
fn report_goes_to_a_file() {
    let dir = std::env::temp_dir().join(format!("latfree-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = run_cli(["latfree", "norm", "--space", "fvl:1", "--expr", "|t1|", "--out", path.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["certificate"]["upper"], "1");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn timing_is_opt_in() {
    let (_, v) = run(&["norm", "--space", "fvl:1", "--expr", "t1"]);
    assert!(v.get("timing").is_none());
    let (_, v) = run(&["norm", "--space", "fvl:1", "--expr", "t1", "--timing"]);
    assert!(v["timing"]["wall_ms"].is_number());
}
