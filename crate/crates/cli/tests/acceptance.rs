use std::process::Command;

use latfree_cli::acceptance::{run_suite, SuiteConfig};

#[test]
fn acceptance_criteria() {
    let results = run_suite(&SuiteConfig::default(), None);
    assert_eq!(results.len(), 10);
    for r in &results {
        println!(
            "criterion {:>2} {} {:<24} {} [{:.2}s{}]",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail,
            r.elapsed.as_secs_f64(),
            r.limit.map(|l| format!(" / {}s", l.as_secs())).unwrap_or_default()
        );
    }
    let failed: Vec<usize> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

fn latfree(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_latfree")).args(args).env_remove("LATFREE_SEED").output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8"))
}

#[test]
fn selftest_is_independent_of_thread_count() {
    let base = ["selftest", "--criteria", "1,3,5,9,10", "--seed", "11"];
    let (c1, one) = latfree(&[&base[..], &["--threads", "1"]].concat());
    let (c4, four) = latfree(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!((c1, c4), (0, 0), "{one}");
    assert_eq!(one, four);
    assert!(one.contains("\"passed\": true"));
}

#[test]
fn fixed_seed_gives_identical_reports() {
    let args = ["norm", "--space", "seq:2:3", "--expr", "|t1 - t2| \\/ t3", "--vectors", "1,1,0;0,2,-1;1,0,1", "--seed", "5"];
    let (code, first) = latfree(&args);
    let (_, second) = latfree(&args);
    assert_eq!(code, 0);
    assert_eq!(first, second);
}
