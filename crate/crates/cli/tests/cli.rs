use std::path::PathBuf;
use std::process::{Command, Output};

use gauss_chaos::rational::{parse_rational, to_pq};
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gauss-chaos"));
    c.env_remove("GAUSS_CHAOS_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Every string that looks like a fraction must be in lowest terms.
fn assert_reduced(v: &Value) {
    match v {
        Value::String(s) if s.contains('/') && s.split('/').all(|t| t.parse::<i128>().is_ok()) => {
            assert_eq!(to_pq(&parse_rational(s).unwrap()), *s)
        }
        Value::Array(a) => a.iter().for_each(assert_reduced),
        Value::Object(m) => m.values().for_each(assert_reduced),
        _ => {}
    }
}

#[test]
fn cylinder_endpoints() {
    let o = run(&["cylinder", "--word", "2,2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["lo"], "2/5");
    assert_eq!(v["hi"], "3/7");
    assert_eq!(v["length"], "1/35");
    assert_eq!(v["convergents"][2], "2/5");
    assert_reduced(&v);
}

#[test]
fn construct_prefix_and_inverse() {
    let o = run(&["construct", "--n", "3", "--seed", "2;2", "--length", "12"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "2,3,2,2,2,2,2,2,3,1,2,2\n");

    let o = run(&["construct", "--n", "3", "--invert", "2,3,2,2,2,2,2,2,3,1,2,2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "2,2,2,2,2,2,2,2,2\n");

    let o = run(&["construct", "--n", "3", "--invert", "2,2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dim_series_csv() {
    let o = run(&["dim", "--set", "EN", "--n", "2", "--depth", "12"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "set_kind,N,depth,cover_size,s_lo,s_hi,root");
    assert_eq!(lines.len(), 13);
    assert!(lines[12].starts_with("EN,2,12,4096,"));
    let root: f64 = lines[12].rsplit(',').next().unwrap().parse().unwrap();
    assert!((0.48..=0.58).contains(&root));
}

#[test]
fn output_is_reproducible_across_threads() {
    let args = ["dim", "--set", "SN", "--n", "3", "--depth", "14", "--format", "json"];
    let one = run(&[&args[..], &["--threads", "1"]].concat());
    let four = run(&[&args[..], &["--threads", "4"]].concat());
    let env = bin().args(args).env("GAUSS_CHAOS_THREADS", "2").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, env.stdout);

    let sample = ["density", "sample", "--count", "50", "--digits", "40", "--bits", "256"];
    assert_eq!(run(&sample).stdout, run(&sample).stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(&["cylinder", "--word", "2,0"]).status.code(), Some(2));
    assert_eq!(run(&["expand", "--x", "3/2"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    let budget = run(&["dim", "--set", "EN", "--n", "2", "--depth", "20", "--max-cover", "1000"]);
    assert_eq!(budget.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&budget.stderr).contains("budget"));
    assert_eq!(stdout(&budget).lines().count(), 10);
    let same = run(&["scramble", "--n-a", "2", "--seed-a", ";2", "--n-b", "2", "--seed-b", "2;2,2"]);
    assert_eq!(same.status.code(), Some(2));
}

#[test]
fn scramble_report() {
    let o = run(&[
        "scramble", "--n-a", "3", "--seed-a", ";2", "--n-b", "4", "--seed-b", ";2", "--horizon", "100000",
        "--j-max", "8",
    ]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["verdict"], true);
    assert_eq!(v["thresholds"]["delta"], "1/7200");
    assert!(v["separations"].as_array().unwrap().len() >= 10);
    assert_eq!(v["proximities"].as_array().unwrap().len(), 8);
    assert_reduced(&v);

    let short = run(&[
        "scramble", "--n-a", "2", "--seed-a", ";1", "--n-b", "2", "--seed-b", ";2", "--horizon", "1000",
    ]);
    assert_eq!(short.status.code(), Some(1));
    assert_eq!(json(&short)["verdict"], false);
}

#[test]
fn config_file_and_flag_precedence() {
    let path = scratch("run.conf");
    std::fs::write(&path, "# test\nformat = json\nprecision = 20\n").unwrap();
    let conf = path.to_str().unwrap();
    let o = run(&["--config", conf, "construct", "--n", "2", "--seed", ";1", "--length", "5"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["digits"], serde_json::json!([1, 2, 1, 1, 1]));
    let o = run(&["--config", conf, "--format", "csv", "construct", "--n", "2", "--seed", ";1", "--length", "5"]);
    assert_eq!(stdout(&o), "1,2,1,1,1\n");

    std::fs::write(&path, "unknown = 1\n").unwrap();
    assert_eq!(run(&["--config", conf, "cylinder", "--word", "1"]).status.code(), Some(2));
}

#[test]
fn density_commands() {
    let corpus = scratch("samples.ndjson");
    let c = corpus.to_str().unwrap();
    let o = run(&["density", "sample", "--count", "20", "--digits", "30", "--bits", "256", "--corpus", c]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&corpus).unwrap().lines().count(), 20);
    let o = run(&["density", "replay", "--corpus", c]);
    assert!(o.status.success());
    assert_eq!(json(&o)["records"], 20);
    let o = run(&["density", "scan", "--corpus", c, "--k-max", "1", "--m-max", "2"]);
    assert_eq!(json(&o).as_array().unwrap().len(), 20);

    let o = run(&["density", "invariance", "--interval", "[0,1/2]", "--branches", "1000"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["within"], true);
    assert!(v["lhs"].as_str().unwrap().starts_with("0.584"));

    let o = run(&["density", "bounded", "--interval", "(1/3,1/2)"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["certified"], true);

    let o = run(&["density", "scan", "--digits", "1,2,1,2", "--k-max", "2", "--m-max", "2", "--word", "2,1"]);
    let v = json(&o);
    assert_eq!(v[0]["first_occurrence"], 2);
    assert_eq!(v[0]["missing"], serde_json::json!([[1, 1], [2, 2]]));
}

#[test]
fn lemma_checks_pass() {
    for args in [
        &["lemma-check", "quasi-mult", "--max-digit", "3", "--max-len", "6"][..],
        &["lemma-check", "drop-ratio", "--max-digit", "4", "--max-len", "5"],
        &["lemma-check", "q-growth", "--max-digit", "4", "--max-len", "6"],
        &["lemma-check", "gap", "--n", "2", "--max-len", "5"],
        &["lemma-check", "holder", "--samples", "50"],
        &["lemma-check", "schedule", "--limit", "20000"],
        &["--self-check"],
    ] {
        let o = run(args);
        assert!(o.status.success(), "{args:?}");
        assert_reduced(&json(&o));
    }
    let v = json(&run(&["lemma-check", "holder", "--samples", "5"]));
    assert_eq!(v["k_epsilon"], 15);
}
