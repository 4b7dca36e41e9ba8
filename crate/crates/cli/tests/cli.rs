use besselforge::kernels::modified_bessel_kernel;
use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_besselforge"));
    c.env_remove("BESSELFORGE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema_for(command: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../docs/schemas/{command}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn json_checked(args: &[&str]) -> Value {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let schema = schema_for(args[0]);
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{} summary does not match its schema: {errors:?}", args[0]);
    v
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn kernel_eval_shape_and_determinism() {
    let args = ["kernel-eval", "--family", "rescaled", "--n", "32", "--s", "0.5", "--lattice", "0.2:5:25"];
    let a = run(&args);
    assert!(a.status.success());
    let text = stdout(&a);
    assert!(text.starts_with("x1,x2,value\n"));
    assert_eq!(rows(&text).len(), 625);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let c = bin().args(args).arg("--threads").arg("1").output().unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn kernel_eval_matches_library() {
    let o = run(&["kernel-eval", "--family", "modified_bessel", "--s", "0", "--lattice", "0.5:1:2"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    let at_one = r.iter().find(|row| row[0] == row[1] && row[0].parse::<f64>().unwrap() == 1.0).unwrap();
    let want = modified_bessel_kernel(0.0f64, 1.0, 1.0).unwrap();
    assert_eq!(at_one[2].parse::<f64>().unwrap(), want);
    json_checked(&["kernel-eval", "--family", "modified_bessel", "--s", "0", "--lattice", "0.5:1:2", "--format", "json"]);
}

#[test]
fn kernel_eval_domain_errors() {
    let o = run(&["kernel-eval", "--family", "hat", "--n", "2", "--s", "-3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("domain"));
    let o = run(&["kernel-eval", "--family", "nope", "--s", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["kernel-eval", "--family", "rescaled", "--s", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn converge_monotone_and_failing_cases() {
    let ok = run(&["converge", "--s", "0", "--kernel-only"]);
    assert_eq!(ok.status.code(), Some(0));
    let r = rows(&stdout(&ok));
    assert_eq!(r.len(), 4);
    assert!(r.iter().all(|row| row[2].is_empty() && row[3].is_empty()));

    // the lattice sup at s = 0.5 is not monotone over 16..128
    let bad = run(&["converge", "--s", "0.5", "--kernel-only"]);
    assert_eq!(bad.status.code(), Some(3));
    assert_eq!(rows(&stdout(&bad)).len(), 4);

    // a single n makes no monotonicity claim
    let one = run(&["converge", "--s", "0.5", "--n", "32", "--kernel-only"]);
    assert_eq!(one.status.code(), Some(0));

    let v = json_checked(&["converge", "--s", "0.5", "--n", "32,64", "--format", "json"]);
    assert_eq!(v["monotone"]["local_trace_norm"], true);
    assert_eq!(v["monotone"]["sqrt_f_trace_norm"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);

    assert_eq!(run(&["converge", "--s", "0", "--n", "32,16", "--kernel-only"]).status.code(), Some(2));
}

#[test]
fn tails_rows_and_empty_list() {
    let o = run(&["tails", "--s", "0.5", "--n", "8,16", "--r", "8", "--delta", "0.0078125"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 6);
    let sup_tail = r.iter().find(|row| row[0] == "tail" && row[1] == "sup").unwrap();
    let max_tail = r
        .iter()
        .filter(|row| row[0] == "tail" && row[1] != "sup")
        .map(|row| row[5].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert_eq!(sup_tail[5].parse::<f64>().unwrap(), max_tail);
    assert!(max_tail < 0.05);

    let empty = run(&["tails", "--s", "0", "--n", ""]);
    assert!(empty.status.success());
    assert_eq!(stdout(&empty), "quantity,n,cutoff,value,remainder,total,resolution_gap\n");
    json_checked(&["tails", "--s", "-0.5", "--n", "8,16", "--r", "1024", "--delta", "0.01", "--format", "json"]);
}

#[test]
fn sample_is_seeded_and_enumerable() {
    let dir = std::env::temp_dir().join(format!("besselforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let points = dir.join("points.csv");
    let hist = dir.join("hist.csv");
    let args = |seed: &str| {
        vec![
            "sample".to_string(),
            "--samples".into(),
            "500".into(),
            "--seed".into(),
            seed.into(),
            "--out".into(),
            hist.to_str().unwrap().into(),
            "--points-out".into(),
            points.to_str().unwrap().into(),
        ]
    };
    assert!(bin().args(args("4")).status().unwrap().success());
    let (h1, p1) = (std::fs::read(&hist).unwrap(), std::fs::read(&points).unwrap());
    assert!(bin().args(args("4")).env("BESSELFORGE_THREADS", "1").status().unwrap().success());
    assert_eq!(std::fs::read(&hist).unwrap(), h1);
    assert_eq!(std::fs::read(&points).unwrap(), p1);
    assert!(bin().args(args("5")).status().unwrap().success());
    assert_ne!(std::fs::read(&points).unwrap(), p1);

    let pts = rows(std::str::from_utf8(&p1).unwrap());
    assert_eq!(pts.len(), 500 * 8);
    assert!(std::str::from_utf8(&h1).unwrap().starts_with("bin_lo,bin_hi,mean_count,stderr,theory\n"));
    std::fs::remove_dir_all(&dir).unwrap();

    let v = json_checked(&[
        "sample", "--n", "2", "--grid", "1e-2:1e1:1:2", "--bins", "1e-2:10:3", "--samples", "100000", "--seed", "3",
        "--format", "json",
    ]);
    assert_eq!(v["atoms"], 6);
    assert_eq!(v["exact_cardinality"], true);
    assert!(v["chi_square"]["p_value"].as_f64().unwrap() > 1e-3, "{}", v["chi_square"]);
}

#[test]
fn hellinger_outputs() {
    let o = run(&["hellinger", "--s", "0", "--s2", "1", "--n", "200"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 199);
    let sums: Vec<f64> = r.iter().map(|row| row[3].parse().unwrap()).collect();
    assert!(sums.windows(2).all(|w| w[1] >= w[0]));

    let v = json_checked(&["hellinger", "--s", "0", "--s2", "1", "--n", "1000", "--format", "json"]);
    assert_eq!(v["verdict"], "singular");
    let v = json_checked(&["hellinger", "--s", "0.3", "--s2", "0.3", "--n", "1000", "--format", "json"]);
    assert_eq!(v["verdict"], "not-decided");
    let eq = run(&["hellinger", "--s", "0.3", "--s2", "0.3", "--n", "50"]);
    assert!(rows(&stdout(&eq)).iter().all(|row| row[2].parse::<f64>().unwrap() == 0.0));

    assert_eq!(run(&["hellinger", "--s", "0", "--s2", "1", "--n", "1"]).status.code(), Some(2));
}

#[test]
fn orbital_sweep() {
    let v = json_checked(&["orbital", "--n", "16", "--samples", "10000", "--seed", "1", "--format", "json"]);
    let entry = &v["per_n"][0];
    assert!(entry["delta"].as_f64().unwrap() >= 1e-3);
    assert!(entry["max_stderr"].as_f64().unwrap() < 0.01);

    let zero = run(&["orbital", "--n", "8", "--sweep", "0", "--samples", "50"]);
    let r = rows(&stdout(&zero));
    assert_eq!(r[0][3].parse::<f64>().unwrap(), 1.0);
    assert_eq!(r[0][5].parse::<f64>().unwrap(), 0.0);

    let a = run(&["orbital", "--n", "8", "--samples", "500", "--seed", "2"]);
    let b = run(&["orbital", "--n", "8", "--samples", "500", "--seed", "2", "--threads", "3"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(run(&["orbital", "--n", "2", "--m", "3"]).status.code(), Some(2));
}
