use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_codashrink"));
    c.env_remove("CODASHRINK_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Data rows of a CSV as floats, skipping the header and non-numeric cells.
fn numbers(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').filter_map(|f| f.parse().ok()).collect())
        .collect()
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
    }
}

#[test]
fn transform_clr_and_error_rows() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.csv", "a,b,c\n1,2,3\n0,4,5\n");
    let o = run(&["transform", s(&m), "--op", "clr"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "a,b,c,error");
    let q = [1.0f64 / 6.0, 1.0 / 3.0, 0.5];
    let g = q.iter().map(|v| v.ln()).sum::<f64>() / 3.0;
    let expected: Vec<f64> = q.iter().map(|v| v.ln() - g).collect();
    assert_close(&numbers(&text)[0], &expected, 1e-15);
    assert!(lines[2].starts_with(",,,"));
    assert!(lines[2].contains("zero part"));
}

#[test]
fn transform_all_rows_failing_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.csv", "0,1\n2,0\n");
    let o = run(&["transform", s(&m), "--op", "alr"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn transform_power_one_is_closure_and_keeps_zeros() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.tsv", "id\tx\ty\tz\ns1\t2\t0\t6\n");
    let o = run(&[
        "transform",
        s(&m),
        "--op",
        "power",
        "--beta",
        "1",
        "--id-col",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("id,x,y,z,error\ns1,"));
    assert_close(&numbers(&text)[0], &[0.25, 0.0, 0.75], 0.0);

    let o = run(&[
        "transform",
        s(&m),
        "--op",
        "gpower",
        "--beta",
        "0.5",
        "--id-col",
    ]);
    assert_eq!(o.status.code(), Some(0));
    // uniform target on the support {x, z}: closure(sqrt(1/4), sqrt(3/4))
    let r = (0.25f64).sqrt() + (0.75f64).sqrt();
    assert_close(
        &numbers(&stdout(&o))[0],
        &[0.5 / r, 0.0, 0.75f64.sqrt() / r],
        1e-15,
    );

    let o = run(&["transform", s(&m), "--op", "power", "--id-col"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn estimate_examples() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.csv", "1,2,3\n");
    let o = run(&["estimate", s(&m), "--method", "shrink", "--lambda", "auto"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("x1,x2,x3,weight,clamped"));
    assert!(text.lines().nth(1).unwrap().ends_with(",true"));
    assert_close(
        &numbers(&text)[0],
        &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0],
        1e-15,
    );

    let o = run(&["estimate", s(&m), "--method", "empirical"]);
    assert_close(
        &numbers(&stdout(&o))[0],
        &[1.0 / 6.0, 1.0 / 3.0, 0.5],
        1e-16,
    );

    let o = run(&["estimate", s(&m), "--method", "shrink", "--lambda", "0.5"]);
    assert_close(
        &numbers(&stdout(&o))[0],
        &[0.25, 1.0 / 3.0, 5.0 / 12.0, 0.5],
        1e-15,
    );
}

#[test]
fn expshrink_with_beta_one_is_empirical_and_preserves_zeros() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.csv", "4,1,1,0\n0,3,0,9\n");
    let o = run(&["estimate", s(&m), "--method", "expshrink", "--beta", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = numbers(&stdout(&o));
    assert_close(
        &rows[0],
        &[4.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.0, 1.0],
        1e-15,
    );
    assert_close(&rows[1], &[0.0, 0.25, 0.0, 0.75, 1.0], 1e-15);

    let o = run(&["estimate", s(&m), "--method", "expshrink"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for row in numbers(&stdout(&o)) {
        let beta = row[4];
        assert!((0.0..=1.0).contains(&beta));
    }
    let rows = numbers(&stdout(&o));
    assert_eq!(rows[0][3], 0.0);
    assert_eq!((rows[1][0], rows[1][2]), (0.0, 0.0));
}

#[test]
fn automatic_weights_reject_fractional_counts() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.csv", "id,a,b\ns1,1,2\ns2,1.5,2\n");
    let o = run(&["estimate", s(&m), "--method", "shrink", "--id-col"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("s2"), "{}", stderr(&o));
    let o = run(&[
        "estimate",
        s(&m),
        "--method",
        "shrink",
        "--id-col",
        "--lambda",
        "0.2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["estimate", s(&m), "--method", "empirical", "--id-col"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn estimate_with_target_file() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.csv", "2,2\n");
    let t = write(&dir, "t.csv", "3,1\n");
    let o = run(&[
        "estimate",
        s(&m),
        "--method",
        "shrink",
        "--lambda",
        "0.5",
        "--target",
        s(&t),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_close(&numbers(&stdout(&o))[0], &[0.625, 0.375, 0.5], 1e-15);
    let bad = write(&dir, "bad.csv", "1,1,1\n");
    let o = run(&["estimate", s(&m), "--method", "shrink", "--target", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn input_errors_exit_two_with_line_numbers() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.csv", "a,b\n1,2\n3\n");
    let o = run(&["estimate", s(&m), "--method", "empirical"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let m = write(&dir, "n.csv", "1,2\n-1,2\n");
    let o = run(&["transform", s(&m), "--op", "clr"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"));

    let o = run(&["transform", "/nonexistent/file.csv", "--op", "clr"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["estimate", s(&m), "--method", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["estimate", s(&m), "--method", "shrink", "--lambda", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn emitted_matrices_read_back_exactly() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.csv", "a,b,c\n1,2,4\n3,7,11\n");
    let first = dir.path().join("first.csv");
    let o = run(&[
        "estimate",
        s(&m),
        "--method",
        "shrink",
        "--lambda",
        "0.3",
        "--out",
        s(&first),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&first).unwrap();
    // drop the weight columns and feed the estimates back in
    let values: String = text
        .lines()
        .map(|l| l.split(',').take(3).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    let again = write(&dir, "again.csv", &values);
    let o = run(&["estimate", s(&again), "--method", "empirical"]);
    let a = numbers(&text);
    let b = numbers(&stdout(&o));
    for (x, y) in a.iter().zip(&b) {
        assert_close(&x[..3], &y[..3], 1e-16);
    }
}

#[test]
fn json_output() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.csv", "1,3\n");
    let o = run(&[
        "estimate",
        s(&m),
        "--method",
        "empirical",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["x2"].as_f64(), Some(0.75));
    assert!(v[0]["weight"].is_null());
}

#[test]
fn moments_examples() {
    let o = run(&["moments", "--q", "uniform3", "--n", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("part,q,clr,mean,var,var_printed"));
    for row in numbers(&text) {
        assert!(row[3].abs() < 1e-15);
        assert!((row[4] - 0.2).abs() < 1e-15);
        assert!((row[5] - 1.0 / 45.0).abs() < 1e-15);
    }
    let o = run(&["moments", "--q", "0.5,0.25,0.25", "--n", "100"]);
    let rows = numbers(&stdout(&o));
    assert!((rows[0][3] - 0.468765).abs() < 5e-7, "{}", rows[0][3]);

    let o = run(&["moments", "--q", "0.5,0.5,0", "--n", "10"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["moments", "--q", "1,1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["moments", "--q", "1,1", "--n", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["moments", "--q", "1,1", "--n", "5", "--renormalize"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn moments_with_monte_carlo_columns() {
    let o = run(&[
        "moments", "--counts", "30,50,20", "--mc", "20000", "--seed", "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text
        .lines()
        .next()
        .unwrap()
        .ends_with("mc_mean,mc_var,mc_se,mc_used,mc_rejected"));
    for row in numbers(&text) {
        let (mean, mc_mean, se) = (row[3], row[6], row[8]);
        assert!((mean - mc_mean).abs() < 4.0 * se + 1e-4);
        assert_eq!(row[9] + row[10], 20000.0);
    }
    assert_eq!(
        run(&["moments", "--counts", "30,50,20", "--mc", "20000", "--seed", "3"]).stdout,
        o.stdout
    );
}

fn sha(path: &Path) -> String {
    format!("{:x}", Sha256::digest(fs::read(path).unwrap()))
}

#[test]
fn simulate_default_row_count_and_determinism() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let o = run(&["simulate", "--out", s(&a), "--threads", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("exp_shrinkage"));
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("scenario,n,replicate,estimator,mse,weight")
    );
    assert_eq!(text.lines().count(), 1 + 13_500);
    let o = bin()
        .args(["simulate", "--quiet", "--out", s(&b)])
        .env("CODASHRINK_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(sha(&a), sha(&b));
    // 17 significant digits
    let mse = text.lines().nth(1).unwrap().split(',').nth(4).unwrap();
    assert_eq!(
        mse.split('e').next().unwrap().replace(['.', '-'], "").len(),
        17
    );
}

#[test]
fn simulate_smoke_run_is_fast() {
    let start = Instant::now();
    let o = run(&["simulate", "--replicates", "1", "--quiet"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert_eq!(stdout(&o).lines().count(), 1 + 27);
}

#[test]
fn simulate_flags_and_config() {
    let dir = TempDir::new().unwrap();
    let o = run(&[
        "simulate",
        "--dim",
        "8",
        "--support",
        "3",
        "--sizes",
        "10,40",
        "--replicates",
        "4",
        "--seed",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 1 + 2 * 4 * 3);
    assert!(stderr(&o).contains("D8_d3"));

    let cfg = write(
        &dir,
        "cfg.json",
        r#"{"scenarios":[{"label":"s","dim":6,"support_size":6,"dirichlet_alpha0":2.0}],
            "sample_sizes":[12],"replicates":5,"seed":1}"#,
    );
    let o = run(&[
        "simulate",
        "--config",
        s(&cfg),
        "--replicates",
        "2",
        "--quiet",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 1 + 2 * 3);

    let bad = write(
        &dir,
        "bad.json",
        r#"{"scenarios":[{"label":"s","dim":6,"support_size":9,"dirichlet_alpha0":2.0}],
            "sample_sizes":[12],"replicates":5,"seed":1}"#,
    );
    let o = run(&["simulate", "--config", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("scenarios[0].support_size"),
        "{}",
        stderr(&o)
    );

    let typo = write(&dir, "typo.json", r#"{"replicate": 3}"#);
    assert_eq!(
        run(&["simulate", "--config", s(&typo)]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["simulate", "--replicates", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["simulate", "--sizes", "1"]).status.code(), Some(2));
}

#[test]
fn simulate_json_records() {
    let o = run(&[
        "simulate",
        "--dim",
        "5",
        "--sizes",
        "10",
        "--replicates",
        "2",
        "--format",
        "json",
        "--quiet",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 6);
    assert_eq!(v[2]["estimator"], "exp_shrinkage");
}

#[test]
fn bad_thread_settings_are_input_errors() {
    let o = bin()
        .args(["moments", "--q", "uniform3", "--n", "5"])
        .env("CODASHRINK_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(
        run(&["--threads", "0", "moments", "--q", "uniform3", "--n", "5"])
            .status
            .code(),
        Some(2)
    );
}
