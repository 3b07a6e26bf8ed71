use std::fs;
use std::process::{Command, Output};

fn symvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symvol"))
        .args(args)
        .env_remove("SYMVOL_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Rows of a CSV output, header included.
fn rows(out: &Output) -> Vec<Vec<String>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(out.stdout.as_slice())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn count_uniform_row() {
    let out = symvol(&["count", "--n", "7", "--t", "8,8,8,8,8,8,8"]);
    assert!(out.status.success());
    let r = rows(&out);
    assert_eq!(r[0][..5], ["n", "t_or_h", "exact", "estimate_sci", "ratio"]);
    assert_eq!(r[1][2], "54202359");
    assert_eq!(r[1][3], "5.03E7");
    assert_eq!(r[1][4], "0.928");
    assert_eq!(r[1][9], "true");
}

#[test]
fn count_skewed_row() {
    let out = symvol(&["count", "--n", "7", "--t", "4,6,7,7,8,10,14"]);
    let r = rows(&out);
    assert_eq!(r[1][2], "7915778");
    assert_eq!(r[1][3], "8.94E6");
    assert_eq!(r[1][4], "1.129");
    assert_eq!(r[1][5..8], ["62", "150", "1586"]);
    assert_eq!(r[1][9], "false");
}

#[test]
fn count_two_rows_has_no_estimate() {
    let out = symvol(&["count", "--n", "2", "--t", "3,3"]);
    assert!(out.status.success());
    let r = rows(&out);
    assert_eq!(r[1][2], "1");
    assert_eq!(r[1][3], "n/a");
    assert_eq!(r[1][4], "");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(symvol(&["count", "--t", "1,x"]).status.code(), Some(2));
    assert_eq!(symvol(&["count", "--n", "3", "--t", "1,1"]).status.code(), Some(2));
    assert_eq!(symvol(&["count", "--t", "4"]).status.code(), Some(2));
    assert_eq!(symvol(&["volume", "--h", "1/2,2"]).status.code(), Some(2));
    assert_eq!(symvol(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn budget_refusal_exits_3_with_estimate() {
    let out = symvol(&["count", "--t", "10,10,10,10,10,10,10,10,10", "--cell-budget", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    let r = rows(&out);
    assert_eq!(r[1][2], "");
    assert_eq!(r[1][3], "8.00E14");
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn table1_has_fifteen_rows() {
    let out = symvol(&["table1"]);
    assert!(out.status.success());
    let r = rows(&out);
    assert_eq!(r.len(), 16);
    assert!(r[1..].iter().all(|row| row[0] == "7" && !row[2].is_empty()));
}

#[test]
fn table2_respects_max_n() {
    let out = symvol(&["table2", "--max-n", "6"]);
    let r = rows(&out);
    assert_eq!(r.len(), 14);
    assert_eq!(r[1][2], "36935");
    assert!(r[2..].iter().all(|row| row[2].is_empty() && row[4].is_empty()));
    let n13 = r.iter().find(|row| row[0] == "13").unwrap();
    assert_eq!(n13[3], "1.79E36");
}

#[test]
fn json_output_parses() {
    let out = symvol(&["count", "--t", "2,2,2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["exact"], "1");
    assert_eq!(v[0]["n"], 3);
}

#[test]
fn estimate_with_lower_bound() {
    let out = symvol(&["estimate", "--t", "8,8,8,8,8,8,8", "--alpha", "0.25"]);
    assert!(out.status.success());
    let r = rows(&out);
    let col = |name: &str| r[0].iter().position(|c| c == name).unwrap();
    assert_eq!(r[1][col("estimate_sci")], "5.03E7");
    assert!(!r[1][col("lower_bound_sci")].is_empty());
    assert_eq!(symvol(&["estimate", "--t", "3,3"]).status.code(), Some(2));
}

#[test]
fn volume_reports_exact_lattice_value() {
    let out = symvol(&["volume", "--h", "1/2,1/2,1/2,1/2", "--samples", "20000"]);
    assert!(out.status.success());
    let r = rows(&out);
    let col = |name: &str| r[0].iter().position(|c| c == name).unwrap();
    assert_eq!(r[1][col("lattice_exact")], "1/8");
    assert!(!r[1][col("mc_estimate")].is_empty());
}

#[test]
fn figure_domains() {
    let out = symvol(&["figure", "fig2b", "--grid", "4", "--samples", "1000"]);
    let r = rows(&out);
    assert_eq!(r[0], ["x", "formula_volume", "mc_estimate", "mc_stderr"]);
    assert_eq!(r.len(), 5);
    assert_eq!(r[4][0], "0.333333");

    let empty = symvol(&["figure", "fig2a", "--grid", "0"]);
    assert!(empty.status.success());
    assert_eq!(stdout(&empty).lines().count(), 1);
    assert!(String::from_utf8_lossy(&empty.stderr).contains("warning"));

    assert_eq!(symvol(&["figure", "fig1", "--n", "10"]).status.code(), Some(2));
}

#[test]
fn figure_seeds_agree_statistically() {
    let run = |seed: &str| {
        rows(&symvol(&[
            "figure", "fig1", "--n", "7", "--grid", "21", "--samples", "100000", "--seed", seed,
        ]))
    };
    let (a, b) = (run("1"), run("2"));
    assert_eq!(a.len(), 22);
    for (ra, rb) in a[1..].iter().zip(&b[1..]) {
        let f = |s: &str| s.parse::<f64>().unwrap();
        let diff = (f(&ra[2]) - f(&rb[2])).abs();
        let sigma = (f(&ra[3]).powi(2) + f(&rb[3]).powi(2)).sqrt();
        assert!(diff <= 3.0 * sigma.max(f64::MIN_POSITIVE) || diff == 0.0, "{ra:?} {rb:?}");
    }
}

#[test]
fn cache_round_trip_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("counts.jsonl");
    let p = path.to_str().unwrap();

    let first = symvol(&["count", "--t", "7,8,8,8,8,8,9", "--cache-path", p]);
    assert!(first.status.success());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"t_sorted\":[7,8,8,8,8,8,9]"));
    assert!(text.contains("\"count\":\"50720005\""));

    // the cached value is used even when the budget forbids computing it
    let second = symvol(&["count", "--t", "9,8,8,8,8,8,7", "--cache-path", p, "--cell-budget", "0"]);
    assert!(second.status.success());
    assert_eq!(rows(&second)[1][2], "50720005");

    fs::write(&path, format!("{text}not json\n")).unwrap();
    let listed = symvol(&["cache", "--cache-path", p]);
    assert!(listed.status.success());
    assert_eq!(rows(&listed).len(), 2);
    assert!(String::from_utf8_lossy(&listed.stderr).contains(":2:"));
}

#[test]
fn cache_path_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("env.jsonl");
    let out = Command::new(env!("CARGO_BIN_EXE_symvol"))
        .args(["count", "--t", "2,2,2"])
        .env("SYMVOL_CACHE", &path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(fs::read_to_string(&path).unwrap().contains("\"t_sorted\":[2,2,2]"));
}

#[test]
fn locked_cache_fails_fast() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("counts.jsonl");
    fs::write(dir.path().join("counts.jsonl.lock"), "1").unwrap();
    let out = symvol(&["count", "--t", "2,2,2", "--cache-path", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lock"));
}
