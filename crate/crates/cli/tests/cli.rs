use std::path::Path;
use std::process::{Command, Output};

fn rcf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcf"))
        .args(args)
        .output()
        .expect("failed to run rcf")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header row and data rows of a CSV emission, comments dropped.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn summary(text: &str, key: &str) -> String {
    let prefix = format!("# summary {key}=");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no summary {key}"))
        .to_owned()
}

#[test]
fn missing_alpha_is_a_usage_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let o = rcf(&["lyapunov", "--depth", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn inverted_intervals_are_usage_errors() {
    assert_eq!(rcf(&["alphac", "--interval", "0.3:0.25"]).status.code(), Some(2));
    assert_eq!(
        rcf(&["lyapunov", "--alpha-range", "0.3:0.2:0.01"]).status.code(),
        Some(2)
    );
}

#[test]
fn domain_and_resource_errors_have_their_codes() {
    assert_eq!(rcf(&["alphac", "--interval", "0.1:0.3"]).status.code(), Some(3));
    assert_eq!(rcf(&["lyapunov", "--alpha=-1", "--steps", "0"]).status.code(), Some(3));
    let o = rcf(&["lp", "--r", "30", "--full"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2^30"));
}

#[test]
fn lyapunov_grid_brackets_are_ordered() {
    let o = rcf(&[
        "lyapunov",
        "--alpha-range",
        "0.17:0.45:0.01",
        "--depth",
        "20",
        "--steps",
        "0",
    ]);
    assert!(o.status.success());
    let (h, rows) = table(&stdout(&o));
    assert_eq!(rows.len(), 29);
    let (lo, up) = (column(&h, &rows, "lambda_lower"), column(&h, &rows, "lambda_upper"));
    assert!(lo.iter().zip(&up).all(|(l, u)| l <= u));
}

#[test]
fn lyapunov_above_threshold_at_upper_endpoint() {
    let o = rcf(&["lyapunov", "--alpha", "0.2689", "--steps", "1000", "--trials", "50"]);
    let (h, rows) = table(&stdout(&o));
    assert!(column(&h, &rows, "lambda_lower")[0] > 0.346574);
    assert!(column(&h, &rows, "dim_bound")[0] < 1.0);
}

#[test]
fn uncertified_columns_are_blank_below_one_sixth() {
    let o = rcf(&["lyapunov", "--alpha", "0.1", "--steps", "200", "--trials", "20"]);
    assert!(o.status.success());
    let (h, rows) = table(&stdout(&o));
    let i = h.iter().position(|c| c == "lambda_lower").unwrap();
    assert_eq!(rows[0][i], "");
    assert!(column(&h, &rows, "mc_estimate")[0] > 0.0);
}

#[test]
fn csv_is_byte_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let p = dir.path().join(name);
        let o = rcf(&[
            "lyapunov",
            "--alpha-range",
            "0.2:0.3:0.05",
            "--depth",
            "12",
            "--steps",
            "2000",
            "--trials",
            "64",
            "--seed",
            "7",
            "--threads",
            threads,
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        std::fs::read_to_string(p).unwrap()
    };
    let (a, b, c) = (run("a.csv", "1"), run("b.csv", "1"), run("c.csv", "2"));
    assert_eq!(a, b);
    let strip = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with("# param threads="))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&c));
}

#[test]
fn alphac_default_contains_published_interval() {
    let o = rcf(&["alphac"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lo: f64 = summary(&text, "alpha_lo").parse().unwrap();
    let hi: f64 = summary(&text, "alpha_hi").parse().unwrap();
    assert!(0.2688 <= lo && lo < hi && hi <= 0.2689, "[{lo}, {hi}]");
    assert_eq!(summary(&text, "endpoints_certified"), "true");
}

#[test]
fn shallow_alphac_is_flagged_and_wider() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = rcf(&["alphac", "--max-depth", "8", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(summary(&text, "flagged"), "true");
    let width: f64 = summary(&text, "width").parse().unwrap();
    assert!(width > 1e-4);
    assert!(text.contains(",undetermined,"));
}

#[test]
fn lp_thresholds_match_closed_forms() {
    let o = rcf(&["lp", "--r", "1,2"]);
    let (h, rows) = table(&stdout(&o));
    let a = column(&h, &rows, "alpha_p");
    assert!((a[0] - (3.0 * 2f64.sqrt() - 4.0)).abs() < 1e-6);
    assert!((a[1] - (6f64.sqrt() / 2.0 - 1.0)).abs() < 1e-6);
}

#[test]
fn lp_sequence_decreases_toward_limit() {
    let o = rcf(&["lp", "--r", "1..16"]);
    let (h, rows) = table(&stdout(&o));
    let a = column(&h, &rows, "alpha_p");
    assert!(a.windows(2).all(|w| w[1] < w[0]));
    assert!(column(&h, &rows, "limit_gap").iter().all(|&g| g > 0.0));
}

#[test]
fn json_mirrors_csv() {
    let o = rcf(&["lp", "--r", "2", "--format", "json", "--full"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["subcommand"], "lp");
    assert_eq!(v["columns"][5], "gamma_full");
    let row = &v["rows"][0];
    assert!((row[3].as_f64().unwrap() - row[5].as_f64().unwrap()).abs() < 1e-8);
    assert!(v["wall_time_s"].as_f64().is_some());
}

#[test]
fn sample_leaves_the_central_gap_empty() {
    let o = rcf(&["sample", "--alpha", "0.6", "--trials", "1000000", "--bins", "200"]);
    let text = stdout(&o);
    assert_eq!(summary(&text, "support"), "cantor");
    assert_eq!(summary(&text, "draws_in_gap"), "0");
    let m: f64 = summary(&text, "m_alpha").parse().unwrap();
    let (gap_lo, gap_hi) = (m / (1.0 + m), 0.6 / 1.6);
    let (h, rows) = table(&text);
    let (lo, hi, count) = (
        column(&h, &rows, "bin_lo"),
        column(&h, &rows, "bin_hi"),
        column(&h, &rows, "count"),
    );
    let inside: Vec<usize> = (0..rows.len()).filter(|&i| lo[i] > gap_lo && hi[i] < gap_hi).collect();
    assert!(!inside.is_empty());
    assert!(inside.iter().all(|&i| count[i] == 0.0));
    assert_eq!(count.iter().sum::<f64>(), 1e6);
}

#[test]
fn cdf_tables_decrease_with_depth() {
    let o = rcf(&["cdf", "--alpha", "0.3", "--depths", "1,2,4,8", "--grid", "50"]);
    let text = stdout(&o);
    assert_eq!(summary(&text, "decreasing_in_depth"), "true");
    let (h, rows) = table(&text);
    let f = column(&h, &rows, "cdf");
    assert_eq!(f.len(), 4 * 51);
    for d in 0..3 {
        for i in 0..51 {
            assert!(f[(d + 1) * 51 + i] <= f[d * 51 + i] + 1e-13);
        }
    }
}

#[test]
fn gw_binary_reports_small_residual_and_ks() {
    let o = rcf(&["gw", "--grid", "4096"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(summary(&text, "residual").parse::<f64>().unwrap() < 1e-4);
    assert!(summary(&text, "ks").parse::<f64>().unwrap() < 0.01);
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn offspring_files_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", "[[1, 0.25], [3, 0.75]]");
    let extinct = write(dir.path(), "extinct.json", "[[0, 0.1], [2, 0.9]]");
    let garbled = write(dir.path(), "garbled.json", "{\"k\": 1}");
    let o = rcf(&["shorted", "--offspring", &good, "--trials", "20", "--depth", "20"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("# param offspring=1:0.25 3:0.75"));
    assert_eq!(rcf(&["gw", "--offspring", &extinct]).status.code(), Some(3));
    assert_eq!(rcf(&["gw", "--offspring", &garbled]).status.code(), Some(2));
}
