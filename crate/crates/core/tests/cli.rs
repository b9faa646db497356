use std::fs;
use std::path::Path;

use sasc::cli::cli_main;

fn run(args: &[&str]) -> i32 {
    cli_main(std::iter::once("sasc").chain(args.iter().copied()))
}

fn fixture() -> String {
    concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/separable_1000.svm"
    )
    .to_string()
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]), 0);
    assert_eq!(run(&["bp", "--help"]), 0);
    assert_eq!(run(&["--version"]), 0);
    assert_eq!(run(&[]), 1);
    assert_eq!(run(&["frobnicate"]), 1);
    assert_eq!(run(&["bp", "--no-such-flag"]), 1);
    assert_eq!(run(&["svm", "--solver", "pegasos"]), 1);
    assert_eq!(run(&["bp", "--omega", "0.5", "--n", "100"]), 1);
    assert_eq!(run(&["portfolio", "--alpha0", "auto"]), 1);
    assert_eq!(run(&["check", "--config", "/nonexistent/run.cfg"]), 1);
    assert_eq!(run(&["svm", "--data", "/nonexistent/train.svm"]), 2);
}

#[test]
fn step_above_limit_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    // L = 1 for the SVM objective, so alpha0 must not exceed 3/4.
    let code = run(&[
        "svm",
        "--data",
        &fixture(),
        "--alpha0",
        "0.9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn check_passes_on_spec_grid_point() {
    assert_eq!(
        run(&[
            "check", "--case", "1", "--m0", "2", "--omega", "2", "--alpha0", "1", "--smax", "40"
        ]),
        0
    );
}

fn bp_trace(dir: &Path, name: &str, extra: &[&str]) -> String {
    let out = dir.join(name);
    let mut args = vec![
        "bp",
        "--n",
        "1000",
        "--checkpoint-every",
        "200",
        "--no-timing",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    assert_eq!(run(&args), 0);
    fs::read_to_string(out).unwrap()
}

#[test]
fn no_timing_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = bp_trace(dir.path(), "a.csv", &["--seed", "9"]);
    let b = bp_trace(dir.path(), "b.csv", &["--seed", "9"]);
    assert_eq!(a, b);
    assert!(a.lines().skip(1).all(|l| l.ends_with(",0")));
    assert_ne!(a, bp_trace(dir.path(), "c.csv", &["--seed", "10"]));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# bp run\nseed = 3\nomega = 3\nno_timing = true\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = bp_trace(dir.path(), "f.csv", &["--config", cfg]);
    assert_eq!(
        from_file,
        bp_trace(dir.path(), "g.csv", &["--seed", "3", "--omega", "3"])
    );
    let overridden = bp_trace(dir.path(), "h.csv", &["--config", cfg, "--seed", "4"]);
    assert_eq!(
        overridden,
        bp_trace(dir.path(), "i.csv", &["--seed", "4", "--omega", "3"])
    );
    assert_ne!(overridden, from_file);
}

#[test]
fn portfolio_reads_csv_and_reports_reference_distance() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("r.csv");
    let rows = sasc::problems::gen_portfolio_returns(60, 4, 1);
    sasc::io::write_returns_csv(&rows, &data).unwrap();
    let out = dir.path().join("t.csv");
    let code = run(&[
        "portfolio",
        "--data",
        data.to_str().unwrap(),
        "--epochs",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let trace = sasc::io::read_trace_csv(&out).unwrap();
    assert!(trace.records.iter().all(|r| r.dist_to_ref.is_some()));
    let out2 = dir.path().join("u.csv");
    let code = run(&[
        "portfolio",
        "--data",
        data.to_str().unwrap(),
        "--epochs",
        "6",
        "--no-reference",
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(sasc::io::read_trace_csv(&out2)
        .unwrap()
        .records
        .iter()
        .all(|r| r.dist_to_ref.is_none()));
}

#[test]
fn bounds_curve_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    assert_eq!(
        run(&[
            "bounds",
            "--case",
            "2",
            "--m0",
            "4",
            "--alpha0",
            "0.5",
            "--points",
            "6",
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let text = fs::read_to_string(out).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("samples,objective_upper,objective_lower,feasibility")
    );
    let feas: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(feas.len(), 6);
    assert!(feas.windows(2).skip(1).all(|w| w[1] < w[0]));
}
