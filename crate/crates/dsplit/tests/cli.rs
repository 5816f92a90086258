//! End-to-end checks of the command-line binary: exit codes, CSV shape,
//! rerun determinism, scheme files, and config/flag interplay.

use dsplit::{scheme_to_json, LoadedScheme, SchemeCatalog};
use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsplit")).args(args).output().unwrap()
}

fn stdout_lines(out: &Output) -> Vec<String> {
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(str::to_owned).collect()
}

#[test]
fn list_methods_prints_the_catalog() {
    let out = run(&["list-methods"]);
    assert_eq!(out.status.code(), Some(0));
    let lines = stdout_lines(&out);
    assert_eq!(lines.len(), 8, "header plus seven bundled schemes");
    assert_eq!(lines[0], "name,stages,p_component,q_averaged,evals_per_step,symmetric,complex");
    assert!(lines.contains(&"BM4,7,4,4,13,true,false".to_string()));
    assert!(lines.contains(&"SPL24+,3,2,4,5,true,true".to_string()));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, _) in [(&a, 0), (&b, 1)] {
        let out = run(&[
            "converge",
            "--method",
            "BM4",
            "--problem",
            "oscillator",
            "--h",
            "0.2",
            "--levels",
            "4",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "reruns produced different bytes");
}

#[test]
fn scheme_file_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = SchemeCatalog::<f64>::with_builtins();
    let json = scheme_to_json(&LoadedScheme::Splitting(catalog.get("BM4").unwrap().clone()));
    let scheme_path = dir.path().join("bm4.json");
    fs::write(&scheme_path, json).unwrap();

    let from_file = dir.path().join("file.csv");
    let from_builtin = dir.path().join("builtin.csv");
    for (method, path) in
        [(scheme_path.to_str().unwrap(), &from_file), ("BM4", &from_builtin)]
    {
        let out = run(&[
            "converge",
            "--method",
            method,
            "--problem",
            "exp",
            "--h",
            "0.2",
            "--levels",
            "4",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(
        fs::read(&from_file).unwrap(),
        fs::read(&from_builtin).unwrap(),
        "scheme file and builtin disagree"
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["converge", "--no-such-flag"]).status.code(), Some(2));
}

#[test]
fn unknown_method_exits_one() {
    let out = run(&["converge", "--method", "NOPE", "--problem", "exp", "--h", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("NOPE"), "stderr should name the method: {stderr}");
}

#[test]
fn step_and_tolerance_flags_conflict() {
    let out = run(&[
        "integrate",
        "--method",
        "BM4",
        "--problem",
        "exp",
        "--h",
        "0.1",
        "--tol",
        "1e-6",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn converge_without_steps_exits_one() {
    let out = run(&["converge", "--method", "BM4", "--problem", "exp"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_equals_flags_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"problem": "oscillator", "method": "S2", "h": [0.2, 0.1, 0.05], "tf": 1.0}"#,
    )
    .unwrap();

    let from_cfg = dir.path().join("cfg.csv");
    let from_flags = dir.path().join("flags.csv");
    let out = run(&[
        "converge",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        from_cfg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let out = run(&[
        "converge",
        "--method",
        "S2",
        "--problem",
        "oscillator",
        "--h",
        "0.2",
        "--h",
        "0.1",
        "--h",
        "0.05",
        "--tf",
        "1",
        "--out",
        from_flags.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read(&from_cfg).unwrap(), fs::read(&from_flags).unwrap());

    // A --method flag replaces the config's method list.
    let overridden = dir.path().join("override.csv");
    let out = run(&[
        "converge",
        "--config",
        cfg.to_str().unwrap(),
        "--method",
        "BM4",
        "--out",
        overridden.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let pure = dir.path().join("pure.csv");
    let out = run(&[
        "converge",
        "--method",
        "BM4",
        "--problem",
        "oscillator",
        "--h",
        "0.2",
        "--h",
        "0.1",
        "--h",
        "0.05",
        "--tf",
        "1",
        "--out",
        pure.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read(&overridden).unwrap(), fs::read(&pure).unwrap());
}

#[test]
fn adaptive_underflow_writes_csv_then_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let out = run(&[
        "integrate",
        "--method",
        "BM4",
        "--problem",
        "exp",
        "--tol",
        "1e-30",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "tolerance far below round-off must underflow");
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,h,err_est,accepted,nfev_cumulative,state_norm");
    assert!(lines.len() >= 2, "trace should still hold the rows before the underflow");
}

#[test]
fn fixed_step_trace_shape() {
    let out = run(&[
        "integrate", "--method", "LT", "--problem", "exp", "--h", "0.25", "--tf", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "t,h,err_est,accepted,nfev_cumulative,state_norm");
    assert_eq!(lines.len(), 6, "initial row plus four steps");
    assert!(lines[1].starts_with("0.0000000000000000e0,"), "initial row: {}", lines[1]);
    let last: Vec<&str> = lines[5].split(',').collect();
    assert_eq!(last[0], "1.0000000000000000e0", "final time");
    assert_eq!(last[3], "true");
    assert_eq!(last[4], "8", "two evaluations per step, four steps");
}

#[test]
fn unstable_wave_cell_is_recorded_not_fatal() {
    let out = run(&[
        "wave", "--method", "RK4", "--h", "0.05", "--tf", "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "recorded instability is not an error");
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "method,h,nfev,error,norm_error,stable");
    let row = &lines[1];
    assert!(row.starts_with("RK4,"), "row: {row}");
    assert!(row.ends_with(",false"), "row should be flagged unstable: {row}");
    assert!(row.contains(",nan,"), "unstable metrics are nan: {row}");
}
