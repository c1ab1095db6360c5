//! End-to-end tests run against the compiled binary: flag parsing, config
//! merging, output formats, exit codes, and determinism.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sswalk"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should run")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("process exited normally")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is utf-8")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is utf-8")
}

#[test]
fn help_and_version_exit_zero() {
    let help = run(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(stdout_of(&help).contains("verify"));
    let version = run(&["--version"]);
    assert_eq!(code(&version), 0);
    assert!(stdout_of(&version).contains("sswalk"));
}

#[test]
fn missing_command_is_a_usage_error() {
    let out = run(&[]);
    assert_eq!(code(&out), 1);
    assert!(stderr_of(&out).contains("command"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = run(&["walk", "--bogus", "3"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn walk_without_n_is_a_usage_error() {
    let out = run(&["walk"]);
    assert_eq!(code(&out), 1);
    assert!(stderr_of(&out).contains("--n"));
}

#[test]
fn unknown_claim_is_rejected() {
    let out = run(&["verify", "--claim", "perpetual-motion"]);
    assert_eq!(code(&out), 1);
    assert!(stderr_of(&out).contains("perpetual-motion"));
}

#[test]
fn verify_emits_ndjson_with_metadata_and_passes() {
    let out = run(&["verify", "--claim", "cyclic-property", "--theta1", "pi/3", "--n", "8"]);
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let meta: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(meta["meta"]["tool"], "sswalk");
    assert_eq!(meta["meta"]["config"]["command"], "verify");
    assert_eq!(meta["meta"]["config"]["n"], 8);
    let record: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
    assert_eq!(record["claim_id"], "cyclic-property");
    assert!(record["residual"].as_f64().unwrap() <= 1e-12);
    assert!(stderr_of(&out).contains("[ok]"));
}

#[test]
fn tight_tolerance_fails_with_exit_two() {
    // This scheme's residual is ~2e-16: exactly representable but nonzero.
    let out = run(&["verify", "--claim", "single-qplate-scheme", "--tolerance", "1e-18"]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("FAIL"));
}

#[test]
fn pi_fraction_and_numeric_angles_agree_exactly() {
    let symbolic = run(&["spectrum", "--theta1", "pi/4", "--kgrid", "8"]);
    let numeric = run(&["spectrum", "--theta1", "0.7853981633974483", "--kgrid", "8"]);
    assert_eq!(code(&symbolic), 0);
    assert_eq!(stdout_of(&symbolic), stdout_of(&numeric));
}

#[test]
fn spectrum_csv_has_header_and_full_grid() {
    let out = run(&["spectrum", "--theta1", "pi/4", "--theta2", "pi/8", "--kgrid", "16"]);
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# meta: {"));
    assert_eq!(lines[1], "k,e,n1,n2,n3");
    assert_eq!(lines.len(), 2 + 16);
    // Locale-independent cells: '.' decimal separator, ',' field separator.
    assert!(lines[2].contains('.'));
    assert!(!text.contains(';'));
}

#[test]
fn walk_csv_covers_every_step_and_site() {
    let out = run(&["walk", "--n", "8", "--steps", "3"]);
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    assert_eq!(text.lines().count(), 2 + 4 * 8);
    assert!(text.lines().nth(1) == Some("step,site,probability"));
}

#[test]
fn walk_ndjson_distributions_are_normalized() {
    let out = run(&["walk", "--n", "8", "--steps", "2", "--format", "ndjson"]);
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 3);
    for line in &lines[1..] {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        let dist = record["distribution"].as_array().unwrap();
        assert_eq!(dist.len(), 8);
        let total: f64 = dist.iter().map(|v| v.as_f64().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn boundary_flags_the_interface_pair() {
    let out = run(&["boundary", "--n", "32"]);
    assert_eq!(code(&out), 0);
    assert!(stderr_of(&out).contains("2 bound modes"));
    let text = stdout_of(&out);
    let flagged = text
        .lines()
        .skip(2)
        .filter(|l| l.ends_with(",1"))
        .count();
    assert_eq!(flagged, 2);
}

#[test]
fn edge2d_reports_a_confined_packet() {
    let out = run(&["edge2d", "--n", "16", "--n2", "24", "--steps", "8"]);
    assert_eq!(code(&out), 0);
    let summary = stderr_of(&out);
    assert!(summary.contains("min window prob"), "{summary}");
    let text = stdout_of(&out);
    assert!(text.lines().nth(1) == Some("step,axis,site,probability"));
    // Per step: 16 axis-1 rows, 24 axis-2 rows, one window row.
    assert_eq!(text.lines().count(), 2 + 9 * (16 + 24 + 1));
    let window_rows: Vec<&str> = text.lines().filter(|l| l.contains(",window,")).collect();
    assert_eq!(window_rows.len(), 9);
    for row in window_rows {
        let wp: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(wp > 0.5, "window probability dropped to {wp}");
    }
}

#[test]
fn phasediagram_csv_lists_every_cell() {
    let out = run(&["phasediagram", "--tgrid", "3", "--kgrid", "64"]);
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "theta1,theta2,gap0,gap_pi,winding");
    assert_eq!(lines.len(), 2 + 9);
    // The gapless theta1 = theta2 = pi cell leaves its winding blank.
    assert!(lines[2..].iter().any(|l| l.ends_with(',')));
}

#[test]
fn config_file_supplies_command_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(
        &path,
        r#"{"command": "walk", "n": 8, "steps": 2, "theta1": "pi/3"}"#,
    )
    .unwrap();
    let from_file = run(&["--config", path.to_str().unwrap()]);
    assert_eq!(code(&from_file), 0);
    let meta_line = stdout_of(&from_file).lines().next().unwrap().to_string();
    assert!(meta_line.contains("\"command\":\"walk\""));
    assert!(meta_line.contains("\"n\":8"));
    assert!(meta_line.contains("\"steps\":2"));

    let overridden = run(&["--config", path.to_str().unwrap(), "walk", "--steps", "5"]);
    assert_eq!(code(&overridden), 0);
    let meta_line = stdout_of(&overridden).lines().next().unwrap().to_string();
    assert!(meta_line.contains("\"steps\":5"));
    assert!(meta_line.contains("\"n\":8"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"command": "walk", "bogus": 1}"#).unwrap();
    let out = run(&["--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr_of(&out).contains("bad.json"));
}

#[test]
fn out_file_is_written_atomically_and_reruns_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.csv");
    std::fs::write(&path, "stale").unwrap();
    let args = ["spectrum", "--theta1", "pi/4", "--kgrid", "8"];
    let first = bin()
        .args(args)
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(first.status.code(), Some(0));
    assert!(first.stdout.is_empty());
    let first_bytes = std::fs::read(&path).unwrap();
    assert!(first_bytes.starts_with(b"# meta"));

    let second = bin()
        .args(args)
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), first_bytes);
    // No temp files left behind.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn seed_is_recorded_in_metadata() {
    let out = run(&["walk", "--n", "8", "--steps", "2", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    assert!(stdout_of(&out)
        .lines()
        .next()
        .unwrap()
        .contains("\"seed\":7"));
}

#[test]
fn bad_threads_env_is_a_config_error() {
    let out = bin()
        .args(["walk", "--n", "8", "--steps", "2"])
        .env("SSWALK_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SSWALK_THREADS"));

    let ok = bin()
        .args(["walk", "--n", "8", "--steps", "2"])
        .env("SSWALK_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
}
