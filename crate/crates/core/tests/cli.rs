//! End-to-end runs of the `pdlmi` binary and of the library entry point.

use std::path::PathBuf;
use std::process::{Command, Output};

use pdlmi::cli::{parse_problem, run, Report, RunOptions, Target, Value, EXIT_INPUT, EXIT_OK, EXIT_REFUSED};

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/problems").join(name)
}

fn pdlmi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdlmi")).args(args).output().unwrap()
}

fn machine(cmd: &str, name: &str, extra: &[&str]) -> (Report, i32) {
    let path = problem(name);
    let mut args = vec![cmd, path.to_str().unwrap(), "--format", "machine"];
    args.extend_from_slice(extra);
    let out = pdlmi(&args);
    let text = String::from_utf8(out.stdout).unwrap();
    (Report::parse_machine(&text).unwrap(), out.status.code().unwrap())
}

fn text(r: &Report, key: &str) -> String {
    match r.get(key) {
        Some(Value::Text(s)) => s.clone(),
        other => panic!("{key}: {other:?}"),
    }
}

fn float(r: &Report, key: &str) -> f64 {
    match r.get(key) {
        Some(Value::Float(x)) => *x,
        Some(Value::Int(i)) => *i as f64,
        other => panic!("{key}: {other:?}"),
    }
}

#[test]
fn exit_codes_follow_outcome() {
    let (r, code) = machine("certify", "certify_shifted.txt", &[]);
    assert_eq!((text(&r, "status").as_str(), code), ("certified", EXIT_OK));
    let (r, code) = machine("certify", "certify_negative.txt", &[]);
    assert_eq!((text(&r, "status").as_str(), code), ("refused", EXIT_REFUSED));
    let (r, code) = machine("lyap", "lyap_unsafe.txt", &[]);
    assert_eq!((text(&r, "status").as_str(), code), ("refused", EXIT_REFUSED));
    let (r, code) = machine("lyap", "polymin_constant.txt", &[]);
    assert_eq!((text(&r, "status").as_str(), code), ("error", EXIT_INPUT));
}

#[test]
fn parse_errors_report_position() {
    let dir = std::env::temp_dir().join(format!("pdlmi-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("forward.txt");
    std::fs::write(&bad, "x in [0, 1]\ny in [z, 1]\ng = x\n").unwrap();
    let out = pdlmi(&["polymin", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("forward.txt:2:7:"), "{err}");
    assert!(out.stdout.is_empty());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn flags_override_file_settings() {
    let (r, _) = machine("polymin", "polymin_quadratic.txt", &["--margin-eps", "1e-7", "--schedule-cap", "2"]);
    assert_eq!(float(&r, "eps"), 1e-7);
    assert_eq!(float(&r, "schedule_cap"), 2.0);
    assert!((float(&r, "bound") + 0.25).abs() < 1e-5);
}

#[test]
fn timing_is_opt_in() {
    let (r, _) = machine("polymin", "polymin_constant.txt", &[]);
    assert!(r.get("wall_time_s").is_none());
    let (r, _) = machine("polymin", "polymin_constant.txt", &["--timing"]);
    assert!(r.get("wall_time_s").is_some());
}

#[test]
fn sdp_dump_is_written() {
    let path = std::env::temp_dir().join(format!("pdlmi-dump-{}.dat-s", std::process::id()));
    let p = problem("polymin_quadratic.txt");
    let out = pdlmi(&["polymin", p.to_str().unwrap(), "--dump-sdp", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let dump = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    let sdp = pdlmi::sdp::read_sdpa(&dump).unwrap();
    assert!(sdp.num_vars() > 0);
    assert_eq!(pdlmi::sdp::write_sdpa(&sdp), dump);
}

#[test]
fn fmt_prints_canonical_form() {
    let p = problem("certify_motzkin.txt");
    let out = pdlmi(&["fmt", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let canon = String::from_utf8(out.stdout).unwrap();
    let original = parse_problem(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(parse_problem(&canon).unwrap(), original);
}

#[test]
fn kyp_check_agrees_with_sweep() {
    for name in ["kyp_imaginary.txt", "kyp_disk.txt", "kyp_interval.txt", "kyp_custom_curve.txt"] {
        let (r, code) = machine("kyp-check", name, &[]);
        assert_eq!(text(&r, "consistent"), "yes", "{name}");
        assert_eq!(text(&r, "status"), "feasible", "{name}");
        assert_eq!(code, EXIT_OK);
        assert!(float(&r, "sweep_margin") > 0.0);
    }
}

#[test]
fn library_run_matches_binary() {
    let p = problem("lyap_certain.txt");
    let file = parse_problem(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let lib = run(&file, Target::Lyap, &RunOptions::default());
    let bin = pdlmi(&["lyap", p.to_str().unwrap(), "--format", "machine"]);
    assert_eq!(lib.report.emit_machine().as_bytes(), bin.stdout.as_slice());
    assert_eq!(float(&lib.report, "samples"), 500.0);
    assert!(float(&lib.report, "sample_max") < 0.0);
}
