//! End-to-end tests of the `tqc` binary: exit codes, output formats and
//! determinism across invocations and thread counts.

use std::path::PathBuf;
use std::process::{Command, Output};

fn tqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tqc"))
        .args(args)
        .output()
        .expect("spawn tqc")
}

fn scratch(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("tqc-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = tqc(&["simulate", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let out = tqc(&[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let out = tqc(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("simulate"));
}

#[test]
fn rate_is_exact() {
    let out = tqc(&["rate", "--cells", "1e9", "--bits", "6", "--seconds", "30e-9"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "200000000000000000");
}

#[test]
fn rate_rejects_garbage() {
    let out = tqc(&["rate", "--cells", "banana", "--seconds", "30e-9"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn replay_rejects_garbage_stream() {
    let path = scratch("garbage.tqcs");
    std::fs::write(&path, b"this is not a detector stream at all").unwrap();
    let out = tqc(&["replay", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(&path).ok();
}

#[test]
fn replay_rejects_truncated_stream() {
    let rec = scratch("trunc-src.tqcs");
    let out = tqc(&[
        "record", "--lx", "4", "--ly", "4", "--lt", "4", "--p", "0.01", "--seed", "5", "--out",
        rec.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut bytes = std::fs::read(&rec).unwrap();
    bytes.truncate(bytes.len() - 3);
    let cut = scratch("trunc.tqcs");
    std::fs::write(&cut, &bytes).unwrap();
    let out = tqc(&["replay", "--in", cut.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncated"));
    std::fs::remove_file(&rec).ok();
    std::fs::remove_file(&cut).ok();
}

#[test]
fn record_is_deterministic_and_replay_is_thread_independent() {
    let rec1 = scratch("det1.tqcs");
    let rec2 = scratch("det2.tqcs");
    for rec in [&rec1, &rec2] {
        let out = tqc(&[
            "record", "--lx", "4", "--ly", "4", "--lt", "4", "--p", "0.02", "--seed", "11",
            "--out", rec.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read(&rec1).unwrap(), std::fs::read(&rec2).unwrap());

    let single = tqc(&["replay", "--in", rec1.to_str().unwrap(), "--threads", "1"]);
    let multi = tqc(&["replay", "--in", rec1.to_str().unwrap(), "--threads", "2"]);
    assert_eq!(single.status.code(), Some(0), "{}", String::from_utf8_lossy(&single.stderr));
    assert_eq!(multi.status.code(), Some(0), "{}", String::from_utf8_lossy(&multi.stderr));
    assert_eq!(single.stdout, multi.stdout);
    let digest = |o: &Output| {
        String::from_utf8_lossy(&o.stderr)
            .lines()
            .find(|l| l.starts_with("sha256="))
            .map(str::to_owned)
            .expect("digest line on stderr")
    };
    assert_eq!(digest(&single), digest(&multi));
    std::fs::remove_file(&rec1).ok();
    std::fs::remove_file(&rec2).ok();
}

#[test]
fn simulate_emits_summary_csv() {
    let out = tqc(&[
        "simulate", "--lx", "3", "--ly", "3", "--lt", "3", "--p", "0.001", "--trials", "20",
        "--seed", "9",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "class,trials,residual_failures,logical_failures,logical_rate,wilson_low,wilson_high"
    );
    assert!(lines.next().unwrap().starts_with("primal,20,0,"));
    assert!(lines.next().unwrap().starts_with("dual,20,0,"));
}

#[test]
fn flags_override_config_file() {
    let cfg = scratch("exp.cfg");
    std::fs::write(&cfg, "lx = 3\nly = 3\nlt = 3\np = 0.001\ntrials = 10\nseed = 2\n").unwrap();
    let out = tqc(&["simulate", "--config", cfg.to_str().unwrap(), "--trials", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("primal,4,"));
    std::fs::remove_file(&cfg).ok();
}

#[test]
fn decode_text_output_is_sorted_records() {
    let out = tqc(&["decode", "--lx", "4", "--ly", "4", "--lt", "4", "--p", "0.01", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut prev_t = -1i64;
    for line in text.lines() {
        let fields: Vec<&str> = line.split(' ').collect();
        assert_eq!(fields.len(), 4, "line {line:?}");
        let t: i64 = fields[0].parse().unwrap();
        assert!(t >= prev_t, "records out of order at {line:?}");
        prev_t = t;
        assert!(fields[3] == "primal" || fields[3] == "dual");
    }
}

#[test]
fn decode_binary_output_round_trips_against_text() {
    let args = ["decode", "--lx", "4", "--ly", "4", "--lt", "4", "--p", "0.01", "--seed", "3"];
    let text = tqc(&args);
    let mut bin_args: Vec<&str> = args.to_vec();
    bin_args.extend(["--format", "binary"]);
    let bin = tqc(&bin_args);
    assert_eq!(text.status.code(), Some(0));
    assert_eq!(bin.status.code(), Some(0));
    assert_eq!(&bin.stdout[..4], b"TQCC");
    // 14-byte header (magic, version, record count), then 25 bytes/record.
    let count = u64::from_le_bytes(bin.stdout[6..14].try_into().unwrap()) as usize;
    assert_eq!(bin.stdout.len(), 14 + 25 * count);
    assert_eq!(count, text.stdout.iter().filter(|&&b| b == b'\n').count());
}

#[test]
fn decode_rejects_unknown_format() {
    let out = tqc(&["decode", "--lx", "4", "--ly", "4", "--lt", "4", "--format", "xml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_lattice_size_is_a_usage_error() {
    let out = tqc(&["simulate", "--lx", "0"]);
    assert_eq!(out.status.code(), Some(1));
}
