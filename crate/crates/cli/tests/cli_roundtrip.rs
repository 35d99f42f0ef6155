//! End-to-end checks of the `peakaoi` binary: exit codes, config loading,
//! CSV schema, and plot regeneration stability.

use std::path::PathBuf;
use std::process::Command;

use peakaoi_cli::harness::{self, SolverChoice, SolverOpts, SweepAxis};
use peakaoi_cli::plot;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_peakaoi"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("peakaoi-test-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn usage_error_exits_1() {
    let out = bin()
        .args(["solve", "--protocol", "laser"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_config_exits_1() {
    let dir = temp_dir("badcfg");
    let cfg = dir.join("bad.json");
    std::fs::write(&cfg, "{\"bandwith_mhz\": 5.0}").unwrap();
    let out = bin()
        .args(["solve", "--protocol", "tdma", "--policy", "mv"])
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bad config file"), "{stderr}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn infeasible_problem_exits_2() {
    let dir = temp_dir("infeasible");
    let cfg = dir.join("impossible.json");
    std::fs::write(&cfg, "{\"ee_min_bits_per_j\": 1e12}").unwrap();
    let out = bin()
        .args(["solve", "--protocol", "tdma", "--policy", "mv"])
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("INFEASIBLE"), "{stdout}");
    assert!(stdout.contains("ee"), "{stdout}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn solve_writes_csv_and_manifest() {
    let dir = temp_dir("solve");
    let cfg = dir.join("cfg.json");
    std::fs::write(&cfg, "{\"lambda_max\": 12.0}").unwrap();
    let out = bin()
        .args([
            "solve",
            "--protocol",
            "noma",
            "--policy",
            "mv",
            "--solver",
            "both",
            "--benchmark",
        ])
        .arg("--config")
        .arg(&cfg)
        .args(["--grid-k", "100"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = std::fs::read_to_string(dir.join("solve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), harness::CSV_HEADER);
    // exact + ccp, each with a benchmark twin.
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), harness::CSV_HEADER.split(',').count());
        assert_eq!(fields[0], "noma");
        assert_eq!(fields[1], "mv");
        assert_eq!(fields[4], "12"); // lambda_max from the config file
        let lambda_opt: f64 = fields[6].parse().unwrap();
        assert!(lambda_opt > 0.0);
    }

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_si"]["lambda_max"], 12.0);
    assert!(manifest["assumed_defaults"]["fading_param"].is_number());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn single_point_rate_grid() {
    let dir = temp_dir("point");
    let cfg = dir.join("cfg.json");
    std::fs::write(&cfg, "{\"lambda_min\": 10.0, \"lambda_max\": 10.0}").unwrap();
    let out = bin()
        .args(["solve", "--protocol", "tdma", "--policy", "st"])
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("1 iters"), "{stdout}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_plots_regenerate_byte_stable() {
    let dir = temp_dir("sweep");
    let out = bin()
        .args(["sweep", "--axis", "packet-len", "--values", "40,200,400"])
        .args(["--protocol", "noma", "--grid-k", "60"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
    let once = plot::plots_from_csv(&csv, SweepAxis::PacketLen).unwrap();
    let twice = plot::plots_from_csv(&csv, SweepAxis::PacketLen).unwrap();
    for ((name_a, svg_a), (name_b, svg_b)) in once.iter().zip(twice.iter()) {
        assert_eq!(name_a, name_b);
        assert_eq!(svg_a, svg_b);
        let on_disk = std::fs::read_to_string(dir.join(format!("{name_a}.svg"))).unwrap();
        assert_eq!(
            &on_disk, svg_a,
            "{name_a}.svg differs from its CSV regeneration"
        );
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_records_infeasible_points_and_continues() {
    // Large packets make the transmit-power cap unsatisfiable for TDMA at
    // the stock bandwidth; the sweep must keep going and mark those rows.
    let rows = harness::solve_rows(
        &{
            let mut cfg = peakaoi::config::SystemConfig::default();
            cfg.packet_len_bits = 5_000.0;
            cfg
        },
        peakaoi::config::ProtocolKind::Tdma,
        peakaoi::config::PolicyKind::Mv,
        false,
        SolverChoice::Exact,
        &SolverOpts::default(),
    );
    assert_eq!(rows.len(), 1);
    assert!(rows[0].outcome.is_none());
    let line = rows[0].to_csv();
    assert!(line.contains(",false,"), "{line}");
    assert!(line.ends_with(&format!("{:016x}", rows[0].config_hash)));
}

#[test]
fn simulate_prints_stats_and_writes_trace() {
    let dir = temp_dir("simulate");
    let trace = dir.join("events.csv");
    let out = bin()
        .args([
            "simulate", "--lambda", "0.5", "--tau-b", "1.0", "--policy", "mv",
        ])
        .args(["--tau-s", "0.4", "--departures", "50000", "--seed", "3"])
        .arg("--trace")
        .arg(&trace)
        .args(["--trace-events", "200"])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("mean peak AoI"), "{stdout}");

    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("time_s,kind,queue_len\n"));
    assert_eq!(text.lines().count(), 201);
    assert!(text.contains("vacation_start"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn validate_failure_exits_3() {
    // A sub-statistical tolerance forces at least one of the 96 checks
    // outside both the tolerance and its own CI at this short horizon.
    let dir = temp_dir("validate");
    let out = bin()
        .args([
            "validate",
            "--departures",
            "120000",
            "--tol",
            "1e-7",
            "--seed",
            "5",
        ])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let csv = std::fs::read_to_string(dir.join("validate.csv")).unwrap();
    assert!(csv.starts_with(harness::VALIDATION_CSV_HEADER));
    assert!(csv.contains(",false"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn shipped_config_templates_load() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let defaults = peakaoi::config::RawSystemConfig::load(
        &std::fs::read_to_string(root.join("defaults.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(defaults, peakaoi::config::SystemConfig::default());

    let vacation = peakaoi::config::RawSystemConfig::load(
        &std::fs::read_to_string(root.join("nonzero-vacation.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(vacation.tau_s_min_s, 0.004);
}

#[test]
fn validate_passes_at_stated_tolerance() {
    let dir = temp_dir("validate-ok");
    let out = bin()
        .args(["validate", "--departures", "400000", "--seed", "7"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    std::fs::remove_dir_all(&dir).ok();
}
