//! `peakaoi` — solve, sweep, validate and simulate sleep-scheduled
//! status-update networks from the command line.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 infeasible problem,
//! 3 validation failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use peakaoi::config::{PolicyKind, ProtocolKind, RawSystemConfig, SystemConfig};
use peakaoi::queueing::QueueParams;
use peakaoi::sim::{self, SimSpec};

use peakaoi_cli::harness::{
    self, Combo, ExperimentPlan, SolveRow, SolverChoice, SolverOpts, SweepAxis, ValidatePlan,
};
use peakaoi_cli::{manifest, plot};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "peakaoi",
    version,
    about = "Peak age-of-information analysis for energy-harvesting multiple-access networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// JSON configuration file (natural units); omitted = stock parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV/plots/manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Exact-search grid size K.
    #[arg(long, default_value_t = 1000)]
    grid_k: usize,
    /// CCP iteration cap.
    #[arg(long, default_value_t = 50)]
    ccp_k: usize,
    /// CCP stopping tolerance on the iterate step.
    #[arg(long, default_value_t = 1e-6)]
    ccp_eps: f64,
    /// Device index to model (default: the farthest device).
    #[arg(long)]
    device: Option<usize>,
}

impl CommonOpts {
    fn solver_opts(&self) -> SolverOpts {
        SolverOpts {
            grid_k: self.grid_k,
            ccp_k: self.ccp_k,
            ccp_eps: self.ccp_eps,
            device_index: self.device,
        }
    }
}

fn parse_protocol(s: &str) -> Result<ProtocolKind, String> {
    s.parse::<ProtocolKind>().map_err(|e| e.to_string())
}

fn parse_policy(s: &str) -> Result<PolicyKind, String> {
    s.parse::<PolicyKind>().map_err(|e| e.to_string())
}

fn parse_solver(s: &str) -> Result<SolverChoice, String> {
    s.parse::<SolverChoice>().map_err(|e| e.to_string())
}

fn parse_axis(s: &str) -> Result<SweepAxis, String> {
    s.parse::<SweepAxis>().map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Solve one (protocol, policy) instance and append a CSV row.
    Solve {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, value_parser = parse_protocol)]
        protocol: ProtocolKind,
        #[arg(long, value_parser = parse_policy)]
        policy: PolicyKind,
        #[arg(long, default_value = "exact", value_parser = parse_solver)]
        solver: SolverChoice,
        /// Also emit the benchmark (no sleep scheduling) power row.
        #[arg(long)]
        benchmark: bool,
    },
    /// Sweep packet length, rate cap or device count over all schemes.
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        /// Sweep axis: packet-len | lambda-max | n-devices.
        #[arg(long, value_parser = parse_axis)]
        axis: SweepAxis,
        /// Comma-separated sweep values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value = "exact", value_parser = parse_solver)]
        solver: SolverChoice,
        /// Restrict to one protocol (default: all three).
        #[arg(long, value_parser = parse_protocol)]
        protocol: Option<ProtocolKind>,
        /// Restrict to one policy (default: both).
        #[arg(long, value_parser = parse_policy)]
        policy: Option<PolicyKind>,
        /// Skip the benchmark twin series.
        #[arg(long)]
        no_benchmark: bool,
        /// Seed recorded in the manifest (solvers are deterministic; this
        /// tags the run for downstream validation).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check the closed forms against the simulation oracle on a grid.
    Validate {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = 1_000_000)]
        departures: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Relative tolerance per metric.
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
    },
    /// Run one queue simulation and print its statistics.
    Simulate {
        /// Arrival rate, packets/s.
        #[arg(long)]
        lambda: f64,
        /// Service (active-cycle) time, seconds.
        #[arg(long)]
        tau_b: f64,
        #[arg(long, value_parser = parse_policy)]
        policy: PolicyKind,
        /// Vacation length (MV), seconds.
        #[arg(long, default_value_t = 0.0)]
        tau_s: f64,
        /// Start-up threshold (ST).
        #[arg(long, default_value_t = 1)]
        threshold: u32,
        #[arg(long, default_value_t = 1_000_000)]
        departures: u64,
        #[arg(long)]
        warmup: Option<u64>,
        #[arg(long, default_value_t = 20)]
        batches: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write a raw event trace CSV here (tolerates unstable inputs).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Event cap for --trace.
        #[arg(long, default_value_t = 10_000)]
        trace_events: usize,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<SystemConfig> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            RawSystemConfig::load(&text).map_err(|e| anyhow::anyhow!("{e}"))
        }
        None => peakaoi::config::validate_config(SystemConfig::default())
            .map_err(|e| anyhow::anyhow!("{e}")),
    }
}

fn print_row(row: &SolveRow) {
    match &row.outcome {
        Some(o) => println!(
            "{}-{} [{}]{}: peak AoI {:.6} s | per-packet {:.6} s | avg power {:.4} W | \
             lambda* {:.4}/s tau_b* {:.6} s param* {} phi_r* {:.4} W | {} iters, {:.1} ms",
            row.protocol,
            row.policy,
            row.solver.as_str(),
            if row.benchmark { " (bench)" } else { "" },
            o.peak_aoi_s,
            o.per_packet_aoi_s,
            o.avg_power_w,
            o.lambda_opt,
            o.tau_b_opt,
            o.policy_opt,
            o.phi_r_opt,
            row.iterations,
            row.wallclock_ms
        ),
        None => println!(
            "{}-{} [{}]: INFEASIBLE — {}",
            row.protocol,
            row.policy,
            row.solver.as_str(),
            row.diagnostic.as_deref().unwrap_or("unknown")
        ),
    }
}

fn append_csv(path: &Path, rows: &[SolveRow]) -> Result<()> {
    let mut text = if path.exists() {
        std::fs::read_to_string(path)?
    } else {
        format!("{}\n", harness::CSV_HEADER)
    };
    for row in rows {
        text.push_str(&row.to_csv());
        text.push('\n');
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_solve(
    common: &CommonOpts,
    protocol: ProtocolKind,
    policy: PolicyKind,
    solver: SolverChoice,
    benchmark: bool,
) -> Result<u8> {
    let cfg = load_config(&common.config)?;
    std::fs::create_dir_all(&common.out)?;
    let opts = common.solver_opts();

    let mut rows = harness::solve_rows(&cfg, protocol, policy, false, solver, &opts);
    if benchmark {
        rows.extend(harness::solve_rows(
            &cfg, protocol, policy, true, solver, &opts,
        ));
    }
    for row in &rows {
        print_row(row);
    }
    append_csv(&common.out.join("solve.csv"), &rows)?;
    manifest::write_manifest(
        &common.out.join("manifest.json"),
        &format!("solve --protocol {protocol} --policy {policy}"),
        &cfg,
        &[],
        &[],
    )?;
    Ok(if rows.iter().any(|r| r.outcome.is_none()) {
        EXIT_INFEASIBLE
    } else {
        0
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    common: &CommonOpts,
    axis: SweepAxis,
    values: Vec<f64>,
    solver: SolverChoice,
    protocol: Option<ProtocolKind>,
    policy: Option<PolicyKind>,
    no_benchmark: bool,
    seed: Option<u64>,
) -> Result<u8> {
    let cfg = load_config(&common.config)?;
    std::fs::create_dir_all(&common.out)?;
    let combos: Vec<Combo> = ExperimentPlan::default_combos()
        .into_iter()
        .filter(|c| protocol.is_none_or(|p| c.protocol == p))
        .filter(|c| policy.is_none_or(|p| c.policy == p))
        .filter(|c| !(no_benchmark && c.benchmark))
        .collect();
    let plan = ExperimentPlan {
        base: cfg.clone(),
        sweep_axis: axis,
        sweep_values: values.clone(),
        combos,
        solver,
        seeds: seed.into_iter().collect(),
        output_dir: common.out.clone(),
        opts: common.solver_opts(),
    };
    let rows = harness::run_sweep(&plan)?;
    let csv_path = common.out.join("sweep.csv");
    harness::write_csv(&csv_path, &rows)?;

    // Plots are rendered from the CSV bytes just written.
    let csv_text = std::fs::read_to_string(&csv_path)?;
    for (metric, svg) in plot::plots_from_csv(&csv_text, axis)? {
        std::fs::write(common.out.join(format!("{metric}.svg")), svg)?;
    }
    manifest::write_manifest(
        &common.out.join("manifest.json"),
        &format!(
            "sweep --axis {} --values {}",
            axis.as_str(),
            values
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
        &cfg,
        &plan.seeds,
        &[],
    )?;

    let infeasible = rows.iter().filter(|r| r.outcome.is_none()).count();
    println!(
        "sweep over {}: {} rows ({} infeasible) -> {}",
        axis.as_str(),
        rows.len(),
        infeasible,
        csv_path.display()
    );
    Ok(0)
}

fn cmd_validate(common: &CommonOpts, departures: u64, seed: u64, tol: f64) -> Result<u8> {
    std::fs::create_dir_all(&common.out)?;
    let plan = ValidatePlan {
        departures,
        seed,
        rel_tol: tol,
    };
    let grid = harness::default_grid();
    let rows = harness::run_validate(&grid, &plan)?;

    println!(
        "{:<6} {:>6} {:>6} {:>6} {:<18} {:>12} {:>12} {:>10} {:>9} {:>5}",
        "policy", "lambda", "tau_b", "param", "metric", "closed", "des", "ci", "rel_err", "pass"
    );
    for row in &rows {
        println!(
            "{:<6} {:>6} {:>6} {:>6} {:<18} {:>12.6} {:>12.6} {:>10.2e} {:>9.2e} {:>5}",
            row.policy.to_string(),
            row.lambda,
            row.tau_b,
            row.param,
            row.metric,
            row.closed_form,
            row.des_estimate,
            row.ci_half_width,
            row.rel_err,
            row.pass
        );
    }
    let mut text = format!("{}\n", harness::VALIDATION_CSV_HEADER);
    for row in &rows {
        text.push_str(&row.to_csv());
        text.push('\n');
    }
    std::fs::write(common.out.join("validate.csv"), text)?;
    manifest::write_manifest(
        &common.out.join("manifest.json"),
        &format!("validate --departures {departures} --tol {tol}"),
        &SystemConfig::default(),
        &[seed],
        &["validate uses absolute queue parameters; the config file is not consulted".into()],
    )?;

    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        eprintln!(
            "{failed} of {} checks failed the {tol} relative tolerance",
            rows.len()
        );
        return Ok(EXIT_VALIDATION);
    }
    println!(
        "all {} checks passed at {tol} relative tolerance",
        rows.len()
    );
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    lambda: f64,
    tau_b: f64,
    policy: PolicyKind,
    tau_s: f64,
    threshold: u32,
    departures: u64,
    warmup: Option<u64>,
    batches: u32,
    seed: u64,
    trace: Option<PathBuf>,
    trace_events: usize,
) -> Result<u8> {
    let params = match policy {
        PolicyKind::Mv => QueueParams::mv(lambda, tau_b, tau_s),
        PolicyKind::St => QueueParams::st(lambda, tau_b, f64::from(threshold)),
    };
    let mut spec = SimSpec::new(params, policy, seed).with_departures(departures);
    if let Some(w) = warmup {
        spec.warmup_departures = w;
    }
    spec.batch_count = batches;

    if let Some(path) = &trace {
        let events = sim::event_trace(&spec, trace_events).map_err(|e| anyhow::anyhow!("{e}"))?;
        let mut text = String::from("time_s,kind,queue_len\n");
        for e in &events {
            text.push_str(&format!(
                "{},{},{}\n",
                e.time_s,
                e.kind.as_str(),
                e.queue_len
            ));
        }
        std::fs::write(path, text)?;
        println!("wrote {} events to {}", events.len(), path.display());
    }

    match sim::simulate(&spec) {
        Ok(stats) => {
            println!("departures measured: {}", stats.departures);
            for (name, est) in [
                ("mean delay [s]", stats.mean_delay_s),
                ("mean peak AoI [s]", stats.mean_peak_aoi_s),
                ("mean per-packet AoI [s]", stats.mean_per_packet_aoi_s),
                ("mean queue length", stats.mean_queue_len),
                ("rho observed", stats.rho_observed),
            ] {
                println!(
                    "{name:<26} {:>12.6} +/- {:.2e}",
                    est.mean, est.ci_half_width
                );
            }
            println!("busy fraction              {:>12.6}", stats.busy_fraction);
            println!("idle fraction              {:>12.6}", stats.idle_fraction);
            println!("time-averaged AoI [s]      {:>12.6}", stats.time_avg_aoi_s);
            Ok(0)
        }
        Err(e) if trace.is_some() => {
            // Trace mode tolerates unstable parameters.
            println!("steady-state estimates unavailable: {e}");
            Ok(0)
        }
        Err(e) => Err(anyhow::anyhow!("{e}")),
    }
}

fn run() -> Result<u8> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own help/version output is not an error.
            if e.use_stderr() {
                eprint!("{e}");
                return Ok(EXIT_USAGE);
            }
            print!("{e}");
            return Ok(0);
        }
    };
    match cli.command {
        Command::Solve {
            common,
            protocol,
            policy,
            solver,
            benchmark,
        } => cmd_solve(&common, protocol, policy, solver, benchmark),
        Command::Sweep {
            common,
            axis,
            values,
            solver,
            protocol,
            policy,
            no_benchmark,
            seed,
        } => cmd_sweep(
            &common,
            axis,
            values,
            solver,
            protocol,
            policy,
            no_benchmark,
            seed,
        ),
        Command::Validate {
            common,
            departures,
            seed,
            tol,
        } => cmd_validate(&common, departures, seed, tol),
        Command::Simulate {
            lambda,
            tau_b,
            policy,
            tau_s,
            threshold,
            departures,
            warmup,
            batches,
            seed,
            trace,
            trace_events,
        } => cmd_simulate(
            lambda,
            tau_b,
            policy,
            tau_s,
            threshold,
            departures,
            warmup,
            batches,
            seed,
            trace,
            trace_events,
        ),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
