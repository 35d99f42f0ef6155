//! Batch experiment harness: single solves, parameter sweeps with a worker
//! pool, and closed-form-vs-simulation validation runs. The CSV files
//! written here are the single source of truth; plots are regenerated from
//! the CSV bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use peakaoi::config::{DecisionVector, PolicyKind, ProtocolKind, SystemConfig};
use peakaoi::opt::{self, ProblemSpec, SolveMethod, SolveReport};
use peakaoi::queueing::{self, QueueParams};
use peakaoi::sim::{self, SimSpec};
use peakaoi::{phy, Error};

/// Fixed CSV schema shared by `solve` and `sweep` outputs.
pub const CSV_HEADER: &str = "protocol,policy,solver,L,lambda_max,N,lambda_opt,tau_b_opt,\
tau_s_opt_or_M,phi_r_opt,peak_aoi_s,per_packet_aoi_s,avg_power_w,iterations,wallclock_ms,\
benchmark,feasible,config_hash";

/// Solver selection for a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    Exact,
    Ccp,
    Both,
}

impl SolverChoice {
    fn methods(self) -> &'static [SolveMethod] {
        match self {
            SolverChoice::Exact => &[SolveMethod::Exact],
            SolverChoice::Ccp => &[SolveMethod::Ccp],
            SolverChoice::Both => &[SolveMethod::Exact, SolveMethod::Ccp],
        }
    }
}

impl std::str::FromStr for SolverChoice {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(SolverChoice::Exact),
            "ccp" => Ok(SolverChoice::Ccp),
            "both" => Ok(SolverChoice::Both),
            other => bail!("unknown solver '{other}' (expected exact|ccp|both)"),
        }
    }
}

/// Solver tuning knobs.
#[derive(Clone, Copy, Debug)]
pub struct SolverOpts {
    pub grid_k: usize,
    pub ccp_k: usize,
    pub ccp_eps: f64,
    /// Device whose channel the problem models; defaults to the farthest
    /// (weakest) device, which is conservative for every protocol.
    pub device_index: Option<usize>,
}

impl Default for SolverOpts {
    fn default() -> Self {
        SolverOpts {
            grid_k: 1000,
            ccp_k: 50,
            ccp_eps: 1e-6,
            device_index: None,
        }
    }
}

/// One (protocol, policy, benchmark) series in a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Combo {
    pub protocol: ProtocolKind,
    pub policy: PolicyKind,
    pub benchmark: bool,
}

/// Sweep axis over the base configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    PacketLen,
    LambdaMax,
    NDevices,
    None,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::PacketLen => "packet_len_bits",
            SweepAxis::LambdaMax => "lambda_max",
            SweepAxis::NDevices => "n_devices",
            SweepAxis::None => "none",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "packet-len" | "packet-len-bits" | "l" => Ok(SweepAxis::PacketLen),
            "lambda-max" => Ok(SweepAxis::LambdaMax),
            "n-devices" | "n" => Ok(SweepAxis::NDevices),
            "none" => Ok(SweepAxis::None),
            other => bail!("unknown sweep axis '{other}'"),
        }
    }
}

/// A full sweep description.
#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    pub base: SystemConfig,
    pub sweep_axis: SweepAxis,
    pub sweep_values: Vec<f64>,
    pub combos: Vec<Combo>,
    pub solver: SolverChoice,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub opts: SolverOpts,
}

impl ExperimentPlan {
    /// All twelve series (six schemes, each with its benchmark twin).
    pub fn default_combos() -> Vec<Combo> {
        let mut combos = Vec::new();
        for benchmark in [false, true] {
            for protocol in ProtocolKind::ALL {
                for policy in PolicyKind::ALL {
                    combos.push(Combo {
                        protocol,
                        policy,
                        benchmark,
                    });
                }
            }
        }
        combos
    }

    fn validate(&self) -> Result<()> {
        if self.sweep_axis != SweepAxis::None && self.sweep_values.is_empty() {
            bail!("sweep_values must be nonempty");
        }
        if self.combos.is_empty() {
            bail!("no (protocol, policy) combos selected");
        }
        Ok(())
    }
}

/// One output row of `solve` or `sweep`.
#[derive(Clone, Debug)]
pub struct SolveRow {
    pub protocol: ProtocolKind,
    pub policy: PolicyKind,
    pub solver: SolveMethod,
    pub packet_len_bits: f64,
    pub lambda_max: f64,
    pub n_devices: usize,
    pub benchmark: bool,
    pub outcome: Option<RowOutcome>,
    pub iterations: usize,
    pub wallclock_ms: f64,
    pub config_hash: u64,
    /// Infeasibility diagnostic when `outcome` is `None`.
    pub diagnostic: Option<String>,
}

/// Solution fields of a feasible row.
#[derive(Clone, Copy, Debug)]
pub struct RowOutcome {
    pub lambda_opt: f64,
    pub tau_b_opt: f64,
    /// `tau_s` (MV, seconds) or the integer threshold `M` (ST).
    pub policy_opt: f64,
    pub phi_r_opt: f64,
    pub peak_aoi_s: f64,
    pub per_packet_aoi_s: f64,
    pub avg_power_w: f64,
}

impl SolveRow {
    pub fn to_csv(&self) -> String {
        let mut line = String::new();
        let _ = write!(
            line,
            "{},{},{},{},{},{}",
            self.protocol,
            self.policy,
            self.solver.as_str(),
            self.packet_len_bits,
            self.lambda_max,
            self.n_devices
        );
        match &self.outcome {
            Some(o) => {
                let _ = write!(
                    line,
                    ",{},{},{},{},{},{},{}",
                    o.lambda_opt,
                    o.tau_b_opt,
                    o.policy_opt,
                    o.phi_r_opt,
                    o.peak_aoi_s,
                    o.per_packet_aoi_s,
                    o.avg_power_w
                );
            }
            None => line.push_str(",,,,,,,"),
        }
        let _ = write!(
            line,
            ",{},{},{},{},{:016x}",
            self.iterations,
            self.wallclock_ms,
            self.benchmark,
            self.outcome.is_some(),
            self.config_hash
        );
        line
    }
}

/// The reported operating point of a solver run: ST thresholds are restated
/// as the better neighboring integer.
fn reported_point(report: &SolveReport) -> (DecisionVector, f64) {
    match report.rounded {
        Some(r) => {
            let x = DecisionVector {
                policy_param: report.x_star.policy_param.with_value(r.threshold),
                ..report.x_star
            };
            (x, r.objective_s)
        }
        None => (report.x_star, report.objective_s),
    }
}

fn run_method(
    p: &ProblemSpec,
    method: SolveMethod,
    opts: &SolverOpts,
) -> Result<SolveReport, Error> {
    match method {
        SolveMethod::Exact => opt::exact_linear_search(p, opts.grid_k),
        SolveMethod::Ccp => {
            let x0 = opt::find_feasible_point(p)?;
            opt::ccp_solve(p, &x0, opts.ccp_k, opts.ccp_eps)
        }
    }
}

/// Solve one (protocol, policy) instance with the selected solver(s),
/// producing one row per solver. Infeasible instances become diagnostic
/// rows rather than errors.
pub fn solve_rows(
    cfg: &SystemConfig,
    protocol: ProtocolKind,
    policy: PolicyKind,
    benchmark: bool,
    solver: SolverChoice,
    opts: &SolverOpts,
) -> Vec<SolveRow> {
    let hash = cfg.stable_hash();
    let stub = |method: SolveMethod, diagnostic: String| SolveRow {
        protocol,
        policy,
        solver: method,
        packet_len_bits: cfg.packet_len_bits,
        lambda_max: cfg.lambda_max,
        n_devices: cfg.n_devices,
        benchmark,
        outcome: None,
        iterations: 0,
        wallclock_ms: 0.0,
        config_hash: hash,
        diagnostic: Some(diagnostic),
    };

    let device = opts.device_index.unwrap_or(cfg.n_devices - 1);
    let problem = match opt::build_problem(protocol, policy, cfg, device) {
        Ok(p) => p,
        Err(e) => {
            return solver
                .methods()
                .iter()
                .map(|m| stub(*m, e.to_string()))
                .collect();
        }
    };

    solver
        .methods()
        .iter()
        .map(|method| match run_method(&problem, *method, opts) {
            Ok(report) => {
                let (x, objective) = reported_point(&report);
                let breakdown =
                    queueing::protocol_peak_aoi(protocol, policy, &x).expect("solution stable");
                let power =
                    phy::power_report(protocol, policy, &x, &problem.cfg, problem.gain, benchmark)
                        .expect("solution in domain");
                SolveRow {
                    protocol,
                    policy,
                    solver: *method,
                    packet_len_bits: problem.cfg.packet_len_bits,
                    lambda_max: problem.cfg.lambda_max,
                    n_devices: problem.cfg.n_devices,
                    benchmark,
                    outcome: Some(RowOutcome {
                        lambda_opt: x.lambda_rate,
                        tau_b_opt: x.tau_b_s,
                        policy_opt: x.policy_param.value(),
                        phi_r_opt: x.phi_r_w,
                        peak_aoi_s: objective,
                        per_packet_aoi_s: breakdown.per_packet_aoi_s,
                        avg_power_w: power.avg_consumption_w,
                    }),
                    iterations: report.iterations,
                    wallclock_ms: report.wallclock_ms,
                    config_hash: hash,
                    diagnostic: None,
                }
            }
            Err(e) => stub(*method, e.to_string()),
        })
        .collect()
}

/// Apply one sweep-axis value to the base configuration.
pub fn apply_axis(base: &SystemConfig, axis: SweepAxis, value: f64) -> Result<SystemConfig> {
    let mut cfg = base.clone();
    match axis {
        SweepAxis::PacketLen => cfg.packet_len_bits = value,
        SweepAxis::LambdaMax => cfg.lambda_max = value,
        SweepAxis::NDevices => {
            if value < 1.0 || value.fract() != 0.0 {
                bail!("n_devices sweep values must be positive integers (got {value})");
            }
            cfg.n_devices = value as usize;
            cfg.distances_m = peakaoi::config::linspace(3.0, 5.0, cfg.n_devices);
        }
        SweepAxis::None => {}
    }
    peakaoi::config::validate_config(cfg).map_err(|e| anyhow!("{e}"))
}

/// Run a sweep: every (combo, value) point is solved on a worker pool and
/// rows come back in deterministic order (combo-major, then sweep value,
/// then solver).
pub fn run_sweep(plan: &ExperimentPlan) -> Result<Vec<SolveRow>> {
    plan.validate()?;
    let values: Vec<f64> = if plan.sweep_axis == SweepAxis::None {
        vec![f64::NAN]
    } else {
        plan.sweep_values.clone()
    };

    struct Point {
        combo: Combo,
        value: f64,
    }
    let points: Vec<Point> = plan
        .combos
        .iter()
        .flat_map(|combo| {
            values.iter().map(move |v| Point {
                combo: *combo,
                value: *v,
            })
        })
        .collect();

    let slots: Mutex<Vec<Option<Vec<SolveRow>>>> = Mutex::new(vec![None; points.len()]);
    let next: AtomicUsize = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(points.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= points.len() {
                    break;
                }
                let point = &points[idx];
                let rows = match plan.sweep_axis {
                    SweepAxis::None => solve_rows(
                        &plan.base,
                        point.combo.protocol,
                        point.combo.policy,
                        point.combo.benchmark,
                        plan.solver,
                        &plan.opts,
                    ),
                    axis => match apply_axis(&plan.base, axis, point.value) {
                        Ok(cfg) => solve_rows(
                            &cfg,
                            point.combo.protocol,
                            point.combo.policy,
                            point.combo.benchmark,
                            plan.solver,
                            &plan.opts,
                        ),
                        Err(e) => plan
                            .solver
                            .methods()
                            .iter()
                            .map(|m| SolveRow {
                                protocol: point.combo.protocol,
                                policy: point.combo.policy,
                                solver: *m,
                                packet_len_bits: plan.base.packet_len_bits,
                                lambda_max: plan.base.lambda_max,
                                n_devices: plan.base.n_devices,
                                benchmark: point.combo.benchmark,
                                outcome: None,
                                iterations: 0,
                                wallclock_ms: 0.0,
                                config_hash: plan.base.stable_hash(),
                                diagnostic: Some(e.to_string()),
                            })
                            .collect(),
                    },
                };
                slots.lock().unwrap()[idx] = Some(rows);
            });
        }
    });

    let mut rows = Vec::with_capacity(points.len() * plan.solver.methods().len());
    for slot in slots.into_inner().unwrap() {
        rows.extend(slot.expect("every sweep point computed"));
    }
    Ok(rows)
}

/// Write rows as CSV (header + one line per row).
pub fn write_csv(path: &Path, rows: &[SolveRow]) -> Result<()> {
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&row.to_csv());
        text.push('\n');
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// The sweep-value column of a row (the active axis field).
pub fn axis_value(row: &SolveRow, axis: SweepAxis) -> f64 {
    match axis {
        SweepAxis::PacketLen => row.packet_len_bits,
        SweepAxis::LambdaMax => row.lambda_max,
        SweepAxis::NDevices => row.n_devices as f64,
        SweepAxis::None => 0.0,
    }
}

// ---------------------------------------------------------------------------
// Validation: closed forms vs the simulation oracle.
// ---------------------------------------------------------------------------

/// One validation check at one grid point.
#[derive(Clone, Debug)]
pub struct ValidationRow {
    pub policy: PolicyKind,
    pub lambda: f64,
    pub tau_b: f64,
    /// `tau_s` (MV) or `M` (ST).
    pub param: f64,
    pub metric: &'static str,
    pub closed_form: f64,
    pub des_estimate: f64,
    pub ci_half_width: f64,
    pub rel_err: f64,
    pub pass: bool,
}

impl ValidationRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.policy,
            self.lambda,
            self.tau_b,
            self.param,
            self.metric,
            self.closed_form,
            self.des_estimate,
            self.ci_half_width,
            self.rel_err,
            self.pass
        )
    }
}

pub const VALIDATION_CSV_HEADER: &str =
    "policy,lambda,tau_b,param,metric,closed_form,des_estimate,ci_half_width,rel_err,pass";

/// Validation run settings.
#[derive(Clone, Copy, Debug)]
pub struct ValidatePlan {
    pub departures: u64,
    pub seed: u64,
    pub rel_tol: f64,
}

impl Default for ValidatePlan {
    fn default() -> Self {
        ValidatePlan {
            departures: 1_000_000,
            seed: 7,
            rel_tol: 0.01,
        }
    }
}

/// The default validation grid: 12 MV points (3 rates x 4 vacation lengths)
/// and 12 ST points (3 rates x 4 thresholds), unit service time.
pub fn default_grid() -> Vec<(PolicyKind, QueueParams)> {
    let mut grid = Vec::new();
    for lambda in [0.3, 0.5, 0.8] {
        for tau_s in [0.0, 0.4, 1.0, 2.0] {
            grid.push((PolicyKind::Mv, QueueParams::mv(lambda, 1.0, tau_s)));
        }
    }
    for lambda in [0.3, 0.5, 0.8] {
        for m in [1.0, 2.0, 3.0, 5.0] {
            grid.push((PolicyKind::St, QueueParams::st(lambda, 1.0, m)));
        }
    }
    grid
}

/// Run the validation grid. Unstable points are rejected up front.
pub fn run_validate(
    grid: &[(PolicyKind, QueueParams)],
    plan: &ValidatePlan,
) -> Result<Vec<ValidationRow>> {
    for (policy, params) in grid {
        params.check_stable().map_err(|e| {
            anyhow!(
                "unstable grid point ({policy}, lambda={}, tau_b={}): {e}",
                params.lambda_rate,
                params.service_s
            )
        })?;
    }

    let rows: Mutex<Vec<Option<Vec<ValidationRow>>>> = Mutex::new(vec![None; grid.len()]);
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(grid.len().max(1));
    let failure: Mutex<Option<String>> = Mutex::new(None);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= grid.len() {
                    break;
                }
                let (policy, params) = grid[idx];
                match validate_point(policy, params, plan, idx as u64) {
                    Ok(point_rows) => rows.lock().unwrap()[idx] = Some(point_rows),
                    Err(e) => *failure.lock().unwrap() = Some(e.to_string()),
                }
            });
        }
    });

    if let Some(msg) = failure.into_inner().unwrap() {
        bail!("validation run failed: {msg}");
    }
    let mut out = Vec::new();
    for slot in rows.into_inner().unwrap() {
        out.extend(slot.expect("every grid point simulated"));
    }
    Ok(out)
}

fn validate_point(
    policy: PolicyKind,
    params: QueueParams,
    plan: &ValidatePlan,
    index: u64,
) -> Result<Vec<ValidationRow>> {
    let spec = SimSpec::new(params, policy, plan.seed.wrapping_add(index))
        .with_departures(plan.departures);
    let stats = sim::simulate(&spec).map_err(|e| anyhow!("{e}"))?;

    let (breakdown, queue) = match policy {
        PolicyKind::Mv => (
            queueing::peak_aoi_mv(&params).map_err(|e| anyhow!("{e}"))?,
            queueing::mv_mean_queue(&params).map_err(|e| anyhow!("{e}"))?,
        ),
        PolicyKind::St => (
            queueing::peak_aoi_st(&params).map_err(|e| anyhow!("{e}"))?,
            queueing::st_mean_queue(&params).map_err(|e| anyhow!("{e}"))?,
        ),
    };
    let param = if policy == PolicyKind::Mv {
        params.vacation_s
    } else {
        params.threshold
    };

    let mut rows = Vec::with_capacity(4);
    let mut push = |metric: &'static str, closed: f64, est: sim::stats::Estimate| {
        let rel_err = (est.mean - closed).abs() / closed.abs().max(1e-300);
        // A check passes inside the stated tolerance, or when the closed form
        // lies inside the estimator's own 95% CI (one cannot resolve a formula
        // better than the estimate's precision; systematic errors still fail
        // because the CI shrinks with the horizon while a bias does not).
        let pass = rel_err <= plan.rel_tol || (est.mean - closed).abs() <= est.ci_half_width;
        rows.push(ValidationRow {
            policy,
            lambda: params.lambda_rate,
            tau_b: params.service_s,
            param,
            metric,
            closed_form: closed,
            des_estimate: est.mean,
            ci_half_width: est.ci_half_width,
            rel_err,
            pass,
        });
    };
    push("mean_delay_s", breakdown.mean_delay_s, stats.mean_delay_s);
    push(
        "mean_peak_aoi_s",
        breakdown.total_peak_aoi_s,
        stats.mean_peak_aoi_s,
    );
    push("mean_queue_len", queue, stats.mean_queue_len);
    push(
        "per_packet_aoi_s",
        breakdown.per_packet_aoi_s,
        stats.mean_per_packet_aoi_s,
    );
    Ok(rows)
}
