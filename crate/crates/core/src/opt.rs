//! Peak-AoI minimization: problem assembly for the six (protocol, policy)
//! instances, an exact linear search over the update rate with convex
//! per-rate subproblems, and a convex-concave procedure over the DC split
//! of the objective.
//!
//! At a fixed update rate the objective is strictly increasing in the slot
//! length and in the policy knob, and every remaining constraint is a
//! monotone bound on the slot length alone, so the subproblem reduces to a
//! bounded scalar minimization; golden-section search keeps that honest
//! against objective changes. The rate grid then recovers the exact
//! optimum. The CCP path linearizes the non-convex part of the objective
//! and the bilinear stability constraint around the current iterate,
//! solving each surrogate by projected gradient descent; steps are damped
//! so the true objective never increases along the iterate sequence.

use std::time::Instant;

use crate::config::{DecisionVector, PolicyKind, PolicyParam, ProtocolKind, SystemConfig};
use crate::numeric::{golden_section_min, lowest_feasible};
use crate::phy::{self, ChannelState};
use crate::queueing::{self, STABILITY_MARGIN};
use crate::{Error, Result};

/// Constraint slacks this close to zero (or better) count as feasible.
pub const SLACK_TOL: f64 = 1e-9;

/// Golden-section bracket tolerance for the per-rate subproblem.
const TAU_B_TOL: f64 = 1e-10;

/// One named constraint group; `slack >= 0` means satisfied. A group
/// evaluates to the minimum slack over its scalar components.
#[derive(Clone, Copy, Debug)]
pub struct ConstraintSlack {
    pub name: &'static str,
    pub slack: f64,
}

/// One of the six peak-AoI minimization instances.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub protocol: ProtocolKind,
    pub policy: PolicyKind,
    pub cfg: SystemConfig,
    /// Normalized channel gain of the modeled device (common `gamma` for
    /// NOMA's total-power closed form).
    pub gain: f64,
    pub device_index: usize,
    /// Smallest slot length where EE, energy and the transmit-power cap all
    /// hold (they are monotone in the slot length and rate-independent).
    tau_b_floor: f64,
}

/// Solver identity for reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    Exact,
    Ccp,
}

impl SolveMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveMethod::Exact => "exact",
            SolveMethod::Ccp => "ccp",
        }
    }
}

/// One solver trace entry: an iterate (or grid evaluation) and its true
/// objective.
#[derive(Clone, Copy, Debug)]
pub struct TracePoint {
    pub x: DecisionVector,
    pub objective_s: f64,
}

/// Integer-threshold restatement of a relaxed ST solution.
#[derive(Clone, Copy, Debug)]
pub struct RoundedThreshold {
    pub threshold: f64,
    pub objective_s: f64,
}

/// Solver output.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub x_star: DecisionVector,
    pub objective_s: f64,
    pub method: SolveMethod,
    pub iterations: usize,
    /// Grid evaluations (exact search) or accepted iterates (CCP).
    pub trace: Vec<TracePoint>,
    pub feasible: bool,
    pub wallclock_ms: f64,
    /// ST only: the better feasible integer threshold next to the relaxed
    /// optimum, with its objective.
    pub rounded: Option<RoundedThreshold>,
    /// Diagnostics (damped CCP steps, surrogate stalls).
    pub notes: Vec<String>,
}

impl ProblemSpec {
    /// Charge-power cap on `Phi_r` (aggregate over devices for NOMA).
    fn phi_r_cap_w(&self) -> f64 {
        match self.protocol {
            ProtocolKind::Noma => self.cfg.n_devices as f64 * self.cfg.phi_r_max_w,
            _ => self.cfg.phi_r_max_w,
        }
    }

    /// Battery cap on the per-cycle harvested energy (aggregate for NOMA).
    fn battery_cap_j(&self) -> f64 {
        match self.protocol {
            ProtocolKind::Noma => self.cfg.n_devices as f64 * self.cfg.battery_j,
            _ => self.cfg.battery_j,
        }
    }

    /// Transmit-power cap (on total `P_Sigma` for NOMA).
    fn tx_cap_w(&self) -> f64 {
        match self.protocol {
            ProtocolKind::Noma => self.cfg.n_devices as f64 * self.cfg.phi_t_max_w,
            _ => self.cfg.phi_t_max_w,
        }
    }

    /// Lower bound of the policy knob (`tau_s_min` or `m_min`).
    pub fn policy_floor(&self) -> f64 {
        match self.policy {
            PolicyKind::Mv => self.cfg.tau_s_min_s,
            PolicyKind::St => f64::from(self.cfg.m_min),
        }
    }

    fn policy_ceil(&self) -> f64 {
        match self.policy {
            PolicyKind::Mv => self.cfg.tau_s_max_s,
            PolicyKind::St => f64::from(self.cfg.m_max),
        }
    }

    /// Feasible slot-length floor (EE, energy, transmit cap, `tau_p`).
    pub fn tau_b_floor(&self) -> f64 {
        self.tau_b_floor
    }

    /// Largest slot length admissible at a given rate.
    pub fn tau_b_ceil(&self, lambda: f64) -> f64 {
        self.cfg
            .tau_b_max_s
            .min((1.0 - 2.0 * STABILITY_MARGIN) / lambda)
    }

    /// The decision vector this problem's solvers use at `(lambda, tau_b)`:
    /// policy knob at its floor, charge power at the minimum satisfying the
    /// energy constraint.
    pub fn point_at(&self, lambda: f64, tau_b: f64) -> Result<DecisionVector> {
        let mut x = DecisionVector {
            lambda_rate: lambda,
            tau_b_s: tau_b,
            policy_param: match self.policy {
                PolicyKind::Mv => PolicyParam::VacationLen(self.policy_floor()),
                PolicyKind::St => PolicyParam::Threshold(self.policy_floor()),
            },
            phi_r_w: 0.0,
        };
        let tx = phy::required_tx_power(self.protocol, &x, &self.cfg, self.gain)?;
        let energy = phy::tx_energy_per_cycle(self.protocol, tau_b, &self.cfg, tx);
        x.phi_r_w = (energy / self.cfg.tau_p_s).min(self.phi_r_cap_w());
        Ok(x)
    }

    /// Peak AoI at a point (the optimization objective), seconds.
    pub fn objective(&self, x: &DecisionVector) -> Result<f64> {
        Ok(queueing::protocol_peak_aoi(self.protocol, self.policy, x)?.total_peak_aoi_s)
    }

    /// The five named constraint groups, each reduced to its minimum slack.
    pub fn constraints(&self, x: &DecisionVector) -> Result<Vec<ConstraintSlack>> {
        let tx = phy::required_tx_power(self.protocol, x, &self.cfg, self.gain)?;
        let tx_energy = phy::tx_energy_per_cycle(self.protocol, x.tau_b_s, &self.cfg, tx);
        let harvested = self.cfg.tau_p_s * x.phi_r_w;
        let energy = [
            harvested - tx_energy,
            self.battery_cap_j() - harvested,
            self.phi_r_cap_w() - x.phi_r_w,
            x.phi_r_w,
            self.tx_cap_w() - tx,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min);

        let pol = x.policy_param.value();
        let slot = [
            x.tau_b_s - self.cfg.tau_p_s,
            self.cfg.tau_b_max_s - x.tau_b_s,
            pol - self.policy_floor(),
            self.policy_ceil() - pol,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min);

        let rate = (x.lambda_rate - self.cfg.lambda_min).min(self.cfg.lambda_max - x.lambda_rate);
        let stability = (1.0 - STABILITY_MARGIN) - x.rho();
        let ee = phy::energy_efficiency(self.protocol, self.policy, x, &self.cfg, self.gain)?;

        Ok(vec![
            ConstraintSlack {
                name: "energy",
                slack: energy,
            },
            ConstraintSlack {
                name: "slot_bounds",
                slack: slot,
            },
            ConstraintSlack {
                name: "rate_bounds",
                slack: rate,
            },
            ConstraintSlack {
                name: "stability",
                slack: stability,
            },
            ConstraintSlack {
                name: "ee",
                slack: ee.bits_per_j / self.cfg.ee_min - 1.0,
            },
        ])
    }

    /// Minimum slack over all constraint groups (`-inf` outside the domain).
    pub fn min_slack(&self, x: &DecisionVector) -> f64 {
        match self.constraints(x) {
            Ok(slacks) => slacks
                .into_iter()
                .fold(f64::INFINITY, |m, c| m.min(c.slack)),
            Err(_) => f64::NEG_INFINITY,
        }
    }

    pub fn is_feasible(&self, x: &DecisionVector) -> bool {
        self.min_slack(x) >= -SLACK_TOL
    }
}

/// Slot-length slacks that do not depend on the rate or the policy knob:
/// used to precompute the feasible floor.
fn rate_free_slacks(
    protocol: ProtocolKind,
    policy: PolicyKind,
    cfg: &SystemConfig,
    gain: f64,
    tx_cap_w: f64,
    energy_cap_j: f64,
    tau_b: f64,
) -> Result<[(&'static str, f64); 3]> {
    let probe = DecisionVector {
        lambda_rate: cfg.lambda_min,
        tau_b_s: tau_b,
        policy_param: match policy {
            PolicyKind::Mv => PolicyParam::VacationLen(cfg.tau_s_min_s),
            PolicyKind::St => PolicyParam::Threshold(f64::from(cfg.m_min)),
        },
        phi_r_w: 0.0,
    };
    let tx = phy::required_tx_power(protocol, &probe, cfg, gain)?;
    let tx_energy = phy::tx_energy_per_cycle(protocol, tau_b, cfg, tx);
    let ee = phy::energy_efficiency(protocol, policy, &probe, cfg, gain)?;
    Ok([
        ("ee", ee.bits_per_j / cfg.ee_min - 1.0),
        ("energy", energy_cap_j - tx_energy),
        ("tx power cap", tx_cap_w - tx),
    ])
}

/// Assemble one problem instance, verifying that its feasible set is
/// nonempty; an empty set yields a diagnostic naming the binding
/// constraint.
pub fn build_problem(
    protocol: ProtocolKind,
    policy: PolicyKind,
    cfg: &SystemConfig,
    device_index: usize,
) -> Result<ProblemSpec> {
    let cfg = crate::config::validate_config(cfg.clone())?;
    let channels = ChannelState::from_config(&cfg, protocol)?;
    let gain = *channels.gains.get(device_index).ok_or_else(|| {
        Error::Config(format!(
            "device index {device_index} out of range (N = {})",
            cfg.n_devices
        ))
    })?;

    let tx_cap = match protocol {
        ProtocolKind::Noma => cfg.n_devices as f64 * cfg.phi_t_max_w,
        _ => cfg.phi_t_max_w,
    };
    let phi_r_cap = match protocol {
        ProtocolKind::Noma => cfg.n_devices as f64 * cfg.phi_r_max_w,
        _ => cfg.phi_r_max_w,
    };
    let battery = match protocol {
        ProtocolKind::Noma => cfg.n_devices as f64 * cfg.battery_j,
        _ => cfg.battery_j,
    };
    let energy_cap = (cfg.tau_p_s * phi_r_cap).min(battery);

    let lo = cfg.tau_p_s * (1.0 + 1e-12) + 1e-15;
    let hi = cfg.tau_b_max_s;
    let min_slack_at = |tau: f64| -> f64 {
        match rate_free_slacks(protocol, policy, &cfg, gain, tx_cap, energy_cap, tau) {
            Ok(slacks) => slacks.iter().map(|(_, s)| *s).fold(f64::INFINITY, f64::min),
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let floor = lowest_feasible(min_slack_at, lo, hi, 1e-14).ok_or_else(|| {
        let binding = rate_free_slacks(protocol, policy, &cfg, gain, tx_cap, energy_cap, hi)
            .map(|slacks| {
                slacks
                    .iter()
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .map(|(name, _)| *name)
                    .unwrap_or("unknown")
            })
            .unwrap_or("tx power domain");
        Error::Infeasible(format!(
            "{protocol}-{policy}: no slot length in (tau_p, tau_b_max] satisfies \
             the {binding} constraint"
        ))
    })?;

    if cfg.lambda_min * floor >= 1.0 - STABILITY_MARGIN {
        return Err(Error::Infeasible(format!(
            "{protocol}-{policy}: stability is violated at the smallest feasible \
             slot length ({floor} s) even at lambda_min"
        )));
    }

    Ok(ProblemSpec {
        protocol,
        policy,
        cfg,
        gain,
        device_index,
        tau_b_floor: floor,
    })
}

/// Minimize the peak AoI at a fixed update rate: the policy knob sits at
/// its floor, the charge power at its minimum, and the slot length is found
/// by golden-section search over the feasible interval.
pub fn solve_subproblem_fixed_lambda(
    p: &ProblemSpec,
    lambda: f64,
) -> Result<(DecisionVector, f64)> {
    if !(lambda >= p.cfg.lambda_min - SLACK_TOL && lambda <= p.cfg.lambda_max + SLACK_TOL) {
        return Err(Error::Domain(format!(
            "lambda = {lambda} outside [{}, {}]",
            p.cfg.lambda_min, p.cfg.lambda_max
        )));
    }
    let lo = p.tau_b_floor();
    let hi = p.tau_b_ceil(lambda);
    if lo > hi {
        return Err(Error::Infeasible(format!(
            "empty tau_b interval at lambda = {lambda}: floor {lo} > ceil {hi}"
        )));
    }
    let objective_at = |tau: f64| -> f64 {
        p.point_at(lambda, tau)
            .and_then(|x| p.objective(&x))
            .unwrap_or(f64::INFINITY)
    };
    let (tau_star, obj) = golden_section_min(objective_at, lo, hi, TAU_B_TOL);
    if !obj.is_finite() {
        return Err(Error::Infeasible(format!(
            "objective undefined across the tau_b interval at lambda = {lambda}"
        )));
    }
    let x = p.point_at(lambda, tau_star)?;
    Ok((x, obj))
}

/// Round a relaxed ST threshold to the better feasible neighboring integer.
fn round_threshold(p: &ProblemSpec, x: &DecisionVector) -> Option<RoundedThreshold> {
    if p.policy != PolicyKind::St {
        return None;
    }
    let m = x.policy_param.value();
    let mut best: Option<RoundedThreshold> = None;
    for cand in [m.floor(), m.ceil()] {
        let clamped = cand.clamp(f64::from(p.cfg.m_min), f64::from(p.cfg.m_max));
        let y = DecisionVector {
            policy_param: PolicyParam::Threshold(clamped),
            ..*x
        };
        if !p.is_feasible(&y) {
            continue;
        }
        if let Ok(obj) = p.objective(&y) {
            if best.is_none_or(|b| obj < b.objective_s) {
                best = Some(RoundedThreshold {
                    threshold: clamped,
                    objective_s: obj,
                });
            }
        }
    }
    best
}

/// Exact linear search: sweep `K+1` evenly spaced rates over
/// `[lambda_min, min(lambda_max, (1 - 1e-9)/tau_p)]`, solve the convex
/// subproblem at each, and keep the best feasible point.
pub fn exact_linear_search(p: &ProblemSpec, k: usize) -> Result<SolveReport> {
    if k < 1 {
        return Err(Error::Domain("grid size K must be >= 1".into()));
    }
    let start = Instant::now();
    let lambda_top = p
        .cfg
        .lambda_max
        .min((1.0 - STABILITY_MARGIN) / p.cfg.tau_p_s);
    if lambda_top < p.cfg.lambda_min {
        return Err(Error::Infeasible(
            "rate bounds leave no admissible lambda".into(),
        ));
    }
    let step = (lambda_top - p.cfg.lambda_min) / k as f64;
    let count = if step == 0.0 { 1 } else { k + 1 };

    let mut trace = Vec::with_capacity(count);
    let mut best: Option<(DecisionVector, f64)> = None;
    for i in 0..count {
        let lambda = p.cfg.lambda_min + step * i as f64;
        match solve_subproblem_fixed_lambda(p, lambda) {
            Ok((x, obj)) => {
                trace.push(TracePoint {
                    x,
                    objective_s: obj,
                });
                if best.as_ref().is_none_or(|(_, b)| obj < *b) {
                    best = Some((x, obj));
                }
            }
            Err(Error::Infeasible(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let (x_star, objective_s) =
        best.ok_or_else(|| Error::Infeasible("no feasible grid point".into()))?;
    debug_assert!(trace.iter().all(|t| t.objective_s >= objective_s));
    let rounded = round_threshold(p, &x_star);
    Ok(SolveReport {
        x_star,
        objective_s,
        method: SolveMethod::Exact,
        iterations: count,
        trace,
        feasible: p.is_feasible(&x_star),
        wallclock_ms: start.elapsed().as_secs_f64() * 1e3,
        rounded,
        notes: Vec::new(),
    })
}

/// The DC split of a policy's peak-AoI objective: `f1` convex, `f2` the
/// remainder that CCP linearizes, with its analytic gradient over
/// `(lambda, tau_b, policy knob, phi_r)`.
#[derive(Clone, Copy, Debug)]
pub struct DcSplit {
    policy: PolicyKind,
}

impl DcSplit {
    pub fn f1(&self, x: &DecisionVector) -> f64 {
        match self.policy {
            PolicyKind::Mv => x.policy_param.value() / 2.0 + x.tau_b_s / 2.0 + 1.0 / x.lambda_rate,
            PolicyKind::St => x.tau_b_s + 1.0 / (2.0 * x.lambda_rate),
        }
    }

    pub fn f2(&self, x: &DecisionVector) -> f64 {
        let a = x.rho();
        match self.policy {
            PolicyKind::Mv => x.tau_b_s / (2.0 * (1.0 - a)),
            PolicyKind::St => {
                x.lambda_rate * x.tau_b_s * x.tau_b_s / (2.0 * (1.0 - a))
                    + x.policy_param.value() / (2.0 * x.lambda_rate)
            }
        }
    }

    /// Gradient of `f2` in the order (lambda, tau_b, policy knob, phi_r).
    pub fn grad_f2(&self, x: &DecisionVector) -> [f64; 4] {
        let a = x.rho();
        let one = 1.0 - a;
        match self.policy {
            PolicyKind::Mv => [
                x.tau_b_s * x.tau_b_s / (2.0 * one * one),
                1.0 / (2.0 * one * one),
                0.0,
                0.0,
            ],
            PolicyKind::St => [
                x.tau_b_s * x.tau_b_s / (2.0 * one * one)
                    - x.policy_param.value() / (2.0 * x.lambda_rate * x.lambda_rate),
                x.lambda_rate * x.tau_b_s * (2.0 - a) / (2.0 * one * one),
                1.0 / (2.0 * x.lambda_rate),
                0.0,
            ],
        }
    }
}

/// The DC split for a problem's policy. `f1 + f2` reproduces the peak-AoI
/// objective identically on the stable region.
pub fn dc_decompose(p: &ProblemSpec) -> DcSplit {
    DcSplit { policy: p.policy }
}

/// Deterministic feasible starting point: `lambda_min`, the midpoint of the
/// feasible slot interval, policy knob at its floor, minimal charge power.
pub fn find_feasible_point(p: &ProblemSpec) -> Result<DecisionVector> {
    let lo = p.tau_b_floor();
    let hi = p.tau_b_ceil(p.cfg.lambda_min);
    if lo > hi {
        return Err(Error::Infeasible(
            "empty tau_b interval at lambda_min".into(),
        ));
    }
    let mid = 0.5 * (lo + hi);
    let x = p.point_at(p.cfg.lambda_min, mid)?;
    if p.is_feasible(&x) {
        return Ok(x);
    }
    // Interval construction should already be feasible; scan as a fallback.
    for i in 0..=64 {
        let tau = lo + (hi - lo) * i as f64 / 64.0;
        if let Ok(x) = p.point_at(p.cfg.lambda_min, tau) {
            if p.is_feasible(&x) {
                return Ok(x);
            }
        }
    }
    Err(Error::Infeasible(
        "no feasible starting point found on the tau_b scan".into(),
    ))
}

/// 2D Euclidean projection onto `box ∩ {a*x + b*y <= c}` with `a, b > 0`.
fn project_box_halfplane(
    point: (f64, f64),
    xlim: (f64, f64),
    ylim: (f64, f64),
    plane: (f64, f64, f64),
) -> (f64, f64) {
    let clamp = |p: (f64, f64)| (p.0.clamp(xlim.0, xlim.1), p.1.clamp(ylim.0, ylim.1));
    let (a, b, c) = plane;
    let q = clamp(point);
    if a * q.0 + b * q.1 <= c {
        return q;
    }
    // The halfplane is active: project onto its boundary line, then clamp
    // along the line to the segment inside the box.
    let norm2 = a * a + b * b;
    let viol = (a * point.0 + b * point.1 - c) / norm2;
    let foot = (point.0 - viol * a, point.1 - viol * b);
    let dir = (-b, a);
    let mut t_min = f64::NEG_INFINITY;
    let mut t_max = f64::INFINITY;
    for (p0, d, lim) in [(foot.0, dir.0, xlim), (foot.1, dir.1, ylim)] {
        if d.abs() < 1e-300 {
            continue;
        }
        let (t0, t1) = ((lim.0 - p0) / d, (lim.1 - p0) / d);
        t_min = t_min.max(t0.min(t1));
        t_max = t_max.min(t0.max(t1));
    }
    let t = 0.0f64.clamp(t_min, t_max.max(t_min));
    clamp((foot.0 + t * dir.0, foot.1 + t * dir.1))
}

/// Convex-concave procedure: linearize `f2` and the bilinear stability
/// constraint at the current iterate, solve the surrogate by projected
/// gradient descent in `(lambda, tau_b)`, and damp each step so the true
/// objective is nonincreasing and every iterate stays feasible.
pub fn ccp_solve(
    p: &ProblemSpec,
    x0: &DecisionVector,
    k_max: usize,
    eps: f64,
) -> Result<SolveReport> {
    let start = Instant::now();
    if !p.is_feasible(x0) {
        return Err(Error::Infeasible(format!(
            "CCP starting point infeasible (min slack {})",
            p.min_slack(x0)
        )));
    }
    let split = dc_decompose(p);
    let pol_floor = p.policy_floor();
    let mut notes = Vec::new();
    let mut x = *x0;
    let mut obj = p.objective(&x)?;
    let mut trace = vec![TracePoint {
        x,
        objective_s: obj,
    }];
    let mut iterations = 0;

    for k in 0..k_max {
        iterations = k + 1;
        let grad = split.grad_f2(&x);
        let (lam_k, tau_k) = (x.lambda_rate, x.tau_b_s);

        // Surrogate: f1(lambda, tau, pol_floor) + lambda*g0 + tau*g1 over the
        // box, intersected with the convexified stability halfplane
        // lambda*tau_k + tau*lam_k <= 1 + lam_k*tau_k - margin.
        let xlim = (p.cfg.lambda_min, p.cfg.lambda_max);
        let ylim = (p.tau_b_floor(), p.cfg.tau_b_max_s);
        let plane = (tau_k, lam_k, 1.0 + lam_k * tau_k - STABILITY_MARGIN);
        let sval = |l: f64, t: f64| -> f64 {
            let base = match p.policy {
                PolicyKind::Mv => pol_floor / 2.0 + t / 2.0 + 1.0 / l,
                PolicyKind::St => t + 1.0 / (2.0 * l),
            };
            base + l * grad[0] + t * grad[1] + pol_floor * grad[2]
        };
        let sgrad = |l: f64, _t: f64| -> (f64, f64) {
            match p.policy {
                PolicyKind::Mv => (-1.0 / (l * l) + grad[0], 0.5 + grad[1]),
                PolicyKind::St => (-1.0 / (2.0 * l * l) + grad[0], 1.0 + grad[1]),
            }
        };

        // Projected gradient descent with backtracking to surrogate
        // stationarity.
        let mut y = project_box_halfplane((lam_k, tau_k), xlim, ylim, plane);
        let mut step = 1.0;
        for _ in 0..500 {
            let g = sgrad(y.0, y.1);
            let mut cand;
            loop {
                cand =
                    project_box_halfplane((y.0 - step * g.0, y.1 - step * g.1), xlim, ylim, plane);
                let dx = (cand.0 - y.0, cand.1 - y.1);
                let quad = (dx.0 * dx.0 + dx.1 * dx.1) / (2.0 * step);
                if sval(cand.0, cand.1) <= sval(y.0, y.1) + g.0 * dx.0 + g.1 * dx.1 + quad + 1e-18
                    || step < 1e-14
                {
                    break;
                }
                step *= 0.5;
            }
            let moved = ((cand.0 - y.0).powi(2) + (cand.1 - y.1).powi(2)).sqrt();
            y = cand;
            if moved <= 1e-9 * (1.0 + y.0.abs() + y.1.abs()) {
                break;
            }
            step = (step * 2.0).min(1.0);
        }

        // Damped acceptance: walk from x toward the surrogate solution while
        // the step keeps true feasibility and does not increase the true
        // objective. (f2 is not globally concave, so the raw CCP step has no
        // descent guarantee; damping restores monotonicity.)
        let mut accepted: Option<(DecisionVector, f64)> = None;
        let mut t = 1.0;
        while t >= 1e-12 {
            let lam_t = lam_k + t * (y.0 - lam_k);
            let tau_t = tau_k + t * (y.1 - tau_k);
            let pol_t = x.policy_param.value() + t * (pol_floor - x.policy_param.value());
            if let Ok(mut cand) = p.point_at(lam_t, tau_t) {
                cand.policy_param = cand.policy_param.with_value(pol_t);
                if p.is_feasible(&cand) {
                    if let Ok(cand_obj) = p.objective(&cand) {
                        if cand_obj <= obj + 1e-12 {
                            if t < 1.0 {
                                notes.push(format!(
                                    "iteration {k}: surrogate step damped to t = {t:.3e}"
                                ));
                            }
                            accepted = Some((cand, cand_obj));
                            break;
                        }
                    }
                }
            }
            t *= 0.5;
        }

        let Some((x_next, obj_next)) = accepted else {
            notes.push(format!(
                "iteration {k}: no improving damped step; stopping at the last iterate"
            ));
            break;
        };
        let moved = x_next.distance(&x);
        x = x_next;
        obj = obj_next;
        trace.push(TracePoint {
            x,
            objective_s: obj,
        });
        if moved < eps {
            break;
        }
    }

    let rounded = round_threshold(p, &x);
    Ok(SolveReport {
        x_star: x,
        objective_s: obj,
        method: SolveMethod::Ccp,
        iterations,
        trace,
        feasible: p.is_feasible(&x),
        wallclock_ms: start.elapsed().as_secs_f64() * 1e3,
        rounded,
        notes,
    })
}
