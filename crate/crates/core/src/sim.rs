//! Discrete-event simulation oracle for the closed-form queue/AoI results.
//!
//! One run simulates a single FIFO queue with Poisson arrivals and
//! deterministic service under the MV or ST sleep policy, and estimates
//! mean delay, mean queue length, peak AoI, per-packet AoI and utilization
//! with batch-means confidence intervals. Runs are deterministic per seed:
//! identical seeds give bit-identical statistics.
//!
//! The per-packet AoI estimator follows the per-interval definition: the
//! sawtooth trapezoid area of one inter-departure interval divided by that
//! interval's length, i.e. `(D_prev + A_peak)/2`, averaged over packets.
//! The globally time-averaged AoI (total area over total time) is reported
//! separately as a diagnostic; it weights long intervals more and is *not*
//! the per-packet quantity.

pub mod rng;
pub mod stats;

use std::collections::VecDeque;

use crate::config::{PolicyKind, SystemConfig};
use crate::queueing::QueueParams;
use crate::{Error, Result};
use rng::SplitMix64;
use stats::{BatchMeans, Estimate};

/// Specification of one simulation run.
#[derive(Clone, Copy, Debug)]
pub struct SimSpec {
    pub params: QueueParams,
    pub policy: PolicyKind,
    /// Departures to simulate, including warmup.
    pub target_departures: u64,
    /// Departures discarded before measurement starts (at least one is
    /// always discarded: the first departure has no predecessor for peak
    /// AoI).
    pub warmup_departures: u64,
    pub seed: u64,
    /// Number of batches for the confidence intervals (>= 10).
    pub batch_count: u32,
}

impl SimSpec {
    /// A run with the default horizon: 1e6 departures, 10% warmup, 20
    /// batches.
    pub fn new(params: QueueParams, policy: PolicyKind, seed: u64) -> SimSpec {
        SimSpec {
            params,
            policy,
            target_departures: 1_000_000,
            warmup_departures: 100_000,
            seed,
            batch_count: 20,
        }
    }

    /// Same spec with a different horizon (warmup rescaled to 10%).
    pub fn with_departures(mut self, target: u64) -> SimSpec {
        self.target_departures = target;
        self.warmup_departures = target / 10;
        self
    }

    fn validate_common(&self) -> Result<()> {
        if !(self.params.lambda_rate > 0.0) {
            return Err(Error::Sim("arrival rate must be positive".into()));
        }
        if !(self.params.service_s > 0.0) {
            return Err(Error::Sim("service time must be positive".into()));
        }
        match self.policy {
            PolicyKind::Mv => {
                if self.params.vacation_s < 0.0 {
                    return Err(Error::Sim("vacation length must be nonnegative".into()));
                }
            }
            PolicyKind::St => {
                let m = self.params.threshold;
                if !(m >= 1.0) || (m - m.round()).abs() > 1e-9 {
                    return Err(Error::Sim(format!(
                        "ST threshold must be an integer >= 1 (got {m})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Validation for steady-state estimation (stability required).
    fn validate_steady(&self) -> Result<()> {
        self.validate_common()?;
        self.params.check_stable()?;
        if self.batch_count < 10 {
            return Err(Error::Sim("batch_count must be >= 10".into()));
        }
        if self.target_departures <= self.warmup_departures {
            return Err(Error::Sim("target_departures must exceed warmup".into()));
        }
        let measured = self.target_departures - self.warmup_departures.max(1);
        if measured < u64::from(self.batch_count) {
            return Err(Error::Sim("fewer measured departures than batches".into()));
        }
        Ok(())
    }
}

/// Steady-state estimates from one run. All means carry 95% batch-means
/// confidence half-widths.
#[derive(Clone, Copy, Debug)]
pub struct QueueStats {
    pub mean_delay_s: Estimate,
    pub mean_peak_aoi_s: Estimate,
    /// Per-interval sawtooth mean, `(D_prev + A_peak)/2` averaged over
    /// packets.
    pub mean_per_packet_aoi_s: Estimate,
    /// Time-averaged number of packets in system.
    pub mean_queue_len: Estimate,
    /// Fraction of time the server is busy.
    pub rho_observed: Estimate,
    /// Measured departures (after warmup, truncated to whole batches).
    pub departures: u64,
    pub busy_fraction: f64,
    pub idle_fraction: f64,
    /// Diagnostic: total sawtooth area over total time (interval-length
    /// weighted, differs from the per-packet mean).
    pub time_avg_aoi_s: f64,
}

/// One simulation event for trace export.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEvent {
    pub time_s: f64,
    pub kind: TraceKind,
    pub queue_len: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceKind {
    Arrival,
    ServiceStart,
    Departure,
    VacationStart,
    VacationEnd,
    Wake,
}

impl TraceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TraceKind::Arrival => "arrival",
            TraceKind::ServiceStart => "service_start",
            TraceKind::Departure => "departure",
            TraceKind::VacationStart => "vacation_start",
            TraceKind::VacationEnd => "vacation_end",
            TraceKind::Wake => "wake",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Phase {
    /// Serving the queue head; departure at `done`.
    Serving { done: f64 },
    /// On a fixed-length vacation ending at `until` (MV with tau_s > 0).
    Vacation { until: f64 },
    /// Asleep until the queue reaches the wake threshold (ST; also MV with
    /// tau_s = 0, which degenerates to plain M/D/1 idling).
    Sleeping,
}

/// Time totals inside the measurement window, for energy accounting.
#[derive(Clone, Copy, Debug, Default)]
struct PhaseTotals {
    serving_s: f64,
    vacation_s: f64,
    sleeping_s: f64,
}

struct Engine {
    params: QueueParams,
    use_vacations: bool,
    wake_threshold: usize,
    rng: SplitMix64,

    t: f64,
    next_arrival: f64,
    queue: VecDeque<f64>,
    phase: Phase,

    // Measurement bookkeeping.
    effective_warmup: u64,
    per_batch: u64,
    measured_target: u64,
    departures_total: u64,
    measured: u64,
    measuring: bool,
    window_start_t: f64,

    prev_arrival: f64,
    prev_delay: f64,
    prev_departure_t: f64,
    last_departed_arrival: f64,

    delay_acc: BatchMeans,
    peak_acc: BatchMeans,
    pp_acc: BatchMeans,
    queue_integral: f64,
    totals: PhaseTotals,
    area: f64,
    batch_queue_means: Vec<f64>,
    batch_rho_means: Vec<f64>,
    batch_start_t: f64,
    batch_queue_mark: f64,
    batch_serving_mark: f64,

    histogram: Option<Vec<u64>>,
}

impl Engine {
    fn new(spec: &SimSpec, steady: bool) -> Engine {
        let effective_warmup = spec.warmup_departures.max(1);
        let measured_planned = spec.target_departures.saturating_sub(effective_warmup);
        let per_batch = if steady {
            (measured_planned / u64::from(spec.batch_count)).max(1)
        } else {
            u64::MAX
        };
        let measured_target = if steady {
            per_batch * u64::from(spec.batch_count)
        } else {
            measured_planned
        };
        let (use_vacations, wake_threshold) = match spec.policy {
            PolicyKind::Mv if spec.params.vacation_s > 0.0 => (true, 1),
            PolicyKind::Mv => (false, 1),
            PolicyKind::St => (false, spec.params.threshold.round() as usize),
        };
        let mut rng = SplitMix64::substream(spec.seed, 0);
        let next_arrival = rng.next_exp(spec.params.lambda_rate);
        Engine {
            params: spec.params,
            use_vacations,
            wake_threshold,
            rng,
            t: 0.0,
            next_arrival,
            queue: VecDeque::new(),
            phase: Phase::Sleeping,
            effective_warmup,
            per_batch,
            measured_target,
            departures_total: 0,
            measured: 0,
            measuring: false,
            window_start_t: 0.0,
            prev_arrival: 0.0,
            prev_delay: 0.0,
            prev_departure_t: 0.0,
            last_departed_arrival: -1.0,
            delay_acc: BatchMeans::new(per_batch.max(1)),
            peak_acc: BatchMeans::new(per_batch.max(1)),
            pp_acc: BatchMeans::new(per_batch.max(1)),
            queue_integral: 0.0,
            totals: PhaseTotals::default(),
            area: 0.0,
            batch_queue_means: Vec::new(),
            batch_rho_means: Vec::new(),
            batch_start_t: 0.0,
            batch_queue_mark: 0.0,
            batch_serving_mark: 0.0,
            histogram: None,
        }
    }

    /// Advance the clock, integrating time-weighted stats.
    fn advance(&mut self, to: f64) {
        debug_assert!(to >= self.t);
        if self.measuring {
            let dt = to - self.t;
            self.queue_integral += dt * self.queue.len() as f64;
            match self.phase {
                Phase::Serving { .. } => self.totals.serving_s += dt,
                Phase::Vacation { .. } => self.totals.vacation_s += dt,
                Phase::Sleeping => self.totals.sleeping_s += dt,
            }
        }
        self.t = to;
    }

    fn start_service(&mut self, sink: &mut impl FnMut(TraceEvent)) {
        debug_assert!(!self.queue.is_empty());
        self.phase = Phase::Serving {
            done: self.t + self.params.service_s,
        };
        sink(TraceEvent {
            time_s: self.t,
            kind: TraceKind::ServiceStart,
            queue_len: self.queue.len(),
        });
    }

    fn begin_idle(&mut self, sink: &mut impl FnMut(TraceEvent)) {
        self.phase = if self.use_vacations {
            Phase::Vacation {
                until: self.t + self.params.vacation_s,
            }
        } else {
            Phase::Sleeping
        };
        sink(TraceEvent {
            time_s: self.t,
            kind: TraceKind::VacationStart,
            queue_len: self.queue.len(),
        });
    }

    /// Process exactly one event; returns its kind.
    fn step(&mut self, sink: &mut impl FnMut(TraceEvent)) -> TraceKind {
        match self.phase {
            Phase::Serving { done } if self.next_arrival < done => self.handle_arrival(sink),
            Phase::Serving { done } => {
                self.advance(done);
                self.handle_departure(sink);
                TraceKind::Departure
            }
            Phase::Vacation { until } if self.next_arrival < until => self.handle_arrival(sink),
            Phase::Vacation { until } => {
                self.advance(until);
                sink(TraceEvent {
                    time_s: self.t,
                    kind: TraceKind::VacationEnd,
                    queue_len: self.queue.len(),
                });
                if self.queue.is_empty() {
                    self.phase = Phase::Vacation {
                        until: self.t + self.params.vacation_s,
                    };
                    sink(TraceEvent {
                        time_s: self.t,
                        kind: TraceKind::VacationStart,
                        queue_len: 0,
                    });
                } else {
                    sink(TraceEvent {
                        time_s: self.t,
                        kind: TraceKind::Wake,
                        queue_len: self.queue.len(),
                    });
                    self.start_service(sink);
                }
                TraceKind::VacationEnd
            }
            Phase::Sleeping => self.handle_arrival(sink),
        }
    }

    fn handle_arrival(&mut self, sink: &mut impl FnMut(TraceEvent)) -> TraceKind {
        let at = self.next_arrival;
        self.advance(at);
        self.queue.push_back(at);
        self.next_arrival = at + self.rng.next_exp(self.params.lambda_rate);
        sink(TraceEvent {
            time_s: at,
            kind: TraceKind::Arrival,
            queue_len: self.queue.len(),
        });
        if self.phase == Phase::Sleeping && self.queue.len() >= self.wake_threshold {
            sink(TraceEvent {
                time_s: self.t,
                kind: TraceKind::Wake,
                queue_len: self.queue.len(),
            });
            self.start_service(sink);
        }
        TraceKind::Arrival
    }

    fn handle_departure(&mut self, sink: &mut impl FnMut(TraceEvent)) {
        let arrival = self
            .queue
            .pop_front()
            .expect("departure from nonempty queue");
        // FIFO discipline: departures leave in arrival order.
        assert!(
            arrival >= self.last_departed_arrival,
            "FIFO order violated: {arrival} after {}",
            self.last_departed_arrival
        );
        self.last_departed_arrival = arrival;
        self.departures_total += 1;
        let delay = self.t - arrival;

        if self.measuring {
            self.measured += 1;
            let peak = self.t - self.prev_arrival;
            let per_packet = (self.prev_delay + peak) / 2.0;
            self.delay_acc.push(delay);
            self.peak_acc.push(peak);
            self.pp_acc.push(per_packet);
            self.area += (self.t - self.prev_departure_t) * per_packet;
            if let Some(hist) = self.histogram.as_mut() {
                let len = self.queue.len().min(hist.len() - 1);
                hist[len] += 1;
            }
            if self.measured.is_multiple_of(self.per_batch) {
                let span = self.t - self.batch_start_t;
                self.batch_queue_means
                    .push((self.queue_integral - self.batch_queue_mark) / span);
                self.batch_rho_means
                    .push((self.totals.serving_s - self.batch_serving_mark) / span);
                self.batch_start_t = self.t;
                self.batch_queue_mark = self.queue_integral;
                self.batch_serving_mark = self.totals.serving_s;
            }
        } else if self.departures_total == self.effective_warmup {
            // Measurement window opens at this departure.
            self.measuring = true;
            self.window_start_t = self.t;
            self.batch_start_t = self.t;
        }
        self.prev_arrival = arrival;
        self.prev_delay = delay;
        self.prev_departure_t = self.t;

        sink(TraceEvent {
            time_s: self.t,
            kind: TraceKind::Departure,
            queue_len: self.queue.len(),
        });
        if self.queue.is_empty() {
            self.begin_idle(sink);
        } else {
            self.start_service(sink);
        }
    }

    fn run_steady(&mut self) -> (QueueStats, PhaseTotals, f64) {
        let mut sink = |_: TraceEvent| {};
        while self.measured < self.measured_target {
            self.step(&mut sink);
        }
        let window = self.t - self.window_start_t;
        let idle = self.totals.vacation_s + self.totals.sleeping_s;
        let stats = QueueStats {
            mean_delay_s: self.delay_acc.estimate(),
            mean_peak_aoi_s: self.peak_acc.estimate(),
            mean_per_packet_aoi_s: self.pp_acc.estimate(),
            mean_queue_len: Estimate::from_batch_means(&self.batch_queue_means),
            rho_observed: Estimate::from_batch_means(&self.batch_rho_means),
            departures: self.measured,
            busy_fraction: self.totals.serving_s / window,
            idle_fraction: idle / window,
            time_avg_aoi_s: self.area / window,
        };
        (stats, self.totals, window)
    }
}

/// Run one replication and estimate steady-state queue statistics.
pub fn simulate(spec: &SimSpec) -> Result<QueueStats> {
    spec.validate_steady()?;
    let mut engine = Engine::new(spec, true);
    Ok(engine.run_steady().0)
}

/// Departure-epoch queue-length histogram (number of packets left behind),
/// measured after warmup. Entry `max_len` collects the overflow tail.
pub fn departure_queue_histogram(spec: &SimSpec, max_len: usize) -> Result<Vec<u64>> {
    spec.validate_steady()?;
    let mut engine = Engine::new(spec, true);
    engine.histogram = Some(vec![0; max_len + 1]);
    engine.run_steady();
    Ok(engine.histogram.take().unwrap())
}

/// Time-averaged power over the measurement window, W.
///
/// Active slots draw `power_active_w` for the whole cycle plus
/// `tx_power_w` during the transmission sub-slot (`tau_b - tau_p` of every
/// `tau_b`). Idle time splits into one switching slot at `power_switch_w`
/// followed by `switch_ratio` times as much idle time at `power_idle_w`.
pub fn energy_trace(spec: &SimSpec, cfg: &SystemConfig, tx_power_w: f64) -> Result<f64> {
    spec.validate_steady()?;
    if !(cfg.tau_p_s < spec.params.service_s) {
        return Err(Error::Sim(format!(
            "service slot {} s does not contain the EH sub-slot {} s",
            spec.params.service_s, cfg.tau_p_s
        )));
    }
    let mut engine = Engine::new(spec, true);
    let (_, totals, window) = engine.run_steady();

    let tx_s = totals.serving_s * (spec.params.service_s - cfg.tau_p_s) / spec.params.service_s;
    let idle_total = totals.vacation_s + totals.sleeping_s;
    let switch_s = idle_total / (cfg.switch_ratio + 1.0);
    let idle_s = idle_total - switch_s;
    let energy_j = cfg.power_active_w * totals.serving_s
        + tx_power_w * tx_s
        + cfg.power_idle_w * idle_s
        + cfg.power_switch_w * switch_s;
    Ok(energy_j / window)
}

/// Raw event log, capped at `max_events`. Unstable parameter sets are
/// allowed here (trace mode only; no steady-state estimates).
pub fn event_trace(spec: &SimSpec, max_events: usize) -> Result<Vec<TraceEvent>> {
    spec.validate_common()?;
    let mut engine = Engine::new(spec, false);
    let mut events = Vec::with_capacity(max_events.min(1 << 20));
    // The initial idle period is part of the log.
    events.push(TraceEvent {
        time_s: 0.0,
        kind: TraceKind::VacationStart,
        queue_len: 0,
    });
    if engine.use_vacations {
        engine.phase = Phase::Vacation {
            until: engine.params.vacation_s,
        };
    }
    while events.len() < max_events {
        let room = max_events - events.len();
        let mut overflow = false;
        {
            let mut taken = 0usize;
            let mut sink = |e: TraceEvent| {
                if taken < room {
                    events.push(e);
                    taken += 1;
                } else {
                    overflow = true;
                }
            };
            engine.step(&mut sink);
        }
        if overflow {
            break;
        }
    }
    events.truncate(max_events);
    Ok(events)
}

// The steady-state engine starts in `Sleeping` even for MV; the first
// arrival then triggers service directly. Warmup absorbs the difference
// from starting mid-vacation, and the stationary law does not depend on
// the initial state.

#[cfg(test)]
mod tests {
    use super::*;
    use crate::queueing;

    fn spec_md1(lambda: f64, service: f64, seed: u64) -> SimSpec {
        SimSpec::new(QueueParams::mv(lambda, service, 0.0), PolicyKind::Mv, seed)
            .with_departures(200_000)
    }

    #[test]
    fn determinism_bit_identical() {
        let spec = spec_md1(0.5, 1.0, 42).with_departures(20_000);
        let a = simulate(&spec).unwrap();
        let b = simulate(&spec).unwrap();
        assert_eq!(a.mean_delay_s.mean.to_bits(), b.mean_delay_s.mean.to_bits());
        assert_eq!(
            a.mean_peak_aoi_s.mean.to_bits(),
            b.mean_peak_aoi_s.mean.to_bits()
        );
        assert_eq!(
            a.mean_queue_len.mean.to_bits(),
            b.mean_queue_len.mean.to_bits()
        );
        assert_eq!(a.time_avg_aoi_s.to_bits(), b.time_avg_aoi_s.to_bits());
    }

    #[test]
    fn md1_delay_matches_closed_form() {
        let spec = spec_md1(0.5, 1.0, 7);
        let stats = simulate(&spec).unwrap();
        let expect = queueing::md1_mean_delay(&spec.params).unwrap();
        assert!(
            (stats.mean_delay_s.mean - expect).abs() / expect < 0.01,
            "delay {} vs {expect}",
            stats.mean_delay_s.mean
        );
    }

    #[test]
    fn rho_observed_matches_lambda_tau() {
        let spec = spec_md1(0.6, 1.0, 3);
        let stats = simulate(&spec).unwrap();
        let rho = 0.6;
        assert!(
            (stats.rho_observed.mean - rho).abs() <= stats.rho_observed.ci_half_width + 0.01,
            "rho {} vs {rho}",
            stats.rho_observed.mean
        );
        assert!((stats.busy_fraction + stats.idle_fraction - 1.0).abs() < 1e-9);
    }

    #[test]
    fn littles_law_empirical() {
        let spec = SimSpec::new(QueueParams::mv(0.5, 1.0, 0.4), PolicyKind::Mv, 11)
            .with_departures(200_000);
        let stats = simulate(&spec).unwrap();
        let lhs = stats.mean_queue_len.mean;
        let rhs = 0.5 * stats.mean_delay_s.mean;
        let ci = stats.mean_queue_len.ci_half_width + 0.5 * stats.mean_delay_s.ci_half_width;
        assert!(
            (lhs - rhs).abs() <= ci + 0.01,
            "queue {lhs} vs lambda*delay {rhs}"
        );
    }

    #[test]
    fn mv_peak_aoi_matches_closed_form() {
        let params = QueueParams::mv(0.5, 1.0, 0.4);
        let spec = SimSpec::new(params, PolicyKind::Mv, 5).with_departures(400_000);
        let stats = simulate(&spec).unwrap();
        let expect = queueing::peak_aoi_mv(&params).unwrap();
        assert!(
            (stats.mean_peak_aoi_s.mean - expect.total_peak_aoi_s).abs() / expect.total_peak_aoi_s
                < 0.01
        );
        assert!(
            (stats.mean_per_packet_aoi_s.mean - expect.per_packet_aoi_s).abs()
                / expect.per_packet_aoi_s
                < 0.01
        );
    }

    #[test]
    fn st_matches_closed_form() {
        let params = QueueParams::st(0.5, 1.0, 3.0);
        let spec = SimSpec::new(params, PolicyKind::St, 9).with_departures(400_000);
        let stats = simulate(&spec).unwrap();
        let queue = queueing::st_mean_queue(&params).unwrap();
        let peak = queueing::peak_aoi_st(&params).unwrap().total_peak_aoi_s;
        assert!((stats.mean_queue_len.mean - queue).abs() / queue < 0.01);
        assert!((stats.mean_peak_aoi_s.mean - peak).abs() / peak < 0.01);
    }

    #[test]
    fn policy_free_reductions_agree_with_md1() {
        let md1_delay = 1.5;
        let mv = SimSpec::new(QueueParams::mv(0.5, 1.0, 0.0), PolicyKind::Mv, 13)
            .with_departures(300_000);
        let st = SimSpec::new(QueueParams::st(0.5, 1.0, 1.0), PolicyKind::St, 13)
            .with_departures(300_000);
        for spec in [mv, st] {
            let stats = simulate(&spec).unwrap();
            assert!(
                (stats.mean_delay_s.mean - md1_delay).abs() / md1_delay < 0.01,
                "{}",
                stats.mean_delay_s.mean
            );
        }
    }

    #[test]
    fn unstable_rejected_for_steady_state() {
        let spec = SimSpec::new(QueueParams::mv(1.2, 1.0, 0.0), PolicyKind::Mv, 1);
        assert!(matches!(simulate(&spec), Err(Error::Unstable { .. })));
    }

    #[test]
    fn trace_mode_allows_unstable_and_caps_events() {
        let spec = SimSpec::new(QueueParams::mv(2.0, 1.0, 0.5), PolicyKind::Mv, 17);
        let events = event_trace(&spec, 500).unwrap();
        assert_eq!(events.len(), 500);
        assert!(events.windows(2).all(|w| w[0].time_s <= w[1].time_s));
        assert_eq!(events[0].kind, TraceKind::VacationStart);
    }

    #[test]
    fn trace_contains_vacation_cycle() {
        let spec = SimSpec::new(QueueParams::mv(0.2, 0.5, 1.0), PolicyKind::Mv, 19);
        let events = event_trace(&spec, 2_000).unwrap();
        for kind in [
            TraceKind::Arrival,
            TraceKind::ServiceStart,
            TraceKind::Departure,
            TraceKind::VacationStart,
            TraceKind::VacationEnd,
            TraceKind::Wake,
        ] {
            assert!(events.iter().any(|e| e.kind == kind), "missing {kind:?}");
        }
    }

    #[test]
    fn histogram_matches_md1_empty_probability() {
        let spec = spec_md1(0.5, 1.0, 23);
        let hist = departure_queue_histogram(&spec, 64).unwrap();
        let total: u64 = hist.iter().sum();
        let p0 = hist[0] as f64 / total as f64;
        assert!((p0 - 0.5).abs() < 0.01, "pi_0 {p0}");
    }

    #[test]
    fn energy_trace_constant_powers() {
        // With equal power constants c everywhere, the additive active model
        // gives c * (1 + rho * (tau_b - tau_p)/tau_b), not c.
        let mut cfg = SystemConfig::default();
        cfg.power_active_w = 0.1;
        cfg.power_idle_w = 0.1;
        cfg.power_switch_w = 0.1;
        let params = QueueParams::mv(25.0, 0.02, 0.01);
        let spec = SimSpec::new(params, PolicyKind::Mv, 29).with_departures(100_000);
        let avg = energy_trace(&spec, &cfg, 0.1).unwrap();
        let rho = 0.5;
        let expect = 0.1 * (1.0 + rho * 0.5);
        assert!(
            (avg - expect).abs() / expect < 0.02,
            "avg {avg} vs {expect}"
        );
    }
}
