//! Closed-form queueing and age-of-information mathematics: the M/D/1
//! baseline, the multiple-vacation (MV) and start-up-threshold (ST)
//! variants, and the protocol adapters.
//!
//! Every mean here is a departure-epoch/steady-state quantity of a FIFO
//! single-server queue with Poisson arrivals and deterministic service.
//! The peak AoI decomposes as
//!
//! ```text
//! total = [tau_b + lambda*tau_b^2 / (2(1-lambda*tau_b)) + 1/lambda] + extra
//! ```
//!
//! where `extra` is `tau_s/2` for MV and `(M-1)/(2*lambda)` for ST. The
//! per-packet AoI is the mean height of one sawtooth trapezoid,
//! `(mean_delay + peak)/2`.

use crate::config::{DecisionVector, PolicyKind, PolicyParam, ProtocolKind};
use crate::{Error, Result};

/// Utilizations above `1 - STABILITY_MARGIN` are rejected: the closed forms
/// blow up as `lambda*tau_b -> 1`, so the feasible set is kept closed with a
/// small margin.
pub const STABILITY_MARGIN: f64 = 1e-9;

/// Parameters of one FIFO M/D/1-style queue.
///
/// `vacation_s` is meaningful for the MV policy, `threshold` for ST; the
/// unused knob is kept at its neutral value (0 vacations / threshold 1).
/// The threshold is a real so that solvers can relax integrality; the
/// stationary p.g.f. requires it integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QueueParams {
    /// Arrival rate `lambda`, packets/s.
    pub lambda_rate: f64,
    /// Deterministic service time (`tau` or `tau_b`), s.
    pub service_s: f64,
    /// Vacation length `tau_s`, s (MV).
    pub vacation_s: f64,
    /// Start-up threshold `M` (ST).
    pub threshold: f64,
}

impl QueueParams {
    pub fn md1(lambda_rate: f64, service_s: f64) -> QueueParams {
        QueueParams {
            lambda_rate,
            service_s,
            vacation_s: 0.0,
            threshold: 1.0,
        }
    }

    pub fn mv(lambda_rate: f64, service_s: f64, vacation_s: f64) -> QueueParams {
        QueueParams {
            lambda_rate,
            service_s,
            vacation_s,
            threshold: 1.0,
        }
    }

    pub fn st(lambda_rate: f64, service_s: f64, threshold: f64) -> QueueParams {
        QueueParams {
            lambda_rate,
            service_s,
            vacation_s: 0.0,
            threshold,
        }
    }

    /// Utilization `rho = lambda * service`.
    pub fn rho(&self) -> f64 {
        self.lambda_rate * self.service_s
    }

    /// Check positivity and stability, returning `rho`.
    pub fn check_stable(&self) -> Result<f64> {
        if !(self.lambda_rate > 0.0) || !(self.service_s > 0.0) {
            return Err(Error::Domain(format!(
                "lambda and service must be positive (got lambda={}, service={})",
                self.lambda_rate, self.service_s
            )));
        }
        let rho = self.rho();
        if rho >= 1.0 - STABILITY_MARGIN {
            return Err(Error::Unstable { rho });
        }
        Ok(rho)
    }
}

/// Peak/per-packet AoI of one queue, split into its M/D/1 part and the
/// sleep-policy surcharge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AoIBreakdown {
    /// `tau_b + lambda*tau_b^2/(2(1-rho)) + 1/lambda`, s.
    pub md1_age_s: f64,
    /// `tau_s/2` (MV) or `(M-1)/(2 lambda)` (ST), s.
    pub additional_age_s: f64,
    /// `md1_age_s + additional_age_s`, s.
    pub total_peak_aoi_s: f64,
    /// Mean system delay (Little's law on the mean queue length), s.
    pub mean_delay_s: f64,
    /// `(mean_delay_s + total_peak_aoi_s) / 2`, s.
    pub per_packet_aoi_s: f64,
}

/// `(e^{-rho u} - z) / u` for `u = 1 - z`, the queue p.g.f. denominator with
/// its root at `z = 1` cancelled analytically. `expm1` keeps the
/// cancellation exact near the removable singularity, so no separate
/// L'Hopital branch is needed.
fn den_over_u(rho: f64, u: f64) -> f64 {
    1.0 + f64::exp_m1(-rho * u) / u
}

fn check_z(z: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::Domain(format!("pgf argument z={z} outside [0,1]")));
    }
    Ok(())
}

/// P.g.f. of the number of packets left behind by a departure in a plain
/// M/D/1 queue.
pub fn md1_queue_pgf(p: &QueueParams, z: f64) -> Result<f64> {
    let rho = p.check_stable()?;
    check_z(z)?;
    let u = 1.0 - z;
    if u == 0.0 {
        return Ok(1.0);
    }
    Ok((1.0 - rho) * f64::exp(-rho * u) / den_over_u(rho, u))
}

/// Mean M/D/1 queue length at departures,
/// `rho + rho^2 / (2(1 - rho))`.
pub fn md1_mean_queue(p: &QueueParams) -> Result<f64> {
    let rho = p.check_stable()?;
    Ok(rho + rho * rho / (2.0 * (1.0 - rho)))
}

/// Mean M/D/1 system delay, `tau + rho^2 / (2 lambda (1 - rho))`, s.
pub fn md1_mean_delay(p: &QueueParams) -> Result<f64> {
    let rho = p.check_stable()?;
    Ok(p.service_s + rho * rho / (2.0 * p.lambda_rate * (1.0 - rho)))
}

/// P.g.f. of the number of packets found at the end of the vacation that
/// wakes the server, conditioned on at least one arrival:
/// `(e^{lambda tau_s z} - 1) / (e^{lambda tau_s} - 1)`.
pub fn mv_vacation_pgf(p: &QueueParams, z: f64) -> Result<f64> {
    if !(p.vacation_s > 0.0) {
        return Err(Error::Domain(format!(
            "vacation pgf requires tau_s > 0 (got {})",
            p.vacation_s
        )));
    }
    if !(p.lambda_rate > 0.0) {
        return Err(Error::Domain("lambda must be positive".into()));
    }
    check_z(z)?;
    let a = p.lambda_rate * p.vacation_s;
    Ok(f64::exp_m1(a * z) / f64::exp_m1(a))
}

/// Mean queue length at departures under the MV policy,
/// `[2 rho + lambda tau_s (1 - rho) - rho^2] / (2 (1 - rho))`.
pub fn mv_mean_queue(p: &QueueParams) -> Result<f64> {
    let rho = p.check_stable()?;
    if p.vacation_s < 0.0 {
        return Err(Error::Domain("tau_s must be nonnegative".into()));
    }
    let ls = p.lambda_rate * p.vacation_s;
    Ok((2.0 * rho + ls * (1.0 - rho) - rho * rho) / (2.0 * (1.0 - rho)))
}

/// Peak and per-packet AoI under the MV policy.
pub fn peak_aoi_mv(p: &QueueParams) -> Result<AoIBreakdown> {
    let rho = p.check_stable()?;
    if p.vacation_s < 0.0 {
        return Err(Error::Domain("tau_s must be nonnegative".into()));
    }
    let md1_age = p.service_s + rho * p.service_s / (2.0 * (1.0 - rho)) + 1.0 / p.lambda_rate;
    let additional = p.vacation_s / 2.0;
    let mean_delay = mv_mean_queue(p)? / p.lambda_rate;
    let total = md1_age + additional;
    Ok(AoIBreakdown {
        md1_age_s: md1_age,
        additional_age_s: additional,
        total_peak_aoi_s: total,
        mean_delay_s: mean_delay,
        per_packet_aoi_s: (mean_delay + total) / 2.0,
    })
}

fn check_threshold_real(m: f64) -> Result<()> {
    if !(m >= 1.0) {
        return Err(Error::Domain(format!("threshold M={m} must be >= 1")));
    }
    Ok(())
}

/// Stationary p.g.f. of the queue length at departures under the ST policy,
/// `(1 - rho)(1 - z^M) e^{-rho(1-z)} / (M [e^{-rho(1-z)} - z])` with the
/// shared `(1 - z)` factor cancelled. Requires an integral threshold.
pub fn st_stationary_pgf(p: &QueueParams, z: f64) -> Result<f64> {
    let rho = p.check_stable()?;
    check_threshold_real(p.threshold)?;
    if (p.threshold - p.threshold.round()).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "stationary pgf requires an integer threshold (got {})",
            p.threshold
        )));
    }
    check_z(z)?;
    let m = p.threshold.round();
    let u = 1.0 - z;
    if u == 0.0 {
        return Ok(1.0);
    }
    // (1 - z^M) / u, cancellation-free via expm1(ln z * M).
    let geom = if z == 0.0 {
        1.0
    } else {
        -f64::exp_m1(m * z.ln()) / u
    };
    Ok((1.0 - rho) * geom * f64::exp(-rho * u) / (m * den_over_u(rho, u)))
}

/// Mean queue length at departures under the ST policy,
/// `rho + rho^2/(2(1-rho)) + (M-1)/2`. Accepts a relaxed real threshold.
pub fn st_mean_queue(p: &QueueParams) -> Result<f64> {
    let rho = p.check_stable()?;
    check_threshold_real(p.threshold)?;
    Ok(rho + rho * rho / (2.0 * (1.0 - rho)) + (p.threshold - 1.0) / 2.0)
}

/// Peak and per-packet AoI under the ST policy. Accepts a relaxed real
/// threshold.
pub fn peak_aoi_st(p: &QueueParams) -> Result<AoIBreakdown> {
    let rho = p.check_stable()?;
    check_threshold_real(p.threshold)?;
    let md1_age = p.service_s + rho * p.service_s / (2.0 * (1.0 - rho)) + 1.0 / p.lambda_rate;
    let additional = (p.threshold - 1.0) / (2.0 * p.lambda_rate);
    let mean_delay = st_mean_queue(p)? / p.lambda_rate;
    let total = md1_age + additional;
    Ok(AoIBreakdown {
        md1_age_s: md1_age,
        additional_age_s: additional,
        total_peak_aoi_s: total,
        mean_delay_s: mean_delay,
        per_packet_aoi_s: (mean_delay + total) / 2.0,
    })
}

/// Peak AoI of one device under a given protocol and sleep policy.
///
/// The protocol decides the *feasible* `(lambda, tau_b)` region through the
/// physical layer, not the AoI formula: with identical users the average
/// over devices equals the single-device value, so every protocol shares
/// the same functional form.
pub fn protocol_peak_aoi(
    protocol: ProtocolKind,
    policy: PolicyKind,
    x: &DecisionVector,
) -> Result<AoIBreakdown> {
    let value = x.policy_param.value();
    let params = match policy {
        PolicyKind::Mv => QueueParams::mv(x.lambda_rate, x.tau_b_s, value),
        PolicyKind::St => QueueParams::st(x.lambda_rate, x.tau_b_s, value),
    };
    if let PolicyParam::VacationLen(_) = x.policy_param {
        if policy == PolicyKind::St {
            return Err(Error::Domain(
                "decision vector carries a vacation length but the policy is ST".into(),
            ));
        }
    } else if policy == PolicyKind::Mv {
        return Err(Error::Domain(
            "decision vector carries a threshold but the policy is MV".into(),
        ));
    }
    let result = match policy {
        PolicyKind::Mv => peak_aoi_mv(&params),
        PolicyKind::St => peak_aoi_st(&params),
    };
    result.map_err(|e| match e {
        Error::Unstable { rho } => Error::Unstable { rho }.context_protocol(protocol, policy),
        other => other,
    })
}

impl Error {
    fn context_protocol(self, protocol: ProtocolKind, policy: PolicyKind) -> Error {
        match self {
            Error::Unstable { rho } => Error::Domain(format!(
                "{protocol}-{policy} point unstable: lambda*tau_b = {rho} must be < 1"
            )),
            other => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng::SplitMix64;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} != {b} (tol {tol})");
    }

    fn close_rel(a: f64, b: f64, tol: f64) {
        let denom = b.abs().max(1e-300);
        assert!((a - b).abs() / denom <= tol, "{a} != {b} (rel tol {tol})");
    }

    #[test]
    fn md1_pgf_normalization_and_empty_probability() {
        let p = QueueParams::md1(0.5, 1.0);
        close(md1_queue_pgf(&p, 1.0).unwrap(), 1.0, 1e-12);
        close(md1_queue_pgf(&p, 0.0).unwrap(), 0.5, 1e-12);
    }

    /// Departure-epoch distribution by the embedded-chain recursion, an
    /// independent route to the p.g.f. value.
    fn md1_departure_distribution(rho: f64, len: usize) -> Vec<f64> {
        let poisson = |m: usize| -> f64 {
            let mut p = f64::exp(-rho);
            for k in 1..=m {
                p *= rho / k as f64;
            }
            p
        };
        let mut pi = vec![0.0; len];
        pi[0] = 1.0 - rho;
        for n in 0..len - 1 {
            let mut acc = pi[n] - pi[0] * poisson(n);
            for k in 1..=n {
                acc -= pi[k] * poisson(n - k + 1);
            }
            pi[n + 1] = acc / poisson(0);
        }
        pi
    }

    #[test]
    fn md1_pgf_matches_series_summation() {
        let p = QueueParams::md1(0.5, 1.0);
        let pi = md1_departure_distribution(0.5, 80);
        let z: f64 = 0.5;
        let series: f64 = pi
            .iter()
            .enumerate()
            .map(|(m, pm)| pm * z.powi(m as i32))
            .sum();
        close(md1_queue_pgf(&p, z).unwrap(), series, 1e-10);
    }

    #[test]
    fn md1_means() {
        close(
            md1_mean_queue(&QueueParams::md1(0.5, 1.0)).unwrap(),
            0.75,
            1e-12,
        );
        close(
            md1_mean_queue(&QueueParams::md1(1e-9, 1.0)).unwrap(),
            0.0,
            1e-8,
        );
        close(
            md1_mean_queue(&QueueParams::md1(0.9, 1.0)).unwrap(),
            4.95,
            1e-12,
        );
        close(
            md1_mean_delay(&QueueParams::md1(0.5, 1.0)).unwrap(),
            1.5,
            1e-12,
        );
        close(
            md1_mean_delay(&QueueParams::md1(1e-9, 1.0)).unwrap(),
            1.0,
            1e-8,
        );
        close(
            md1_mean_delay(&QueueParams::md1(0.9, 1.0)).unwrap(),
            5.5,
            1e-12,
        );
    }

    #[test]
    fn unstable_rejected() {
        assert!(matches!(
            md1_mean_delay(&QueueParams::md1(1.0, 1.0)),
            Err(Error::Unstable { .. })
        ));
        assert!(md1_queue_pgf(&QueueParams::md1(2.0, 1.0), 0.5).is_err());
    }

    #[test]
    fn vacation_pgf_examples() {
        let p = QueueParams::mv(2.0, 0.1, 0.5);
        close(mv_vacation_pgf(&p, 1.0).unwrap(), 1.0, 1e-12);
        close(mv_vacation_pgf(&p, 0.0).unwrap(), 0.0, 1e-12);
        // (e^0.5 - 1)/(e - 1)
        close(mv_vacation_pgf(&p, 0.5).unwrap(), 0.3775406687981455, 1e-12);
        assert!(mv_vacation_pgf(&QueueParams::mv(2.0, 0.1, 0.0), 0.5).is_err());
    }

    #[test]
    fn vacation_pgf_matches_truncated_poisson_series() {
        let (lambda, tau_s) = (2.0, 0.5);
        let a = lambda * tau_s;
        let norm = 1.0 - f64::exp(-a);
        for z in [0.1f64, 0.3, 0.5, 0.9] {
            let mut term = f64::exp(-a);
            let mut series = 0.0;
            for m in 1..=60 {
                term *= a / m as f64;
                series += term * z.powi(m);
            }
            let p = QueueParams::mv(lambda, 0.1, tau_s);
            close(mv_vacation_pgf(&p, z).unwrap(), series / norm, 1e-12);
        }
    }

    #[test]
    fn mv_mean_queue_examples() {
        close(
            mv_mean_queue(&QueueParams::mv(0.5, 1.0, 0.0)).unwrap(),
            0.75,
            1e-12,
        );
        close(
            mv_mean_queue(&QueueParams::mv(0.5, 1.0, 0.4)).unwrap(),
            0.85,
            1e-12,
        );
        close(
            mv_mean_queue(&QueueParams::mv(0.8, 1.0, 1.0)).unwrap(),
            2.8,
            1e-12,
        );
    }

    #[test]
    fn peak_aoi_mv_examples() {
        let b = peak_aoi_mv(&QueueParams::mv(0.5, 1.0, 0.4)).unwrap();
        close(b.md1_age_s, 3.5, 1e-12);
        close(b.additional_age_s, 0.2, 1e-12);
        close(b.total_peak_aoi_s, 3.7, 1e-12);
        close(b.mean_delay_s, 1.7, 1e-12);
        close(b.per_packet_aoi_s, 2.7, 1e-12);

        let z = peak_aoi_mv(&QueueParams::mv(0.5, 1.0, 0.0)).unwrap();
        close(z.total_peak_aoi_s, 3.5, 1e-12);
        close(z.additional_age_s, 0.0, 1e-12);
    }

    #[test]
    fn st_pgf_reduces_to_md1_at_threshold_one() {
        for z in [0.0, 0.2, 0.5, 0.8, 0.99, 1.0] {
            let st = st_stationary_pgf(&QueueParams::st(0.5, 1.0, 1.0), z).unwrap();
            let md1 = md1_queue_pgf(&QueueParams::md1(0.5, 1.0), z).unwrap();
            close(st, md1, 1e-12);
        }
    }

    #[test]
    fn st_pgf_empty_probability() {
        // pi_0 = (1 - rho)/M at z = 0.
        let v = st_stationary_pgf(&QueueParams::st(0.5, 1.0, 3.0), 0.0).unwrap();
        close(v, 0.5 / 3.0, 1e-12);
        close(
            st_stationary_pgf(&QueueParams::st(0.5, 1.0, 3.0), 1.0).unwrap(),
            1.0,
            1e-12,
        );
        assert!(st_stationary_pgf(&QueueParams::st(0.5, 1.0, 2.5), 0.5).is_err());
    }

    #[test]
    fn st_mean_queue_examples() {
        close(
            st_mean_queue(&QueueParams::st(0.5, 1.0, 3.0)).unwrap(),
            1.75,
            1e-12,
        );
        close(
            st_mean_queue(&QueueParams::st(0.5, 1.0, 1.0)).unwrap(),
            0.75,
            1e-12,
        );
        close(
            st_mean_queue(&QueueParams::st(0.8, 1.0, 5.0)).unwrap(),
            4.4,
            1e-12,
        );
        assert!(st_mean_queue(&QueueParams::st(0.5, 1.0, 0.5)).is_err());
    }

    #[test]
    fn peak_aoi_st_examples() {
        let one = peak_aoi_st(&QueueParams::st(0.5, 1.0, 1.0)).unwrap();
        close(one.total_peak_aoi_s, 3.5, 1e-12);
        close(one.additional_age_s, 0.0, 1e-12);

        let three = peak_aoi_st(&QueueParams::st(0.5, 1.0, 3.0)).unwrap();
        close(three.total_peak_aoi_s, 5.5, 1e-12);

        let b = peak_aoi_st(&QueueParams::st(0.8, 1.0, 2.0)).unwrap();
        close(b.total_peak_aoi_s, 4.875, 1e-12);
    }

    #[test]
    fn st_pgf_derivative_matches_mean_queue() {
        // One-sided difference at z = 1, Richardson extrapolated.
        for (lambda, tau_b, m) in [(0.5, 1.0, 3.0), (0.3, 2.0, 5.0), (0.8, 1.0, 2.0)] {
            let p = QueueParams::st(lambda, tau_b, m);
            let h = 1e-4;
            let d1 = (1.0 - st_stationary_pgf(&p, 1.0 - h).unwrap()) / h;
            let d2 = (1.0 - st_stationary_pgf(&p, 1.0 - h / 2.0).unwrap()) / (h / 2.0);
            let est = 2.0 * d2 - d1;
            close_rel(est, st_mean_queue(&p).unwrap(), 1e-6);
        }
    }

    #[test]
    fn decomposition_and_policy_deltas_are_exact() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..1000 {
            let lambda = 0.05 + 2.0 * rng.next_f64();
            let tau_b = (0.02 + 0.93 * rng.next_f64()) / lambda;
            let tau_s = 2.0 * rng.next_f64();
            let m = 1.0 + (9.0 * rng.next_f64()).floor();

            let with_vac = peak_aoi_mv(&QueueParams::mv(lambda, tau_b, tau_s)).unwrap();
            let without = peak_aoi_mv(&QueueParams::mv(lambda, tau_b, 0.0)).unwrap();
            close(
                with_vac.total_peak_aoi_s - without.total_peak_aoi_s,
                tau_s / 2.0,
                1e-12 * (1.0 + tau_s),
            );

            let st_m = peak_aoi_st(&QueueParams::st(lambda, tau_b, m)).unwrap();
            let st_1 = peak_aoi_st(&QueueParams::st(lambda, tau_b, 1.0)).unwrap();
            close(
                st_m.total_peak_aoi_s - st_1.total_peak_aoi_s,
                (m - 1.0) / (2.0 * lambda),
                1e-10,
            );
        }
    }

    #[test]
    fn littles_law_holds_everywhere() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..1000 {
            let lambda = 0.05 + 3.0 * rng.next_f64();
            let tau_b = (0.02 + 0.93 * rng.next_f64()) / lambda;
            let tau_s = 2.0 * rng.next_f64();
            let m = 1.0 + 10.0 * rng.next_f64();

            let p_md1 = QueueParams::md1(lambda, tau_b);
            close_rel(
                lambda * md1_mean_delay(&p_md1).unwrap(),
                md1_mean_queue(&p_md1).unwrap(),
                1e-12,
            );
            let p_mv = QueueParams::mv(lambda, tau_b, tau_s);
            close_rel(
                lambda * peak_aoi_mv(&p_mv).unwrap().mean_delay_s,
                mv_mean_queue(&p_mv).unwrap(),
                1e-12,
            );
            let p_st = QueueParams::st(lambda, tau_b, m);
            close_rel(
                lambda * peak_aoi_st(&p_st).unwrap().mean_delay_s,
                st_mean_queue(&p_st).unwrap(),
                1e-12,
            );
        }
    }

    #[test]
    fn per_packet_identity_is_exact() {
        let mut rng = SplitMix64::new(13);
        for _ in 0..200 {
            let lambda = 0.05 + 3.0 * rng.next_f64();
            let tau_b = (0.02 + 0.93 * rng.next_f64()) / lambda;
            let b = peak_aoi_mv(&QueueParams::mv(lambda, tau_b, rng.next_f64())).unwrap();
            close(
                b.per_packet_aoi_s,
                (b.mean_delay_s + b.total_peak_aoi_s) / 2.0,
                0.0,
            );
        }
    }

    #[test]
    fn pgfs_are_probability_generating_functions() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..100 {
            let lambda = 0.05 + 2.0 * rng.next_f64();
            let tau_b = (0.02 + 0.93 * rng.next_f64()) / lambda;
            let m = 1.0 + (6.0 * rng.next_f64()).floor();
            let p_md1 = QueueParams::md1(lambda, tau_b);
            let p_st = QueueParams::st(lambda, tau_b, m);
            let p_mv = QueueParams::mv(lambda, tau_b, 0.1 + rng.next_f64());

            let mut prev = [0.0f64; 3];
            for k in 0..=100 {
                let z = k as f64 / 100.0;
                let vals = [
                    md1_queue_pgf(&p_md1, z).unwrap(),
                    st_stationary_pgf(&p_st, z).unwrap(),
                    mv_vacation_pgf(&p_mv, z).unwrap(),
                ];
                for (i, v) in vals.iter().enumerate() {
                    assert!((-1e-12..=1.0 + 1e-12).contains(v), "pgf out of [0,1]: {v}");
                    assert!(*v >= prev[i] - 1e-12, "pgf not nondecreasing");
                    prev[i] = *v;
                }
            }
            for v in prev {
                close(v, 1.0, 1e-12);
            }
        }
    }

    #[test]
    fn peak_aoi_monotone_in_knobs() {
        let mut rng = SplitMix64::new(23);
        for _ in 0..200 {
            let lambda = 0.05 + 2.0 * rng.next_f64();
            let tau_b = 0.05 + 0.8 * rng.next_f64() / lambda;
            let tau_b2 = tau_b + 0.1 * (1.0 / lambda - tau_b);
            let tau_s = rng.next_f64();
            let m = 1.0 + 5.0 * rng.next_f64();

            let base = peak_aoi_mv(&QueueParams::mv(lambda, tau_b, tau_s)).unwrap();
            let wider = peak_aoi_mv(&QueueParams::mv(lambda, tau_b2, tau_s)).unwrap();
            assert!(wider.total_peak_aoi_s > base.total_peak_aoi_s);
            let longer = peak_aoi_mv(&QueueParams::mv(lambda, tau_b, tau_s + 0.1)).unwrap();
            assert!(longer.total_peak_aoi_s > base.total_peak_aoi_s);

            let st_base = peak_aoi_st(&QueueParams::st(lambda, tau_b, m)).unwrap();
            let st_up = peak_aoi_st(&QueueParams::st(lambda, tau_b, m + 0.5)).unwrap();
            assert!(st_up.total_peak_aoi_s > st_base.total_peak_aoi_s);
        }
    }

    #[test]
    fn protocol_adapter_shares_the_functional_form() {
        let mv_x = DecisionVector {
            lambda_rate: 0.5,
            tau_b_s: 1.0,
            policy_param: PolicyParam::VacationLen(0.4),
            phi_r_w: 1.0,
        };
        for protocol in ProtocolKind::ALL {
            let b = protocol_peak_aoi(protocol, PolicyKind::Mv, &mv_x).unwrap();
            close(b.total_peak_aoi_s, 3.7, 1e-12);
        }

        let st_x = DecisionVector {
            lambda_rate: 0.5,
            tau_b_s: 1.0,
            policy_param: PolicyParam::Threshold(3.0),
            phi_r_w: 1.0,
        };
        let b = protocol_peak_aoi(ProtocolKind::Fdma, PolicyKind::St, &st_x).unwrap();
        close(b.total_peak_aoi_s, 5.5, 1e-12);

        let unstable = DecisionVector {
            lambda_rate: 1.5,
            tau_b_s: 1.0,
            ..mv_x
        };
        assert!(protocol_peak_aoi(ProtocolKind::Noma, PolicyKind::Mv, &unstable).is_err());

        let mismatched = DecisionVector {
            policy_param: PolicyParam::Threshold(2.0),
            ..mv_x
        };
        assert!(protocol_peak_aoi(ProtocolKind::Tdma, PolicyKind::Mv, &mismatched).is_err());
    }
}
