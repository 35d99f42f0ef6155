//! Physical-layer and energy models: channel gains, energy-harvesting
//! budgets, capacity inversions to required transmit power, the NOMA SIC
//! power split, energy efficiency, and the average power consumption of a
//! sleep-scheduled device.
//!
//! Conventions:
//!
//! * Channel amplitude: `|h| = 1e-3 * theta_0 * d^-a0`.
//! * Normalized gain: `gamma = |h|^2 / (B_eff * N0)` per watt, where
//!   `B_eff` is the full band for TDMA/NOMA and the guard-banded subchannel
//!   for FDMA (rate and noise use the same subchannel width).
//! * Every device delivers one `L`-bit packet per active cycle with a
//!   capacity-gap factor, so the per-slot rate target is
//!   `(gap + 1) * L_eff / (tau_b - tau_p)` with `L_eff = N*L` where a slot
//!   is shared (TDMA time-sharing, NOMA superposition) and `L` where it is
//!   not (FDMA).

use crate::config::{DecisionVector, PolicyKind, ProtocolKind, SystemConfig};
use crate::{Error, Result};

/// Per-device channel amplitudes and normalized gains for one protocol.
#[derive(Clone, Debug)]
pub struct ChannelState {
    /// `gamma_n`, 1/W, ordered by device index (NOMA: nonincreasing).
    pub gains: Vec<f64>,
    /// `|h_n|`, ordered by device index.
    pub coeffs: Vec<f64>,
}

impl ChannelState {
    pub fn from_config(cfg: &SystemConfig, protocol: ProtocolKind) -> Result<ChannelState> {
        let coeffs: Vec<f64> = cfg
            .distances_m
            .iter()
            .map(|d| channel_coeff(*d, cfg))
            .collect();
        let gains = cfg
            .distances_m
            .iter()
            .map(|d| channel_gain(*d, cfg, protocol))
            .collect::<Result<Vec<f64>>>()?;
        if protocol == ProtocolKind::Noma && !gains.windows(2).all(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "NOMA requires channel gains sorted nonincreasing".into(),
            ));
        }
        Ok(ChannelState { gains, coeffs })
    }
}

/// Channel amplitude `1e-3 * theta_0 * d^-a0`.
pub fn channel_coeff(d_m: f64, cfg: &SystemConfig) -> f64 {
    1e-3 * cfg.fading_param * d_m.powf(-cfg.pathloss_exp)
}

/// Effective noise bandwidth for a protocol, Hz.
fn noise_bandwidth_hz(cfg: &SystemConfig, protocol: ProtocolKind) -> f64 {
    match protocol {
        ProtocolKind::Tdma | ProtocolKind::Noma => cfg.bandwidth_hz,
        ProtocolKind::Fdma => cfg.subchannel_hz(),
    }
}

/// Normalized channel gain `gamma = |h|^2 / (B_eff * N0)`, 1/W.
pub fn channel_gain(d_m: f64, cfg: &SystemConfig, protocol: ProtocolKind) -> Result<f64> {
    if !(d_m > 0.0) {
        return Err(Error::Domain(format!(
            "distance must be positive (got {d_m} m)"
        )));
    }
    let coeff = channel_coeff(d_m, cfg);
    Ok(coeff * coeff / (noise_bandwidth_hz(cfg, protocol) * cfg.noise_psd))
}

/// Power harvested by a device receiver: `min(eta * phi_wp * h_p, clamp)`.
pub fn eh_power(phi_wp_w: f64, h_p: f64, cfg: &SystemConfig) -> Result<f64> {
    if phi_wp_w < 0.0 || h_p < 0.0 {
        return Err(Error::Domain("eh_power inputs must be nonnegative".into()));
    }
    Ok((cfg.eh_efficiency * phi_wp_w * h_p).min(cfg.eh_clamp_w))
}

/// Energy received over one constant-power harvesting slot, J.
pub fn eh_energy(tau_p_s: f64, phi_r_w: f64) -> f64 {
    tau_p_s * phi_r_w
}

/// Energy of a piecewise-constant power profile, J.
pub fn eh_energy_profile(segments: &[(f64, f64)]) -> f64 {
    segments.iter().map(|(dur, p)| dur * p).sum()
}

/// Per-slot rate target and bandwidth for a protocol.
fn rate_exponent(protocol: ProtocolKind, tau_b_s: f64, cfg: &SystemConfig) -> Result<f64> {
    let tau_t = tau_b_s - cfg.tau_p_s;
    if !(tau_t > 0.0) {
        return Err(Error::Domain(format!(
            "tau_b = {tau_b_s} s must exceed tau_p = {} s",
            cfg.tau_p_s
        )));
    }
    let n = cfg.n_devices as f64;
    let (l_eff, band) = match protocol {
        ProtocolKind::Tdma | ProtocolKind::Noma => (n * cfg.packet_len_bits, cfg.bandwidth_hz),
        ProtocolKind::Fdma => (cfg.packet_len_bits, cfg.subchannel_hz()),
    };
    Ok((cfg.capacity_gap + 1.0) * l_eff / (tau_t * band))
}

/// Minimum transmit power delivering one packet per cycle, W.
///
/// Inverts the protocol's capacity expression at the per-slot rate target:
/// `[2^{(gap+1) L_eff / ((tau_b - tau_p) B_eff)} - 1] / gamma`. For NOMA
/// the result is the *total* superposed power `P_Sigma`; splitting it per
/// user is [`noma_power_split`]'s job.
pub fn required_tx_power(
    protocol: ProtocolKind,
    x: &DecisionVector,
    cfg: &SystemConfig,
    gain: f64,
) -> Result<f64> {
    if !(gain > 0.0) {
        return Err(Error::Domain(format!(
            "channel gain must be positive (got {gain})"
        )));
    }
    let exponent = rate_exponent(protocol, x.tau_b_s, cfg)?;
    Ok(f64::exp_m1(exponent * std::f64::consts::LN_2) / gain)
}

/// Forward (Shannon) average rate actually delivered at a transmit power,
/// bits/s, per the protocol's duty-cycle convention. The inverse of
/// [`required_tx_power`]; used for round-trip checks.
pub fn capacity_avg_bits_per_s(
    protocol: ProtocolKind,
    tx_power_w: f64,
    cfg: &SystemConfig,
    gain: f64,
    tau_b_s: f64,
) -> Result<f64> {
    let tau_t_total = tau_b_s - cfg.tau_p_s;
    if !(tau_t_total > 0.0) {
        return Err(Error::Domain("tau_b must exceed tau_p".into()));
    }
    let (band, tau_t) = match protocol {
        ProtocolKind::Tdma => (cfg.bandwidth_hz, tau_t_total / cfg.n_devices as f64),
        ProtocolKind::Fdma => (cfg.subchannel_hz(), tau_t_total),
        ProtocolKind::Noma => (cfg.bandwidth_hz, tau_t_total),
    };
    Ok(band * tau_t / tau_b_s * (1.0 + tx_power_w * gain).log2())
}

/// Transmit energy drawn from one device's battery per active cycle, J.
///
/// A TDMA device transmits only in its own `1/N` share of the frame; FDMA
/// and NOMA devices transmit for the whole `tau_b - tau_p` (for NOMA the
/// power passed in is the total `P_Sigma`, so the result is the aggregate
/// over devices).
pub fn tx_energy_per_cycle(
    protocol: ProtocolKind,
    tau_b_s: f64,
    cfg: &SystemConfig,
    tx_power_w: f64,
) -> f64 {
    let tau_t = tau_b_s - cfg.tau_p_s;
    match protocol {
        ProtocolKind::Tdma => tau_t / cfg.n_devices as f64 * tx_power_w,
        ProtocolKind::Fdma | ProtocolKind::Noma => tau_t * tx_power_w,
    }
}

/// Equal-SINR NOMA power split.
#[derive(Clone, Debug)]
pub struct NomaSplit {
    /// Per-user transmit powers, W, in decoding order (strongest first).
    pub powers_w: Vec<f64>,
    /// Decoding-stage residuals `|h_j|^2 Phi_j - sum_{k>j} |h_k|^2 Phi_k`
    /// at the receiver, W, for stages `1..N`.
    pub residuals_w: Vec<f64>,
    /// Whether every residual clears the configured SIC threshold.
    pub sic_ok: bool,
}

/// Split a NOMA superposition so every user attains `sinr_target`, by the
/// backward recursion `Phi_N = theta/gamma_N`,
/// `Phi_n = theta (1 + sum_{j>n} Phi_j gamma_j) / gamma_n`.
///
/// `gains` must be sorted nonincreasing (decoding order). `noise_w` is the
/// receiver noise power that normalizes the gains, used to express the SIC
/// residuals in watts; violations of the residual threshold are flagged in
/// [`NomaSplit::sic_ok`], not errors, because the closed-form total power
/// does not depend on them.
pub fn noma_power_split(
    sinr_target: f64,
    gains: &[f64],
    noise_w: f64,
    sic_threshold_w: f64,
) -> Result<NomaSplit> {
    if gains.is_empty() {
        return Err(Error::Domain(
            "noma_power_split needs at least one gain".into(),
        ));
    }
    if !(sinr_target > 0.0) {
        return Err(Error::Domain("SINR target must be positive".into()));
    }
    if gains.iter().any(|g| !(*g > 0.0)) {
        return Err(Error::Domain("channel gains must be positive".into()));
    }
    if !gains.windows(2).all(|w| w[0] >= w[1]) {
        return Err(Error::Domain("gains must be sorted nonincreasing".into()));
    }
    let n = gains.len();
    let mut powers = vec![0.0; n];
    let mut interference = 0.0; // sum of received (normalized) powers decoded later
    for i in (0..n).rev() {
        powers[i] = sinr_target * (1.0 + interference) / gains[i];
        interference += powers[i] * gains[i];
    }
    // Residual received power at each decoding stage.
    let mut residuals = Vec::with_capacity(n);
    let mut sic_ok = true;
    for j in 0..n {
        let tail: f64 = (j + 1..n).map(|k| powers[k] * gains[k]).sum();
        let residual = (powers[j] * gains[j] - tail) * noise_w;
        if j + 1 < n && residual < sic_threshold_w {
            sic_ok = false;
        }
        residuals.push(residual);
    }
    Ok(NomaSplit {
        powers_w: powers,
        residuals_w: residuals,
        sic_ok,
    })
}

/// Energy efficiency of a status-update scheme, with its floor check.
#[derive(Clone, Copy, Debug)]
pub struct EnergyEfficiency {
    pub bits_per_j: f64,
    /// `bits_per_j >= cfg.ee_min`.
    pub ok: bool,
}

/// Delivered bits per joule of transmit energy for a (protocol, policy)
/// scheme: `mult * L / ((tau_b - tau_p) * Phi)` with the scheme's
/// conventional multiplier (`N` for TDMA-MV, FDMA-ST and NOMA; `1` for
/// TDMA-ST and FDMA-MV) and `Phi` the required per-user power (total
/// `P_Sigma` for NOMA).
pub fn energy_efficiency(
    protocol: ProtocolKind,
    policy: PolicyKind,
    x: &DecisionVector,
    cfg: &SystemConfig,
    gain: f64,
) -> Result<EnergyEfficiency> {
    let power = required_tx_power(protocol, x, cfg, gain)?;
    let n = cfg.n_devices as f64;
    let mult = match (protocol, policy) {
        (ProtocolKind::Tdma, PolicyKind::Mv) => n,
        (ProtocolKind::Tdma, PolicyKind::St) => 1.0,
        (ProtocolKind::Fdma, PolicyKind::Mv) => 1.0,
        (ProtocolKind::Fdma, PolicyKind::St) => n,
        (ProtocolKind::Noma, _) => n,
    };
    let bits_per_j = mult * cfg.packet_len_bits / ((x.tau_b_s - cfg.tau_p_s) * power);
    Ok(EnergyEfficiency {
        bits_per_j,
        ok: bits_per_j >= cfg.ee_min,
    })
}

/// Time-averaged power drawn by one sleep-scheduled device, W:
///
/// ```text
/// rho * ((tau_b - tau_p)/tau_b * Phi_t + Phi_w) + (1 - rho) * idle_density
/// ```
///
/// The idle density folds the switching slot and the idle slot at the
/// configured `tau_i = switch_ratio * tau_sc` split; it is independent of
/// the vacation length, so it covers the ST policy and the `tau_s -> 0`
/// limit unchanged. `benchmark` substitutes `Phi_s := Phi_w`, modeling the
/// same protocol without sleep scheduling.
pub fn avg_power_consumption(
    policy: PolicyKind,
    x: &DecisionVector,
    cfg: &SystemConfig,
    tx_power_w: f64,
    benchmark: bool,
) -> Result<f64> {
    if x.policy_param.kind() != policy {
        return Err(Error::Domain(format!(
            "decision vector carries a {:?} parameter but the policy is {policy}",
            x.policy_param.kind()
        )));
    }
    let rho = x.rho();
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("rho = {rho} must lie in (0,1)")));
    }
    if !(x.tau_b_s > cfg.tau_p_s) {
        return Err(Error::Domain("tau_b must exceed tau_p".into()));
    }
    let active = (x.tau_b_s - cfg.tau_p_s) / x.tau_b_s * tx_power_w + cfg.power_active_w;
    Ok(rho * active + (1.0 - rho) * cfg.idle_power_density_w(benchmark))
}

/// Summary power figures for a solved operating point.
#[derive(Clone, Copy, Debug)]
pub struct PowerReport {
    /// Required transmit power (`Phi_t` per user; `P_Sigma` for NOMA), W.
    pub tx_power_w: f64,
    /// Station charge power `Phi_r` from the decision vector, W.
    pub eh_power_w: f64,
    /// Time-averaged device power, W.
    pub avg_consumption_w: f64,
    /// Energy efficiency, bits/J.
    pub ee_bits_per_j: f64,
    /// Utilization / active-mode probability `lambda * tau_b`.
    pub rho: f64,
}

/// Assemble the power figures for one operating point.
pub fn power_report(
    protocol: ProtocolKind,
    policy: PolicyKind,
    x: &DecisionVector,
    cfg: &SystemConfig,
    gain: f64,
    benchmark: bool,
) -> Result<PowerReport> {
    let tx_power_w = required_tx_power(protocol, x, cfg, gain)?;
    let ee = energy_efficiency(protocol, policy, x, cfg, gain)?;
    let avg = avg_power_consumption(policy, x, cfg, tx_power_w, benchmark)?;
    Ok(PowerReport {
        tx_power_w,
        eh_power_w: x.phi_r_w,
        avg_consumption_w: avg,
        ee_bits_per_j: ee.bits_per_j,
        rho: x.rho(),
    })
}
