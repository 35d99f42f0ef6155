//! Shared domain types, unit conventions and configuration validation.
//!
//! Configuration files are JSON with natural units in the key names
//! (`bandwidth_mhz`, `tau_p_ms`, `noise_psd_dbm_hz`, `phi_t_max_mw`, ...);
//! [`RawSystemConfig::into_si`] normalizes everything to SI and
//! [`validate_config`] checks every invariant. All downstream math works
//! exclusively on the SI [`SystemConfig`].
//!
//! Two clamp thresholds share a symbol in the surrounding literature; they
//! are deliberately distinct fields here: [`SystemConfig::eh_clamp_w`]
//! bounds the harvested power, [`SystemConfig::sic_threshold_w`] is the
//! residual-power margin required by NOMA successive interference
//! cancellation. Conflating them is a correctness trap.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Multiple-access protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolKind {
    Tdma,
    Fdma,
    Noma,
}

/// Sleep-scheduling policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolicyKind {
    /// Multiple vacations: fixed-length vacations repeated until one ends
    /// with a nonempty queue.
    Mv,
    /// Start-up threshold: sleep until the queue holds `M` packets.
    St,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [ProtocolKind::Tdma, ProtocolKind::Fdma, ProtocolKind::Noma];

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::Tdma => "tdma",
            ProtocolKind::Fdma => "fdma",
            ProtocolKind::Noma => "noma",
        }
    }
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 2] = [PolicyKind::Mv, PolicyKind::St];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Mv => "mv",
            PolicyKind::St => "st",
        }
    }
}

impl std::fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ProtocolKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tdma" => Ok(ProtocolKind::Tdma),
            "fdma" => Ok(ProtocolKind::Fdma),
            "noma" => Ok(ProtocolKind::Noma),
            other => Err(Error::Config(format!("unknown protocol '{other}'"))),
        }
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mv" => Ok(PolicyKind::Mv),
            "st" => Ok(PolicyKind::St),
            other => Err(Error::Config(format!("unknown policy '{other}'"))),
        }
    }
}

/// The sleep-policy knob inside a [`DecisionVector`]: a vacation length for
/// MV, a (possibly relaxed, real-valued) start-up threshold for ST.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PolicyParam {
    /// Vacation length `tau_s` in seconds (MV policy).
    VacationLen(f64),
    /// Start-up threshold `M` (ST policy). Real-valued while the integrality
    /// constraint is relaxed during optimization; integer when reported.
    Threshold(f64),
}

impl PolicyParam {
    pub fn value(self) -> f64 {
        match self {
            PolicyParam::VacationLen(v) | PolicyParam::Threshold(v) => v,
        }
    }

    pub fn kind(self) -> PolicyKind {
        match self {
            PolicyParam::VacationLen(_) => PolicyKind::Mv,
            PolicyParam::Threshold(_) => PolicyKind::St,
        }
    }

    pub fn with_value(self, v: f64) -> PolicyParam {
        match self {
            PolicyParam::VacationLen(_) => PolicyParam::VacationLen(v),
            PolicyParam::Threshold(_) => PolicyParam::Threshold(v),
        }
    }
}

/// One point in the optimizer's search space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionVector {
    /// Status update rate `lambda`, packets/s.
    pub lambda_rate: f64,
    /// Full active-cycle slot length `tau_b` in seconds, including the
    /// energy-harvesting sub-slot `tau_p`.
    pub tau_b_s: f64,
    /// Sleep-policy parameter (`tau_s` or `M`).
    pub policy_param: PolicyParam,
    /// Station charge power `Phi_r` in watts (total `Phi_Sigma` for NOMA).
    pub phi_r_w: f64,
}

impl DecisionVector {
    /// Server utilization `rho = lambda * tau_b`.
    pub fn rho(&self) -> f64 {
        self.lambda_rate * self.tau_b_s
    }

    /// Euclidean distance to another decision vector, used by iterative
    /// solvers' stopping rules.
    pub fn distance(&self, other: &DecisionVector) -> f64 {
        let d = [
            self.lambda_rate - other.lambda_rate,
            self.tau_b_s - other.tau_b_s,
            self.policy_param.value() - other.policy_param.value(),
            self.phi_r_w - other.phi_r_w,
        ];
        d.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Convert a power spectral density from dBm/Hz to W/Hz.
pub fn dbm_per_hz_to_w_per_hz(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Convert a power spectral density from W/Hz back to dBm/Hz.
pub fn w_per_hz_to_dbm_per_hz(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// `n` evenly spaced points covering `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// All physical and protocol constants, in SI units.
///
/// Immutable after [`validate_config`]; safe to share across threads by
/// read-only reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Number of devices `N`.
    pub n_devices: usize,
    /// Packet length `L`, bits.
    pub packet_len_bits: f64,
    /// Available bandwidth `B`, Hz.
    pub bandwidth_hz: f64,
    /// FDMA guard band between subchannels, Hz.
    pub guard_band_hz: f64,
    /// Noise power spectral density `N_0`, W/Hz (configured in dBm/Hz).
    pub noise_psd: f64,
    /// Carrier center frequency, Hz; recorded in manifests only.
    pub carrier_hz: f64,
    /// Device-to-station link distances, meters, nondecreasing.
    pub distances_m: Vec<f64>,
    /// Small-scale fading parameter `theta_0`.
    pub fading_param: f64,
    /// Path-loss exponent `a_0`.
    pub pathloss_exp: f64,
    /// Energy-harvesting efficiency `eta_p`, in (0,1).
    pub eh_efficiency: f64,
    /// Harvested-power clamp, W.
    pub eh_clamp_w: f64,
    /// Minimum residual received power for SIC decoding, W.
    pub sic_threshold_w: f64,
    /// Fixed energy-harvesting sub-slot `tau_p`, s.
    pub tau_p_s: f64,
    /// Upper bound on the active cycle `tau_b`, s.
    pub tau_b_max_s: f64,
    /// Lower bound on the MV vacation length, s. Zero by default; a nonzero
    /// floor keeps optimized vacations away from the degenerate `tau_s = 0`.
    pub tau_s_min_s: f64,
    /// Upper bound on the MV vacation length, s.
    pub tau_s_max_s: f64,
    /// Status update rate bounds, packets/s.
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Station charge power cap per device, W.
    pub phi_r_max_w: f64,
    /// Device transmit power cap, W.
    pub phi_t_max_w: f64,
    /// Device battery capacity `E_b,max`, J.
    pub battery_j: f64,
    /// Capacity gap factor between the Shannon bound and the delivered
    /// throughput (the delivered rate target is `(gap+1) L / tau_t`).
    pub capacity_gap: f64,
    /// Energy-efficiency floor, bits/J.
    pub ee_min: f64,
    /// Power draw in active mode, W.
    pub power_active_w: f64,
    /// Power draw in idle mode, W.
    pub power_idle_w: f64,
    /// Power draw during the mode-switching slot, W.
    pub power_switch_w: f64,
    /// Ratio of idle time to switching time inside one vacation
    /// (`tau_i = switch_ratio * tau_sc`).
    pub switch_ratio: f64,
    /// Start-up threshold bounds.
    pub m_min: u32,
    pub m_max: u32,
}

impl SystemConfig {
    /// FDMA subchannel width `(B - (N-1) * guard) / N`, Hz.
    pub fn subchannel_hz(&self) -> f64 {
        (self.bandwidth_hz - (self.n_devices as f64 - 1.0) * self.guard_band_hz)
            / self.n_devices as f64
    }

    /// Per-unit-time power draw while idle, W: one switching slot followed
    /// by `switch_ratio` times as much idle time, averaged. Independent of
    /// the vacation length, so the `tau_s -> 0` limit is well defined.
    pub fn idle_power_density_w(&self, benchmark: bool) -> f64 {
        let idle = if benchmark {
            self.power_active_w
        } else {
            self.power_idle_w
        };
        (self.switch_ratio * idle + self.power_switch_w) / (self.switch_ratio + 1.0)
    }

    /// A stable 64-bit hash of the resolved configuration, carried in every
    /// output row so any number is reproducible from the row alone.
    pub fn stable_hash(&self) -> u64 {
        let bytes = serde_json::to_string(self).expect("config serializes");
        // FNV-1a.
        let mut h: u64 = 0xcbf29ce484222325;
        for b in bytes.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }
}

/// On-disk configuration, JSON with natural units. Every field has a
/// default, so `{}` loads the stock parameter set; unknown keys are
/// rejected.
///
/// Defaults marked *(assumed)* are not fixed by the system model and are
/// recorded as assumptions in run manifests.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawSystemConfig {
    pub n_devices: usize,
    pub packet_len_bits: f64,
    pub bandwidth_mhz: f64,
    pub guard_band_mhz: f64,
    pub noise_psd_dbm_hz: f64,
    pub carrier_mhz: f64,
    /// Empty means "linearly spaced over [3, 5] m for `n_devices` devices".
    pub distances_m: Vec<f64>,
    /// *(assumed)* small-scale fading parameter.
    pub fading_param: f64,
    pub pathloss_exp: f64,
    pub eh_efficiency: f64,
    /// *(assumed)* harvested-power clamp.
    pub eh_clamp_w: f64,
    /// *(assumed)* SIC residual-power threshold.
    pub sic_threshold_w: f64,
    pub tau_p_ms: f64,
    pub tau_b_max_ms: f64,
    pub tau_s_min_ms: f64,
    /// *(assumed)* vacation-length cap.
    pub tau_s_max_ms: f64,
    /// *(assumed)* lower status-update rate bound.
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub phi_r_max_w: f64,
    pub phi_t_max_mw: f64,
    /// *(assumed)* battery capacity.
    pub battery_j: f64,
    /// *(assumed)* capacity gap factor.
    pub capacity_gap: f64,
    /// *(assumed)* energy-efficiency floor.
    pub ee_min_bits_per_j: f64,
    pub power_active_mw: f64,
    pub power_idle_mw: f64,
    pub power_switch_mw: f64,
    pub switch_ratio: f64,
    /// *(assumed)* start-up threshold bounds.
    pub m_min: u32,
    pub m_max: u32,
}

impl Default for RawSystemConfig {
    fn default() -> Self {
        RawSystemConfig {
            n_devices: 10,
            packet_len_bits: 100.0,
            bandwidth_mhz: 5.0,
            guard_band_mhz: 0.0,
            noise_psd_dbm_hz: -60.0,
            carrier_mhz: 470.0,
            distances_m: Vec::new(),
            fading_param: 1_000.0,
            pathloss_exp: 2.0,
            eh_efficiency: 0.9,
            eh_clamp_w: 0.5,
            sic_threshold_w: 1e-3,
            tau_p_ms: 10.0,
            tau_b_max_ms: 40.0,
            tau_s_min_ms: 0.0,
            tau_s_max_ms: 100.0,
            lambda_min: 0.1,
            lambda_max: 15.0,
            phi_r_max_w: 4.0,
            phi_t_max_mw: 400.0,
            battery_j: 0.05,
            capacity_gap: 1.0,
            ee_min_bits_per_j: 1e5,
            power_active_mw: 100.0,
            power_idle_mw: 10.0,
            power_switch_mw: 100.0,
            switch_ratio: 9.0,
            m_min: 2,
            m_max: 20,
        }
    }
}

impl RawSystemConfig {
    /// Parse a JSON config file body.
    pub fn from_json(text: &str) -> Result<RawSystemConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config file: {e}")))
    }

    /// Normalize to SI units. Does not validate; follow with
    /// [`validate_config`].
    pub fn into_si(self) -> SystemConfig {
        let distances_m = if self.distances_m.is_empty() {
            linspace(3.0, 5.0, self.n_devices.max(1))
        } else {
            self.distances_m
        };
        SystemConfig {
            n_devices: self.n_devices,
            packet_len_bits: self.packet_len_bits,
            bandwidth_hz: self.bandwidth_mhz * 1e6,
            guard_band_hz: self.guard_band_mhz * 1e6,
            noise_psd: dbm_per_hz_to_w_per_hz(self.noise_psd_dbm_hz),
            carrier_hz: self.carrier_mhz * 1e6,
            distances_m,
            fading_param: self.fading_param,
            pathloss_exp: self.pathloss_exp,
            eh_efficiency: self.eh_efficiency,
            eh_clamp_w: self.eh_clamp_w,
            sic_threshold_w: self.sic_threshold_w,
            tau_p_s: self.tau_p_ms * 1e-3,
            tau_b_max_s: self.tau_b_max_ms * 1e-3,
            tau_s_min_s: self.tau_s_min_ms * 1e-3,
            tau_s_max_s: self.tau_s_max_ms * 1e-3,
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            phi_r_max_w: self.phi_r_max_w,
            phi_t_max_w: self.phi_t_max_mw * 1e-3,
            battery_j: self.battery_j,
            capacity_gap: self.capacity_gap,
            ee_min: self.ee_min_bits_per_j,
            power_active_w: self.power_active_mw * 1e-3,
            power_idle_w: self.power_idle_mw * 1e-3,
            power_switch_w: self.power_switch_mw * 1e-3,
            switch_ratio: self.switch_ratio,
            m_min: self.m_min,
            m_max: self.m_max,
        }
    }

    /// Parse, normalize and validate in one step.
    pub fn load(text: &str) -> Result<SystemConfig> {
        validate_config(RawSystemConfig::from_json(text)?.into_si())
    }
}

impl Default for SystemConfig {
    /// The stock SI parameter set (`RawSystemConfig::default` normalized).
    fn default() -> Self {
        RawSystemConfig::default().into_si()
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !($cond) {
            return Err(Error::Config(format!($($msg)+)));
        }
    };
}

/// Check every configuration invariant, returning the config unchanged on
/// success. Idempotent: validating a validated config is the identity.
pub fn validate_config(cfg: SystemConfig) -> Result<SystemConfig> {
    ensure!(cfg.n_devices >= 1, "n_devices must be >= 1");
    ensure!(
        cfg.packet_len_bits > 0.0,
        "packet_len_bits must be positive"
    );
    ensure!(cfg.bandwidth_hz > 0.0, "bandwidth must be positive");
    ensure!(cfg.guard_band_hz >= 0.0, "guard band must be nonnegative");
    ensure!(
        cfg.subchannel_hz() > 0.0,
        "guard bands leave no subchannel bandwidth"
    );
    ensure!(cfg.noise_psd > 0.0, "noise_psd must be positive");
    ensure!(cfg.carrier_hz > 0.0, "carrier_hz must be positive");
    ensure!(
        cfg.distances_m.len() == cfg.n_devices,
        "distances_m must list one distance per device ({} != {})",
        cfg.distances_m.len(),
        cfg.n_devices
    );
    ensure!(
        cfg.distances_m.iter().all(|d| *d > 0.0),
        "distances must be positive"
    );
    ensure!(
        cfg.distances_m.windows(2).all(|w| w[0] <= w[1]),
        "distances must be sorted ascending"
    );
    ensure!(cfg.fading_param > 0.0, "fading_param must be positive");
    ensure!(cfg.pathloss_exp > 0.0, "pathloss_exp must be positive");
    ensure!(
        cfg.eh_efficiency > 0.0 && cfg.eh_efficiency < 1.0,
        "eh_efficiency out of (0,1): {}",
        cfg.eh_efficiency
    );
    ensure!(cfg.eh_clamp_w > 0.0, "eh_clamp_w must be positive");
    ensure!(
        cfg.sic_threshold_w > 0.0,
        "sic_threshold_w must be positive"
    );
    ensure!(cfg.tau_p_s > 0.0, "tau_p must be positive");
    ensure!(
        cfg.tau_p_s < cfg.tau_b_max_s,
        "tau_p exceeds tau_b_max ({} s >= {} s)",
        cfg.tau_p_s,
        cfg.tau_b_max_s
    );
    ensure!(cfg.tau_s_min_s >= 0.0, "tau_s_min must be nonnegative");
    ensure!(
        cfg.tau_s_min_s <= cfg.tau_s_max_s,
        "tau_s_min exceeds tau_s_max"
    );
    ensure!(cfg.tau_s_max_s > 0.0, "tau_s_max must be positive");
    ensure!(cfg.lambda_min > 0.0, "lambda_min must be positive");
    ensure!(
        cfg.lambda_min <= cfg.lambda_max,
        "lambda_min exceeds lambda_max"
    );
    ensure!(cfg.phi_r_max_w > 0.0, "phi_r_max must be positive");
    ensure!(cfg.phi_t_max_w > 0.0, "phi_t_max must be positive");
    ensure!(cfg.battery_j > 0.0, "battery_j must be positive");
    ensure!(cfg.capacity_gap > 0.0, "capacity_gap must be positive");
    ensure!(cfg.ee_min > 0.0, "ee_min must be positive");
    ensure!(cfg.power_active_w > 0.0, "power_active must be positive");
    ensure!(cfg.power_idle_w > 0.0, "power_idle must be positive");
    ensure!(cfg.power_switch_w > 0.0, "power_switch must be positive");
    ensure!(cfg.switch_ratio > 0.0, "switch_ratio must be positive");
    ensure!(cfg.m_min >= 1, "m_min must be >= 1");
    ensure!(cfg.m_min <= cfg.m_max, "m_min exceeds m_max");
    Ok(cfg)
}
