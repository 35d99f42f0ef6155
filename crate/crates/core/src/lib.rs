//! Peak age-of-information analysis for energy-harvesting multiple-access
//! networks.
//!
//! The crate models a population of machine-type devices that harvest RF
//! energy from a power station, queue Poisson status updates, and deliver
//! them to a base station over TDMA, FDMA or power-domain NOMA. Devices
//! sleep between updates under one of two policies:
//!
//! * **MV** (multiple vacations): an empty queue sends the transmitter on
//!   repeated fixed-length vacations; service resumes only at a vacation
//!   boundary that finds work.
//! * **ST** (start-up threshold): the transmitter sleeps until the queue
//!   holds a threshold number of packets, then serves until empty.
//!
//! Four layers cooperate:
//!
//! * [`queueing`] — closed-form M/D/1-with-vacations mathematics: queue
//!   p.g.f.s, mean queue lengths and delays, peak and per-packet AoI.
//! * [`phy`] — channel gains, energy-harvesting budgets, capacity
//!   inversions to transmit power, the NOMA SIC power split, energy
//!   efficiency and the average-power model.
//! * [`sim`] — a deterministic discrete-event simulation of the same
//!   queues, used as an independent oracle for every closed form.
//! * [`opt`] — the six (protocol × policy) peak-AoI minimization problems,
//!   solved exactly by linear search over the update rate and approximately
//!   by a convex-concave procedure over a DC split of the objective.
//!
//! All internal math is SI (seconds, watts, hertz, joules). Configuration
//! files carry natural units (ms, MHz, mW, dBm/Hz) and are normalized on
//! load; see [`config`].

// `!(x > 0.0)` is used instead of `x <= 0.0` throughout: the negated form
// also rejects NaN, which must never pass a domain check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod numeric;
pub mod opt;
pub mod phy;
pub mod queueing;
pub mod sim;

pub use config::{
    DecisionVector, PolicyKind, PolicyParam, ProtocolKind, RawSystemConfig, SystemConfig,
};
pub use queueing::{AoIBreakdown, QueueParams};
pub use sim::{QueueStats, SimSpec};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A configuration invariant failed; the message names the first
    /// violated invariant.
    #[error("config: {0}")]
    Config(String),

    /// The queue is not stable (`lambda * service >= 1`), so steady-state
    /// formulas do not apply.
    #[error("unstable queue: lambda*service = {rho} must be < 1")]
    Unstable { rho: f64 },

    /// An argument is outside the domain of the operation.
    #[error("{0}")]
    Domain(String),

    /// A problem (or subproblem) has an empty feasible set; the message
    /// names the binding constraint.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A simulation run was mis-specified.
    #[error("sim: {0}")]
    Sim(String),
}

pub type Result<T> = std::result::Result<T, Error>;
