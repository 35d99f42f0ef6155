//! Library surface of the experiment harness, so integration tests and the
//! acceptance suite can drive solves, sweeps and validation runs without
//! spawning processes.

pub mod harness;
pub mod manifest;
pub mod plot;
