//! Run manifests: every output directory gets a JSON record of the
//! resolved configuration, the values that are modeling assumptions rather
//! than fixed system parameters, and the seeds used, so any number in any
//! output is reproducible from the manifest plus the row.

use std::path::Path;

use anyhow::{Context, Result};
use peakaoi::config::SystemConfig;
use serde_json::json;

/// Names of configuration fields whose defaults are modeling assumptions
/// (nothing in the system model pins them); recorded prominently so runs
/// are honest about what was chosen rather than given.
pub const ASSUMED_FIELDS: [&str; 10] = [
    "fading_param",
    "capacity_gap",
    "ee_min",
    "battery_j",
    "eh_clamp_w",
    "sic_threshold_w",
    "m_min",
    "m_max",
    "tau_s_max_s",
    "lambda_min",
];

pub fn write_manifest(
    path: &Path,
    command: &str,
    cfg: &SystemConfig,
    seeds: &[u64],
    extra_notes: &[String],
) -> Result<()> {
    let cfg_json = serde_json::to_value(cfg).context("serializing config")?;
    let assumed: serde_json::Map<String, serde_json::Value> = ASSUMED_FIELDS
        .iter()
        .filter_map(|name| cfg_json.get(*name).map(|v| (name.to_string(), v.clone())))
        .collect();
    let mut notes = vec![
        "assumed_defaults lists values that are modeling assumptions, not fixed system \
         parameters; change them in the config file to match a deployment"
            .to_string(),
        "unit convention: lambda_min/lambda_max are status-update rates in packets per \
         second, never data rates"
            .to_string(),
        "all values in config_si are SI (s, Hz, W, J); config files use ms/MHz/mW/dBm-Hz"
            .to_string(),
    ];
    notes.extend_from_slice(extra_notes);

    let manifest = json!({
        "tool": "peakaoi",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config_hash": format!("{:016x}", cfg.stable_hash()),
        "config_si": cfg_json,
        "assumed_defaults": assumed,
        "seeds": seeds,
        "notes": notes,
    });
    std::fs::write(path, serde_json::to_string_pretty(&manifest).unwrap())
        .with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_written_with_assumed_fields() {
        let dir = std::env::temp_dir().join("peakaoi-manifest-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("manifest.json");
        write_manifest(&path, "solve", &SystemConfig::default(), &[7], &[]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["assumed_defaults"]["capacity_gap"], 1.0);
        assert!(value["config_hash"].as_str().unwrap().len() == 16);
        std::fs::remove_dir_all(&dir).ok();
    }
}
