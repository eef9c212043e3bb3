//! Config loading and command-line overrides.
//!
//! Configs are JSON mirrors of `SessionConfig` with nested objects for
//! `encoder`, `channel`, `eve`, and `mz`. Parsing is strict: unknown fields
//! are errors, not warnings, so a typoed knob can never silently fall back
//! to a default.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use tqkd::{AmbiguousPolicy, EveStrategy, SessionConfig};

/// Read and strictly parse a session config. Omitted fields take their
/// documented defaults; unknown fields are rejected.
pub fn load_config(path: &Path) -> Result<SessionConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let cfg: SessionConfig = serde_json::from_str(&text)
        .with_context(|| format!("invalid config in {}", path.display()))?;
    Ok(cfg)
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub pulses: Option<u64>,
    pub eve: Option<EveStrategy>,
}

pub fn apply_overrides(cfg: &mut SessionConfig, overrides: &Overrides) {
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(pulses) = overrides.pulses {
        cfg.n_pulses = pulses;
    }
    if let Some(eve) = &overrides.eve {
        cfg.eve = eve.clone();
    }
}

/// Parse the `--eve` selector: `none`, `resend-full`,
/// `resend-full-suppress`, or `resend-short=<duration>`.
pub fn parse_eve_selector(selector: &str) -> Result<EveStrategy, String> {
    match selector {
        "none" => Ok(EveStrategy::None),
        "resend-full" => Ok(EveStrategy::ResendFull {
            ambiguous_policy: AmbiguousPolicy::GuessUniform,
        }),
        "resend-full-suppress" => Ok(EveStrategy::ResendFull {
            ambiguous_policy: AmbiguousPolicy::Suppress,
        }),
        other => {
            if let Some(value) = other.strip_prefix("resend-short=") {
                let pulse_duration: f64 = value
                    .parse()
                    .map_err(|_| format!("invalid short-pulse duration {value:?}"))?;
                Ok(EveStrategy::ResendShort { pulse_duration })
            } else {
                Err(format!(
                    "unknown eve selector {other:?}; expected none, resend-full, \
                     resend-full-suppress, or resend-short=<duration>"
                ))
            }
        }
    }
}
