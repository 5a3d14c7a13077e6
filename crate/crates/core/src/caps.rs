//! Resource caps for exhaustive enumeration.
//!
//! Defaults keep brute-force enumeration comfortably interactive; the
//! `DOMLAB_CAPS` environment variable (`key=value` pairs, comma separated)
//! raises or lowers them without code changes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Maximum total strategy count (summed over players) a game may have
    /// to be enumerated.
    pub max_strategies_total: usize,
    /// Maximum number of elimination sequences materialized per class.
    pub max_sequences: u64,
    /// Maximum number of distinct reachable reductions.
    pub max_nodes: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_strategies_total: 8, max_sequences: 200_000, max_nodes: 65_536 }
    }
}

pub const ENV_VAR: &str = "DOMLAB_CAPS";

impl Caps {
    /// Defaults overridden by a `key=value,key=value` spec.
    pub fn with_overrides(spec: Option<&str>) -> Result<Caps> {
        let mut caps = Caps::default();
        let Some(spec) = spec else {
            return Ok(caps);
        };
        for part in spec.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let Some((key, value)) = part.split_once('=') else {
                return Err(Error::InvalidConfig(format!(
                    "caps entry `{part}` is not of the form key=value"
                )));
            };
            let parse = |v: &str| -> Result<u64> {
                v.trim()
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("caps value `{v}` is not a number")))
            };
            match key.trim() {
                "max_strategies_total" => caps.max_strategies_total = parse(value)? as usize,
                "max_sequences" => caps.max_sequences = parse(value)?,
                "max_nodes" => caps.max_nodes = parse(value)?,
                other => {
                    return Err(Error::InvalidConfig(format!("unknown caps key `{other}`")))
                }
            }
        }
        Ok(caps)
    }

    /// Defaults overridden by the `DOMLAB_CAPS` environment variable.
    pub fn from_env() -> Result<Caps> {
        Caps::with_overrides(std::env::var(ENV_VAR).ok().as_deref())
    }
}
