//! Benchmark configuration files.
//!
//! Each benchmark reads one TOML table; the checked-in defaults live in
//! `configs/` and are compiled in, so a partial file on disk only needs the
//! keys it changes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::band::BandParams;
use super::channel::ChannelParams;
use super::quasi_static::QuasiStaticParams;
use crate::error::{IfedError, Result};

pub const CHANNEL_FLOW_TOML: &str = include_str!("../../configs/channel_flow.toml");
pub const ELASTIC_BAND_TOML: &str = include_str!("../../configs/elastic_band.toml");
pub const COMPRESSED_BLOCK_TOML: &str = include_str!("../../configs/compressed_block.toml");
pub const COOKS_MEMBRANE_TOML: &str = include_str!("../../configs/cooks_membrane.toml");

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub channel_flow: ChannelParams,
    pub elastic_band: BandParams,
    pub compressed_block: QuasiStaticParams,
    pub cooks_membrane: QuasiStaticParams,
}

fn parse<T: for<'de> Deserialize<'de>>(name: &str, text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| IfedError::Parse(format!("{name}: {e}")))
}

/// Overlays the keys of `patch` onto `base`.
fn merge(base: &mut toml::Table, patch: toml::Table) {
    for (k, v) in patch {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(p)) => merge(b, p),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn layered<T: for<'de> Deserialize<'de>>(name: &str, default: &str, patch: Option<&str>) -> Result<T> {
    let mut base: toml::Table = parse(name, default)?;
    if let Some(p) = patch {
        merge(&mut base, parse(name, p)?);
    }
    base.try_into().map_err(|e: toml::de::Error| IfedError::Parse(format!("{name}: {e}")))
}

impl BenchConfig {
    /// The checked-in configurations.
    pub fn defaults() -> Self {
        Self::load(None).expect("built-in configs parse")
    }

    /// Defaults overlaid with `<dir>/<benchmark>.toml` where present.
    pub fn load(dir: Option<&Path>) -> Result<Self> {
        let read = |file: &str| -> Result<Option<String>> {
            match dir {
                Some(d) if d.join(file).exists() => Ok(Some(std::fs::read_to_string(d.join(file))?)),
                _ => Ok(None),
            }
        };
        Ok(Self {
            channel_flow: layered("channel_flow", CHANNEL_FLOW_TOML, read("channel_flow.toml")?.as_deref())?,
            elastic_band: layered("elastic_band", ELASTIC_BAND_TOML, read("elastic_band.toml")?.as_deref())?,
            compressed_block: layered(
                "compressed_block",
                COMPRESSED_BLOCK_TOML,
                read("compressed_block.toml")?.as_deref(),
            )?,
            cooks_membrane: layered("cooks_membrane", COOKS_MEMBRANE_TOML, read("cooks_membrane.toml")?.as_deref())?,
        })
    }
}

/// Flat `key=value;…` rendering of a parameter struct, keys sorted.
pub fn params_string<T: Serialize>(p: &T) -> String {
    let value = toml::Value::try_from(p).expect("params serialize");
    let mut out = Vec::new();
    flatten("", &value, &mut out);
    out.sort();
    out.join(";")
}

fn flatten(prefix: &str, v: &toml::Value, out: &mut Vec<String>) {
    match v {
        toml::Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        toml::Value::String(s) => out.push(format!("{prefix}={s}")),
        other => out.push(format!("{prefix}={other}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_and_carry_table_values() {
        let c = BenchConfig::defaults();
        assert_eq!(c.compressed_block.g, 80.194);
        assert_eq!(c.compressed_block.kappa_stab, 374.239);
        assert_eq!((c.compressed_block.ramp_time, c.compressed_block.final_time), (40.0, 100.0));
        assert_eq!(c.cooks_membrane.g, 83.333);
        assert_eq!(c.cooks_membrane.kappa_stab, 388.889);
        assert_eq!((c.cooks_membrane.ramp_time, c.cooks_membrane.final_time), (20.0, 50.0));
        assert_eq!((c.channel_flow.rho, c.channel_flow.mu), (1.0, 0.01));
        assert_eq!((c.elastic_band.rho, c.elastic_band.mu), (1.0, 0.01));
    }

    #[test]
    fn partial_files_override_defaults() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("channel_flow.toml"), "n = 32\nmfac = 2.5\n").unwrap();
        let c = BenchConfig::load(Some(dir.path())).unwrap();
        assert_eq!(c.channel_flow.n, 32);
        assert_eq!(c.channel_flow.mfac, 2.5);
        assert_eq!(c.channel_flow.mu, 0.01);
        std::fs::write(dir.path().join("channel_flow.toml"), "bogus = 1\n").unwrap();
        assert!(BenchConfig::load(Some(dir.path())).is_err());
    }

    #[test]
    fn params_string_is_sorted() {
        let s = params_string(&BenchConfig::defaults().channel_flow);
        let keys: Vec<&str> = s.split(';').map(|kv| kv.split('=').next().unwrap()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(s.contains("mu=0.01"));
    }
}
