//! Mining tunables and the flat `key = value` config file.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::CallRecord;

/// Look-back applied to the newest call when no reference time is given.
pub const DEFAULT_REFERENCE_LOOKBACK: u64 = 30 * 24 * 3600;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("config line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("config key `{key}`: cannot parse `{value}`")]
    BadValue { key: String, value: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiningConfig {
    /// Frequency reference time (epoch seconds). Only calls starting strictly
    /// after it are counted. `None` means newest end time minus 30 days.
    pub t_r: Option<u64>,
    /// Boundary look-back window, seconds before a call's start.
    pub t_p: u64,
    /// Boundary look-ahead window, seconds after a call's end.
    pub t_f: u64,
    /// Conference tolerance on both start and end, seconds.
    pub epsilon: u64,
    pub k: usize,
    /// Weight of the call-count share in the portability index; the duration
    /// share gets `1 - lambda`.
    pub lambda: f64,
    pub port_threshold: f64,
    /// Local hours at which morning, afternoon and evening begin.
    pub tod_boundaries: [u8; 3],
    /// Local-time offset from UTC, minutes.
    pub utc_offset: i32,
    pub seed: u64,
}

impl Default for MiningConfig {
    fn default() -> Self {
        Self {
            t_r: None,
            t_p: 1800,
            t_f: 1800,
            epsilon: 5,
            k: 3,
            lambda: 0.5,
            port_threshold: 0.5,
            tod_boundaries: [5, 12, 18],
            utc_offset: 0,
            seed: 42,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));
        if self.k == 0 {
            return invalid("k must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return invalid(format!("lambda {} outside [0, 1]", self.lambda));
        }
        if !(self.port_threshold > 0.0 && self.port_threshold <= 1.0) {
            return invalid(format!("threshold {} outside (0, 1]", self.port_threshold));
        }
        let [m, a, e] = self.tod_boundaries;
        if !(m < a && a < e && e < 24) {
            return invalid(format!(
                "tod boundaries {m},{a},{e} must be strictly increasing hours in [0, 24)"
            ));
        }
        if self.utc_offset.unsigned_abs() > 24 * 60 {
            return invalid(format!("utc offset {} minutes is beyond one day", self.utc_offset));
        }
        Ok(())
    }

    /// The reference time actually used for `records`.
    pub fn reference_time(&self, records: &[CallRecord]) -> u64 {
        self.t_r.unwrap_or_else(|| {
            records
                .iter()
                .map(|r| r.end)
                .max()
                .map_or(0, |newest| newest.saturating_sub(DEFAULT_REFERENCE_LOOKBACK))
        })
    }

    /// Copy with `t_r` pinned, so echoed configs reproduce the run exactly.
    pub fn resolved(&self, records: &[CallRecord]) -> Self {
        Self {
            t_r: Some(self.reference_time(records)),
            ..self.clone()
        }
    }

    /// Applies one setting by its flag name. Returns `Ok(false)` for keys that
    /// are not mining tunables so callers can handle them.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool, ConfigError> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
            value.trim().parse().map_err(|_| ConfigError::BadValue {
                key: key.to_owned(),
                value: value.to_owned(),
            })
        }
        match key {
            "tr" => self.t_r = Some(num(key, value)?),
            "tp" => self.t_p = num(key, value)?,
            "tf" => self.t_f = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "k" => self.k = num(key, value)?,
            "lambda" => self.lambda = num(key, value)?,
            "threshold" => self.port_threshold = num(key, value)?,
            "utc-offset" => self.utc_offset = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "tod-boundaries" => {
                let parts: Vec<u8> = value.split(',').map(|p| num(key, p)).collect::<Result<_, _>>()?;
                self.tod_boundaries = parts.try_into().map_err(|_| ConfigError::BadValue {
                    key: key.to_owned(),
                    value: value.to_owned(),
                })?;
            }
            _ => return Ok(false),
        }
        Ok(true)
    }
}

/// Parses flat `key = value` text. Blank lines and `#` comments are skipped;
/// later duplicates win when applied in order.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: idx + 1,
            reason: format!("expected `key = value`, found `{line}`"),
        })?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line: idx + 1,
                reason: "empty key".into(),
            });
        }
        out.push((key.to_owned(), value.trim().to_owned()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        MiningConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = [
            MiningConfig {
                k: 0,
                ..Default::default()
            },
            MiningConfig {
                lambda: 1.5,
                ..Default::default()
            },
            MiningConfig {
                port_threshold: 0.0,
                ..Default::default()
            },
            MiningConfig {
                port_threshold: 1.01,
                ..Default::default()
            },
            MiningConfig {
                tod_boundaries: [5, 5, 18],
                ..Default::default()
            },
            MiningConfig {
                tod_boundaries: [5, 12, 24],
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn default_reference_time() {
        let cfg = MiningConfig::default();
        assert_eq!(cfg.reference_time(&[]), 0);
        let recs = [CallRecord::new(1, "a", "A", 10, 5_000_000)];
        assert_eq!(cfg.reference_time(&recs), 5_000_000 - DEFAULT_REFERENCE_LOOKBACK);
        assert_eq!(cfg.resolved(&recs).t_r, Some(5_000_000 - DEFAULT_REFERENCE_LOOKBACK));
    }

    #[test]
    fn kv_file_applies() {
        let pairs = parse_kv("# comment\nk = 4\n\nlambda=0.25\ntod-boundaries = 6,13,19\nnow = 0\n").unwrap();
        let mut cfg = MiningConfig::default();
        let mut unknown = Vec::new();
        for (k, v) in &pairs {
            if !cfg.set(k, v).unwrap() {
                unknown.push(k.clone());
            }
        }
        assert_eq!(cfg.k, 4);
        assert_eq!(cfg.lambda, 0.25);
        assert_eq!(cfg.tod_boundaries, [6, 13, 19]);
        assert_eq!(unknown, vec!["now"]);
    }

    #[test]
    fn kv_errors() {
        assert!(matches!(parse_kv("k 4"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(MiningConfig::default().set("k", "x").is_err());
        assert!(MiningConfig::default().set("tod-boundaries", "1,2").is_err());
    }
}
