//! Plain-text experiment configuration.
//!
//! One `key = value` pair per line. `#` starts a comment; blank lines are
//! ignored; keys are case sensitive and may appear once. Recognised keys:
//!
//! | key          | meaning                               |
//! |--------------|---------------------------------------|
//! | `K`          | total devices                         |
//! | `Ka`, `K_a`  | active devices                        |
//! | `Mr`, `M_r`  | RF mirrors per device                 |
//! | `M`          | QAM order                             |
//! | `Nr`, `N_r`  | receive antennas                      |
//! | `J`          | slots per frame                       |
//! | `snr_db`     | per-device transmit SNR in dB         |
//! | `P_th`       | activity-detector stopping threshold  |
//! | `seed`       | master seed                           |
//! | `sweep`      | `snr`, `J` or `Nr`                    |
//! | `values`     | comma list, or `start:step:stop`      |
//! | `trials`     | Monte Carlo trials per point          |
//! | `detectors`  | comma list of pipeline names          |

use std::collections::HashSet;

use thiserror::Error;

use super::sweep::{DetectorKind, SweepVariable};
use crate::model::SystemConfig;

/// Upper bound on the number of points a `start:step:stop` range may expand to.
pub const MAX_RANGE_POINTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {field}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub field: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    pub sweep: Option<SweepVariable>,
    pub values: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub detectors: Option<Vec<DetectorKind>>,
}

fn canonical_key(key: &str) -> Option<&'static str> {
    Some(match key {
        "K" => "K",
        "Ka" | "K_a" => "Ka",
        "Mr" | "M_r" => "Mr",
        "M" => "M",
        "Nr" | "N_r" => "Nr",
        "J" => "J",
        "snr_db" | "snr" => "snr_db",
        "P_th" | "threshold" => "P_th",
        "seed" => "seed",
        "sweep" => "sweep",
        "values" => "values",
        "trials" => "trials",
        "detectors" => "detectors",
        _ => return None,
    })
}

/// Parses a comma list or a `start:step:stop` range of reals.
pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let [start, step, stop] = parts[..] else {
            return Err("range must be start:step:stop".into());
        };
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{s}` is not a finite number"))
        };
        let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
        if step <= 0.0 {
            return Err("range step must be positive".into());
        }
        if stop < start {
            return Err("range stop is below start".into());
        }
        let span = ((stop - start) / step + 1e-9).floor();
        if span >= MAX_RANGE_POINTS as f64 {
            return Err(format!(
                "range expands to more than {MAX_RANGE_POINTS} points"
            ));
        }
        return Ok((0..=span as usize)
            .map(|i| start + step * i as f64)
            .collect());
    }
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .map_err(|_| format!("`{s}` is not a number"))
                .and_then(|v| {
                    if v.is_nan() {
                        Err("NaN is not allowed".into())
                    } else {
                        Ok(v)
                    }
                })
        })
        .collect()
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ParseError> {
    let mut cfg = ExperimentConfig::default();
    let mut seen = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |field: &str, reason: String| ParseError {
            line,
            field: field.to_string(),
            reason,
        };
        let Some((key, value)) = content.split_once('=') else {
            return Err(err(content, "expected `key = value`".into()));
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(key) = canonical_key(key) else {
            return Err(err(key, "unknown key".into()));
        };
        if !seen.insert(key) {
            return Err(err(key, "given more than once".into()));
        }
        if value.is_empty() {
            return Err(err(key, "missing value".into()));
        }
        let count = || -> Result<usize, ParseError> {
            value
                .parse::<usize>()
                .map_err(|_| err(key, format!("`{value}` is not a non-negative integer")))
        };
        let real = || -> Result<f64, ParseError> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| !v.is_nan())
                .ok_or_else(|| err(key, format!("`{value}` is not a number")))
        };
        let s = &mut cfg.system;
        match key {
            "K" => s.devices = count()?,
            "Ka" => s.active = count()?,
            "Mr" => {
                s.mirrors = value
                    .parse::<u32>()
                    .map_err(|_| err(key, format!("`{value}` is not a non-negative integer")))?
            }
            "M" => s.qam_order = count()?,
            "Nr" => s.rx_antennas = count()?,
            "J" => s.slots = count()?,
            "snr_db" => s.snr_db = real()?,
            "P_th" => s.threshold = real()?,
            "seed" => {
                s.seed = value
                    .parse::<u64>()
                    .map_err(|_| err(key, format!("`{value}` is not a 64-bit unsigned integer")))?
            }
            "sweep" => cfg.sweep = Some(value.parse().map_err(|e: String| err(key, e))?),
            "values" => cfg.values = Some(parse_values(value).map_err(|e| err(key, e))?),
            "trials" => cfg.trials = Some(count()?),
            "detectors" => {
                let list = value
                    .split(',')
                    .map(|d| d.trim().parse::<DetectorKind>())
                    .collect::<Result<Vec<_>, String>>()
                    .map_err(|e| err(key, e))?;
                cfg.detectors = Some(list);
            }
            _ => unreachable!("canonical keys are exhaustive"),
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let text = "\
# default scenario
K = 100
Ka = 8
Mr = 2
M = 4
Nr = 50   # antennas
J = 12
snr_db = 2
P_th = 2
seed = 42
sweep = snr
values = -10:2:12
trials = 1000
detectors = stromp+sic_ssp, oracle_ls
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(
            cfg.system,
            SystemConfig {
                seed: 42,
                ..SystemConfig::default()
            }
        );
        assert_eq!(cfg.sweep, Some(SweepVariable::Snr));
        assert_eq!(cfg.values.as_ref().unwrap().len(), 12);
        assert_eq!(cfg.values.as_ref().unwrap()[11], 12.0);
        assert_eq!(cfg.trials, Some(1000));
        assert_eq!(
            cfg.detectors,
            Some(vec![DetectorKind::StrompSicSsp, DetectorKind::OracleLs])
        );
    }

    #[test]
    fn errors_name_line_and_field() {
        let e = parse_config("K = 10\nKa = eight\n").unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (2, "Ka"));
        let e = parse_config("bogus = 1").unwrap_err();
        assert_eq!(e.field, "bogus");
        let e = parse_config("J = 1\nJ = 2").unwrap_err();
        assert_eq!(e.field, "J");
        assert!(parse_config("no equals sign").is_err());
        assert!(parse_config("values = 1:0:3").is_err());
        assert!(parse_config("values = 0:1e-12:1").is_err());
        assert!(parse_config("snr_db = NaN").is_err());
    }

    #[test]
    fn infinite_snr_is_accepted() {
        let cfg = parse_config("snr_db = inf").unwrap();
        assert_eq!(cfg.system.noise_variance(), 0.0);
    }

    #[test]
    fn comma_values() {
        assert_eq!(parse_values("2, 4,8").unwrap(), vec![2.0, 4.0, 8.0]);
        assert!(parse_values("2,,4").is_err());
    }
}
