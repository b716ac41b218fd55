//! Closed-form complex-multiplication counts for each detector.
//!
//! `s` runs over iterations; `K_a` is the configured active count. The GSP
//! row evaluates its per-iteration support size at `s = K_a`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::SystemConfig;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown algorithm `{0}`")]
pub struct UnknownAlgorithm(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComplexityRow {
    Stromp,
    TlsscsAud,
    AudLowerBound,
    SicSsp,
    TlsscsData,
    Gsp,
    /// Oracle LS and the zero-forcing benchmark share one formula.
    LeastSquares,
}

impl ComplexityRow {
    pub const ALL: [ComplexityRow; 7] = [
        ComplexityRow::Stromp,
        ComplexityRow::TlsscsAud,
        ComplexityRow::AudLowerBound,
        ComplexityRow::SicSsp,
        ComplexityRow::TlsscsData,
        ComplexityRow::Gsp,
        ComplexityRow::LeastSquares,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ComplexityRow::Stromp => "StrOMP",
            ComplexityRow::TlsscsAud => "TLSSCS-AUD",
            ComplexityRow::AudLowerBound => "AUD-LB",
            ComplexityRow::SicSsp => "SIC-SSP",
            ComplexityRow::TlsscsData => "TLSSCS-data",
            ComplexityRow::Gsp => "GSP",
            ComplexityRow::LeastSquares => "LS/Benchmark1",
        }
    }

    pub fn evaluate(self, cfg: &SystemConfig) -> f64 {
        let j = cfg.slots as f64;
        let nt = cfg.maps() as f64;
        let k = cfg.devices as f64;
        let ka = cfg.active as f64;
        let nr = cfg.rx_antennas as f64;
        // Per-iteration cost of the activity detector with `s` candidate devices.
        let aud_iter = |s: f64| {
            j * nr * (s + 2.0 * s * s + 2.0 * (s * nt).powi(2)) + j * (s.powi(3) + (s * nt).powi(3))
        };
        let sum =
            |upto: usize, f: &dyn Fn(f64) -> f64| (1..=upto).map(|s| f(s as f64)).sum::<f64>();

        match self {
            ComplexityRow::Stromp => (ka + 1.0) * j * k * nt * nr + sum(cfg.active + 1, &aud_iter),
            ComplexityRow::AudLowerBound => ka * j * k * nt * nr + sum(cfg.active, &aud_iter),
            ComplexityRow::TlsscsAud => {
                (ka + 1.0) * (nr * nr * (k * nt + j) + nr * j * k * nt)
                    + sum(cfg.active + 1, &|s| {
                        nr * nr + 2.0 * nr * (s * nt).powi(2) + (s * nt).powi(3)
                    })
            }
            ComplexityRow::SicSsp => {
                j * sum(cfg.active, &|s| {
                    2.0 * s * nr * (nt + 1.0) + 14.0 * nr * s * s + 11.0 * s.powi(3)
                })
            }
            ComplexityRow::TlsscsData => {
                j * nr * ka * nt + 2.0 * nr * (ka * nt).powi(2) + (ka * nt).powi(3)
            }
            ComplexityRow::Gsp => {
                let s = ka;
                j * (2.0 * s * nr * (nt + 1.0) + 14.0 * nr * ka * ka + 11.0 * ka.powi(3))
            }
            ComplexityRow::LeastSquares => j * nr * ka + 2.0 * nr * ka * ka + ka.powi(3),
        }
    }
}

impl fmt::Display for ComplexityRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ComplexityRow {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase();
        let row = match key.as_str() {
            "stromp" => ComplexityRow::Stromp,
            "tlsscs-aud" => ComplexityRow::TlsscsAud,
            "aud-lb" => ComplexityRow::AudLowerBound,
            "sic-ssp" => ComplexityRow::SicSsp,
            "tlsscs-data" => ComplexityRow::TlsscsData,
            "gsp" => ComplexityRow::Gsp,
            "ls/benchmark1" | "ls" | "benchmark1" => ComplexityRow::LeastSquares,
            _ => return Err(UnknownAlgorithm(s.to_string())),
        };
        Ok(row)
    }
}

/// Multiplication count for the named row.
pub fn complexity_eval(cfg: &SystemConfig, algorithm: &str) -> Result<f64, UnknownAlgorithm> {
    Ok(algorithm.parse::<ComplexityRow>()?.evaluate(cfg))
}
