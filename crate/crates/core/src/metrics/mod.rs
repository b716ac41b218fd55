//! Error-rate accounting and analytical complexity.
//!
//! `P_e = (E_u + E_f) / K` and `BER = (E_u J eta + B_m + B_c) / (K_a J eta)`,
//! where missed devices lose all their bits and falsely detected devices are
//! penalised only through `P_e`.

pub mod complexity;

pub use complexity::{complexity_eval, ComplexityRow, UnknownAlgorithm};

use crate::detectors::{ActiveSet, Reconstruction};
use crate::model::GroundTruth;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AudCounts {
    /// Active devices not detected, `E_u`.
    pub missed: u64,
    /// Inactive devices detected, `E_f`.
    pub false_alarms: u64,
    pub devices: u64,
}

impl AudCounts {
    pub fn pe(&self) -> f64 {
        if self.devices == 0 {
            0.0
        } else {
            (self.missed + self.false_alarms) as f64 / self.devices as f64
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BerCounts {
    pub missed: u64,
    /// Bit errors in the MAP bits of correctly detected devices, `B_m`.
    pub map_bit_errors: u64,
    /// Bit errors in the QAM bits of correctly detected devices, `B_c`.
    pub qam_bit_errors: u64,
    pub slots: u64,
    pub bits_per_symbol: u64,
    /// `K_a J eta`.
    pub total_bits: u64,
}

impl BerCounts {
    pub fn error_bits(&self) -> u64 {
        self.missed * self.slots * self.bits_per_symbol + self.map_bit_errors + self.qam_bit_errors
    }

    pub fn ber(&self) -> f64 {
        if self.total_bits == 0 {
            0.0
        } else {
            self.error_bits() as f64 / self.total_bits as f64
        }
    }
}

/// Per-trial metrics for one detector pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub aud: AudCounts,
    pub bits: BerCounts,
    pub wall_seconds: f64,
    pub mult_estimate: f64,
}

impl MetricsRecord {
    pub fn pe(&self) -> f64 {
        self.aud.pe()
    }

    pub fn ber(&self) -> f64 {
        self.bits.ber()
    }
}

pub fn aud_metrics(activity: &[bool], detected: &ActiveSet) -> AudCounts {
    let missed = activity
        .iter()
        .enumerate()
        .filter(|&(k, &a)| a && !detected.contains(k))
        .count() as u64;
    let false_alarms = detected
        .as_slice()
        .iter()
        .filter(|&&k| !activity.get(k).copied().unwrap_or(false))
        .count() as u64;
    AudCounts {
        missed,
        false_alarms,
        devices: activity.len() as u64,
    }
}

/// Bit errors of `rec` against `truth`. `qam_bits` is `log2 M`.
///
/// A detected active device without an estimate in `rec` has all its bits
/// counted as errors.
pub fn ber_metrics(
    truth: &GroundTruth,
    detected: &ActiveSet,
    rec: &Reconstruction,
    qam_bits: u32,
) -> BerCounts {
    let slots = truth.slots() as u64;
    let mirrors = truth.maps.trailing_zeros();
    let eta = (mirrors + qam_bits) as u64;
    let qam_mask = (1u32 << qam_bits) - 1;
    let mut counts = BerCounts {
        slots,
        bits_per_symbol: eta,
        total_bits: truth.active.len() as u64 * slots * eta,
        ..BerCounts::default()
    };
    for (n, &device) in truth.active.iter().enumerate() {
        if !detected.contains(device) {
            counts.missed += 1;
            continue;
        }
        let Some(est) = rec.device(device) else {
            counts.map_bit_errors += slots * mirrors as u64;
            counts.qam_bit_errors += slots * qam_bits as u64;
            continue;
        };
        for (sent, &got) in truth.symbols[n].iter().zip(&est.words) {
            let diff = sent.word ^ got;
            counts.map_bit_errors += (diff >> qam_bits).count_ones() as u64;
            counts.qam_bit_errors += (diff & qam_mask).count_ones() as u64;
        }
    }
    counts
}
