//! Bit mapping for media-modulated symbols.
//!
//! A symbol word carries `M_r + log2 M` bits, most significant first. The
//! leading `M_r` bits select the mirror activation pattern in natural binary;
//! the trailing `log2 M` bits select a Gray-labelled square QAM point. Within
//! the QAM label the first half of the bits drive the in-phase axis and the
//! second half the quadrature axis; on each axis Gray label `0` maps to the
//! most positive level.

use num_complex::Complex64;
use thiserror::Error;

use super::config::SystemConfig;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModulationError {
    #[error("expected {expected} bits, got {got}")]
    BitCount { expected: usize, got: usize },
}

/// Unit average energy, Gray-labelled square QAM.
#[derive(Debug, Clone)]
pub struct Constellation {
    bits: u32,
    points: Vec<Complex64>,
}

fn gray_to_binary(mut g: u32) -> u32 {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}

impl Constellation {
    /// Returns `None` unless `order` is an even power of two (4, 16, 64, ...).
    pub fn new(order: usize) -> Option<Self> {
        if order < 4 || !order.is_power_of_two() || !order.trailing_zeros().is_multiple_of(2) {
            return None;
        }
        let bits = order.trailing_zeros();
        let axis_bits = bits / 2;
        let levels = 1u32 << axis_bits;
        let scale = (2.0 * (order as f64 - 1.0) / 3.0).sqrt();
        let level = |gray: u32| -> f64 {
            let idx = gray_to_binary(gray);
            ((levels - 1) as f64 - 2.0 * idx as f64) / scale
        };
        let mask = levels - 1;
        let points = (0..order as u32)
            .map(|label| Complex64::new(level(label >> axis_bits), level(label & mask)))
            .collect();
        Some(Self { bits, points })
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, label: u32) -> Complex64 {
        self.points[label as usize]
    }

    /// Nearest point in Euclidean distance; exact ties go to the lower label.
    pub fn slice(&self, z: Complex64) -> u32 {
        let mut best = 0u32;
        let mut best_d = f64::INFINITY;
        for (label, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = label as u32;
            }
        }
        best
    }

    pub fn average_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }
}

/// Packs MSB-first bits into a word.
pub fn bits_to_word(bits: &[bool]) -> u32 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as u32)
}

/// Unpacks the low `len` bits of `word`, MSB first.
pub fn word_to_bits(word: u32, len: u32) -> Vec<bool> {
    (0..len).rev().map(|i| (word >> i) & 1 == 1).collect()
}

/// Splits a symbol word into `(map_index, qam_label)`.
pub fn split_word(word: u32, qam_bits: u32) -> (usize, u32) {
    ((word >> qam_bits) as usize, word & ((1 << qam_bits) - 1))
}

/// Maps `M_r + log2 M` bits to a zero-based MAP index and a QAM symbol.
pub fn modulate(
    bits: &[bool],
    cfg: &SystemConfig,
    constellation: &Constellation,
) -> Result<(usize, Complex64), ModulationError> {
    let expected = cfg.bits_per_symbol() as usize;
    if bits.len() != expected {
        return Err(ModulationError::BitCount {
            expected,
            got: bits.len(),
        });
    }
    Ok(modulate_word(bits_to_word(bits), constellation))
}

pub fn modulate_word(word: u32, constellation: &Constellation) -> (usize, Complex64) {
    let (map, label) = split_word(word, constellation.bits());
    (map, constellation.point(label))
}

/// Inverse of [`modulate`]: MAP bits from `map_index`, QAM bits by slicing.
pub fn demodulate(
    map_index: usize,
    estimate: Complex64,
    cfg: &SystemConfig,
    constellation: &Constellation,
) -> Vec<bool> {
    word_to_bits(
        demodulate_word(map_index, estimate, constellation),
        cfg.bits_per_symbol(),
    )
}

pub fn demodulate_word(
    map_index: usize,
    estimate: Complex64,
    constellation: &Constellation,
) -> u32 {
    ((map_index as u32) << constellation.bits()) | constellation.slice(estimate)
}
