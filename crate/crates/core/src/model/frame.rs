use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use super::config::SystemConfig;
use super::modulation::{modulate_word, Constellation};
use crate::numerics::ComplexMatrix;

/// One active device's transmission in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotSymbol {
    /// Zero-based mirror activation pattern.
    pub map: usize,
    pub symbol: Complex64,
    /// The `M_r + log2 M` transmitted bits, MSB first.
    pub word: u32,
}

#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub activity: Vec<bool>,
    /// Active device indices, ascending.
    pub active: Vec<usize>,
    /// `symbols[n][j]` is device `active[n]` in slot `j`.
    pub symbols: Vec<Vec<SlotSymbol>>,
    /// Sparse access signal, `(K * N_t) x J`.
    pub x: ComplexMatrix,
    pub maps: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error(
        "device {device} slot {slot}: {nonzeros} nonzero entries in block, expected {expected}"
    )]
    BlockCount {
        device: usize,
        slot: usize,
        nonzeros: usize,
        expected: usize,
    },
    #[error("device {device} slot {slot}: nonzero at MAP {found}, expected {expected}")]
    WrongSupport {
        device: usize,
        slot: usize,
        found: usize,
        expected: usize,
    },
    #[error("activity has {found} active devices, expected {expected}")]
    ActiveCount { found: usize, expected: usize },
}

impl GroundTruth {
    pub fn slots(&self) -> usize {
        self.x.cols()
    }

    pub fn devices(&self) -> usize {
        self.activity.len()
    }

    /// Global column of device `active[n]` in slot `j`.
    pub fn support(&self, n: usize, slot: usize) -> usize {
        self.active[n] * self.maps + self.symbols[n][slot].map
    }

    /// Verifies block sparsity across the frame and one-nonzero-per-block
    /// structure within each slot.
    pub fn check_structure(&self) -> Result<(), StructureError> {
        let found = self.activity.iter().filter(|&&a| a).count();
        if found != self.active.len() {
            return Err(StructureError::ActiveCount {
                found,
                expected: self.active.len(),
            });
        }
        let mut pos = 0;
        for device in 0..self.devices() {
            let expected = usize::from(self.activity[device]);
            for slot in 0..self.slots() {
                let block = &self.x.column(slot)[device * self.maps..(device + 1) * self.maps];
                let nz: Vec<usize> = block
                    .iter()
                    .enumerate()
                    .filter(|(_, z)| z.norm_sqr() > 0.0)
                    .map(|(u, _)| u)
                    .collect();
                if nz.len() != expected {
                    return Err(StructureError::BlockCount {
                        device,
                        slot,
                        nonzeros: nz.len(),
                        expected,
                    });
                }
                if expected == 1 && nz[0] != self.symbols[pos][slot].map {
                    return Err(StructureError::WrongSupport {
                        device,
                        slot,
                        found: nz[0],
                        expected: self.symbols[pos][slot].map,
                    });
                }
            }
            pos += expected;
        }
        Ok(())
    }
}

/// Aggregate channel `H = [H_1, ..., H_K]`, `N_r x (K * N_t)`.
#[derive(Debug, Clone)]
pub struct ChannelMatrix {
    pub h: ComplexMatrix,
    pub maps: usize,
}

impl ChannelMatrix {
    pub fn devices(&self) -> usize {
        self.h.cols() / self.maps
    }

    pub fn rx_antennas(&self) -> usize {
        self.h.rows()
    }

    /// Columns `k * N_t .. (k + 1) * N_t`.
    pub fn block(&self, device: usize) -> std::ops::Range<usize> {
        device * self.maps..(device + 1) * self.maps
    }
}

#[derive(Debug, Clone)]
pub struct Observation {
    /// `N_r x J` received frame.
    pub y: ComplexMatrix,
    pub noise_variance: f64,
}

#[derive(Debug, Clone)]
pub struct Frame {
    pub truth: GroundTruth,
    pub channel: ChannelMatrix,
    pub observation: Observation,
    pub noise: ComplexMatrix,
}

impl Frame {
    /// FNV-1a over the bit patterns of `H`, `X` and `W`. Used to confirm that
    /// paired detectors saw the same realisation.
    pub fn checksum(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mats = [&self.channel.h, &self.truth.x, &self.noise];
        for m in mats {
            for z in m.as_slice() {
                for bits in [z.re.to_bits(), z.im.to_bits()] {
                    for byte in bits.to_le_bytes() {
                        h ^= byte as u64;
                        h = h.wrapping_mul(0x0000_0100_0000_01b3);
                    }
                }
            }
        }
        h
    }
}

/// Circularly symmetric complex Gaussian with the given variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

pub fn complex_gaussian_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    variance: f64,
) -> ComplexMatrix {
    if variance == 0.0 {
        return ComplexMatrix::zeros(rows, cols);
    }
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng, variance))
}

/// Exactly `K_a` active devices drawn uniformly without replacement.
pub fn generate_activity<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Vec<bool> {
    let mut activity = vec![false; cfg.devices];
    for k in rand::seq::index::sample(rng, cfg.devices, cfg.active) {
        activity[k] = true;
    }
    activity
}

pub fn generate_channel<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> ChannelMatrix {
    ChannelMatrix {
        h: complex_gaussian_matrix(rng, cfg.rx_antennas, cfg.columns(), 1.0),
        maps: cfg.maps(),
    }
}

/// Draws activity, data, channel and noise, in that order, and forms
/// `Y = H X + W`.
pub fn generate_frame<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Frame {
    let constellation = Constellation::new(cfg.qam_order).expect("validated QAM order");
    let activity = generate_activity(cfg, rng);
    let active: Vec<usize> = (0..cfg.devices).filter(|&k| activity[k]).collect();
    let maps = cfg.maps();
    let words = 1u32 << cfg.bits_per_symbol();

    let mut x = ComplexMatrix::zeros(cfg.columns(), cfg.slots);
    let mut symbols = Vec::with_capacity(active.len());
    for &k in &active {
        let per_slot: Vec<SlotSymbol> = (0..cfg.slots)
            .map(|j| {
                let word = rng.random_range(0..words);
                let (map, symbol) = modulate_word(word, &constellation);
                x[(k * maps + map, j)] = symbol;
                SlotSymbol { map, symbol, word }
            })
            .collect();
        symbols.push(per_slot);
    }

    let channel = generate_channel(cfg, rng);
    let noise_variance = cfg.noise_variance();
    let noise = complex_gaussian_matrix(rng, cfg.rx_antennas, cfg.slots, noise_variance);
    let mut y = channel.h.mul(&x).expect("conformant H and X");
    for (dst, w) in y.as_mut_slice().iter_mut().zip(noise.as_slice()) {
        *dst += w;
    }

    Frame {
        truth: GroundTruth {
            activity,
            active,
            symbols,
            x,
            maps,
        },
        channel,
        observation: Observation { y, noise_variance },
        noise,
    }
}
