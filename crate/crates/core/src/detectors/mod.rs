//! Activity and data detectors.
//!
//! Every argmax in this module breaks ties toward the smallest index so that
//! results are reproducible bit for bit.

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{demodulate_word, ChannelMatrix, Constellation};
use crate::numerics::ComplexMatrix;

pub mod oracle;
pub mod pursuit;
pub mod stromp;
pub mod zf;

pub use oracle::oracle_ls;
pub use pursuit::{gsp, sic_ssp};
pub use stromp::{
    stromp, stromp_known_ka, stromp_known_ka_trace, stromp_trace, StopReason, StrompTrace,
    MONOTONE_TOLERANCE,
};
pub use zf::{zf_benchmark, ZfOutcome};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ActiveSetError {
    #[error("device {0} appears more than once")]
    Duplicate(usize),
    #[error("device {device} out of range for {devices} devices")]
    OutOfRange { device: usize, devices: usize },
}

/// Detected devices in discovery order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActiveSet {
    devices: Vec<usize>,
}

impl ActiveSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_devices(devices: Vec<usize>, total: usize) -> Result<Self, ActiveSetError> {
        for (i, &d) in devices.iter().enumerate() {
            if d >= total {
                return Err(ActiveSetError::OutOfRange {
                    device: d,
                    devices: total,
                });
            }
            if devices[..i].contains(&d) {
                return Err(ActiveSetError::Duplicate(d));
            }
        }
        Ok(Self { devices })
    }

    pub fn len(&self) -> usize {
        self.devices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.devices.is_empty()
    }

    pub fn contains(&self, device: usize) -> bool {
        self.devices.contains(&device)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.devices
    }

    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.devices.clone();
        v.sort_unstable();
        v
    }

    pub(crate) fn push(&mut self, device: usize) {
        debug_assert!(!self.contains(device));
        self.devices.push(device);
    }
}

/// Chosen column and complex amplitude for one device in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotEstimate {
    /// Global column index into `H`.
    pub column: usize,
    /// Zero-based MAP index within the device block.
    pub map: usize,
    pub amplitude: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceEstimate {
    pub device: usize,
    pub slots: Vec<SlotEstimate>,
    /// Demodulated symbol words, one per slot.
    pub words: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    /// `(K * N_t) x J`, nonzero only on chosen supports.
    pub x_hat: ComplexMatrix,
    pub devices: Vec<DeviceEstimate>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReconstructionError {
    #[error("device {device} slot {slot}: {nonzeros} nonzeros in block")]
    BlockCount {
        device: usize,
        slot: usize,
        nonzeros: usize,
    },
    #[error("device {0} has no estimate")]
    Missing(usize),
}

impl Reconstruction {
    pub fn empty(columns: usize, slots: usize) -> Self {
        Self {
            x_hat: ComplexMatrix::zeros(columns, slots),
            devices: Vec::new(),
        }
    }

    /// Builds `X_hat` and decoded words from per-slot estimates.
    /// `per_slot[j][n]` belongs to `devices[n]`.
    pub(crate) fn assemble(
        channel: &ChannelMatrix,
        devices: &[usize],
        per_slot: &[Vec<(usize, Complex64)>],
        constellation: &Constellation,
    ) -> Self {
        let maps = channel.maps;
        let slots = per_slot.len();
        let mut x_hat = ComplexMatrix::zeros(channel.h.cols(), slots);
        let devices = devices
            .iter()
            .enumerate()
            .map(|(n, &device)| {
                let slots: Vec<SlotEstimate> = per_slot
                    .iter()
                    .enumerate()
                    .map(|(j, est)| {
                        let (column, amplitude) = est[n];
                        debug_assert_eq!(column / maps, device);
                        x_hat[(column, j)] = amplitude;
                        SlotEstimate {
                            column,
                            map: column - device * maps,
                            amplitude,
                        }
                    })
                    .collect();
                let words = slots
                    .iter()
                    .map(|s| demodulate_word(s.map, s.amplitude, constellation))
                    .collect();
                DeviceEstimate {
                    device,
                    slots,
                    words,
                }
            })
            .collect();
        Self { x_hat, devices }
    }

    pub fn device(&self, device: usize) -> Option<&DeviceEstimate> {
        self.devices.iter().find(|d| d.device == device)
    }

    /// Checks that every detected device has exactly one nonzero per slot in
    /// its block of `X_hat` and every other block is zero. An estimated
    /// amplitude of exactly zero is tolerated in place of the nonzero.
    pub fn check_structure(
        &self,
        active: &ActiveSet,
        maps: usize,
    ) -> Result<(), ReconstructionError> {
        for &d in active.as_slice() {
            if self.device(d).is_none() {
                return Err(ReconstructionError::Missing(d));
            }
        }
        let devices = self.x_hat.rows() / maps;
        for slot in 0..self.x_hat.cols() {
            let col = self.x_hat.column(slot);
            for device in 0..devices {
                let nonzeros = col[device * maps..(device + 1) * maps]
                    .iter()
                    .filter(|z| z.norm_sqr() > 0.0)
                    .count();
                let ok = if active.contains(device) {
                    nonzeros == 1 || (nonzeros == 0 && self.amplitude_is_zero(device, slot))
                } else {
                    nonzeros == 0
                };
                if !ok {
                    return Err(ReconstructionError::BlockCount {
                        device,
                        slot,
                        nonzeros,
                    });
                }
            }
        }
        Ok(())
    }

    fn amplitude_is_zero(&self, device: usize, slot: usize) -> bool {
        self.device(device)
            .map(|d| d.slots[slot].amplitude.norm_sqr() == 0.0)
            .unwrap_or(false)
    }
}

/// Index of the largest value; ties go to the first.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}
