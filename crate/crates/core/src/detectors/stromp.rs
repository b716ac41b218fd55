//! Structured orthogonal matching pursuit for active-device detection.
//!
//! Each iteration adds the device whose whole block of columns correlates
//! most with the residual over all slots, fits all candidate columns jointly,
//! keeps the strongest MAP per device and slot, and refits on that support.
//! The loop stops once the residual norm drops by less than the threshold;
//! the device tried in that last iteration is discarded.

use num_complex::Complex64;

use super::{argmax, ActiveSet};
use crate::model::ChannelMatrix;
use crate::numerics::{frobenius_norm, hermitian_mul, lstsq, lstsq_vec, ComplexMatrix};

/// Relative slack before a residual increase counts as a monotonicity violation.
pub const MONOTONE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Residual decrease fell below the threshold.
    Threshold,
    /// The requested number of devices was reached.
    Budget,
    /// The next candidate support would have more columns than antennas.
    Capacity,
    /// Every device is already in the active set.
    Exhausted,
    /// A least-squares step hit a rank-deficient support.
    Degenerate,
}

#[derive(Debug, Clone)]
pub struct StrompTrace {
    pub active: ActiveSet,
    /// `||R^(i)||_F` for `i = 0, 1, ...`, including the discarded final try.
    pub residual_norms: Vec<f64>,
    /// Committed iterations whose residual grew beyond [`MONOTONE_TOLERANCE`].
    pub monotonicity_violations: usize,
    pub stop: StopReason,
}

enum Rule {
    Threshold(f64),
    Count(usize),
}

/// Active set estimated with the residual-decrease threshold.
pub fn stromp(y: &ComplexMatrix, channel: &ChannelMatrix, threshold: f64) -> ActiveSet {
    stromp_trace(y, channel, threshold).active
}

pub fn stromp_trace(y: &ComplexMatrix, channel: &ChannelMatrix, threshold: f64) -> StrompTrace {
    run(y, channel, Rule::Threshold(threshold))
}

/// Genie-aided variant that runs exactly `active` iterations with no
/// threshold test. Devices already selected are excluded from the greedy
/// pick so the output has `active` distinct entries whenever the support fits.
pub fn stromp_known_ka(y: &ComplexMatrix, channel: &ChannelMatrix, active: usize) -> ActiveSet {
    stromp_known_ka_trace(y, channel, active).active
}

pub fn stromp_known_ka_trace(
    y: &ComplexMatrix,
    channel: &ChannelMatrix,
    active: usize,
) -> StrompTrace {
    run(y, channel, Rule::Count(active))
}

/// Residual of per-slot least squares on the strongest coarse MAP per device.
/// Returns `None` when any slot's support is degenerate.
fn fine_residual(
    y: &ComplexMatrix,
    channel: &ChannelMatrix,
    candidates: &[usize],
    coarse: &ComplexMatrix,
) -> Option<ComplexMatrix> {
    let maps = channel.maps;
    let mut residual = y.clone();
    let mut support = Vec::with_capacity(candidates.len());
    for j in 0..y.cols() {
        support.clear();
        let b = coarse.column(j);
        for (n, &device) in candidates.iter().enumerate() {
            let block = &b[n * maps..(n + 1) * maps];
            let u = argmax(block.iter().map(Complex64::norm_sqr)).expect("non-empty block");
            support.push(device * maps + u);
        }
        let sub = channel.h.gather_columns(&support);
        let coeff = lstsq_vec(&sub, y.column(j)).ok()?;
        let r = residual.column_mut(j);
        for (&c, &a) in support.iter().zip(&coeff) {
            crate::numerics::axpy(r, -a, channel.h.column(c));
        }
    }
    Some(residual)
}

fn run(y: &ComplexMatrix, channel: &ChannelMatrix, rule: Rule) -> StrompTrace {
    let maps = channel.maps;
    let devices = channel.devices();
    let rx = channel.rx_antennas();

    let mut committed = ActiveSet::new();
    let mut residual = y.clone();
    let mut norm = frobenius_norm(y);
    let mut norms = vec![norm];
    let mut violations = 0;

    let stop = loop {
        if let Rule::Count(n) = rule {
            if committed.len() >= n {
                break StopReason::Budget;
            }
        }
        if committed.len() == devices {
            break StopReason::Exhausted;
        }

        // Block correlation energy per device, summed over MAPs and slots.
        let corr = hermitian_mul(&channel.h, &residual).expect("H and R share N_r rows");
        let energy: Vec<f64> = (0..devices)
            .map(|k| {
                if matches!(rule, Rule::Count(_)) && committed.contains(k) {
                    return f64::NEG_INFINITY;
                }
                (0..corr.cols())
                    .map(|j| {
                        corr.column(j)[k * maps..(k + 1) * maps]
                            .iter()
                            .map(Complex64::norm_sqr)
                            .sum::<f64>()
                    })
                    .sum()
            })
            .collect();
        let pick = argmax(energy).expect("at least one device");

        let mut candidates = committed.as_slice().to_vec();
        if !committed.contains(pick) {
            candidates.push(pick);
        }
        if candidates.len() * maps > rx {
            break StopReason::Capacity;
        }

        let columns: Vec<usize> = candidates.iter().flat_map(|&d| channel.block(d)).collect();
        let coarse = match lstsq(&channel.h.gather_columns(&columns), y) {
            Ok(b) => b,
            Err(_) => break StopReason::Degenerate,
        };
        let Some(next) = fine_residual(y, channel, &candidates, &coarse) else {
            break StopReason::Degenerate;
        };
        let next_norm = frobenius_norm(&next);
        norms.push(next_norm);

        if let Rule::Threshold(th) = rule {
            if norm - next_norm < th {
                break StopReason::Threshold;
            }
        }
        if next_norm > norm * (1.0 + MONOTONE_TOLERANCE) {
            violations += 1;
        }
        if !committed.contains(pick) {
            committed.push(pick);
        }
        residual = next;
        norm = next_norm;
    };

    StrompTrace {
        active: committed,
        residual_norms: norms,
        monotonicity_violations: violations,
        stop,
    }
}
