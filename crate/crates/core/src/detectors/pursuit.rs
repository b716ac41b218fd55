//! Per-slot structured subspace pursuit and its successive interference
//! cancellation wrapper.
//!
//! The inner loop keeps exactly one column per device: correlate the residual
//! with each remaining device block, take the best MAP per device, merge with
//! the previous support, refit, prune back to one MAP per device and refit
//! again. It ends after `K_hat` iterations or when the pruned support repeats.
//!
//! [`sic_ssp`] runs the inner loop, commits only the strongest device,
//! subtracts its contribution and repeats on the remaining devices.
//! [`gsp`] runs the inner loop once and commits every device.

use num_complex::Complex64;

use super::{argmax, ActiveSet, Reconstruction};
use crate::model::{ChannelMatrix, Constellation};
use crate::numerics::{axpy, dot_conj, lstsq_vec, norm_sqr, ComplexMatrix};

/// Outcome of one inner loop: `support[n]` and `amplitude[n]` belong to
/// `devices[n]`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PursuitEstimate {
    pub support: Vec<usize>,
    pub amplitude: Vec<Complex64>,
    /// Set when a least-squares step failed and an earlier estimate was used.
    pub degraded: bool,
}

/// Best MAP per device by correlation magnitude, with the single-column
/// projection `h^H r / ||h||^2` as amplitude.
fn matched_filter(channel: &ChannelMatrix, r: &[Complex64], devices: &[usize]) -> PursuitEstimate {
    let mut support = Vec::with_capacity(devices.len());
    let mut amplitude = Vec::with_capacity(devices.len());
    for &d in devices {
        let corr: Vec<Complex64> = channel
            .block(d)
            .map(|c| dot_conj(channel.h.column(c), r))
            .collect();
        let u = argmax(corr.iter().map(Complex64::norm_sqr)).expect("non-empty block");
        let col = d * channel.maps + u;
        let energy = norm_sqr(channel.h.column(col));
        support.push(col);
        amplitude.push(if energy > 0.0 {
            corr[u] / energy
        } else {
            Complex64::new(0.0, 0.0)
        });
    }
    PursuitEstimate {
        support,
        amplitude,
        degraded: true,
    }
}

pub(crate) fn structured_pursuit(
    channel: &ChannelMatrix,
    r0: &[Complex64],
    devices: &[usize],
    sparsity: usize,
) -> PursuitEstimate {
    let maps = channel.maps;
    let mut previous: Vec<usize> = Vec::new();
    let mut last: Option<PursuitEstimate> = None;
    let mut r = r0.to_vec();
    let mut i = 1;

    loop {
        // Best MAP per remaining device against the current residual.
        let omega: Vec<usize> = devices
            .iter()
            .map(|&d| {
                let u = argmax(
                    channel
                        .block(d)
                        .map(|c| dot_conj(channel.h.column(c), &r).norm_sqr()),
                )
                .expect("non-empty block");
                d * maps + u
            })
            .collect();
        let mut merged = omega.clone();
        for &c in &previous {
            if !merged.contains(&c) {
                merged.push(c);
            }
        }

        let fallback = |last: Option<PursuitEstimate>| {
            let mut est = last.unwrap_or_else(|| matched_filter(channel, r0, devices));
            est.degraded = true;
            est
        };

        let Ok(coarse) = lstsq_vec(&channel.h.gather_columns(&merged), r0) else {
            return fallback(last);
        };
        // Prune to the strongest merged column within each device block.
        let pruned: Vec<usize> = devices
            .iter()
            .map(|&d| {
                let block = channel.block(d);
                let mut best: Option<(usize, f64)> = None;
                for u in 0..maps {
                    let col = block.start + u;
                    if let Some(p) = merged.iter().position(|&c| c == col) {
                        let e = coarse[p].norm_sqr();
                        if best.is_none_or(|(_, b)| e > b) {
                            best = Some((col, e));
                        }
                    }
                }
                best.expect("every device has a merged column").0
            })
            .collect();

        let Ok(fine) = lstsq_vec(&channel.h.gather_columns(&pruned), r0) else {
            return fallback(last);
        };
        r.copy_from_slice(r0);
        for (&c, &a) in pruned.iter().zip(&fine) {
            axpy(&mut r, -a, channel.h.column(c));
        }

        let stable = pruned == previous;
        let est = PursuitEstimate {
            support: pruned,
            amplitude: fine,
            degraded: false,
        };
        if i >= sparsity || stable {
            return est;
        }
        previous = est.support.clone();
        last = Some(est);
        i += 1;
    }
}

fn check_dims(y: &ComplexMatrix, channel: &ChannelMatrix) {
    assert_eq!(
        y.rows(),
        channel.rx_antennas(),
        "observation and channel disagree on N_r"
    );
}

/// Successive-interference-cancellation structured subspace pursuit.
///
/// An empty active set yields an all-zero reconstruction.
pub fn sic_ssp(
    y: &ComplexMatrix,
    channel: &ChannelMatrix,
    active: &ActiveSet,
    constellation: &Constellation,
) -> Reconstruction {
    check_dims(y, channel);
    if active.is_empty() {
        return Reconstruction::empty(channel.h.cols(), y.cols());
    }
    let order = active.as_slice();
    let k_hat = order.len();
    let per_slot: Vec<Vec<(usize, Complex64)>> = (0..y.cols())
        .map(|j| {
            let mut slot = vec![(0usize, Complex64::new(0.0, 0.0)); k_hat];
            let mut v = y.column(j).to_vec();
            // Positions into `order` still to be decoded.
            let mut remaining: Vec<usize> = (0..k_hat).collect();
            while !remaining.is_empty() {
                let devices: Vec<usize> = remaining.iter().map(|&p| order[p]).collect();
                let est = structured_pursuit(channel, &v, &devices, k_hat);
                let n = argmax(est.amplitude.iter().map(Complex64::norm_sqr)).expect("non-empty");
                let (col, amp) = (est.support[n], est.amplitude[n]);
                axpy(&mut v, -amp, channel.h.column(col));
                slot[remaining[n]] = (col, amp);
                remaining.remove(n);
            }
            slot
        })
        .collect();
    Reconstruction::assemble(channel, order, &per_slot, constellation)
}

/// Group subspace pursuit: the same inner loop without cancellation.
pub fn gsp(
    y: &ComplexMatrix,
    channel: &ChannelMatrix,
    active: &ActiveSet,
    constellation: &Constellation,
) -> Reconstruction {
    check_dims(y, channel);
    if active.is_empty() {
        return Reconstruction::empty(channel.h.cols(), y.cols());
    }
    let order = active.as_slice();
    let per_slot: Vec<Vec<(usize, Complex64)>> = (0..y.cols())
        .map(|j| {
            let est = structured_pursuit(channel, y.column(j), order, order.len());
            est.support.into_iter().zip(est.amplitude).collect()
        })
        .collect();
    Reconstruction::assemble(channel, order, &per_slot, constellation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_frame, SystemConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn truth_set(f: &crate::model::Frame) -> ActiveSet {
        ActiveSet::from_devices(f.truth.active.clone(), f.truth.devices()).unwrap()
    }

    #[test]
    fn single_device_noiseless_is_exact() {
        let cfg = SystemConfig {
            devices: 6,
            active: 1,
            rx_antennas: 12,
            slots: 3,
            snr_db: f64::INFINITY,
            ..SystemConfig::default()
        };
        let qpsk = Constellation::new(4).unwrap();
        for seed in 0..20 {
            let f = generate_frame(&cfg, &mut ChaCha8Rng::seed_from_u64(seed));
            let gamma = truth_set(&f);
            let rec = sic_ssp(&f.observation.y, &f.channel, &gamma, &qpsk);
            let g = gsp(&f.observation.y, &f.channel, &gamma, &qpsk);
            assert_eq!(rec, g);
            let dev = &rec.devices[0];
            for j in 0..cfg.slots {
                assert_eq!(dev.slots[j].column, f.truth.support(0, j));
                assert!((dev.slots[j].amplitude - f.truth.symbols[0][j].symbol).norm() < 1e-12);
                assert_eq!(dev.words[j], f.truth.symbols[0][j].word);
            }
            // Final residual is zero.
            let r = f
                .observation
                .y
                .sub(&f.channel.h.mul(&rec.x_hat).unwrap())
                .unwrap();
            assert!(crate::numerics::frobenius_norm(&r) < 1e-10);
        }
    }

    #[test]
    fn empty_active_set_gives_zero_reconstruction() {
        let cfg = SystemConfig::default();
        let f = generate_frame(&cfg, &mut ChaCha8Rng::seed_from_u64(1));
        let qpsk = Constellation::new(4).unwrap();
        let rec = sic_ssp(&f.observation.y, &f.channel, &ActiveSet::new(), &qpsk);
        assert!(rec.devices.is_empty());
        assert!(rec.x_hat.as_slice().iter().all(|z| z.norm_sqr() == 0.0));
    }

    #[test]
    fn reconstruction_has_one_entry_per_block() {
        let cfg = SystemConfig {
            snr_db: 0.0,
            ..SystemConfig::default()
        };
        let qpsk = Constellation::new(4).unwrap();
        for seed in 0..5 {
            let f = generate_frame(&cfg, &mut ChaCha8Rng::seed_from_u64(seed));
            let gamma = truth_set(&f);
            for rec in [
                sic_ssp(&f.observation.y, &f.channel, &gamma, &qpsk),
                gsp(&f.observation.y, &f.channel, &gamma, &qpsk),
            ] {
                rec.check_structure(&gamma, cfg.maps()).unwrap();
            }
        }
    }

    #[test]
    fn underdetermined_support_falls_back() {
        // Two devices with four MAPs each on three antennas: the merged
        // support cannot be fitted, so the matched-filter estimate is used.
        let cfg = SystemConfig {
            devices: 4,
            active: 2,
            rx_antennas: 3,
            slots: 2,
            snr_db: 10.0,
            ..SystemConfig::default()
        };
        let qpsk = Constellation::new(4).unwrap();
        let f = generate_frame(&cfg, &mut ChaCha8Rng::seed_from_u64(4));
        let gamma = truth_set(&f);
        let rec = sic_ssp(&f.observation.y, &f.channel, &gamma, &qpsk);
        rec.check_structure(&gamma, cfg.maps()).unwrap();
        let est = structured_pursuit(&f.channel, f.observation.y.column(0), gamma.as_slice(), 2);
        assert_eq!(est.support.len(), 2);
    }
}
