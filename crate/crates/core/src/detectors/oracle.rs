use num_complex::Complex64;

use super::Reconstruction;
use crate::model::{ChannelMatrix, Constellation, GroundTruth};
use crate::numerics::{dot_conj, lstsq_vec, norm_sqr, ComplexMatrix};

/// Least squares on the true per-slot supports of the true active devices.
///
/// MAP indices are taken from the ground truth, so only the QAM bits can be
/// in error. This is the bit-error-rate lower bound of the scheme.
pub fn oracle_ls(
    y: &ComplexMatrix,
    channel: &ChannelMatrix,
    truth: &GroundTruth,
    constellation: &Constellation,
) -> Reconstruction {
    let per_slot: Vec<Vec<(usize, Complex64)>> = (0..y.cols())
        .map(|j| {
            let support: Vec<usize> = (0..truth.active.len())
                .map(|n| truth.support(n, j))
                .collect();
            let yj = y.column(j);
            let amps = lstsq_vec(&channel.h.gather_columns(&support), yj).unwrap_or_else(|_| {
                // More active devices than antennas: per-column projection.
                support
                    .iter()
                    .map(|&c| {
                        let h = channel.h.column(c);
                        dot_conj(h, yj) / norm_sqr(h)
                    })
                    .collect()
            });
            support.into_iter().zip(amps).collect()
        })
        .collect();
    Reconstruction::assemble(channel, &truth.active, &per_slot, constellation)
}
