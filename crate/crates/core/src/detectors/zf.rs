use rand::Rng;

use crate::model::{
    complex_gaussian_matrix, demodulate_word, modulate_word, ConfigError, Constellation,
    SystemConfig,
};
use crate::numerics::{lstsq, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZfOutcome {
    pub bit_errors: u64,
    pub total_bits: u64,
}

impl ZfOutcome {
    pub fn ber(&self) -> f64 {
        if self.total_bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.total_bits as f64
        }
    }
}

/// Conventional massive-MIMO uplink with `K_a` known single-antenna users,
/// each sending a `2^eta`-QAM symbol per slot, detected by zero forcing.
///
/// Fails if `2^eta` is not a square QAM order.
pub fn zf_benchmark<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    rng: &mut R,
) -> Result<ZfOutcome, ConfigError> {
    let eta = cfg.bits_per_symbol();
    let constellation = Constellation::new(1 << eta).ok_or_else(|| {
        ConfigError::new(
            "Mr",
            format!("benchmark needs a square 2^{eta}-QAM; adjust Mr or M"),
        )
    })?;
    let users = cfg.active;
    let h = complex_gaussian_matrix(rng, cfg.rx_antennas, users, 1.0);
    let words: Vec<u32> = (0..users * cfg.slots)
        .map(|_| rng.random_range(0..1u32 << eta))
        .collect();
    let x = ComplexMatrix::from_fn(users, cfg.slots, |u, j| {
        modulate_word(words[j * users + u], &constellation).1
    });
    let noise = complex_gaussian_matrix(rng, cfg.rx_antennas, cfg.slots, cfg.noise_variance());
    let mut y = h.mul(&x).expect("conformant");
    for (d, w) in y.as_mut_slice().iter_mut().zip(noise.as_slice()) {
        *d += w;
    }

    let mut bit_errors = 0u64;
    if users > 0 {
        // Rank loss (users > N_r) falls back to counting every bit as lost.
        match lstsq(&h, &y) {
            Ok(x_hat) => {
                for j in 0..cfg.slots {
                    for u in 0..users {
                        let decoded = demodulate_word(0, x_hat[(u, j)], &constellation);
                        bit_errors += (decoded ^ words[j * users + u]).count_ones() as u64;
                    }
                }
            }
            Err(_) => bit_errors = (users * cfg.slots) as u64 * eta as u64,
        }
    }
    Ok(ZfOutcome {
        bit_errors,
        total_bits: (users * cfg.slots) as u64 * eta as u64,
    })
}
