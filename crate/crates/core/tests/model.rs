use mm_access::model::{generate_frame, SystemConfig};
use mm_access::numerics::frobenius_norm;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small() -> SystemConfig {
    SystemConfig {
        devices: 10,
        active: 3,
        rx_antennas: 50,
        slots: 12,
        snr_db: 3.0,
        ..SystemConfig::default()
    }
}

#[test]
fn noise_power_matches_snr() {
    let cfg = small();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let frames = 10_000;
    let mut acc = 0.0;
    for _ in 0..frames {
        let f = generate_frame(&cfg, &mut rng);
        acc += frobenius_norm(&f.noise).powi(2) / (cfg.rx_antennas * cfg.slots) as f64;
    }
    let est = acc / frames as f64;
    let want = cfg.noise_variance();
    assert!((est / want - 1.0).abs() < 0.02, "{est} vs {want}");
}

#[test]
fn channel_entries_have_unit_power() {
    let cfg = SystemConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut acc = 0.0;
    let mut n = 0usize;
    while n < 1_000_000 {
        let ch = mm_access::model::generate_channel(&cfg, &mut rng);
        acc += frobenius_norm(&ch.h).powi(2);
        n += ch.h.as_slice().len();
    }
    let mean = acc / n as f64;
    assert!((mean - 1.0).abs() < 0.02, "{mean}");
}

#[test]
fn frames_are_structured_and_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for (i, (mirrors, order, active)) in [(1u32, 4usize, 0usize), (2, 4, 8), (3, 16, 5), (2, 16, 1)]
        .into_iter()
        .enumerate()
    {
        let cfg = SystemConfig {
            devices: 30,
            active,
            mirrors,
            qam_order: order,
            rx_antennas: 20,
            slots: 5,
            snr_db: f64::INFINITY,
            ..SystemConfig::default()
        };
        for _ in 0..25 {
            let f = generate_frame(&cfg, &mut rng);
            f.truth.check_structure().unwrap();
            for j in 0..cfg.slots {
                let nnz = f
                    .truth
                    .x
                    .column(j)
                    .iter()
                    .filter(|z| z.norm_sqr() > 0.0)
                    .count();
                assert_eq!(nnz, active, "config {i} slot {j}");
            }
            let hx = f.channel.h.mul(&f.truth.x).unwrap();
            let r = f.observation.y.sub(&hx).unwrap();
            assert!(frobenius_norm(&r) <= 1e-10 * frobenius_norm(&hx).max(1.0));
        }
    }
}

#[test]
fn generation_is_deterministic() {
    let cfg = SystemConfig::default();
    let a = generate_frame(&cfg, &mut ChaCha8Rng::seed_from_u64(9));
    let b = generate_frame(&cfg, &mut ChaCha8Rng::seed_from_u64(9));
    assert_eq!(a.checksum(), b.checksum());
    assert_eq!(a.observation.y, b.observation.y);
}
