mod common;

use common::{brute_force_ml, sent_words, to_na};
use mm_access::detectors::{
    gsp, oracle_ls, sic_ssp, stromp, stromp_known_ka, zf_benchmark, ActiveSet, Reconstruction,
};
use mm_access::harness::{run_sweep, DetectorKind, SweepSpec, SweepVariable};
use mm_access::metrics::{aud_metrics, ber_metrics};
use mm_access::model::{
    complex_gaussian_matrix, generate_frame, Constellation, Frame, SystemConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scenario(snr_db: f64) -> SystemConfig {
    SystemConfig {
        snr_db,
        ..SystemConfig::default()
    }
}

fn tiny() -> SystemConfig {
    SystemConfig {
        devices: 4,
        active: 2,
        mirrors: 1,
        qam_order: 4,
        rx_antennas: 16,
        slots: 1,
        snr_db: f64::INFINITY,
        ..SystemConfig::default()
    }
}

fn true_set(f: &Frame) -> ActiveSet {
    ActiveSet::from_devices(f.truth.active.clone(), f.truth.devices()).unwrap()
}

fn words(rec: &Reconstruction, devices: &[usize]) -> Vec<Vec<u32>> {
    devices
        .iter()
        .map(|&d| rec.device(d).map(|e| e.words.clone()).unwrap_or_default())
        .collect()
}

#[test]
fn tiny_instance_matches_brute_force_ml() {
    let cfg = tiny();
    let c = Constellation::new(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..50 {
        let f = generate_frame(&cfg, &mut rng);
        let gamma = true_set(&f);
        let ml = brute_force_ml(
            f.observation.y.column(0),
            &f.channel,
            &f.truth.active,
            cfg.bits_per_symbol(),
            &c,
        );
        assert_eq!(ml, sent_words(&f.truth, 0));
        for rec in [
            sic_ssp(&f.observation.y, &f.channel, &gamma, &c),
            gsp(&f.observation.y, &f.channel, &gamma, &c),
        ] {
            let got: Vec<u32> = words(&rec, &f.truth.active)
                .into_iter()
                .map(|w| w[0])
                .collect();
            assert_eq!(got, ml);
        }
    }
}

#[test]
fn noiseless_detectors_agree() {
    let cfg = SystemConfig {
        rx_antennas: 64,
        snr_db: f64::INFINITY,
        ..SystemConfig::default()
    };
    let c = Constellation::new(cfg.qam_order).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let trials = 200;
    let mut agree = 0;
    for _ in 0..trials {
        let f = generate_frame(&cfg, &mut rng);
        let gamma = true_set(&f);
        let y = &f.observation.y;
        let a = words(&sic_ssp(y, &f.channel, &gamma, &c), &f.truth.active);
        let b = words(&gsp(y, &f.channel, &gamma, &c), &f.truth.active);
        let o = words(&oracle_ls(y, &f.channel, &f.truth, &c), &f.truth.active);
        if a == b && b == o {
            agree += 1;
        }
    }
    assert!(agree * 100 >= trials * 99, "{agree}/{trials}");
}

#[test]
fn stromp_finds_true_set_at_high_snr() {
    let cfg = scenario(12.0);
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let trials = 200;
    let mut hits = 0;
    for _ in 0..trials {
        let f = generate_frame(&cfg, &mut rng);
        if stromp(&f.observation.y, &f.channel, cfg.threshold).sorted() == f.truth.active {
            hits += 1;
        }
    }
    assert!(hits * 100 >= trials * 99, "{hits}/{trials}");
}

#[test]
fn known_ka_errs_no_more_than_thresholded() {
    let cfg = scenario(2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let (mut pe_lb, mut pe) = (0.0, 0.0);
    for _ in 0..1000 {
        let f = generate_frame(&cfg, &mut rng);
        let y = &f.observation.y;
        pe_lb += aud_metrics(
            &f.truth.activity,
            &stromp_known_ka(y, &f.channel, cfg.active),
        )
        .pe();
        pe += aud_metrics(&f.truth.activity, &stromp(y, &f.channel, cfg.threshold)).pe();
    }
    assert!(pe_lb <= pe, "{pe_lb} > {pe}");
}

fn true_support_ber(cfg: &SystemConfig, seed: u64, trials: usize) -> (f64, f64) {
    let c = Constellation::new(cfg.qam_order).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sic, mut grp) = (0.0, 0.0);
    for _ in 0..trials {
        let f = generate_frame(cfg, &mut rng);
        let gamma = true_set(&f);
        let y = &f.observation.y;
        let bits = cfg.qam_bits();
        sic += ber_metrics(&f.truth, &gamma, &sic_ssp(y, &f.channel, &gamma, &c), bits).ber();
        grp += ber_metrics(&f.truth, &gamma, &gsp(y, &f.channel, &gamma, &c), bits).ber();
    }
    (sic / trials as f64, grp / trials as f64)
}

#[test]
fn sic_ssp_beats_gsp_with_true_set() {
    for (snr, seed) in [(4.0, 35), (8.0, 36)] {
        let (sic, grp) = true_support_ber(&scenario(snr), seed, 1000);
        assert!(sic <= grp, "snr {snr}: {sic} > {grp}");
    }
}

#[test]
fn oracle_is_the_lowest_ber_at_every_snr() {
    let spec = SweepSpec {
        variable: SweepVariable::Snr,
        values: vec![-10.0, -6.0, -2.0, 2.0],
        trials: 1000,
        detectors: DetectorKind::ALL.to_vec(),
        base: SystemConfig {
            seed: 37,
            ..SystemConfig::default()
        },
    };
    let out = run_sweep(&spec).unwrap();
    for chunk in out.rows.chunks(spec.detectors.len()) {
        let oracle = chunk.iter().find(|r| r.detector == "oracle_ls").unwrap();
        for r in chunk {
            assert!(
                oracle.ber_mean <= r.ber_mean,
                "{} at {}: {r:?}",
                oracle.ber_mean,
                r.value
            );
        }
    }
}

#[test]
fn oracle_error_covariance_matches_ls_theory() {
    let cfg = scenario(0.0);
    let c = Constellation::new(cfg.qam_order).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(38);
    let f = generate_frame(&cfg, &mut rng);
    let hx = f.channel.h.mul(&f.truth.x).unwrap();
    let sigma2 = cfg.noise_variance();
    let ka = f.truth.active.len();
    let draws = 4000;
    let mut acc = vec![vec![0.0; cfg.slots]; ka];
    for _ in 0..draws {
        let w = complex_gaussian_matrix(&mut rng, cfg.rx_antennas, cfg.slots, sigma2);
        let mut y = hx.clone();
        for (yi, wi) in y.as_mut_slice().iter_mut().zip(w.as_slice()) {
            *yi += wi;
        }
        let rec = oracle_ls(&y, &f.channel, &f.truth, &c);
        for (n, &d) in f.truth.active.iter().enumerate() {
            let est = rec.device(d).unwrap();
            for ((a, e), s) in acc[n].iter_mut().zip(&est.slots).zip(&f.truth.symbols[n]) {
                *a += (e.amplitude - s.symbol).norm_sqr();
            }
        }
    }
    for j in 0..cfg.slots {
        let cols: Vec<usize> = (0..ka).map(|n| f.truth.support(n, j)).collect();
        let h = to_na(&f.channel.h.gather_columns(&cols));
        let cov = (h.adjoint() * &h).try_inverse().unwrap();
        for (n, per_slot) in acc.iter().enumerate() {
            let want = sigma2 * cov[(n, n)].re;
            let got = per_slot[j] / draws as f64;
            assert!(
                (got / want - 1.0).abs() < 0.1,
                "device {n} slot {j}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn zf_ber_falls_with_snr() {
    let mut prev = f64::INFINITY;
    for snr in (-10..=12).step_by(2) {
        let cfg = scenario(snr as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(39);
        let mut ber = 0.0;
        for _ in 0..1000 {
            ber += zf_benchmark(&cfg, &mut rng).unwrap().ber();
        }
        assert!(ber <= prev, "snr {snr}: {ber} > {prev}");
        prev = ber;
    }
}
