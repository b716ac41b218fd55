//! Seeded Monte Carlo sweeps.
//!
//! Every trial draws one frame from its own stream and feeds the same frame
//! to all requested pipelines. Trials run in parallel but are merged in
//! trial-index order, so results do not depend on scheduling.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::detectors::{
    gsp, oracle_ls, sic_ssp, stromp_known_ka_trace, stromp_trace, zf_benchmark, ActiveSet,
};
use crate::metrics::{aud_metrics, ber_metrics, AudCounts, ComplexityRow, MetricsRecord};
use crate::model::{generate_frame, ConfigError, Constellation, SystemConfig};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "MM_ACCESS_THREADS";

const ZF_STREAM: u64 = 0x5a46_5f42_454e_4348;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    Snr,
    Slots,
    Antennas,
}

impl SweepVariable {
    /// Column label used in CSV output and plot axes.
    pub fn label(self) -> &'static str {
        match self {
            SweepVariable::Snr => "snr_db",
            SweepVariable::Slots => "J",
            SweepVariable::Antennas => "N_r",
        }
    }

    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepVariable::Snr => (0..12).map(|i| -10.0 + 2.0 * i as f64).collect(),
            SweepVariable::Slots => (1..=8).map(|i| 2.0 * i as f64).collect(),
            SweepVariable::Antennas => (1..=10).map(|i| 10.0 * i as f64).collect(),
        }
    }

    /// `base` with this variable set to `value`.
    pub fn apply(self, base: &SystemConfig, value: f64) -> Result<SystemConfig, ConfigError> {
        let mut cfg = base.clone();
        let as_count = |field: &'static str| {
            if value.fract() == 0.0 && value >= 1.0 && value <= u32::MAX as f64 {
                Ok(value as usize)
            } else {
                Err(ConfigError::new(
                    field,
                    format!("sweep value {value} is not a positive integer"),
                ))
            }
        };
        match self {
            SweepVariable::Snr => cfg.snr_db = value,
            SweepVariable::Slots => cfg.slots = as_count("J")?,
            SweepVariable::Antennas => cfg.rx_antennas = as_count("Nr")?,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "snr" | "snr_db" | "SNR" => Ok(SweepVariable::Snr),
            "J" | "j" => Ok(SweepVariable::Slots),
            "Nr" | "N_r" | "nr" => Ok(SweepVariable::Antennas),
            other => Err(format!(
                "unknown sweep variable `{other}` (expected snr, J or Nr)"
            )),
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Detection pipelines compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectorKind {
    /// StrOMP activity detection followed by SIC-SSP.
    StrompSicSsp,
    /// StrOMP activity detection followed by GSP.
    StrompGsp,
    /// StrOMP with known `K_a`, followed by SIC-SSP.
    AudLowerBound,
    /// Least squares on the true supports.
    OracleLs,
    /// Zero forcing for conventional single-antenna users.
    ZfBenchmark,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 5] = [
        DetectorKind::StrompSicSsp,
        DetectorKind::StrompGsp,
        DetectorKind::AudLowerBound,
        DetectorKind::OracleLs,
        DetectorKind::ZfBenchmark,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::StrompSicSsp => "stromp+sic_ssp",
            DetectorKind::StrompGsp => "stromp+gsp",
            DetectorKind::AudLowerBound => "aud_lb",
            DetectorKind::OracleLs => "oracle_ls",
            DetectorKind::ZfBenchmark => "zf_benchmark",
        }
    }

    /// Analytical multiplication count of the whole pipeline.
    pub fn mult_estimate(self, cfg: &SystemConfig) -> f64 {
        let rows: &[ComplexityRow] = match self {
            DetectorKind::StrompSicSsp => &[ComplexityRow::Stromp, ComplexityRow::SicSsp],
            DetectorKind::StrompGsp => &[ComplexityRow::Stromp, ComplexityRow::Gsp],
            DetectorKind::AudLowerBound => &[ComplexityRow::AudLowerBound, ComplexityRow::SicSsp],
            DetectorKind::OracleLs | DetectorKind::ZfBenchmark => &[ComplexityRow::LeastSquares],
        };
        rows.iter().map(|r| r.evaluate(cfg)).sum()
    }
}

impl FromStr for DetectorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DetectorKind::ALL
            .into_iter()
            .find(|d| d.name() == s.trim())
            .ok_or_else(|| format!("unknown detector `{}`", s.trim()))
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub trials: usize,
    pub detectors: Vec<DetectorKind>,
    pub base: SystemConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.base.validate()?;
        if self.values.is_empty() {
            return Err(ConfigError::new(
                "values",
                "at least one sweep value is required",
            ));
        }
        if self.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::new("values", "must be strictly increasing"));
        }
        if self.trials == 0 {
            return Err(ConfigError::new("trials", "must be at least 1"));
        }
        if self.detectors.is_empty() {
            return Err(ConfigError::new(
                "detectors",
                "at least one detector is required",
            ));
        }
        for &v in &self.values {
            self.variable.apply(&self.base, v)?;
        }
        if self.detectors.contains(&DetectorKind::ZfBenchmark)
            && Constellation::new(1 << self.base.bits_per_symbol()).is_none()
        {
            return Err(ConfigError::new(
                "detectors",
                "zf_benchmark needs Mr + log2 M to be even",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep_var: String,
    pub value: f64,
    pub detector: String,
    pub pe_mean: f64,
    /// 95% normal-approximation half-width.
    pub pe_ci: f64,
    pub ber_mean: f64,
    pub ber_ci: f64,
    pub trials: usize,
    pub wall_ms_mean: f64,
    pub mult_estimate: f64,
}

/// Everything one trial produced. `records` is aligned with the requested
/// detector list.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub frame_checksum: u64,
    pub records: Vec<MetricsRecord>,
    /// Residual-growth events in committed iterations of the thresholded
    /// activity detector.
    pub monotonicity_violations: usize,
    /// The same count for the known-`K_a` variant, which has no threshold
    /// guarding each commit.
    pub lower_bound_monotonicity_violations: usize,
    /// Reconstructions failing the one-entry-per-block check.
    pub structure_failures: usize,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<ResultRow>,
    pub monotonicity_violations: usize,
    pub lower_bound_monotonicity_violations: usize,
    pub structure_failures: usize,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable per-trial seed derived from the master seed and trial coordinates.
pub fn trial_seed(master: u64, point: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ point as u64) ^ trial as u64)
}

/// Runs one paired trial of every requested pipeline.
pub fn run_trial(cfg: &SystemConfig, seed: u64, detectors: &[DetectorKind]) -> TrialOutcome {
    let constellation = Constellation::new(cfg.qam_order).expect("validated QAM order");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame = generate_frame(cfg, &mut rng);
    let y = &frame.observation.y;
    let ch = &frame.channel;
    let qam_bits = cfg.qam_bits();
    let mut violations = 0;
    let mut lb_violations = 0;
    let mut structure_failures = 0;

    let needs_stromp = detectors
        .iter()
        .any(|d| matches!(d, DetectorKind::StrompSicSsp | DetectorKind::StrompGsp));
    let stromp_run = needs_stromp.then(|| {
        let t = Instant::now();
        let trace = stromp_trace(y, ch, cfg.threshold);
        (trace, t.elapsed().as_secs_f64())
    });
    if let Some((trace, _)) = &stromp_run {
        violations += trace.monotonicity_violations;
    }

    let records = detectors
        .iter()
        .map(|&kind| {
            let start = Instant::now();
            let (active, rec, extra) = match kind {
                DetectorKind::StrompSicSsp | DetectorKind::StrompGsp => {
                    let (trace, secs) = stromp_run.as_ref().expect("computed above");
                    let rec = if kind == DetectorKind::StrompSicSsp {
                        sic_ssp(y, ch, &trace.active, &constellation)
                    } else {
                        gsp(y, ch, &trace.active, &constellation)
                    };
                    (trace.active.clone(), Some(rec), *secs)
                }
                DetectorKind::AudLowerBound => {
                    let trace = stromp_known_ka_trace(y, ch, cfg.active);
                    lb_violations += trace.monotonicity_violations;
                    let rec = sic_ssp(y, ch, &trace.active, &constellation);
                    (trace.active, Some(rec), 0.0)
                }
                DetectorKind::OracleLs => {
                    let active = ActiveSet::from_devices(frame.truth.active.clone(), cfg.devices)
                        .expect("ground truth is a valid set");
                    let rec = oracle_ls(y, ch, &frame.truth, &constellation);
                    (active, Some(rec), 0.0)
                }
                DetectorKind::ZfBenchmark => {
                    let mut zf_rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ ZF_STREAM));
                    let out = zf_benchmark(cfg, &mut zf_rng).expect("validated throughput");
                    let record = MetricsRecord {
                        aud: AudCounts {
                            missed: 0,
                            false_alarms: 0,
                            devices: cfg.devices as u64,
                        },
                        bits: crate::metrics::BerCounts {
                            missed: 0,
                            map_bit_errors: 0,
                            qam_bit_errors: out.bit_errors,
                            slots: cfg.slots as u64,
                            bits_per_symbol: cfg.bits_per_symbol() as u64,
                            total_bits: out.total_bits,
                        },
                        wall_seconds: start.elapsed().as_secs_f64(),
                        mult_estimate: kind.mult_estimate(cfg),
                    };
                    return record;
                }
            };
            let rec = rec.expect("data pipelines produce a reconstruction");
            if rec.check_structure(&active, cfg.maps()).is_err() {
                structure_failures += 1;
            }
            MetricsRecord {
                aud: aud_metrics(&frame.truth.activity, &active),
                bits: ber_metrics(&frame.truth, &active, &rec, qam_bits),
                wall_seconds: start.elapsed().as_secs_f64() + extra,
                mult_estimate: kind.mult_estimate(cfg),
            }
        })
        .collect();

    TrialOutcome {
        frame_checksum: frame.checksum(),
        records,
        monotonicity_violations: violations,
        lower_bound_monotonicity_violations: lb_violations,
        structure_failures,
    }
}

/// Mean and 95% normal-approximation half-width, summed in index order.
pub fn mean_ci(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * (var / n as f64).sqrt())
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs all trials of one sweep point, in trial order.
pub fn run_point(spec: &SweepSpec, point: usize) -> Result<Vec<TrialOutcome>, ConfigError> {
    let cfg = spec.variable.apply(&spec.base, spec.values[point])?;
    Ok((0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(&cfg, trial_seed(spec.base.seed, point, t), &spec.detectors))
        .collect())
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome, ConfigError> {
    spec.validate()?;
    let work = || -> Result<SweepOutcome, ConfigError> {
        let mut rows = Vec::with_capacity(spec.values.len() * spec.detectors.len());
        let mut monotonicity_violations = 0;
        let mut lower_bound_monotonicity_violations = 0;
        let mut structure_failures = 0;
        for (point, &value) in spec.values.iter().enumerate() {
            let cfg = spec.variable.apply(&spec.base, value)?;
            let trials = run_point(spec, point)?;
            for t in &trials {
                log::trace!("point {point} checksum {:016x}", t.frame_checksum);
                monotonicity_violations += t.monotonicity_violations;
                lower_bound_monotonicity_violations += t.lower_bound_monotonicity_violations;
                structure_failures += t.structure_failures;
            }
            for (d, &kind) in spec.detectors.iter().enumerate() {
                let pe: Vec<f64> = trials.iter().map(|t| t.records[d].pe()).collect();
                let ber: Vec<f64> = trials.iter().map(|t| t.records[d].ber()).collect();
                let wall: Vec<f64> = trials
                    .iter()
                    .map(|t| t.records[d].wall_seconds * 1e3)
                    .collect();
                let (pe_mean, pe_ci) = mean_ci(&pe);
                let (ber_mean, ber_ci) = mean_ci(&ber);
                rows.push(ResultRow {
                    sweep_var: spec.variable.label().to_string(),
                    value,
                    detector: kind.name().to_string(),
                    pe_mean,
                    pe_ci,
                    ber_mean,
                    ber_ci,
                    trials: spec.trials,
                    wall_ms_mean: mean_ci(&wall).0,
                    mult_estimate: kind.mult_estimate(&cfg),
                });
            }
            log::info!("{} = {value}: {} trials done", spec.variable, spec.trials);
        }
        if monotonicity_violations > 0 {
            log::warn!("{monotonicity_violations} residual monotonicity violations");
        }
        if lower_bound_monotonicity_violations > 0 {
            log::info!(
                "{lower_bound_monotonicity_violations} residual increases in the known-K_a detector"
            );
        }
        if structure_failures > 0 {
            log::warn!("{structure_failures} reconstructions failed the structure check");
        }
        Ok(SweepOutcome {
            rows,
            monotonicity_violations,
            lower_bound_monotonicity_violations,
            structure_failures,
        })
    };
    match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ConfigError::new(THREADS_ENV, e.to_string()))?
            .install(work),
        None => work(),
    }
}
