//! Experiment configuration, Monte Carlo sweeps and result output.

pub mod config_file;
pub mod plot;
pub mod results_csv;
pub mod sweep;

pub use config_file::{parse_config, parse_values, ExperimentConfig, ParseError};
pub use plot::{emit_plot, render_svg, Metric, PlotError};
pub use results_csv::{
    emit_csv, mask_wall_time, metadata_line, parse_results_csv, write_csv, ParsedResults,
    ResultsCsvError,
};
pub use sweep::{
    run_point, run_sweep, run_trial, trial_seed, DetectorKind, ResultRow, SweepOutcome, SweepSpec,
    SweepVariable, TrialOutcome,
};

/// Default Monte Carlo trials per sweep point.
pub const DEFAULT_TRIALS: usize = 1000;

/// Builds a sweep from a parsed file, filling unset fields with defaults:
/// an SNR sweep over its standard grid, every pipeline, [`DEFAULT_TRIALS`].
pub fn sweep_spec(cfg: &ExperimentConfig) -> SweepSpec {
    let variable = cfg.sweep.unwrap_or(SweepVariable::Snr);
    SweepSpec {
        variable,
        values: cfg
            .values
            .clone()
            .unwrap_or_else(|| variable.default_values()),
        trials: cfg.trials.unwrap_or(DEFAULT_TRIALS),
        detectors: cfg
            .detectors
            .clone()
            .unwrap_or_else(|| DetectorKind::ALL.to_vec()),
        base: cfg.system.clone(),
    }
}
