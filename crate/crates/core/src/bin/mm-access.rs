use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use mm_access::harness::{
    self, emit_csv, emit_plot, metadata_line, parse_config, parse_values, run_sweep, write_csv,
    ExperimentConfig, Metric, SweepVariable,
};
use mm_access::metrics::ComplexityRow;

#[derive(Parser)]
#[command(
    name = "mm-access",
    version,
    about = "Media-modulation massive access simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep and write CSV (and optionally SVG) results.
    Sweep {
        /// key = value configuration file; default scenario when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Variable to sweep: snr, J or Nr.
        #[arg(long)]
        sweep: Option<SweepVariable>,
        /// Sweep values as a comma list or start:step:stop.
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Base SNR in dB (used when sweeping J or Nr).
        #[arg(long, allow_hyphen_values = true)]
        snr: Option<f64>,
        /// CSV output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// SVG path for the BER chart; the P_e chart goes next to it as `<stem>_pe.svg`.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Print analytical complex-multiplication counts for every detector.
    Complexity {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_config(&text).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

fn pe_plot_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy())
        .unwrap_or_default();
    let ext = path
        .extension()
        .map(|s| s.to_string_lossy())
        .unwrap_or("svg".into());
    path.with_file_name(format!("{stem}_pe.{ext}"))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep {
            config,
            sweep,
            values,
            seed,
            trials,
            snr,
            out,
            plot,
        } => {
            let mut cfg = load(config.as_deref())?;
            if let Some(v) = sweep {
                if cfg.sweep != Some(v) && values.is_none() {
                    cfg.values = None;
                }
                cfg.sweep = Some(v);
            }
            if let Some(v) = values {
                cfg.values = Some(parse_values(&v).map_err(|e| anyhow::anyhow!("--values: {e}"))?);
            }
            if let Some(s) = seed {
                cfg.system.seed = s;
            }
            if let Some(t) = trials {
                cfg.trials = Some(t);
            }
            if let Some(s) = snr {
                cfg.system.snr_db = s;
            }
            let spec = harness::sweep_spec(&cfg);
            let outcome = run_sweep(&spec)?;
            let meta = metadata_line(&spec);
            match &out {
                Some(path) => emit_csv(&outcome.rows, &meta, path)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => write_csv(&outcome.rows, &meta, std::io::stdout().lock())?,
            }
            if let Some(path) = plot {
                emit_plot(&outcome.rows, Metric::Ber, &path)
                    .with_context(|| format!("writing {}", path.display()))?;
                let pe_path = pe_plot_path(&path);
                emit_plot(&outcome.rows, Metric::Pe, &pe_path)
                    .with_context(|| format!("writing {}", pe_path.display()))?;
            }
            Ok(())
        }
        Command::Complexity { config } => {
            let cfg = load(config.as_deref())?.system;
            cfg.validate()?;
            println!(
                "# complex multiplications at J={} N_t={} K={} K_a={} N_r={}",
                cfg.slots,
                cfg.maps(),
                cfg.devices,
                cfg.active,
                cfg.rx_antennas
            );
            println!(
                "{:<14} {:>16} {:>10}",
                "algorithm", "multiplications", "x1e6"
            );
            for row in ComplexityRow::ALL {
                let v = row.evaluate(&cfg);
                println!("{:<14} {:>16.0} {:>10.3}", row.name(), v, v / 1e6);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
