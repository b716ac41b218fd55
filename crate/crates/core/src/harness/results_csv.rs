//! Result CSV files.
//!
//! Layout: one `#` metadata line, the header row, then one row per
//! (sweep value, detector). Reals are written with six significant digits.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use super::sweep::{ResultRow, SweepSpec};

pub const HEADER: [&str; 10] = [
    "sweep_var",
    "value",
    "detector",
    "pe_mean",
    "pe_ci",
    "ber_mean",
    "ber_ci",
    "trials",
    "wall_ms_mean",
    "mult_estimate",
];

/// Index of the wall-time column, which is excluded from determinism checks.
pub const WALL_TIME_COLUMN: usize = 8;

#[derive(Debug, Error)]
pub enum ResultsCsvError {
    #[error("no result rows to write")]
    Empty,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("missing `#` metadata line")]
    MissingMetadata,
    #[error("header does not match the expected columns")]
    BadHeader,
    #[error("row {row}: column `{column}`: cannot parse `{value}`")]
    BadField {
        row: usize,
        column: &'static str,
        value: String,
    },
}

/// Rounds to six significant digits.
pub fn round_sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

/// Shortest decimal text for `x` rounded to six significant digits.
pub fn format_sig6(x: f64) -> String {
    format!("{}", round_sig6(x))
}

impl ResultRow {
    /// The row as it reads back after a CSV round trip.
    pub fn rounded(&self) -> ResultRow {
        ResultRow {
            value: round_sig6(self.value),
            pe_mean: round_sig6(self.pe_mean),
            pe_ci: round_sig6(self.pe_ci),
            ber_mean: round_sig6(self.ber_mean),
            ber_ci: round_sig6(self.ber_ci),
            wall_ms_mean: round_sig6(self.wall_ms_mean),
            mult_estimate: round_sig6(self.mult_estimate),
            ..self.clone()
        }
    }
}

/// Metadata comment describing the full configuration and fixed conventions.
pub fn metadata_line(spec: &SweepSpec) -> String {
    let b = &spec.base;
    let values: Vec<String> = spec.values.iter().map(|v| format_sig6(*v)).collect();
    let detectors: Vec<&str> = spec.detectors.iter().map(|d| d.name()).collect();
    format!(
        "# K={} Ka={} Mr={} M={} Nr={} J={} snr_db={} P_th={} seed={} sweep={} values={} trials={} detectors={} \
         snr_convention=per_device_transmit_snr_db=10log10(1/noise_variance) \
         map_bits=natural_binary qam_bits=gray_msb_in_phase",
        b.devices,
        b.active,
        b.mirrors,
        b.qam_order,
        b.rx_antennas,
        b.slots,
        format_sig6(b.snr_db),
        format_sig6(b.threshold),
        b.seed,
        spec.variable.label(),
        values.join(","),
        spec.trials,
        detectors.join(","),
    )
}

pub fn write_csv<W: Write>(
    rows: &[ResultRow],
    metadata: &str,
    mut out: W,
) -> Result<(), ResultsCsvError> {
    if rows.is_empty() {
        return Err(ResultsCsvError::Empty);
    }
    let meta = metadata.trim_start_matches('#').trim();
    writeln!(out, "# {}", meta.replace(['\n', '\r'], " "))?;
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.sweep_var.clone(),
            format_sig6(r.value),
            r.detector.clone(),
            format_sig6(r.pe_mean),
            format_sig6(r.pe_ci),
            format_sig6(r.ber_mean),
            format_sig6(r.ber_ci),
            r.trials.to_string(),
            format_sig6(r.wall_ms_mean),
            format_sig6(r.mult_estimate),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[ResultRow], metadata: &str, path: &Path) -> Result<(), ResultsCsvError> {
    if rows.is_empty() {
        return Err(ResultsCsvError::Empty);
    }
    let file = BufWriter::new(File::create(path)?);
    write_csv(rows, metadata, file)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedResults {
    /// Metadata line without the leading `#`.
    pub metadata: String,
    pub rows: Vec<ResultRow>,
}

pub fn parse_results_csv(text: &str) -> Result<ParsedResults, ResultsCsvError> {
    let mut lines = text.splitn(2, '\n');
    let first = lines.next().unwrap_or("");
    let Some(meta) = first.strip_prefix('#') else {
        return Err(ResultsCsvError::MissingMetadata);
    };
    let body = lines.next().unwrap_or("");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(body.as_bytes());
    let header = reader.headers()?;
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(ResultsCsvError::BadHeader);
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let real = |idx: usize| -> Result<f64, ResultsCsvError> {
            let v = &rec[idx];
            v.parse::<f64>().map_err(|_| ResultsCsvError::BadField {
                row,
                column: HEADER[idx],
                value: v.to_string(),
            })
        };
        rows.push(ResultRow {
            sweep_var: rec[0].to_string(),
            value: real(1)?,
            detector: rec[2].to_string(),
            pe_mean: real(3)?,
            pe_ci: real(4)?,
            ber_mean: real(5)?,
            ber_ci: real(6)?,
            trials: rec[7].parse().map_err(|_| ResultsCsvError::BadField {
                row,
                column: HEADER[7],
                value: rec[7].to_string(),
            })?,
            wall_ms_mean: real(8)?,
            mult_estimate: real(9)?,
        });
    }
    Ok(ParsedResults {
        metadata: meta.trim().to_string(),
        rows,
    })
}

/// CSV text with the wall-time column blanked, for byte comparisons.
pub fn mask_wall_time(text: &str) -> String {
    text.lines()
        .map(|line| {
            if line.starts_with('#') {
                return line.to_string();
            }
            let mut fields: Vec<&str> = line.split(',').collect();
            if fields.len() > WALL_TIME_COLUMN {
                fields[WALL_TIME_COLUMN] = "";
            }
            fields.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}
