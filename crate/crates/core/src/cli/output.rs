//! CSV, JSON and histogram writers. All output is a pure function of its input.

use std::io::Write;

use crate::error::{invalid, Error, Result};
use crate::experiments::ExperimentReport;

pub const REPORT_COLUMNS: [&str; 13] = [
    "statistic",
    "n",
    "beta",
    "gamma",
    "zeta_or_xi",
    "replicates",
    "predicted_mean",
    "sample_mean",
    "se_mean",
    "z_score",
    "predicted_var",
    "sample_var",
    "verdict",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(invalid(format!("unknown format '{s}' (csv|json)"))),
        }
    }
}

/// Seventeen significant digits, enough to round-trip any double.
pub fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_report_csv(reports: &[ExperimentReport], out: &mut dyn Write) -> Result<()> {
    writeln!(out, "{}", REPORT_COLUMNS.join(",")).map_err(io)?;
    for r in reports {
        let row = [
            r.statistic.clone(),
            r.n.to_string(),
            fmt_real(r.beta),
            fmt_real(r.gamma),
            fmt_real(r.zeta_or_xi),
            r.replicates.to_string(),
            fmt_real(r.predicted_mean),
            fmt_real(r.sample_mean),
            fmt_real(r.se_mean),
            fmt_real(r.z_score),
            fmt_real(r.predicted_var),
            fmt_real(r.sample_var),
            r.verdict.as_str().to_string(),
        ];
        writeln!(out, "{}", row.join(",")).map_err(io)?;
    }
    Ok(())
}

/// A JSON array of report objects with the CSV column names as keys.
pub fn write_report_json(reports: &[ExperimentReport], out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, reports).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out).map_err(io)
}

pub fn emit_report(reports: &[ExperimentReport], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => write_report_csv(reports, out),
        Format::Json => write_report_json(reports, out),
    }
}

/// Equal-width bin counts over `[min, max]`; the last bin is closed.
///
/// Returns `(centers, counts)`. Constant samples are binned over a unit window
/// centred on their value, so they occupy a single bin.
pub fn histogram(samples: &[f64], bins: usize) -> Result<(Vec<f64>, Vec<u64>)> {
    if bins < 1 {
        return Err(invalid("histogram needs at least one bin"));
    }
    if samples.is_empty() {
        return Err(Error::InvalidInput("histogram of an empty sample".into()));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("histogram sample is not finite".into()));
    }
    let mut lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        // Unit-width window around the single value.
        lo -= 0.5;
        hi += 0.5;
    }
    let mut counts = vec![0u64; bins];
    let width = (hi - lo) / bins as f64;
    for &v in samples {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let centers = (0..bins).map(|b| lo + (b as f64 + 0.5) * width).collect();
    Ok((centers, counts))
}

/// Two-column text, `bin_center count` per line.
pub fn emit_histogram(samples: &[f64], bins: usize, out: &mut dyn Write) -> Result<()> {
    let (centers, counts) = histogram(samples, bins)?;
    for (c, n) in centers.iter().zip(&counts) {
        writeln!(out, "{} {n}", fmt_real(*c)).map_err(io)?;
    }
    Ok(())
}
