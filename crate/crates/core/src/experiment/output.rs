//! CSV files for result rows and convergence traces.

use std::fs::File;
use std::path::Path;

use super::oracle::OracleInstance;
use super::run::ResultRow;
use crate::error::{Error, Result};

pub const RESULT_HEADER: [&str; 6] = [
    "sweep_value",
    "scheme",
    "mean_sr",
    "std_sr",
    "mean_iters",
    "mean_wall_ms",
];

pub const TRACE_HEADER: [&str; 2] = ["iteration", "secrecy_rate"];

/// Ten significant digits, shortest form (like C's `%.10g`).
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // take the exponent after rounding to 10 digits, which may carry into the next decade
    let sci = format!("{:.9e}", x);
    let (mantissa, e) = sci.split_once('e').expect("exponent form");
    let e: i32 = e.parse().expect("integer exponent");
    if (-5..10).contains(&e) {
        let decimals = (9 - e).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if e < 0 { '-' } else { '+' }, e.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn finish(mut w: csv::Writer<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes rows in (sweep_value, scheme) order, whatever order they arrive in.
pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let mut sorted: Vec<&ResultRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.sweep_value.total_cmp(&b.sweep_value).then_with(|| a.scheme.cmp(&b.scheme)));
    let mut w = writer(path)?;
    w.write_record(RESULT_HEADER).map_err(csv_err(path))?;
    for r in sorted {
        w.write_record([
            format_sig(r.sweep_value),
            r.scheme.clone(),
            format_sig(r.mean_sr),
            format_sig(r.std_sr),
            format_sig(r.mean_iters),
            format_sig(r.mean_wall_ms),
        ])
        .map_err(csv_err(path))?;
    }
    finish(w, path)
}

/// Entry `i` of `trace` is the secrecy rate after AO iteration `i` (0 = start).
pub fn write_trace_csv(trace: &[f64], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(TRACE_HEADER).map_err(csv_err(path))?;
    for (i, sr) in trace.iter().enumerate() {
        w.write_record([i.to_string(), format_sig(*sr)]).map_err(csv_err(path))?;
    }
    finish(w, path)
}

/// One line per oracle instance: FP value, grid best, and their ratio.
pub fn write_oracle_csv(results: &[OracleInstance], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["instance", "fp_value", "grid_value", "ratio"])
        .map_err(csv_err(path))?;
    for (i, r) in results.iter().enumerate() {
        w.write_record([
            i.to_string(),
            format_sig(r.fp_value),
            format_sig(r.grid_value),
            format_sig(r.ratio()),
        ])
        .map_err(csv_err(path))?;
    }
    finish(w, path)
}
