use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use bundlefair::report::fmt_f64;

use crate::error::{CliError, CliResult};

pub const HISTOGRAM_BINS: usize = 50;

/// Writes a file through a buffered writer, mapping failures to `E_IO`.
pub fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(path, e))
}

/// Equal-width histogram of `ln(1 + v)` over `[min, max]`. When every value is
/// the same the range is widened to one unit so all mass lands in bin 0.
pub fn log_histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    if values.is_empty() {
        return Vec::new();
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln_1p()).collect();
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let hi = if hi > lo { hi } else { lo + 1.0 };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for x in logs {
        let bin = (((x - lo) / width) as usize).min(bins - 1);
        counts[bin] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(b, c)| (lo + b as f64 * width, lo + (b + 1) as f64 * width, c))
        .collect()
}

pub fn write_histogram(path: &Path, values: &[f64]) -> CliResult<()> {
    write_file(path, |out| {
        writeln!(out, "bin,log1p_lower,log1p_upper,count")?;
        for (b, (lower, upper, count)) in log_histogram(values, HISTOGRAM_BINS).into_iter().enumerate() {
            writeln!(out, "{b},{},{},{count}", fmt_f64(lower), fmt_f64(upper))?;
        }
        Ok(())
    })
}
