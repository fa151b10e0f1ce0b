//! CSV formats shared with the command line front end.
//!
//! All writers go through a write-then-rename so consumers never observe a
//! partial file. Numeric formatting uses the shortest round-trip form, so
//! equal inputs produce byte-identical files.

use crate::error::{Result, SvmError};
use crate::kernels::ImpulseResponse;
use crate::types::SampledSignal;
use num_complex::Complex64;
use std::io::Write;
use std::path::Path;

/// Writes `contents` to `path` atomically (temp file + rename).
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp~");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| SvmError::Io(format!("line {line}: cannot parse '{}'", field.trim())))
}

fn is_header(line: &str) -> bool {
    line.split(',')
        .next()
        .map(|f| f.trim().parse::<f64>().is_err())
        .unwrap_or(true)
}

/// Reads a `time,value` CSV (header optional) into a signal.
pub fn read_signal(path: &Path) -> Result<SampledSignal> {
    let text = std::fs::read_to_string(path)?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && is_header(line)) {
            continue;
        }
        let mut fields = line.split(',');
        let t = fields
            .next()
            .ok_or_else(|| SvmError::Io(format!("line {}: empty row", i + 1)))?;
        let v = fields
            .next()
            .ok_or_else(|| SvmError::Io(format!("line {}: missing value column", i + 1)))?;
        times.push(parse_f64(t, i + 1)?);
        values.push(parse_f64(v, i + 1)?);
    }
    SampledSignal::new(times, values)
}

/// Writes a signal as a `time,value` CSV with a header row.
pub fn write_signal(path: &Path, signal: &SampledSignal) -> Result<()> {
    let mut out = String::from("time,value\n");
    for (t, v) in signal.times().iter().zip(signal.values()) {
        out.push_str(&format!("{t},{v}\n"));
    }
    write_atomic(path, &out)
}

/// Reads a single-column CSV of impulse response taps (header optional).
pub fn read_impulse_response(path: &Path, sample_period: f64) -> Result<ImpulseResponse> {
    let text = std::fs::read_to_string(path)?;
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && is_header(line)) {
            continue;
        }
        let first = line.split(',').next().unwrap_or("");
        samples.push(parse_f64(first, i + 1)?);
    }
    ImpulseResponse::new(samples, sample_period)
}

/// Reads complex snapshots: one row per snapshot, `2 (K+1)` columns of
/// interleaved real/imaginary parts.
pub fn read_snapshots(path: &Path) -> Result<Vec<Vec<Complex64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut snapshots: Vec<Vec<Complex64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && is_header(line)) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() % 2 != 0 {
            return Err(SvmError::Io(format!(
                "line {}: odd column count {} (expect interleaved re,im)",
                i + 1,
                fields.len()
            )));
        }
        let mut snap = Vec::with_capacity(fields.len() / 2);
        for pair in fields.chunks(2) {
            snap.push(Complex64::new(
                parse_f64(pair[0], i + 1)?,
                parse_f64(pair[1], i + 1)?,
            ));
        }
        if let Some(first) = snapshots.first() {
            if snap.len() != first.len() {
                return Err(SvmError::Io(format!(
                    "line {}: snapshot length {} differs from {}",
                    i + 1,
                    snap.len(),
                    first.len()
                )));
            }
        }
        snapshots.push(snap);
    }
    if snapshots.is_empty() {
        return Err(SvmError::Io("no snapshots in file".into()));
    }
    Ok(snapshots)
}

/// Writes complex values as interleaved `re,im` rows.
pub fn write_complex_rows(path: &Path, header: &str, rows: &[Vec<Complex64>]) -> Result<()> {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = row.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    write_atomic(path, &out)
}

/// Writes spike estimates as `index,amplitude` rows (support entries only).
pub fn write_spikes(path: &Path, spikes: &[f64], threshold: f64) -> Result<()> {
    let mut out = String::from("index,amplitude\n");
    for (i, s) in spikes.iter().enumerate() {
        if s.abs() > threshold {
            out.push_str(&format!("{i},{s}\n"));
        }
    }
    write_atomic(path, &out)
}

/// Writes a generic column table (metrics, PSD grids, ...).
pub fn write_table(path: &Path, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    write_atomic(path, &out)
}

/// Parses a `key=value` config file; later keys win, `#` starts a comment.
pub fn read_key_value(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| SvmError::Io(format!("line {}: expected key=value", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}
