//! On-disk trace format, version 1.
//!
//! A trace file is a UTF-8 header followed by the samples:
//!
//! ```text
//! #cvqkd-trace v1
//! format=f64le
//! n=5000000
//! sampling_rate_hz=125000000
//! lo_power_mw=4.2
//! gain_v_per_a=5000
//! bandwidth_hz=500000000
//! label=vacuum run 1
//!
//! <samples>
//! ```
//!
//! `format` is `text` (one decimal sample per line) or `f64le` (packed
//! little-endian doubles). `format` and `n` are required; the remaining keys
//! default to zero / empty. Parse errors report the byte offset at which the
//! file stopped making sense.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::trace::{SampleTrace, TraceMeta};

const MAGIC: &str = "#cvqkd-trace v1";

/// Sample encoding used after the header.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TraceFileFormat {
    Text,
    #[default]
    F64le,
}

impl fmt::Display for TraceFileFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceFileFormat::Text => "text",
            TraceFileFormat::F64le => "f64le",
        })
    }
}

impl FromStr for TraceFileFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(TraceFileFormat::Text),
            "f64le" => Ok(TraceFileFormat::F64le),
            other => Err(Error::Config(format!(
                "unknown trace format '{other}' (expected text or f64le)"
            ))),
        }
    }
}

/// Serializes a trace into the v1 container.
pub fn encode_trace(trace: &SampleTrace, format: TraceFileFormat) -> Result<Vec<u8>> {
    let meta = trace.meta();
    if meta.label.contains('\n') || meta.label.contains('\r') {
        return Err(Error::Config(
            "trace label must not contain line breaks".into(),
        ));
    }
    let mut out = Vec::with_capacity(128 + trace.len() * 9);
    let header = format!(
        "{MAGIC}\nformat={format}\nn={}\nsampling_rate_hz={}\nlo_power_mw={}\ngain_v_per_a={}\nbandwidth_hz={}\nlabel={}\n\n",
        trace.len(),
        meta.sampling_rate_hz,
        meta.lo_power_mw,
        meta.gain_v_per_a,
        meta.bandwidth_hz,
        meta.label,
    );
    out.extend_from_slice(header.as_bytes());
    match format {
        TraceFileFormat::Text => {
            for s in trace.samples() {
                out.extend_from_slice(s.to_string().as_bytes());
                out.push(b'\n');
            }
        }
        TraceFileFormat::F64le => {
            for s in trace.samples() {
                out.extend_from_slice(&s.to_le_bytes());
            }
        }
    }
    Ok(out)
}

pub fn write_trace(path: &Path, trace: &SampleTrace, format: TraceFileFormat) -> Result<()> {
    std::fs::write(path, encode_trace(trace, format)?)?;
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<SampleTrace> {
    decode_trace(&std::fs::read(path)?)
}

fn bad(offset: usize, message: impl Into<String>) -> Error {
    Error::TraceFormat {
        offset: offset as u64,
        message: message.into(),
    }
}

/// Splits off the line starting at `pos`; returns `(line, offset_after)`.
/// `None` when `pos` is at end of input.
fn next_line(bytes: &[u8], pos: usize) -> Option<(&[u8], usize)> {
    if pos >= bytes.len() {
        return None;
    }
    match bytes[pos..].iter().position(|&b| b == b'\n') {
        Some(i) => Some((&bytes[pos..pos + i], pos + i + 1)),
        None => Some((&bytes[pos..], bytes.len())),
    }
}

fn header_str(line: &[u8], offset: usize) -> Result<&str> {
    std::str::from_utf8(line).map_err(|_| bad(offset, "header line is not valid UTF-8"))
}

fn parse_meta_f64(value: &str, key: &str, offset: usize) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| bad(offset, format!("{key} is not a number: '{value}'")))?;
    if !v.is_finite() {
        return Err(bad(offset, format!("{key} must be finite, got {value}")));
    }
    Ok(v)
}

/// Parses the v1 container from raw bytes.
pub fn decode_trace(bytes: &[u8]) -> Result<SampleTrace> {
    let (first, mut pos) =
        next_line(bytes, 0).ok_or_else(|| bad(0, "empty file, expected trace header"))?;
    if header_str(first, 0)? != MAGIC {
        return Err(bad(0, format!("expected '{MAGIC}' header")));
    }

    let mut format: Option<TraceFileFormat> = None;
    let mut n: Option<usize> = None;
    let mut meta = TraceMeta::default();
    let mut seen: Vec<String> = Vec::new();
    let data_start = loop {
        let line_offset = pos;
        let Some((line, next)) = next_line(bytes, pos) else {
            return Err(bad(pos, "header ended without a blank separator line"));
        };
        pos = next;
        if line.is_empty() {
            break pos;
        }
        let line = header_str(line, line_offset)?;
        let Some((key, value)) = line.split_once('=') else {
            return Err(bad(line_offset, format!("expected key=value, got '{line}'")));
        };
        if seen.iter().any(|k| k == key) {
            return Err(bad(line_offset, format!("duplicate key '{key}'")));
        }
        seen.push(key.to_string());
        match key {
            "format" => {
                format = Some(
                    value
                        .parse()
                        .map_err(|_| bad(line_offset, format!("unknown format '{value}'")))?,
                )
            }
            "n" => {
                n = Some(value.parse().map_err(|_| {
                    bad(line_offset, format!("n is not a sample count: '{value}'"))
                })?)
            }
            "sampling_rate_hz" => meta.sampling_rate_hz = parse_meta_f64(value, key, line_offset)?,
            "lo_power_mw" => meta.lo_power_mw = parse_meta_f64(value, key, line_offset)?,
            "gain_v_per_a" => meta.gain_v_per_a = parse_meta_f64(value, key, line_offset)?,
            "bandwidth_hz" => meta.bandwidth_hz = parse_meta_f64(value, key, line_offset)?,
            "label" => meta.label = value.to_string(),
            other => return Err(bad(line_offset, format!("unknown key '{other}'"))),
        }
    };

    let Some(format) = format else {
        return Err(bad(data_start, "header is missing the 'format' key"));
    };
    let Some(n) = n else {
        return Err(bad(data_start, "header is missing the 'n' key"));
    };

    let samples = match format {
        TraceFileFormat::Text => {
            let mut samples = Vec::with_capacity(n);
            let mut pos = data_start;
            while let Some((line, next)) = next_line(bytes, pos) {
                if line.is_empty() && next == bytes.len() {
                    break; // trailing newline
                }
                if samples.len() == n {
                    return Err(bad(pos, format!("more than the declared n={n} samples")));
                }
                let text = header_str(line, pos)?;
                let v: f64 = text
                    .parse()
                    .map_err(|_| bad(pos, format!("sample is not a number: '{text}'")))?;
                if !v.is_finite() {
                    return Err(bad(pos, format!("sample is not finite: '{text}'")));
                }
                samples.push(v);
                pos = next;
            }
            if samples.len() != n {
                return Err(bad(
                    pos,
                    format!("declared n={n} samples but found {}", samples.len()),
                ));
            }
            samples
        }
        TraceFileFormat::F64le => {
            let data = &bytes[data_start..];
            if data.len() != 8 * n {
                return Err(bad(
                    data_start,
                    format!(
                        "f64le payload must be exactly {} bytes for n={n}, found {}",
                        8 * n,
                        data.len()
                    ),
                ));
            }
            let mut samples = Vec::with_capacity(n);
            for (i, chunk) in data.chunks_exact(8).enumerate() {
                let v = f64::from_le_bytes(chunk.try_into().unwrap());
                if !v.is_finite() {
                    return Err(bad(data_start + 8 * i, format!("sample {i} is not finite")));
                }
                samples.push(v);
            }
            samples
        }
    };
    SampleTrace::new(samples, meta)
}
