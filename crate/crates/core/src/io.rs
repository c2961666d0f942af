//! Line formats shared by the command-line tools.
//!
//! Sample CSV: header `t,hx,hy,hz`, seconds and µT, one row per sample.
//! Estimate CSV: header `t,x,y,quality`, seconds and cm.
//! Lines starting with `#` are comments and may precede the header.

use std::io::{self, Write};

use crate::geometry::Vec3;
use crate::solver::PositionEstimate;
use crate::synth::SensorSample;

pub const SAMPLE_HEADER: &str = "t,hx,hy,hz";
pub const ESTIMATE_HEADER: &str = "t,x,y,quality";

pub fn write_sample_row(w: &mut impl Write, s: &SensorSample) -> io::Result<()> {
    writeln!(w, "{:.6},{:.6},{:.6},{:.6}", s.t, s.field.x, s.field.y, s.field.z)
}

pub fn write_estimate_row(w: &mut impl Write, t: f64, e: &PositionEstimate) -> io::Result<()> {
    writeln!(
        w,
        "{:.6},{:.6},{:.6},{}",
        t,
        e.position.x,
        e.position.y,
        e.quality.as_str()
    )
}

/// Writes `# ` comment lines, the header, then every sample.
pub fn write_samples(w: &mut impl Write, comments: &[String], samples: &[SensorSample]) -> io::Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "{SAMPLE_HEADER}")?;
    for s in samples {
        write_sample_row(w, s)?;
    }
    Ok(())
}

/// What a single input line turned out to be.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleLine {
    Blank,
    Comment,
    Header,
    Sample(SensorSample),
    Malformed(String),
}

pub fn parse_sample_line(line: &str) -> SampleLine {
    let line = line.trim();
    if line.is_empty() {
        return SampleLine::Blank;
    }
    if line.starts_with('#') {
        return SampleLine::Comment;
    }
    if line == SAMPLE_HEADER {
        return SampleLine::Header;
    }
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 4 {
        return SampleLine::Malformed(format!("expected 4 fields, got {}", fields.len()));
    }
    let mut v = [0.0; 4];
    for (slot, f) in v.iter_mut().zip(&fields) {
        match f.parse::<f64>() {
            Ok(x) if x.is_finite() => *slot = x,
            _ => return SampleLine::Malformed(format!("bad number {f:?}")),
        }
    }
    SampleLine::Sample(SensorSample::new(v[0], Vec3::new(v[1], v[2], v[3])))
}

/// Parses a whole sample file, returning the samples and the malformed line count.
pub fn read_samples(text: &str) -> (Vec<SensorSample>, usize) {
    let mut out = Vec::new();
    let mut bad = 0;
    for line in text.lines() {
        match parse_sample_line(line) {
            SampleLine::Sample(s) => out.push(s),
            SampleLine::Malformed(_) => bad += 1,
            _ => {}
        }
    }
    (out, bad)
}
