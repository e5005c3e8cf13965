//! Text serialisation for sequences, drives, spectra and envelopes.
//!
//! Floats are written with 17 significant digits so that every value parses
//! back to the identical `f64`.

use num_complex::Complex64;

use crate::arithmetic::FrequencyLabel;
use crate::drives::{Component, ContinuousDrive, StepSequence};
use crate::error::{Error, Result};
use crate::spectra::{Envelope, Normalization, Spectrum};

/// Formats with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad float '{s}'")))
}

/// Simple CSV table: a header row and rows of string cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_f64(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&v| fmt_f64(v)).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Table> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> =
            lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?.split(',').map(|s| s.trim().to_string()).collect();
        let rows = lines
            .enumerate()
            .map(|(i, l)| {
                let cells: Vec<String> = l.split(',').map(|s| s.trim().to_string()).collect();
                if cells.len() != header.len() {
                    return Err(Error::Parse(format!("row {} has {} cells, header has {}", i + 1, cells.len(), header.len())));
                }
                Ok(cells)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Table { header, rows })
    }

    fn expect_header(&self, expected: &[&str]) -> Result<()> {
        if self.header != expected {
            return Err(Error::Parse(format!("expected header {expected:?}, found {:?}", self.header)));
        }
        Ok(())
    }

    /// All cells parsed as floats, row-major.
    pub fn f64_rows(&self) -> Result<Vec<Vec<f64>>> {
        self.rows.iter().map(|r| r.iter().map(|c| parse_f64(c)).collect()).collect()
    }
}

/// One sign per line.
pub fn write_sequence(seq: &StepSequence) -> String {
    seq.to_i8().iter().map(|v| format!("{v}\n")).collect()
}

pub fn read_sequence(text: &str, dt: f64) -> Result<StepSequence> {
    let vals = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad sign '{l}'"))))
        .collect::<Result<Vec<_>>>()?;
    StepSequence::custom(&vals, dt)
}

const DRIVE_HEADER: [&str; 4] = ["label", "freq", "amp", "phase"];

pub fn write_drive(drive: &ContinuousDrive) -> String {
    let mut t = Table::new(&DRIVE_HEADER);
    for c in &drive.components {
        t.push(vec![c.label.to_string(), fmt_f64(c.freq), fmt_f64(c.amp), fmt_f64(c.phase)]);
    }
    t.to_csv()
}

pub fn read_drive(text: &str, lambda: f64) -> Result<ContinuousDrive> {
    let t = Table::parse(text)?;
    t.expect_header(&DRIVE_HEADER)?;
    let components = t
        .rows
        .iter()
        .map(|r| {
            Ok(Component {
                label: FrequencyLabel::parse(&r[0])?,
                freq: parse_f64(&r[1])?,
                amp: parse_f64(&r[2])?,
                phase: parse_f64(&r[3])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContinuousDrive { components, lambda })
}

const SPECTRUM_HEADER: [&str; 3] = ["omega", "re", "im"];

pub fn write_spectrum(spec: &Spectrum) -> String {
    let mut t = Table::new(&SPECTRUM_HEADER);
    for (w, v) in spec.omega.iter().zip(&spec.value) {
        t.push_f64(&[*w, v.re, v.im]);
    }
    t.to_csv()
}

pub fn read_spectrum(text: &str, n: usize) -> Result<Spectrum> {
    let t = Table::parse(text)?;
    t.expect_header(&SPECTRUM_HEADER)?;
    let rows = t.f64_rows()?;
    Ok(Spectrum {
        omega: rows.iter().map(|r| r[0]).collect(),
        value: rows.iter().map(|r| Complex64::new(r[1], r[2])).collect(),
        normalization: Normalization::OneOverN,
        n,
    })
}

const ENVELOPE_HEADER: [&str; 2] = ["omega", "median_mag"];

pub fn write_envelope(env: &Envelope) -> String {
    let mut t = Table::new(&ENVELOPE_HEADER);
    for (w, m) in &env.points {
        t.push_f64(&[*w, *m]);
    }
    t.to_csv()
}

pub fn read_envelope(text: &str) -> Result<Vec<(f64, f64)>> {
    let t = Table::parse(text)?;
    t.expect_header(&ENVELOPE_HEADER)?;
    Ok(t.f64_rows()?.iter().map(|r| (r[0], r[1])).collect())
}

/// Two whitespace-separated columns `ln Ω  ln M`, ready for gnuplot.
pub fn write_loglog(env: &Envelope) -> String {
    env.points
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|(w, m)| format!("{} {}\n", fmt_f64(w.ln()), fmt_f64(m.ln())))
        .collect()
}
