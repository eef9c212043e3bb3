//! Report serialization: JSON with 17-significant-digit floats and CSV
//! summaries with a fixed column contract.
//!
//! 17 significant digits uniquely identify every finite `f64`, so report
//! files are byte-for-byte reproducible *and* round-trip exactly back to
//! the in-memory report. Downstream tooling may rely on the CSV header
//! spelling and column order; both are part of the interface.

use std::io::{self, Write};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use tqkd::{SessionReport, Verdict};

use crate::sweep::SweepRow;

/// Column order of single-run CSV summaries.
pub const RUN_CSV_HEADER: [&str; 8] = [
    "seed",
    "sifted_len",
    "qber",
    "qber_lo",
    "qber_hi",
    "portA_frac",
    "p_value",
    "verdict",
];

/// Column order of sweep CSV output: the swept value, then the run summary.
pub const SWEEP_CSV_HEADER: [&str; 9] = [
    "parameter_value",
    "seed",
    "sifted_len",
    "qber",
    "qber_lo",
    "qber_hi",
    "portA_frac",
    "p_value",
    "verdict",
];

/// Render a float with 17 significant digits (1 leading + 16 after the
/// point, scientific notation).
pub fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

/// Pretty JSON formatter that emits every float with 17 significant digits.
struct SigFigFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for SigFigFormatter<'_> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object_value(writer)
    }
}

/// Serialize a report as pretty JSON with exact-precision floats and a
/// trailing newline.
pub fn report_to_json(report: &SessionReport) -> String {
    let mut buffer = Vec::new();
    let formatter = SigFigFormatter {
        inner: PrettyFormatter::new(),
    };
    let mut serializer = serde_json::Serializer::with_formatter(&mut buffer, formatter);
    report
        .serialize(&mut serializer)
        .expect("in-memory JSON serialization cannot fail");
    buffer.push(b'\n');
    String::from_utf8(buffer).expect("serde_json emits UTF-8")
}

/// Parse a report file back into memory; exact inverse of
/// [`report_to_json`].
pub fn report_from_json(text: &str) -> Result<SessionReport> {
    serde_json::from_str(text).context("invalid session report JSON")
}

fn verdict_cell(verdict: &Verdict) -> &'static str {
    match verdict {
        Verdict::Honest { .. } => "honest",
        Verdict::AttackSuspected { .. } => "attack_suspected",
    }
}

/// The eight summary cells shared by run and sweep CSV rows. Fields absent
/// from the report (no sifted key, no interferometer counts) become empty
/// cells.
fn summary_cells(seed: u64, report: &SessionReport) -> Vec<String> {
    let (qber, qber_lo, qber_hi) = match &report.qber {
        Some(estimate) => (
            format_float(estimate.qber),
            format_float(estimate.ci_low),
            format_float(estimate.ci_high),
        ),
        None => (String::new(), String::new(), String::new()),
    };
    let port_a_frac = if report.mz_counts.total() > 0 {
        format_float(report.mz_counts.port_a as f64 / report.mz_counts.total() as f64)
    } else {
        String::new()
    };
    vec![
        seed.to_string(),
        report.sifted_len.to_string(),
        qber,
        qber_lo,
        qber_hi,
        port_a_frac,
        format_float(report.verdict.p_value()),
        verdict_cell(&report.verdict).to_string(),
    ]
}

/// Single-run CSV summary: fixed header plus one row.
pub fn report_to_csv(seed: u64, report: &SessionReport) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(RUN_CSV_HEADER)?;
    writer.write_record(summary_cells(seed, report))?;
    let bytes = writer.into_inner().context("flushing CSV buffer")?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Sweep CSV: fixed header plus one row per (step, repetition) in order.
pub fn sweep_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(SWEEP_CSV_HEADER)?;
    for row in rows {
        let mut cells = vec![format_float(row.parameter_value)];
        cells.extend(summary_cells(row.seed, &row.report));
        writer.write_record(cells)?;
    }
    let bytes = writer.into_inner().context("flushing CSV buffer")?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}
