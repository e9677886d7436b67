use std::io::Write;

use serde::Serialize;

use crate::config::Format;
use crate::run::{Report, Rows};

fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the report rows as CSV (one header line) or the whole report as pretty JSON.
pub fn write_report<W: Write>(report: &Report, format: Format, mut out: W) -> std::io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)
        }
        Format::Csv => {
            let r = match &report.rows {
                Rows::Analyze(rows) => write_csv(&mut out, rows),
                Rows::Simulate(rows) => write_csv(&mut out, rows),
                Rows::Xval(rows) => write_csv(&mut out, rows),
            };
            r.map_err(|e| std::io::Error::other(e.to_string()))
        }
    }
}

pub fn render(report: &Report, format: Format) -> String {
    let mut buf = Vec::new();
    write_report(report, format, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 output")
}
