//! File formats.
//!
//! * ledger CSV: `t,work_in,radiated,mech` (ensemble mean over completed
//!   trajectories)
//! * histogram CSV: `bin_lo,bin_hi,density,reference_density`
//! * report CSV: `key,value`
//! * run record and config echo: `key = value` lines
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing
//! a file back reproduces the in-memory values bit for bit.

use std::fs;
use std::io;
use std::path::Path;

use crate::diagnostics::{EnergyLedger, Histogram};

pub const LEDGER_COLUMNS: [&str; 4] = ["t", "work_in", "radiated", "mech"];
pub const HISTOGRAM_COLUMNS: [&str; 4] = ["bin_lo", "bin_hi", "density", "reference_density"];

fn csv_err(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

fn write_rows(path: &Path, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush()
}

pub(crate) fn write_ledger(path: &Path, ledger: &EnergyLedger) -> io::Result<()> {
    let rows: Vec<Vec<String>> = ledger
        .samples()
        .iter()
        .map(|s| {
            vec![
                s.t.to_string(),
                s.work_in.to_string(),
                s.radiated.to_string(),
                s.mech.to_string(),
            ]
        })
        .collect();
    write_rows(path, &LEDGER_COLUMNS, &rows)
}

pub(crate) fn write_histogram(path: &Path, hist: &Histogram, reference: &[f64]) -> io::Result<()> {
    let rows: Vec<Vec<String>> = hist
        .edges()
        .windows(2)
        .zip(hist.densities())
        .zip(reference)
        .map(|((w, d), r)| {
            vec![
                w[0].to_string(),
                w[1].to_string(),
                d.to_string(),
                r.to_string(),
            ]
        })
        .collect();
    write_rows(path, &HISTOGRAM_COLUMNS, &rows)
}

pub(crate) fn write_report(path: &Path, entries: &[(String, String)]) -> io::Result<()> {
    let rows: Vec<Vec<String>> = entries
        .iter()
        .map(|(k, v)| vec![k.clone(), v.clone()])
        .collect();
    write_rows(path, &["key", "value"], &rows)
}

pub(crate) fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    write_rows(path, header, rows)
}

/// Read a CSV file into its header and string rows.
pub fn read_table(path: &Path) -> io::Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(csv_err)?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

/// Write `key = value` lines.
pub fn write_key_values(path: &Path, entries: &[(String, String)]) -> io::Result<()> {
    let mut text = String::new();
    for (k, v) in entries {
        text.push_str(k);
        text.push_str(" = ");
        text.push_str(v);
        text.push('\n');
    }
    fs::write(path, text)
}

/// Parse `key = value` lines, skipping blanks and `#` comments.
pub fn read_key_values(path: &Path) -> io::Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path)?;
    Ok(text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.trim().to_string(), v.to_string()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::LedgerSample;

    #[test]
    fn ledger_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.csv");
        let ledger = EnergyLedger::from_samples(
            (0..50)
                .map(|i| {
                    let t = i as f64 * 0.1;
                    LedgerSample {
                        t,
                        work_in: (t * 1.7).sin() / 3.0,
                        radiated: 1e-300 * t + t * t / 7.0,
                        reaction_work: 0.0,
                        mech: -0.5 - t / 11.0,
                    }
                })
                .collect(),
        );
        write_ledger(&path, &ledger).unwrap();
        let (header, rows) = read_table(&path).unwrap();
        assert_eq!(header, LEDGER_COLUMNS);
        for (row, s) in rows.iter().zip(ledger.samples()) {
            let vals: Vec<f64> = row.iter().map(|x| x.parse().unwrap()).collect();
            assert_eq!(vals, vec![s.t, s.work_in, s.radiated, s.mech]);
        }
    }

    #[test]
    fn key_values_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.txt");
        let entries = vec![
            ("a".to_string(), "1".to_string()),
            ("b.c".to_string(), "x = y".to_string()),
        ];
        write_key_values(&path, &entries).unwrap();
        assert_eq!(read_key_values(&path).unwrap(), entries);
    }
}
