//! Writes reports to disk: `report.json` and, for scans, `scan.csv`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use latlab_core::measure::ScanRow;

use crate::config::Format;
use crate::error::RunError;
use crate::report::RunReport;
use crate::runner::{RunOutput, SCAN_TABLE};

pub const REPORT_FILE: &str = "report.json";

/// Renders `v` in positional decimal notation with 17 significant digits.
///
/// ```
/// assert_eq!(latlab::emit::fmt_sig17(0.25), "0.25000000000000000");
/// assert_eq!(latlab::emit::fmt_sig17(-12.0), "-12.000000000000000");
/// ```
pub fn fmt_sig17(v: f64) -> String {
    if v == 0.0 {
        return "0.0000000000000000".into();
    }
    let sci = format!("{:.16e}", v.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let mut out = String::new();
    if v < 0.0 {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&digits);
    } else if exp as usize + 1 >= digits.len() {
        out.push_str(&digits);
        out.extend(std::iter::repeat_n('0', exp as usize + 1 - digits.len()));
        out.push_str(".0");
    } else {
        let (int, frac) = digits.split_at(exp as usize + 1);
        let _ = write!(out, "{int}.{frac}");
    }
    out
}

/// CSV table for a scan: `q_1..q_d,k,robust,eq_1..eq_d`, one row per grid
/// point in grid order. Non-robust rows leave the equilibrium empty.
pub fn scan_csv(rows: &[ScanRow]) -> String {
    let d = rows.first().map_or(0, |r| r.q.len());
    let mut header: Vec<String> = (1..=d).map(|i| format!("q_{i}")).collect();
    header.push("k".into());
    header.push("robust".into());
    header.extend((1..=d).map(|i| format!("eq_{i}")));
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let mut fields: Vec<String> = r.q.iter().map(|&v| fmt_sig17(v)).collect();
        fields.push(r.k.to_string());
        fields.push(r.robust.to_string());
        match &r.equilibrium {
            Some(eq) => fields.extend(eq.iter().map(|&v| fmt_sig17(v))),
            None => fields.extend(std::iter::repeat_n(String::new(), d)),
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn report_json(report: &RunReport) -> Result<String, RunError> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| RunError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf, RunError> {
    fs::write(&path, contents).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Writes the files for `output` into `dir` and returns their paths.
///
/// `json` writes `report.json`, plus the scan table that a scan report
/// refers to. `csv` writes only the scan table.
pub fn emit(output: &RunOutput, dir: &Path, format: Format) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir).map_err(|e| RunError::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    if format == Format::Json {
        written.push(write(dir.join(REPORT_FILE), &report_json(&output.report)?)?);
    }
    match (&output.scan_rows, format) {
        (Some(rows), _) => written.push(write(dir.join(SCAN_TABLE), &scan_csv(rows))?),
        (None, Format::Csv) => return Err(RunError::Config("csv output is only available for q-grid-scan".into())),
        (None, Format::Json) => {}
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig17_round_trips() {
        for v in [1.0 / 3.0, -0.375, 1e-7, 123456.789, 2.0f64.powi(60), -1.0 / 7.0, 5e-324] {
            let s = fmt_sig17(v);
            assert!(!s.contains('e'), "{s}");
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt_sig17(-0.125), "-0.12500000000000000");
        assert_eq!(fmt_sig17(0.001), "0.0010000000000000000");
    }

    #[test]
    fn csv_layout() {
        let rows = vec![
            ScanRow { q: vec![-0.375], k: 1, robust: true, equilibrium: Some(vec![-0.375]) },
            ScanRow { q: vec![0.125], k: 2, robust: false, equilibrium: None },
        ];
        let csv = scan_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "q_1,k,robust,eq_1");
        assert_eq!(lines[1], "-0.37500000000000000,1,true,-0.37500000000000000");
        assert_eq!(lines[2], "0.12500000000000000,2,false,");
    }
}
