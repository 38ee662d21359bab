//! Time-series files.
//!
//! CSV layout: a block of `# key=value` lines describing the scenario, one
//! column-header row, then one row per sample with every float printed to
//! 12 significant digits. The JSON layout is a single object
//! `{"meta": {...}, "rows": [...]}`.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{entropy, ReducedDensityMatrix};
use crate::scenario::{TimeSeries, TimeSeriesRow};
use crate::C64;

/// Slack for invariants checked on rows read back from disk.
pub const ROW_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub preset: Option<String>,
    pub case: String,
    pub theta: f64,
    pub phi: f64,
    pub alpha: f64,
    pub eta: f64,
    pub chi: f64,
    pub mc2: f64,
    pub gamma: f64,
    pub t_max: f64,
    pub dt: f64,
    pub mode: String,
    pub n_max: usize,
    pub trace_deficit: f64,
    pub samples: usize,
}

impl Meta {
    pub fn from_series(ts: &TimeSeries) -> Self {
        let s = &ts.scenario;
        let label = |v: serde_json::Value| v.as_str().unwrap_or_default().to_string();
        Self {
            preset: s.preset.clone(),
            case: label(serde_json::to_value(s.case).unwrap_or_default()),
            theta: s.theta,
            phi: s.phi,
            alpha: s.alpha,
            eta: 1.0,
            chi: s.chi,
            mc2: s.mc2,
            gamma: s.gamma,
            t_max: s.t_max,
            dt: s.dt,
            mode: label(serde_json::to_value(s.mode).unwrap_or_default()),
            n_max: ts.n_max,
            trace_deficit: ts.trace_deficit,
            samples: ts.rows.len(),
        }
    }

    fn pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            (
                "preset",
                self.preset.clone().unwrap_or_else(|| "none".into()),
            ),
            ("case", self.case.clone()),
            ("theta", format!("{:?}", self.theta)),
            ("phi", format!("{:?}", self.phi)),
            ("alpha", format!("{:?}", self.alpha)),
            ("eta", format!("{:?}", self.eta)),
            ("chi", format!("{:?}", self.chi)),
            ("mc2", format!("{:?}", self.mc2)),
            ("gamma", format!("{:?}", self.gamma)),
            ("t_max", format!("{:?}", self.t_max)),
            ("dt", format!("{:?}", self.dt)),
            ("mode", self.mode.clone()),
            ("n_max", self.n_max.to_string()),
            ("trace_deficit", format!("{:.11e}", self.trace_deficit)),
            ("samples", self.samples.to_string()),
        ]
    }
}

fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn write_csv<W: Write>(ts: &TimeSeries, mut out: W) -> Result<()> {
    for (key, value) in Meta::from_series(ts).pairs() {
        writeln!(out, "# {key}={value}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TimeSeriesRow::COLUMNS)?;
    for row in &ts.rows {
        w.write_record(row.values().iter().map(|&x| fmt_float(x)))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct JsonFile {
    meta: Meta,
    rows: Vec<TimeSeriesRow>,
}

pub fn write_json<W: Write>(ts: &TimeSeries, out: W) -> Result<()> {
    let file = JsonFile {
        meta: Meta::from_series(ts),
        rows: ts.rows.clone(),
    };
    serde_json::to_writer_pretty(out, &file)?;
    Ok(())
}

/// Rows and header entries of a file written by [`write_csv`] or
/// [`write_json`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSeries {
    pub meta: BTreeMap<String, String>,
    pub rows: Vec<TimeSeriesRow>,
}

pub fn parse_series(text: &str) -> Result<ParsedSeries> {
    if text.trim_start().starts_with('{') {
        let file: JsonFile = serde_json::from_str(text)?;
        let meta = match serde_json::to_value(&file.meta)? {
            serde_json::Value::Object(m) => {
                m.into_iter().map(|(k, v)| (k, v.to_string())).collect()
            }
            _ => BTreeMap::new(),
        };
        return Ok(ParsedSeries {
            meta,
            rows: file.rows,
        });
    }

    let meta = text
        .lines()
        .filter_map(|l| l.strip_prefix('#'))
        .filter_map(|l| l.trim().split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != TimeSeriesRow::COLUMNS {
        return Err(Error::Format(format!("unexpected columns {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let mut values = [0.0; 9];
        for (slot, field) in values.iter_mut().zip(record.iter()) {
            *slot = field
                .parse()
                .map_err(|_| Error::Format(format!("row {}: cannot parse `{field}`", i + 1)))?;
        }
        rows.push(TimeSeriesRow::from_values(values));
    }
    Ok(ParsedSeries { meta, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub rows: usize,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.rows > 0 && self.violations.is_empty()
    }
}

/// Checks monotone time and the reduced-state invariants of every row.
pub fn validate_rows(rows: &[TimeSeriesRow]) -> ValidationReport {
    let tol = ROW_TOLERANCE;
    let mut violations = Vec::new();
    if rows.is_empty() {
        violations.push("file holds no rows".to_string());
    }
    for (i, w) in rows.windows(2).enumerate() {
        if w[1].t <= w[0].t {
            violations.push(format!("row {}: time {} does not increase", i + 1, w[1].t));
        }
    }
    for (i, r) in rows.iter().enumerate() {
        let mut fail = |what: &str| violations.push(format!("row {i} (t = {}): {what}", r.t));
        if r.values().iter().any(|x| !x.is_finite()) {
            fail("non-finite value");
            continue;
        }
        for (name, p) in [("rho_ee", r.rho_ee), ("rho_gg", r.rho_gg)] {
            if !(-tol..=1.0 + tol).contains(&p) {
                fail(&format!("{name} = {p} outside [0, 1]"));
            }
        }
        if (r.rho_ee + r.rho_gg - 1.0).abs() > tol {
            fail("populations do not sum to 1");
        }
        let coherence = r.re_rho_eg.powi(2) + r.im_rho_eg.powi(2);
        if coherence > r.rho_ee * r.rho_gg + tol {
            fail("coherence exceeds positivity bound");
        }
        if !(-tol..=LN_2 + tol).contains(&r.entropy) {
            fail(&format!("entropy {} outside [0, ln 2]", r.entropy));
        }
        if (r.inversion - (r.rho_ee - r.rho_gg)).abs() > tol {
            fail("inversion differs from rho_ee - rho_gg");
        }
        let rho = ReducedDensityMatrix::new(r.rho_ee, r.rho_gg, C64::new(r.re_rho_eg, r.im_rho_eg));
        match entropy(&rho) {
            Ok(s) if (s - r.entropy).abs() > 1e-6 => fail(&format!(
                "entropy {} inconsistent with rho ({s})",
                r.entropy
            )),
            Err(e) => fail(&e.to_string()),
            _ => {}
        }
        if r.norm < 0.0 || r.norm > 1.0 + tol {
            fail(&format!("norm {} outside [0, 1]", r.norm));
        }
    }
    ValidationReport {
        rows: rows.len(),
        violations,
    }
}

pub fn validate_file(path: &Path) -> Result<ValidationReport> {
    let mut text = String::new();
    std::fs::File::open(path)?.read_to_string(&mut text)?;
    Ok(validate_rows(&parse_series(&text)?.rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{run_scenario, Scenario};

    fn short(id: &str) -> TimeSeries {
        let s = Scenario {
            t_max: 2.0,
            dt: 0.1,
            ..Scenario::preset(id).unwrap()
        };
        run_scenario(&s).unwrap()
    }

    #[test]
    fn csv_layout() {
        let ts = short("fig1a");
        let mut buf = Vec::new();
        write_csv(&ts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# preset=fig1a"));
        assert!(text.contains("\nt,S,W,rho_ee,rho_gg,re_rho_eg,im_rho_eg,norm,trace_deficit\n"));
        let first_row = text.lines().find(|l| l.starts_with("0.0")).unwrap();
        assert_eq!(
            first_row.split(',').next().unwrap(),
            "0.00000000000e0",
            "12 significant digits"
        );
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 21);
    }

    #[test]
    fn csv_round_trip_is_valid() {
        let ts = short("fig3b");
        let mut buf = Vec::new();
        write_csv(&ts, &mut buf).unwrap();
        let parsed = parse_series(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(parsed.rows.len(), ts.rows.len());
        assert_eq!(parsed.meta["mode"], "paper");
        for (a, b) in parsed.rows.iter().zip(&ts.rows) {
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() <= 1e-11 * y.abs().max(1e-300) + 1e-300);
            }
        }
        assert!(validate_rows(&parsed.rows).is_valid());
    }

    #[test]
    fn json_round_trip_is_valid() {
        let ts = short("fig4a");
        let mut buf = Vec::new();
        write_json(&ts, &mut buf).unwrap();
        let parsed = parse_series(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(parsed.rows, ts.rows);
        assert!(validate_rows(&parsed.rows).is_valid());
    }

    #[test]
    fn corrupted_rows_are_flagged() {
        let ts = short("fig2b");
        let mut rows = ts.rows.clone();
        rows[3].rho_ee += 0.01;
        rows[5].t = rows[4].t;
        rows[7].entropy = 0.9;
        let report = validate_rows(&rows);
        assert!(!report.is_valid());
        assert!(report.violations.len() >= 3, "{:?}", report.violations);
        assert!(!validate_rows(&[]).is_valid());
    }

    #[test]
    fn wrong_columns_are_rejected() {
        assert!(matches!(parse_series("a,b\n1,2\n"), Err(Error::Format(_))));
    }
}
