//! CSV tables: one curve per file with `#` metadata lines.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use ftr_noma::montecarlo::SweepResult;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const COLUMNS: [&str; 7] = ["gamma_bar_db", "value", "ci_lo", "ci_hi", "kind", "user", "metric"];

/// One grid point of a curve. Intervals are present only for simulated curves.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub gamma_bar_db: f64,
    pub value: f64,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
}

/// A curve: rows sharing (kind, user, metric), plus free-form metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub kind: String,
    pub user: String,
    pub metric: String,
    pub meta: Vec<(String, String)>,
    pub rows: Vec<Row>,
}

#[derive(Serialize, Deserialize)]
struct Record {
    gamma_bar_db: String,
    value: String,
    ci_lo: String,
    ci_hi: String,
    kind: String,
    user: String,
    metric: String,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_num(field: &str, s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Format(format!("column {field}: `{s}` is not a number")))
}

impl Table {
    pub fn analytic(kind: &str, user: &str, metric: &str, axis: &[f64], values: &[f64]) -> Self {
        Self {
            kind: kind.into(),
            user: user.into(),
            metric: metric.into(),
            meta: Vec::new(),
            rows: axis
                .iter()
                .zip(values)
                .map(|(g, v)| Row {
                    gamma_bar_db: *g,
                    value: *v,
                    ci_lo: None,
                    ci_hi: None,
                })
                .collect(),
        }
    }

    pub fn from_sweep(sweep: &SweepResult, user: &str) -> Self {
        let m = &sweep.meta;
        let mut meta = vec![
            ("fingerprint".to_string(), format!("{:016x}", m.fingerprint)),
            ("seed".to_string(), m.seed.to_string()),
            ("n_samples".to_string(), m.n_samples.to_string()),
            ("scheme".to_string(), m.scheme.name().to_string()),
            ("antennas".to_string(), format!("{}x{}", m.antennas.tx, m.antennas.rx)),
        ];
        if let Some(th) = m.gamma_th {
            meta.push(("gamma_th".to_string(), th.to_string()));
        }
        Self {
            kind: "monte_carlo".into(),
            user: user.into(),
            metric: sweep.metric.name().into(),
            meta,
            rows: (0..sweep.len())
                .map(|i| Row {
                    gamma_bar_db: sweep.axis[i],
                    value: sweep.estimate[i],
                    ci_lo: Some(sweep.ci_lo[i]),
                    ci_hi: Some(sweep.ci_hi[i]),
                })
                .collect(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn axis(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.gamma_bar_db).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        for (k, v) in &self.meta {
            writeln!(out, "# {k}={v}").map_err(CliError::write)?;
        }
        // header comes from the record's field names, which match COLUMNS
        let mut w = csv::Writer::from_writer(out);
        if self.rows.is_empty() {
            w.write_record(COLUMNS).map_err(CliError::csv)?;
        }
        for r in &self.rows {
            w.serialize(Record {
                gamma_bar_db: fmt(r.gamma_bar_db),
                value: fmt(r.value),
                ci_lo: r.ci_lo.map(fmt).unwrap_or_default(),
                ci_hi: r.ci_hi.map(fmt).unwrap_or_default(),
                kind: self.kind.clone(),
                user: self.user.clone(),
                metric: self.metric.clone(),
            })
            .map_err(CliError::csv)?;
        }
        w.flush().map_err(CliError::write)?;
        Ok(())
    }

    pub fn read<R: std::io::Read>(input: R) -> Result<Self, CliError> {
        let mut reader = BufReader::new(input);
        let mut meta = Vec::new();
        let mut body = String::new();
        let mut line = String::new();
        while reader.read_line(&mut line).map_err(CliError::write)? > 0 {
            if let Some(rest) = line.strip_prefix("# ") {
                let (k, v) = rest
                    .trim_end()
                    .split_once('=')
                    .ok_or_else(|| CliError::Format(format!("bad metadata line `{}`", line.trim_end())))?;
                meta.push((k.to_string(), v.to_string()));
            } else {
                body.push_str(&line);
            }
            line.clear();
        }
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let headers = rdr.headers().map_err(CliError::csv)?.clone();
        if headers.iter().ne(COLUMNS) {
            return Err(CliError::Format(format!("unexpected header {headers:?}")));
        }
        let mut rows = Vec::new();
        let mut ident: Option<(String, String, String)> = None;
        for rec in rdr.deserialize::<Record>() {
            let rec = rec.map_err(CliError::csv)?;
            let opt = |field: &str, s: &str| -> Result<Option<f64>, CliError> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    parse_num(field, s).map(Some)
                }
            };
            rows.push(Row {
                gamma_bar_db: parse_num("gamma_bar_db", &rec.gamma_bar_db)?,
                value: parse_num("value", &rec.value)?,
                ci_lo: opt("ci_lo", &rec.ci_lo)?,
                ci_hi: opt("ci_hi", &rec.ci_hi)?,
            });
            let id = (rec.kind, rec.user, rec.metric);
            match &ident {
                None => ident = Some(id),
                Some(prev) if *prev != id => return Err(CliError::Format("mixed curves in one table".into())),
                _ => {}
            }
        }
        let (kind, user, metric) = ident.unwrap_or_default();
        Ok(Self {
            kind,
            user,
            metric,
            meta,
            rows,
        })
    }

    pub fn read_path(path: &Path) -> Result<Self, CliError> {
        let f = File::open(path).map_err(|e| CliError::io(path, e))?;
        Self::read(f)
    }
}
