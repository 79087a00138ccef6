//! Comma-separated data files with a `#` metadata header.
//!
//! ```text
//! # qidetect roc
//! # tool_version = 0.1.0
//! # generated_unix = 1760000000
//! # model = ci
//! # config: n_s = 0.00068
//! # config: ...
//! beta,p_f,p_d,p_f_lo,p_f_hi,p_d_lo,p_d_hi,below_resolution,model
//! -1.2419180263250052e6,9.9865010196837001e-1,...
//! ```
//!
//! Floats are printed with 17 significant digits so every value reparses to
//! the same bits. `# key = value` lines are metadata; `# config: ` lines
//! carry the effective run configuration.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::montecarlo::{sample_at_phase, LabeledSeries, SamplingPhase};
use crate::roc::{Label, RocCurve, RocPoint, SampleSet};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
const CONFIG_PREFIX: &str = "config: ";

/// Scientific notation with 17 significant digits; reparses to the same bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header shared by every file the tool writes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Header {
    /// First line, e.g. `qidetect roc`.
    pub title: String,
    pub metadata: Vec<(String, String)>,
    /// Effective configuration text, one `key = value` per line.
    pub config: Option<String>,
}

impl Header {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn with_config(mut self, text: String) -> Self {
        self.config = Some(text);
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// The `#` comment block.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out
    }

    fn write(&self, out: &mut String) {
        let _ = writeln!(out, "# {}", self.title);
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k} = {v}");
        }
        if let Some(cfg) = &self.config {
            for line in cfg.lines() {
                let _ = writeln!(out, "# {CONFIG_PREFIX}{line}");
            }
        }
    }
}

/// A parsed table: header, column names, rows of raw fields with line numbers.
struct Table {
    header: Header,
    columns: Vec<String>,
    rows: Vec<(u64, Vec<String>)>,
}

fn parse_table(text: &str, origin: &Path) -> Result<Table> {
    let data_err = |line: u64, message: String| Error::Data {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut header = Header::default();
    let mut config = String::new();
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.strip_prefix(' ').unwrap_or(comment);
            if columns.is_some() {
                continue;
            }
            if let Some(cfg) = comment.strip_prefix(CONFIG_PREFIX) {
                config.push_str(cfg);
                config.push('\n');
            } else if let Some((k, v)) = comment.split_once(" = ") {
                header
                    .metadata
                    .push((k.trim().to_string(), v.trim().to_string()));
            } else if header.title.is_empty() && header.metadata.is_empty() {
                header.title = comment.to_string();
            }
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        match &columns {
            None => columns = Some(fields),
            Some(cols) => {
                if fields.len() != cols.len() {
                    return Err(data_err(
                        line_no,
                        format!("expected {} fields, found {}", cols.len(), fields.len()),
                    ));
                }
                rows.push((line_no, fields));
            }
        }
    }
    if !config.is_empty() {
        header.config = Some(config);
    }
    let columns = columns.ok_or_else(|| data_err(1, "no column header row".into()))?;
    Ok(Table {
        header,
        columns,
        rows,
    })
}

impl Table {
    fn column(&self, name: &str, origin: &Path) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Data {
                path: origin.to_path_buf(),
                line: 1,
                message: format!(
                    "missing column `{name}` (found: {})",
                    self.columns.join(",")
                ),
            })
    }
}

fn parse_number(field: &str, line: u64, column: &str, origin: &Path) -> Result<f64> {
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Data {
            path: origin.to_path_buf(),
            line,
            message: format!("column `{column}`: `{field}` is not a finite number"),
        })
}

fn parse_opt(field: &str, line: u64, column: &str, origin: &Path) -> Result<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_number(field, line, column, origin).map(Some)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocRow {
    pub beta: f64,
    pub p_f: f64,
    pub p_d: f64,
    pub p_f_ci: Option<(f64, f64)>,
    pub p_d_ci: Option<(f64, f64)>,
    pub below_resolution: bool,
    pub model: String,
}

impl RocRow {
    pub fn from_point(pt: &RocPoint, model: &str) -> Self {
        Self {
            beta: pt.beta,
            p_f: pt.p_f,
            p_d: pt.p_d,
            p_f_ci: pt.p_f_ci,
            p_d_ci: pt.p_d_ci,
            below_resolution: pt.below_resolution,
            model: model.to_string(),
        }
    }
}

/// A ROC table as written to disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RocExport {
    pub header: Header,
    pub rows: Vec<RocRow>,
}

const ROC_COLUMNS: [&str; 9] = [
    "beta",
    "p_f",
    "p_d",
    "p_f_lo",
    "p_f_hi",
    "p_d_lo",
    "p_d_hi",
    "below_resolution",
    "model",
];

impl RocExport {
    pub fn from_curve(header: Header, curve: &RocCurve, model: &str) -> Self {
        Self {
            header,
            rows: curve
                .points
                .iter()
                .map(|p| RocRow::from_point(p, model))
                .collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.header.write(&mut out);
        out.push_str(&ROC_COLUMNS.join(","));
        out.push('\n');
        let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                fmt_f64(r.beta),
                fmt_f64(r.p_f),
                fmt_f64(r.p_d),
                opt(r.p_f_ci.map(|c| c.0)),
                opt(r.p_f_ci.map(|c| c.1)),
                opt(r.p_d_ci.map(|c| c.0)),
                opt(r.p_d_ci.map(|c| c.1)),
                u8::from(r.below_resolution),
                r.model
            );
        }
        out
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let table = parse_table(text, origin)?;
        let idx: Vec<usize> = ROC_COLUMNS
            .iter()
            .map(|c| table.column(c, origin))
            .collect::<Result<_>>()?;
        let mut rows = Vec::with_capacity(table.rows.len());
        for (line, f) in &table.rows {
            let num = |k: usize| parse_number(&f[idx[k]], *line, ROC_COLUMNS[k], origin);
            let opt = |k: usize| parse_opt(&f[idx[k]], *line, ROC_COLUMNS[k], origin);
            let pair = |a: Option<f64>, b: Option<f64>| a.zip(b);
            let below = match f[idx[7]].as_str() {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::Data {
                        path: origin.to_path_buf(),
                        line: *line,
                        message: format!("column `below_resolution`: `{other}` is not 0 or 1"),
                    })
                }
            };
            rows.push(RocRow {
                beta: num(0)?,
                p_f: num(1)?,
                p_d: num(2)?,
                p_f_ci: pair(opt(3)?, opt(4)?),
                p_d_ci: pair(opt(5)?, opt(6)?),
                below_resolution: below,
                model: f[idx[8]].clone(),
            });
        }
        Ok(Self {
            header: table.header,
            rows,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_text())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?, path)
    }
}

/// Writes one value per decision.
pub fn decisions_to_text(header: &Header, set: &SampleSet) -> String {
    let mut out = String::new();
    header.write(&mut out);
    out.push_str("value\n");
    for v in set.values() {
        out.push_str(&fmt_f64(*v));
        out.push('\n');
    }
    out
}

/// Writes a trace as `time,value,window_end`.
pub fn series_to_text(header: &Header, series: &LabeledSeries) -> String {
    let mut out = String::new();
    header.write(&mut out);
    out.push_str("time,value,window_end\n");
    let mut marks = series.decision_marks.iter().peekable();
    for (i, (t, v)) in series.times.iter().zip(&series.values).enumerate() {
        let end = if marks.peek() == Some(&&i) {
            marks.next();
            1
        } else {
            0
        };
        let _ = writeln!(out, "{},{},{end}", fmt_f64(*t), fmt_f64(*v));
    }
    out
}

/// Reads a detector data set for hypothesis `expected`.
///
/// Accepts a decision file (a `value` column) or a trace
/// (`time,value,window_end`), which is reduced to one decision per
/// modulation period at phase 0. A `# label = ` header that disagrees with
/// `expected` is an error; files without one are taken at their word.
pub fn read_samples(path: &Path, expected: Label) -> Result<SampleSet> {
    let text = read_text(path)?;
    parse_samples(&text, path, expected)
}

pub fn parse_samples(text: &str, origin: &Path, expected: Label) -> Result<SampleSet> {
    let table = parse_table(text, origin)?;
    if let Some(tag) = table.header.get("label") {
        let label: Label = tag.parse().map_err(|_| Error::Data {
            path: origin.to_path_buf(),
            line: 1,
            message: format!("unknown label `{tag}`"),
        })?;
        if label != expected {
            return Err(Error::Data {
                path: origin.to_path_buf(),
                line: 1,
                message: format!(
                    "data set is labelled {} but was given as the {} set",
                    label.tag(),
                    expected.tag()
                ),
            });
        }
    }
    let value_col = table.column("value", origin)?;
    let mut values = Vec::with_capacity(table.rows.len());
    for (line, f) in &table.rows {
        values.push(parse_number(&f[value_col], *line, "value", origin)?);
    }

    let samples = if table.columns.iter().any(|c| c == "window_end") {
        let end_col = table.column("window_end", origin)?;
        let time_col = table.column("time", origin)?;
        let mut times = Vec::with_capacity(values.len());
        let mut marks = Vec::new();
        for (i, (line, f)) in table.rows.iter().enumerate() {
            times.push(parse_number(&f[time_col], *line, "time", origin)?);
            if parse_number(&f[end_col], *line, "window_end", origin)? != 0.0 {
                marks.push(i);
            }
        }
        let series = LabeledSeries {
            label: expected,
            times,
            values,
            decision_marks: marks,
        };
        sample_at_phase(&series, SamplingPhase::Zero)?
            .values()
            .to_vec()
    } else {
        values
    };
    SampleSet::new(expected, samples).map_err(|e| Error::Data {
        path: origin.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })
}
