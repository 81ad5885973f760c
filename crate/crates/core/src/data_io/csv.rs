//! Comma-separated datasets.
//!
//! One column holds the class label; every other column must be a finite
//! number. Blank cells are rejected rather than imputed.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    /// Requires a header row.
    Name(String),
    Last,
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// Integers select by index, `last` (or `-1`) the final column, anything else by name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "last" | "-1" => LabelColumn::Last,
            _ => match s.parse() {
                Ok(i) => LabelColumn::Index(i),
                Err(_) => LabelColumn::Name(s.to_string()),
            },
        })
    }
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub has_header: bool,
    pub label_column: LabelColumn,
    /// When set, labels must be integers in `0..n_classes` and are used as-is.
    /// Otherwise the distinct labels are sorted and numbered from zero.
    pub n_classes: Option<usize>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            has_header: true,
            label_column: LabelColumn::Last,
            n_classes: None,
        }
    }
}

/// Class index to original label text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    pub labels: Vec<String>,
}

impl LabelMap {
    pub fn identity(n_classes: usize) -> Self {
        LabelMap {
            labels: (0..n_classes).map(|k| k.to_string()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("label map serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LoadedCsv {
    pub dataset: Dataset,
    pub label_map: LabelMap,
    pub feature_names: Vec<String>,
}

pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<LoadedCsv> {
    let file = File::open(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    read_csv(file, options)
}

pub fn read_csv<R: Read>(reader: R, options: &CsvOptions) -> Result<LoadedCsv> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(options.has_header)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers: Option<Vec<String>> = if options.has_header {
        let h = rdr.headers().map_err(csv_error)?;
        Some(h.iter().map(str::to_string).collect())
    } else {
        None
    };

    let mut label_col: Option<usize> = None;
    let mut width: Option<usize> = None;
    let mut features = Vec::new();
    let mut raw_labels: Vec<(u64, String)> = Vec::new();

    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(Error::Load {
                line,
                column: record.len(),
                message: format!("expected {w} columns, found {}", record.len()),
            });
        }
        let lc = match label_col {
            Some(c) => c,
            None => {
                let c = resolve_label_column(&options.label_column, headers.as_deref(), w)?;
                label_col = Some(c);
                c
            }
        };
        for (column, cell) in record.iter().enumerate() {
            if column == lc {
                if cell.is_empty() {
                    return Err(Error::Load {
                        line,
                        column,
                        message: "missing label".into(),
                    });
                }
                raw_labels.push((line, cell.to_string()));
                continue;
            }
            features.push(parse_feature(cell, line, column)?);
        }
    }

    let Some(width) = width else {
        return Err(Error::Empty("csv file has no data rows"));
    };
    if width < 2 {
        return Err(Error::InvalidArgument(
            "csv needs a label column and at least one feature column".into(),
        ));
    }
    let lc = label_col.expect("set with the first row");
    let (labels, label_map) = encode_labels(&raw_labels, options.n_classes, lc)?;
    let n_classes = label_map.labels.len();
    let feature_names = match headers {
        Some(h) => h
            .into_iter()
            .enumerate()
            .filter(|&(i, _)| i != lc)
            .map(|(_, n)| n)
            .collect(),
        None => (0..width - 1).map(|i| format!("f{i}")).collect(),
    };
    let dataset = Dataset::new(features, labels, width - 1, n_classes)?;
    Ok(LoadedCsv {
        dataset,
        label_map,
        feature_names,
    })
}

fn csv_error(e: csv::Error) -> Error {
    match e.position() {
        Some(p) => Error::Load {
            line: p.line(),
            column: 0,
            message: e.to_string(),
        },
        None => Error::Io(e.to_string()),
    }
}

fn resolve_label_column(col: &LabelColumn, headers: Option<&[String]>, width: usize) -> Result<usize> {
    let c = match col {
        LabelColumn::Last => width - 1,
        LabelColumn::Index(i) => *i,
        LabelColumn::Name(name) => headers
            .and_then(|h| h.iter().position(|x| x == name))
            .ok_or_else(|| Error::InvalidArgument(format!("no column named {name:?}")))?,
    };
    if c >= width {
        return Err(Error::InvalidArgument(format!(
            "label column {c} is out of range for {width} columns"
        )));
    }
    Ok(c)
}

fn parse_feature(cell: &str, line: u64, column: usize) -> Result<f64> {
    if cell.is_empty() {
        return Err(Error::Load {
            line,
            column,
            message: "missing value".into(),
        });
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(Error::Load {
            line,
            column,
            message: format!("non-finite value {cell:?}"),
        }),
        Err(_) => Err(Error::Load {
            line,
            column,
            message: format!("not a number: {cell:?}"),
        }),
    }
}

fn encode_labels(raw: &[(u64, String)], declared: Option<usize>, column: usize) -> Result<(Vec<usize>, LabelMap)> {
    if let Some(k) = declared {
        if k < 2 {
            return Err(Error::InvalidArgument("n_classes must be at least 2".into()));
        }
        let labels = raw
            .iter()
            .map(|(line, s)| match s.parse::<usize>() {
                Ok(v) if v < k => Ok(v),
                _ => Err(Error::Load {
                    line: *line,
                    column,
                    message: format!("unknown label {s:?} for {k} declared classes"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok((labels, LabelMap::identity(k)));
    }

    let distinct: BTreeSet<&str> = raw.iter().map(|(_, s)| s.as_str()).collect();
    let mut names: Vec<&str> = distinct.into_iter().collect();
    if names.iter().all(|s| s.parse::<i64>().is_ok()) {
        names.sort_by_key(|s| s.parse::<i64>().expect("checked"));
    }
    if names.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least two distinct labels, found {}",
            names.len()
        )));
    }
    let labels = raw
        .iter()
        .map(|(_, s)| names.iter().position(|n| n == s).expect("label is in the dictionary"))
        .collect();
    Ok((
        labels,
        LabelMap {
            labels: names.into_iter().map(str::to_string).collect(),
        },
    ))
}

/// Writes `data` with the label as the last column. Values are printed in
/// shortest round-trip form, so reloading reproduces them bit for bit.
pub fn write_csv<W: Write>(data: &Dataset, writer: W, header: bool) -> Result<()> {
    let mut w = BufWriter::new(writer);
    if header {
        let names: Vec<String> = (0..data.n_features()).map(|i| format!("f{i}")).collect();
        writeln!(w, "{},label", names.join(","))?;
    }
    for (x, y) in data.rows().zip(data.labels()) {
        for v in x {
            write!(w, "{v},")?;
        }
        writeln!(w, "{y}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(data: &Dataset, path: impl AsRef<Path>, header: bool) -> Result<()> {
    write_csv(data, File::create(path)?, header)
}
