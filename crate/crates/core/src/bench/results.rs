//! Results files: `#`-prefixed `key=value` metadata lines followed by a CSV
//! table with one [`BenchRecord`] per row. Floats are written in shortest
//! round-trip form, so loading restores every field exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::run::BenchRecord;
use crate::ensemble::NODE_BYTES;
use crate::error::{Error, Result};

pub const RESULTS_FORMAT: &str = "stream-forest-results/1";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultsFile {
    /// Metadata in file order.
    pub metadata: Vec<(String, String)>,
    pub records: Vec<BenchRecord>,
}

impl ResultsFile {
    /// Starts a file with the format, library version, and node-size constant.
    pub fn new(records: Vec<BenchRecord>) -> Self {
        ResultsFile {
            metadata: vec![
                ("format".into(), RESULTS_FORMAT.into()),
                ("version".into(), env!("CARGO_PKG_VERSION").into()),
                ("node_bytes".into(), NODE_BYTES.to_string()),
            ],
            records,
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = BufWriter::new(writer);
        for (k, v) in &self.metadata {
            if k.contains(['=', '\n']) || v.contains('\n') {
                return Err(Error::Format(format!("metadata entry {k:?} cannot be written")));
            }
            writeln!(w, "# {k}={v}")?;
        }
        {
            let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(&mut w);
            csv.write_record(HEADER).map_err(csv_err)?;
            for r in &self.records {
                csv.serialize(r).map_err(csv_err)?;
            }
            csv.flush()?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut metadata = Vec::new();
        let mut table = String::new();
        for line in BufReader::new(reader).lines() {
            let line = line?;
            match line.strip_prefix('#') {
                Some(meta) => {
                    let (k, v) = meta
                        .trim_start()
                        .split_once('=')
                        .ok_or_else(|| Error::Format(format!("bad metadata line {line:?}")))?;
                    metadata.push((k.to_string(), v.to_string()));
                }
                None => {
                    table.push_str(&line);
                    table.push('\n');
                }
            }
        }
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(table.as_bytes());
        let headers = rdr.headers().map_err(csv_err)?.clone();
        if !headers.is_empty() && headers.iter().ne(HEADER.iter().copied()) {
            return Err(Error::Format(format!("unexpected results header {headers:?}")));
        }
        let records = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<BenchRecord>, _>>()
            .map_err(csv_err)?;
        Ok(ResultsFile { metadata, records })
    }
}

const HEADER: [&str; 8] = [
    "algorithm",
    "dataset",
    "run",
    "batch",
    "sample_size",
    "accuracy",
    "train_seconds",
    "node_count",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn emit_results(results: &ResultsFile, path: impl AsRef<Path>) -> Result<()> {
    results.write(File::create(path)?)
}

pub fn load_results(path: impl AsRef<Path>) -> Result<ResultsFile> {
    ResultsFile::read(File::open(path)?)
}

/// Rows with the wall-time column removed, for comparing runs that should be
/// identical apart from timing.
pub fn rows_without_timing(records: &[BenchRecord]) -> Vec<String> {
    records
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{}",
                r.algorithm, r.dataset, r.run, r.batch, r.sample_size, r.accuracy, r.node_count
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::Algorithm;

    fn record(acc: f64, secs: f64) -> BenchRecord {
        BenchRecord {
            algorithm: Algorithm::Sdf,
            dataset: "a,b".into(),
            run: 1,
            batch: 2,
            sample_size: 200,
            accuracy: acc,
            train_seconds: secs,
            node_count: 17,
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let file =
            ResultsFile::new(vec![record(0.1 + 0.2, 1e-9 / 3.0), record(2.0 / 3.0, 12345.678)]).with_meta("seed", 7);
        let mut buf = Vec::new();
        file.write(&mut buf).unwrap();
        let back = ResultsFile::read(buf.as_slice()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.meta("seed"), Some("7"));
        assert_eq!(back.meta("node_bytes"), Some("64"));
    }

    #[test]
    fn empty_results_have_only_a_header() {
        let file = ResultsFile::new(vec![]);
        let mut buf = Vec::new();
        file.write(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1);
        assert_eq!(ResultsFile::read(buf.as_slice()).unwrap().records, vec![]);
    }

    #[test]
    fn rejects_foreign_tables() {
        assert!(ResultsFile::read("x,y\n1,2\n".as_bytes()).is_err());
        assert!(ResultsFile::read("# nokey\n".as_bytes()).is_err());
    }
}
