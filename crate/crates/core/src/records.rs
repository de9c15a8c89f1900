//! Sweep record files.
//!
//! Records are CSV with header `target,param,value,seed,entropy`; reals are
//! written in scientific notation with 17 significant digits so they parse
//! back to the same bits. Each CSV has a TOML sidecar (`*.meta.toml`)
//! carrying the sweep spec that produced it.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::{RunRecord, SkippedPoint, SweepOutcome, SweepSpec};

pub const CSV_HEADER: [&str; 5] = ["target", "param", "value", "seed", "entropy"];

/// `x` with 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_records<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.target.as_str(),
            r.param.as_str(),
            &format_real(r.value),
            &r.seed.to_string(),
            &format_real(r.entropy),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn records_to_string(records: &[RunRecord]) -> String {
    let mut buf = Vec::new();
    write_records(&mut buf, records).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("records are ASCII")
}

fn parse_field<T: std::str::FromStr>(field: &str, what: &str, line: u64) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad {what} `{field}`")))
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().map(str::trim).ne(CSV_HEADER) {
        return Err(Error::Parse(format!(
            "unexpected header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != CSV_HEADER.len() {
            return Err(Error::Parse(format!(
                "line {line}: expected 5 fields, got {}",
                row.len()
            )));
        }
        records.push(RunRecord {
            target: row[0].trim().parse()?,
            param: row[1].trim().parse()?,
            value: parse_field(&row[2], "value", line)?,
            seed: parse_field(&row[3], "seed", line)?,
            entropy: parse_field(&row[4], "entropy", line)?,
        });
    }
    Ok(records)
}

pub fn read_records_file(path: &Path) -> Result<Vec<RunRecord>> {
    read_records(fs::File::open(path)?)
}

/// A grid point skipped during the sweep, as stored in the sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipEntry {
    pub index: usize,
    pub value: f64,
    pub reason: String,
}

impl From<&SkippedPoint> for SkipEntry {
    fn from(s: &SkippedPoint) -> Self {
        SkipEntry {
            index: s.index,
            value: s.value,
            reason: s.reason.clone(),
        }
    }
}

/// Sidecar contents for one sweep file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub version: String,
    pub records: usize,
    #[serde(default)]
    pub skipped: Vec<SkipEntry>,
    pub spec: SweepSpec,
}

impl SweepMetadata {
    pub fn new(spec: &SweepSpec, outcome: &SweepOutcome) -> Self {
        SweepMetadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            records: outcome.records.len(),
            skipped: outcome.skipped.iter().map(SkipEntry::from).collect(),
            spec: spec.clone(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("metadata serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("sweep metadata: {e}")))
    }
}

/// `dir/<target>_<param>.csv`
pub fn sweep_csv_path(dir: &Path, spec: &SweepSpec) -> PathBuf {
    dir.join(format!("{}_{}.csv", spec.target(), spec.swept_param()))
}

/// Sidecar path for a record file: `x.csv` -> `x.meta.toml`.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.toml")
}

/// Reads the sidecar next to `csv_path`, if there is one.
pub fn read_metadata_for(csv_path: &Path) -> Result<Option<SweepMetadata>> {
    let path = metadata_path(csv_path);
    match fs::read_to_string(&path) {
        Ok(text) => SweepMetadata::from_toml(&text).map(Some),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Writes the CSV and its sidecar into `dir`; returns the CSV path.
pub fn write_sweep(dir: &Path, spec: &SweepSpec, outcome: &SweepOutcome) -> Result<PathBuf> {
    let csv_path = sweep_csv_path(dir, spec);
    let mut file = fs::File::create(&csv_path)?;
    write_records(&mut file, &outcome.records)?;
    fs::write(
        metadata_path(&csv_path),
        SweepMetadata::new(spec, outcome).to_toml(),
    )?;
    Ok(csv_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{Hyperparameter, Target};
    use proptest::prelude::*;

    fn rec(value: f64, entropy: f64, seed: u64) -> RunRecord {
        RunRecord {
            target: Target::ToyEls,
            param: Hyperparameter::BufferSize,
            value,
            seed,
            entropy,
        }
    }

    #[test]
    fn header_and_format() {
        let text = records_to_string(&[rec(256.0, 5.5, 3)]);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("target,param,value,seed,entropy"));
        assert_eq!(
            lines.next(),
            Some("toy_els,buffer_size,2.5600000000000000e2,3,5.5000000000000000e0")
        );
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(read_records("a,b\n".as_bytes()).is_err());
        assert!(
            read_records("target,param,value,seed,entropy\nfilex,alpha,x,1,2\n".as_bytes())
                .is_err()
        );
        assert!(
            read_records("target,param,value,seed,entropy\nfilex,gamma,1,1,2\n".as_bytes())
                .is_err()
        );
        assert!(read_records("target,param,value,seed,entropy\n".as_bytes())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn sidecar_path() {
        assert_eq!(
            metadata_path(Path::new("out/filex_alpha.csv")),
            PathBuf::from("out/filex_alpha.meta.toml")
        );
    }

    proptest! {
        #[test]
        fn csv_roundtrip(rows in prop::collection::vec((1e-6f64..1e6, 0.0f64..8.0, any::<u64>()), 0..30)) {
            let records: Vec<RunRecord> = rows.into_iter().map(|(v, h, s)| rec(v, h, s)).collect();
            let back = read_records(records_to_string(&records).as_bytes()).unwrap();
            prop_assert_eq!(back, records);
        }
    }
}
