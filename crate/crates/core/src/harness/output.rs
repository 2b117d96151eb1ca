//! CSV and JSON forms of sweep and rate results.
//!
//! CSV files start with `# metadata: key=value` lines followed by a header row.
//! Sweeps use `decoder,snr_db,trials,errors,ser,ci_lo,ci_hi`; rates use
//! `receiver,snr_db,draws,rate,std_err`.

use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

use super::rate::{RateResult, RateRow};
use super::sweep::{SweepResult, SweepRow};

const META_PREFIX: &str = "# metadata: ";

fn write_table<W: Write, T: Serialize>(mut w: W, metadata: &[(String, String)], rows: &[T]) -> Result<()> {
    for (k, v) in metadata {
        writeln!(w, "{META_PREFIX}{k}={}", v.replace('\n', " "))?;
    }
    let mut csv = csv::Writer::from_writer(w);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(())
}

type Metadata = Vec<(String, String)>;

fn read_table<R: BufRead, T: DeserializeOwned>(r: R) -> Result<(Metadata, Vec<T>)> {
    let mut metadata = Vec::new();
    let mut body = String::new();
    for line in r.lines() {
        let line = line?;
        if let Some(rest) = line.strip_prefix(META_PREFIX) {
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("metadata line without '=': {line:?}")))?;
            metadata.push((k.to_string(), v.to_string()));
        } else if !line.starts_with('#') {
            body.push_str(&line);
            body.push('\n');
        }
    }
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let rows = reader.deserialize().collect::<std::result::Result<Vec<T>, _>>()?;
    Ok((metadata, rows))
}

impl SweepResult {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_table(w, &self.metadata, &self.rows)
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let (metadata, rows) = read_table::<_, SweepRow>(r)?;
        Ok(Self {
            metadata,
            rows,
            wall_time_s: 0.0,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl RateResult {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_table(w, &self.metadata, &self.rows)
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let (metadata, rows) = read_table::<_, RateRow>(r)?;
        let draws = rows.first().map_or(0, |r: &RateRow| r.draws);
        Ok(Self {
            metadata,
            rows,
            draws,
            wall_time_s: 0.0,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_csv_round_trip() {
        let result = SweepResult {
            metadata: vec![("seed".into(), "7".into()), ("d_min".into(), "6".into())],
            rows: vec![SweepRow::new("ml", 2.5, 1000, 17), SweepRow::new("hamming", 2.5, 1000, 40)],
            wall_time_s: 1.5,
        };
        let text = result.to_csv_string().unwrap();
        assert!(text.starts_with("# metadata: seed=7\n# metadata: d_min=6\ndecoder,snr_db,trials,errors,ser,ci_lo,ci_hi\n"));
        assert!(!text.contains("1.5"));
        let back = SweepResult::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back.metadata, result.metadata);
        assert_eq!(back.rows, result.rows);
    }

    #[test]
    fn rate_csv_header() {
        let result = RateResult {
            metadata: vec![],
            rows: vec![RateRow {
                receiver: "coded".into(),
                snr_db: 0.0,
                draws: 10,
                rate: 1.25,
                std_err: 0.01,
            }],
            draws: 10,
            wall_time_s: 0.0,
        };
        let text = result.to_csv_string().unwrap();
        assert!(text.starts_with("receiver,snr_db,draws,rate,std_err\n"));
        assert_eq!(RateResult::read_csv(text.as_bytes()).unwrap().rows, result.rows);
    }
}
