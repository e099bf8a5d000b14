use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::recon::MSE_FLOOR_DB;

use super::config::config_hash;

/// Provenance written as the first CSV line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metadata {
    pub config_hash: u64,
    pub seed: u64,
    pub version: &'static str,
}

impl Metadata {
    pub fn for_config<T: Serialize>(config: &T, seed: u64) -> Self {
        Self { config_hash: config_hash(config), seed, version: env!("CARGO_PKG_VERSION") }
    }

    pub fn comment_line(&self) -> String {
        format!(
            "# config-hash={:016x}, seed={}, version={}",
            self.config_hash, self.seed, self.version
        )
    }
}

/// Rows of one experiment plus the metadata line.
#[derive(Debug, Clone, PartialEq)]
pub struct Table<R> {
    pub metadata: Metadata,
    pub rows: Vec<R>,
}

impl<R: Serialize> Table<R> {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.metadata.comment_line())?;
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(BufWriter::new(File::create(path)?))
    }
}

/// Decibels of a linear mean squared error, floored like `mse_db`.
pub fn linear_to_db(mse: f64) -> f64 {
    if mse > 0.0 {
        (10.0 * mse.log10()).max(MSE_FLOOR_DB)
    } else {
        MSE_FLOOR_DB
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Median under the IEEE total order; infinities are kept.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = v.len() / 2;
    if v.len() % 2 == 1 {
        v[h]
    } else {
        0.5 * (v[h - 1] + v[h])
    }
}
