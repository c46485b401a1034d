//! Report files. Tables follow `--format`; summaries are always JSON.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

pub const OUT_DIR_ENV: &str = "QENERGY_OUT_DIR";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

pub struct Output {
    dir: PathBuf,
    format: Format,
}

impl Output {
    pub fn new(dir: Option<PathBuf>, format: Format) -> Result<Self> {
        let dir = dir
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Output { dir, format })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.dir.join(format!("{name}.json"));
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn table<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<PathBuf> {
        match self.format {
            Format::Json => self.json(name, &rows),
            Format::Csv => {
                let path = self.dir.join(format!("{name}.csv"));
                let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
                for r in rows {
                    w.serialize(r)?;
                }
                w.flush()?;
                Ok(path)
            }
        }
    }
}

/// Report envelope: resolved configuration, tool version and results.
#[derive(Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub config: &'a C,
    #[serde(flatten)]
    pub result: R,
}
