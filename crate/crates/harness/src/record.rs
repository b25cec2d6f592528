//! JSON-lines result records and the append-only result cache.

use crate::config::RunConfig;
use crate::error::Result;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// One result line. Field order is the serialized order, `schema_version` first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultLine {
    pub schema_version: u32,
    pub timestamp: String,
    pub subcommand: String,
    pub parameters: BTreeMap<String, String>,
    pub outputs: Value,
    pub candidates_examined: u64,
    pub elapsed_ms: u64,
}

impl ResultLine {
    pub fn new(config: &RunConfig, outputs: Value, candidates_examined: u64, elapsed_ms: u64) -> ResultLine {
        ResultLine {
            schema_version: SCHEMA_VERSION,
            timestamp: chrono::Utc::now().to_rfc3339(),
            subcommand: config.subcommand.clone(),
            parameters: config.parameters.clone(),
            outputs,
            candidates_examined,
            elapsed_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result lines serialize")
    }

    fn cache_key(&self) -> String {
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{} {}", self.subcommand, params.join(" "))
    }
}

/// The first cached line for this configuration, verbatim.
pub fn cache_lookup(path: &Path, config: &RunConfig) -> Result<Option<String>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let key = config.cache_key();
    for line in BufReader::new(file).lines() {
        let line = line?;
        if let Ok(rec) = serde_json::from_str::<ResultLine>(&line) {
            if rec.schema_version == SCHEMA_VERSION && rec.cache_key() == key {
                return Ok(Some(line));
            }
        }
    }
    Ok(None)
}

pub fn append_line(path: &Path, line: &str) -> Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(f, "{line}")?;
    Ok(())
}
