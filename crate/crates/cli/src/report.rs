//! Machine-readable run reports.
//!
//! Reports are JSON objects with sorted map keys and shortest round-trip
//! float formatting, so a rerun with identical inputs and seeds produces
//! byte-identical output. Timing information goes to stderr only, keeping
//! the report stream deterministic.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub parameters: BTreeMap<String, Value>,
    pub result: Value,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: Vec::new(),
            parameters: BTreeMap::new(),
            result: Value::Null,
        }
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        let digest = hasher.finalize();
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex,
        });
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    pub fn print(&self) -> Result<()> {
        let text = serde_json::to_string_pretty(self).context("report serialization")?;
        println!("{text}");
        Ok(())
    }
}

/// Values keyed by state name, ready for a sorted-map report.
pub fn named_values(states: &[String], values: &[f64]) -> Value {
    let map: BTreeMap<String, f64> = states
        .iter()
        .cloned()
        .zip(values.iter().copied())
        .collect();
    serde_json::to_value(map).expect("value map")
}
