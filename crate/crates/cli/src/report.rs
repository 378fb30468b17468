//! Run summary written as `report.json`.
//!
//! Keys keep insertion order, so identical runs give identical files apart
//! from the trailing `timings_ms` block.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::heatmap::HeatmapBounds;

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub format: &'static str,
    pub dims: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeatmapFile {
    pub file: String,
    pub source: String,
    pub bounds: HeatmapBounds,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub version: &'static str,
    pub parameters: Map<String, Value>,
    pub outputs: Vec<OutputFile>,
    pub heatmaps: Vec<HeatmapFile>,
    pub metrics: Map<String, Value>,
    pub timings_ms: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            parameters: Map::new(),
            outputs: Vec::new(),
            heatmaps: Vec::new(),
            metrics: Map::new(),
            timings_ms: Map::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    pub fn metric(&mut self, key: &str, value: impl Into<Value>) {
        self.metrics.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
