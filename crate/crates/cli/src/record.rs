//! Machine-readable run records.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// A floating-point result with its absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub tolerance: f64,
}

impl Measured {
    pub fn new(value: f64, tolerance: f64) -> Self {
        Measured { value, tolerance }
    }

    pub fn exact(value: f64) -> Self {
        Measured { value, tolerance: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tube: String,
    pub command: String,
    pub tolerances: BTreeMap<String, f64>,
    /// Seconds since the Unix epoch; only present when requested.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub id: u32,
    pub size: usize,
    pub period: u32,
    pub hamiltonian: bool,
    pub lambda: Measured,
    pub rate: Measured,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthPayload {
    pub state_space: String,
    pub pattern_count: usize,
    pub kappa_h: Measured,
    pub next_largest: Option<Measured>,
    pub components: Vec<ComponentRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyRow {
    pub f: f64,
    pub free_energy: Measured,
    pub lower: Measured,
    pub upper: Measured,
}

/// Integer table with every cell rendered as a decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    pub class: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<Measured>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Growth(GrowthPayload),
    FreeEnergy { rows: Vec<FreeEnergyRow> },
    Counts(CountTable),
    Verification { passed: bool, assertions: Vec<Assertion> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub metadata: Metadata,
    pub payload: Payload,
}

impl ResultRecord {
    pub fn new(metadata: Metadata, payload: Payload) -> Self {
        ResultRecord {
            schema_version: SCHEMA_VERSION,
            metadata,
            payload,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records always serialize");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).with_context(|| format!("writing {}", path.display()))
    }
}
