//! Golden constants with the parameters that produced them.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::OracleError;

pub const GENERATOR_VERSION: &str = concat!("trapfpt-oracle ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenEntry {
    pub quantity: String,
    pub kappa: f64,
    /// Mode index or starting point, depending on `quantity`.
    pub z_or_n: f64,
    /// Decimal string so no digits are lost to f64.
    pub value: String,
    pub digits: u32,
    pub generator_version: String,
}

impl GoldenEntry {
    pub fn value_f64(&self) -> f64 {
        self.value.parse().unwrap_or(f64::NAN)
    }
}

pub fn load_fixture(path: &Path) -> Result<Vec<GoldenEntry>, OracleError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn write_fixture(path: &Path, entries: &[GoldenEntry]) -> Result<(), OracleError> {
    let mut text = serde_json::to_string_pretty(entries)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
