//! Reference computations that share no numerics with the main solver.
//!
//! Eigenvalues and mode constants come from multiprecision summation of the
//! confluent series; the mean first-passage time from the double integral
//! solving the backward equation with a unit source; survival from a direct
//! finite-difference solve of the dimensionless backward equation
//! `∂S/∂t = (1/(2κ)) S'' + (1/(κz) - z) S'` on `[1, z_max]`.
//!
//! Everything here is slow on purpose. Each call is self-contained, so callers
//! may run several concurrently.

mod fixture;
mod mfpt;
mod mp;
mod pde;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fixture::{load_fixture, write_fixture, GoldenEntry, GENERATOR_VERSION};
pub use mfpt::{mfpt_integral, LOG_GUARD};
pub use mp::{highprec_alpha, highprec_alphas, highprec_mode, highprec_psi, highprec_tricomi, HighPrecMode};
pub use pde::{pde_survival, pde_survival_raw};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(String),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("working precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("kappa z^2 = {exponent} exceeds the log-space guard of {guard}")]
    OverflowGuard { exponent: f64, guard: f64 },
    #[error("grid too coarse: Richardson estimate {estimate:e} above {limit:e}")]
    GridTooCoarse { estimate: f64, limit: f64 },
    #[error("fixture i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("fixture format: {0}")]
    Format(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeGrid {
    /// Far boundary; `None` picks `max(20, 6/sqrt(kappa))`.
    pub z_max: Option<f64>,
    pub nodes: usize,
    /// Step in t/τ.
    pub time_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Decimal digits carried by the multiprecision paths.
    pub digits: u32,
    pub pde_grid: PdeGrid,
    /// Gauss-Legendre panels per integration range in the double integral.
    pub quad_points: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            digits: 50,
            pde_grid: PdeGrid {
                z_max: None,
                nodes: 400,
                time_step: 1e-3,
            },
            quad_points: 50,
        }
    }
}

impl OracleConfig {
    pub fn with_digits(digits: u32) -> Self {
        OracleConfig {
            digits,
            ..OracleConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.digits < 30 {
            return Err(OracleError::InvalidConfig(format!("digits must be at least 30, got {}", self.digits)));
        }
        let g = &self.pde_grid;
        if g.nodes < 200 {
            return Err(OracleError::InvalidConfig(format!("pde nodes must be at least 200, got {}", g.nodes)));
        }
        if !(g.time_step > 0.0 && g.time_step.is_finite()) {
            return Err(OracleError::InvalidConfig("pde time step must be positive".into()));
        }
        if let Some(z) = g.z_max {
            if !(z > 1.0 && z.is_finite()) {
                return Err(OracleError::InvalidConfig(format!("pde z_max must exceed 1, got {z}")));
            }
        }
        if self.quad_points == 0 {
            return Err(OracleError::InvalidConfig("quad_points must be positive".into()));
        }
        Ok(())
    }

    /// Binary precision matching `digits`, plus a little slack.
    pub(crate) fn bits(&self) -> u32 {
        (f64::from(self.digits) * std::f64::consts::LOG2_10).ceil() as u32 + 16
    }
}

pub(crate) fn check_kappa(kappa: f64) -> Result<(), OracleError> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(OracleError::Domain(format!("kappa must be positive, got {kappa}")));
    }
    Ok(())
}
