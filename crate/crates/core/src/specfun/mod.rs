//! Gamma, Kummer M and Tricomi U for real parameters.
//!
//! The Tricomi function is evaluated from two Kummer series through the
//! connection formula for moderate arguments and from its large-argument
//! asymptotic series beyond [`EvalPolicy::asymptotic_switch`]. Both paths
//! accumulate in double-double so the cancellation between the two Kummer
//! terms (severe when `a` sits near a negative integer) does not eat the
//! result.

pub(crate) mod dd;
mod gamma;
mod kummer;
mod tricomi;

pub use gamma::gamma;
pub use kummer::kummer_m;
pub use tricomi::{tricomi_u, TricomiEval};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("gamma has a pole at x = {x}")]
    Pole { x: f64 },
    #[error("{series} did not converge within {terms} terms")]
    NoConvergence { series: &'static str, terms: usize },
    #[error("argument outside the supported domain: {0}")]
    Domain(String),
    #[error("invalid evaluation policy: {0}")]
    InvalidPolicy(String),
}

/// Accuracy and algorithm-selection knobs for the hypergeometric functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPolicy {
    pub rel_tol: f64,
    pub max_terms: usize,
    /// Arguments at or above this use the asymptotic expansion of U.
    pub asymptotic_switch: f64,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        EvalPolicy {
            rel_tol: 1e-12,
            max_terms: 500,
            asymptotic_switch: 50.0,
        }
    }
}

impl EvalPolicy {
    pub fn new(rel_tol: f64, max_terms: usize, asymptotic_switch: f64) -> Result<Self, SpecfunError> {
        let policy = EvalPolicy {
            rel_tol,
            max_terms,
            asymptotic_switch,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<(), SpecfunError> {
        if !(self.rel_tol > 0.0) {
            return Err(SpecfunError::InvalidPolicy(format!("rel_tol = {}", self.rel_tol)));
        }
        if self.max_terms < 50 {
            return Err(SpecfunError::InvalidPolicy(format!("max_terms = {}", self.max_terms)));
        }
        if !(self.asymptotic_switch > 0.0) {
            return Err(SpecfunError::InvalidPolicy(format!(
                "asymptotic_switch = {}",
                self.asymptotic_switch
            )));
        }
        Ok(())
    }
}
