//! Series solutions for the survival probability, first-passage density and
//! mean first-passage time, all with time measured in units of τ = ζ/k.
//!
//! With amplitudes `A_n(z) = c_n ψ_n(z)`:
//! `S(t|z) = Σ A_n e^{-2α_n t}`, `P(t|z) = Σ 2α_n A_n e^{-2α_n t}` and
//! `μ(z)/τ = Σ A_n / (2α_n)`.

mod params;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{EigenSystem, SpectralError};

pub use params::{Dimensionless, EquilibriumStats, TrapParams, BOLTZMANN, EINSTEIN_TOLERANCE};

#[derive(Debug, Error)]
pub enum SolutionError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("invalid trap parameters: {0}")]
    InvalidParams(String),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("curve abscissa must be strictly increasing and values finite")]
    MalformedCurve,
}

/// Below this time the survival series needs at least `FULL_TERMS` modes.
pub const TRUNCATION_TIME: f64 = 0.2;
pub const FULL_TERMS: usize = 50;
/// Below this time the density series is not trusted at any truncation used here.
pub const EARLY_TIME: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesFlag {
    /// Survival evaluated before `TRUNCATION_TIME` with fewer than `FULL_TERMS` modes.
    TruncationWarning,
    /// Density evaluated before `EARLY_TIME`.
    EarlyTimeUnreliable,
}

/// One series evaluation. `raw` is the truncated sum; `reported` is what
/// output layers should print (clamped to [0, 1] for survival).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub raw: f64,
    pub reported: f64,
    pub flag: Option<SeriesFlag>,
}

/// Mode amplitudes c_n ψ_n(z) at a fixed starting point, ready for repeated
/// evaluation over a time grid.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub z: f64,
    rates: Vec<f64>,
    amplitudes: Vec<f64>,
}

impl Expansion {
    /// Uses the first `terms` modes of `system` (all of them if fewer).
    pub fn new(system: &EigenSystem, z: f64, terms: usize) -> Result<Self, SolutionError> {
        if !(z >= 1.0) || !z.is_finite() {
            return Err(SolutionError::Domain(format!("z must be at least 1, got {z}")));
        }
        let amplitudes = system.amplitudes(z, terms)?;
        let rates = system.modes[..amplitudes.len()].iter().map(|m| m.lambda_tau).collect();
        Ok(Expansion { z, rates, amplitudes })
    }

    pub fn terms(&self) -> usize {
        self.amplitudes.len()
    }

    fn check_time(t: f64) -> Result<(), SolutionError> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(SolutionError::Domain(format!("t/τ must be non-negative, got {t}")));
        }
        Ok(())
    }

    pub fn survival(&self, t: f64) -> Result<SeriesPoint, SolutionError> {
        Self::check_time(t)?;
        let raw: f64 = self
            .rates
            .iter()
            .zip(&self.amplitudes)
            .map(|(r, a)| a * (-r * t).exp())
            .sum();
        let flag = (t < TRUNCATION_TIME && self.terms() < FULL_TERMS).then_some(SeriesFlag::TruncationWarning);
        Ok(SeriesPoint {
            raw,
            reported: raw.clamp(0.0, 1.0),
            flag,
        })
    }

    pub fn density(&self, t: f64) -> Result<SeriesPoint, SolutionError> {
        Self::check_time(t)?;
        let raw: f64 = self
            .rates
            .iter()
            .zip(&self.amplitudes)
            .map(|(r, a)| r * a * (-r * t).exp())
            .sum();
        let flag = (t < EARLY_TIME).then_some(SeriesFlag::EarlyTimeUnreliable);
        Ok(SeriesPoint {
            raw,
            reported: raw,
            flag,
        })
    }

    /// μ/τ.
    pub fn mfpt(&self) -> f64 {
        self.rates.iter().zip(&self.amplitudes).map(|(r, a)| a / r).sum()
    }
}

pub fn survival(system: &EigenSystem, z: f64, t_over_tau: f64) -> Result<SeriesPoint, SolutionError> {
    Expansion::new(system, z, system.len())?.survival(t_over_tau)
}

/// First-passage density in units of 1/τ.
pub fn fpt_density(system: &EigenSystem, z: f64, t_over_tau: f64) -> Result<SeriesPoint, SolutionError> {
    Expansion::new(system, z, system.len())?.density(t_over_tau)
}

/// Mean first-passage time in units of τ.
pub fn mfpt(system: &EigenSystem, z: f64) -> Result<f64, SolutionError> {
    Ok(Expansion::new(system, z, system.len())?.mfpt())
}

/// Probability of never reaching the sphere without a trap, 1 - 1/z.
pub fn escape_probability(z: f64) -> Result<f64, SolutionError> {
    if !(z >= 1.0) {
        return Err(SolutionError::Domain(format!("z must be at least 1, got {z}")));
    }
    Ok(1.0 - 1.0 / z)
}

/// c₁ψ₁(z), the amplitude of the slowest mode.
pub fn escape_amplitude(system: &EigenSystem, z: f64) -> Result<f64, SolutionError> {
    if !(z >= 1.0) {
        return Err(SolutionError::Domain(format!("z must be at least 1, got {z}")));
    }
    Ok(system.mode(1)?.amp * system.eigenfunction(1, z)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Survival,
    Density,
    Mfpt,
    Empirical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub kappa: f64,
    /// Starting point; `None` for curves whose abscissa is z.
    pub z: Option<f64>,
    pub terms: usize,
    pub kind: CurveKind,
}

/// Sampled curve over t/τ (or over z for MFPT curves).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub abscissa: Vec<f64>,
    pub values: Vec<f64>,
    /// Per-point flags, parallel to `values`.
    pub flags: Vec<Option<SeriesFlag>>,
    /// Standard errors for empirical curves.
    pub std_err: Option<Vec<f64>>,
    pub meta: CurveMeta,
}

impl Curve {
    pub fn new(abscissa: Vec<f64>, values: Vec<f64>, meta: CurveMeta) -> Result<Self, SolutionError> {
        let flags = vec![None; values.len()];
        Curve {
            abscissa,
            values,
            flags,
            std_err: None,
            meta,
        }
        .validated()
    }

    pub(crate) fn validated(self) -> Result<Self, SolutionError> {
        let increasing = self.abscissa.windows(2).all(|w| w[0] < w[1]);
        let finite = self.values.iter().chain(&self.abscissa).all(|v| v.is_finite());
        let lengths = self.abscissa.len() == self.values.len() && self.flags.len() == self.values.len();
        let errs = self.std_err.as_ref().is_none_or(|e| e.len() == self.values.len());
        if !(increasing && finite && lengths && errs) {
            return Err(SolutionError::MalformedCurve);
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn time_curve<F>(system: &EigenSystem, z: f64, terms: usize, grid: &[f64], kind: CurveKind, eval: F) -> Result<Curve, SolutionError>
where
    F: Fn(&Expansion, f64) -> Result<SeriesPoint, SolutionError>,
{
    let expansion = Expansion::new(system, z, terms)?;
    let points = grid.iter().map(|&t| eval(&expansion, t)).collect::<Result<Vec<_>, _>>()?;
    Curve {
        abscissa: grid.to_vec(),
        values: points.iter().map(|p| p.reported).collect(),
        flags: points.iter().map(|p| p.flag).collect(),
        std_err: None,
        meta: CurveMeta {
            kappa: system.kappa,
            z: Some(z),
            terms: expansion.terms(),
            kind,
        },
    }
    .validated()
}

/// Reported (clamped) survival over a t/τ grid using the first `terms` modes.
pub fn survival_curve(system: &EigenSystem, z: f64, terms: usize, grid: &[f64]) -> Result<Curve, SolutionError> {
    time_curve(system, z, terms, grid, CurveKind::Survival, Expansion::survival)
}

pub fn density_curve(system: &EigenSystem, z: f64, terms: usize, grid: &[f64]) -> Result<Curve, SolutionError> {
    time_curve(system, z, terms, grid, CurveKind::Density, Expansion::density)
}

/// μ/τ over a grid of starting points.
pub fn mfpt_curve(system: &EigenSystem, terms: usize, z_grid: &[f64]) -> Result<Curve, SolutionError> {
    let values = z_grid
        .iter()
        .map(|&z| Ok(Expansion::new(system, z, terms)?.mfpt()))
        .collect::<Result<Vec<_>, SolutionError>>()?;
    Curve::new(
        z_grid.to_vec(),
        values,
        CurveMeta {
            kappa: system.kappa,
            z: None,
            terms: terms.min(system.len()),
            kind: CurveKind::Mfpt,
        },
    )
}
