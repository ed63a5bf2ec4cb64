//! Exact-update Ornstein–Uhlenbeck simulation of the trapped particle.
//!
//! Each Cartesian coordinate (in units of L) relaxes towards the trap centre
//! as `x' = x e^{-Δt} + n sqrt((1 - e^{-2Δt}) / (2κ))` with Δt in units of τ,
//! which is exact for any step. Trajectory `i` draws from its own ChaCha8
//! stream `(master_seed, i)`, so results do not depend on scheduling.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solution::{Curve, CurveKind, CurveMeta};

#[derive(Debug, Error)]
pub enum MonteCarloError {
    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),
    #[error("grid point t/τ = {t} lies outside [0, {horizon}]")]
    GridBeyondHorizon { t: f64, horizon: f64 },
    #[error("grid must be non-decreasing")]
    UnsortedGrid,
    #[error("writing samples: {0}")]
    Io(#[from] std::io::Error),
}

/// How a step is tested for contact with the absorbing sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaptureRule {
    /// Capture only when a step ends inside the sphere.
    Endpoint,
    /// Near the sphere, split the step into exact sub-steps and also test each
    /// for an excursion inside between its endpoints.
    #[default]
    Bridge,
}

/// Steps starting within this many per-step standard deviations of the
/// sphere are sub-stepped under [`CaptureRule::Bridge`].
pub const BRIDGE_NEAR: f64 = 6.0;
/// Per-coordinate standard deviation targeted for a bridge sub-step.
pub const BRIDGE_SUBSTEP_SIGMA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub kappa: f64,
    pub z0: f64,
    pub dt_over_tau: f64,
    pub horizon_over_tau: f64,
    pub trajectories: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub capture: CaptureRule,
}

impl SimParams {
    /// Bridge capture and a 5τ horizon.
    pub fn new(kappa: f64, z0: f64, dt_over_tau: f64, trajectories: usize, master_seed: u64) -> Self {
        SimParams {
            kappa,
            z0,
            dt_over_tau,
            horizon_over_tau: 5.0,
            trajectories,
            master_seed,
            capture: CaptureRule::Bridge,
        }
    }

    pub fn validate(&self) -> Result<(), MonteCarloError> {
        let bad = |msg: String| Err(MonteCarloError::InvalidParams(msg));
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return bad(format!("kappa must be positive, got {}", self.kappa));
        }
        if !(self.z0 > 1.0) || !self.z0.is_finite() {
            return bad(format!("z0 must exceed 1, got {}", self.z0));
        }
        if !(self.dt_over_tau > 0.0) || !self.dt_over_tau.is_finite() {
            return bad(format!("dt must be positive, got {}", self.dt_over_tau));
        }
        if !(self.horizon_over_tau > self.dt_over_tau) || !self.horizon_over_tau.is_finite() {
            return bad(format!("horizon {} must exceed dt {}", self.horizon_over_tau, self.dt_over_tau));
        }
        if self.trajectories == 0 {
            return bad("at least one trajectory is required".into());
        }
        Ok(())
    }

    /// Number of full steps that fit in the horizon.
    pub fn steps(&self) -> u64 {
        // the small slack keeps e.g. 5 / 1e-3 from rounding down to 4999
        ((self.horizon_over_tau / self.dt_over_tau) * (1.0 + 1e-12)).floor() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub params: SimParams,
    /// Capture time t/τ of each trajectory, `None` when censored at the horizon.
    pub outcomes: Vec<Option<f64>>,
}

impl SimResult {
    pub fn trajectories(&self) -> usize {
        self.outcomes.len()
    }

    pub fn fpt_samples(&self) -> Vec<f64> {
        self.outcomes.iter().flatten().copied().collect()
    }

    pub fn censored_count(&self) -> usize {
        self.outcomes.iter().filter(|o| o.is_none()).count()
    }

    /// CSV with columns trajectory_index, captured, t_over_tau; censored rows
    /// carry the horizon.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), MonteCarloError> {
        writeln!(out, "trajectory_index,captured,t_over_tau")?;
        for (i, outcome) in self.outcomes.iter().enumerate() {
            match outcome {
                Some(t) => writeln!(out, "{i},1,{}", crate::fmt_sig(*t))?,
                None => writeln!(out, "{i},0,{}", crate::fmt_sig(self.params.horizon_over_tau))?,
            }
        }
        Ok(())
    }
}

/// One exact OU update of a single coordinate.
pub fn ou_step(coord: f64, dt_over_tau: f64, noise: f64, kappa: f64) -> f64 {
    let decay = (-dt_over_tau).exp();
    coord * decay + noise * step_sigma(dt_over_tau, kappa)
}

/// Standard deviation of the OU increment over `dt`.
fn step_sigma(dt_over_tau: f64, kappa: f64) -> f64 {
    (-(-2.0 * dt_over_tau).exp_m1() / (2.0 * kappa)).sqrt()
}

pub(crate) fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

struct Stepper {
    decay: f64,
    sigma: f64,
}

impl Stepper {
    fn new(kappa: f64, dt: f64) -> Self {
        Stepper {
            decay: (-dt).exp(),
            sigma: step_sigma(dt, kappa),
        }
    }

    fn advance<R: Rng>(&self, pos: &mut [f64; 3], rng: &mut R) {
        for c in pos.iter_mut() {
            let n: f64 = rng.sample(StandardNormal);
            *c = *c * self.decay + n * self.sigma;
        }
    }
}

fn radius(pos: &[f64; 3]) -> f64 {
    (pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2]).sqrt()
}

/// Probability that a Brownian bridge between points at distances `d0`, `d1`
/// outside a plane crosses it, for per-coordinate step variance `var`.
fn bridge_crossing(d0: f64, d1: f64, var: f64) -> f64 {
    (-2.0 * d0 * d1 / var).exp()
}

fn run_trajectory(params: &SimParams, index: u64) -> Option<f64> {
    let mut rng = trajectory_rng(params.master_seed, index);
    let dt = params.dt_over_tau;
    let coarse = Stepper::new(params.kappa, dt);
    let substeps = ((coarse.sigma / BRIDGE_SUBSTEP_SIGMA).powi(2)).ceil().max(1.0) as u64;
    let fine_dt = dt / substeps as f64;
    let fine = Stepper::new(params.kappa, fine_dt);
    let mut pos = [params.z0, 0.0, 0.0];
    for step in 0..params.steps() {
        let t0 = step as f64 * dt;
        let r0 = radius(&pos);
        match params.capture {
            CaptureRule::Endpoint => {
                coarse.advance(&mut pos, &mut rng);
                if radius(&pos) < 1.0 {
                    return Some(t0 + dt);
                }
            }
            CaptureRule::Bridge if r0 - 1.0 < BRIDGE_NEAR * coarse.sigma => {
                let mut d0 = r0 - 1.0;
                for j in 1..=substeps {
                    fine.advance(&mut pos, &mut rng);
                    let d1 = radius(&pos) - 1.0;
                    let crossed = d1 < 0.0 || rng.random::<f64>() < bridge_crossing(d0, d1, fine.sigma * fine.sigma);
                    if crossed {
                        return Some(t0 + j as f64 * fine_dt);
                    }
                    d0 = d1;
                }
            }
            CaptureRule::Bridge => {
                coarse.advance(&mut pos, &mut rng);
                let d1 = radius(&pos) - 1.0;
                if d1 < 0.0 || rng.random::<f64>() < bridge_crossing(r0 - 1.0, d1, coarse.sigma * coarse.sigma) {
                    return Some(t0 + dt);
                }
            }
        }
    }
    None
}

/// Runs `params.trajectories` independent trajectories in parallel; the
/// outcome vector is ordered by trajectory index.
pub fn simulate_fpt(params: &SimParams) -> Result<SimResult, MonteCarloError> {
    params.validate()?;
    let outcomes = (0..params.trajectories as u64)
        .into_par_iter()
        .map(|i| run_trajectory(params, i))
        .collect();
    Ok(SimResult {
        params: *params,
        outcomes,
    })
}

/// Positions after `t_end` without any absorbing sphere, for checking the
/// sampler against the equilibrium distribution.
pub fn free_positions(
    kappa: f64,
    z0: f64,
    dt_over_tau: f64,
    t_end: f64,
    trajectories: usize,
    master_seed: u64,
) -> Result<Vec<[f64; 3]>, MonteCarloError> {
    let params = SimParams {
        horizon_over_tau: t_end,
        ..SimParams::new(kappa, z0, dt_over_tau, trajectories, master_seed)
    };
    params.validate()?;
    let steps = params.steps();
    Ok((0..trajectories as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(master_seed, i);
            let stepper = Stepper::new(kappa, dt_over_tau);
            let mut pos = [z0, 0.0, 0.0];
            for _ in 0..steps {
                stepper.advance(&mut pos, &mut rng);
            }
            pos
        })
        .collect())
}

/// Fraction of trajectories still free after each grid time, with binomial
/// standard errors.
pub fn empirical_survival(result: &SimResult, grid: &[f64]) -> Result<Curve, MonteCarloError> {
    let horizon = result.params.horizon_over_tau;
    if let Some(&t) = grid.iter().find(|&&t| !(0.0..=horizon).contains(&t)) {
        return Err(MonteCarloError::GridBeyondHorizon { t, horizon });
    }
    let mut samples = result.fpt_samples();
    samples.sort_by(f64::total_cmp);
    let n = result.trajectories() as f64;
    let censored = result.censored_count() as f64;
    let values: Vec<f64> = grid
        .iter()
        .map(|&t| {
            let later = samples.len() - samples.partition_point(|&s| s <= t);
            (later as f64 + censored) / n
        })
        .collect();
    let std_err = values.iter().map(|s| (s * (1.0 - s) / n).sqrt()).collect();
    Curve {
        abscissa: grid.to_vec(),
        flags: vec![None; values.len()],
        values,
        std_err: Some(std_err),
        meta: CurveMeta {
            kappa: result.params.kappa,
            z: Some(result.params.z0),
            terms: 0,
            kind: CurveKind::Empirical,
        },
    }
    .validated()
    .map_err(|_| MonteCarloError::UnsortedGrid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_step_is_identity() {
        assert_eq!(ou_step(3.25, 0.0, 1.7, 0.012), 3.25);
    }

    #[test]
    fn long_step_forgets_the_start() {
        let n = 0.8;
        let expect = n / (2.0f64 * 0.05).sqrt();
        assert!((ou_step(40.0, 60.0, n, 0.05) - expect).abs() < 1e-12);
    }

    #[test]
    fn steps_cover_horizon() {
        let p = SimParams::new(0.012, 5.0, 1e-3, 1, 0);
        assert_eq!(p.steps(), 5000);
    }

    #[test]
    fn validation() {
        let ok = SimParams::new(0.012, 5.0, 1e-3, 1, 0);
        assert!(ok.validate().is_ok());
        for bad in [
            SimParams { trajectories: 0, ..ok },
            SimParams { z0: 1.0, ..ok },
            SimParams { dt_over_tau: 0.0, ..ok },
            SimParams { horizon_over_tau: 1e-3, ..ok },
            SimParams { kappa: 0.0, ..ok },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }
}
