//! Survival by the method of lines: second-order central differences on a
//! uniform grid over [1, z_max], S = 0 at z = 1, zero flux at z_max, and
//! Crank-Nicolson in time after a few backward-Euler half steps that damp the
//! jump between the initial data and the absorbing boundary.

use crate::{check_kappa, OracleConfig, OracleError};

/// Largest accepted Richardson estimate between `nodes` and `2 nodes`.
pub const RICHARDSON_LIMIT: f64 = 1e-3;
const STARTUP_STEPS: usize = 4;

fn default_z_max(kappa: f64) -> f64 {
    f64::max(20.0, 6.0 / kappa.sqrt())
}

/// Tridiagonal system `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    c[0] = upper[0] / beta;
    rhs[0] /= beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / beta;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Discrete operator rows for the unknowns S_1..S_N (S_0 = 0 is eliminated).
struct Operator {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Operator {
    fn new(kappa: f64, z_max: f64, nodes: usize) -> Self {
        let h = (z_max - 1.0) / nodes as f64;
        let a = 1.0 / (2.0 * kappa * h * h);
        let (mut lower, mut diag, mut upper) = (vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]);
        for i in 1..=nodes {
            let z = 1.0 + i as f64 * h;
            let b = (1.0 / (kappa * z) - z) / (2.0 * h);
            let row = i - 1;
            if i < nodes {
                lower[row] = a - b;
                diag[row] = -2.0 * a;
                upper[row] = a + b;
            } else {
                // mirrored ghost node: S_{N+1} = S_{N-1}
                lower[row] = 2.0 * a;
                diag[row] = -2.0 * a;
            }
        }
        Operator { lower, diag, upper }
    }

    fn apply(&self, s: &[f64]) -> Vec<f64> {
        let n = s.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.lower[i] * s[i - 1] } else { 0.0 };
                let right = if i + 1 < n { self.upper[i] * s[i + 1] } else { 0.0 };
                left + self.diag[i] * s[i] + right
            })
            .collect()
    }

    /// Solves (I - θ dt L) x = rhs in place.
    fn implicit(&self, theta_dt: f64, rhs: &mut [f64]) {
        let lower: Vec<f64> = self.lower.iter().map(|v| -theta_dt * v).collect();
        let upper: Vec<f64> = self.upper.iter().map(|v| -theta_dt * v).collect();
        let diag: Vec<f64> = self.diag.iter().map(|v| 1.0 - theta_dt * v).collect();
        thomas(&lower, &diag, &upper, rhs);
    }
}

/// One solve on a fixed grid with `nodes` intervals, no error control.
pub fn pde_survival_raw(kappa: f64, z_eval: f64, t_over_tau: f64, z_max: f64, nodes: usize, time_step: f64) -> f64 {
    if z_eval <= 1.0 {
        return 0.0;
    }
    if t_over_tau == 0.0 {
        return 1.0;
    }
    let op = Operator::new(kappa, z_max, nodes);
    let mut s = vec![1.0; nodes];
    let steps = ((t_over_tau / time_step).ceil() as usize).max(STARTUP_STEPS);
    let dt = t_over_tau / steps as f64;
    for step in 0..steps {
        if step < STARTUP_STEPS / 2 {
            // two backward-Euler half steps in place of one Crank-Nicolson step
            op.implicit(dt / 2.0, &mut s);
            op.implicit(dt / 2.0, &mut s);
        } else {
            let ls = op.apply(&s);
            for (v, l) in s.iter_mut().zip(&ls) {
                *v += 0.5 * dt * l;
            }
            op.implicit(0.5 * dt, &mut s);
        }
    }
    interpolate(&s, z_max, nodes, z_eval)
}

/// Cubic Lagrange interpolation through the four nearest nodes.
fn interpolate(s: &[f64], z_max: f64, nodes: usize, z: f64) -> f64 {
    let h = (z_max - 1.0) / nodes as f64;
    let value = |i: usize| if i == 0 { 0.0 } else { s[i - 1] };
    let u = (z - 1.0) / h;
    let first = (u.floor() as usize).saturating_sub(1).min(nodes - 3);
    (first..first + 4)
        .map(|i| {
            let basis: f64 = (first..first + 4)
                .filter(|&j| j != i)
                .map(|j| (u - j as f64) / (i as f64 - j as f64))
                .product();
            basis * value(i)
        })
        .sum()
}

/// S(t/τ | z) with a Richardson check between `nodes` and `2 nodes`.
pub fn pde_survival(kappa: f64, z_eval: f64, t_over_tau: f64, config: &OracleConfig) -> Result<f64, OracleError> {
    config.validate()?;
    check_kappa(kappa)?;
    let grid = &config.pde_grid;
    let z_max = grid.z_max.unwrap_or_else(|| default_z_max(kappa));
    if !(z_eval >= 1.0 && z_eval <= z_max) {
        return Err(OracleError::Domain(format!("z = {z_eval} outside the grid [1, {z_max}]")));
    }
    if !(t_over_tau >= 0.0 && t_over_tau.is_finite()) {
        return Err(OracleError::Domain(format!("t/τ must be non-negative, got {t_over_tau}")));
    }
    let coarse = pde_survival_raw(kappa, z_eval, t_over_tau, z_max, grid.nodes, grid.time_step);
    let fine = pde_survival_raw(kappa, z_eval, t_over_tau, z_max, 2 * grid.nodes, grid.time_step);
    let estimate = (fine - coarse).abs() / 3.0;
    if estimate > RICHARDSON_LIMIT {
        return Err(OracleError::GridTooCoarse {
            estimate,
            limit: RICHARDSON_LIMIT,
        });
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_solves_small_system() {
        let mut rhs = vec![1.0, 2.0, 3.0];
        thomas(&[0.0, 1.0, 1.0], &[4.0, 4.0, 4.0], &[1.0, 1.0, 0.0], &mut rhs);
        let x = rhs;
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-15);
        assert!((x[0] + 4.0 * x[1] + x[2] - 2.0).abs() < 1e-15);
        assert!((x[1] + 4.0 * x[2] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn interpolation_is_exact_for_cubics() {
        let f = |z: f64| (z - 1.0) * (z * z - 0.5 * z + 2.0);
        let nodes = 20;
        let s: Vec<f64> = (1..=nodes).map(|i| f(1.0 + i as f64 * 0.5)).collect();
        for z in [1.2, 3.3, 10.9] {
            assert!((interpolate(&s, 11.0, nodes, z) - f(z)).abs() < 1e-10);
        }
    }
}
