//! Mean first-passage time from the backward equation with a unit source,
//! `(1/(2κ)) μ'' + (1/(κz) - z) μ' = -1`, `μ(1) = 0`, μ bounded. Integrating
//! once against the equilibrium weight gives
//!
//! `μ(z)/τ = 2κ ∫₁^z dy y^{-2} e^{κy²} ∫_y^∞ x² e^{-κx²} dx`.
//!
//! The inner integral is shifted to x = y + s so the Gaussian factors cancel
//! analytically: `e^{κy²} ∫_y^∞ x² e^{-κx²} dx = ∫_0^∞ (y+s)² e^{-κ(2ys+s²)} ds`.

use crate::{check_kappa, OracleConfig, OracleError};

/// Largest κz² accepted, in natural-log units.
pub const LOG_GUARD: f64 = 700.0;
/// The shifted inner integrand is cut where its exponent reaches this.
const INNER_CUTOFF: f64 = 80.0;
const GL_ORDER: usize = 16;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let n = order as f64;
    (0..order)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=order {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn composite<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let width = (hi - lo) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = lo + (p as f64 + 0.5) * width;
            rule.iter().map(|&(x, w)| w * f(mid + 0.5 * width * x)).sum::<f64>() * 0.5 * width
        })
        .sum()
}

/// μ(z)/τ.
pub fn mfpt_integral(kappa: f64, z: f64, config: &OracleConfig) -> Result<f64, OracleError> {
    config.validate()?;
    check_kappa(kappa)?;
    if !(z >= 1.0 && z.is_finite()) {
        return Err(OracleError::Domain(format!("z must be at least 1, got {z}")));
    }
    let exponent = kappa * z * z;
    if exponent > LOG_GUARD {
        return Err(OracleError::OverflowGuard {
            exponent,
            guard: LOG_GUARD,
        });
    }
    if z == 1.0 {
        return Ok(0.0);
    }
    let rule = gauss_legendre(GL_ORDER);
    let panels = config.quad_points;
    let inner = |y: f64| {
        let s_end = -y + (y * y + INNER_CUTOFF / kappa).sqrt();
        composite(|s| (y + s) * (y + s) * (-kappa * s * (2.0 * y + s)).exp(), 0.0, s_end, panels, &rule)
    };
    Ok(2.0 * kappa * composite(|y| inner(y) / (y * y), 1.0, z, panels, &rule))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let rule = gauss_legendre(GL_ORDER);
        let total: f64 = rule.iter().map(|p| p.1).sum();
        assert!((total - 2.0).abs() < 1e-14);
        let x30: f64 = rule.iter().map(|&(x, w)| w * x.powi(30)).sum();
        assert!((x30 - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn shifted_inner_matches_closed_form() {
        // ∫_y^∞ x² e^{-κx²} dx = y e^{-κy²}/(2κ) + √π erfc(√κ y)/(4κ^{3/2});
        // at y = 0 the second term is √π/(4κ^{3/2})
        let kappa = 0.3;
        let rule = gauss_legendre(GL_ORDER);
        let s_end = (INNER_CUTOFF / kappa).sqrt();
        let v = composite(|s| s * s * (-kappa * s * s).exp(), 0.0, s_end, 100, &rule);
        let exact = std::f64::consts::PI.sqrt() / (4.0 * kappa.powf(1.5));
        assert!((v / exact - 1.0).abs() < 1e-13);
    }
}
