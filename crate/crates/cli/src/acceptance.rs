//! Acceptance suite. Each criterion returns a verdict with the observed
//! numbers; tolerances are fixed here and never adjusted at run time.
//!
//! Eigen-systems are built without the cache so timings reflect a cold start.

use std::collections::HashMap;
use std::time::Instant;

use serde::Serialize;
use trapfpt::montecarlo::{empirical_survival, simulate_fpt, SimParams};
use trapfpt::solution::{escape_amplitude, Expansion, SeriesFlag, TrapParams};
use trapfpt::spectral::{build_eigensystem, EigenSystem, DEFAULT_QUAD_TOL, DEFAULT_ROOT_TOL};
use trapfpt_oracle::{highprec_alphas, mfpt_integral, pde_survival, OracleConfig};

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "eigen-system certification"),
    (2, "table conversions"),
    (3, "equilibrium statistics"),
    (4, "Monte Carlo survival"),
    (5, "long-time decay"),
    (6, "density consistency"),
    (7, "MFPT series vs integral"),
    (8, "escape amplitude approach"),
    (9, "PDE cross-check"),
    (10, "completeness"),
];

/// Criteria that fail for reasons inherent to the truncated series.
pub const KNOWN_UNATTAINABLE: [(u8, &str); 3] = [
    (
        6,
        "at t/τ = 0.05 the central difference with step 1e-4 has truncation error above 1e-6; the series itself matches the exact difference quotient",
    ),
    (
        7,
        "the 25-term MFPT series converges slowly where κz² ≈ 20 (κ = 0.049, z = 20): partial sums swing by several percent, which also bends the log-z fit; the integral itself fits",
    ),
    (
        10,
        "50-term partial sums of Σ c_n ψ_n(z) stay far from 1 near the sphere and deep in the potential tail",
    ),
];

pub const KAPPAS: [f64; 4] = [0.003, 0.012, 0.024, 0.049];
pub const FIG1_Z: [f64; 4] = [2.0, 5.0, 10.0, 20.0];

const ALPHA_TOL: f64 = 1e-9;
const ORTHO_TOL: f64 = 2e-10;
const ORTHO_MODES: usize = 10;
const CERT_MODES: usize = 25;
const CERT_RUNTIME_S: f64 = 120.0;
const ORACLE_DIGITS: u32 = 30;

const TABLE_K: [f64; 4] = [0.2525, 1.01, 2.02, 4.04];
const TABLE_ZETA: f64 = 2.02;
const TABLE_D: f64 = 0.002;
const TABLE_L: f64 = 10.0;
const TABLE_T: f64 = 300.0;
const TABLE_RATES: [f64; 4] = [0.125, 0.5, 1.0, 2.0];
const KAPPA_ROUNDING: f64 = 1e-3;

const EQUILIBRIUM_NM: [f64; 3] = [111.0, 102.0, 91.0];
const EQUILIBRIUM_TOL_NM: f64 = 1.0;

const MC_TRAJECTORIES: usize = 100_000;
const MC_DT: f64 = 1e-3;
const MC_HORIZON: f64 = 5.0;
const MC_TIMES: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
const MC_TOL: f64 = 0.01;
const MC_SEED: u64 = 20_240;
const SERIES_TERMS: usize = 25;

const SLOPE_WINDOW: (f64, f64) = (3.0, 6.0);
const SLOPE_TOL: f64 = 0.01;

const DENSITY_TERMS: usize = 50;
const FD_STEP: f64 = 1e-4;
const FD_TOL: f64 = 1e-6;

const MFPT_TOL: f64 = 0.01;
const MFPT_KAPPAS: [f64; 4] = [0.003, 0.006, 0.012, 0.049];
const LOG_FIT_FROM: f64 = 10.0;
const LOG_FIT_TOL: f64 = 0.02;

const ESCAPE_KAPPAS: [f64; 4] = [0.012, 0.003, 0.0012, 0.00012];

const PDE_TIMES: [f64; 3] = [0.5, 1.0, 2.0];
const PDE_TOL: f64 = 5e-3;

const COMPLETENESS_TERMS: usize = 50;
const COMPLETENESS_TOL: f64 = 0.01;
const COMPLETENESS_KAPPAS: [f64; 5] = [0.003, 0.006, 0.012, 0.024, 0.049];

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("{verdict} {:>2} {:<28} {} [{:.1} s]", self.id, self.title, self.detail, self.seconds)
    }

    pub fn known_unattainable(&self) -> Option<&'static str> {
        KNOWN_UNATTAINABLE.iter().find(|k| k.0 == self.id).map(|k| k.1)
    }
}

/// Shares eigen-systems between criteria.
#[derive(Default)]
pub struct Suite {
    systems: HashMap<(u64, usize), EigenSystem>,
}

type Verdict = Result<(bool, String), String>;

impl Suite {
    pub fn new() -> Self {
        Suite::default()
    }

    fn system(&mut self, kappa: f64, count: usize) -> Result<&EigenSystem, String> {
        let key = (kappa.to_bits(), count);
        if !self.systems.contains_key(&key) {
            let s = build_eigensystem(kappa, count, DEFAULT_ROOT_TOL, DEFAULT_QUAD_TOL, None).map_err(|e| e.to_string())?;
            self.systems.insert(key, s);
        }
        Ok(&self.systems[&key])
    }

    fn expansion(&mut self, kappa: f64, count: usize, z: f64) -> Result<Expansion, String> {
        Expansion::new(self.system(kappa, count)?, z, count).map_err(|e| e.to_string())
    }

    pub fn run(&mut self, id: u8) -> Outcome {
        let title = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
        let start = Instant::now();
        let verdict = match id {
            1 => self.eigen_certification(),
            2 => table_conversions(),
            3 => equilibrium(),
            4 => self.monte_carlo(),
            5 => self.long_time_decay(),
            6 => self.density_consistency(),
            7 => self.mfpt_integral(),
            8 => self.escape_approach(),
            9 => self.pde_cross_check(),
            10 => self.completeness(),
            _ => Err(format!("no criterion {id}")),
        };
        let (passed, detail) = verdict.unwrap_or_else(|e| (false, format!("error: {e}")));
        Outcome {
            id,
            title,
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }

    fn eigen_certification(&mut self) -> Verdict {
        let start = Instant::now();
        let config = OracleConfig::with_digits(ORACLE_DIGITS);
        let (mut worst_alpha, mut worst_ortho) = (0.0f64, 0.0f64);
        for kappa in KAPPAS {
            let reference = highprec_alphas(kappa, CERT_MODES, &config).map_err(|e| e.to_string())?;
            let system = self.system(kappa, CERT_MODES)?;
            for (m, r) in system.modes.iter().zip(&reference) {
                worst_alpha = worst_alpha.max((m.alpha - r.to_f64()).abs());
            }
            for n in 1..=ORTHO_MODES {
                for m in n..=ORTHO_MODES {
                    let ip = system.inner_product(n, m).map_err(|e| e.to_string())?;
                    let target = if n == m { 1.0 } else { 0.0 };
                    worst_ortho = worst_ortho.max((ip - target).abs());
                }
            }
        }
        let secs = start.elapsed().as_secs_f64();
        Ok((
            worst_alpha <= ALPHA_TOL && worst_ortho <= ORTHO_TOL && secs < CERT_RUNTIME_S,
            format!("max|Δα| = {worst_alpha:.1e} (≤ {ALPHA_TOL:.0e}), max|G - I| = {worst_ortho:.1e} (≤ {ORTHO_TOL:.0e}), {secs:.0} s (< {CERT_RUNTIME_S:.0})"),
        ))
    }

    fn monte_carlo(&mut self) -> Verdict {
        let mut cases: Vec<(f64, f64)> = FIG1_Z.iter().map(|&z| (0.012, z)).collect();
        cases.extend(KAPPAS.iter().filter(|&&k| k != 0.012).map(|&k| (k, 5.0)));
        let mut worst = (0.0f64, 0.0, 0.0);
        for (i, &(kappa, z)) in cases.iter().enumerate() {
            let params = SimParams {
                horizon_over_tau: MC_HORIZON,
                ..SimParams::new(kappa, z, MC_DT, MC_TRAJECTORIES, MC_SEED + i as u64)
            };
            let result = simulate_fpt(&params).map_err(|e| e.to_string())?;
            let emp = empirical_survival(&result, &MC_TIMES).map_err(|e| e.to_string())?;
            let series = self.expansion(kappa, SERIES_TERMS, z)?;
            for (t, e) in MC_TIMES.iter().zip(&emp.values) {
                let s = series.survival(*t).map_err(|e| e.to_string())?.reported;
                let gap = (e - s).abs();
                if gap > worst.0 {
                    worst = (gap, kappa, z);
                }
            }
        }
        Ok((
            worst.0 <= MC_TOL,
            format!(
                "{} runs of {MC_TRAJECTORIES}: max gap {:.4} at κ = {}, z = {} (≤ {MC_TOL})",
                cases.len(),
                worst.0,
                worst.1,
                worst.2
            ),
        ))
    }

    fn long_time_decay(&mut self) -> Verdict {
        let mut cases: Vec<(f64, f64)> = KAPPAS.iter().map(|&k| (k, 5.0)).collect();
        cases.extend(FIG1_Z.iter().filter(|&&z| z != 5.0).map(|&z| (0.012, z)));
        let mut worst = 0.0f64;
        for (kappa, z) in cases {
            let ex = self.expansion(kappa, SERIES_TERMS, z)?;
            let rate = self.system(kappa, SERIES_TERMS)?.modes[0].lambda_tau;
            let ts: Vec<f64> = (0..=60).map(|i| SLOPE_WINDOW.0 + i as f64 * (SLOPE_WINDOW.1 - SLOPE_WINDOW.0) / 60.0).collect();
            let ln_s = ts
                .iter()
                .map(|&t| Ok(ex.survival(t).map_err(|e| e.to_string())?.raw.ln()))
                .collect::<Result<Vec<_>, String>>()?;
            let (slope, _) = line_fit(&ts, &ln_s);
            worst = worst.max((slope / -rate - 1.0).abs());
        }
        Ok((worst <= SLOPE_TOL, format!("max |slope/(-2α₁) - 1| = {worst:.2e} (≤ {SLOPE_TOL})")))
    }

    fn density_consistency(&mut self) -> Verdict {
        let ex = self.expansion(0.012, DENSITY_TERMS, 5.0)?;
        let system = self.system(0.012, DENSITY_TERMS)?;
        let amps = system.amplitudes(5.0, DENSITY_TERMS).map_err(|e| e.to_string())?;
        let (mut worst, mut worst_t, mut unexplained) = (0.0f64, 0.0, 0.0f64);
        for i in 0..=19 {
            let t = 0.05 + 0.05 * i as f64;
            let p = ex.density(t).map_err(|e| e.to_string())?.raw;
            let up = ex.survival(t + FD_STEP).map_err(|e| e.to_string())?.raw;
            let down = ex.survival(t - FD_STEP).map_err(|e| e.to_string())?.raw;
            let fd = -(up - down) / (2.0 * FD_STEP);
            let rel = ((p - fd) / p).abs();
            if rel > worst {
                worst = rel;
                worst_t = t;
            }
            // the difference quotient of each mode is exactly λ e^{-λt} sinh(λh)/(λh)
            let truncation: f64 = system
                .modes
                .iter()
                .zip(&amps)
                .map(|(m, a)| {
                    let lh = m.lambda_tau * FD_STEP;
                    m.lambda_tau * a * (-m.lambda_tau * t).exp() * (lh.sinh() / lh - 1.0)
                })
                .sum();
            unexplained = unexplained.max(((fd - p - truncation) / p).abs());
        }
        let early = ex.density(0.02).map_err(|e| e.to_string())?.flag;
        let later = ex.density(0.03).map_err(|e| e.to_string())?.flag;
        let flags_ok = early == Some(SeriesFlag::EarlyTimeUnreliable) && later.is_none();
        Ok((
            worst <= FD_TOL && flags_ok,
            format!(
                "κ = 0.012, z = 5: max rel |P + dS/dt| = {worst:.1e} at t = {worst_t} (≤ {FD_TOL:.0e}); \
                 after removing the exact difference-quotient truncation {unexplained:.0e}; early flag {}",
                if flags_ok { "ok" } else { "wrong" }
            ),
        ))
    }

    fn mfpt_integral(&mut self) -> Verdict {
        let config = OracleConfig::default();
        let (mut worst, mut at) = (0.0f64, (0.0, 0.0));
        let (mut worst_fit, mut worst_exact_fit) = (0.0f64, 0.0f64);
        for kappa in MFPT_KAPPAS {
            let mut zs = Vec::new();
            let mut mus = Vec::new();
            let mut exacts = Vec::new();
            for z in (2..=20).map(f64::from) {
                let series = self.expansion(kappa, SERIES_TERMS, z)?.mfpt();
                let exact = mfpt_integral(kappa, z, &config).map_err(|e| e.to_string())?;
                let gap = (series / exact - 1.0).abs();
                if gap > worst {
                    worst = gap;
                    at = (kappa, z);
                }
                if z >= LOG_FIT_FROM {
                    zs.push(z.ln());
                    mus.push(series);
                    exacts.push(exact);
                }
            }
            worst_fit = worst_fit.max(log_fit_residual(&zs, &mus));
            worst_exact_fit = worst_exact_fit.max(log_fit_residual(&zs, &exacts));
        }
        Ok((
            worst <= MFPT_TOL && worst_fit <= LOG_FIT_TOL,
            format!(
                "max rel gap {worst:.4} at κ = {}, z = {} (≤ {MFPT_TOL}); log-z fit residual on z ≥ {LOG_FIT_FROM}: \
                 series {worst_fit:.4}, integral {worst_exact_fit:.4} (≤ {LOG_FIT_TOL})",
                at.0, at.1
            ),
        ))
    }

    fn escape_approach(&mut self) -> Verdict {
        let mut gaps = Vec::new();
        for kappa in ESCAPE_KAPPAS {
            let system = self.system(kappa, 1)?;
            let mut gap = 0.0f64;
            for i in 0..=180 {
                let z = 2.0 + 0.1 * i as f64;
                let amp = escape_amplitude(system, z).map_err(|e| e.to_string())?;
                gap = gap.max((amp - (1.0 - 1.0 / z)).abs());
            }
            gaps.push(gap);
        }
        let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
        let shown: Vec<String> = gaps.iter().map(|g| format!("{g:.4}")).collect();
        Ok((decreasing, format!("max gaps along κ = 0.012 → 0.00012: {}", shown.join(" > "))))
    }

    fn pde_cross_check(&mut self) -> Verdict {
        let config = OracleConfig::default();
        let ex = self.expansion(0.012, SERIES_TERMS, 5.0)?;
        let mut worst = 0.0f64;
        for t in PDE_TIMES {
            let pde = pde_survival(0.012, 5.0, t, &config).map_err(|e| e.to_string())?;
            let series = ex.survival(t).map_err(|e| e.to_string())?.raw;
            worst = worst.max((pde - series).abs());
        }
        Ok((worst <= PDE_TOL, format!("κ = 0.012, z = 5: max |S_pde - S_series| = {worst:.1e} (≤ {PDE_TOL:.0e})")))
    }

    fn completeness(&mut self) -> Verdict {
        let (mut worst, mut at) = (0.0f64, (0.0, 0.0));
        for kappa in COMPLETENESS_KAPPAS {
            for i in 0..=37 {
                let z = 1.5 + 0.5 * i as f64;
                let sum: f64 = self.system(kappa, COMPLETENESS_TERMS)?.amplitudes(z, COMPLETENESS_TERMS).map_err(|e| e.to_string())?.iter().sum();
                if (sum - 1.0).abs() > worst {
                    worst = (sum - 1.0).abs();
                    at = (kappa, z);
                }
            }
        }
        Ok((
            worst <= COMPLETENESS_TOL,
            format!("max |Σ c_n ψ_n - 1| = {worst:.3} at κ = {}, z = {} (≤ {COMPLETENESS_TOL})", at.0, at.1),
        ))
    }
}

fn table_conversions() -> Verdict {
    let mut worst_kappa = 0.0f64;
    let mut rates_ok = true;
    let mut literal = Vec::new();
    for ((k, want), rate) in TABLE_K.iter().zip(KAPPAS).zip(TABLE_RATES) {
        let p = TrapParams::from_table_units(*k, TABLE_ZETA, None, TABLE_T, TABLE_L, 2.0 * TABLE_L).map_err(|e| e.to_string())?;
        worst_kappa = worst_kappa.max((p.kappa() - want).abs());
        rates_ok &= format!("{:.3}", p.relaxation_rate()) == format!("{rate:.3}");
        // κ = k L² / (2 ζ D) with the rounded table diffusivity, for the record
        literal.push(format!("{:.4}", k * 1e-6 * (TABLE_L * 1e-9).powi(2) / (2.0 * TABLE_ZETA * 1e-6 * TABLE_D * 1e-12)));
    }
    Ok((
        worst_kappa <= KAPPA_ROUNDING && rates_ok,
        format!(
            "Einstein D: max|κ - table| = {worst_kappa:.1e} (≤ {KAPPA_ROUNDING:.0e}), rates {}; rounded D gives κ = {}",
            if rates_ok { "exact" } else { "wrong" },
            literal.join(", ")
        ),
    ))
}

fn equilibrium() -> Verdict {
    let p = TrapParams::from_table_units(1.01, TABLE_ZETA, None, TABLE_T, TABLE_L, 2.0 * TABLE_L).map_err(|e| e.to_string())?;
    let s = p.equilibrium_stats();
    let got = [s.rms, s.mean, s.mode].map(|m| m * 1e9);
    let ok = got.iter().zip(EQUILIBRIUM_NM).all(|(g, w)| (g - w).abs() <= EQUILIBRIUM_TOL_NM);
    Ok((
        ok,
        format!("rms {:.1} nm, mean {:.1} nm, mode {:.1} nm (±{EQUILIBRIUM_TOL_NM} of 111/102/91)", got[0], got[1], got[2]),
    ))
}

/// Largest relative deviation from the best straight line.
fn log_fit_residual(x: &[f64], y: &[f64]) -> f64 {
    let (slope, icept) = line_fit(x, y);
    x.iter().zip(y).map(|(a, b)| ((slope * a + icept) / b - 1.0).abs()).fold(0.0, f64::max)
}

/// Least-squares slope and intercept.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = x.map(|v| 2.5 * v - 1.0);
        let (s, c) = line_fit(&x, &y);
        assert!((s - 2.5).abs() < 1e-14 && (c + 1.0).abs() < 1e-14);
    }

    #[test]
    fn every_known_failure_is_a_criterion() {
        for (id, _) in KNOWN_UNATTAINABLE {
            assert!(CRITERIA.iter().any(|c| c.0 == id));
        }
    }
}
