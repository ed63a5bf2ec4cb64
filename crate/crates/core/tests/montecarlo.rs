use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use trapfpt::montecarlo::{
    empirical_survival, free_positions, ou_step, simulate_fpt, CaptureRule, MonteCarloError, SimParams,
};

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (m, xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0))
}

#[test]
fn update_matches_exact_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (x, kappa, n) = (3.0, 0.012, 1_000_000);
    for dt in [1e-3, 0.1, 1.0] {
        let xs: Vec<f64> = (0..n).map(|_| ou_step(x, dt, StandardNormal.sample(&mut rng), kappa)).collect();
        let (m, v) = mean_var(&xs);
        let mean = x * f64::exp(-dt);
        let var = (1.0 - f64::exp(-2.0 * dt)) / (2.0 * kappa);
        let se_mean = (var / n as f64).sqrt();
        // Gaussian: Var(s²) = 2σ⁴/(n-1)
        let se_var = var * (2.0 / (n as f64 - 1.0)).sqrt();
        assert!((m - mean).abs() <= 4.0 * se_mean, "dt = {dt}: mean {m} vs {mean}");
        assert!((v - var).abs() <= 4.0 * se_var, "dt = {dt}: var {v} vs {var}");
    }
}

#[test]
fn deterministic_across_thread_counts() {
    let p = SimParams {
        horizon_over_tau: 1.0,
        ..SimParams::new(0.049, 3.0, 1e-2, 400, 99)
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_fpt(&p).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a, b);
    let other = simulate_fpt(&SimParams { master_seed: 100, ..p }).unwrap();
    assert_ne!(a.outcomes, other.outcomes);
}

#[test]
fn counting_invariants() {
    let one = simulate_fpt(&SimParams::new(0.049, 2.0, 1e-2, 1, 3)).unwrap();
    assert_eq!(one.fpt_samples().len() + one.censored_count(), 1);
    assert!(matches!(
        simulate_fpt(&SimParams::new(0.049, 2.0, 1e-2, 0, 3)),
        Err(MonteCarloError::InvalidParams(_))
    ));
    let many = simulate_fpt(&SimParams::new(0.049, 2.0, 1e-2, 500, 3)).unwrap();
    assert_eq!(many.fpt_samples().len() + many.censored_count(), 500);
    assert!(many.fpt_samples().iter().all(|&t| t > 0.0 && t <= many.params.horizon_over_tau));
}

#[test]
fn start_on_the_sphere_is_captured_quickly() {
    for capture in [CaptureRule::Endpoint, CaptureRule::Bridge] {
        let p = SimParams {
            horizon_over_tau: 0.1,
            capture,
            ..SimParams::new(0.049, 1.0 + 1e-6, 1e-3, 4000, 5)
        };
        let r = simulate_fpt(&p).unwrap();
        let early = r.fpt_samples().iter().filter(|&&t| t <= 10.0 * p.dt_over_tau + 1e-12).count();
        let frac = early as f64 / 4000.0;
        assert!(frac > 0.4, "{capture:?}: {frac}");
    }
}

#[test]
fn empirical_survival_is_a_tail_count() {
    let r = simulate_fpt(&SimParams {
        horizon_over_tau: 2.0,
        ..SimParams::new(0.049, 2.0, 1e-2, 2000, 8)
    })
    .unwrap();
    let grid: Vec<f64> = (0..=40).map(|i| 0.05 * i as f64).collect();
    let c = empirical_survival(&r, &grid).unwrap();
    assert_eq!(c.values[0], 1.0);
    assert_eq!(*c.values.last().unwrap(), r.censored_count() as f64 / 2000.0);
    assert!(c.values.windows(2).all(|w| w[1] <= w[0]));
    let se = c.std_err.as_ref().unwrap();
    assert!((se[20] - (c.values[20] * (1.0 - c.values[20]) / 2000.0).sqrt()).abs() < 1e-15);
    assert!(matches!(
        empirical_survival(&r, &[0.0, 2.5]),
        Err(MonteCarloError::GridBeyondHorizon { .. })
    ));
}

#[test]
fn coordinates_are_isotropic() {
    let kappa = 0.05;
    let t = 0.3;
    let pos = free_positions(kappa, 4.0, 0.1, t, 200_000, 21).unwrap();
    let n = pos.len() as f64;
    // remove the deterministic relaxation of x before comparing
    let x: Vec<f64> = pos.iter().map(|p| p[0] - 4.0 * f64::exp(-t)).collect();
    let y: Vec<f64> = pos.iter().map(|p| p[1]).collect();
    let z: Vec<f64> = pos.iter().map(|p| p[2]).collect();
    let var = (1.0 - f64::exp(-2.0 * t)) / (2.0 * kappa);
    for c in [&x, &y, &z] {
        let (m, v) = mean_var(c);
        assert!(m.abs() <= 4.0 * (var / n).sqrt());
        assert!((v - var).abs() <= 4.0 * var * (2.0 / n).sqrt());
    }
}

#[test]
fn radial_equilibrium_ratios() {
    // one long exact step per stride: the final radii are equilibrium draws
    let pos = free_positions(0.012, 5.0, 5.0, 20.0, 400_000, 4).unwrap();
    let r: Vec<f64> = pos.iter().map(|p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()).collect();
    let n = r.len() as f64;
    let mean = r.iter().sum::<f64>() / n;
    let rms = (r.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
    let mode = histogram_mode(&r, mean);
    let s = rms / 3f64.sqrt();
    assert!((mean / s / (8.0 / std::f64::consts::PI).sqrt() - 1.0).abs() < 0.01);
    assert!((mode / s / 2f64.sqrt() - 1.0).abs() < 0.01, "{}", mode / s);
}

/// Peak of a cubic fitted to the log-histogram around the mean.
fn histogram_mode(r: &[f64], mean: f64) -> f64 {
    let (lo, hi, bins) = (0.6 * mean, 1.2 * mean, 60);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0.0; bins];
    for &x in r {
        if x >= lo && x < hi {
            counts[((x - lo) / width) as usize] += 1.0;
        }
    }
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0.0)
        .map(|(i, &c)| ((lo + (i as f64 + 0.5) * width) / mean - 1.0, f64::ln(c)))
        .collect();
    // least squares for a + b u + c u² + d u³ via normal equations
    let mut m = [[0.0; 5]; 4];
    for &(u, y) in &pts {
        let p = [1.0, u, u * u, u * u * u];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] += p[i] * p[j];
            }
            m[i][4] += p[i] * y;
        }
    }
    for col in 0..4 {
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            for k in col..5 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut coef = [0.0; 4];
    for i in (0..4).rev() {
        coef[i] = (m[i][4] - (i + 1..4).map(|k| m[i][k] * coef[k]).sum::<f64>()) / m[i][i];
    }
    // b + 2c u + 3d u² = 0, take the root nearest zero
    let (b, c, d) = (coef[1], coef[2], coef[3]);
    let disc = (4.0 * c * c - 12.0 * d * b).sqrt();
    let roots = [(-2.0 * c + disc) / (6.0 * d), (-2.0 * c - disc) / (6.0 * d)];
    let u = if roots[0].abs() < roots[1].abs() { roots[0] } else { roots[1] };
    mean * (1.0 + u)
}

#[test]
fn raw_csv_dump() {
    let r = simulate_fpt(&SimParams {
        horizon_over_tau: 0.05,
        ..SimParams::new(0.049, 1.5, 1e-2, 20, 1)
    })
    .unwrap();
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trajectory_index,captured,t_over_tau"));
    assert_eq!(lines.count(), 20);
}
