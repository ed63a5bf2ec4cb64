use trapfpt::solution::{
    density_curve, escape_amplitude, escape_probability, fpt_density, mfpt, survival, Expansion, SeriesFlag,
    TrapParams,
};
use trapfpt::spectral::{build_eigensystem, EigenSystem, DEFAULT_QUAD_TOL, DEFAULT_ROOT_TOL};

fn system(kappa: f64, count: usize) -> EigenSystem {
    build_eigensystem(kappa, count, DEFAULT_ROOT_TOL, DEFAULT_QUAD_TOL, None).unwrap()
}

fn slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = sxy / sxx;
    (b, my - b * mx)
}

#[test]
fn boundary_values_vanish() {
    let sys = system(0.012, 25);
    for t in [0.0, 0.3, 2.0] {
        assert!(survival(&sys, 1.0, t).unwrap().raw.abs() < 1e-8);
    }
    assert!(fpt_density(&sys, 1.0, 0.5).unwrap().raw.abs() < 1e-8);
    assert!(mfpt(&sys, 1.0).unwrap().abs() < 1e-8);
    assert_eq!(escape_amplitude(&sys, 1.0).unwrap(), 0.0);
}

#[test]
fn flags_follow_the_early_time_rules() {
    let s25 = system(0.012, 25);
    let s50 = system(0.012, 50);
    assert_eq!(survival(&s25, 5.0, 0.1).unwrap().flag, Some(SeriesFlag::TruncationWarning));
    assert_eq!(survival(&s50, 5.0, 0.1).unwrap().flag, None);
    assert_eq!(survival(&s25, 5.0, 0.2).unwrap().flag, None);
    assert_eq!(fpt_density(&s50, 5.0, 0.02).unwrap().flag, Some(SeriesFlag::EarlyTimeUnreliable));
    assert_eq!(fpt_density(&s50, 5.0, 0.03).unwrap().flag, None);
    let early = survival(&s25, 2.0, 0.0).unwrap();
    assert!((0.0..=1.0).contains(&early.reported));
}

#[test]
fn nearly_single_exponential_from_ten_radii() {
    let exp = Expansion::new(&system(0.012, 25), 10.0, 25).unwrap();
    let ts: Vec<f64> = (0..=45).map(|i| 0.5 + 0.1 * i as f64).collect();
    let ln_s: Vec<f64> = ts.iter().map(|&t| exp.survival(t).unwrap().raw.ln()).collect();
    let (b, a) = slope(&ts, &ln_s);
    let worst = ts.iter().zip(&ln_s).map(|(t, y)| (y - (a + b * t)).abs()).fold(0.0, f64::max);
    assert!(worst <= 0.05, "{worst}");
}

#[test]
fn density_is_minus_time_derivative_of_survival() {
    let exp = Expansion::new(&system(0.012, 50), 5.0, 50).unwrap();
    let h = 1e-4;
    let t = 0.5;
    let fd = -(exp.survival(t + h).unwrap().raw - exp.survival(t - h).unwrap().raw) / (2.0 * h);
    let p = exp.density(t).unwrap().raw;
    assert!((p - fd).abs() <= 1e-6 * p.abs(), "{p} vs {fd}");
}

#[test]
fn density_integrates_to_initial_survival() {
    let sys = system(0.012, 50);
    let exp = Expansion::new(&sys, 5.0, 50).unwrap();
    // termwise: ∫₀^∞ 2α A e^{-2αt} dt = A
    let (mut acc, n, upper) = (0.0, 400_000, 40.0 / sys.modes[0].lambda_tau);
    let h = upper / n as f64;
    for i in 0..n {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        let mid = 0.5 * (a + b);
        acc += h / 6.0 * (exp.density(a).unwrap().raw + 4.0 * exp.density(mid).unwrap().raw + exp.density(b).unwrap().raw);
    }
    let s0 = exp.survival(0.0).unwrap().raw;
    assert!((acc - s0).abs() < 1e-6, "{acc} vs {s0}");
}

#[test]
fn mfpt_is_area_under_survival() {
    for (kappa, z) in [(0.012, 5.0), (0.049, 2.0), (0.003, 10.0)] {
        let exp = Expansion::new(&system(kappa, 25), z, 25).unwrap();
        let upper = 60.0 / (2.0 * system(kappa, 1).modes[0].alpha);
        let n = 200_000;
        let h = upper / n as f64;
        let mut area = 0.0;
        for i in 0..n {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            area += h / 6.0
                * (exp.survival(a).unwrap().raw + 4.0 * exp.survival(0.5 * (a + b)).unwrap().raw + exp.survival(b).unwrap().raw);
        }
        let mu = exp.mfpt();
        assert!((area / mu - 1.0).abs() < 1e-3, "κ = {kappa}: {area} vs {mu}");
    }
}

#[test]
fn survival_non_increasing_after_early_times() {
    for kappa in [0.003, 0.012, 0.049] {
        let sys = system(kappa, 25);
        for z in [2.0, 5.0, 10.0, 20.0] {
            let exp = Expansion::new(&sys, z, 25).unwrap();
            let mut prev = f64::INFINITY;
            for i in 0..=580 {
                let s = exp.survival(0.2 + 0.01 * i as f64).unwrap().raw;
                assert!(s <= prev + 1e-12, "κ = {kappa}, z = {z}, step {i}");
                prev = s;
            }
        }
    }
}

#[test]
fn long_time_slope_is_the_first_rate() {
    for kappa in [0.003, 0.012, 0.024, 0.049] {
        let sys = system(kappa, 25);
        for z in [2.0, 5.0, 10.0, 20.0] {
            let exp = Expansion::new(&sys, z, 25).unwrap();
            let ts: Vec<f64> = (0..=30).map(|i| 3.0 + 0.1 * i as f64).collect();
            let ln_s: Vec<f64> = ts.iter().map(|&t| exp.survival(t).unwrap().raw.ln()).collect();
            let (b, _) = slope(&ts, &ln_s);
            let expect = -2.0 * sys.modes[0].alpha;
            if kappa == 0.012 || z == 5.0 {
                assert!((b / expect - 1.0).abs() <= 0.01, "κ = {kappa}, z = {z}: {b} vs {expect}");
            }
        }
    }
}

#[test]
fn escape_amplitude_approaches_free_space_limit() {
    let gaps: Vec<f64> = [0.012, 0.003, 0.0012, 0.00012]
        .iter()
        .map(|&kappa| {
            let sys = system(kappa, 1);
            (0..=180)
                .map(|i| {
                    let z = 2.0 + 0.1 * i as f64;
                    (escape_amplitude(&sys, z).unwrap() - escape_probability(z).unwrap()).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    let tiny = system(0.00012, 1);
    assert!((escape_amplitude(&tiny, 5.0).unwrap() - 0.8).abs() < 0.02);
    assert!(escape_amplitude(&system(0.012, 1), 5.0).unwrap() > 0.8);
}

#[test]
fn table_parameters_give_the_tabulated_stiffness() {
    let expect = [0.003, 0.012, 0.024, 0.049];
    let rates = [0.125, 0.5, 1.0, 2.0];
    for ((k, kappa), rate) in [0.2525, 1.01, 2.02, 4.04].iter().zip(expect).zip(rates) {
        let p = TrapParams::from_table_units(*k, 2.02, None, 300.0, 10.0, 50.0).unwrap();
        let d = p.to_dimensionless().unwrap();
        assert!((d.kappa - kappa).abs() <= 0.001, "{k}: {}", d.kappa);
        assert!((p.relaxation_rate() - rate).abs() < 5e-4 * rate);
    }
}

#[test]
fn equilibrium_radii() {
    let p = TrapParams::from_table_units(1.01, 2.02, None, 300.0, 10.0, 50.0).unwrap();
    let s = p.equilibrium_stats();
    assert!((s.rms * 1e9 - 111.0).abs() <= 1.0);
    assert!((s.mean * 1e9 - 102.0).abs() <= 1.0);
    assert!((s.mode * 1e9 - 91.0).abs() <= 1.0);
}

#[test]
fn density_curve_keeps_flags() {
    let sys = system(0.012, 50);
    let grid = [0.01, 0.02, 0.05, 0.5];
    let c = density_curve(&sys, 5.0, 50, &grid).unwrap();
    assert_eq!(c.flags[0], Some(SeriesFlag::EarlyTimeUnreliable));
    assert_eq!(c.flags[3], None);
    assert_eq!(c.meta.terms, 50);
}
