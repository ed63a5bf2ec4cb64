use std::io::Write;

use serde::Serialize;
use trapfpt::montecarlo::{empirical_survival, simulate_fpt, CaptureRule, SimParams};
use trapfpt::solution::{
    density_curve, escape_amplitude, escape_probability, mfpt_curve, survival_curve, Curve, Dimensionless, SeriesFlag,
    TrapParams,
};
use trapfpt::spectral::{build_eigensystem, EigenCache, EigenSystem, DEFAULT_QUAD_TOL, DEFAULT_ROOT_TOL};
use trapfpt_oracle::{mfpt_integral, OracleConfig};

use crate::acceptance;
use crate::args::{Capture, CurveArgs, EigenArgs, EscapeArgs, Format, MfptArgs, Physical, SimulateArgs, VerifyArgs};
use crate::error::CliError;
use crate::grid::{parse_list, time_grid};
use crate::output::{label, sink, write_columns};

pub struct Context {
    pub cache: Option<EigenCache>,
}

impl Context {
    fn system(&self, kappa: f64, count: usize) -> Result<EigenSystem, CliError> {
        if count == 0 {
            return Err(CliError::Usage("at least one series term is required".into()));
        }
        Ok(build_eigensystem(kappa, count, DEFAULT_ROOT_TOL, DEFAULT_QUAD_TOL, self.cache.as_ref())?)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn list(text: &str) -> Result<Vec<f64>, CliError> {
    parse_list(text).map_err(CliError::Usage)
}

/// Physical parameters converted once, echoed on stderr.
fn physical(p: &Physical, need_z: bool) -> Result<Option<(TrapParams, Dimensionless)>, CliError> {
    if p.k.is_none() && p.zeta.is_none() && p.l.is_none() && p.r0.is_none() && p.d.is_none() {
        return Ok(None);
    }
    let (Some(k), Some(zeta), Some(l)) = (p.k, p.zeta, p.l) else {
        return Err(usage("physical input needs --k-fn-per-nm, --zeta-nn-us-per-nm and --l-nm"));
    };
    let r0 = match (p.r0, need_z) {
        (Some(r0), _) => r0,
        (None, true) => return Err(usage("physical input needs --r0-nm for this command")),
        // any separation outside the sphere; z is unused
        (None, false) => 2.0 * l,
    };
    let params = TrapParams::from_table_units(k, zeta, p.d, p.temperature, l, r0)?;
    let dims = params.to_dimensionless()?;
    eprintln!(
        "physical input: kappa = {}, z = {}, tau = {} s",
        trapfpt::fmt_sig(dims.kappa),
        trapfpt::fmt_sig(dims.z),
        trapfpt::fmt_sig(dims.tau)
    );
    Ok(Some((params, dims)))
}

fn exclusive<T>(direct: Option<T>, phys: Option<T>, what: &str) -> Result<T, CliError> {
    match (direct, phys) {
        (Some(v), None) | (None, Some(v)) => Ok(v),
        (Some(_), Some(_)) => Err(usage(format!("give {what} either directly or through physical units, not both"))),
        (None, None) => Err(usage(format!("{what} is required (directly or through physical units)"))),
    }
}

#[derive(Serialize)]
struct EigenRow {
    n: usize,
    alpha_n: f64,
    lambda_n_tau: f64,
    #[serde(rename = "N_n")]
    norm: f64,
    #[serde(rename = "c_n")]
    amp: f64,
}

#[derive(Serialize)]
struct EigenTable {
    kappa: f64,
    root_tol: f64,
    quad_tol: f64,
    z_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    physical: Option<TrapParams>,
    modes: Vec<EigenRow>,
}

pub fn eigen(ctx: &Context, args: &EigenArgs) -> Result<(), CliError> {
    let phys = physical(&args.physical, false)?;
    let kappa = exclusive(args.kappa, phys.map(|p| p.1.kappa), "kappa")?;
    let system = build_eigensystem(kappa, args.count, args.root_tol, args.quad_tol, ctx.cache.as_ref())?;
    let rows: Vec<EigenRow> = system
        .modes
        .iter()
        .map(|m| EigenRow {
            n: m.n,
            alpha_n: m.alpha,
            lambda_n_tau: m.lambda_tau,
            norm: m.norm,
            amp: m.amp,
        })
        .collect();
    let mut out = sink(args.out.as_deref())?;
    match args.format {
        Format::Json => {
            let table = EigenTable {
                kappa,
                root_tol: system.root_tol,
                quad_tol: system.quad_tol,
                z_max: system.z_max,
                physical: phys.map(|p| p.0),
                modes: rows,
            };
            serde_json::to_writer_pretty(&mut out, &table)?;
            writeln!(out)?;
            out.flush()?;
        }
        Format::Csv => {
            let header = ["n", "alpha_n", "lambda_n_tau", "N_n", "c_n"].map(String::from);
            let columns = vec![
                rows.iter().map(|r| r.n as f64).collect(),
                rows.iter().map(|r| r.alpha_n).collect(),
                rows.iter().map(|r| r.lambda_n_tau).collect(),
                rows.iter().map(|r| r.norm).collect(),
                rows.iter().map(|r| r.amp).collect(),
            ];
            write_columns(&mut out, &header, &columns)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveCommand {
    Survival,
    Density,
}

pub fn curves(ctx: &Context, args: &CurveArgs, which: CurveCommand) -> Result<(), CliError> {
    let phys = physical(&args.physical, true)?;
    let kappas = exclusive(
        args.kappa.as_deref().map(list).transpose()?,
        phys.map(|p| vec![p.1.kappa]),
        "kappa",
    )?;
    let zs = exclusive(args.z.as_deref().map(list).transpose()?, phys.map(|p| vec![p.1.z]), "z")?;
    let terms = args.terms.unwrap_or(match which {
        CurveCommand::Survival => 25,
        CurveCommand::Density => trapfpt::solution::FULL_TERMS,
    });
    let grid = time_grid(args.tmax, args.points).map_err(CliError::Usage)?;
    let prefix = match which {
        CurveCommand::Survival => "S",
        CurveCommand::Density => "P",
    };

    let mut header = vec!["t_over_tau".to_string()];
    let mut built: Vec<Curve> = Vec::new();
    for &kappa in &kappas {
        let system = ctx.system(kappa, terms)?;
        for &z in &zs {
            built.push(match which {
                CurveCommand::Survival => survival_curve(&system, z, terms, &grid)?,
                CurveCommand::Density => density_curve(&system, z, terms, &grid)?,
            });
            header.push(label(prefix, kappa, Some(z)));
        }
    }

    let flagged = |i: usize, flag: SeriesFlag| built.iter().any(|c| c.flags[i] == Some(flag));
    if (0..grid.len()).any(|i| flagged(i, SeriesFlag::TruncationWarning)) {
        eprintln!(
            "warning: fewer than {} terms before t/τ = {}; early survival values are truncated",
            trapfpt::solution::FULL_TERMS,
            trapfpt::solution::TRUNCATION_TIME
        );
    }
    let keep: Vec<usize> = (0..grid.len())
        .filter(|&i| args.keep_early || !flagged(i, SeriesFlag::EarlyTimeUnreliable))
        .collect();
    if keep.len() < grid.len() {
        eprintln!(
            "note: {} rows before t/τ = {} suppressed as unreliable (use --keep-early)",
            grid.len() - keep.len(),
            trapfpt::solution::EARLY_TIME
        );
    }
    let mut columns = vec![keep.iter().map(|&i| grid[i]).collect::<Vec<_>>()];
    columns.extend(built.iter().map(|c| keep.iter().map(|&i| c.values[i]).collect()));
    write_columns(&mut *sink(args.out.as_deref())?, &header, &columns)?;
    Ok(())
}

pub fn mfpt(ctx: &Context, args: &MfptArgs) -> Result<(), CliError> {
    let phys = physical(&args.physical, false)?;
    let kappas = exclusive(
        args.kappa.as_deref().map(list).transpose()?,
        phys.map(|p| vec![p.1.kappa]),
        "kappa",
    )?;
    let zs = list(&args.z)?;
    let mut header = vec!["z".to_string()];
    let mut columns = vec![zs.clone()];
    let oracle = OracleConfig::default();
    for &kappa in &kappas {
        let system = ctx.system(kappa, args.terms)?;
        columns.push(mfpt_curve(&system, args.terms, &zs)?.values);
        header.push(label("mu_over_tau", kappa, None));
        if args.with_integral {
            let exact = zs
                .iter()
                .map(|&z| mfpt_integral(kappa, z, &oracle))
                .collect::<Result<Vec<_>, _>>()?;
            columns.push(exact);
            header.push(label("integral", kappa, None));
        }
    }
    write_columns(&mut *sink(args.out.as_deref())?, &header, &columns)?;
    Ok(())
}

#[derive(Serialize)]
struct SimulationReport {
    params: SimParams,
    captured: usize,
    censored: usize,
    compare_times: Vec<f64>,
    empirical: Vec<f64>,
    std_err: Vec<f64>,
    theory: Vec<f64>,
    terms: usize,
    max_abs_gap: f64,
    tolerance: f64,
    passed: bool,
}

pub fn simulate(ctx: &Context, args: &SimulateArgs) -> Result<(), CliError> {
    let phys = physical(&args.physical, true)?;
    let kappa = exclusive(args.kappa, phys.map(|p| p.1.kappa), "kappa")?;
    let z0 = exclusive(args.z, phys.map(|p| p.1.z), "z")?;
    let params = SimParams {
        horizon_over_tau: args.horizon,
        capture: match args.capture {
            Capture::Bridge => CaptureRule::Bridge,
            Capture::Endpoint => CaptureRule::Endpoint,
        },
        ..SimParams::new(kappa, z0, args.dt, args.n, args.seed)
    };
    let result = simulate_fpt(&params)?;
    if let Some(path) = &args.samples {
        result.write_csv(sink(Some(path))?)?;
    }
    let grid = time_grid(args.horizon, args.points).map_err(CliError::Usage)?;
    let empirical = empirical_survival(&result, &grid)?;
    let mut header = ["t_over_tau", "survival", "std_err"].map(String::from).to_vec();
    let mut columns = vec![grid.clone(), empirical.values.clone(), empirical.std_err.clone().unwrap_or_default()];

    let mut verdict = Ok(());
    if args.compare {
        let system = ctx.system(kappa, args.terms)?;
        header.push("theory".into());
        columns.push(survival_curve(&system, z0, args.terms, &grid)?.values);

        let times = list(&args.compare_times)?;
        let at = empirical_survival(&result, &times)?;
        let theory = survival_curve(&system, z0, args.terms, &times)?.values;
        let max_abs_gap = at.values.iter().zip(&theory).map(|(e, t)| (e - t).abs()).fold(0.0, f64::max);
        let passed = max_abs_gap <= args.tolerance;
        let report = SimulationReport {
            params,
            captured: result.fpt_samples().len(),
            censored: result.censored_count(),
            compare_times: times,
            empirical: at.values,
            std_err: at.std_err.unwrap_or_default(),
            theory,
            terms: args.terms,
            max_abs_gap,
            tolerance: args.tolerance,
            passed,
        };
        let text = serde_json::to_string_pretty(&report)?;
        match &args.report {
            Some(path) => std::fs::write(path, text + "\n")?,
            None => eprintln!("{text}"),
        }
        if !passed {
            verdict = Err(CliError::Verification(format!(
                "max |S_emp - S_series| = {max_abs_gap:.4} exceeds {}",
                args.tolerance
            )));
        }
    }
    write_columns(&mut *sink(args.out.as_deref())?, &header, &columns)?;
    verdict
}

pub fn escape(ctx: &Context, args: &EscapeArgs) -> Result<(), CliError> {
    let kappas = list(&args.kappa)?;
    let zs = list(&args.z)?;
    let mut header = vec!["z".to_string(), "escape_probability".to_string()];
    let mut columns = vec![
        zs.clone(),
        zs.iter().map(|&z| escape_probability(z)).collect::<Result<Vec<_>, _>>()?,
    ];
    for &kappa in &kappas {
        let system = ctx.system(kappa, 1)?;
        columns.push(
            zs.iter()
                .map(|&z| escape_amplitude(&system, z))
                .collect::<Result<Vec<_>, _>>()?,
        );
        header.push(label("c1psi1", kappa, None));
    }
    write_columns(&mut *sink(args.out.as_deref())?, &header, &columns)?;
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let ids: Vec<u8> = if args.only.is_empty() {
        acceptance::CRITERIA.iter().map(|c| c.0).collect()
    } else {
        args.only.clone()
    };
    if let Some(bad) = ids.iter().find(|id| !acceptance::CRITERIA.iter().any(|c| c.0 == **id)) {
        return Err(usage(format!("no acceptance criterion {bad}")));
    }
    let mut suite = acceptance::Suite::new();
    let mut outcomes = Vec::new();
    for id in ids {
        let outcome = suite.run(id);
        println!("{}", outcome.line());
        outcomes.push(outcome);
    }
    if let Some(path) = &args.report {
        std::fs::write(path, serde_json::to_string_pretty(&outcomes)? + "\n")?;
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} of {} criteria failed", outcomes.len())));
    }
    Ok(())
}
