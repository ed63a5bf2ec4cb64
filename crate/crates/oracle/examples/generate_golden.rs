//! Regenerates fixtures/golden.json. Slow: run with --release.

use std::path::Path;

use trapfpt_oracle::{
    highprec_alpha, highprec_mode, highprec_tricomi, mfpt_integral, pde_survival, write_fixture, GoldenEntry,
    OracleConfig, OracleError, GENERATOR_VERSION,
};

const DIGITS: u32 = 50;
/// Digits written for f64 results.
const F64_DIGITS: u32 = 17;

fn entry(quantity: &str, kappa: f64, z_or_n: f64, value: String, digits: u32) -> GoldenEntry {
    GoldenEntry {
        quantity: quantity.into(),
        kappa,
        z_or_n,
        value,
        digits,
        generator_version: GENERATOR_VERSION.into(),
    }
}

fn main() -> Result<(), OracleError> {
    let config = OracleConfig::with_digits(DIGITS);
    let text = |f: &rug::Float| f.to_string_radix(10, Some(DIGITS as usize));
    let mut out = Vec::new();

    let u = highprec_tricomi(-1.0, 0.012, DIGITS)?;
    out.push(entry("tricomi_u_order_minus_1", 0.012, 1.0, text(&u), DIGITS));
    for kappa in [0.003, 0.012, 0.024, 0.049] {
        let a = highprec_alpha(kappa, 1, &config)?;
        out.push(entry("alpha", kappa, 1.0, text(&a), DIGITS));
    }
    let a = highprec_alpha(0.012, 25, &config)?;
    out.push(entry("alpha", 0.012, 25.0, text(&a), DIGITS));

    let mode = highprec_mode(0.012, 1, &config)?;
    out.push(entry("norm", 0.012, 1.0, text(&mode.norm), DIGITS));
    out.push(entry("amp", 0.012, 1.0, text(&mode.amp), DIGITS));
    out.push(entry("psi_1", 0.012, 5.0, text(&mode.psi(5.0)?), DIGITS));

    let small = highprec_mode(0.00012, 1, &config)?;
    let escape = rug::Float::with_val(200, &small.amp * small.psi(5.0)?);
    out.push(entry("escape_amplitude", 0.00012, 5.0, text(&escape), DIGITS));

    let mu = mfpt_integral(0.049, 5.0, &config)?;
    out.push(entry("mfpt", 0.049, 5.0, format!("{mu:.16e}"), F64_DIGITS));

    for t in [0.5, 1.0, 2.0, 4.0] {
        let s = pde_survival(0.012, 5.0, t, &config)?;
        // Richardson-checked, so only a few digits are meaningful
        out.push(entry(&format!("pde_survival_t{t}"), 0.012, 5.0, format!("{s:.6}"), 4));
    }

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/golden.json");
    write_fixture(&path, &out)?;
    println!("wrote {} entries to {}", out.len(), path.display());
    Ok(())
}
