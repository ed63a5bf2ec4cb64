//! Multiprecision evaluation of U(a, 3/2, x) through the connection formula
//!
//! `U(a, 3/2, x) = -2√π/Γ(a - 1/2) M(a, 3/2, x) + √π/Γ(a) x^{-1/2} M(a - 1/2, 1/2, x)`
//!
//! with both Kummer series summed directly. Cancellation between the two
//! halves grows like e^x, so the working precision is raised with x and every
//! value carries a rounding bound in log2 units.

use rug::float::Constant;
use rug::Float;

use crate::{check_kappa, OracleConfig, OracleError};

const MAX_SERIES_TERMS: usize = 200_000;
/// Spacing of the sign scan in α. Consecutive zeros are about one apart.
const SCAN_STEP: f64 = 0.02;
const PRECISION_BUMPS: u32 = 4;
/// Tanh-sinh panels across [1, Z].
const PANELS: usize = 4;
const MIN_LEVEL: u32 = 4;
const MAX_LEVEL: u32 = 10;

fn log2_abs(x: &Float) -> f64 {
    if x.is_zero() {
        f64::NEG_INFINITY
    } else {
        // within one of the true value, enough for error budgeting
        f64::from(x.get_exp().unwrap_or(0))
    }
}

/// Sum of M(a, b, x) with the largest term magnitude (log2) and term count.
fn kummer(a: &Float, b: &Float, x: &Float, prec: u32) -> Result<(Float, f64, usize), OracleError> {
    let mut term = Float::with_val(prec, 1);
    let mut sum = Float::with_val(prec, 1);
    let mut largest = 0.0f64;
    let a_abs = a.to_f64().abs();
    let x_f = x.to_f64();
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= Float::with_val(prec, a + kf);
        term /= Float::with_val(prec, b + kf);
        term *= x;
        term /= kf + 1.0;
        sum += &term;
        if term.is_zero() {
            return Ok((sum, largest, k + 1));
        }
        largest = largest.max(log2_abs(&term));
        if kf > a_abs + x_f && log2_abs(&term) < log2_abs(&sum) - f64::from(prec) - 4.0 {
            let largest = largest.max(log2_abs(&sum));
            return Ok((sum, largest, k + 1));
        }
    }
    Err(OracleError::PrecisionExhausted(format!(
        "Kummer series did not settle within {MAX_SERIES_TERMS} terms"
    )))
}

/// 1/Γ(y), exact zero at the poles.
fn rgamma(y: &Float, prec: u32) -> Float {
    if *y > 0.5 {
        return Float::with_val(prec, y.gamma_ref()).recip();
    }
    // reflection: 1/Γ(y) = Γ(1 - y) sin(πy) / π, with the argument of sin
    // reduced first so integer-adjacent y keep their relative accuracy
    let m = Float::with_val(prec, y.round_ref());
    let frac = Float::with_val(prec, y - &m);
    if frac.is_zero() {
        return Float::new(prec);
    }
    let pi = Float::with_val(prec, Constant::Pi);
    let mut s = Float::with_val(prec, &frac * &pi).sin();
    let odd = !Float::with_val(prec, &m / 2u32).is_integer();
    if odd {
        s = -s;
    }
    let g = Float::with_val(prec, 1 - y).gamma();
    s * g / pi
}

/// U(a, 3/2, x) at working precision `prec` with a log2 bound on its absolute error.
fn tricomi_at(a: &Float, x: &Float, prec: u32) -> Result<(Float, f64), OracleError> {
    let half = Float::with_val(prec, 0.5);
    let sqrt_pi = Float::with_val(prec, Constant::Pi).sqrt();
    let (m1, big1, n1) = kummer(a, &Float::with_val(prec, 1.5), x, prec)?;
    let a2 = Float::with_val(prec, a - &half);
    let (m2, big2, n2) = kummer(&a2, &half, x, prec)?;
    let c1 = Float::with_val(prec, -2 * &sqrt_pi) * rgamma(&a2, prec);
    let c2 = sqrt_pi * rgamma(a, prec) / Float::with_val(prec, x.sqrt_ref());
    let scale = (log2_abs(&c1) + big1).max(log2_abs(&c2) + big2);
    let value = c1 * m1 + c2 * m2;
    let err = scale - f64::from(prec) + 8.0 + ((n1 + n2) as f64 + a.to_f64().abs() + 10.0).log2();
    Ok((value, err))
}

/// Working precision that leaves `bits` after the cancellation expected at `x`.
fn working_bits(bits: u32, order: f64, x: f64) -> u32 {
    let gamma_size = (order.abs() + 2.0) * (order.abs() + 2.0).log2();
    bits + 48 + (x * std::f64::consts::LOG2_E).ceil() as u32 + gamma_size.ceil() as u32
}

/// U(a, 3/2, x) to `digits` significant digits. Fails near zeros of U, where
/// relative accuracy cannot be certified.
pub fn highprec_tricomi(a: f64, x: f64, digits: u32) -> Result<Float, OracleError> {
    if !(x > 0.0 && x.is_finite() && a.is_finite()) {
        return Err(OracleError::Domain(format!("need finite a and x > 0, got a = {a}, x = {x}")));
    }
    let bits = (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + 8;
    let mut prec = working_bits(bits, a, x);
    for _ in 0..=PRECISION_BUMPS {
        let (v, err) = tricomi_at(&Float::with_val(prec, a), &Float::with_val(prec, x), prec)?;
        if v.is_zero() {
            return Ok(v);
        }
        let room = log2_abs(&v) - err;
        if room >= f64::from(bits) {
            return Ok(Float::with_val(bits, v));
        }
        prec += (f64::from(bits) - room).ceil() as u32 + 32;
    }
    Err(OracleError::PrecisionExhausted(format!(
        "U({a}, 3/2, {x}) not resolved to {digits} digits"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    Zero,
    Negative,
    Positive,
}

/// Sign of U(-α, 3/2, κ), raising precision until it is certain.
fn boundary_sign(alpha: &Float, kappa: f64, prec: u32) -> Result<Sign, OracleError> {
    let mut p = prec;
    for _ in 0..=PRECISION_BUMPS {
        let a = Float::with_val(p, -alpha);
        let (v, err) = tricomi_at(&a, &Float::with_val(p, kappa), p)?;
        if v.is_zero() {
            return Ok(Sign::Zero);
        }
        if log2_abs(&v) > err + 1.0 {
            return Ok(if v.is_sign_negative() { Sign::Negative } else { Sign::Positive });
        }
        p += 64;
    }
    Err(OracleError::PrecisionExhausted(format!(
        "sign of U(-{alpha}, 3/2, {kappa}) undecided at {p} bits"
    )))
}

/// The first `count` zeros in α of U(-α, 3/2, κ), each to `config.digits` digits.
pub fn highprec_alphas(kappa: f64, count: usize, config: &OracleConfig) -> Result<Vec<Float>, OracleError> {
    config.validate()?;
    check_kappa(kappa)?;
    let bits = config.bits();
    let prec = bits + 32;
    let ceiling = 2.0 * count as f64 + 2.0 * kappa + 50.0;
    let mut roots = Vec::with_capacity(count);
    let mut prev = Some(Sign::Positive); // U(0, 3/2, x) = 1
    let mut lo = Float::new(prec);
    let mut k = 1u64;
    while roots.len() < count {
        let alpha_f = k as f64 * SCAN_STEP;
        if alpha_f > ceiling {
            return Err(OracleError::Domain(format!(
                "found {} of {count} zeros below alpha = {ceiling}",
                roots.len()
            )));
        }
        let hi = Float::with_val(prec, alpha_f);
        let s = boundary_sign(&hi, kappa, prec)?;
        match (prev, s) {
            (_, Sign::Zero) => {
                roots.push(Float::with_val(bits, &hi));
                prev = None;
            }
            (Some(p), s) if p != s => {
                roots.push(bisect(lo.clone(), hi.clone(), p, kappa, bits, prec)?);
                prev = Some(s);
            }
            _ => prev = Some(s),
        }
        lo = hi;
        k += 1;
    }
    Ok(roots)
}

fn bisect(mut lo: Float, mut hi: Float, lo_sign: Sign, kappa: f64, bits: u32, prec: u32) -> Result<Float, OracleError> {
    loop {
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        let width = Float::with_val(prec, &hi - &lo);
        if log2_abs(&width) < log2_abs(&mid).max(0.0) - f64::from(bits) {
            return Ok(Float::with_val(bits, mid));
        }
        match boundary_sign(&mid, kappa, prec)? {
            Sign::Zero => return Ok(Float::with_val(bits, mid)),
            s if s == lo_sign => lo = mid,
            _ => hi = mid,
        }
    }
}

/// α_n, the n-th zero (1-based) of U(-α, 3/2, κ).
pub fn highprec_alpha(kappa: f64, n: usize, config: &OracleConfig) -> Result<Float, OracleError> {
    if n == 0 {
        return Err(OracleError::Domain("mode index starts at 1".into()));
    }
    Ok(highprec_alphas(kappa, n, config)?.pop().expect("n roots"))
}

/// α_n, N_n and c_n with the eigenfunction normalised against the weight
/// z² e^{-κz²} on [1, ∞).
#[derive(Debug, Clone)]
pub struct HighPrecMode {
    pub kappa: f64,
    pub n: usize,
    pub alpha: Float,
    pub norm: Float,
    pub amp: Float,
    bits: u32,
}

impl HighPrecMode {
    /// ψ_n(z) = U(-α_n, 3/2, κz²) / N_n.
    pub fn psi(&self, z: f64) -> Result<Float, OracleError> {
        if !(z >= 1.0 && z.is_finite()) {
            return Err(OracleError::Domain(format!("z must be at least 1, got {z}")));
        }
        let u = self.unnormalised(&Float::with_val(self.bits + 64, z))?;
        Ok(Float::with_val(self.bits, u / &self.norm))
    }

    fn unnormalised(&self, z: &Float) -> Result<Float, OracleError> {
        let x = Float::with_val(z.prec(), z.square_ref()) * self.kappa;
        let prec = working_bits(self.bits, self.alpha.to_f64(), x.to_f64());
        let (v, _) = tricomi_at(&Float::with_val(prec, -&self.alpha), &Float::with_val(prec, &x), prec)?;
        Ok(v)
    }
}

/// Far end of the normalisation integrals: beyond it the integrand of N²
/// is below 2^-bits of its size.
fn truncation(kappa: f64, alpha: f64, bits: u32) -> f64 {
    let target = f64::from(bits + 20) * std::f64::consts::LN_2;
    let mut z = (target / kappa).sqrt().max(2.0);
    for _ in 0..50 {
        let x = kappa * z * z;
        z = ((target + 2.0 * alpha * x.max(1.0).ln() + 2.0 * z.ln()) / kappa).sqrt().max(2.0);
    }
    z
}

/// Mode constants at `config.digits` digits, by tanh-sinh quadrature.
pub fn highprec_mode(kappa: f64, n: usize, config: &OracleConfig) -> Result<HighPrecMode, OracleError> {
    let alpha = highprec_alpha(kappa, n, config)?;
    let bits = config.bits();
    let mut mode = HighPrecMode {
        kappa,
        n,
        alpha,
        norm: Float::with_val(bits, 1),
        amp: Float::new(bits),
        bits,
    };
    let z_end = truncation(kappa, mode.alpha.to_f64(), bits);
    let prec = bits + 32;
    let mut plain = Float::new(prec);
    let mut square = Float::new(prec);
    for i in 0..PANELS {
        let lo = 1.0 + (z_end - 1.0) * i as f64 / PANELS as f64;
        let hi = 1.0 + (z_end - 1.0) * (i + 1) as f64 / PANELS as f64;
        let (p, s) = tanh_sinh(&mode, lo, hi, prec)?;
        plain += p;
        square += s;
    }
    mode.norm = Float::with_val(bits, square.sqrt());
    mode.amp = Float::with_val(bits, plain / &mode.norm);
    Ok(mode)
}

/// ∫ w U and ∫ w U² over [lo, hi] with w = z² e^{-κz²}.
fn tanh_sinh(mode: &HighPrecMode, lo: f64, hi: f64, prec: u32) -> Result<(Float, Float), OracleError> {
    let half_pi = Float::with_val(prec, Constant::Pi) / 2u32;
    // exact panel ends; rounding these in f64 leaves gaps between panels
    let centre = (Float::with_val(prec, lo) + hi) / 2u32;
    let radius = (Float::with_val(prec, hi) - lo) / 2u32;
    // weights fall below 2^-prec once (π/2) e^t exceeds prec ln 2
    let t_max = (f64::from(prec) * std::f64::consts::LN_2 / std::f64::consts::FRAC_PI_2 * 1.5).ln() + 0.5;

    let node = |t: f64| -> Result<(Float, Float, Float, Float), OracleError> {
        let t = Float::with_val(prec, t);
        let u = Float::with_val(prec, t.sinh_ref()) * &half_pi;
        let ch = Float::with_val(prec, u.cosh_ref());
        let weight = Float::with_val(prec, t.cosh_ref()) * &half_pi / ch.square() * &radius;
        let th = u.tanh();
        let z = Float::with_val(prec, &centre + &radius * th);
        let z2 = Float::with_val(prec, z.square_ref());
        let w = Float::with_val(prec, &z2 * -mode.kappa).exp() * &z2;
        let v = mode.unnormalised(&z)?;
        let f = Float::with_val(prec, &w * &v);
        let f_abs = Float::with_val(prec, f.abs_ref());
        let g = Float::with_val(prec, &f * &v);
        Ok((weight.clone() * f, weight.clone() * f_abs, weight * g, z))
    };

    let mut level = 0;
    let mut h = 1.0f64;
    let (mut s1, mut s1_abs, mut s2) = (Float::new(prec), Float::new(prec), Float::new(prec));
    let (mut prev1, mut prev2) = (Float::new(prec), Float::new(prec));
    loop {
        // at level 0 every node j h, afterwards only the odd ones
        let stride = if level == 0 { 1 } else { 2 };
        let start = if level == 0 { 0 } else { 1 };
        let (mut a1, mut a1_abs, mut a2) = (Float::new(prec), Float::new(prec), Float::new(prec));
        let mut j: i64 = start;
        while (j as f64) * h <= t_max {
            let signs: &[f64] = if j == 0 { &[1.0] } else { &[1.0, -1.0] };
            for &sg in signs {
                let (f, fa, g, _) = node(sg * j as f64 * h)?;
                a1 += f;
                a1_abs += fa;
                a2 += g;
            }
            j += stride;
        }
        if level == 0 {
            s1 = a1 * h;
            s1_abs = a1_abs * h;
            s2 = a2 * h;
        } else {
            s1 = s1 / 2u32 + a1 * h;
            s1_abs = s1_abs / 2u32 + a1_abs * h;
            s2 = s2 / 2u32 + a2 * h;
        }
        if level >= MIN_LEVEL {
            // demand a full-precision change rather than trusting the usual
            // squaring of the error per level
            let d1 = log2_abs(&Float::with_val(prec, &s1 - &prev1)) - log2_abs(&s1_abs);
            let d2 = log2_abs(&Float::with_val(prec, &s2 - &prev2)) - log2_abs(&s2);
            let need = -f64::from(mode.bits - 16);
            if d1.max(d2) < need || s2.is_zero() {
                return Ok((s1, s2));
            }
        }
        if level == MAX_LEVEL {
            return Err(OracleError::PrecisionExhausted(format!(
                "tanh-sinh on [{lo}, {hi}] unsettled at level {MAX_LEVEL}"
            )));
        }
        prev1 = s1.clone();
        prev2 = s2.clone();
        level += 1;
        h /= 2.0;
    }
}

/// ψ_n(z) at `config.digits` digits.
pub fn highprec_psi(kappa: f64, n: usize, z: f64, config: &OracleConfig) -> Result<Float, OracleError> {
    highprec_mode(kappa, n, config)?.psi(z)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_cases_are_exact() {
        // U(-1, 3/2, x) = x - 3/2
        let v = highprec_tricomi(-1.0, 0.012, 40).unwrap();
        assert_eq!(v, Float::with_val(200, 0.012f64) - 1.5f64);
        let v = highprec_tricomi(-1.0, 1.5, 40).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn matches_closed_form_at_zero_order() {
        // U(0, b, x) = 1
        let v = highprec_tricomi(0.0, 7.3, 40).unwrap();
        assert!((v - 1.0f64).abs() < 1e-39);
    }
}
