use super::dd::Dd;
use super::{EvalPolicy, SpecfunError};

/// Power series of M(a, b, x) in double-double, stopping once a term drops
/// below `tol` relative to the running sum while the term ratio is shrinking.
pub(crate) fn kummer_series(a: Dd, b: Dd, x: Dd, tol: f64, max_terms: usize) -> Result<Dd, SpecfunError> {
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    if x.is_zero() {
        return Ok(sum);
    }
    for k in 0..max_terms {
        let kf = k as f64;
        let num = a + kf;
        if num.is_zero() {
            // a is a non-positive integer: the series is a polynomial
            return Ok(sum);
        }
        let ratio = num * x / ((b + kf) * (kf + 1.0));
        term *= ratio;
        sum += term;
        if term.hi.abs() <= tol * sum.hi.abs() && ratio.hi.abs() < 0.5 {
            return Ok(sum);
        }
    }
    Err(SpecfunError::NoConvergence {
        series: "Kummer M",
        terms: max_terms,
    })
}

/// Kummer's confluent hypergeometric function M(a, b, x) for `x >= 0`.
pub fn kummer_m(a: f64, b: f64, x: f64, policy: &EvalPolicy) -> Result<f64, SpecfunError> {
    policy.validate()?;
    if b <= 0.0 && b == b.floor() {
        return Err(SpecfunError::Domain(format!("M(a, b, x) needs b off the non-positive integers, got {b}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(SpecfunError::Domain(format!("M(a, b, x) needs finite x >= 0, got {x}")));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(SpecfunError::Domain(format!("non-finite parameters a = {a}, b = {b}")));
    }
    let sum = kummer_series(Dd::from(a), Dd::from(b), Dd::from(x), policy.rel_tol, policy.max_terms)?;
    Ok(sum.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_argument_is_one() {
        let p = EvalPolicy::default();
        for (a, b) in [(0.3, 1.5), (-4.2, 0.5), (7.0, 2.25)] {
            assert_eq!(kummer_m(a, b, 0.0, &p).unwrap(), 1.0);
        }
    }

    #[test]
    fn exponential_case() {
        let p = EvalPolicy::default();
        assert!((kummer_m(1.0, 1.0, 1.0, &p).unwrap() / std::f64::consts::E - 1.0).abs() < 1e-12);
        assert!((kummer_m(2.5, 2.5, 10.0, &p).unwrap() / 10f64.exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn terminating_polynomial() {
        let p = EvalPolicy::default();
        let m = kummer_m(-1.0, 1.5, 2.0, &p).unwrap();
        assert!((m - (1.0 - 2.0 / 1.5)).abs() < 1e-16);
        // M(-2, b, x) = 1 - 2x/b + x^2/(b(b+1))
        let (b, x) = (0.5, 3.0);
        let expect = 1.0 - 2.0 * x / b + x * x / (b * (b + 1.0));
        assert!((kummer_m(-2.0, b, x, &p).unwrap() - expect).abs() < 1e-13);
    }

    #[test]
    fn bad_inputs() {
        let p = EvalPolicy::default();
        assert!(matches!(kummer_m(1.0, -2.0, 1.0, &p), Err(SpecfunError::Domain(_))));
        assert!(matches!(kummer_m(1.0, 1.5, -1.0, &p), Err(SpecfunError::Domain(_))));
        let tight = EvalPolicy {
            max_terms: 50,
            ..EvalPolicy::default()
        };
        assert!(matches!(
            kummer_m(0.5, 1.5, 200.0, &tight),
            Err(SpecfunError::NoConvergence { .. })
        ));
    }
}
