use super::dd::{Dd, DD_EPS, SQRT_PI};
use super::gamma::rgamma_dd;
use super::kummer::kummer_series;
use super::{EvalPolicy, SpecfunError};

/// Below this order the evaluator seeds a downward three-term recurrence in
/// `a` from the two nearest small-order values instead of summing series
/// whose terms cancel by more than the double-double headroom.
const RECURRENCE_BELOW: f64 = -30.0;

/// Below the asymptotic switch, the asymptotic sum is still tried from here
/// on and used when its error estimate beats the connection formula.
const EARLY_ASYMPTOTIC: f64 = 20.0;
const EARLY_ASYMPTOTIC_MARGIN: f64 = 1e-3;

/// Extra relative headroom asked of each Kummer series so that the
/// cancellation between the two connection-formula terms stays below
/// `rel_tol` in the final double.
const CANCELLATION_HEADROOM: f64 = 1e-18;

/// Tricomi U(a, b, ·) for fixed `a` and `b ∈ {1/2, 3/2}`.
///
/// The gamma-ratio prefactors of the connection formula depend only on the
/// parameters, so building the evaluator once and calling [`eval`] many
/// times (as quadrature does) skips their recomputation. The b = 1/2 case is
/// reduced to b = 3/2 through U(a, 1/2, x) = x^(1/2) U(a + 1/2, 3/2, x),
/// whose connection formula cancels less at large x.
///
/// [`eval`]: TricomiEval::eval
#[derive(Debug, Clone)]
pub struct TricomiEval {
    a: f64,
    b: f64,
    /// Order of the b = 3/2 function actually evaluated.
    order: f64,
    policy: EvalPolicy,
    /// Γ(-1/2)/Γ(order - 1/2), multiplying M(order, 3/2, x).
    coeff_regular: Dd,
    /// Γ(1/2)/Γ(order), multiplying x^(-1/2) M(order - 1/2, 1/2, x).
    coeff_singular: Dd,
}

impl TricomiEval {
    pub fn new(a: f64, b: f64, policy: &EvalPolicy) -> Result<Self, SpecfunError> {
        policy.validate()?;
        if !a.is_finite() {
            return Err(SpecfunError::Domain(format!("U(a, b, x) needs finite a, got {a}")));
        }
        let order = if b == 1.5 {
            a
        } else if b == 0.5 {
            a + 0.5
        } else {
            return Err(SpecfunError::Domain(format!("U(a, b, x) supports b = 1/2 or 3/2, got {b}")));
        };
        let mut eval = TricomiEval {
            a,
            b,
            order,
            policy: *policy,
            coeff_regular: Dd::ZERO,
            coeff_singular: Dd::ZERO,
        };
        let order_dd = eval.order_dd();
        // Γ(-1/2) = -2√π, Γ(1/2) = √π
        eval.coeff_regular = -(SQRT_PI * 2.0) * rgamma_dd(order_dd - 0.5);
        eval.coeff_singular = SQRT_PI * rgamma_dd(order_dd);
        Ok(eval)
    }

    /// The shifted order in double-double, exact even when `a + 1/2` rounds.
    fn order_dd(&self) -> Dd {
        Dd::from(self.a) + if self.b == 0.5 { 0.5 } else { 0.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn eval(&self, x: f64) -> Result<f64, SpecfunError> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(SpecfunError::Domain(format!("U(a, b, x) needs finite x > 0, got {x}")));
        }
        let u = if self.order < RECURRENCE_BELOW {
            self.recurrence(x)?
        } else {
            self.direct(x)?
        };
        Ok(if self.b == 0.5 { x.sqrt() * u } else { u })
    }

    /// U(order, 3/2, x) without the recurrence.
    fn direct(&self, x: f64) -> Result<f64, SpecfunError> {
        if x >= self.policy.asymptotic_switch {
            return self.asymptotic(x);
        }
        if x >= EARLY_ASYMPTOTIC {
            // the connection formula cancels like e^x here; prefer the
            // asymptotic sum whenever it is already accurate
            let (sum, err) = self.asymptotic_sum(x);
            if err <= EARLY_ASYMPTOTIC_MARGIN * self.policy.rel_tol * sum.abs() {
                return Ok(x.powf(-self.order) * sum);
            }
        }
        self.connection(x)
    }

    /// U(a-1) = (2a - 3/2 + x) U(a) - a(a - 1/2) U(a+1), run towards more
    /// negative `a`, where U is the dominant solution.
    fn recurrence(&self, x: f64) -> Result<f64, SpecfunError> {
        let steps = (-self.order).floor();
        let top = self.order + steps;
        let mut upper = TricomiEval::new(top, 1.5, &self.policy)?.direct(x)?;
        let mut order = top - 1.0;
        let mut current = TricomiEval::new(order, 1.5, &self.policy)?.direct(x)?;
        for _ in 1..steps as usize {
            let next = (2.0 * order - 1.5 + x) * current - order * (order - 0.5) * upper;
            upper = current;
            current = next;
            order -= 1.0;
        }
        Ok(current)
    }

    fn connection(&self, x: f64) -> Result<f64, SpecfunError> {
        let tol = (self.policy.rel_tol * CANCELLATION_HEADROOM).max(DD_EPS);
        let x_dd = Dd::from(x);
        let a = self.order_dd();
        let mut total = Dd::ZERO;
        if !self.coeff_regular.is_zero() {
            total += self.coeff_regular * kummer_series(a, Dd::from(1.5), x_dd, tol, self.policy.max_terms)?;
        }
        if !self.coeff_singular.is_zero() {
            let m = kummer_series(a - 0.5, Dd::from(0.5), x_dd, tol, self.policy.max_terms)?;
            total += self.coeff_singular * x_dd.sqrt().recip() * m;
        }
        Ok(total.to_f64())
    }

    /// x^(-a) Σ (a)_k (a-1/2)_k / k! (-x)^(-k), cut at the smallest term.
    fn asymptotic(&self, x: f64) -> Result<f64, SpecfunError> {
        let (sum, err) = self.asymptotic_sum(x);
        if err > self.policy.rel_tol * sum.abs() {
            return Err(SpecfunError::NoConvergence {
                series: "Tricomi U asymptotic",
                terms: self.policy.max_terms,
            });
        }
        Ok(x.powf(-self.order) * sum)
    }

    /// The asymptotic sum without the x^(-a) factor, with an absolute error
    /// estimate covering both truncation and rounding of the largest term.
    fn asymptotic_sum(&self, x: f64) -> (f64, f64) {
        let tol = (self.policy.rel_tol * CANCELLATION_HEADROOM).max(DD_EPS);
        let a = self.order_dd();
        let c = a - 0.5;
        let neg_x = Dd::from(-x);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        let mut largest = 1.0f64;
        let mut truncation = f64::INFINITY;
        for k in 0..self.policy.max_terms {
            let kf = k as f64;
            let next = term * (a + kf) * (c + kf) / (neg_x * (kf + 1.0));
            let next_mag = next.hi.abs();
            if next.is_zero() {
                truncation = 0.0;
                break;
            }
            // past the polynomial-like head the series diverges; stop before the
            // first growing term
            if self.order + kf > 0.0 && next_mag > term.hi.abs() {
                truncation = term.hi.abs();
                break;
            }
            sum += next;
            term = next;
            largest = largest.max(next_mag);
            if next_mag <= tol * sum.hi.abs() {
                truncation = next_mag;
                break;
            }
        }
        (sum.to_f64(), truncation + 8.0 * DD_EPS * largest)
    }
}

/// Tricomi's confluent hypergeometric function U(a, b, x), `b ∈ {1/2, 3/2}`, `x > 0`.
pub fn tricomi_u(a: f64, b: f64, x: f64, policy: &EvalPolicy) -> Result<f64, SpecfunError> {
    TricomiEval::new(a, b, policy)?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> EvalPolicy {
        EvalPolicy::default()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn zero_order_is_one() {
        for &x in &[1e-4, 0.7, 3.0, 49.9, 50.0, 300.0] {
            for b in [0.5, 1.5] {
                assert!(close(tricomi_u(0.0, b, x, &p()).unwrap(), 1.0, 1e-14), "x = {x}, b = {b}");
            }
        }
    }

    #[test]
    fn degree_one_polynomial() {
        assert!(close(tricomi_u(-1.0, 1.5, 2.5, &p()).unwrap(), 1.0, 1e-14));
        assert!(close(tricomi_u(-1.0, 1.5, 80.0, &p()).unwrap(), 78.5, 1e-14));
    }

    #[test]
    fn hermite_identity() {
        // U(-1/2, 1/2, x^2) = x
        assert!(close(tricomi_u(-0.5, 0.5, 4.0, &p()).unwrap(), 2.0, 1e-13));
        assert!(close(tricomi_u(-0.5, 0.5, 0.09, &p()).unwrap(), 0.3, 1e-13));
        assert!(close(tricomi_u(-0.5, 0.5, 64.0, &p()).unwrap(), 8.0, 1e-13));
        // U(-3/2, 1/2, x^2) = H_3(x)/8 = x^3 - 3x/2
        let x: f64 = 1.7;
        let expect = x.powi(3) - 1.5 * x;
        assert!(close(tricomi_u(-1.5, 0.5, x * x, &p()).unwrap(), expect, 1e-13));
    }

    #[test]
    fn positive_order_matches_integral_representation() {
        // U(1, 3/2, x) = ∫ e^{-xt} (1+t)^{-1/2} dt, checked with a fine midpoint sum
        let x = 2.0;
        let n = 200_000;
        let upper = 40.0;
        let h = upper / n as f64;
        let f = |t: f64| (-x * t).exp() / (1.0 + t).sqrt();
        let mut acc = f(0.0) + f(upper);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        acc *= h / 3.0;
        assert!(close(tricomi_u(1.0, 1.5, x, &p()).unwrap(), acc, 1e-12));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(tricomi_u(-0.3, 1.5, 0.0, &p()), Err(SpecfunError::Domain(_))));
        assert!(matches!(tricomi_u(-0.3, 1.5, -2.0, &p()), Err(SpecfunError::Domain(_))));
        assert!(matches!(tricomi_u(-0.3, 2.5, 1.0, &p()), Err(SpecfunError::Domain(_))));
    }

    #[test]
    fn negative_values_are_not_clamped() {
        // U(-1, 3/2, x) = x - 3/2 < 0 for small x
        assert!(close(tricomi_u(-1.0, 1.5, 0.5, &p()).unwrap(), -1.0, 1e-14));
    }
}
