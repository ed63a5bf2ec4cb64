//! Eigen-decomposition of the radial survival operator.
//!
//! In units where lengths are measured in the contact radius and time in the
//! trap relaxation time, the survival probability obeys
//! `∂S/∂t = (1/(2κ)) S'' + (1/(κz) - z) S'` on `z > 1` with `S(1) = 0`.
//! Separating variables gives modes `U(-α, 3/2, κz²)` decaying as
//! `e^{-2αt}`, with admissible `α` the zeros of `U(-α, 3/2, κ)`. The modes are
//! orthogonal under the weight `w(z) = z² e^{-κz²}`.

mod cache;
mod quadrature;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::specfun::{EvalPolicy, SpecfunError, TricomiEval};

pub use cache::EigenCache;
pub use quadrature::truncation_point;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error("the series solution is inapplicable when kappa = 0 (potential-free trap)")]
    ZeroStiffness,
    #[error("kappa must be positive and finite, got {0}")]
    InvalidKappa(f64),
    #[error("invalid tolerance {name} = {value}")]
    InvalidTolerance { name: &'static str, value: f64 },
    #[error("found {found} of {wanted} eigenvalues below the scan ceiling alpha = {ceiling}")]
    BracketExhausted { found: usize, wanted: usize, ceiling: f64 },
    #[error("adaptive quadrature stalled after {panels} panels")]
    QuadratureStalled { panels: usize },
    #[error("mode index {n} outside 1..={len}")]
    IndexOutOfRange { n: usize, len: usize },
    #[error("z = {0} lies inside the absorbing sphere")]
    InsideSphere(f64),
    #[error("cache file {path} is corrupt: {reason}")]
    CacheCorrupt { path: String, reason: String },
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub const DEFAULT_ROOT_TOL: f64 = 1e-10;
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

const SCAN_STEP: f64 = 0.05;
/// Bracket width below which bisection hands over to regula falsi.
const BISECT_TO: f64 = 1e-4;
const MAX_REFINE: usize = 200;

fn check_kappa(kappa: f64) -> Result<(), SpectralError> {
    if kappa == 0.0 {
        return Err(SpectralError::ZeroStiffness);
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(SpectralError::InvalidKappa(kappa));
    }
    Ok(())
}

fn check_tol(name: &'static str, value: f64) -> Result<(), SpectralError> {
    if !(value > 0.0 && value < 1.0) {
        return Err(SpectralError::InvalidTolerance { name, value });
    }
    Ok(())
}

/// U(-α, 3/2, κ); its zeros in α are the eigenvalues.
pub fn boundary_function(alpha: f64, kappa: f64) -> Result<f64, SpectralError> {
    check_kappa(kappa)?;
    Ok(TricomiEval::new(-alpha, 1.5, &EvalPolicy::default())?.eval(kappa)?)
}

/// The first `count` eigenvalues, in increasing order.
pub fn find_eigenvalues(kappa: f64, count: usize, root_tol: f64) -> Result<Vec<f64>, SpectralError> {
    check_kappa(kappa)?;
    check_tol("root_tol", root_tol)?;
    let ceiling = count as f64 * 5.0 + 20.0;
    let f = |alpha: f64| boundary_function(alpha, kappa);
    let mut roots = Vec::with_capacity(count);
    let (mut prev, mut f_prev) = (0.0, f(0.0)?);
    let mut k = 1u64;
    while roots.len() < count {
        let alpha = k as f64 * SCAN_STEP;
        if alpha > ceiling {
            return Err(SpectralError::BracketExhausted {
                found: roots.len(),
                wanted: count,
                ceiling,
            });
        }
        let f_alpha = f(alpha)?;
        if f_alpha == 0.0 {
            roots.push(alpha);
        } else if f_prev != 0.0 && (f_prev < 0.0) != (f_alpha < 0.0) {
            roots.push(refine(&f, prev, f_prev, alpha, f_alpha, root_tol)?);
        }
        prev = alpha;
        f_prev = f_alpha;
        k += 1;
    }
    Ok(roots)
}

/// Bisection down to `BISECT_TO`, then Illinois-modified regula falsi.
fn refine<F>(f: &F, mut lo: f64, mut f_lo: f64, mut hi: f64, mut f_hi: f64, tol: f64) -> Result<f64, SpectralError>
where
    F: Fn(f64) -> Result<f64, SpectralError>,
{
    while hi - lo > BISECT_TO.max(tol) {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    let mut last = f64::NAN;
    // 0 = no side retained twice yet, -1 = lo retained, 1 = hi retained
    let mut side = 0i8;
    for _ in 0..MAX_REFINE {
        let x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let x = if x > lo && x < hi { x } else { 0.5 * (lo + hi) };
        let f_x = f(x)?;
        if f_x == 0.0 || (x - last).abs() <= tol || hi - lo <= tol {
            return Ok(x);
        }
        last = x;
        if (f_x < 0.0) == (f_lo < 0.0) {
            lo = x;
            f_lo = f_x;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            f_hi = f_x;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `z e^{-κz²/2}`, the square root of the weight; zero once it underflows.
fn sqrt_weight(kappa: f64, z: f64) -> f64 {
    z * (-0.5 * kappa * z * z).exp()
}

/// ∫₁^z_max of an already weighted integrand, extending the range while the
/// outermost panel still carries more than `quad_tol` of the total.
fn integrate_weighted<G>(g: &G, z_max: f64, quad_tol: f64) -> Result<f64, SpectralError>
where
    G: Fn(f64) -> Result<f64, SpectralError>,
{
    let mut total = quadrature::adaptive(g, 1.0, z_max, quad_tol)?;
    let mut value = total.value;
    let mut lo = z_max;
    while total.last_panel > quad_tol * total.abs_value.max(f64::MIN_POSITIVE) {
        let hi = 2.0 * lo;
        let tail = quadrature::adaptive(g, lo, hi, quad_tol)?;
        value += tail.value;
        total = quadrature::Integral {
            value,
            abs_value: total.abs_value + tail.abs_value,
            last_panel: tail.last_panel,
        };
        lo = hi;
        if !lo.is_finite() {
            return Err(SpectralError::QuadratureStalled { panels: 0 });
        }
    }
    Ok(value)
}

/// ∫₁^∞ z² e^{-κz²} f(z) dz. Points where the weight underflows are skipped,
/// so `f` may grow polynomially without producing NaN.
pub fn weighted_integral<F>(f: F, kappa: f64, quad_tol: f64) -> Result<f64, SpectralError>
where
    F: Fn(f64) -> f64,
{
    check_kappa(kappa)?;
    check_tol("quad_tol", quad_tol)?;
    let g = |z: f64| {
        let w = z * z * (-kappa * z * z).exp();
        Ok(if w == 0.0 { 0.0 } else { w * f(z) })
    };
    integrate_weighted(&g, truncation_point(kappa, 0.0, quad_tol), quad_tol)
}

/// N = sqrt(∫ w U(-α, 3/2, κz²)² dz).
pub fn normalization(kappa: f64, alpha: f64, quad_tol: f64) -> Result<f64, SpectralError> {
    check_kappa(kappa)?;
    check_tol("quad_tol", quad_tol)?;
    let u = TricomiEval::new(-alpha, 1.5, &EvalPolicy::default())?;
    norm_with(&u, kappa, truncation_point(kappa, alpha, quad_tol), quad_tol)
}

fn norm_with(u: &TricomiEval, kappa: f64, z_max: f64, quad_tol: f64) -> Result<f64, SpectralError> {
    let g = |z: f64| {
        let s = sqrt_weight(kappa, z);
        if s == 0.0 {
            return Ok(0.0);
        }
        let v = s * u.eval(kappa * z * z)?;
        Ok(v * v)
    };
    Ok(integrate_weighted(&g, z_max, quad_tol)?.sqrt())
}

/// c = ∫ w ψ dz for a mode whose `alpha` and `norm` are already set.
pub fn coefficient(kappa: f64, mode: &EigenMode, quad_tol: f64) -> Result<f64, SpectralError> {
    check_kappa(kappa)?;
    check_tol("quad_tol", quad_tol)?;
    let u = TricomiEval::new(-mode.alpha, 1.5, &EvalPolicy::default())?;
    amp_with(&u, mode.norm, kappa, truncation_point(kappa, mode.alpha, quad_tol), quad_tol)
}

fn amp_with(u: &TricomiEval, norm: f64, kappa: f64, z_max: f64, quad_tol: f64) -> Result<f64, SpectralError> {
    let g = |z: f64| {
        let w = z * z * (-kappa * z * z).exp();
        if w == 0.0 {
            return Ok(0.0);
        }
        Ok(w * u.eval(kappa * z * z)?)
    };
    Ok(integrate_weighted(&g, z_max, quad_tol)? / norm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenMode {
    pub n: usize,
    pub alpha: f64,
    /// Decay rate in units of 1/τ, exactly `2 alpha`.
    pub lambda_tau: f64,
    pub norm: f64,
    pub amp: f64,
}

impl EigenMode {
    pub fn new(n: usize, alpha: f64, norm: f64, amp: f64) -> Self {
        EigenMode {
            n,
            alpha,
            lambda_tau: 2.0 * alpha,
            norm,
            amp,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub kappa: f64,
    pub modes: Vec<EigenMode>,
    pub root_tol: f64,
    pub quad_tol: f64,
    pub z_max: f64,
    evals: Vec<TricomiEval>,
}

impl PartialEq for EigenSystem {
    fn eq(&self, other: &Self) -> bool {
        self.kappa == other.kappa
            && self.modes == other.modes
            && self.root_tol == other.root_tol
            && self.quad_tol == other.quad_tol
            && self.z_max == other.z_max
    }
}

/// On-disk form of an [`EigenSystem`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct SystemRecord {
    pub kappa: f64,
    pub count: usize,
    pub root_tol: f64,
    pub quad_tol: f64,
    pub z_max: f64,
    pub modes: Vec<ModeRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct ModeRecord {
    pub n: usize,
    pub alpha: f64,
    #[serde(rename = "N")]
    pub norm: f64,
    #[serde(rename = "c")]
    pub amp: f64,
}

impl EigenSystem {
    fn assemble(kappa: f64, modes: Vec<EigenMode>, root_tol: f64, quad_tol: f64, z_max: f64) -> Result<Self, SpectralError> {
        let policy = EvalPolicy::default();
        let evals = modes
            .iter()
            .map(|m| TricomiEval::new(-m.alpha, 1.5, &policy))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EigenSystem {
            kappa,
            modes,
            root_tol,
            quad_tol,
            z_max,
            evals,
        })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn mode(&self, n: usize) -> Result<&EigenMode, SpectralError> {
        if n == 0 || n > self.modes.len() {
            return Err(SpectralError::IndexOutOfRange { n, len: self.modes.len() });
        }
        Ok(&self.modes[n - 1])
    }

    /// ψ_n(z) = U(-α_n, 3/2, κz²) / N_n, with `n` counted from 1. Exactly
    /// zero on the sphere rather than the root-tolerance residue.
    pub fn eigenfunction(&self, n: usize, z: f64) -> Result<f64, SpectralError> {
        let mode = self.mode(n)?;
        if !(z >= 1.0) {
            return Err(SpectralError::InsideSphere(z));
        }
        if z == 1.0 {
            return Ok(0.0);
        }
        Ok(self.evals[n - 1].eval(self.kappa * z * z)? / mode.norm)
    }

    /// c_n ψ_n(z) for the first `terms` modes.
    pub fn amplitudes(&self, z: f64, terms: usize) -> Result<Vec<f64>, SpectralError> {
        (1..=terms.min(self.len()))
            .map(|n| Ok(self.modes[n - 1].amp * self.eigenfunction(n, z)?))
            .collect()
    }

    /// ∫ w ψ_n ψ_m dz, evaluated with the weight split between the factors.
    pub fn inner_product(&self, n: usize, m: usize) -> Result<f64, SpectralError> {
        let (un, um) = (&self.evals[self.mode(n)?.n - 1], &self.evals[self.mode(m)?.n - 1]);
        let scale = self.modes[n - 1].norm * self.modes[m - 1].norm;
        let kappa = self.kappa;
        let g = |z: f64| {
            let s = sqrt_weight(kappa, z);
            if s == 0.0 {
                return Ok(0.0);
            }
            let x = kappa * z * z;
            Ok((s * un.eval(x)?) * (s * um.eval(x)?))
        };
        Ok(integrate_weighted(&g, self.z_max, self.quad_tol)? / scale)
    }

    pub(crate) fn to_record(&self) -> SystemRecord {
        SystemRecord {
            kappa: self.kappa,
            count: self.modes.len(),
            root_tol: self.root_tol,
            quad_tol: self.quad_tol,
            z_max: self.z_max,
            modes: self
                .modes
                .iter()
                .map(|m| ModeRecord {
                    n: m.n,
                    alpha: m.alpha,
                    norm: m.norm,
                    amp: m.amp,
                })
                .collect(),
        }
    }

    pub(crate) fn from_record(record: SystemRecord) -> Result<Self, SpectralError> {
        let modes = record
            .modes
            .iter()
            .map(|m| EigenMode::new(m.n, m.alpha, m.norm, m.amp))
            .collect();
        EigenSystem::assemble(record.kappa, modes, record.root_tol, record.quad_tol, record.z_max)
    }
}

/// Eigenvalues, normalizations and amplitudes of the first `count` modes,
/// read from `cache` when present and written back after a fresh build.
pub fn build_eigensystem(
    kappa: f64,
    count: usize,
    root_tol: f64,
    quad_tol: f64,
    cache: Option<&EigenCache>,
) -> Result<EigenSystem, SpectralError> {
    check_kappa(kappa)?;
    check_tol("root_tol", root_tol)?;
    check_tol("quad_tol", quad_tol)?;
    if let Some(cache) = cache {
        match cache.load(kappa, count, root_tol, quad_tol) {
            Ok(Some(system)) => return Ok(system),
            Ok(None) => {}
            Err(err @ SpectralError::CacheCorrupt { .. }) => log::warn!("{err}; recomputing"),
            Err(err) => return Err(err),
        }
    }
    let alphas = find_eigenvalues(kappa, count, root_tol)?;
    let z_max = truncation_point(kappa, alphas.last().copied().unwrap_or(0.0), quad_tol);
    let policy = EvalPolicy::default();
    let modes = alphas
        .par_iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let u = TricomiEval::new(-alpha, 1.5, &policy)?;
            let norm = norm_with(&u, kappa, z_max, quad_tol)?;
            let amp = amp_with(&u, norm, kappa, z_max, quad_tol)?;
            Ok(EigenMode::new(i + 1, alpha, norm, amp))
        })
        .collect::<Result<Vec<_>, SpectralError>>()?;
    let system = EigenSystem::assemble(kappa, modes, root_tol, quad_tol, z_max)?;
    if let Some(cache) = cache {
        cache.store(&system)?;
    }
    Ok(system)
}
