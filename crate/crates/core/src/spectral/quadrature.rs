//! Adaptive Gauss–Kronrod (7/15) quadrature on a finite interval, plus the
//! truncation rule that turns the weighted integrals over [1, ∞) into
//! finite ones.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::SpectralError;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
/// Gauss weights for the odd-indexed Kronrod nodes, and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub(crate) const INITIAL_PANELS: usize = 32;
pub(crate) const MAX_PANELS: usize = 20_000;

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    abs_value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F, E>(f: &F, lo: f64, hi: f64) -> Result<Panel, E>
where
    F: Fn(f64) -> Result<f64, E>,
{
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_value = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, f2) = (f(centre - dx)?, f(centre + dx)?);
        kronrod += WGK[j] * (f1 + f2);
        abs_value += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Panel {
        lo,
        hi,
        value: kronrod * half,
        abs_value: abs_value * half.abs(),
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Integral of `f` over [lo, hi] with total estimated error at most
/// `rel_tol · ∫|f|`, together with the contribution of the last panel.
pub(crate) struct Integral {
    pub value: f64,
    pub abs_value: f64,
    pub last_panel: f64,
}

pub(crate) fn adaptive<F>(f: &F, lo: f64, hi: f64, rel_tol: f64) -> Result<Integral, SpectralError>
where
    F: Fn(f64) -> Result<f64, SpectralError>,
{
    let width = (hi - lo) / INITIAL_PANELS as f64;
    let mut heap = BinaryHeap::with_capacity(4 * INITIAL_PANELS);
    for i in 0..INITIAL_PANELS {
        let a = lo + width * i as f64;
        let b = if i + 1 == INITIAL_PANELS { hi } else { a + width };
        heap.push(kronrod(f, a, b)?);
    }
    loop {
        let (value, abs_value, error) = heap
            .iter()
            .fold((0.0, 0.0, 0.0), |acc, p| (acc.0 + p.value, acc.1 + p.abs_value, acc.2 + p.error));
        if error <= rel_tol * abs_value || abs_value == 0.0 {
            let last_panel = heap
                .iter()
                .max_by(|p, q| p.hi.total_cmp(&q.hi))
                .map_or(0.0, |p| p.abs_value);
            return Ok(Integral {
                value,
                abs_value,
                last_panel,
            });
        }
        if heap.len() >= MAX_PANELS {
            return Err(SpectralError::QuadratureStalled { panels: heap.len() });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            return Err(SpectralError::QuadratureStalled { panels: heap.len() + 1 });
        }
        heap.push(kronrod(f, worst.lo, mid)?);
        heap.push(kronrod(f, mid, worst.hi)?);
    }
}

/// Upper limit for integrands growing like z^(2+4α) e^(-κz²): the fixed point
/// of z = max(30, sqrt((ln(1/tol) + 2α ln z)/κ)), doubled as a guard.
pub fn truncation_point(kappa: f64, alpha_max: f64, quad_tol: f64) -> f64 {
    let log_tol = (1.0 / quad_tol).ln();
    let mut z: f64 = 30.0;
    for _ in 0..100 {
        let next = ((log_tol + 2.0 * alpha_max.max(0.0) * z.ln()) / kappa).sqrt().max(30.0);
        if (next - z).abs() <= 1e-9 * z {
            z = next;
            break;
        }
        z = next;
    }
    2.0 * z
}
