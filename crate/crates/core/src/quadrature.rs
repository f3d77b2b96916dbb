//! Adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Global subdivision: the interval with the largest error estimate is
//! bisected until the summed error meets the tolerance.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
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

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 0.0,
            rel: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn gk15(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> Piece {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Piece {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[lo, hi]`. Reversed bounds flip the sign.
pub fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: Tolerance) -> Result<Integral> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "finite bounds required, got [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
        });
    }
    if hi < lo {
        let r = integrate(f, hi, lo, tol)?;
        return Ok(Integral {
            value: -r.value,
            error: r.error,
        });
    }

    let mut pieces = vec![gk15(&f, lo, hi)];
    loop {
        let value: f64 = pieces.iter().map(|p| p.value).sum();
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::NumericFailure(format!(
                "integrand is not finite on [{lo}, {hi}]"
            )));
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Integral { value, error });
        }
        if pieces.len() >= tol.max_intervals {
            return Err(Error::NumericFailure(format!(
                "no convergence after {} subintervals (error {error:e}, value {value:e})",
                pieces.len()
            )));
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i)
            .expect("at least one piece");
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.lo + p.hi);
        if mid <= p.lo || mid >= p.hi {
            return Err(Error::NumericFailure(format!(
                "interval [{}, {}] cannot be bisected further",
                p.lo, p.hi
            )));
        }
        pieces.push(gk15(&f, p.lo, mid));
        pieces.push(gk15(&f, mid, p.hi));
    }
}

/// Integrates `f` over `[lo, ∞)` after the change of variable
/// `u = lo + (1 − s)/s`, `s ∈ (0, 1]`.
///
/// The Kronrod nodes never touch `s = 0`, so integrands with an integrable
/// power-law tail are handled without truncation.
pub fn integrate_to_infinity(f: impl Fn(f64) -> f64, lo: f64, tol: Tolerance) -> Result<Integral> {
    if !lo.is_finite() {
        return Err(Error::InvalidArgument(format!("finite lower bound required, got {lo}")));
    }
    integrate(
        |s| {
            let u = lo + (1.0 - s) / s;
            f(u) / (s * s)
        },
        0.0,
        1.0,
        tol,
    )
}
