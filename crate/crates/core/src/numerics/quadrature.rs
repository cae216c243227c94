//! Adaptive Gauss–Kronrod (G7/K15) integration and trapezoid sums on tabulated
//! data.

use crate::error::{Error, Result};

// Kronrod 15-point abscissae (non-negative half) and weights; every second
// node is also a 7-point Gauss node. Digits as tabulated.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
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
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]` by globally adaptive bisection until the
/// summed error estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration bounds", format!("[{a}, {b}] is not finite")));
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            intervals: 0,
        });
    }
    const MAX_INTERVALS: usize = 2000;

    let (v, e) = kronrod15(&f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    loop {
        let total: f64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::domain("integrand", "produced a non-finite value"));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) || pieces.len() >= MAX_INTERVALS {
            return Ok(Quadrature {
                value: total,
                error_estimate: err,
                intervals: pieces.len(),
            });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (lv, le) = kronrod15(&f, lo, mid);
        let (rv, re) = kronrod15(&f, mid, hi);
        pieces.push((lo, mid, lv, le));
        pieces.push((mid, hi, rv, re));
    }
}

/// Trapezoid rule on a tabulated function. `x` must be strictly increasing.
pub fn trapezoid(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::domain(
            "tabulated grid",
            format!("{} abscissae but {} ordinates", x.len(), y.len()),
        ));
    }
    if x.len() < 2 {
        return Err(Error::domain("tabulated grid", "needs at least two points"));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("tabulated grid", "abscissae must be strictly increasing"));
    }
    Ok(x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| 3.0 * x * x - x + 2.0, -1.0, 2.0, 1e-14, 0.0).unwrap();
        assert!((q.value - 13.5).abs() < 1e-13);
    }

    #[test]
    fn peaked_integrand() {
        // ∫ 1/(1+x²) over [-50, 50] = 2·atan(50)
        let q = integrate(|x| 1.0 / (1.0 + x * x), -50.0, 50.0, 1e-13, 1e-13).unwrap();
        assert!((q.value - 2.0 * 50f64.atan()).abs() < 1e-11);
        assert!(q.intervals > 1);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-9, 0.0).unwrap().value, 0.0);
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-9, 0.0).is_err());
    }

    #[test]
    fn trapezoid_linear_exact_and_errors() {
        let x = [0.0, 1.0, 3.0];
        let y = [1.0, 2.0, 4.0];
        assert!((trapezoid(&x, &y).unwrap() - 7.5).abs() < 1e-15);
        assert!(trapezoid(&[0.0], &[1.0]).is_err());
        assert!(trapezoid(&[0.0, 0.0], &[1.0, 1.0]).is_err());
        assert!(trapezoid(&[0.0, 1.0], &[1.0]).is_err());
    }
}
