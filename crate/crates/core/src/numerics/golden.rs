//! Golden-section search for the maximum of a unimodal function on a bracket.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub argmax: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Maximizes `f` on `[lo, hi]` until the bracket is narrower than `x_tol`.
///
/// The endpoints are compared with the interior result, so a function that is
/// monotone on the bracket returns the boundary it increases towards.
pub fn maximize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, x_tol: f64) -> Result<Maximum> {
    if !(lo.is_finite() && hi.is_finite()) || !(hi > lo) {
        return Err(Error::domain("search bracket", format!("[{lo}, {hi}] is empty or not finite")));
    }
    if !(x_tol > 0.0) {
        return Err(Error::domain("search tolerance", format!("must be positive, got {x_tol}")));
    }

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > x_tol && iterations < 500 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }

    let mid = 0.5 * (a + b);
    let candidates = [(mid, f(mid)), (c, fc), (d, fd), (lo, f(lo)), (hi, f(hi))];
    let (argmax, value) = candidates
        .into_iter()
        .filter(|(_, v)| !v.is_nan())
        .fold((mid, f64::NEG_INFINITY), |best, cand| if cand.1 > best.1 { cand } else { best });
    if !value.is_finite() {
        return Err(Error::domain("objective", "no finite value on the search bracket"));
    }
    Ok(Maximum {
        argmax,
        value,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let m = maximize(|x| -(x - 0.3) * (x - 0.3) + 2.0, -4.0, 5.0, 1e-10).unwrap();
        // the objective is flat to rounding within ~sqrt(eps) of the peak
        assert!((m.argmax - 0.3).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn monotone_hits_boundary() {
        let m = maximize(|x| x.atan(), 0.0, 3.0, 1e-9).unwrap();
        assert_eq!(m.argmax, 3.0);
    }

    #[test]
    fn bad_bracket() {
        assert!(maximize(|x| x, 1.0, 1.0, 1e-9).is_err());
        assert!(maximize(|x| x, 0.0, 1.0, 0.0).is_err());
    }
}
