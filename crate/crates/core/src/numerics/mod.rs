//! Small numerical kernels shared by the physics modules.

pub mod golden;
pub mod quadrature;

pub use golden::{maximize, Maximum};
pub use quadrature::{integrate, trapezoid, Quadrature};

/// Rounds to `digits` significant decimal digits. Used to strip
/// representation noise (e.g. `3.0250000000000004`) from unit-converted
/// values before they are printed.
pub fn round_significant(v: f64, digits: usize) -> f64 {
    if !v.is_finite() || v == 0.0 || digits == 0 {
        return v;
    }
    format!("{v:.prec$e}", prec = digits - 1).parse().unwrap_or(v)
}
