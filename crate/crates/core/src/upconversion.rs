//! Sum-frequency up-conversion efficiency of a focused Gaussian pump/signal
//! pair in a quasi-phase-matched crystal, and the efficiency-budget arithmetic
//! used to interpret measured detection chains.
//!
//! The single-pass quantum efficiency in the undepleted-pump limit is
//!
//! ```text
//! η_SFG = 32π²·d_eff²·P_pump·exp(−αL)·L·h / (ε₀·c·λ_signal²·λ_pump·n_SFG²)
//! ```
//!
//! with `h(ξ) = arctan²(ξ)/ξ` the Boyd–Kleinman focusing factor for zero
//! phase mismatch and no walk-off, `ξ = L/b`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, require_probability, Error, Result};
use crate::numerics;
use crate::quantities::{LIGHT_SPEED, VACUUM_PERMITTIVITY};

/// Refractive index of congruent lithium niobate (extraordinary) near 810 nm.
pub const DEFAULT_N_SFG: f64 = 2.17;

/// Effective nonlinearity assumed for PPLN, in pm/V.
pub const DEFAULT_D_EFF_PM_PER_V: f64 = 16.0;

/// Largest focusing factor accepted by [`sfg_quantum_efficiency`]. The
/// zero-mismatch factor never exceeds about 0.645; the margin admits the
/// generalized factor's values.
pub const MAX_FOCUSING_FACTOR: f64 = 1.1;

/// Attenuation coefficient that absorbs `fraction` of the power over `length`.
pub fn attenuation_from_absorption(fraction: f64, length: f64) -> Result<f64> {
    require_positive("crystal length", length)?;
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::domain(
            "absorbed fraction",
            format!("must lie in [0, 1), got {fraction}"),
        ));
    }
    Ok(-(1.0 - fraction).ln() / length)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrystalSpec {
    /// m
    pub length: f64,
    /// m/V
    pub d_eff: f64,
    /// 1/m, summed over the three interacting beams
    pub attenuation: f64,
    pub n_sfg: f64,
    /// K
    pub temperature: f64,
}

impl CrystalSpec {
    pub fn validate(&self) -> Result<()> {
        require_positive("crystal length", self.length)?;
        require_positive("d_eff", self.d_eff)?;
        require_non_negative("crystal attenuation", self.attenuation)?;
        if !(self.n_sfg >= 1.0) || !self.n_sfg.is_finite() {
            return Err(Error::domain("n_sfg", format!("must be ≥ 1, got {}", self.n_sfg)));
        }
        require_positive("crystal temperature", self.temperature)?;
        Ok(())
    }

    /// Single-pass power transmission `exp(−αL)`.
    pub fn transmission(&self) -> f64 {
        (-self.attenuation * self.length).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpBeam {
    /// m
    pub wavelength: f64,
    /// W
    pub power: f64,
}

impl PumpBeam {
    pub fn validate(&self) -> Result<()> {
        require_positive("pump wavelength", self.wavelength)?;
        require_non_negative("pump power", self.power)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalBeam {
    /// m
    pub wavelength: f64,
}

impl SignalBeam {
    pub fn validate(&self) -> Result<()> {
        require_positive("signal wavelength", self.wavelength)?;
        Ok(())
    }
}

/// Confocal parameter `b` of the (shared) beam waist and the focusing
/// parameter `ξ = L/b` it produces in a crystal of length `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocusingGeometry {
    pub confocal_parameter: f64,
    pub xi: f64,
}

impl FocusingGeometry {
    pub fn from_confocal_parameter(crystal_length: f64, confocal_parameter: f64) -> Result<Self> {
        require_positive("crystal length", crystal_length)?;
        require_positive("confocal parameter", confocal_parameter)?;
        Ok(FocusingGeometry {
            confocal_parameter,
            xi: crystal_length / confocal_parameter,
        })
    }

    pub fn from_xi(crystal_length: f64, xi: f64) -> Result<Self> {
        require_positive("crystal length", crystal_length)?;
        require_positive("focusing parameter xi", xi)?;
        Ok(FocusingGeometry {
            confocal_parameter: crystal_length / xi,
            xi,
        })
    }

    /// Same waist, different crystal length.
    pub fn rebind(&self, crystal_length: f64) -> Result<Self> {
        Self::from_confocal_parameter(crystal_length, self.confocal_parameter)
    }

    pub fn focusing_factor(&self) -> Result<f64> {
        boyd_kleinman_h(self.xi)
    }
}

/// Zero-mismatch Boyd–Kleinman focusing factor `h(ξ) = arctan²(ξ)/ξ`.
pub fn boyd_kleinman_h(xi: f64) -> Result<f64> {
    if xi == f64::INFINITY {
        return Ok(0.0);
    }
    require_positive("focusing parameter xi", xi)?;
    let at = xi.atan();
    Ok(at * at / xi)
}

/// `h(ξ)` from direct quadrature of `(1/4ξ)·|∫_{−ξ}^{ξ} dτ/(1+iτ)|²`.
///
/// Slower than [`boyd_kleinman_h`]; kept as an independent route for checks.
pub fn boyd_kleinman_h_quadrature(xi: f64) -> Result<f64> {
    require_positive("focusing parameter xi", xi)?;
    // 1/(1+iτ) = (1 − iτ)/(1 + τ²)
    let re = numerics::integrate(|t| 1.0 / (1.0 + t * t), -xi, xi, 1e-14, 1e-14)?;
    let im = numerics::integrate(|t| -t / (1.0 + t * t), -xi, xi, 1e-14, 1e-14)?;
    Ok((re.value * re.value + im.value * im.value) / (4.0 * xi))
}

/// Maximizer of the focusing factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalFocusing {
    pub xi_star: f64,
    pub h_star: f64,
}

/// Maximizes `h(ξ)` by golden-section search on `[1e-3, 100]`, tolerance 1e-9.
pub fn optimal_focusing() -> OptimalFocusing {
    let best = numerics::maximize(
        |xi| boyd_kleinman_h(xi).unwrap_or(f64::NEG_INFINITY),
        1e-3,
        100.0,
        1e-9,
    )
    .expect("fixed bracket is valid");
    OptimalFocusing {
        xi_star: best.argmax,
        h_star: best.value,
    }
}

/// Conversion efficiency; `raw` is the unclamped formula value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SfgEfficiency {
    pub value: f64,
    pub raw: f64,
    /// Set when the perturbative formula exceeded 1 and was clamped.
    pub clamped: bool,
}

pub fn sfg_quantum_efficiency(
    crystal: &CrystalSpec,
    pump: &PumpBeam,
    signal: &SignalBeam,
    h: f64,
) -> Result<SfgEfficiency> {
    crystal.validate()?;
    pump.validate()?;
    signal.validate()?;
    if !(h > 0.0 && h <= MAX_FOCUSING_FACTOR) {
        return Err(Error::domain(
            "focusing factor h",
            format!("must lie in (0, {MAX_FOCUSING_FACTOR}], got {h}"),
        ));
    }
    let numerator = 32.0
        * PI
        * PI
        * crystal.d_eff
        * crystal.d_eff
        * pump.power
        * crystal.transmission()
        * crystal.length
        * h;
    let denominator = VACUUM_PERMITTIVITY
        * LIGHT_SPEED
        * signal.wavelength
        * signal.wavelength
        * pump.wavelength
        * crystal.n_sfg
        * crystal.n_sfg;
    let raw = numerator / denominator;
    Ok(SfgEfficiency {
        value: raw.min(1.0),
        raw,
        clamped: raw > 1.0,
    })
}

/// Overall detection probability and its three factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyBudget {
    pub eta_sfg: f64,
    pub eta_opt: f64,
    pub eta_det: f64,
    pub eta_tot: f64,
}

pub fn compose_budget(eta_sfg: f64, eta_opt: f64, eta_det: f64) -> Result<EfficiencyBudget> {
    require_probability("eta_sfg", eta_sfg)?;
    require_probability("eta_opt", eta_opt)?;
    require_probability("eta_det", eta_det)?;
    Ok(EfficiencyBudget {
        eta_sfg,
        eta_opt,
        eta_det,
        eta_tot: eta_sfg * eta_opt * eta_det,
    })
}

/// Backs out the conversion efficiency from a measured overall efficiency.
pub fn infer_sfg_efficiency(eta_tot: f64, eta_opt: f64, eta_det: f64) -> Result<f64> {
    require_probability("eta_tot", eta_tot)?;
    require_probability("eta_opt", eta_opt)?;
    require_probability("eta_det", eta_det)?;
    let divisor = eta_opt * eta_det;
    if divisor == 0.0 {
        return Err(Error::domain("eta_opt·eta_det", "zero divisor"));
    }
    let eta_sfg = eta_tot / divisor;
    if eta_sfg > 1.0 {
        return Err(Error::InconsistentBudget(eta_sfg));
    }
    Ok(eta_sfg)
}

/// Conversion efficiency normalized to pump power, in 1/W.
pub fn per_watt_efficiency(eta_sfg: f64, pump_power: f64) -> Result<f64> {
    require_non_negative("eta_sfg", eta_sfg)?;
    require_positive("pump power", pump_power)?;
    Ok(eta_sfg / pump_power)
}

/// Ratio of a theoretical to a measured normalized efficiency.
pub fn theory_gap(theory_per_watt: f64, measured_per_watt: f64) -> Result<f64> {
    require_positive("theoretical efficiency", theory_per_watt)?;
    require_positive("measured efficiency", measured_per_watt)?;
    Ok(theory_per_watt / measured_per_watt)
}
