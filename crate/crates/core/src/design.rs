//! Whole-chain scenario evaluation, parameter sweeps, and the 1-D design
//! optimizations (crystal length, focusing, pump power).

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, require_probability, Error, Result};
use crate::numerics;
use crate::quantities::{photon_energy, wavelength_to_frequency, SpectralBand};
use crate::radiometry::{
    background_rate_delta, background_rate_integral, compose_noise, NoiseBudget, ThermalEnvironment, TransferFunction,
};
use crate::sensitivity::{snr0, DetectorSpec};
use crate::upconversion::{
    boyd_kleinman_h, compose_budget, optimal_focusing, sfg_quantum_efficiency, CrystalSpec, EfficiencyBudget,
    FocusingGeometry, PumpBeam, SfgEfficiency, SignalBeam,
};

/// Default upper bound of crystal-length searches, m.
pub const DEFAULT_MAX_LENGTH: f64 = 0.10;

/// Absolute tolerance of every golden-section search, in the searched unit.
pub const SEARCH_TOLERANCE: f64 = 1e-9;

/// Spectral filtering in front of the detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    /// Width of the equivalent rectangular band in signal frequency, Hz.
    pub bandwidth: f64,
    /// Measured transfer function; replaces the rectangular band for
    /// background integrals when present.
    pub transfer: Option<TransferFunction>,
    /// Additive background not explained by thermal emission (e.g. pump
    /// leakage), Hz.
    pub excess_background: f64,
}

/// Thermal emitter seen by the up-converter. Without an explicit temperature
/// the crystal temperature is used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    pub temperature: Option<f64>,
    pub emissivity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub crystal: CrystalSpec,
    pub pump: PumpBeam,
    pub signal: SignalBeam,
    pub focusing: FocusingGeometry,
    pub filters: FilterSpec,
    pub environment: EnvironmentSpec,
    pub detector: DetectorSpec,
    pub eta_opt: f64,
}

/// Modeled figures of merit for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub focusing_factor: f64,
    pub sfg: SfgEfficiency,
    pub budget: EfficiencyBudget,
    pub noise: NoiseBudget,
    /// W
    pub snr0: f64,
    /// W
    pub floor: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.crystal.validate()?;
        self.pump.validate()?;
        self.signal.validate()?;
        require_positive("confocal parameter", self.focusing.confocal_parameter)?;
        let xi = self.crystal.length / self.focusing.confocal_parameter;
        if ((xi - self.focusing.xi) / xi).abs() > 1e-9 {
            return Err(Error::domain(
                "focusing xi",
                format!("{} does not equal length/confocal parameter = {xi}", self.focusing.xi),
            ));
        }
        require_non_negative("filter bandwidth", self.filters.bandwidth)?;
        require_non_negative("excess background", self.filters.excess_background)?;
        if let Some(tf) = &self.filters.transfer {
            tf.validate()?;
        }
        self.environment()?;
        self.detector.validate()?;
        require_probability("eta_opt", self.eta_opt)?;
        self.band()?;
        Ok(())
    }

    pub fn environment(&self) -> Result<ThermalEnvironment> {
        ThermalEnvironment::new(
            self.environment.temperature.unwrap_or(self.crystal.temperature),
            self.environment.emissivity,
        )
    }

    /// Filter band centered on the signal frequency.
    pub fn band(&self) -> Result<SpectralBand> {
        SpectralBand::new(wavelength_to_frequency(self.signal.wavelength)?, self.filters.bandwidth)
    }

    /// Thermal background rate for a given overall efficiency, excluding
    /// the excess term.
    pub fn thermal_background(&self, eta_tot: f64) -> Result<f64> {
        let env = self.environment()?;
        match &self.filters.transfer {
            Some(tf) => background_rate_integral(eta_tot, tf, &env),
            None => background_rate_delta(eta_tot, &self.band()?, &env),
        }
    }

    /// Efficiency-independent SNR₀ asymptote for this filter and emitter.
    pub fn sensitivity_floor(&self) -> Result<f64> {
        Ok(photon_energy(self.signal.wavelength)? * self.thermal_background(1.0)?)
    }

    pub fn evaluate(&self) -> Result<Evaluation> {
        self.validate()?;
        let h = boyd_kleinman_h(self.focusing.xi)?;
        let sfg = sfg_quantum_efficiency(&self.crystal, &self.pump, &self.signal, h)?;
        let budget = compose_budget(sfg.value, self.eta_opt, self.detector.eta_det)?;
        let background = self.thermal_background(budget.eta_tot)? + self.filters.excess_background;
        let noise = compose_noise(self.detector.dark_rate, background)?;
        let snr = if budget.eta_tot > 0.0 {
            snr0(self.signal.wavelength, budget.eta_tot, &noise)?
        } else {
            f64::INFINITY
        };
        Ok(Evaluation {
            focusing_factor: h,
            sfg,
            budget,
            noise,
            snr0: snr,
            floor: self.sensitivity_floor()?,
        })
    }

    /// Copy with one numeric field replaced. Paths are `section.field` in SI
    /// units; see [`SWEEP_PARAMETERS`].
    pub fn with_parameter(&self, path: &str, value: f64) -> Result<Scenario> {
        let mut s = self.clone();
        match path {
            "pump.power" => s.pump.power = value,
            "pump.wavelength" => s.pump.wavelength = value,
            "signal.wavelength" => s.signal.wavelength = value,
            "crystal.length" => {
                s.crystal.length = value;
                s.focusing = s.focusing.rebind(value)?;
            }
            "crystal.attenuation" => s.crystal.attenuation = value,
            "crystal.d_eff" => s.crystal.d_eff = value,
            "crystal.n_sfg" => s.crystal.n_sfg = value,
            "crystal.temperature" => s.crystal.temperature = value,
            "focusing.confocal_parameter" => {
                s.focusing = FocusingGeometry::from_confocal_parameter(s.crystal.length, value)?;
            }
            "focusing.xi" => s.focusing = FocusingGeometry::from_xi(s.crystal.length, value)?,
            "filters.bandwidth" => s.filters.bandwidth = value,
            "filters.excess_background" => s.filters.excess_background = value,
            "environment.temperature" => s.environment.temperature = Some(value),
            "environment.emissivity" => s.environment.emissivity = value,
            "detector.eta_det" => s.detector.eta_det = value,
            "detector.dark_rate" => s.detector.dark_rate = value,
            "optics.eta_opt" => s.eta_opt = value,
            other => {
                return Err(Error::config(
                    "sweep parameter",
                    format!("unknown path `{other}`; expected one of {}", SWEEP_PARAMETERS.join(", ")),
                ))
            }
        }
        s.validate()?;
        Ok(s)
    }
}

pub const SWEEP_PARAMETERS: &[&str] = &[
    "pump.power",
    "pump.wavelength",
    "signal.wavelength",
    "crystal.length",
    "crystal.attenuation",
    "crystal.d_eff",
    "crystal.n_sfg",
    "crystal.temperature",
    "focusing.confocal_parameter",
    "focusing.xi",
    "filters.bandwidth",
    "filters.excess_background",
    "environment.temperature",
    "environment.emissivity",
    "detector.eta_det",
    "detector.dark_rate",
    "optics.eta_opt",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub eta_sfg: f64,
    pub eta_tot: f64,
    /// Hz
    pub n_bg: f64,
    /// W
    pub snr0: f64,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter: String,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Columns: parameter value, `eta_sfg,eta_tot,n_bg_hz,snr0_pw,flags`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([self.parameter.as_str(), "eta_sfg", "eta_tot", "n_bg_hz", "snr0_pw", "flags"])?;
        for r in &self.rows {
            w.write_record([
                r.value.to_string(),
                r.eta_sfg.to_string(),
                r.eta_tot.to_string(),
                r.n_bg.to_string(),
                numerics::round_significant(r.snr0 * 1e12, 12).to_string(),
                r.flags.join(";"),
            ])?;
        }
        w.flush().map_err(|e| Error::io("sweep CSV", e))?;
        Ok(())
    }
}

/// Evaluates the scenario at every grid value of `parameter`, in parallel.
/// Rows are sorted by grid value.
pub fn sweep(scenario: &Scenario, parameter: &str, grid: &[f64]) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::config("sweep grid", "is empty"));
    }
    // surface unknown paths before doing any work
    scenario.with_parameter(parameter, grid[0])?;
    let mut rows = grid
        .par_iter()
        .map(|&value| {
            let eval = scenario.with_parameter(parameter, value)?.evaluate()?;
            let mut flags = Vec::new();
            if eval.sfg.clamped {
                flags.push("clamped".to_string());
            }
            Ok(SweepRow {
                value,
                eta_sfg: eval.sfg.value,
                eta_tot: eval.budget.eta_tot,
                n_bg: eval.noise.background_rate,
                snr0: eval.snr0,
                flags,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(SweepResult {
        parameter: parameter.to_string(),
        rows,
    })
}

/// Crystal length maximizing `exp(−αL)·L` at fixed focusing factor: `1/α`.
pub fn optimal_length_fixed_focus(attenuation: f64) -> Result<f64> {
    require_non_negative("attenuation", attenuation)?;
    if attenuation == 0.0 {
        return Err(Error::NoInteriorOptimum(
            "without absorption the efficiency grows with crystal length".to_string(),
        ));
    }
    Ok(1.0 / attenuation)
}

/// `exp(−αL)·L·h(L/b)`, written as `exp(−αL)·b·arctan²(L/b)` so it is
/// defined at `L = 0`.
pub fn length_objective(length: f64, attenuation: f64, confocal_parameter: f64) -> f64 {
    let at = (length / confocal_parameter).atan();
    (-attenuation * length).exp() * confocal_parameter * at * at
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthOptimum {
    /// m
    pub length: f64,
    /// m, value of [`length_objective`]
    pub objective: f64,
    /// False when the best length is the upper search bound.
    pub interior: bool,
}

/// Maximizes [`length_objective`] over `(0, max_length]` with the waist held
/// fixed.
pub fn optimal_length_joint(attenuation: f64, confocal_parameter: f64, max_length: f64) -> Result<LengthOptimum> {
    require_non_negative("attenuation", attenuation)?;
    require_positive("confocal parameter", confocal_parameter)?;
    require_positive("maximum crystal length", max_length)?;
    let objective = |l: f64| length_objective(l, attenuation, confocal_parameter);
    let found = numerics::maximize(objective, 0.0, max_length, SEARCH_TOLERANCE)?;

    let mut best = (found.argmax, found.value);
    let mut starts = vec![optimal_focusing().xi_star * confocal_parameter];
    if attenuation > 0.0 {
        starts.push(1.0 / attenuation);
    }
    for l in starts.into_iter().filter(|&l| l <= max_length) {
        let v = objective(l);
        if v > best.1 {
            best = (l, v);
        }
    }
    Ok(LengthOptimum {
        length: best.0,
        objective: best.1,
        interior: best.0 < max_length - SEARCH_TOLERANCE,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    /// W
    pub power: f64,
    pub eta_tot: f64,
    /// W
    pub snr0: f64,
    /// W
    pub floor: f64,
    /// The conversion formula exceeded 1 at this power and was clamped.
    pub clamped: bool,
}

/// Overall efficiency and SNR₀ as functions of pump power.
pub fn pump_power_tradeoff(scenario: &Scenario, powers: &[f64]) -> Result<Vec<TradeoffPoint>> {
    if powers.is_empty() {
        return Err(Error::config("pump powers", "is empty"));
    }
    powers
        .iter()
        .map(|&p| {
            require_positive("pump power", p)?;
            let eval = scenario.with_parameter("pump.power", p)?.evaluate()?;
            Ok(TradeoffPoint {
                power: p,
                eta_tot: eval.budget.eta_tot,
                snr0: eval.snr0,
                floor: eval.floor,
                clamped: eval.sfg.clamped,
            })
        })
        .collect()
}
