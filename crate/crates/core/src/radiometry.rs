//! Thermal background counts from a single up-converted spatial mode.
//!
//! A thermal mode at frequency ν holds on average `ε/(exp(hν/kT) − 1)`
//! photons (Bose–Einstein). Integrating that occupation against the optical
//! transfer function of the up-conversion chain, and scaling by the overall
//! detection efficiency, gives the background count rate.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, require_probability, Error, Result};
use crate::numerics;
use crate::quantities::{SpectralBand, BOLTZMANN, PLANCK};

/// Above this value of `hν/kT` the occupation is reported as exactly zero.
pub const OCCUPATION_CUTOFF: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalEnvironment {
    /// K
    pub temperature: f64,
    /// Fraction of a full blackbody the emitter reaches, in [0, 1].
    pub emissivity: f64,
}

impl ThermalEnvironment {
    pub fn new(temperature: f64, emissivity: f64) -> Result<Self> {
        let env = ThermalEnvironment {
            temperature,
            emissivity,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn blackbody(temperature: f64) -> Result<Self> {
        Self::new(temperature, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("temperature", self.temperature)?;
        require_probability("emissivity", self.emissivity)?;
        Ok(())
    }
}

/// Normalized transmission of the optical chain, in signal-band frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransferFunction {
    /// Narrow band of width `band.width()` and flat transmission `peak`.
    Delta { band: SpectralBand, peak: f64 },
    /// Transmission sampled on a strictly increasing frequency grid.
    Tabulated {
        frequencies: Vec<f64>,
        transmission: Vec<f64>,
    },
}

impl TransferFunction {
    pub fn delta(band: SpectralBand, peak: f64) -> Result<Self> {
        require_probability("filter peak transmission", peak)?;
        Ok(TransferFunction::Delta { band, peak })
    }

    pub fn tabulated(frequencies: Vec<f64>, transmission: Vec<f64>) -> Result<Self> {
        let tf = TransferFunction::Tabulated {
            frequencies,
            transmission,
        };
        tf.validate()?;
        Ok(tf)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TransferFunction::Delta { peak, .. } => {
                require_probability("filter peak transmission", *peak)?;
            }
            TransferFunction::Tabulated {
                frequencies,
                transmission,
            } => {
                if frequencies.len() != transmission.len() {
                    return Err(Error::domain(
                        "transfer function",
                        "frequency and transmission columns differ in length",
                    ));
                }
                if frequencies.len() < 2 {
                    return Err(Error::domain("transfer function", "needs at least two grid points"));
                }
                for &f in frequencies {
                    require_positive("transfer function frequency", f)?;
                }
                if frequencies.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::domain(
                        "transfer function",
                        "frequency grid must be strictly increasing",
                    ));
                }
                for &t in transmission {
                    require_probability("transfer function transmission", t)?;
                }
            }
        }
        Ok(())
    }

    /// Reads the two-column `frequency_hz,transmission` CSV format.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["frequency_hz", "transmission"];
        if headers.len() != 2 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::config(
                "transfer function CSV header",
                format!("expected `frequency_hz,transmission`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            ));
        }
        let mut frequencies = Vec::new();
        let mut transmission = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let parse = |i: usize| -> Result<f64> {
                record[i].parse::<f64>().map_err(|e| {
                    Error::config(
                        format!("transfer function CSV row {}", line + 2),
                        format!("column `{}`: {e}", expected[i]),
                    )
                })
            };
            frequencies.push(parse(0)?);
            transmission.push(parse(1)?);
        }
        Self::tabulated(frequencies, transmission)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    /// Same shape with every transmission value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        match self {
            TransferFunction::Delta { band, peak } => Self::delta(*band, peak * factor),
            TransferFunction::Tabulated {
                frequencies,
                transmission,
            } => Self::tabulated(frequencies.clone(), transmission.iter().map(|t| t * factor).collect()),
        }
    }
}

/// Dark, background and total count rates, Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    pub dark_rate: f64,
    pub background_rate: f64,
    pub total_rate: f64,
}

/// Mean photon number per mode, `ε/(exp(hν/kT) − 1)`.
pub fn mean_thermal_occupation(frequency: f64, env: &ThermalEnvironment) -> Result<f64> {
    require_positive("frequency", frequency)?;
    env.validate()?;
    let x = PLANCK * frequency / (BOLTZMANN * env.temperature);
    if x > OCCUPATION_CUTOFF {
        return Ok(0.0);
    }
    Ok(env.emissivity / x.exp_m1())
}

/// Background rate with the filter treated as a delta of width `Δν` at `ν₀`.
pub fn background_rate_delta(eta_tot: f64, band: &SpectralBand, env: &ThermalEnvironment) -> Result<f64> {
    require_probability("eta_tot", eta_tot)?;
    let n = mean_thermal_occupation(band.center_frequency(), env)?;
    Ok(eta_tot * band.width() * n)
}

/// Background rate from the full spectral integral of occupation × transfer
/// function.
///
/// Delta filters are integrated adaptively as a flat band of their stated
/// width; tabulated filters by the trapezoid rule on their own grid.
pub fn background_rate_integral(eta_tot: f64, tf: &TransferFunction, env: &ThermalEnvironment) -> Result<f64> {
    require_probability("eta_tot", eta_tot)?;
    env.validate()?;
    tf.validate()?;
    let integral = match tf {
        TransferFunction::Delta { band, peak } => {
            if band.width() == 0.0 || *peak == 0.0 {
                0.0
            } else {
                // occupation is smooth on a narrow band; tolerance is relative
                let q = numerics::integrate(
                    |nu| mean_thermal_occupation(nu, env).unwrap_or(0.0),
                    band.lower_edge(),
                    band.upper_edge(),
                    0.0,
                    1e-10,
                )?;
                peak * q.value
            }
        }
        TransferFunction::Tabulated {
            frequencies,
            transmission,
        } => {
            let integrand = frequencies
                .iter()
                .zip(transmission)
                .map(|(&nu, &t)| Ok(t * mean_thermal_occupation(nu, env)?))
                .collect::<Result<Vec<_>>>()?;
            numerics::trapezoid(frequencies, &integrand)?
        }
    };
    Ok(eta_tot * integral)
}

pub fn compose_noise(dark_rate: f64, background_rate: f64) -> Result<NoiseBudget> {
    require_non_negative("dark count rate", dark_rate)?;
    require_non_negative("background count rate", background_rate)?;
    Ok(NoiseBudget {
        dark_rate,
        background_rate,
        total_rate: dark_rate + background_rate,
    })
}
