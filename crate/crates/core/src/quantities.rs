//! Physical constants and the handful of spectral conversions the rest of the
//! crate relies on.
//!
//! Everything inside the library is SI (m, s, Hz, J, K, W). Engineering units
//! such as nm, GHz or pW only appear in scenario files and reports.

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};

/// CODATA 2018 values of the constants used by the models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// Planck constant, J·s.
    pub planck: f64,
    /// Speed of light in vacuum, m/s.
    pub light_speed: f64,
    /// Boltzmann constant, J/K.
    pub boltzmann: f64,
    /// Vacuum permittivity, F/m.
    pub vacuum_permittivity: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    planck: 6.626_070_15e-34,
    light_speed: 299_792_458.0,
    boltzmann: 1.380_649e-23,
    vacuum_permittivity: 8.854_187_812_8e-12,
};

pub const PLANCK: f64 = CODATA_2018.planck;
pub const LIGHT_SPEED: f64 = CODATA_2018.light_speed;
pub const BOLTZMANN: f64 = CODATA_2018.boltzmann;
pub const VACUUM_PERMITTIVITY: f64 = CODATA_2018.vacuum_permittivity;

/// Offset between the Celsius and Kelvin scales.
pub const ZERO_CELSIUS: f64 = 273.15;

/// Ratio between the full width at half maximum and the standard deviation of
/// a Gaussian, `2·sqrt(2·ln 2)`.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949;

/// A narrow optical band described by its center frequency and full width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBand {
    center_frequency: f64,
    width: f64,
}

impl SpectralBand {
    /// A zero `width` is accepted and represents an infinitely narrow filter.
    pub fn new(center_frequency: f64, width: f64) -> Result<Self> {
        require_positive("band center frequency", center_frequency)?;
        require_non_negative("band width", width)?;
        if center_frequency <= width / 2.0 {
            return Err(Error::domain(
                "band width",
                format!("width {width} Hz reaches below zero frequency around {center_frequency} Hz"),
            ));
        }
        Ok(SpectralBand {
            center_frequency,
            width,
        })
    }

    pub fn center_frequency(&self) -> f64 {
        self.center_frequency
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn lower_edge(&self) -> f64 {
        self.center_frequency - self.width / 2.0
    }

    pub fn upper_edge(&self) -> f64 {
        self.center_frequency + self.width / 2.0
    }

    /// Fractional bandwidth `Δν/ν₀`.
    pub fn fractional_width(&self) -> f64 {
        self.width / self.center_frequency
    }
}

pub fn wavelength_to_frequency(wavelength: f64) -> Result<f64> {
    require_positive("wavelength", wavelength)?;
    Ok(LIGHT_SPEED / wavelength)
}

pub fn frequency_to_wavelength(frequency: f64) -> Result<f64> {
    require_positive("frequency", frequency)?;
    Ok(LIGHT_SPEED / frequency)
}

/// Converts a small wavelength interval around `center_lambda` into the
/// equivalent frequency interval, `c·Δλ/λ²`.
pub fn bandwidth_wavelength_to_frequency(delta_lambda: f64, center_lambda: f64) -> Result<f64> {
    require_non_negative("wavelength bandwidth", delta_lambda)?;
    require_positive("center wavelength", center_lambda)?;
    Ok(LIGHT_SPEED * delta_lambda / (center_lambda * center_lambda))
}

/// Inverse of [`bandwidth_wavelength_to_frequency`], `Δν·λ²/c`.
pub fn bandwidth_frequency_to_wavelength(delta_nu: f64, center_lambda: f64) -> Result<f64> {
    require_non_negative("frequency bandwidth", delta_nu)?;
    require_positive("center wavelength", center_lambda)?;
    Ok(delta_nu * center_lambda * center_lambda / LIGHT_SPEED)
}

/// Energy of one photon, `h·c/λ`. Returns 0 for an infinite wavelength.
pub fn photon_energy(wavelength: f64) -> Result<f64> {
    if wavelength == f64::INFINITY {
        return Ok(0.0);
    }
    require_positive("wavelength", wavelength)?;
    Ok(PLANCK * LIGHT_SPEED / wavelength)
}

/// Wavelength of the sum-frequency photon, from energy conservation.
///
/// Either input may be `f64::INFINITY` (a zero-energy photon).
pub fn sfg_wavelength(pump_lambda: f64, signal_lambda: f64) -> Result<f64> {
    for (name, v) in [("pump wavelength", pump_lambda), ("signal wavelength", signal_lambda)] {
        if v.is_nan() || v <= 0.0 {
            return Err(Error::domain(name, format!("must be positive, got {v}")));
        }
    }
    let inverse = pump_lambda.recip() + signal_lambda.recip();
    if inverse == 0.0 {
        return Err(Error::domain("sum-frequency wavelength", "both inputs are infinite"));
    }
    Ok(inverse.recip())
}

pub fn celsius_to_kelvin(celsius: f64) -> Result<f64> {
    if celsius.is_nan() || celsius < -ZERO_CELSIUS {
        return Err(Error::domain(
            "temperature",
            format!("{celsius} °C is below absolute zero"),
        ));
    }
    Ok((celsius + ZERO_CELSIUS).max(0.0))
}

pub fn kelvin_to_celsius(kelvin: f64) -> f64 {
    kelvin - ZERO_CELSIUS
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn frequency_examples() {
        assert!(rel(wavelength_to_frequency(LIGHT_SPEED).unwrap(), 1.0) < 1e-15);
        assert!(rel(wavelength_to_frequency(4.65e-6).unwrap(), 6.4472e13) < 1e-4);
        assert!(rel(wavelength_to_frequency(810e-9).unwrap(), 3.7012e14) < 1e-4);
        assert!(wavelength_to_frequency(0.0).is_err());
        assert!(wavelength_to_frequency(-1e-6).is_err());
    }

    #[test]
    fn filter_bandwidth_examples() {
        let nu = bandwidth_wavelength_to_frequency(0.35e-9, 810e-9).unwrap();
        assert!(rel(nu, 1.599e11) < 1e-3);
        assert_eq!(bandwidth_wavelength_to_frequency(0.0, 810e-9).unwrap(), 0.0);
        let dl = bandwidth_frequency_to_wavelength(1.47e12, 810e-9).unwrap();
        assert!(rel(dl, 3.22e-9) < 2e-3);
        assert!(bandwidth_wavelength_to_frequency(0.35e-9, 0.0).is_err());
        assert!(bandwidth_wavelength_to_frequency(-0.35e-9, 810e-9).is_err());
    }

    #[test]
    fn photon_energy_examples() {
        assert!(rel(photon_energy(4.65e-6).unwrap(), 4.272e-20) < 1e-3);
        assert!(rel(photon_energy(980e-9).unwrap(), 2.0270e-19) < 1e-4);
        assert_eq!(photon_energy(f64::INFINITY).unwrap(), 0.0);
        assert!(photon_energy(1e-6).unwrap() > photon_energy(2e-6).unwrap());
        assert!(photon_energy(0.0).is_err());
    }

    #[test]
    fn sum_frequency_examples() {
        assert!((sfg_wavelength(980e-9, 4.65e-6).unwrap() - 809.4e-9).abs() < 0.05e-9);
        assert!(rel(sfg_wavelength(1.2e-6, 1.2e-6).unwrap(), 0.6e-6) < 1e-15);
        assert_eq!(sfg_wavelength(980e-9, f64::INFINITY).unwrap(), 980e-9);
        assert!(sfg_wavelength(0.0, 1e-6).is_err());
    }

    #[test]
    fn celsius_examples() {
        assert_eq!(celsius_to_kelvin(25.0).unwrap(), 298.15);
        assert_eq!(celsius_to_kelvin(93.0).unwrap(), 366.15);
        assert_eq!(celsius_to_kelvin(-273.15).unwrap(), 0.0);
        assert!(celsius_to_kelvin(-274.0).is_err());
    }

    #[test]
    fn band_validation() {
        assert!(SpectralBand::new(1e14, 1.6e11).is_ok());
        assert!(SpectralBand::new(1e14, 0.0).is_ok());
        assert!(SpectralBand::new(1e11, 3e11).is_err());
        assert!(SpectralBand::new(-1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn frequency_round_trip(lambda in 1e-7f64..1e-4) {
            let back = frequency_to_wavelength(wavelength_to_frequency(lambda).unwrap()).unwrap();
            prop_assert!(rel(back, lambda) <= 1e-12);
        }

        #[test]
        fn photon_energy_identity(lambda in 1e-7f64..1e-4) {
            let e = photon_energy(lambda).unwrap();
            prop_assert!((e * lambda / (PLANCK * LIGHT_SPEED) - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn sfg_is_shorter_than_inputs(p in 1e-7f64..1e-4, s in 1e-7f64..1e-4) {
            let out = sfg_wavelength(p, s).unwrap();
            prop_assert!(out < p && out < s);
        }
    }
}
