//! Noise-limited sensitivity: the optical power whose detected photon rate
//! equals the noise count rate.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, require_probability, Error, Result};
use crate::quantities::{photon_energy, SpectralBand};
use crate::radiometry::{background_rate_delta, mean_thermal_occupation, NoiseBudget, ThermalEnvironment};

/// Bundled detector comparison table (`name,timing_ns,snr0_pw,note`).
pub const DEFAULT_CATALOG_CSV: &str = include_str!("../data/detectors.csv");

/// Background is called dominant when it exceeds this multiple of the dark rate.
pub const DEFAULT_DOMINANCE_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    pub eta_det: f64,
    /// Hz
    pub dark_rate: f64,
    /// s
    pub jitter_fwhm: f64,
    /// s
    pub dead_time: f64,
}

impl DetectorSpec {
    pub fn validate(&self) -> Result<()> {
        require_probability("detector eta_det", self.eta_det)?;
        require_non_negative("detector dark rate", self.dark_rate)?;
        require_non_negative("detector jitter", self.jitter_fwhm)?;
        require_non_negative("detector dead time", self.dead_time)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorCatalogEntry {
    pub name: String,
    /// s
    pub timing: f64,
    /// W
    pub snr0: f64,
    pub note: String,
}

#[derive(Debug, Deserialize)]
struct CatalogRow {
    name: String,
    timing_ns: f64,
    snr0_pw: f64,
    #[serde(default)]
    note: String,
}

impl DetectorCatalogEntry {
    pub fn new(name: impl Into<String>, timing: f64, snr0: f64, note: impl Into<String>) -> Result<Self> {
        require_positive("catalog timing", timing)?;
        require_positive("catalog snr0", snr0)?;
        Ok(DetectorCatalogEntry {
            name: name.into(),
            timing,
            snr0,
            note: note.into(),
        })
    }
}

/// Parses the catalog CSV. Columns: `name,timing_ns,snr0_pw,note`.
pub fn read_catalog<R: Read>(reader: R) -> Result<Vec<DetectorCatalogEntry>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = ["name", "timing_ns", "snr0_pw", "note"];
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::config(
            "catalog CSV header",
            format!("expected `{}`", expected.join(",")),
        ));
    }
    rdr.deserialize::<CatalogRow>()
        .enumerate()
        .map(|(i, row)| {
            let row = row?;
            DetectorCatalogEntry::new(row.name, row.timing_ns * 1e-9, row.snr0_pw * 1e-12, row.note).map_err(|e| {
                Error::config(format!("catalog CSV row {}", i + 2), e.to_string())
            })
        })
        .collect()
}

pub fn read_catalog_path(path: &Path) -> Result<Vec<DetectorCatalogEntry>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_catalog(file)
}

pub fn default_catalog() -> Vec<DetectorCatalogEntry> {
    read_catalog(DEFAULT_CATALOG_CSV.as_bytes()).expect("bundled catalog is well formed")
}

/// Optical power giving a signal-to-noise ratio of one,
/// `hc/(λ·η_tot)·⟨n_tot⟩`, in W.
pub fn snr0(signal_lambda: f64, eta_tot: f64, noise: &NoiseBudget) -> Result<f64> {
    require_positive("signal wavelength", signal_lambda)?;
    require_probability("eta_tot", eta_tot)?;
    if eta_tot == 0.0 {
        return Err(Error::domain("eta_tot", "zero efficiency: signal is undetectable"));
    }
    require_non_negative("total noise rate", noise.total_rate)?;
    Ok(photon_energy(signal_lambda)? / eta_tot * noise.total_rate)
}

/// Efficiency-independent limit of [`snr0`] when thermal background swamps
/// the dark counts: `(hc/λ)·Δν·n̄(ν₀)`.
pub fn sensitivity_floor(signal_lambda: f64, band: &SpectralBand, env: &ThermalEnvironment) -> Result<f64> {
    let energy = photon_energy(signal_lambda)?;
    require_positive("signal wavelength", signal_lambda)?;
    Ok(energy * band.width() * mean_thermal_occupation(band.center_frequency(), env)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityPoint {
    pub eta_tot: f64,
    /// W
    pub snr0: f64,
}

/// SNR₀ along a grid of overall efficiencies with the background rate
/// recomputed for each efficiency.
pub fn snr0_vs_efficiency(
    signal_lambda: f64,
    dark_rate: f64,
    band: &SpectralBand,
    env: &ThermalEnvironment,
    eta_grid: &[f64],
) -> Result<Vec<SensitivityPoint>> {
    if eta_grid.is_empty() {
        return Err(Error::domain("efficiency grid", "is empty"));
    }
    require_non_negative("dark count rate", dark_rate)?;
    eta_grid
        .iter()
        .map(|&eta| {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::domain("efficiency grid", format!("value {eta} is outside (0, 1]")));
            }
            let background = background_rate_delta(eta, band, env)?;
            let noise = NoiseBudget {
                dark_rate,
                background_rate: background,
                total_rate: dark_rate + background,
            };
            Ok(SensitivityPoint {
                eta_tot: eta,
                snr0: snr0(signal_lambda, eta, &noise)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    /// W
    pub snr0: f64,
    /// W
    pub floor: f64,
    pub background_dominated: bool,
    pub signal_lambda: f64,
    pub eta_tot: f64,
    pub noise: NoiseBudget,
    pub band: SpectralBand,
    pub environment: ThermalEnvironment,
    pub dominance_ratio: f64,
}

pub fn sensitivity_report(
    signal_lambda: f64,
    eta_tot: f64,
    noise: NoiseBudget,
    band: SpectralBand,
    environment: ThermalEnvironment,
    dominance_ratio: f64,
) -> Result<SensitivityReport> {
    require_positive("background dominance ratio", dominance_ratio)?;
    Ok(SensitivityReport {
        snr0: snr0(signal_lambda, eta_tot, &noise)?,
        floor: sensitivity_floor(signal_lambda, &band, &environment)?,
        background_dominated: noise.background_rate > dominance_ratio * noise.dark_rate,
        signal_lambda,
        eta_tot,
        noise,
        band,
        environment,
        dominance_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedDetector {
    pub entry: DetectorCatalogEntry,
    /// `entry.snr0 / ours.snr0`; above one means the reference is less sensitive.
    pub improvement: f64,
    /// `entry.timing / ours.timing`
    pub timing_ratio: f64,
}

/// Sorts the catalog by SNR₀ (most sensitive first) and attaches the ratio of
/// each entry to our own figures.
pub fn compare_detectors(
    ours_timing: f64,
    ours_snr0: f64,
    catalog: &[DetectorCatalogEntry],
) -> Result<Vec<RankedDetector>> {
    require_positive("our timing", ours_timing)?;
    require_positive("our snr0", ours_snr0)?;
    if catalog.is_empty() {
        return Err(Error::domain("detector catalog", "is empty"));
    }
    let mut ranked: Vec<RankedDetector> = catalog
        .iter()
        .map(|e| RankedDetector {
            entry: e.clone(),
            improvement: e.snr0 / ours_snr0,
            timing_ratio: e.timing / ours_timing,
        })
        .collect();
    ranked.sort_by(|a, b| a.entry.snr0.total_cmp(&b.entry.snr0));
    Ok(ranked)
}
