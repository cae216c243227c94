//! Scenario files.
//!
//! Scenarios are TOML documents with engineering units spelled out in the key
//! names (`length_mm`, `power_mw`, ...). Every key is optional; omitted keys
//! take the defaults listed on each section, which describe the 1 cm PPLN,
//! 63 mW / 980 nm pump, 4.65 µm signal configuration at 25 °C. Parsed values
//! are converted to SI and validated before anything is computed, and
//! validation failures name the offending key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::counting_sim::{DetectionChainSpec, PhotonStatistics, PulseShape, PulseTrainSpec, TacConfig};
use crate::design::{EnvironmentSpec, FilterSpec, Scenario};
use crate::error::{Error, Result};
use crate::quantities::{bandwidth_wavelength_to_frequency, celsius_to_kelvin, sfg_wavelength};
use crate::radiometry::TransferFunction;
use crate::sensitivity::{DetectorSpec, DEFAULT_DOMINANCE_RATIO};
use crate::upconversion::{
    attenuation_from_absorption, optimal_focusing, CrystalSpec, FocusingGeometry, PumpBeam, SignalBeam,
    DEFAULT_D_EFF_PM_PER_V, DEFAULT_N_SFG,
};

/// Scenarios shipped with the tool, by name.
pub const BUNDLED_SCENARIOS: &[(&str, &str)] = &[
    ("paper_25C", include_str!("../scenarios/paper_25C.toml")),
    ("paper_93C", include_str!("../scenarios/paper_93C.toml")),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CrystalSection {
    pub length_mm: f64,
    pub d_eff_pm_per_v: f64,
    /// Total attenuation coefficient. Mutually exclusive with `absorption`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attenuation_per_m: Option<f64>,
    /// Fraction of the signal absorbed over the crystal length.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub absorption: Option<f64>,
    pub n_sfg: f64,
    pub temperature_c: f64,
}

impl Default for CrystalSection {
    fn default() -> Self {
        CrystalSection {
            length_mm: 10.0,
            d_eff_pm_per_v: DEFAULT_D_EFF_PM_PER_V,
            attenuation_per_m: None,
            absorption: Some(0.4),
            n_sfg: DEFAULT_N_SFG,
            temperature_c: 25.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PumpSection {
    pub wavelength_nm: f64,
    pub power_mw: f64,
}

impl Default for PumpSection {
    fn default() -> Self {
        PumpSection {
            wavelength_nm: 980.0,
            power_mw: 63.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SignalSection {
    pub wavelength_um: f64,
}

impl Default for SignalSection {
    fn default() -> Self {
        SignalSection { wavelength_um: 4.65 }
    }
}

/// At most one of the two keys; the optimal `xi` is used when neither is set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FocusingSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confocal_parameter_mm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FiltersSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth_ghz: Option<f64>,
    /// Width at the sum-frequency wavelength; converted to GHz.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth_nm: Option<f64>,
    /// Two-column `frequency_hz,transmission` file, relative to the scenario.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transfer_csv: Option<PathBuf>,
    pub excess_background_hz: f64,
}

impl Default for FiltersSection {
    fn default() -> Self {
        FiltersSection {
            bandwidth_ghz: None,
            bandwidth_nm: None,
            transfer_csv: None,
            excess_background_hz: 0.0,
        }
    }
}

const DEFAULT_BANDWIDTH_GHZ: f64 = 160.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvironmentSection {
    pub emissivity: f64,
    /// Emitter temperature; the crystal temperature when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature_c: Option<f64>,
}

impl Default for EnvironmentSection {
    fn default() -> Self {
        EnvironmentSection {
            emissivity: 1.0,
            temperature_c: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorSection {
    pub eta_det: f64,
    pub dark_rate_hz: f64,
    pub jitter_fwhm_ns: f64,
    pub dead_time_ns: f64,
    pub background_dominance_ratio: f64,
}

impl Default for DetectorSection {
    fn default() -> Self {
        DetectorSection {
            eta_det: 0.52,
            dark_rate_hz: 55.0,
            jitter_fwhm_ns: 0.3,
            dead_time_ns: 0.0,
            background_dominance_ratio: DEFAULT_DOMINANCE_RATIO,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OpticsSection {
    pub eta_opt: f64,
}

impl Default for OpticsSection {
    fn default() -> Self {
        OpticsSection { eta_opt: 0.137 }
    }
}

/// Measured operating point, used instead of the model where present.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeasuredSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_tot: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dark_rate_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_rate_hz: Option<f64>,
    /// A previously published SNR₀ to compare the computed value against.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reported_snr0_pw: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationSection {
    pub rep_rate_khz: f64,
    pub pulse_width_ns: f64,
    pub mu: f64,
    pub pulse_shape: PulseShape,
    pub statistics: PhotonStatistics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub duration_s: f64,
    /// Overrides the measured or modeled overall efficiency.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_tot: Option<f64>,
    pub include_noise: bool,
}

impl Default for SimulationSection {
    fn default() -> Self {
        SimulationSection {
            rep_rate_khz: 750.0,
            pulse_width_ns: 1.0,
            mu: 1.0,
            pulse_shape: PulseShape::Rectangular,
            statistics: PhotonStatistics::Poissonian,
            seed: None,
            duration_s: 300.0,
            eta_tot: None,
            include_noise: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TacSection {
    pub bin_width_ns: f64,
    /// Accepted `t_stop − t_start` range.
    pub window_ns: [f64; 2],
    /// Electrical delay of the sync (stop) pulses after each optical pulse.
    pub sync_delay_ns: f64,
}

impl Default for TacSection {
    fn default() -> Self {
        TacSection {
            bin_width_ns: 0.025,
            window_ns: [3.0, 6.0],
            sync_delay_ns: 5.0,
        }
    }
}

/// Raw scenario document. Serializing it after parsing yields the input with
/// every default filled in.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub crystal: CrystalSection,
    pub pump: PumpSection,
    pub signal: SignalSection,
    pub focusing: FocusingSection,
    pub filters: FiltersSection,
    pub environment: EnvironmentSection,
    pub detector: DetectorSection,
    pub optics: OpticsSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<MeasuredSection>,
    pub simulation: SimulationSection,
    pub tac: TacSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub eta_tot: f64,
    /// Hz
    pub dark_rate: f64,
    /// Hz
    pub total_rate: f64,
    /// W
    pub reported_snr0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSettings {
    pub pulses: PulseTrainSpec,
    pub seed: Option<u64>,
    /// s
    pub duration: f64,
    pub eta_tot: Option<f64>,
    pub include_noise: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TacSettings {
    pub config: TacConfig,
    /// s
    pub sync_delay: f64,
}

/// A parsed, validated scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSetup {
    pub document: ScenarioDocument,
    pub scenario: Scenario,
    pub measured: Option<Measurement>,
    pub simulation: SimulationSettings,
    pub tac: TacSettings,
    pub dominance_ratio: f64,
    /// Unknown keys seen in lenient mode.
    pub warnings: Vec<String>,
}

impl ScenarioSetup {
    /// Detection chain for the simulator: explicit override, else the
    /// measured operating point, else the model.
    pub fn detection_chain(&self) -> Result<DetectionChainSpec> {
        let eval = self.scenario.evaluate()?;
        let eta_tot = self
            .simulation
            .eta_tot
            .or(self.measured.map(|m| m.eta_tot))
            .unwrap_or(eval.budget.eta_tot);
        let (dark, background) = match (self.simulation.include_noise, self.measured) {
            (false, _) => (0.0, 0.0),
            (true, Some(m)) => (m.dark_rate, (m.total_rate - m.dark_rate).max(0.0)),
            (true, None) => (eval.noise.dark_rate, eval.noise.background_rate),
        };
        let chain = DetectionChainSpec {
            eta_tot,
            jitter_fwhm: self.scenario.detector.jitter_fwhm,
            dead_time: self.scenario.detector.dead_time,
            dark_rate: dark,
            background_rate: background,
        };
        chain.validate()?;
        Ok(chain)
    }
}

fn check(field: &str, ok: bool, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(field, reason))
    }
}

fn positive(field: &str, v: f64) -> Result<f64> {
    check(field, v.is_finite() && v > 0.0, &format!("must be positive, got {v}"))?;
    Ok(v)
}

fn non_negative(field: &str, v: f64) -> Result<f64> {
    check(field, v.is_finite() && v >= 0.0, &format!("must be non-negative, got {v}"))?;
    Ok(v)
}

fn probability(field: &str, v: f64) -> Result<f64> {
    check(field, (0.0..=1.0).contains(&v), &format!("must lie in [0, 1], got {v}"))?;
    Ok(v)
}

fn kelvin(field: &str, celsius: f64) -> Result<f64> {
    let k = celsius_to_kelvin(celsius).map_err(|e| Error::config(field, e.to_string()))?;
    positive(field, k)
}

/// Parses and validates a scenario document.
///
/// `strict` turns unknown keys into errors; otherwise they are returned as
/// warnings. Relative file references resolve against `base_dir`.
pub fn parse_scenario(text: &str, strict: bool, base_dir: Option<&Path>) -> Result<ScenarioSetup> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::config("scenario", e.to_string()))?;
    if table.is_empty() {
        return Err(Error::config("scenario", "file is empty"));
    }
    let mut unknown = Vec::new();
    let document: ScenarioDocument =
        serde_ignored::deserialize(toml::Value::Table(table), |path| unknown.push(path.to_string()))
            .map_err(|e| Error::config("scenario", e.to_string()))?;
    if strict {
        if let Some(first) = unknown.first() {
            return Err(Error::config(first.clone(), "unknown key (strict mode)"));
        }
    }
    let warnings = unknown.into_iter().map(|k| format!("ignored unknown key `{k}`")).collect();
    build(document, warnings, base_dir)
}

pub fn load_scenario(path: &Path, strict: bool) -> Result<ScenarioSetup> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut setup = parse_scenario(&text, strict, path.parent())?;
    if setup.document.name.is_none() {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        setup.scenario.name = stem.clone();
        setup.document.name = Some(stem);
    }
    Ok(setup)
}

pub fn bundled_scenario(name: &str) -> Result<ScenarioSetup> {
    let (_, text) = BUNDLED_SCENARIOS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        let names: Vec<_> = BUNDLED_SCENARIOS.iter().map(|(n, _)| *n).collect();
        Error::config("scenario", format!("no bundled scenario `{name}`; available: {}", names.join(", ")))
    })?;
    parse_scenario(text, true, None)
}

fn build(mut doc: ScenarioDocument, warnings: Vec<String>, base_dir: Option<&Path>) -> Result<ScenarioSetup> {
    let c = &doc.crystal;
    let length = positive("crystal.length_mm", c.length_mm)? / 1e3;
    let attenuation = match (c.attenuation_per_m, c.absorption) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "crystal.attenuation_per_m",
                "give either `attenuation_per_m` or `absorption`, not both",
            ))
        }
        (Some(a), None) => non_negative("crystal.attenuation_per_m", a)?,
        (None, Some(f)) => {
            check("crystal.absorption", (0.0..1.0).contains(&f), &format!("must lie in [0, 1), got {f}"))?;
            attenuation_from_absorption(f, length)?
        }
        (None, None) => 0.0,
    };
    check("crystal.n_sfg", c.n_sfg.is_finite() && c.n_sfg >= 1.0, &format!("must be ≥ 1, got {}", c.n_sfg))?;
    let crystal = CrystalSpec {
        length,
        d_eff: positive("crystal.d_eff_pm_per_v", c.d_eff_pm_per_v)? / 1e12,
        attenuation,
        n_sfg: c.n_sfg,
        temperature: kelvin("crystal.temperature_c", c.temperature_c)?,
    };

    let pump = PumpBeam {
        wavelength: positive("pump.wavelength_nm", doc.pump.wavelength_nm)? / 1e9,
        power: non_negative("pump.power_mw", doc.pump.power_mw)? / 1e3,
    };
    let signal = SignalBeam {
        wavelength: positive("signal.wavelength_um", doc.signal.wavelength_um)? / 1e6,
    };

    let focusing = match (doc.focusing.xi, doc.focusing.confocal_parameter_mm) {
        (Some(_), Some(_)) => {
            return Err(Error::config("focusing.xi", "give either `xi` or `confocal_parameter_mm`, not both"))
        }
        (Some(xi), None) => FocusingGeometry::from_xi(length, positive("focusing.xi", xi)?)?,
        (None, Some(b)) => {
            FocusingGeometry::from_confocal_parameter(length, positive("focusing.confocal_parameter_mm", b)? / 1e3)?
        }
        (None, None) => {
            let xi = optimal_focusing().xi_star;
            doc.focusing.xi = Some(xi);
            FocusingGeometry::from_xi(length, xi)?
        }
    };

    let f = &doc.filters;
    let bandwidth = match (f.bandwidth_ghz, f.bandwidth_nm) {
        (Some(_), Some(_)) => {
            return Err(Error::config("filters.bandwidth_ghz", "give either `bandwidth_ghz` or `bandwidth_nm`, not both"))
        }
        (Some(g), None) => non_negative("filters.bandwidth_ghz", g)? * 1e9,
        (None, Some(nm)) => {
            let center = sfg_wavelength(pump.wavelength, signal.wavelength)?;
            bandwidth_wavelength_to_frequency(non_negative("filters.bandwidth_nm", nm)? / 1e9, center)?
        }
        (None, None) => {
            doc.filters.bandwidth_ghz = Some(DEFAULT_BANDWIDTH_GHZ);
            DEFAULT_BANDWIDTH_GHZ * 1e9
        }
    };
    let transfer = match doc.filters.transfer_csv.clone() {
        Some(p) => {
            let resolved = match base_dir {
                Some(dir) if p.is_relative() => dir.join(p),
                _ => p,
            };
            let tf = TransferFunction::from_csv_path(&resolved)?;
            // echo an absolute path so the resolved document stands alone
            doc.filters.transfer_csv = Some(std::path::absolute(&resolved).unwrap_or(resolved));
            Some(tf)
        }
        None => None,
    };
    let filters = FilterSpec {
        bandwidth,
        transfer,
        excess_background: non_negative("filters.excess_background_hz", doc.filters.excess_background_hz)?,
    };

    let environment = EnvironmentSpec {
        temperature: doc
            .environment
            .temperature_c
            .map(|t| kelvin("environment.temperature_c", t))
            .transpose()?,
        emissivity: probability("environment.emissivity", doc.environment.emissivity)?,
    };

    let d = &doc.detector;
    let detector = DetectorSpec {
        eta_det: probability("detector.eta_det", d.eta_det)?,
        dark_rate: non_negative("detector.dark_rate_hz", d.dark_rate_hz)?,
        jitter_fwhm: non_negative("detector.jitter_fwhm_ns", d.jitter_fwhm_ns)? / 1e9,
        dead_time: non_negative("detector.dead_time_ns", d.dead_time_ns)? / 1e9,
    };
    let dominance_ratio = positive("detector.background_dominance_ratio", d.background_dominance_ratio)?;

    let scenario = Scenario {
        name: doc.name.clone().unwrap_or_default(),
        crystal,
        pump,
        signal,
        focusing,
        filters,
        environment,
        detector,
        eta_opt: probability("optics.eta_opt", doc.optics.eta_opt)?,
    };
    scenario.validate()?;

    let measured = match &doc.measured {
        None => None,
        Some(m) => {
            let eta_tot = m
                .eta_tot
                .ok_or_else(|| Error::config("measured.eta_tot", "required when [measured] is present"))?;
            check("measured.eta_tot", eta_tot > 0.0 && eta_tot <= 1.0, &format!("must lie in (0, 1], got {eta_tot}"))?;
            let dark_rate = non_negative("measured.dark_rate_hz", m.dark_rate_hz.unwrap_or(detector.dark_rate))?;
            let total_rate = non_negative("measured.total_rate_hz", m.total_rate_hz.unwrap_or(dark_rate))?;
            check(
                "measured.total_rate_hz",
                total_rate >= dark_rate,
                &format!("total rate {total_rate} Hz is below the dark rate {dark_rate} Hz"),
            )?;
            let reported_snr0 = m.reported_snr0_pw.map(|p| positive("measured.reported_snr0_pw", p)).transpose()?;
            Some(Measurement {
                eta_tot,
                dark_rate,
                total_rate,
                reported_snr0: reported_snr0.map(|p| p / 1e12),
            })
        }
    };

    let s = &doc.simulation;
    let pulses = PulseTrainSpec {
        rep_rate: positive("simulation.rep_rate_khz", s.rep_rate_khz)? * 1e3,
        pulse_width: positive("simulation.pulse_width_ns", s.pulse_width_ns)? / 1e9,
        mean_photons_per_pulse: non_negative("simulation.mu", s.mu)?,
        pulse_shape: s.pulse_shape,
        statistics: s.statistics,
    };
    pulses
        .validate()
        .map_err(|e| Error::config("simulation.pulse_width_ns", e.to_string()))?;
    let simulation = SimulationSettings {
        pulses,
        seed: s.seed,
        duration: positive("simulation.duration_s", s.duration_s)?,
        eta_tot: s.eta_tot.map(|e| probability("simulation.eta_tot", e)).transpose()?,
        include_noise: s.include_noise,
    };

    let t = &doc.tac;
    let tac_config = TacConfig::new(
        positive("tac.bin_width_ns", t.bin_width_ns)? / 1e9,
        (t.window_ns[0] / 1e9, t.window_ns[1] / 1e9),
    )
    .map_err(|e| Error::config("tac.window_ns", e.to_string()))?;
    let tac = TacSettings {
        config: tac_config,
        sync_delay: non_negative("tac.sync_delay_ns", t.sync_delay_ns)? / 1e9,
    };

    Ok(ScenarioSetup {
        document: doc,
        scenario,
        measured,
        simulation,
        tac,
        dominance_ratio,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_25c_matches_setup() {
        let s = bundled_scenario("paper_25C").unwrap();
        assert_eq!(s.scenario.signal.wavelength, 4.65e-6);
        assert_eq!(s.scenario.pump.power, 0.063);
        assert_eq!(s.scenario.pump.wavelength, 980e-9);
        assert_eq!(s.scenario.crystal.length, 0.01);
        assert_eq!(s.scenario.crystal.temperature, 298.15);
        let m = s.measured.unwrap();
        assert_eq!(m.eta_tot, 3.6e-6);
        assert_eq!(m.total_rate, 87.8);
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn bundled_93c_is_hotter() {
        let s = bundled_scenario("paper_93C").unwrap();
        assert_eq!(s.scenario.crystal.temperature, 366.15);
        assert_eq!(s.measured.unwrap().total_rate, 133.1);
        assert!(bundled_scenario("paper_40C").is_err());
    }

    #[test]
    fn empty_file_is_a_parse_error() {
        assert!(matches!(parse_scenario("", false, None), Err(Error::Config { .. })));
        assert!(matches!(parse_scenario("# only a comment\n", false, None), Err(Error::Config { .. })));
        assert!(matches!(parse_scenario("[crystal\n", false, None), Err(Error::Config { .. })));
    }

    #[test]
    fn negative_pump_power_names_the_key() {
        let err = parse_scenario("[pump]\npower_mw = -5\n", false, None).unwrap_err();
        match err {
            Error::Config { field, .. } => assert!(field.starts_with("pump.power"), "{field}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_strict_and_lenient() {
        let text = "[pump]\npower_mw = 63\npowr_mw = 1\n";
        let err = parse_scenario(text, true, None).unwrap_err();
        match err {
            Error::Config { field, .. } => assert_eq!(field, "pump.powr_mw"),
            other => panic!("unexpected {other:?}"),
        }
        let lenient = parse_scenario(text, false, None).unwrap();
        assert_eq!(lenient.warnings.len(), 1);
    }

    #[test]
    fn defaults_fill_in() {
        let s = parse_scenario("name = \"bare\"\n", true, None).unwrap();
        assert!((s.scenario.crystal.attenuation - 51.08).abs() < 0.01);
        assert!((s.scenario.focusing.xi - optimal_focusing().xi_star).abs() < 1e-12);
        assert_eq!(s.scenario.filters.bandwidth, 160e9);
        assert!(s.measured.is_none());
        assert_eq!(s.document.filters.bandwidth_ghz, Some(160.0));
    }

    #[test]
    fn exclusive_alternatives() {
        assert!(parse_scenario("[crystal]\nabsorption = 0.4\nattenuation_per_m = 10\n", true, None).is_err());
        assert!(parse_scenario("[focusing]\nxi = 1\nconfocal_parameter_mm = 5\n", true, None).is_err());
        let nm = parse_scenario("[filters]\nbandwidth_nm = 0.35\n", true, None).unwrap();
        assert!((nm.scenario.filters.bandwidth / 1e9 - 160.0).abs() < 1.0);
    }

    #[test]
    fn echo_reparses_to_same_setup() {
        let s = bundled_scenario("paper_93C").unwrap();
        let echoed = toml::to_string(&s.document).unwrap();
        let again = parse_scenario(&echoed, true, None).unwrap();
        assert_eq!(again.scenario, s.scenario);
        assert_eq!(again.measured, s.measured);
        assert_eq!(again.simulation, s.simulation);
    }

    #[test]
    fn detection_chain_prefers_measurement() {
        let s = bundled_scenario("paper_25C").unwrap();
        let chain = s.detection_chain().unwrap();
        assert_eq!(chain.eta_tot, 3.6e-6);
        assert_eq!(chain.dark_rate, 55.0);
        assert!((chain.background_rate - 32.8).abs() < 1e-9);
        let modeled = parse_scenario("[optics]\neta_opt = 0.137\n", true, None).unwrap();
        let chain = modeled.detection_chain().unwrap();
        let eval = modeled.scenario.evaluate().unwrap();
        assert_eq!(chain.eta_tot, eval.budget.eta_tot);
    }

    #[test]
    fn tac_window_must_tile() {
        let err = parse_scenario("[tac]\nbin_width_ns = 0.4\nwindow_ns = [0.0, 1.0]\n", true, None).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "tac.window_ns"));
    }
}
