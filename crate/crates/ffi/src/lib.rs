//! C ABI for `mirdet`.
//!
//! Conventions:
//! - every fallible function returns a [`MirdetStatus`] and writes its result
//!   through an out-pointer; on failure the out-pointer is left untouched and
//!   [`mirdet_last_error`] describes the problem;
//! - scenarios and simulation runs are opaque handles created by `*_load` /
//!   `*_bundled` / `mirdet_simulate` and released with the matching `*_free`;
//! - all quantities are SI unless the parameter name carries a unit suffix.
//!
//! The header `include/mirdet.h` is generated by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use mirdet::config::{bundled_scenario, load_scenario, ScenarioSetup};
use mirdet::counting_sim::{build_tac_histogram, simulate_run, EventOrigin, Histogram, PeriodicStops, SimulationRun};
use mirdet::quantities::SpectralBand;
use mirdet::radiometry::{background_rate_delta, compose_noise, ThermalEnvironment};
use mirdet::upconversion::{
    boyd_kleinman_h, optimal_focusing, sfg_quantum_efficiency, CrystalSpec, PumpBeam, SignalBeam,
};
use mirdet::{sensitivity, Error};

/// Result of every fallible call. Values 2–4 match the exit codes of the
/// `mirdet` command-line tool.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MirdetStatus {
    Ok = 0,
    /// Null pointer or non-UTF-8 string argument.
    InvalidArgument = 1,
    Config = 2,
    Domain = 3,
    Io = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

/// Opaque scenario handle.
pub struct MirdetScenario {
    setup: ScenarioSetup,
}

/// Opaque handle for one simulated run and its start–stop histogram.
pub struct MirdetSimulation {
    run: SimulationRun,
    histogram: Histogram,
}

/// Modeled figures of merit of a scenario.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MirdetEvaluation {
    pub focusing_factor: f64,
    pub eta_sfg: f64,
    /// Non-zero when the conversion formula exceeded 1 and was clamped.
    pub eta_sfg_clamped: i32,
    pub eta_tot: f64,
    pub dark_rate_hz: f64,
    pub background_rate_hz: f64,
    pub total_rate_hz: f64,
    /// W; infinite when `eta_tot` is zero.
    pub snr0_w: f64,
    /// W
    pub floor_w: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MirdetRunSummary {
    pub seed: u64,
    pub duration_s: f64,
    pub pulses: u64,
    pub generated_photons: u64,
    pub signal_events: u64,
    pub dark_events: u64,
    pub background_events: u64,
    pub dead_time_losses: u64,
    pub recorded_events: u64,
    pub recorded_rate_hz: f64,
    pub expected_rate_hz: f64,
    pub histogram_total: u64,
    pub histogram_overflow: u64,
    pub histogram_unpaired: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> MirdetStatus {
    match e.exit_code() {
        2 => MirdetStatus::Config,
        4 => MirdetStatus::Io,
        _ => MirdetStatus::Domain,
    }
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard<F: FnOnce() -> Result<(), (MirdetStatus, String)>>(f: F) -> MirdetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            MirdetStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal error: panic caught at the C boundary");
            MirdetStatus::Internal
        }
    }
}

fn lift(e: Error) -> (MirdetStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (MirdetStatus, String) {
    (MirdetStatus::InvalidArgument, format!("`{name}` is null"))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, (MirdetStatus, String)> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, (MirdetStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (MirdetStatus::InvalidArgument, format!("`{name}` is not valid UTF-8")))
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next `mirdet_*` call on the same thread.
#[no_mangle]
pub extern "C" fn mirdet_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mirdet_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Boyd–Kleinman focusing factor `h(ξ)`.
///
/// # Safety
/// `out_h` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mirdet_boyd_kleinman_h(xi: f64, out_h: *mut f64) -> MirdetStatus {
    guard(|| {
        let o = out(out_h, "out_h")?;
        *o = boyd_kleinman_h(xi).map_err(lift)?;
        Ok(())
    })
}

/// Optimal focusing parameter and the corresponding focusing factor.
///
/// # Safety
/// Both pointers must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mirdet_optimal_focusing(out_xi: *mut f64, out_h: *mut f64) -> MirdetStatus {
    guard(|| {
        let xi = out(out_xi, "out_xi")?;
        let h = out(out_h, "out_h")?;
        let best = optimal_focusing();
        *xi = best.xi_star;
        *h = best.h_star;
        Ok(())
    })
}

/// Sum-frequency conversion efficiency, clamped to 1. `out_clamped`
/// may be null.
///
/// # Safety
/// `out_eta` must be valid for writes; `out_clamped` null or valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn mirdet_sfg_efficiency(
    crystal_length_m: f64,
    d_eff_m_per_v: f64,
    attenuation_per_m: f64,
    n_sfg: f64,
    pump_wavelength_m: f64,
    pump_power_w: f64,
    signal_wavelength_m: f64,
    focusing_factor: f64,
    out_eta: *mut f64,
    out_clamped: *mut i32,
) -> MirdetStatus {
    guard(|| {
        let eta = out(out_eta, "out_eta")?;
        let crystal = CrystalSpec {
            length: crystal_length_m,
            d_eff: d_eff_m_per_v,
            attenuation: attenuation_per_m,
            n_sfg,
            temperature: 298.15,
        };
        let pump = PumpBeam {
            wavelength: pump_wavelength_m,
            power: pump_power_w,
        };
        let signal = SignalBeam {
            wavelength: signal_wavelength_m,
        };
        let r = sfg_quantum_efficiency(&crystal, &pump, &signal, focusing_factor).map_err(lift)?;
        *eta = r.value;
        if let Some(c) = out_clamped.as_mut() {
            *c = r.clamped as i32;
        }
        Ok(())
    })
}

/// Thermal background count rate for a rectangular filter band.
///
/// # Safety
/// `out_rate_hz` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mirdet_background_rate(
    eta_tot: f64,
    center_frequency_hz: f64,
    bandwidth_hz: f64,
    temperature_k: f64,
    emissivity: f64,
    out_rate_hz: *mut f64,
) -> MirdetStatus {
    guard(|| {
        let o = out(out_rate_hz, "out_rate_hz")?;
        let band = SpectralBand::new(center_frequency_hz, bandwidth_hz).map_err(lift)?;
        let env = ThermalEnvironment::new(temperature_k, emissivity).map_err(lift)?;
        *o = background_rate_delta(eta_tot, &band, &env).map_err(lift)?;
        Ok(())
    })
}

/// Optical power at unit signal-to-noise ratio, W.
///
/// # Safety
/// `out_w` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mirdet_snr0(
    signal_wavelength_m: f64,
    eta_tot: f64,
    dark_rate_hz: f64,
    background_rate_hz: f64,
    out_w: *mut f64,
) -> MirdetStatus {
    guard(|| {
        let o = out(out_w, "out_w")?;
        let noise = compose_noise(dark_rate_hz, background_rate_hz).map_err(lift)?;
        *o = sensitivity::snr0(signal_wavelength_m, eta_tot, &noise).map_err(lift)?;
        Ok(())
    })
}

/// Background-limited SNR₀ floor for a rectangular filter band, W.
///
/// # Safety
/// `out_w` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mirdet_sensitivity_floor(
    signal_wavelength_m: f64,
    bandwidth_hz: f64,
    temperature_k: f64,
    emissivity: f64,
    out_w: *mut f64,
) -> MirdetStatus {
    guard(|| {
        let o = out(out_w, "out_w")?;
        let center = mirdet::quantities::wavelength_to_frequency(signal_wavelength_m).map_err(lift)?;
        let band = SpectralBand::new(center, bandwidth_hz).map_err(lift)?;
        let env = ThermalEnvironment::new(temperature_k, emissivity).map_err(lift)?;
        *o = sensitivity::sensitivity_floor(signal_wavelength_m, &band, &env).map_err(lift)?;
        Ok(())
    })
}

fn boxed(setup: ScenarioSetup) -> *mut MirdetScenario {
    Box::into_raw(Box::new(MirdetScenario { setup }))
}

/// Loads and validates a scenario TOML file. `strict` non-zero rejects
/// unknown keys.
///
/// # Safety
/// `path` must be null or a NUL-terminated string; `out_scenario` must be
/// null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mirdet_scenario_load(
    path: *const c_char,
    strict: i32,
    out_scenario: *mut *mut MirdetScenario,
) -> MirdetStatus {
    guard(|| {
        let o = out(out_scenario, "out_scenario")?;
        let path = text(path, "path")?;
        *o = boxed(load_scenario(Path::new(path), strict != 0).map_err(lift)?);
        Ok(())
    })
}

/// One of the scenarios shipped with the library (`paper_25C`, `paper_93C`).
///
/// # Safety
/// `name` must be null or a NUL-terminated string; `out_scenario` must be
/// null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mirdet_scenario_bundled(
    name: *const c_char,
    out_scenario: *mut *mut MirdetScenario,
) -> MirdetStatus {
    guard(|| {
        let o = out(out_scenario, "out_scenario")?;
        let name = text(name, "name")?;
        *o = boxed(bundled_scenario(name).map_err(lift)?);
        Ok(())
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `scenario` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mirdet_scenario_free(scenario: *mut MirdetScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Evaluates the modeled efficiency chain, noise and sensitivity.
///
/// # Safety
/// `scenario` must be null or a live handle; `out_eval` null or valid.
#[no_mangle]
pub unsafe extern "C" fn mirdet_scenario_evaluate(
    scenario: *const MirdetScenario,
    out_eval: *mut MirdetEvaluation,
) -> MirdetStatus {
    guard(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let o = out(out_eval, "out_eval")?;
        let e = s.setup.scenario.evaluate().map_err(lift)?;
        *o = MirdetEvaluation {
            focusing_factor: e.focusing_factor,
            eta_sfg: e.sfg.value,
            eta_sfg_clamped: e.sfg.clamped as i32,
            eta_tot: e.budget.eta_tot,
            dark_rate_hz: e.noise.dark_rate,
            background_rate_hz: e.noise.background_rate,
            total_rate_hz: e.noise.total_rate,
            snr0_w: e.snr0,
            floor_w: e.floor,
        };
        Ok(())
    })
}

/// Simulates the scenario's counting experiment and builds its histogram.
/// `duration_s <= 0` uses the scenario duration.
///
/// # Safety
/// `scenario` must be null or a live handle; `out_sim` null or valid.
#[no_mangle]
pub unsafe extern "C" fn mirdet_simulate(
    scenario: *const MirdetScenario,
    seed: u64,
    duration_s: f64,
    out_sim: *mut *mut MirdetSimulation,
) -> MirdetStatus {
    guard(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let o = out(out_sim, "out_sim")?;
        let setup = &s.setup;
        let duration = if duration_s > 0.0 { duration_s } else { setup.simulation.duration };
        let pulses = setup.simulation.pulses;
        let chain = setup.detection_chain().map_err(lift)?;
        let run = simulate_run(&pulses, &chain, duration, seed).map_err(lift)?;
        let stops =
            PeriodicStops::new(pulses.period(), setup.tac.sync_delay, pulses.pulse_count(duration)).map_err(lift)?;
        let histogram = build_tac_histogram(&run.events, &stops, &setup.tac.config).map_err(lift)?;
        *o = Box::into_raw(Box::new(MirdetSimulation { run, histogram }));
        Ok(())
    })
}

/// Releases a simulation. Null is ignored.
///
/// # Safety
/// `sim` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mirdet_simulation_free(sim: *mut MirdetSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// # Safety
/// `sim` must be null or a live handle; `out_summary` null or valid.
#[no_mangle]
pub unsafe extern "C" fn mirdet_simulation_summary(
    sim: *const MirdetSimulation,
    out_summary: *mut MirdetRunSummary,
) -> MirdetStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("sim"))?;
        let o = out(out_summary, "out_summary")?;
        let s = &sim.run.summary;
        *o = MirdetRunSummary {
            seed: s.seed,
            duration_s: s.duration,
            pulses: s.pulses,
            generated_photons: s.generated_photons,
            signal_events: sim.run.count(EventOrigin::Signal) as u64,
            dark_events: s.dark_events,
            background_events: s.background_events,
            dead_time_losses: s.dead_time_losses,
            recorded_events: s.recorded_events,
            recorded_rate_hz: s.recorded_rate,
            expected_rate_hz: s.expected_rate,
            histogram_total: sim.histogram.total(),
            histogram_overflow: sim.histogram.overflow,
            histogram_unpaired: sim.histogram.unpaired,
        };
        Ok(())
    })
}

/// Number of histogram bins, or 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mirdet_simulation_bin_count(sim: *const MirdetSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.histogram.counts.len())
}

/// Copies the histogram into caller buffers: `bin_count + 1` edges (s) and
/// `bin_count` counts. Either buffer may be null to skip it.
///
/// # Safety
/// Non-null buffers must hold at least the stated number of elements.
#[no_mangle]
pub unsafe extern "C" fn mirdet_simulation_histogram(
    sim: *const MirdetSimulation,
    edges_s: *mut f64,
    counts: *mut u64,
    bin_count: usize,
) -> MirdetStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("sim"))?;
        let h = &sim.histogram;
        if bin_count != h.counts.len() {
            return Err((
                MirdetStatus::InvalidArgument,
                format!("bin_count is {bin_count} but the histogram has {} bins", h.counts.len()),
            ));
        }
        if !edges_s.is_null() {
            ptr::copy_nonoverlapping(h.bin_edges.as_ptr(), edges_s, h.bin_edges.len());
        }
        if !counts.is_null() {
            ptr::copy_nonoverlapping(h.counts.as_ptr(), counts, h.counts.len());
        }
        Ok(())
    })
}

/// Writes the histogram as `bin_start_ns,bin_end_ns,counts` CSV.
///
/// # Safety
/// `sim` must be null or a live handle; `path` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mirdet_simulation_write_csv(sim: *const MirdetSimulation, path: *const c_char) -> MirdetStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("sim"))?;
        let path = Path::new(text(path, "path")?);
        let file = std::fs::File::create(path).map_err(|e| {
            (MirdetStatus::Io, format!("I/O error on {}: {e}", path.display()))
        })?;
        sim.histogram.write_csv(file).map_err(lift)?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_codes_follow_error_kinds() {
        let mut v = 0.0;
        assert_eq!(unsafe { mirdet_boyd_kleinman_h(-1.0, &mut v) }, MirdetStatus::Domain);
        let msg = unsafe { CStr::from_ptr(mirdet_last_error()) }.to_str().unwrap();
        assert!(msg.contains("domain error"), "{msg}");
        assert_eq!(unsafe { mirdet_boyd_kleinman_h(1.0, ptr::null_mut()) }, MirdetStatus::InvalidArgument);
        assert_eq!(unsafe { mirdet_boyd_kleinman_h(1.0, &mut v) }, MirdetStatus::Ok);
        assert_eq!(unsafe { CStr::from_ptr(mirdet_last_error()) }.to_bytes().len(), 0);
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(mirdet_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
