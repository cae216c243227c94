//! The command layer behind the `mirdet` binary: each command turns a
//! scenario plus options into a [`Report`].

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::config::ScenarioSetup;
use crate::counting_sim::{build_tac_histogram, simulate_run, EventOrigin, PeriodicStops, RNG_ALGORITHM};
use crate::design::{optimal_length_fixed_focus, optimal_length_joint, pump_power_tradeoff, sweep, DEFAULT_MAX_LENGTH};
use crate::error::{Error, Result};
use crate::numerics::round_significant;
use crate::radiometry::{compose_noise, mean_thermal_occupation};
use crate::report::{Cell, Report, Table, DIMENSIONLESS};
use crate::sensitivity::{compare_detectors, default_catalog, read_catalog_path, sensitivity_report, snr0};
use crate::upconversion::{
    boyd_kleinman_h, infer_sfg_efficiency, optimal_focusing, per_watt_efficiency, sfg_quantum_efficiency, theory_gap,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Efficiency,
    Noise,
    Sensitivity,
    Simulate,
    Optimize,
    Compare,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Efficiency => "efficiency",
            Command::Noise => "noise",
            Command::Sensitivity => "sensitivity",
            Command::Simulate => "simulate",
            Command::Optimize => "optimize",
            Command::Compare => "compare",
            Command::Sweep => "sweep",
        }
    }
}

/// Command-line options that are not part of the scenario file. `seed` and
/// `duration` are folded into the echoed scenario; the rest are echoed as-is.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CommandOptions {
    pub seed: Option<u64>,
    /// s
    pub duration: Option<f64>,
    /// Detector catalog CSV for `compare`; the bundled table otherwise.
    pub catalog: Option<PathBuf>,
    /// Our own SNR₀ for `compare`, pW; computed from the scenario otherwise.
    pub ours_snr0_pw: Option<f64>,
    /// Scenario path for `sweep`, e.g. `pump.power`.
    pub parameter: Option<String>,
    /// Grid for `sweep`, in SI units of `parameter`.
    pub values: Vec<f64>,
    /// Pump powers for the `optimize` trade-off curve, W.
    pub powers_w: Vec<f64>,
    /// Upper bound of the crystal-length search, mm.
    pub max_length_mm: Option<f64>,
}

/// Pump powers of the trade-off curve when none are given, W.
pub const DEFAULT_TRADEOFF_POWERS: &[f64] = &[0.063, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0];

fn to_pw(watts: f64) -> f64 {
    round_significant(watts * 1e12, 12)
}

/// Applies the flag overrides, then runs `command`.
pub fn run_command(command: Command, setup: &ScenarioSetup, options: &CommandOptions) -> Result<Report> {
    let mut setup = setup.clone();
    if let Some(seed) = options.seed {
        setup.simulation.seed = Some(seed);
        setup.document.simulation.seed = Some(seed);
    }
    if let Some(d) = options.duration {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::config("--duration", format!("must be a positive number of seconds, got {d}")));
        }
        setup.simulation.duration = d;
        setup.document.simulation.duration_s = d;
    }
    let mut echoed = options.clone();
    echoed.seed = None;
    echoed.duration = None;
    let inputs = serde_json::json!({
        "scenario": setup.document,
        "options": echoed,
    });
    let mut report = Report::new(command.name(), inputs);
    report.warnings.extend(setup.warnings.iter().cloned());
    match command {
        Command::Efficiency => efficiency(&setup, &mut report)?,
        Command::Noise => noise(&setup, &mut report)?,
        Command::Sensitivity => sensitivity(&setup, &mut report)?,
        Command::Simulate => simulate(&setup, &mut report)?,
        Command::Optimize => optimize(&setup, options, &mut report)?,
        Command::Compare => compare(&setup, options, &mut report)?,
        Command::Sweep => run_sweep(&setup, options, &mut report)?,
    }
    Ok(report)
}

fn efficiency(setup: &ScenarioSetup, report: &mut Report) -> Result<()> {
    let s = &setup.scenario;
    let eval = s.evaluate()?;
    report.push("xi", s.focusing.xi, DIMENSIONLESS);
    report.push("focusing_factor_h", eval.focusing_factor, DIMENSIONLESS);
    report.push("crystal_transmission", s.crystal.transmission(), DIMENSIONLESS);
    report.push("eta_sfg_model", eval.sfg.value, DIMENSIONLESS);
    if eval.sfg.clamped {
        report.push("eta_sfg_model_unclamped", eval.sfg.raw, DIMENSIONLESS);
        report.flags.push("conversion efficiency clamped to 1".into());
    }
    report.push("eta_tot_model", eval.budget.eta_tot, DIMENSIONLESS);
    let model_per_watt = per_watt_efficiency(eval.sfg.raw, s.pump.power)?;
    report.push("eta_sfg_per_watt_model", model_per_watt, "1/W");

    // Lossless crystal at 1 W: the plain theoretical figure.
    let mut lossless = s.crystal;
    lossless.attenuation = 0.0;
    let mut one_watt = s.pump;
    one_watt.power = 1.0;
    let theory = sfg_quantum_efficiency(&lossless, &one_watt, &s.signal, eval.focusing_factor)?.raw;
    report.push("eta_sfg_per_watt_lossless", theory, "1/W");

    match setup.measured {
        Some(m) => {
            let inferred = infer_sfg_efficiency(m.eta_tot, s.eta_opt, s.detector.eta_det)?;
            let measured_per_watt = per_watt_efficiency(inferred, s.pump.power)?;
            let gap = theory_gap(theory, measured_per_watt)?;
            report.push("eta_tot_measured", m.eta_tot, DIMENSIONLESS);
            report.push("eta_sfg_measured", inferred, DIMENSIONLESS);
            report.push("eta_sfg_per_watt_measured", measured_per_watt, "1/W");
            report.push("theory_gap", gap, DIMENSIONLESS);
            report.push("theory_gap_with_absorption", theory_gap(model_per_watt, measured_per_watt)?, DIMENSIONLESS);
            report.notes.push(format!(
                "lossless theory predicts {:.3e} /W, {gap:.2}× the measured {measured_per_watt:.3e} /W; \
                 absorption in the crystal accounts for a factor {:.2}",
                theory,
                1.0 / s.crystal.transmission()
            ));
        }
        None => report
            .notes
            .push("no [measured] section: only modeled efficiencies are reported".into()),
    }
    Ok(())
}

fn noise(setup: &ScenarioSetup, report: &mut Report) -> Result<()> {
    let s = &setup.scenario;
    let band = s.band()?;
    let env = s.environment()?;
    let eval = s.evaluate()?;
    report.push("band_center", band.center_frequency(), "Hz");
    report.push("band_width", band.width(), "Hz");
    report.push("emitter_temperature", env.temperature, "K");
    report.push("emissivity", env.emissivity, DIMENSIONLESS);
    report.push("mean_occupation", mean_thermal_occupation(band.center_frequency(), &env)?, DIMENSIONLESS);
    report.push("dark_rate_model", eval.noise.dark_rate, "Hz");
    report.push("background_rate_model", eval.noise.background_rate, "Hz");
    report.push("total_rate_model", eval.noise.total_rate, "Hz");
    if s.filters.transfer.is_some() {
        report.notes.push("background integrated over the tabulated filter transmission".into());
    }
    if let Some(m) = setup.measured {
        let predicted = s.thermal_background(m.eta_tot)?;
        let measured = m.total_rate - m.dark_rate;
        report.push("background_rate_at_measured_eta", predicted, "Hz");
        report.push("background_rate_measured", measured, "Hz");
        report.push("total_rate_measured", m.total_rate, "Hz");
        if predicted > 0.0 {
            let ratio = measured / predicted;
            report.push("measured_to_predicted_background", ratio, DIMENSIONLESS);
            if ratio > 1.0 {
                report.notes.push(format!(
                    "measured background is {ratio:.2}× the thermal prediction; the excess is attributed to \
                     residual pump photons and other non-thermal light"
                ));
            }
        }
    }
    Ok(())
}

fn sensitivity(setup: &ScenarioSetup, report: &mut Report) -> Result<()> {
    let s = &setup.scenario;
    let band = s.band()?;
    let env = s.environment()?;
    let eval = s.evaluate()?;
    let lambda = s.signal.wavelength;

    let (label, eta_tot, noise) = match setup.measured {
        Some(m) => ("measured", m.eta_tot, compose_noise(m.dark_rate, m.total_rate - m.dark_rate)?),
        None => ("model", eval.budget.eta_tot, eval.noise),
    };
    let sr = sensitivity_report(lambda, eta_tot, noise, band, env, setup.dominance_ratio)?;
    report.push("eta_tot", eta_tot, DIMENSIONLESS);
    report.push("dark_rate", noise.dark_rate, "Hz");
    report.push("background_rate", noise.background_rate, "Hz");
    report.push("total_rate", noise.total_rate, "Hz");
    report.push("snr0", to_pw(sr.snr0), "pW");
    report.push("snr0_floor", to_pw(sr.floor), "pW");
    if setup.measured.is_some() && eval.budget.eta_tot > 0.0 {
        report.push("snr0_model", to_pw(snr0(lambda, eval.budget.eta_tot, &eval.noise)?), "pW");
    }
    report.notes.push(format!("SNR0 computed from the {label} efficiency and count rates"));
    report.flags.push(if sr.background_dominated {
        format!("background dominated (background > {}× dark)", setup.dominance_ratio)
    } else {
        format!("not background dominated (background ≤ {}× dark)", setup.dominance_ratio)
    });

    if let Some(reported) = setup.measured.and_then(|m| m.reported_snr0) {
        let ratio = sr.snr0 / reported;
        report.push("snr0_reported", to_pw(reported), "pW");
        report.push("snr0_computed_to_reported", ratio, DIMENSIONLESS);
        if (ratio - 1.0).abs() > 0.01 {
            report.notes.push(format!(
                "discrepancy: hc/(λ·η_tot)·n_tot gives {:.4} pW but {:.4} pW was reported (ratio {ratio:.3}); \
                 the reported value does not follow from the stated efficiency and count rates",
                sr.snr0 * 1e12,
                reported * 1e12
            ));
        }
    }
    Ok(())
}

fn simulate(setup: &ScenarioSetup, report: &mut Report) -> Result<()> {
    let seed = setup
        .simulation
        .seed
        .ok_or_else(|| Error::config("seed", "`simulate` needs --seed or simulation.seed in the scenario"))?;
    let duration = setup.simulation.duration;
    let pulses = setup.simulation.pulses;
    let chain = setup.detection_chain()?;
    let run = simulate_run(&pulses, &chain, duration, seed)?;
    let stops = PeriodicStops::new(pulses.period(), setup.tac.sync_delay, pulses.pulse_count(duration))?;
    let hist = build_tac_histogram(&run.events, &stops, &setup.tac.config)?;

    report.provenance.seed = Some(seed);
    report.provenance.rng = Some(RNG_ALGORITHM.to_string());
    let sum = &run.summary;
    report.push("duration", sum.duration, "s");
    report.push("eta_tot", chain.eta_tot, DIMENSIONLESS);
    report.push("pulses", sum.pulses as f64, "count");
    report.push("generated_photons", sum.generated_photons as f64, "count");
    report.push("signal_detections", sum.signal_detections as f64, "count");
    report.push("recorded_signal", run.count(EventOrigin::Signal) as f64, "count");
    report.push("dark_events", sum.dark_events as f64, "count");
    report.push("background_events", sum.background_events as f64, "count");
    report.push("dead_time_losses", sum.dead_time_losses as f64, "count");
    report.push("recorded_events", sum.recorded_events as f64, "count");
    report.push("recorded_rate", sum.recorded_rate, "Hz");
    report.push("expected_rate", sum.expected_rate, "Hz");
    report.push("histogram_counts", hist.total() as f64, "count");
    report.push("histogram_overflow", hist.overflow as f64, "count");
    report.push("histogram_unpaired", hist.unpaired as f64, "count");
    match hist.fwhm() {
        Some(w) => report.push("peak_fwhm", round_significant(w * 1e9, 12), "ns"),
        None => report.flags.push("histogram peak width undefined".into()),
    }
    if sum.clipped_signal > 0 {
        report.notes.push(format!(
            "{} signal detections fell outside the run window and were dropped",
            sum.clipped_signal
        ));
    }

    let mut table = Table::new(["bin_start_ns", "bin_end_ns", "counts"]);
    for (edges, &count) in hist.bin_edges.windows(2).zip(&hist.counts) {
        table.push_row(vec![
            round_significant(edges[0] * 1e9, 12).into(),
            round_significant(edges[1] * 1e9, 12).into(),
            count.into(),
        ]);
    }
    report.table = Some(table);
    Ok(())
}

fn optimize(setup: &ScenarioSetup, options: &CommandOptions, report: &mut Report) -> Result<()> {
    let s = &setup.scenario;
    let alpha = s.crystal.attenuation;
    let b = s.focusing.confocal_parameter;
    let max_length = match options.max_length_mm {
        Some(mm) if mm.is_finite() && mm > 0.0 => mm / 1e3,
        Some(mm) => return Err(Error::config("--max-length-mm", format!("must be positive, got {mm}"))),
        None => DEFAULT_MAX_LENGTH,
    };

    let of = optimal_focusing();
    report.push("xi_optimal", of.xi_star, DIMENSIONLESS);
    report.push("h_optimal", of.h_star, DIMENSIONLESS);
    report.push("confocal_parameter_optimal", s.crystal.length / of.xi_star * 1e3, "mm");
    report.push("xi_current", s.focusing.xi, DIMENSIONLESS);
    report.push("h_current", boyd_kleinman_h(s.focusing.xi)?, DIMENSIONLESS);

    match optimal_length_fixed_focus(alpha) {
        Ok(l) => report.push("length_optimal_fixed_h", l * 1e3, "mm"),
        Err(Error::NoInteriorOptimum(why)) => report.flags.push(format!("fixed-h length: {why}")),
        Err(e) => return Err(e),
    }
    let joint = optimal_length_joint(alpha, b, max_length)?;
    report.push("confocal_parameter", b * 1e3, "mm");
    report.push("length_optimal_fixed_waist", joint.length * 1e3, "mm");
    report.push("length_objective_optimal", joint.objective, "m");
    let current = crate::design::length_objective(s.crystal.length, alpha, b);
    if current > 0.0 {
        report.push("gain_over_current_length", joint.objective / current, DIMENSIONLESS);
    }
    if !joint.interior {
        report.flags.push(format!(
            "no interior length optimum: best length is the search bound {} mm",
            max_length * 1e3
        ));
    }

    let powers = if options.powers_w.is_empty() {
        DEFAULT_TRADEOFF_POWERS.to_vec()
    } else {
        options.powers_w.clone()
    };
    let curve = pump_power_tradeoff(s, &powers)?;
    let mut table = Table::new(["power_w", "eta_tot", "snr0_pw", "floor_pw", "flags"]);
    for p in &curve {
        table.push_row(vec![
            p.power.into(),
            p.eta_tot.into(),
            Cell::Num(to_pw(p.snr0)),
            Cell::Num(to_pw(p.floor)),
            if p.clamped { "clamped" } else { "" }.into(),
        ]);
        if p.clamped {
            report.flags.push(format!("conversion efficiency clamped at {} W", p.power));
        }
    }
    report.table = Some(table);
    report
        .notes
        .push("table: pump-power trade-off, with SNR0 approaching the background floor as power grows".into());
    Ok(())
}

fn compare(setup: &ScenarioSetup, options: &CommandOptions, report: &mut Report) -> Result<()> {
    let catalog = match &options.catalog {
        Some(path) => read_catalog_path(path)?,
        None => default_catalog(),
    };
    let s = &setup.scenario;
    let ours_snr0 = match options.ours_snr0_pw {
        Some(pw) if pw.is_finite() && pw > 0.0 => pw / 1e12,
        Some(pw) => return Err(Error::config("--ours-snr0-pw", format!("must be positive, got {pw}"))),
        None => match setup.measured {
            Some(m) => snr0(
                s.signal.wavelength,
                m.eta_tot,
                &compose_noise(m.dark_rate, m.total_rate - m.dark_rate)?,
            )?,
            None => s.evaluate()?.snr0,
        },
    };
    let ours_timing = s.detector.jitter_fwhm;
    let ranked = compare_detectors(ours_timing, ours_snr0, &catalog)?;
    report.push("ours_snr0", to_pw(ours_snr0), "pW");
    report.push("ours_timing", round_significant(ours_timing * 1e9, 12), "ns");
    report.push("catalog_entries", ranked.len() as f64, "count");

    let mut table = Table::new(["name", "timing_ns", "snr0_pw", "snr0_ratio", "timing_ratio", "note"]);
    for r in &ranked {
        table.push_row(vec![
            r.entry.name.clone().into(),
            round_significant(r.entry.timing * 1e9, 12).into(),
            to_pw(r.entry.snr0).into(),
            round_significant(r.improvement, 12).into(),
            round_significant(r.timing_ratio, 12).into(),
            r.entry.note.clone().into(),
        ]);
    }
    report.table = Some(table);
    report
        .notes
        .push("ratios are catalog entry / ours; above 1 the catalog entry is slower or less sensitive".into());
    Ok(())
}

fn run_sweep(setup: &ScenarioSetup, options: &CommandOptions, report: &mut Report) -> Result<()> {
    let parameter = options
        .parameter
        .as_deref()
        .ok_or_else(|| Error::config("--param", "`sweep` needs a parameter path"))?;
    if options.values.is_empty() {
        return Err(Error::config("--values", "`sweep` needs at least one grid value"));
    }
    let result = sweep(&setup.scenario, parameter, &options.values)?;
    let mut table = Table::new([parameter, "eta_sfg", "eta_tot", "n_bg_hz", "snr0_pw", "flags"]);
    for r in &result.rows {
        table.push_row(vec![
            r.value.into(),
            r.eta_sfg.into(),
            r.eta_tot.into(),
            r.n_bg.into(),
            to_pw(r.snr0).into(),
            r.flags.join(";").into(),
        ]);
    }
    report.push("points", result.rows.len() as f64, "count");
    report.table = Some(table);
    Ok(())
}
