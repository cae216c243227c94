use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{self, PhotonStatistics};
use crate::error::{require_non_negative, require_positive, require_probability, Error, Result};
use crate::quantities::FWHM_PER_SIGMA;

/// Generator used for every simulated run.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha, seed_from_u64)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    /// Uniform emission over `pulse_width`.
    Rectangular,
    /// Gaussian whose FWHM is `pulse_width`, centered in the pulse slot.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseTrainSpec {
    /// Hz
    pub rep_rate: f64,
    /// s
    pub pulse_width: f64,
    pub mean_photons_per_pulse: f64,
    pub pulse_shape: PulseShape,
    pub statistics: PhotonStatistics,
}

impl PulseTrainSpec {
    pub fn validate(&self) -> Result<()> {
        require_positive("repetition rate", self.rep_rate)?;
        require_positive("pulse width", self.pulse_width)?;
        if self.pulse_width >= 1.0 / self.rep_rate {
            return Err(Error::domain(
                "pulse width",
                format!("{} s does not fit in the {} s pulse period", self.pulse_width, 1.0 / self.rep_rate),
            ));
        }
        require_non_negative("mean photons per pulse", self.mean_photons_per_pulse)?;
        Ok(())
    }

    pub fn period(&self) -> f64 {
        1.0 / self.rep_rate
    }

    /// Number of pulses whose start time lies in `[0, duration)`.
    pub fn pulse_count(&self, duration: f64) -> u64 {
        (duration * self.rep_rate).ceil() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionChainSpec {
    pub eta_tot: f64,
    /// s
    pub jitter_fwhm: f64,
    /// s
    pub dead_time: f64,
    /// Hz
    pub dark_rate: f64,
    /// Hz
    pub background_rate: f64,
}

impl DetectionChainSpec {
    pub fn validate(&self) -> Result<()> {
        require_probability("eta_tot", self.eta_tot)?;
        require_non_negative("jitter FWHM", self.jitter_fwhm)?;
        require_non_negative("dead time", self.dead_time)?;
        require_non_negative("dark count rate", self.dark_rate)?;
        require_non_negative("background count rate", self.background_rate)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventOrigin {
    Signal,
    Dark,
    Background,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    /// s since the start of the run
    pub timestamp: f64,
    pub origin: EventOrigin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub rng: String,
    /// s
    pub duration: f64,
    pub pulses: u64,
    pub generated_photons: u64,
    /// Detected signal photons before dead time and range clipping.
    pub signal_detections: u64,
    /// Signal detections pushed outside `[0, duration)` by pulse shape or jitter.
    pub clipped_signal: u64,
    pub dark_events: u64,
    pub background_events: u64,
    pub dead_time_losses: u64,
    pub recorded_events: u64,
    /// Hz
    pub recorded_rate: f64,
    /// Dead-time-free analytic expectation, Hz.
    pub expected_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub events: Vec<EventRecord>,
    pub summary: RunSummary,
}

impl SimulationRun {
    pub fn count(&self, origin: EventOrigin) -> usize {
        self.events.iter().filter(|e| e.origin == origin).count()
    }
}

/// Probability that a pulse yields at least one detection.
fn pulse_detection_probability(pulses: &PulseTrainSpec, eta_tot: f64) -> f64 {
    let detected_mean = pulses.mean_photons_per_pulse * eta_tot;
    match pulses.statistics {
        PhotonStatistics::Poissonian => -(-detected_mean).exp_m1(),
        PhotonStatistics::Thermal => detected_mean / (1.0 + detected_mean),
    }
}

/// Mean recorded rate without dead time.
///
/// For Poissonian pulses this is `rep·(1 − exp(−μη)) + dark + background`;
/// thermal pulses use the geometric zero-class `rep·μη/(1 + μη)`.
pub fn expected_detection_rate(pulses: &PulseTrainSpec, chain: &DetectionChainSpec) -> Result<f64> {
    pulses.validate()?;
    chain.validate()?;
    Ok(pulses.rep_rate * pulse_detection_probability(pulses, chain.eta_tot) + chain.dark_rate + chain.background_rate)
}

/// Nonparalyzable dead-time correction `r / (1 − r·τ)`.
pub fn dead_time_correction(measured_rate: f64, dead_time: f64) -> Result<f64> {
    require_non_negative("measured rate", measured_rate)?;
    require_non_negative("dead time", dead_time)?;
    let busy = measured_rate * dead_time;
    if busy >= 1.0 {
        return Err(Error::domain(
            "dead-time correction",
            format!("detector saturated: rate × dead time = {busy}"),
        ));
    }
    Ok(measured_rate / (1.0 - busy))
}

/// Keeps events separated by at least `dead_time` from the previously kept
/// one. `events` must be time-sorted.
pub fn apply_dead_time(events: Vec<EventRecord>, dead_time: f64) -> Vec<EventRecord> {
    if dead_time <= 0.0 {
        return events;
    }
    let mut last = f64::NEG_INFINITY;
    events
        .into_iter()
        .filter(|e| {
            if e.timestamp - last >= dead_time {
                last = e.timestamp;
                true
            } else {
                false
            }
        })
        .collect()
}

fn poisson_process<R: Rng>(rate: f64, duration: f64, origin: EventOrigin, rng: &mut R, out: &mut Vec<EventRecord>) -> Result<u64> {
    if rate == 0.0 {
        return Ok(0);
    }
    let mut t = 0.0;
    let mut n = 0;
    loop {
        t += sampling::exponential(rate, rng)?;
        if t >= duration {
            return Ok(n);
        }
        out.push(EventRecord { timestamp: t, origin });
        n += 1;
    }
}

/// Simulates one counting run of `duration` seconds.
///
/// Pulses start at `k/rep_rate`. Each pulse carries a photon number with the
/// configured statistics and every photon is kept with probability
/// `eta_tot`. Pulses without detections are skipped in bulk: the gap to the
/// next pulse with at least one detection is geometric, and the number of
/// detections in that pulse is drawn from the matching zero-truncated law.
/// The undetected photon total is drawn from its exact conditional
/// distribution, so `generated_photons` has the same law as a pulse-by-pulse
/// simulation. Detections are placed inside the pulse, blurred by Gaussian
/// jitter, merged with Poisson dark and background events, and finally
/// filtered by a nonparalyzable dead time.
pub fn simulate_run(pulses: &PulseTrainSpec, chain: &DetectionChainSpec, duration: f64, seed: u64) -> Result<SimulationRun> {
    pulses.validate()?;
    chain.validate()?;
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::domain("duration", format!("must be positive, got {duration}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let n_pulses = pulses.pulse_count(duration);
    let mu = pulses.mean_photons_per_pulse;
    let eta = chain.eta_tot;
    let p_hit = pulse_detection_probability(pulses, eta);
    let period = pulses.period();

    let jitter = if chain.jitter_fwhm > 0.0 {
        Some(Normal::new(0.0, chain.jitter_fwhm / FWHM_PER_SIGMA).map_err(|e| Error::domain("jitter", e.to_string()))?)
    } else {
        None
    };
    let gaussian_pulse = Normal::new(pulses.pulse_width / 2.0, pulses.pulse_width / FWHM_PER_SIGMA)
        .map_err(|e| Error::domain("pulse width", e.to_string()))?;

    let mut events = Vec::new();
    let mut detected = 0u64;
    let mut clipped = 0u64;
    if p_hit > 0.0 && n_pulses > 0 {
        let mut k = sampling::geometric(p_hit, &mut rng)?;
        while k < n_pulses {
            let in_pulse = match pulses.statistics {
                PhotonStatistics::Poissonian => sampling::zero_truncated_poisson(mu * eta, &mut rng)?,
                PhotonStatistics::Thermal => 1 + sampling::geometric(1.0 / (1.0 + mu * eta), &mut rng)?,
            };
            detected += in_pulse;
            let start = k as f64 * period;
            for _ in 0..in_pulse {
                let offset = match pulses.pulse_shape {
                    PulseShape::Rectangular => rng.random::<f64>() * pulses.pulse_width,
                    PulseShape::Gaussian => gaussian_pulse.sample(&mut rng),
                };
                let blur = jitter.map_or(0.0, |j| j.sample(&mut rng));
                let t = start + offset + blur;
                if (0.0..duration).contains(&t) {
                    events.push(EventRecord {
                        timestamp: t,
                        origin: EventOrigin::Signal,
                    });
                } else {
                    clipped += 1;
                }
            }
            k = k.saturating_add(1).saturating_add(sampling::geometric(p_hit, &mut rng)?);
        }
    }

    let undetected = match pulses.statistics {
        PhotonStatistics::Poissonian => sampling::poisson(n_pulses as f64 * mu * (1.0 - eta), &mut rng)?,
        PhotonStatistics::Thermal => {
            // given d detections in a pulse, its missed photons are
            // NegBin(d + 1, s(1 − η)) with s = μ/(1 + μ); these add up
            let fail = mu / (1.0 + mu) * (1.0 - eta);
            sampling::negative_binomial((n_pulses + detected) as f64, fail, &mut rng)?
        }
    };

    let dark = poisson_process(chain.dark_rate, duration, EventOrigin::Dark, &mut rng, &mut events)?;
    let background = poisson_process(chain.background_rate, duration, EventOrigin::Background, &mut rng, &mut events)?;

    events.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp).then(a.origin.cmp(&b.origin)));
    let before = events.len() as u64;
    let events = apply_dead_time(events, chain.dead_time);
    let recorded = events.len() as u64;

    let summary = RunSummary {
        seed,
        rng: RNG_ALGORITHM.to_string(),
        duration,
        pulses: n_pulses,
        generated_photons: detected + undetected,
        signal_detections: detected,
        clipped_signal: clipped,
        dark_events: dark,
        background_events: background,
        dead_time_losses: before - recorded,
        recorded_events: recorded,
        recorded_rate: recorded as f64 / duration,
        expected_rate: expected_detection_rate(pulses, chain)?,
    };
    Ok(SimulationRun { events, summary })
}

/// Seed of run `index` in a batch rooted at `master_seed`.
///
/// Each child seed is the first output of the ChaCha8 stream `index` keyed by
/// the master seed, so it does not depend on how runs are scheduled.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng.next_u64()
}

/// Runs `runs` independent simulations in parallel, returned in index order.
pub fn simulate_batch(
    pulses: &PulseTrainSpec,
    chain: &DetectionChainSpec,
    duration: f64,
    master_seed: u64,
    runs: usize,
) -> Result<Vec<SimulationRun>> {
    (0..runs as u64)
        .into_par_iter()
        .map(|i| simulate_run(pulses, chain, duration, derive_seed(master_seed, i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qcl(mu: f64) -> PulseTrainSpec {
        PulseTrainSpec {
            rep_rate: 750e3,
            pulse_width: 1e-9,
            mean_photons_per_pulse: mu,
            pulse_shape: PulseShape::Rectangular,
            statistics: PhotonStatistics::Poissonian,
        }
    }

    fn chain(eta: f64, dark: f64, bg: f64) -> DetectionChainSpec {
        DetectionChainSpec {
            eta_tot: eta,
            jitter_fwhm: 0.3e-9,
            dead_time: 0.0,
            dark_rate: dark,
            background_rate: bg,
        }
    }

    #[test]
    fn expected_rate_examples() {
        let r = expected_detection_rate(&qcl(1.0), &chain(3.6e-6, 0.0, 0.0)).unwrap();
        assert!((r - 2.70).abs() < 0.005);
        let sat = expected_detection_rate(&qcl(1e6), &chain(0.5, 55.0, 32.8)).unwrap();
        assert!((sat - (750e3 + 87.8)).abs() < 1e-6);
        let blind = expected_detection_rate(&qcl(1.0), &chain(0.0, 55.0, 32.8)).unwrap();
        assert!((blind - 87.8).abs() < 1e-12);
    }

    #[test]
    fn dead_time_correction_examples() {
        assert_eq!(dead_time_correction(1234.0, 0.0).unwrap(), 1234.0);
        let r = dead_time_correction(125e3, 50e-9).unwrap();
        assert!((r - 125.8e3).abs() < 0.05e3);
        assert!((dead_time_correction(1e6, 0.5e-6).unwrap() - 2e6).abs() < 1e-6);
        assert!(dead_time_correction(1e6, 1e-6).is_err());
    }

    #[test]
    fn dead_chain_records_nothing() {
        let run = simulate_run(&qcl(1.0), &chain(0.0, 0.0, 0.0), 10.0, 1).unwrap();
        assert!(run.events.is_empty());
        assert_eq!(run.summary.recorded_events, 0);
    }

    #[test]
    fn invalid_specs() {
        assert!(simulate_run(&qcl(1.0), &chain(0.1, 0.0, 0.0), 0.0, 1).is_err());
        let wide = PulseTrainSpec { pulse_width: 2e-6, ..qcl(1.0) };
        assert!(simulate_run(&wide, &chain(0.1, 0.0, 0.0), 1.0, 1).is_err());
        assert!(simulate_run(&qcl(-1.0), &chain(0.1, 0.0, 0.0), 1.0, 1).is_err());
        assert!(simulate_run(&qcl(1.0), &chain(1.5, 0.0, 0.0), 1.0, 1).is_err());
    }

    #[test]
    fn same_seed_same_stream() {
        let c = DetectionChainSpec { dead_time: 1e-6, ..chain(3.6e-3, 55.0, 32.8) };
        let a = simulate_run(&qcl(1.0), &c, 5.0, 42).unwrap();
        let b = simulate_run(&qcl(1.0), &c, 5.0, 42).unwrap();
        assert_eq!(a, b);
        let other = simulate_run(&qcl(1.0), &c, 5.0, 43).unwrap();
        assert_ne!(a.events, other.events);
    }

    #[test]
    fn dead_time_filter_is_a_subsequence() {
        let c = DetectionChainSpec { dead_time: 0.0, ..chain(0.05, 2e4, 1e4) };
        let raw = simulate_run(&qcl(1.0), &c, 0.5, 3).unwrap().events;
        let tau = 20e-6;
        let kept = apply_dead_time(raw.clone(), tau);
        assert!(kept.len() < raw.len());
        assert!(kept.windows(2).all(|w| w[1].timestamp - w[0].timestamp >= tau));
        let mut it = raw.iter();
        for k in &kept {
            assert!(it.any(|r| r == k));
        }
    }

    #[test]
    fn batch_order_is_independent_of_threads() {
        let c = chain(3.6e-3, 55.0, 0.0);
        let batch = simulate_batch(&qcl(1.0), &c, 1.0, 99, 6).unwrap();
        for (i, run) in batch.iter().enumerate() {
            let serial = simulate_run(&qcl(1.0), &c, 1.0, derive_seed(99, i as u64)).unwrap();
            assert_eq!(run, &serial);
        }
        let seeds: std::collections::HashSet<_> = (0..100).map(|i| derive_seed(99, i)).collect();
        assert_eq!(seeds.len(), 100);
    }
}
