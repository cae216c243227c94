//! Statistical oracles for the Monte Carlo layer: sampler moments, a
//! Kolmogorov–Smirnov test on noise inter-arrivals, binomial thinning, a
//! pulse-by-pulse reference simulation, dead time and histogram bookkeeping.

use std::collections::BTreeSet;

use mirdet::counting_sim::{
    build_tac_histogram, dead_time_correction, sample_photon_number, simulate_run, DetectionChainSpec, EventOrigin,
    PeriodicStops, PhotonStatistics, PulseShape, PulseTrainSpec, TacConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

fn draws(mean: f64, stats: PhotonStatistics, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| sample_photon_number(mean, stats, &mut rng).unwrap() as f64)
        .collect()
}

/// One-sample KS statistic against the exponential law with `rate`.
fn ks_exponential(mut xs: Vec<f64>, rate: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = 1.0 - (-rate * x).exp();
            (cdf - i as f64 / n).abs().max(((i + 1) as f64 / n - cdf).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at significance 0.01.
fn ks_critical_001(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

fn pulses(mu: f64, stats: PhotonStatistics) -> PulseTrainSpec {
    PulseTrainSpec {
        rep_rate: 750e3,
        pulse_width: 1e-9,
        mean_photons_per_pulse: mu,
        pulse_shape: PulseShape::Rectangular,
        statistics: stats,
    }
}

fn chain(eta: f64, dark: f64, background: f64) -> DetectionChainSpec {
    DetectionChainSpec {
        eta_tot: eta,
        jitter_fwhm: 0.0,
        dead_time: 0.0,
        dark_rate: dark,
        background_rate: background,
    }
}

#[test]
fn poisson_sampler_moments() {
    let xs = draws(1.0, PhotonStatistics::Poissonian, 1_000_000, 1);
    let (mean, var) = moments(&xs);
    assert!((mean - 1.0).abs() < 0.004, "mean {mean}");
    // Var of the sample variance for Poisson(1) is (μ + 2μ²)/n = 3e-6
    assert!((var - 1.0).abs() < 4.0 * 3e-6f64.sqrt(), "variance {var}");
}

#[test]
fn thermal_sampler_moments() {
    let xs = draws(1.0, PhotonStatistics::Thermal, 1_000_000, 2);
    let (mean, var) = moments(&xs);
    assert!((mean - 1.0).abs() < 4.0 * (2.0f64 / 1e6).sqrt(), "mean {mean}");
    assert!((var - 2.0).abs() < 0.03 * 2.0, "variance {var}");
    // P(0) = 1/(1+n̄) for the Bose–Einstein law
    let zeros = xs.iter().filter(|&&x| x == 0.0).count() as f64 / xs.len() as f64;
    assert!((zeros - 0.5).abs() < 4.0 * (0.25f64 / 1e6).sqrt(), "P(0) {zeros}");
}

#[test]
fn zero_mean_source_is_empty() {
    for stats in [PhotonStatistics::Poissonian, PhotonStatistics::Thermal] {
        assert!(draws(0.0, stats, 1000, 3).iter().all(|&x| x == 0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(sample_photon_number(-1.0, PhotonStatistics::Poissonian, &mut rng).is_err());
}

#[test]
fn dark_count_example() {
    let run = simulate_run(&pulses(0.0, PhotonStatistics::Poissonian), &chain(0.0, 55.0, 0.0), 100.0, 4).unwrap();
    let n = run.summary.dark_events as f64;
    assert!((n - 5500.0).abs() <= 297.0, "{n}");
    assert_eq!(run.count(EventOrigin::Signal), 0);
}

#[test]
fn noise_inter_arrivals_are_exponential() {
    for (dark, bg, seed) in [(55.0, 32.8, 5), (10.0, 78.1, 6)] {
        let run = simulate_run(&pulses(0.0, PhotonStatistics::Poissonian), &chain(0.0, dark, bg), 200.0, seed).unwrap();
        for (origin, rate) in [(EventOrigin::Dark, dark), (EventOrigin::Background, bg)] {
            let ts: Vec<f64> = run.events.iter().filter(|e| e.origin == origin).map(|e| e.timestamp).collect();
            let gaps: Vec<f64> = ts.windows(2).map(|w| w[1] - w[0]).collect();
            let n = gaps.len();
            let d = ks_exponential(gaps, rate);
            assert!(d < ks_critical_001(n), "{origin:?} at {rate} Hz: D = {d}, n = {n}");
        }
    }
}

#[test]
fn ks_test_rejects_the_wrong_rate() {
    // the statistic above has power: a 20% rate error is caught
    let run = simulate_run(&pulses(0.0, PhotonStatistics::Poissonian), &chain(0.0, 55.0, 0.0), 200.0, 7).unwrap();
    let gaps: Vec<f64> = run.events.windows(2).map(|w| w[1].timestamp - w[0].timestamp).collect();
    let n = gaps.len();
    assert!(ks_exponential(gaps, 66.0) > ks_critical_001(n));
}

#[test]
fn thinning_is_binomial() {
    for stats in [PhotonStatistics::Poissonian, PhotonStatistics::Thermal] {
        let eta = 0.2;
        let (mut generated, mut detected) = (0u64, 0u64);
        for seed in 0..20 {
            let s = simulate_run(&pulses(1.0, stats), &chain(eta, 0.0, 0.0), 0.05, 100 + seed).unwrap().summary;
            generated += s.generated_photons;
            detected += s.signal_detections;
        }
        let ratio = detected as f64 / generated as f64;
        let sigma = (eta * (1.0 - eta) / generated as f64).sqrt();
        assert!((ratio - eta).abs() < 4.0 * sigma, "{stats:?}: {ratio} vs {eta} ± {sigma}");
    }
}

struct PerPulse {
    detections: u64,
    hit_pulses: u64,
    generated: u64,
}

/// Straightforward reference: draw every pulse, thin every photon.
fn brute_force(n_pulses: u64, mu: f64, eta: f64, stats: PhotonStatistics, seed: u64) -> PerPulse {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PerPulse {
        detections: 0,
        hit_pulses: 0,
        generated: 0,
    };
    for _ in 0..n_pulses {
        let n = sample_photon_number(mu, stats, &mut rng).unwrap();
        let d = if n == 0 { 0 } else { Binomial::new(n, eta).unwrap().sample(&mut rng) };
        out.generated += n;
        out.detections += d;
        out.hit_pulses += (d > 0) as u64;
    }
    out
}

#[test]
fn skip_ahead_matches_pulse_by_pulse_reference() {
    let (mu, eta, runs) = (2.0, 0.1, 300u64);
    for stats in [PhotonStatistics::Poissonian, PhotonStatistics::Thermal] {
        let spec = pulses(mu, stats);
        let duration = 0.01;
        let mut fast = (Vec::new(), Vec::new(), Vec::new());
        let mut slow = (Vec::new(), Vec::new(), Vec::new());
        for seed in 0..runs {
            let run = simulate_run(&spec, &chain(eta, 0.0, 0.0), duration, seed).unwrap();
            let period = spec.period();
            let hit: BTreeSet<u64> = run.events.iter().map(|e| (e.timestamp / period).floor() as u64).collect();
            fast.0.push(run.summary.signal_detections as f64);
            fast.1.push(hit.len() as f64);
            fast.2.push(run.summary.generated_photons as f64);
            let r = brute_force(run.summary.pulses, mu, eta, stats, 10_000 + seed);
            slow.0.push(r.detections as f64);
            slow.1.push(r.hit_pulses as f64);
            slow.2.push(r.generated as f64);
        }
        for (name, a, b) in [
            ("detections", &fast.0, &slow.0),
            ("hit pulses", &fast.1, &slow.1),
            ("generated photons", &fast.2, &slow.2),
        ] {
            let (ma, va) = moments(a);
            let (mb, vb) = moments(b);
            let se = ((va + vb) / runs as f64).sqrt();
            assert!((ma - mb).abs() < 4.0 * se, "{stats:?} {name}: mean {ma} vs {mb} (se {se})");
            // per-run variances agree within a generous factor of their
            // sampling error (≈ √(2/runs) relative)
            assert!((va / vb - 1.0).abs() < 4.0 * (4.0 / runs as f64).sqrt(), "{stats:?} {name}: var {va} vs {vb}");
        }
    }
}

#[test]
fn dead_time_only_removes_events() {
    let spec = pulses(1.0, PhotonStatistics::Poissonian);
    let mut c = chain(0.3, 2e4, 1e4);
    c.jitter_fwhm = 0.3e-9;
    let free = simulate_run(&spec, &c, 0.2, 9).unwrap();
    c.dead_time = 2e-6;
    let dead = simulate_run(&spec, &c, 0.2, 9).unwrap();
    // same seed and same draws, dead time applied last
    let mut it = free.events.iter();
    for e in &dead.events {
        assert!(it.any(|f| f == e), "dead-time output is not a subsequence");
    }
    assert!(dead.events.windows(2).all(|w| w[1].timestamp - w[0].timestamp >= c.dead_time));
    assert_eq!(dead.summary.dead_time_losses, free.events.len() as u64 - dead.events.len() as u64);
    assert!(dead.summary.dead_time_losses > 0);
}

#[test]
fn dead_time_correction_on_poisson_noise() {
    // for a pure Poisson stream the nonparalyzable correction is exact in expectation
    let mut c = chain(0.0, 2e5, 0.0);
    c.dead_time = 1e-6;
    let run = simulate_run(&pulses(0.0, PhotonStatistics::Poissonian), &c, 1.0, 10).unwrap();
    let corrected = dead_time_correction(run.summary.recorded_rate, c.dead_time).unwrap();
    assert!((corrected / 2e5 - 1.0).abs() < 0.01, "{corrected}");
}

#[test]
fn histogram_mass_is_conserved() {
    let spec = pulses(1.0, PhotonStatistics::Poissonian);
    let mut c = chain(1e-3, 55.0, 32.8);
    c.jitter_fwhm = 0.3e-9;
    let duration = 5.0;
    let run = simulate_run(&spec, &c, duration, 11).unwrap();
    let stops = PeriodicStops::new(spec.period(), 5e-9, spec.pulse_count(duration)).unwrap();
    let cfg = TacConfig::new(25e-12, (3e-9, 6e-9)).unwrap();
    let h = build_tac_histogram(&run.events, &stops, &cfg).unwrap();
    assert_eq!(h.counts.len() + 1, h.bin_edges.len());
    assert_eq!(h.total() + h.overflow + h.unpaired, run.events.len() as u64);
    // every signal event lands in the window: delay = 5 ns − (offset + jitter)
    assert!(h.total() >= run.count(EventOrigin::Signal) as u64 - 5);
}

#[test]
fn identical_seeds_identical_streams() {
    let spec = pulses(1.0, PhotonStatistics::Thermal);
    let mut c = chain(0.01, 55.0, 32.8);
    c.jitter_fwhm = 0.3e-9;
    c.dead_time = 50e-9;
    let a = simulate_run(&spec, &c, 1.0, 12).unwrap();
    let b = simulate_run(&spec, &c, 1.0, 12).unwrap();
    let other = simulate_run(&spec, &c, 1.0, 13).unwrap();
    let bits = |r: &mirdet::counting_sim::SimulationRun| -> Vec<u64> { r.events.iter().map(|e| e.timestamp.to_bits()).collect() };
    assert_eq!(bits(&a), bits(&b));
    assert_eq!(a.summary, b.summary);
    assert_ne!(bits(&a), bits(&other));
}
