//! Start–stop coincidence histograms as built by a time-to-amplitude converter.
//!
//! Every detection starts the converter and the next sync pulse stops it; the
//! recorded delay is `t_stop − t_start`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::run::EventRecord;
use crate::error::{require_positive, Error, Result};
use crate::numerics::round_significant;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TacConfig {
    /// s
    pub bin_width: f64,
    /// Accepted delay range `[min, max)`, s.
    pub window: (f64, f64),
}

impl TacConfig {
    pub fn new(bin_width: f64, window: (f64, f64)) -> Result<Self> {
        let cfg = TacConfig { bin_width, window };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("TAC bin width", self.bin_width)?;
        let (lo, hi) = self.window;
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::domain("TAC window", format!("[{lo}, {hi}) is empty")));
        }
        let bins = (hi - lo) / self.bin_width;
        if (bins - bins.round()).abs() > 1e-6 * bins.max(1.0) || bins.round() < 1.0 {
            return Err(Error::domain(
                "TAC window",
                format!("span {} s is not a whole number of {} s bins", hi - lo, self.bin_width),
            ));
        }
        Ok(())
    }

    pub fn bin_count(&self) -> usize {
        ((self.window.1 - self.window.0) / self.bin_width).round() as usize
    }
}

/// Times of the electrical sync pulses that stop the converter.
pub trait StopSequence {
    /// First stop strictly after `t`. A stop coinciding with `t` exactly is
    /// skipped in favor of the later one.
    fn next_after(&self, t: f64) -> Option<f64>;
}

/// Explicit, sorted stop times.
#[derive(Debug, Clone, Copy)]
pub struct SortedStops<'a>(&'a [f64]);

impl<'a> SortedStops<'a> {
    pub fn new(stops: &'a [f64]) -> Result<Self> {
        if stops.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::domain("stop times", "must be sorted ascending"));
        }
        Ok(SortedStops(stops))
    }
}

impl StopSequence for SortedStops<'_> {
    fn next_after(&self, t: f64) -> Option<f64> {
        let i = self.0.partition_point(|&s| s <= t);
        self.0.get(i).copied()
    }
}

/// `count` stops at `offset + k·period`, generated on demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicStops {
    pub period: f64,
    pub offset: f64,
    pub count: u64,
}

impl PeriodicStops {
    pub fn new(period: f64, offset: f64, count: u64) -> Result<Self> {
        require_positive("sync period", period)?;
        if !offset.is_finite() {
            return Err(Error::domain("sync offset", "must be finite"));
        }
        Ok(PeriodicStops { period, offset, count })
    }

    fn at(&self, k: u64) -> f64 {
        self.offset + k as f64 * self.period
    }
}

impl StopSequence for PeriodicStops {
    fn next_after(&self, t: f64) -> Option<f64> {
        let guess = ((t - self.offset) / self.period).floor();
        let mut k = if guess < 0.0 { 0 } else { guess as u64 };
        // floating-point guard around the division
        while k > 0 && self.at(k - 1) > t {
            k -= 1;
        }
        while k < self.count && self.at(k) <= t {
            k += 1;
        }
        (k < self.count).then(|| self.at(k))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// s, `counts.len() + 1` entries
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Paired starts whose delay fell outside the window.
    pub overflow: u64,
    /// Starts with no later stop.
    pub unpaired: u64,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bin_centers(&self) -> impl Iterator<Item = f64> + '_ {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }

    /// Full width at half maximum of the dominant peak, with linear
    /// interpolation of the half-maximum crossings. The peak height is taken
    /// from a three-bin running mean to damp shot noise.
    pub fn fwhm(&self) -> Option<f64> {
        let n = self.counts.len();
        if n < 3 || self.total() == 0 {
            return None;
        }
        let smooth: Vec<f64> = (0..n)
            .map(|i| {
                let lo = i.saturating_sub(1);
                let hi = (i + 1).min(n - 1);
                (lo..=hi).map(|j| self.counts[j] as f64).sum::<f64>() / (hi - lo + 1) as f64
            })
            .collect();
        let (peak_idx, peak) = smooth
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        let half = peak / 2.0;
        let centers: Vec<f64> = self.bin_centers().collect();

        let mut left = None;
        for i in (0..peak_idx).rev() {
            if smooth[i] < half {
                let (y0, y1) = (smooth[i], smooth[i + 1]);
                left = Some(centers[i] + (half - y0) / (y1 - y0) * (centers[i + 1] - centers[i]));
                break;
            }
        }
        let mut right = None;
        for i in peak_idx + 1..n {
            if smooth[i] < half {
                let (y0, y1) = (smooth[i - 1], smooth[i]);
                right = Some(centers[i - 1] + (y0 - half) / (y0 - y1) * (centers[i] - centers[i - 1]));
                break;
            }
        }
        Some(right? - left?)
    }

    /// Writes `bin_start_ns,bin_end_ns,counts`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bin_start_ns", "bin_end_ns", "counts"])?;
        for (edges, count) in self.bin_edges.windows(2).zip(&self.counts) {
            w.write_record([
                format!("{}", round_significant(edges[0] * 1e9, 12)),
                format!("{}", round_significant(edges[1] * 1e9, 12)),
                count.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("histogram CSV", e))?;
        Ok(())
    }
}

/// Pairs each start with the next stop and bins the delay.
pub fn build_tac_histogram<S: StopSequence>(starts: &[EventRecord], stops: &S, config: &TacConfig) -> Result<Histogram> {
    config.validate()?;
    let bins = config.bin_count();
    let (lo, hi) = config.window;
    let bin_edges = (0..=bins).map(|i| lo + i as f64 * config.bin_width).collect();
    let mut counts = vec![0u64; bins];
    let mut overflow = 0;
    let mut unpaired = 0;
    for start in starts {
        let Some(stop) = stops.next_after(start.timestamp) else {
            unpaired += 1;
            continue;
        };
        let delay = stop - start.timestamp;
        if delay >= lo && delay < hi {
            let i = (((delay - lo) / config.bin_width).floor() as usize).min(bins - 1);
            counts[i] += 1;
        } else {
            overflow += 1;
        }
    }
    Ok(Histogram {
        bin_edges,
        counts,
        overflow,
        unpaired,
    })
}

/// Convenience wrapper for an explicit, sorted list of stop times.
pub fn build_tac_histogram_from_stops(starts: &[EventRecord], stops: &[f64], config: &TacConfig) -> Result<Histogram> {
    build_tac_histogram(starts, &SortedStops::new(stops)?, config)
}
