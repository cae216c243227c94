//! Photon-number and count samplers.

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, Geometric, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, Error, Result};

/// Photon-number statistics of a single pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonStatistics {
    /// Coherent (laser) light.
    Poissonian,
    /// Single-mode thermal light, geometric (Bose–Einstein) distribution.
    Thermal,
}

/// Draws a photon number with the given mean.
pub fn sample_photon_number<R: Rng + ?Sized>(mean: f64, statistics: PhotonStatistics, rng: &mut R) -> Result<u64> {
    require_non_negative("mean photon number", mean)?;
    if mean == 0.0 {
        return Ok(0);
    }
    Ok(match statistics {
        PhotonStatistics::Poissonian => poisson(mean, rng)?,
        PhotonStatistics::Thermal => geometric(1.0 / (1.0 + mean), rng)?,
    })
}

pub(crate) fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::domain("Poisson mean", e.to_string()))?;
    Ok(dist.sample(rng) as u64)
}

/// Number of failures before the first success, success probability `p`.
pub(crate) fn geometric<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<u64> {
    let dist = Geometric::new(p).map_err(|e| Error::domain("geometric success probability", e.to_string()))?;
    Ok(dist.sample(rng))
}

/// Poisson variate conditioned on being at least one.
pub(crate) fn zero_truncated_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if !(mean > 0.0) {
        return Err(Error::domain("truncated Poisson mean", format!("must be positive, got {mean}")));
    }
    if mean > 30.0 {
        // P(0) < 1e-13; plain rejection terminates immediately in practice
        loop {
            let k = poisson(mean, rng)?;
            if k > 0 {
                return Ok(k);
            }
        }
    }
    // inversion on p_k = mean^k / (k!·(e^mean − 1))
    let u: f64 = rng.random();
    let mut k = 1u64;
    let mut pk = mean / mean.exp_m1();
    let mut cdf = pk;
    while u > cdf && k < 1_000 {
        k += 1;
        pk *= mean / k as f64;
        cdf += pk;
    }
    Ok(k)
}

/// Negative binomial: failures before `r` successes when each trial fails
/// with probability `q`. Sampled as a gamma–Poisson mixture.
pub(crate) fn negative_binomial<R: Rng + ?Sized>(r: f64, q: f64, rng: &mut R) -> Result<u64> {
    if r == 0.0 || q == 0.0 {
        return Ok(0);
    }
    let gamma = Gamma::new(r, q / (1.0 - q)).map_err(|e| Error::domain("negative binomial", e.to_string()))?;
    poisson(gamma.sample(rng), rng)
}

/// Waiting time to the next event of a homogeneous Poisson process.
pub(crate) fn exponential<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> Result<f64> {
    let dist = Exp::new(rate).map_err(|e| Error::domain("exponential rate", e.to_string()))?;
    Ok(dist.sample(rng))
}
