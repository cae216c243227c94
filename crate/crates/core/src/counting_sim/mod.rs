//! Seeded Monte Carlo model of a pulsed photon-counting experiment and the
//! start–stop histogram it produces.

mod run;
mod sampling;
mod tac;

pub use run::{
    apply_dead_time, dead_time_correction, derive_seed, expected_detection_rate, simulate_batch, simulate_run,
    DetectionChainSpec, EventOrigin, EventRecord, PulseShape, PulseTrainSpec, RunSummary, SimulationRun,
    RNG_ALGORITHM,
};
pub use sampling::{sample_photon_number, PhotonStatistics};
pub use tac::{
    build_tac_histogram, build_tac_histogram_from_stops, Histogram, PeriodicStops, SortedStops, StopSequence,
    TacConfig,
};
