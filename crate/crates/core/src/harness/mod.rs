//! Experiment engine: configuration, SER sweeps, slope fits, achievable
//! rates, CSV/JSON output and presets.
//!
//! Every trial draws its own generator from `(master seed, SNR point, trial)`
//! and error counts are integers summed per block, so results do not depend on
//! how many workers run the blocks.

mod config;
mod diversity;
mod output;
mod parallel;
mod presets;
mod rate;
mod scheme;
mod sweep;

pub use config::{ChannelConfig, CodeConfig, DecoderKind, ExperimentConfig, Family, RateConfig};
pub use diversity::{auto_window, estimate_diversity, fit_rows, CurvePoint, DiversityFit, AUTO_WINDOW_DB, MIN_ERRORS};
pub use parallel::{point_seed, trial_rng, RunOptions};
pub use presets::{preset_configs, reproduce, PresetOutput, PresetOverrides, PRESETS};
pub use rate::{
    achievable_rate, combined_mutual_information_sample, quantized_mutual_information, RateResult, RateRow,
    MAX_OUTPUT_BITS,
};
pub use scheme::Scheme;
pub use sweep::{
    count_errors, db_to_linear, exact_ml_ser, resolve_method, run_ser_sweep, scheme_metadata, sweep_scheme,
    wilson_interval, ChannelSource, SweepResult, SweepRow,
};
