//! Deterministic seeding and the block runner shared by sweeps and rate estimates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

/// Trials handled by one unit of parallel work.
pub const BLOCK: u64 = 2048;

/// Run-time knobs that do not affect results.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses every core.
    pub workers: Option<usize>,
}

impl RunOptions {
    pub fn workers(n: usize) -> Self {
        Self { workers: Some(n) }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of SNR point `index` under `master`.
pub fn point_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(0x5eed)))
}

/// Generator for one trial: the point seed picks the key, the trial index the stream.
pub fn trial_rng(point_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed);
    rng.set_stream(trial);
    rng
}

/// Evaluate `f` on blocks `0..blocks` and return the results in block order.
pub fn run_blocks<T, F>(blocks: usize, opts: RunOptions, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if opts.workers != Some(1) && blocks > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(opts.workers.unwrap_or(0))
                .build()
                .map_err(|e| crate::error::Error::Numerical(format!("thread pool: {e}")))?;
            return pool.install(|| (0..blocks).into_par_iter().map(&f).collect());
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = opts;
    (0..blocks).map(f).collect()
}

/// Trial range of block `b` out of `total` trials.
pub fn block_range(b: usize, total: u64) -> std::ops::Range<u64> {
    let start = b as u64 * BLOCK;
    start..(start + BLOCK).min(total)
}

pub fn block_count(total: u64) -> usize {
    total.div_ceil(BLOCK) as usize
}

/// Wall clock for the JSON mirror; reads zero where no clock exists (wasm32).
pub(crate) struct Stopwatch(#[cfg(not(target_arch = "wasm32"))] std::time::Instant);

impl Stopwatch {
    pub(crate) fn start() -> Self {
        Self(
            #[cfg(not(target_arch = "wasm32"))]
            std::time::Instant::now(),
        )
    }

    pub(crate) fn seconds(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        return self.0.elapsed().as_secs_f64();
        #[cfg(target_arch = "wasm32")]
        0.0
    }
}
