//! Run configuration shared by the CLI and the verification suites.

use serde::{Deserialize, Serialize};

use crate::rt::{Mode, RingCtx};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    /// Rank parameter (≥ 2).
    pub n: usize,
    /// Truncation degree for symmetric series.
    pub deg: usize,
    /// Maximum affine length for enumerations.
    pub max_length: usize,
    /// GL or SL coefficient normalization.
    pub mode: String,
    /// Parallel jobs for suite runs.
    pub jobs: usize,
    /// Seed for randomized property inputs and case shuffling.
    pub seed: u64,
    /// Cache directory (empty string disables caching).
    pub cache_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 3,
            deg: 4,
            max_length: 4,
            mode: "SL".into(),
            jobs: 1,
            seed: 0,
            cache_dir: String::new(),
        }
    }
}

impl RunConfig {
    pub fn ring(&self) -> RingCtx {
        let mode = if self.mode.eq_ignore_ascii_case("gl") {
            Mode::Gl
        } else {
            Mode::Sl
        };
        RingCtx::new(self.n, mode)
    }
}
