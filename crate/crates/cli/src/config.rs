use std::path::PathBuf;

use ghp::tolerance::Tolerances;
use ghp::SearchConfig;
use serde::Serialize;

/// Name and version of the random generator behind every seeded run.
pub const GENERATOR: &str = "ChaCha8Rng (rand_chacha 0.3), one stream per criterion";

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub exhaustive_budget: u64,
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(seed: Option<u64>) -> Self {
        RunConfig {
            seed,
            exhaustive_budget: ghp::ghp::DEFAULT_BUDGET,
            tolerances: Tolerances::default(),
            output: None,
        }
    }

    pub fn search(&self) -> SearchConfig {
        SearchConfig {
            seed: self.seed,
            exhaustive_budget: self.exhaustive_budget,
            certify_tol: self.tolerances.certify,
            ..SearchConfig::unseeded()
        }
    }
}
